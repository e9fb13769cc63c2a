//! A coherent mixed subdivision from a lifting, its mixed cells, and the
//! binomial start systems they define.
//!
//! `cargo run --example subdivision`

use sparsehom::poly::SparseSystem;
use sparsehom::polyhedral::build_cell_starts;
use sparsehom::rational::qi;
use sparsehom::subdivision::{fine_mixed_cells, induce_subdivision, mixed_cells, LiftedSupport};
use sparsehom::SparsePoly;

fn main() {
    let f = SparseSystem::new(vec![
        SparsePoly::from_pairs(2, &[(3.0, &[0, 0][..]), (4.0, &[1, 0]), (-2.0, &[0, 1]), (1.0, &[1, 1])]),
        SparsePoly::from_pairs(2, &[(6.0, &[0, 0][..]), (-2.0, &[1, 2]), (1.0, &[2, 1])]),
    ])
    .unwrap();
    let lifting = LiftedSupport::new(f.supports(), vec![vec![qi(2), qi(3), qi(3), qi(3)], vec![qi(1), qi(1), qi(1)]]).unwrap();

    let sub = induce_subdivision(&lifting).unwrap();
    println!("{} cells in the subdivision of A1 + A2", sub.cells.len());
    for c in &sub.cells {
        let omega: Vec<String> = c.omega.iter().map(|q| q.to_string()).collect();
        println!("  type {:?}  volume {:>3}  omega ({})", c.type_vec, c.volume.to_string(), omega.join(", "));
    }

    let cells = fine_mixed_cells(&lifting).unwrap();
    assert_eq!(cells.len(), mixed_cells(&sub, &[1, 1]).len());
    for start in build_cell_starts(&f, &lifting, &cells).unwrap() {
        println!("cell with nu = {:?}:", start.nu.iter().map(|q| q.to_string()).collect::<Vec<_>>());
        for p in &start.binomial.polys {
            println!("  {p}");
        }
        for z in &start.solutions {
            println!("  z = ({:.6}, {:.6})", z[0], z[1]);
        }
    }
}
