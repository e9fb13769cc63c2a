//! Solve a sparse system with the polyhedral homotopy: exactly one path per
//! unit of mixed volume.
//!
//! `cargo run --example polyhedral_solve`

use sparsehom::mixedvol::mixed_volume_of_supports;
use sparsehom::polyhedral::{polyhedral_solve, random_system};
use sparsehom::tracker::{bezout_solve, TrackerConfig};
use sparsehom::{SparsePoly, SparseSystem};

fn main() {
    let f = SparseSystem::new(vec![
        SparsePoly::from_pairs(2, &[(3.0, &[0, 0][..]), (4.0, &[1, 0]), (-2.0, &[0, 1]), (1.0, &[1, 1])]),
        SparsePoly::from_pairs(2, &[(6.0, &[0, 0][..]), (-2.0, &[1, 2]), (1.0, &[2, 1])]),
    ])
    .unwrap();
    let cfg = TrackerConfig::default();
    let rep = polyhedral_solve(&f, &cfg).unwrap();
    println!("F = ({}, {})", f.polys[0], f.polys[1]);
    println!("mixed volume {}, Bezout number {}", rep.mixed_volume, f.degrees().iter().product::<i64>());
    for (x, ok) in rep.solutions.iter().zip(&rep.certified) {
        println!("  x = {:.8}, y = {:.8}  residual {:.1e}  certified {ok}", x[0], x[1], f.residual(x));
    }

    // A random system on larger supports: the polyhedral homotopy tracks MV
    // paths, the total-degree homotopy tracks the Bezout number.
    let supports = vec![
        vec![vec![0, 0], vec![5, 0], vec![0, 1], vec![4, 1], vec![1, 3]],
        vec![vec![1, 0], vec![0, 4], vec![3, 3], vec![2, 0], vec![0, 0]],
    ];
    let g = random_system(&supports, 7);
    let mv = mixed_volume_of_supports(&supports).unwrap();
    let poly = polyhedral_solve(&g, &cfg).unwrap();
    let total = bezout_solve(&g, &cfg);
    println!("random system: MV {mv}; polyhedral found {} with {} paths; total degree found {} with {} paths",
        poly.solutions.len(), poly.paths(), total.solutions().len(), total.paths());
}
