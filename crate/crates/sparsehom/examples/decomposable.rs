//! Decomposable sparse systems: detect lacunary and triangular structure,
//! solve by recursion, and compare path counts with the polyhedral homotopy.
//!
//! `cargo run --release --example decomposable`

use sparsehom::decomposable::{decomposable_start, detect_structure, lacunary_reduction, retrack_from_start, solve_decomposable, DecomposableConfig, Stage, StructureReport};
use sparsehom::mixedvol::mixed_volume_of_supports;
use sparsehom::polyhedral::{polyhedral_solve, random_system};
use sparsehom::tracker::{dedup_points, same_point_set};
use sparsehom::{SparsePoly, SparseSystem};

fn cols(rows: &[&[i64]]) -> Vec<Vec<i64>> {
    (0..rows[0].len()).map(|j| rows.iter().map(|r| r[j]).collect()).collect()
}

/// Two planar pairs in disjoint variables, plus a dense cube polynomial.
fn triangular_supports() -> Vec<Vec<Vec<i64>>> {
    let embed = |pts: Vec<Vec<i64>>, off: usize| -> Vec<Vec<i64>> {
        pts.into_iter()
            .map(|p| {
                let mut v = vec![0; 5];
                v[off] = p[0];
                v[off + 1] = p[1];
                v
            })
            .collect()
    };
    let a1 = cols(&[&[0, 1, 2, 0, 1], &[0, 0, 0, 1, 1]]);
    let a2 = cols(&[&[1, 0, 1, 2, 1], &[0, 1, 1, 1, 2]]);
    let b1 = cols(&[&[0, 2, 0, 2], &[0, 0, 1, 3]]);
    let b2 = cols(&[&[0, 1, 2, 0, 2, 0], &[0, 0, 0, 1, 1, 2]]);
    let cube: Vec<Vec<i64>> = (0..32).map(|m| (0..5).map(|i| (m >> i) & 1).collect()).collect();
    vec![embed(a1, 0), embed(a2, 0), embed(b1, 2), embed(b2, 2), cube]
}

fn main() {
    let dcfg = DecomposableConfig::default();

    // Triangular: five equations in five unknowns.
    let f = random_system(&triangular_supports(), 8);
    let sol = solve_decomposable(&f, &dcfg).unwrap();
    println!("triangular system: {} solutions", sol.solutions.len());
    for s in &sol.steps {
        println!("  depth {} ({} vars): {:?} {}", s.depth, s.nvars, s.kind, s.detail);
    }
    println!(
        "  paths: {} total ({} black-box, {} fiber); polyhedral homotopy would track {}",
        sol.ledger.total(),
        sol.ledger.stage_total(Stage::Blackbox),
        sol.ledger.stage_total(Stage::Fiber),
        mixed_volume_of_supports(&f.supports()).unwrap()
    );
    let direct = polyhedral_solve(&f, &dcfg.tracker).unwrap();
    println!("  same set as the polyhedral homotopy: {}", same_point_set(&sol.solutions, &direct.solutions, 1e-6));

    // Lacunary: the supports span a sublattice of index 12.
    let lac = SparseSystem::new(vec![
        SparsePoly::from_pairs(2, &[(1.0, &[0, 0][..]), (2.0, &[0, 4]), (4.0, &[3, 3]), (8.0, &[6, 6]), (16.0, &[12, 0])]),
        SparsePoly::from_pairs(2, &[(3.0, &[0, 0][..]), (5.0, &[3, 7]), (7.0, &[6, 2]), (11.0, &[9, 1]), (13.0, &[9, 5])]),
    ])
    .unwrap();
    if let StructureReport::Lacunary(d) = detect_structure(&lac.supports()).unwrap() {
        let reduced = lacunary_reduction(&lac, &d).unwrap();
        println!("\nlacunary system, index {}; reduced system:", d.index);
        for p in &reduced.polys {
            println!("  {p}");
        }
    }
    let sol = solve_decomposable(&lac, &dcfg).unwrap();
    println!("  {} solutions with {} paths", sol.solutions.len(), sol.ledger.total());

    // A start system from the vertex supports, reused for random coefficients.
    let a = cols(&[&[0, 0, 1, 1, 2, 3, 3, 3, 4, 5, 5, 6], &[0, 2, 0, 1, 3, 0, 1, 4, 2, 3, 4, 4]]);
    let supports = vec![a.clone(), a];
    let start = decomposable_start(&supports, &dcfg).unwrap();
    println!("\nvertex start system with {} solutions (MV {})", start.solution.solutions.len(), mixed_volume_of_supports(&supports).unwrap());
    let g = random_system(&supports, 30);
    let got = dedup_points(&retrack_from_start(&g, &start, &dcfg).solutions(), 1e-6);
    println!("  retracked to a random system: {} distinct solutions", got.len());
}
