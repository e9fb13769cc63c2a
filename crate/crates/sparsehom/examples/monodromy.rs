//! Solving by monodromy from a single seed solution, and the probability
//! that two random loops already act transitively.
//!
//! `cargo run --example monodromy`

use sparsehom::monodromy::{monodromy_solve, transitivity_probability, ConjugationModel, MonodromyOptions, StopCriterion};
use sparsehom::polyhedral::random_system;
use sparsehom::rational::q_to_f64;
use sparsehom::tracker::{dense_support, newton_refine, CoeffFamily, TrackerConfig};
use sparsehom::SparseSystem;

fn main() {
    // A family of two dense quadrics; seed a fiber by making the constant
    // terms vanish at a chosen point.
    let s = dense_support(2, 2);
    let g = random_system(&[s.clone(), s.clone()], 4);
    let (family, mut params) = CoeffFamily::from_system(&g);
    let x0 = vec![sparsehom::poly::c(0.3, -0.8), sparsehom::poly::c(1.1, 0.4)];
    let vals = g.eval(&x0).unwrap();
    let constant = |k: usize| s.iter().position(|e| e.iter().all(|&v| v == 0)).unwrap() + k * s.len();
    for (k, v) in vals.iter().enumerate() {
        params[constant(k)] -= v;
    }
    let fiber_sys: SparseSystem = family.system(&params);
    assert!(newton_refine(&fiber_sys, &x0, 1).is_ok());

    let opts = MonodromyOptions { conjugation: false, stop: StopCriterion::Count(4), max_loops: None, seed: 1 };
    let fs = monodromy_solve(&family, &params, &[x0], &opts, &TrackerConfig::default()).unwrap();
    println!("found {} of 4 points with {} loops (complete: {})", fs.points.len(), fs.log.len(), fs.complete);
    for p in &fs.points {
        println!("  ({:.6}, {:.6})  residual {:.1e}", p[0], p[1], fiber_sys.residual(p));
    }

    println!("\nprobability that two random loops act transitively:");
    println!("   d   S_d     involutions  fixed-point-free");
    for d in [2, 3, 4, 6, 10, 20] {
        let p = |m| transitivity_probability(d, m).map(|q| format!("{:.3}", q_to_f64(&q))).unwrap_or_else(|_| "  -  ".into());
        println!("  {d:2}   {}   {}        {}", p(ConjugationModel::Symmetric), p(ConjugationModel::Involutions), p(ConjugationModel::FixedPointFree));
    }
}
