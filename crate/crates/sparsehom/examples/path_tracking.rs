//! Predictor-corrector tracking, the Cauchy endgame and alpha-theory.
//!
//! `cargo run --example path_tracking`

use sparsehom::poly::r;
use sparsehom::tracker::{alpha_threshold, fixed_step_trace, newton_refine, track_path, PathStatus, PolyHomotopy, StraightLine, TrackerConfig};
use sparsehom::{SparsePoly, SparseSystem};

fn main() {
    // 5 (x - .1)(x - .4)^2 (x - .6) at t = 0 from (x - .25)(x - .5)(x - .75)(x - .05) at t = 1.
    let lin = |a: f64| SparsePoly::from_pairs(1, &[(1.0, &[1][..]), (-a, &[0])]);
    let prod = |fs: &[SparsePoly]| fs.iter().skip(1).fold(fs[0].clone(), |acc, f| &acc * f);
    let h = StraightLine {
        target: SparseSystem::new(vec![prod(&[lin(0.1), lin(0.4), lin(0.4), lin(0.6)]).scale(r(5.0))]).unwrap(),
        start: SparseSystem::new(vec![prod(&[lin(0.25), lin(0.5), lin(0.75), lin(0.05)])]).unwrap(),
        gamma0: r(1.0),
        gamma1: r(1.0),
    };
    let euler = fixed_step_trace(&h, &[r(0.75)], 0.1, 0).unwrap();
    let newton = fixed_step_trace(&h, &[r(0.75)], 0.1, 1).unwrap();
    println!("   t   Euler     Euler+Newton");
    for ((t, a), (_, b)) in euler.iter().zip(&newton) {
        println!("  {t:.1}  {:.6}  {:.6}", a[0].re, b[0].re);
    }
    let adaptive = track_path(&h, &[r(0.75)], &TrackerConfig::default()).unwrap();
    println!("adaptive: {:?} at {:.12} in {} steps", adaptive.status, adaptive.endpoint.unwrap()[0].re, adaptive.steps);

    // The path from 0.5 ends at the double root 0.4: the endgame finds winding 2.
    let o = track_path(&h, &[r(0.5)], &TrackerConfig::default()).unwrap();
    assert_eq!(o.status, PathStatus::EndgameConverged);
    println!("from 0.5: {:?}, winding {}, endpoint {:.8}", o.status, o.winding, o.endpoint.unwrap()[0]);

    // An explicit singular family: (x - 1)^3 + t.
    let t = SparsePoly::var(2, 0);
    let x = SparsePoly::var(2, 1);
    let d = &x - &SparsePoly::constant(2, r(1.0));
    let cube = &(&(&d * &d) * &d) + &t;
    let o = track_path(&PolyHomotopy::new(SparseSystem::new(vec![cube]).unwrap()), &[r(0.0)], &TrackerConfig::default()).unwrap();
    println!("(x - 1)^3 + t: winding {}, endpoint {:.10}", o.winding, o.endpoint.unwrap()[0]);

    println!("alpha threshold (13 - 3 sqrt 17)/4 = {:.16}", alpha_threshold());
    let f = SparseSystem::new(vec![SparsePoly::from_pairs(1, &[(1.0, &[2][..]), (-2.0, &[0])])]).unwrap();
    for k in 0..5 {
        let (x, rep) = newton_refine(&f, &[r(1.5)], k).unwrap();
        println!("  Newton {k}: error {:.3e}  alpha {:.3e}  certified {}", (x[0].re - 2f64.sqrt()).abs(), rep.alpha, rep.certified);
    }
}
