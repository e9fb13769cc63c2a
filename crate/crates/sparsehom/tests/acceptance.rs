//! End-to-end acceptance checks. Each criterion prints one `PASS`/`FAIL`
//! line; the process exits non-zero if any criterion fails.

use std::panic::{self, AssertUnwindSafe};
use std::time::Instant;

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sparsehom::decomposable::*;
use sparsehom::hs_oracle::*;
use sparsehom::intlin::{self, MonomialChange};
use sparsehom::mixedvol::{self, mixed_volume, MvMethod};
use sparsehom::monodromy::{transitivity_probability, ConjugationModel};
use sparsehom::poly::{r, SparsePoly, SparseSystem, C64};
use sparsehom::polyhedral::{self, polyhedral_solve, random_system};
use sparsehom::polytope::{self, convex_hull_int, invariant_constraint, satisfies_constraint};
use sparsehom::rational::{self, q_to_f64, qi};
use sparsehom::subdivision::{self, LiftedSupport};
use sparsehom::tracker::{self, same_point_set, StraightLine, TrackerConfig};
use sparsehom::witness;

/// Outcome of one criterion: `Err` carries the reason for a failure.
type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn poly(n: usize, terms: &[(f64, &[i64])]) -> SparsePoly {
    let pairs: Vec<(C64, &[i64])> = terms.iter().map(|(c, e)| (r(*c), *e)).collect();
    SparsePoly::from_pairs(n, &pairs)
}

fn cols(rows: &[&[i64]]) -> Vec<Vec<i64>> {
    (0..rows[0].len()).map(|j| rows.iter().map(|r| r[j]).collect()).collect()
}

fn max_residual(f: &SparseSystem, sols: &[Vec<C64>]) -> f64 {
    sols.iter().map(|x| f.residual(x)).fold(0.0, f64::max)
}

fn cfg() -> TrackerConfig {
    TrackerConfig::default()
}

const METHODS: [MvMethod; 3] = [MvMethod::AlternatingVolume, MvMethod::LatticePoints, MvMethod::MixedCells];

fn square() -> Vec<Vec<i64>> {
    vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]
}

fn skew_triangle() -> Vec<Vec<i64>> {
    vec![vec![0, 0], vec![1, 2], vec![2, 1]]
}

fn all_methods(supports: &[Vec<Vec<i64>>]) -> Result<Vec<rational::Q>, String> {
    let polys: Vec<_> = supports.iter().map(|a| convex_hull_int(a).map_err(|e| e.to_string())).collect::<Result<_, _>>()?;
    METHODS.iter().map(|&m| mixed_volume(&polys, m).map_err(|e| format!("{m:?}: {e}"))).collect()
}

fn criterion_1() -> Check {
    let simplex = vec![vec![0, 0], vec![1, 0], vec![0, 1]];
    let v = all_methods(&[square(), simplex])?;
    ensure!(v.iter().all(|x| *x == qi(2)), "MV(square, simplex) = {v:?}");
    let v = all_methods(&[square(), skew_triangle()])?;
    ensure!(v.iter().all(|x| *x == qi(4)), "MV of the lifting example = {v:?}");
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for k in 0..50 {
        let (n, hi) = if k < 25 { (2, 4) } else { (3, 3) };
        let supports: Vec<Vec<Vec<i64>>> =
            (0..n).map(|_| (0..rng.gen_range(1..=5)).map(|_| (0..n).map(|_| rng.gen_range(0..=hi)).collect()).collect()).collect();
        let v = all_methods(&supports)?;
        ensure!(v.iter().all(|x| *x == v[0]), "methods disagree on {supports:?}: {v:?}");
    }
    Ok("2 and 4 by all three methods; 50 random tuples agree".into())
}

fn criterion_2() -> Check {
    let lifting = LiftedSupport::new(
        vec![square(), skew_triangle()],
        vec![vec![qi(2), qi(3), qi(3), qi(3)], vec![qi(1), qi(1), qi(1)]],
    )
    .map_err(|e| e.to_string())?;
    let sub = subdivision::induce_subdivision(&lifting).map_err(|e| e.to_string())?;
    let mixed = subdivision::mixed_cells(&sub, &[1, 1]);
    let fine = subdivision::fine_mixed_cells(&lifting).map_err(|e| e.to_string())?;
    let mut got: Vec<(Vec<f64>, f64)> = mixed.iter().map(|c| (c.omega.iter().map(q_to_f64).collect(), q_to_f64(&c.volume))).collect();
    got.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut fine_got: Vec<(Vec<f64>, f64)> = fine.iter().map(|c| (c.omega.iter().map(q_to_f64).collect(), q_to_f64(&c.volume))).collect();
    fine_got.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ensure!(got == fine_got, "lower hull {got:?} and fine-cell enumeration {fine_got:?} disagree");
    let mut vols: Vec<f64> = got.iter().map(|c| c.1).collect();
    vols.sort_by(f64::total_cmp);
    ensure!(vols == vec![1.0, 1.0, 2.0], "cell volumes {vols:?}");

    let f = SparseSystem::new(vec![
        poly(2, &[(3.0, &[0, 0]), (4.0, &[1, 0]), (-2.0, &[0, 1]), (1.0, &[1, 1])]),
        poly(2, &[(6.0, &[0, 0]), (-2.0, &[1, 2]), (1.0, &[2, 1])]),
    ])
    .unwrap();
    let starts = polyhedral::build_cell_starts(&f, &lifting, &fine).map_err(|e| e.to_string())?;
    let all: Vec<Vec<C64>> = starts.iter().flat_map(|s| s.solutions.clone()).collect();
    for t in [[4.0 / 3.0, 1.5], [-0.75, -32.0 / 3.0]] {
        ensure!(
            all.iter().any(|x| (x[0] - r(t[0])).norm() < 1e-10 && (x[1] - r(t[1])).norm() < 1e-10),
            "binomial start {t:?} missing"
        );
    }

    let printed: [[f64; 3]; 3] = [[2.0, 2.0, -1.0], [-2.0, 1.0, -1.0], [1.0, -2.0, -1.0]];
    let dirs: Vec<&Vec<f64>> = got.iter().map(|c| &c.0).collect();
    let missing: Vec<&[f64; 3]> = printed.iter().filter(|p| !dirs.iter().any(|d| d[..] == p[..])).collect();
    ensure!(
        missing.is_empty(),
        "volumes 2,1,1 and both binomial starts match, but the printed direction(s) {missing:?} expose no mixed cell; \
         computed directions {dirs:?} (the volume-2 cell is exposed by (1/2,1/2,-1))"
    );
    Ok("three mixed cells with the printed directions, volumes 2,1,1, binomial starts".into())
}

fn criterion_3() -> Check {
    let f = SparseSystem::new(vec![
        poly(2, &[(3.0, &[0, 0]), (4.0, &[1, 0]), (-2.0, &[0, 1]), (1.0, &[1, 1])]),
        poly(2, &[(6.0, &[0, 0]), (-2.0, &[1, 2]), (1.0, &[2, 1])]),
    ])
    .unwrap();
    let mv = mixedvol::mixed_volume_of_supports(&f.supports()).map_err(|e| e.to_string())?;
    let rep = polyhedral_solve(&f, &cfg()).map_err(|e| e.to_string())?;
    ensure!(rep.solutions.len() == 4 && mv == 4, "{} solutions, MV {mv}", rep.solutions.len());
    let res = max_residual(&f, &rep.solutions);
    ensure!(res < 1e-8, "residual {res:e}");
    ensure!(rep.solutions.iter().all(|x| x.iter().all(|z| z.norm() > 1e-8)), "solution off the torus");
    Ok(format!("4 torus solutions = MV, max residual {res:.1e}"))
}

fn criterion_4() -> Check {
    let lin = |a: f64| poly(1, &[(1.0, &[1]), (-a, &[0])]);
    let prod = |fs: &[SparsePoly]| fs.iter().skip(1).fold(fs[0].clone(), |acc, f| &acc * f);
    let h = StraightLine {
        target: SparseSystem::new(vec![prod(&[lin(0.1), lin(0.4), lin(0.4), lin(0.6)]).scale(r(5.0))]).unwrap(),
        start: SparseSystem::new(vec![prod(&[lin(0.25), lin(0.5), lin(0.75), lin(0.05)])]).unwrap(),
        gamma0: r(1.0),
        gamma1: r(1.0),
    };
    let euler = [0.75, 0.68175, 0.641803, 0.615861, 0.598597, 0.587539, 0.580981, 0.577285, 0.575157, 0.573848, 0.572984];
    let newton = [0.75, 0.70252, 0.669168, 0.649393, 0.635461, 0.625331, 0.61768, 0.611735, 0.607006, 0.603168, 0.600001];
    for (k, table) in [(0, euler), (1, newton)] {
        let trace = tracker::fixed_step_trace(&h, &[r(0.75)], 0.1, k).map_err(|e| e.to_string())?;
        ensure!(trace.len() == table.len(), "{} points", trace.len());
        for ((t, x), v) in trace.iter().zip(table) {
            ensure!((x[0].re - v).abs() <= 5e-6 && x[0].im.abs() <= 5e-6, "{k} Newton steps, t = {t:.1}: {} vs {v}", x[0]);
        }
    }
    Ok("all 22 table entries within 5e-6".into())
}

fn criterion_5() -> Check {
    let a = tracker::alpha_threshold();
    let expected = 0.157_670_780_786_754_6;
    ensure!((a - expected).abs() <= 2.0 * f64::EPSILON * expected, "alpha constant {a}");
    let f = SparseSystem::new(vec![poly(1, &[(1.0, &[2]), (-2.0, &[0])])]).unwrap();
    let root = 2f64.sqrt();
    let errs: Vec<f64> = (0..6)
        .map(|k| tracker::newton_refine(&f, &[r(1.5)], k).map(|(x, _)| (x[0].re - root).abs()).map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()?;
    let mut doubled = 0;
    for w in errs.windows(2) {
        if w[1] < 1e-15 {
            break;
        }
        ensure!(w[1].ln() <= 2.0 * w[0].ln(), "errors {errs:?} not quadratic");
        doubled += 1;
    }
    ensure!(doubled >= 3, "only {doubled} steps before the floor: {errs:?}");
    Ok(format!("alpha0 = {a:.15}; log-errors double over {doubled} steps"))
}

fn criterion_6() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..200 {
        let (m, n) = (rng.gen_range(1..=5), rng.gen_range(1..=5));
        let a: Vec<Vec<i64>> = (0..m).map(|_| (0..n).map(|_| rng.gen_range(-9..=9)).collect()).collect();
        let s = intlin::smith_normal_form(&a);
        ensure!(intlin::mat_mul(&intlin::mat_mul(&s.p, &s.d), &s.q) == intlin::to_imat(&a), "PDQ != A for {a:?}");
        ensure!(intlin::det(&s.p).abs().is_one() && intlin::det(&s.q).abs().is_one(), "P or Q not unimodular for {a:?}");
        for (i, row) in s.d.iter().enumerate() {
            ensure!(row.iter().enumerate().all(|(j, x)| i == j || x.is_zero()), "D not diagonal for {a:?}");
        }
        let f = s.invariant_factors();
        ensure!(f.windows(2).all(|w| w[0].is_positive() && (&w[1] % &w[0]).is_zero()), "divisibility fails for {a:?}: {f:?}");
    }
    let a1 = vec![vec![0, 0], vec![0, 4], vec![3, 3], vec![6, 6], vec![12, 0]];
    let a2 = vec![vec![0, 0], vec![3, 7], vec![6, 2], vec![9, 1], vec![9, 5]];
    let ld = intlin::lattice_data(&[a1, a2], &[0, 1]).map_err(|e| e.to_string())?;
    ensure!(ld.index == Some(12.into()), "lattice index {:?}", ld.index);
    Ok("200 random matrices; lacunary index 12".into())
}

fn criterion_7() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut done = 0;
    while done < 100 {
        let n = rng.gen_range(1..=3);
        let a: Vec<Vec<i64>> = (0..n).map(|_| (0..n).map(|_| rng.gen_range(-3..=3)).collect()).collect();
        let det = intlin::det(&intlin::to_imat(&a));
        if det.is_zero() {
            continue;
        }
        let b: Vec<C64> = (0..n).map(|_| tracker::random_gaussian(&mut rng)).collect();
        let sols = intlin::solve_binomial(&a, &b).map_err(|e| e.to_string())?;
        let expected: usize = det.abs().try_into().unwrap();
        ensure!(sols.len() == expected, "{} solutions for |det| = {expected}: {a:?}", sols.len());
        ensure!(tracker::dedup_points(&sols, 1e-8).len() == expected, "repeated solutions for {a:?}");
        let res = sols.iter().map(|x| intlin::binomial_residual(&a, &b, x)).fold(0.0, f64::max);
        ensure!(res < 1e-9, "residual {res:e} for {a:?}");
        done += 1;
    }
    Ok("100 random systems: |det A| distinct solutions, residual < 1e-9".into())
}

fn criterion_8() -> Check {
    let f = poly(
        2,
        &[(2.0, &[0, 0]), (-4.0, &[1, 0]), (1.0, &[3, 0]), (-2.0, &[0, 1]), (-2.0, &[1, 1]), (3.0, &[0, 2]), (-1.0, &[1, 2]), (1.0, &[0, 3])],
    );
    let fs = SparseSystem::new(vec![f]).unwrap();
    let w = witness::witness_construct(&fs, 1, &cfg()).map_err(|e| e.to_string())?;
    ensure!(w.degree() == 3, "degree {}", w.degree());
    // Transport along a pencil of vertical lines.
    let mut cents = Vec::new();
    for t in [-2.0, 0.5, 3.0] {
        let moved = witness::move_witness(&w, &witness::vertical_line(r(t)), &cfg()).map_err(|e| e.to_string())?;
        cents.push(moved.centroid(None));
    }
    for c in &cents {
        ensure!((c[1] - (c[0] / 3.0 - 1.0)).norm() < 1e-6, "centroid {c:?} off y = x/3 - 1");
    }
    let d = [&cents[1][0] - &cents[0][0], &cents[1][1] - &cents[0][1]];
    let e = [&cents[2][0] - &cents[0][0], &cents[2][1] - &cents[0][1]];
    ensure!((d[0] * e[1] - d[1] * e[0]).norm() < 1e-6, "centroids not collinear");
    let full = witness::trace_test(&w, &[0, 1, 2], 5, witness::TRACE_TOL, &cfg()).map_err(|e| e.to_string())?;
    ensure!(full.is_complete, "full witness set fails the trace test ({:e})", full.deviation);
    for sub in [vec![0], vec![1], vec![2], vec![0, 1], vec![0, 2], vec![1, 2]] {
        let t = witness::trace_test(&w, &sub, 5, witness::TRACE_TOL, &cfg()).map_err(|e| e.to_string())?;
        ensure!(!t.is_complete, "proper subset {sub:?} passes ({:e})", t.deviation);
    }
    let q = poly(
        2,
        &[(1.0, &[0, 0]), (-1.0, &[1, 0]), (1.0, &[2, 0]), (5.0, &[0, 1]), (1.0, &[1, 1]), (-3.0, &[2, 1]), (-3.0, &[0, 2]), (3.0, &[1, 2]), (-1.0, &[2, 2])],
    );
    let g = poly(2, &[(5.0, &[0, 0]), (1.0, &[1, 0]), (-3.0, &[2, 0]), (-6.0, &[0, 1]), (6.0, &[1, 1]), (-2.0, &[2, 1])]);
    ensure!(witness::trace_curve(&q) == g, "trace curve {:?}", witness::trace_curve(&q));
    let qs = SparseSystem::new(vec![q]).unwrap();
    for t in [-2.0, -0.5, 0.7, 1.5, 3.0] {
        let w = witness::witness_with_slice(&qs, witness::vertical_line(r(t)), &cfg()).map_err(|e| e.to_string())?;
        ensure!(w.degree() == 2, "quartic slice degree {}", w.degree());
        let v = g.eval(&w.centroid(None)).unwrap().norm();
        ensure!(v < 1e-6, "g(centroid) = {v:e} at x = {t}");
    }
    Ok("cubic centroids on y = x/3 - 1, all proper subsets fail; quartic centroids on g".into())
}

fn space_curve() -> SparseSystem {
    let f = poly(
        3,
        &[
            (1.0, &[1, 1, 1]),
            (-1.0, &[2, 0, 0]),
            (-1.0, &[0, 2, 0]),
            (-1.0, &[0, 0, 2]),
            (2.0, &[1, 1, 0]),
            (2.0, &[1, 0, 1]),
            (-2.0, &[0, 1, 1]),
            (3.0, &[1, 0, 0]),
            (1.0, &[0, 0, 1]),
        ],
    );
    let g = poly(3, &[(1.0, &[1, 0, 0]), (1.0, &[0, 2, 0]), (1.0, &[0, 0, 2])]);
    SparseSystem::new(vec![f, g]).unwrap()
}

fn criterion_9() -> Check {
    let w = witness::witness_construct(&space_curve(), 1, &cfg()).map_err(|e| e.to_string())?;
    let pw = witness::pseudo_witness(&w, &[0, 1], &cfg()).map_err(|e| e.to_string())?;
    let options = OracleOptions { record_paths: true, ..OracleOptions::default() };
    let setup = OracleSetup::from_pseudo_witness(&pw, options, &cfg()).map_err(|e| e.to_string())?;
    ensure!(setup.degree() == 6, "projected degree {}", setup.degree());
    let a = oracle_query(&setup, &[3.0, 2.0]).map_err(|e| e.to_string())?.answer;
    ensure!(a == OracleAnswer::Beta(vec![2, 4, 0]), "omega (3,2): {a:?}");
    let z = oracle_query(&setup, &[0.0, 0.0]).map_err(|e| e.to_string())?.answer;
    ensure!(z == OracleAnswer::Eep, "omega 0: {z:?}");

    // The convergence bound needs the explicit polynomial of the curve.
    let f = pw_image_polynomial();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut checked = 0;
    let mut tries = 0;
    while checked < 20 {
        tries += 1;
        ensure!(tries < 500, "only {checked} directions off the tropical curve");
        let w: Vec<f64> = (0..2).map(|_| rng.gen_range(-6..=6) as f64).collect();
        match convergence_bound(&f, &w, &setup.a, &setup.b, setup.targets[0]) {
            ConvergenceBound::Bound(d) if d.d_omega >= 1.0 - 1e-9 => {}
            _ => continue,
        }
        let rep = oracle_query(&setup, &w).map_err(|e| e.to_string())?;
        let OracleAnswer::Beta(beta) = &rep.answer else { return Err(format!("EEP at {w:?}")) };
        for (i, &bi) in beta[..2].iter().enumerate() {
            if bi == 0 {
                continue;
            }
            let z = setup.targets[i];
            let ConvergenceBound::Bound(data) = convergence_bound(&f, &w, &setup.a, &setup.b, z) else { unreachable!() };
            for path in rep.paths.iter().filter(|p| p.fate == PathFate::Target(i)) {
                let tail = path.trace.iter().rposition(|(_, s)| (s - z).norm() > data.gamma_z).map_or(0, |k| k + 1);
                ensure!(tail < path.trace.len(), "path never entered the bound radius at {w:?}");
                for &(t, s) in &path.trace[tail..] {
                    let lhs = (s - z).norm().powi(bi as i32);
                    ensure!(lhs <= data.value(t) * (1.0 + 1e-6) + 1e-12, "omega {w:?} t {t}: {lhs:e} > {:e}", data.value(t));
                }
            }
        }
        checked += 1;
    }
    Ok("(3,2) -> (2,4,0), 0 -> EEP, 20 tracked tails within the bound".into())
}

/// The plane sextic cut out by the projected space curve.
fn pw_image_polynomial() -> SparsePoly {
    poly(
        2,
        &[
            (1.0, &[1, 0]),
            (20.0, &[2, 0]),
            (-4.0, &[3, 0]),
            (1.0, &[4, 0]),
            (-4.0, &[1, 1]),
            (10.0, &[2, 1]),
            (1.0, &[0, 2]),
            (8.0, &[1, 2]),
            (4.0, &[2, 2]),
            (1.0, &[3, 2]),
            (-4.0, &[0, 3]),
            (-6.0, &[1, 3]),
            (4.0, &[2, 3]),
            (4.0, &[0, 4]),
            (-4.0, &[1, 4]),
            (1.0, &[2, 4]),
        ],
    )
}

fn criterion_10() -> Check {
    let pts = [[0, 2], [0, 3], [3, 3], [2, 0], [2, 3], [2, 4], [3, 2], [4, 0]];
    let mut q: Vec<_> = pts.iter().map(|p| rational::qvec(p)).collect();
    q[2] = vec![rational::qf(3, 2), rational::qf(3, 2)];
    let q = polytope::convex_hull(&q).map_err(|e| e.to_string())?;
    let mut oracle = ExactVertexOracle::new(q);
    let rec = reconstruct_polytope(&mut oracle, &ReconstructOptions::default()).map_err(|e| e.to_string())?;
    let mut got = rec.polytope.integer_vertices().ok_or("non-integral vertices")?;
    got.sort();
    ensure!(got == vec![vec![0, 2], vec![0, 3], vec![2, 0], vec![2, 4], vec![4, 0]], "Q reconstructed as {got:?}");
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..50 {
        let k = rng.gen_range(1..=7);
        let pts: Vec<Vec<i64>> = (0..k).map(|_| vec![rng.gen_range(0..=6), rng.gen_range(0..=6)]).collect();
        let p = convex_hull_int(&pts).map_err(|e| e.to_string())?;
        let mut oracle = ExactVertexOracle::new(p.clone());
        let rec = reconstruct_polytope(&mut oracle, &ReconstructOptions { seed: rng.gen(), ..Default::default() }).map_err(|e| e.to_string())?;
        ensure!(rec.polytope.vertices() == p.vertices(), "polygon {pts:?} reconstructed wrongly");
    }
    Ok("Q exact; 50 random lattice polygons exact".into())
}

fn criterion_11() -> Check {
    let i1 = SparseSystem::new(vec![
        poly(3, &[(1.0, &[1, 0, 1]), (4.0, &[0, 1, 1]), (-1.0, &[0, 0, 2]), (3.0, &[1, 0, 0]), (-12.0, &[0, 1, 0]), (5.0, &[0, 0, 1])]),
        poly(3, &[(1.0, &[1, 1, 0]), (-4.0, &[0, 2, 0]), (1.0, &[0, 1, 1]), (1.0, &[1, 0, 0]), (2.0, &[0, 1, 0]), (-1.0, &[0, 0, 1])]),
    ])
    .unwrap();
    let i2 = SparseSystem::new(vec![
        poly(3, &[(1.0, &[1, 1, 0]), (-3.0, &[1, 0, 1]), (3.0, &[0, 1, 1]), (-1.0, &[0, 0, 0])]),
        poly(3, &[(3.0, &[1, 0, 2]), (-12.0, &[0, 1, 2]), (1.0, &[1, 0, 1]), (4.0, &[0, 1, 1]), (5.0, &[0, 0, 1]), (-1.0, &[0, 0, 0])]),
    ])
    .unwrap();
    let mut dirs = Vec::new();
    for a in [1.0, -1.0] {
        for b in [1.0, -1.0] {
            for c in [1.0, -1.0] {
                dirs.push([a, b, c]);
            }
        }
    }
    let battery = |eqs: &SparseSystem, mode: MembershipMode| -> Result<Vec<bool>, String> {
        let oracle = MembershipOracle::new(eqs, 1, mode, &OracleOptions::default(), &cfg()).map_err(|e| e.to_string())?;
        dirs.iter().map(|w| oracle.query(w).map(|m| m.member).map_err(|e| e.to_string())).collect()
    };
    let phi = || MembershipMode::General(ChangeChoice::Supplied(MonomialChange::new(vec![vec![1, 0, 0], vec![1, 1, 0], vec![1, 0, 1]])));
    let o12 = battery(&i1, phi())?;
    let o13 = battery(&i2, phi())?;
    ensure!(o12 == vec![false, true, true, false, true, false, false, true], "o12 = {o12:?}");
    ensure!(o13 == vec![true, false, false, true, false, true, true, false], "o13 = {o13:?}");
    let plain1 = battery(&i1, MembershipMode::General(ChangeChoice::Identity))?;
    let plain2 = battery(&i2, MembershipMode::General(ChangeChoice::Identity))?;
    ensure!(plain1.iter().chain(&plain2).all(|&b| b), "without the change: {plain1:?} {plain2:?}");
    Ok("o12 and o13 reproduced; all-true without the change".into())
}

fn experiment_supports() -> Vec<Vec<Vec<i64>>> {
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

fn criterion_12() -> Check {
    let dcfg = DecomposableConfig::default();
    let supports = experiment_supports();
    let f = random_system(&supports, 8);
    let sol = solve_decomposable(&f, &dcfg).map_err(|e| e.to_string())?;
    let details: Vec<String> = sol.steps.iter().map(|s| format!("{:?} {}", s.kind, s.detail)).collect();
    ensure!(details.iter().any(|d| d.contains("5 x 10")), "no 5 x 10 step: {details:?}");
    ensure!(details.iter().any(|d| d.contains("10 x 1")), "no 10 x 1 step: {details:?}");
    ensure!(sol.solutions.len() == 50, "{} solutions", sol.solutions.len());
    ensure!(sol.ledger.total() == 64, "ledger total {}", sol.ledger.total());
    let direct = polyhedral_solve(&f, &cfg()).map_err(|e| e.to_string())?;
    ensure!(same_point_set(&sol.solutions, &direct.solutions, 1e-6), "solution set differs from the polyhedral homotopy");

    let lac = SparseSystem::new(vec![
        poly(2, &[(1.0, &[0, 0]), (2.0, &[0, 4]), (4.0, &[3, 3]), (8.0, &[6, 6]), (16.0, &[12, 0])]),
        poly(2, &[(3.0, &[0, 0]), (5.0, &[3, 7]), (7.0, &[6, 2]), (11.0, &[9, 1]), (13.0, &[9, 5])]),
    ])
    .unwrap();
    let StructureReport::Lacunary(d) = detect_structure(&lac.supports()).map_err(|e| e.to_string())? else {
        return Err("lacunary instance not detected".into());
    };
    let reduced = lacunary_reduction(&lac, &d).map_err(|e| e.to_string())?;
    let inner = mixedvol::mixed_volume_of_supports(&reduced.supports()).map_err(|e| e.to_string())?;
    ensure!(d.index == 12 && inner == 10, "index {} x MV {inner}", d.index);
    let sol = solve_decomposable(&lac, &dcfg).map_err(|e| e.to_string())?;
    let res = max_residual(&lac, &sol.solutions);
    ensure!(sol.solutions.len() == 120 && res < 1e-8, "{} solutions, residual {res:e}", sol.solutions.len());
    Ok(format!("50 = 5 x 10 x 1 with {} paths = polyhedral set; 120 = 12 x 10 (residual {res:.1e})", 64))
}

fn criterion_13() -> Check {
    let a = cols(&[&[0, 0, 1, 1, 2, 3, 3, 3, 4, 5, 5, 6], &[0, 2, 0, 1, 3, 0, 1, 4, 2, 3, 4, 4]]);
    let supports = vec![a.clone(), a];
    let mv = mixedvol::mixed_volume_of_supports(&supports).map_err(|e| e.to_string())?;
    ensure!(mv == 30, "MV {mv}");
    let dcfg = DecomposableConfig::default();
    let start = decomposable_start(&supports, &dcfg).map_err(|e| e.to_string())?;
    let StructureReport::Lacunary(d) = detect_structure(&start.system.supports()).map_err(|e| e.to_string())? else {
        return Err("vertex system is not lacunary".into());
    };
    let inner = lacunary_reduction(&start.system, &d).map_err(|e| e.to_string())?;
    let inner_sols = polyhedral_solve(&inner, &dcfg.tracker).map_err(|e| e.to_string())?.solutions.len();
    ensure!(inner_sols == 5, "reduced system has {inner_sols} solutions");
    ensure!(start.solution.solutions.len() == 30, "{} starts", start.solution.solutions.len());
    let f = random_system(&supports, 30);
    let rep = retrack_from_start(&f, &start, &dcfg);
    let direct = polyhedral_solve(&f, &dcfg.tracker).map_err(|e| e.to_string())?;
    let got = tracker::dedup_points(&rep.solutions(), 1e-6);
    ensure!(same_point_set(&got, &direct.solutions, 1e-6), "retracked {} vs polyhedral {}", got.len(), direct.solutions.len());
    Ok(format!("MV 30; 5 reduced solutions -> 30 starts (index {}); retrack reproduces the set", d.index))
}

fn criterion_14() -> Check {
    use ConjugationModel::*;
    let table = [
        (2, Symmetric, 0.75),
        (3, Symmetric, 0.722),
        (10, Symmetric, 0.881),
        (3, Involutions, 0.583),
        (4, Involutions, 0.575),
        (2, FixedPointFree, 1.0),
        (4, FixedPointFree, 0.833),
        (10, FixedPointFree, 0.863),
        (20, FixedPointFree, 0.937),
    ];
    for (d, m, v) in table {
        let p = q_to_f64(&transitivity_probability(d, m).map_err(|e| e.to_string())?);
        ensure!((p - v).abs() <= 1e-3, "{m:?} d = {d}: {p} vs {v}");
    }
    Ok("nine table values within 0.001".into())
}

fn quartic_exponents() -> Vec<[i64; 3]> {
    let mut v = Vec::new();
    for i in (0..=4).rev() {
        for j in (0..=4 - i).rev() {
            v.push([i, j, 4 - i - j]);
        }
    }
    v
}

fn induced(swap: (usize, usize)) -> Vec<usize> {
    let e = quartic_exponents();
    e.iter()
        .map(|c| {
            let mut d = *c;
            d.swap(swap.0, swap.1);
            e.iter().position(|x| *x == d).unwrap()
        })
        .collect()
}

fn act<T: Copy>(sigma: &[usize], v: &[T]) -> Vec<T> {
    let mut out = v.to_vec();
    for (i, &j) in sigma.iter().enumerate() {
        out[j] = v[i];
    }
    out
}

fn criterion_15() -> Check {
    let e = quartic_exponents();
    let a: Vec<Vec<i64>> = (0..3).map(|r| e.iter().map(|c| c[r]).collect()).collect();
    let (mat, rhs) = invariant_constraint(&a, 4, 54).map_err(|e| e.to_string())?;
    ensure!(rhs == vec![qi(72), qi(72), qi(72), qi(54)], "rhs {rhs:?}");
    let gens = [induced((0, 1)), induced((1, 2))];
    let mut group = vec![(0..15).collect::<Vec<usize>>()];
    let mut i = 0;
    while i < group.len() {
        for s in &gens {
            let h: Vec<usize> = group[i].iter().map(|&k| s[k]).collect();
            if !group.contains(&h) {
                group.push(h);
            }
        }
        i += 1;
    }
    ensure!(group.len() == 6, "group of order {}", group.len());
    let seeds = vec![
        vec![18, 0, 0, 0, 0, 0, 0, 0, 0, 0, 18, 0, 0, 0, 18],
        vec![0, 0, 18, 0, 0, 0, 18, 0, 0, 0, 0, 0, 0, 18, 0],
        vec![6, 0, 6, 0, 0, 0, 0, 30, 0, 0, 0, 0, 0, 12, 0],
        vec![4, 0, 0, 0, 0, 28, 0, 0, 0, 0, 18, 0, 0, 0, 4],
        vec![0, 0, 0, 0, 32, 0, 0, 0, 0, 8, 6, 4, 0, 4, 0],
    ];
    let mut points: Vec<Vec<i64>> = seeds.iter().flat_map(|v| group.iter().map(|s| act(s, v)).collect::<Vec<_>>()).collect();
    points.sort();
    points.dedup();
    // Exact synthetic oracle: the unique maximiser among the orbit points.
    let oracle = |w: &[f64]| -> Option<Vec<i64>> {
        let val = |p: &[i64]| p.iter().zip(w).map(|(&a, &b)| a as f64 * b).sum::<f64>();
        let best = points.iter().map(|p| val(p)).fold(f64::NEG_INFINITY, f64::max);
        let top: Vec<&Vec<i64>> = points.iter().filter(|p| val(p) > best - 1e-9).collect();
        (top.len() == 1).then(|| top[0].clone())
    };
    let mut rng = ChaCha8Rng::seed_from_u64(54);
    let mut answered = 0;
    for _ in 0..200 {
        let w: Vec<i64> = (0..15).map(|_| rng.gen_range(-50..=50)).collect();
        let w: Vec<f64> = project_to_kernel(&w, &mat).iter().map(|&v| v as f64).collect();
        let Some(v) = oracle(&w) else { continue };
        answered += 1;
        ensure!(satisfies_constraint(&mat, &rhs, &v), "answer {v:?} violates the constraint");
        for s in &group {
            ensure!(oracle(&act(s, &w)) == Some(act(s, &v)), "not equivariant at {w:?}");
        }
    }
    ensure!(answered >= 150, "only {answered} directions exposed a vertex");

    // A real oracle run on a small invariant: the binary cubic discriminant.
    let disc = poly(4, &[(1.0, &[0, 2, 2, 0]), (-4.0, &[1, 0, 3, 0]), (-4.0, &[0, 3, 0, 1]), (-27.0, &[2, 0, 0, 2]), (18.0, &[1, 1, 1, 1])]);
    let (dmat, drhs) = invariant_constraint(&[vec![3, 2, 1, 0], vec![0, 1, 2, 3]], 3, 4).map_err(|e| e.to_string())?;
    ensure!(drhs == vec![qi(6), qi(6), qi(4)], "discriminant rhs {drhs:?}");
    let setup = OracleSetup::from_hypersurface(&disc, OracleOptions::default(), &cfg()).map_err(|e| e.to_string())?;
    let flip = [3, 2, 1, 0];
    for _ in 0..4 {
        let w: Vec<i64> = (0..4).map(|_| rng.gen_range(-9..=9)).collect();
        let w: Vec<f64> = project_to_kernel(&w, &dmat).iter().map(|&v| v as f64).collect();
        let rep = oracle_query(&setup, &w).map_err(|e| e.to_string())?;
        let Some(v) = rep.answer.vertex(rep.degree) else { continue };
        ensure!(satisfies_constraint(&dmat, &drhs, &v), "discriminant answer {v:?} violates the constraint");
        let other = oracle_query(&setup, &act(&flip, &w)).map_err(|e| e.to_string())?;
        ensure!(other.answer.vertex(other.degree) == Some(act(&flip, &v)), "discriminant answers not equivariant at {w:?}");
    }
    Ok(format!("rhs (72,72,72,54); {answered} synthetic answers on the constraint and equivariant; discriminant oracle equivariant"))
}

fn main() {
    let criteria: [(&str, fn() -> Check); 15] = [
        ("mixed volume three-way agreement", criterion_1),
        ("subdivision example cells and starts", criterion_2),
        ("polyhedral solve of the example", criterion_3),
        ("predictor-corrector table", criterion_4),
        ("alpha constant and quadratic Newton decay", criterion_5),
        ("Smith normal form", criterion_6),
        ("binomial solver", criterion_7),
        ("trace test", criterion_8),
        ("hypersurface oracle queries", criterion_9),
        ("polytope reconstruction", criterion_10),
        ("tropical membership", criterion_11),
        ("decomposable solver", criterion_12),
        ("decomposable start system", criterion_13),
        ("transitivity probabilities", criterion_14),
        ("symmetric-invariant substitute checks", criterion_15),
    ];
    let filter: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let n = k + 1;
        if !filter.is_empty() && !filter.contains(&n) {
            continue;
        }
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(msg) => println!("PASS criterion {n:2} ({name}): {msg} [{secs:.1}s]"),
            Err(msg) => {
                failed += 1;
                println!("FAIL criterion {n:2} ({name}): {msg} [{secs:.1}s]");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        std::process::exit(1);
    }
}
