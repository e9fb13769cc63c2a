use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sparsehom::hs_oracle::*;
use sparsehom::intlin::MonomialChange;
use sparsehom::poly::{r, SparsePoly, SparseSystem, C64};
use sparsehom::polytope::{self, Polytope};
use sparsehom::rational::{self, q_to_f64};
use sparsehom::tracker::TrackerConfig;
use sparsehom::witness;

fn poly(n: usize, terms: &[(f64, &[i64])]) -> SparsePoly {
    let pairs: Vec<(C64, &[i64])> = terms.iter().map(|(c, e)| (r(*c), *e)).collect();
    SparsePoly::from_pairs(n, &pairs)
}

/// The image of the curve below under `(x, y, t) -> (x, y)`.
fn sextic() -> SparsePoly {
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

/// `<xyt - (x - y - t)^2 + 3x + t, x + y^2 + t^2>`.
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

fn cfg() -> TrackerConfig {
    TrackerConfig::default()
}

fn sextic_setup(options: OracleOptions) -> OracleSetup {
    OracleSetup::from_hypersurface(&sextic(), options, &cfg()).unwrap()
}

/// The expected answer from the exact Newton polytope.
fn exact_answer(p: &Polytope, omega: &[i64]) -> AnswerKind {
    let (_, face) = p.support_data(&rational::qvec(omega)).unwrap();
    if omega.iter().all(|&w| w == 0) {
        AnswerKind::Eep
    } else if face.vertices.len() == 1 {
        AnswerKind::Vertex
    } else {
        AnswerKind::Face
    }
}

#[test]
fn projected_curve_through_pseudo_witness() {
    let w = witness::witness_construct(&space_curve(), 1, &cfg()).unwrap();
    let pw = witness::pseudo_witness(&w, &[0, 1], &cfg()).unwrap();
    let setup = OracleSetup::from_pseudo_witness(&pw, OracleOptions::default(), &cfg()).unwrap();
    assert_eq!(setup.degree(), 6);
    let rep = oracle_query(&setup, &[3.0, 2.0]).unwrap();
    assert_eq!(rep.answer, OracleAnswer::Beta(vec![2, 4, 0]));
    assert_eq!(oracle_query(&setup, &[0.0, 0.0]).unwrap().answer, OracleAnswer::Eep);
}

#[test]
fn sextic_answers_match_the_newton_polytope() {
    let f = sextic();
    let np = f.newton_polytope(false).unwrap();
    let setup = sextic_setup(OracleOptions::default());
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..12 {
        let w: Vec<i64> = (0..2).map(|_| rng.gen_range(-5..=5)).collect();
        let wf: Vec<f64> = w.iter().map(|&v| v as f64).collect();
        let rep = oracle_query(&setup, &wf).unwrap();
        let expected = exact_answer(&np, &w);
        assert_eq!(rep.kind(), expected, "omega {w:?}: {:?}", rep.answer);
        if expected == AnswerKind::Vertex {
            let (_, face) = np.support_data(&rational::qvec(&w)).unwrap();
            let v = rational::qvec_to_i64(&face.vertices[0]).unwrap();
            assert_eq!(rep.answer.vertex(6).unwrap(), v, "omega {w:?}");
        }
    }
}

#[test]
fn homogeneous_curve_never_diverges() {
    // A smooth plane cubic in three homogeneous coordinates.
    let f = poly(
        3,
        &[(1.0, &[3, 0, 0]), (2.0, &[0, 3, 0]), (-1.5, &[0, 0, 3]), (0.7, &[1, 1, 1]), (1.3, &[2, 1, 0]), (-0.4, &[0, 1, 2])],
    );
    // The cone over a plane curve is a surface: slice by lines through the
    // pencil of the oracle.
    let setup = OracleSetup::from_hypersurface(&f, OracleOptions::default(), &cfg()).unwrap();
    assert_eq!(setup.degree(), 3);
    for w in [[1.0, 0.0, 0.0], [2.0, -1.0, 1.0], [-1.0, -3.0, 2.0], [0.5, 0.25, -2.0]] {
        let rep = oracle_query(&setup, &w).unwrap();
        match &rep.answer {
            OracleAnswer::Beta(b) => assert_eq!(b[3], 0, "omega {w:?}: {b:?}"),
            OracleAnswer::Eep => panic!("unexpected EEP for {w:?}"),
        }
    }
}

#[test]
fn positive_scaling_gives_the_same_answer() {
    let setup = sextic_setup(OracleOptions::default());
    for w in [[3.0, 2.0], [-1.0, 2.0], [1.0, -4.0]] {
        let a = oracle_query(&setup, &w).unwrap().answer;
        let b = oracle_query(&setup, &[2.5 * w[0], 2.5 * w[1]]).unwrap().answer;
        assert_eq!(a, b, "omega {w:?}");
    }
}

#[test]
fn convergence_bound_degenerates_when_everything_is_exposed() {
    let f = sextic();
    let a = [r(1.0), r(1.0)];
    let b = [r(1.0), r(-1.0)];
    assert!(matches!(convergence_bound(&f, &[0.0, 0.0], &a, &b, r(1.0)), ConvergenceBound::ExposesAll));
    // Off the tropical curve the gap is positive.
    match convergence_bound(&f, &[3.0, 2.0], &a, &b, r(1.0)) {
        ConvergenceBound::Bound(d) => assert!((d.d_omega - 1.0).abs() < 1e-12),
        ConvergenceBound::ExposesAll => panic!(),
    }
}

#[test]
fn tracked_tails_obey_the_convergence_bound() {
    let f = sextic();
    let options = OracleOptions { record_paths: true, ..OracleOptions::default() };
    let setup = sextic_setup(options);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut checked = 0;
    while checked < 20 {
        let w: Vec<f64> = (0..2).map(|_| rng.gen_range(-6..=6) as f64).collect();
        match convergence_bound(&f, &w, &setup.a, &setup.b, setup.targets[0]) {
            ConvergenceBound::Bound(d) if d.d_omega >= 1.0 - 1e-9 => {}
            _ => continue,
        }
        let rep = oracle_query(&setup, &w).unwrap();
        let OracleAnswer::Beta(beta) = &rep.answer else { panic!("EEP off the tropical curve") };
        for (i, &bi) in beta[..2].iter().enumerate() {
            if bi == 0 {
                continue;
            }
            let z = setup.targets[i];
            let ConvergenceBound::Bound(data) = convergence_bound(&f, &w, &setup.a, &setup.b, z) else { unreachable!() };
            for path in rep.paths.iter().filter(|p| p.fate == PathFate::Target(i)) {
                let tail = path.trace.iter().rposition(|(_, s)| (s - z).norm() > data.gamma_z).map_or(0, |k| k + 1);
                assert!(tail < path.trace.len());
                for &(t, s) in &path.trace[tail..] {
                    let lhs = (s - z).norm().powi(bi as i32);
                    assert!(lhs <= data.value(t) * (1.0 + 1e-6) + 1e-12, "omega {w:?} t {t}: {lhs} > {}", data.value(t));
                }
            }
        }
        checked += 1;
    }
}

#[test]
fn reconstructs_q_exactly() {
    let pts = [[0, 2], [0, 3], [3, 3], [2, 0], [2, 3], [2, 4], [3, 2], [4, 0]];
    let mut q: Vec<_> = pts.iter().map(|p| rational::qvec(p)).collect();
    q[2] = vec![rational::qf(3, 2), rational::qf(3, 2)];
    let q = polytope::convex_hull(&q).unwrap();
    let mut oracle = ExactVertexOracle::new(q.clone());
    let rec = reconstruct_polytope(&mut oracle, &ReconstructOptions::default()).unwrap();
    let mut got = rec.polytope.integer_vertices().unwrap();
    got.sort();
    assert_eq!(got, vec![vec![0, 2], vec![0, 3], vec![2, 0], vec![2, 4], vec![4, 0]]);
    assert_eq!(rec.queries, oracle.queries);
}

#[test]
fn reconstructs_random_lattice_polygons() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..50 {
        let k = rng.gen_range(1..=7);
        let pts: Vec<Vec<i64>> = (0..k).map(|_| vec![rng.gen_range(0..=6), rng.gen_range(0..=6)]).collect();
        let p = polytope::convex_hull_int(&pts).unwrap();
        let mut oracle = ExactVertexOracle::new(p.clone());
        let rec = reconstruct_polytope(&mut oracle, &ReconstructOptions { seed: rng.gen(), ..Default::default() }).unwrap();
        assert_eq!(rec.polytope.vertices(), p.vertices(), "points {pts:?}");
    }
}

#[test]
fn single_point_needs_one_query_per_orthant() {
    let p = polytope::convex_hull_int(&[vec![1, 2, 0]]).unwrap();
    let mut oracle = ExactVertexOracle::new(p);
    let rec = reconstruct_polytope(&mut oracle, &ReconstructOptions::default()).unwrap();
    assert_eq!(rec.queries, 8);
    assert_eq!(rec.polytope.integer_vertices().unwrap(), vec![vec![1, 2, 0]]);
}

#[test]
fn inconsistent_oracle_is_reported() {
    struct Liar(usize);
    impl VertexOracle for Liar {
        fn ambient_dim(&self) -> usize {
            2
        }
        fn query(&mut self, _: &[i64]) -> Result<VertexAnswer, OracleError> {
            self.0 += 1;
            // Vertices that cannot all be maximal in their orthants.
            Ok(VertexAnswer::Vertex(if self.0 % 2 == 0 { vec![0, 0] } else { vec![3, 3] }))
        }
    }
    assert!(matches!(reconstruct_polytope(&mut Liar(0), &ReconstructOptions::default()), Err(OracleError::OracleInconsistent(_))));
}

#[test]
fn numerical_oracle_recovers_the_sextic_polytope() {
    let f = sextic();
    let setup = sextic_setup(OracleOptions::default());
    let mut oracle = HsVertexOracle::new(&setup);
    let rec = reconstruct_polytope(&mut oracle, &ReconstructOptions { degree_bound: Some(6), ..Default::default() }).unwrap();
    assert_eq!(rec.polytope.vertices(), f.newton_polytope(false).unwrap().vertices());
}

fn cube_directions() -> Vec<[f64; 3]> {
    let mut v = Vec::new();
    for a in [1.0, -1.0] {
        for b in [1.0, -1.0] {
            for c in [1.0, -1.0] {
                v.push([a, b, c]);
            }
        }
    }
    v
}

fn i1() -> SparseSystem {
    SparseSystem::new(vec![
        poly(3, &[(1.0, &[1, 0, 1]), (4.0, &[0, 1, 1]), (-1.0, &[0, 0, 2]), (3.0, &[1, 0, 0]), (-12.0, &[0, 1, 0]), (5.0, &[0, 0, 1])]),
        poly(3, &[(1.0, &[1, 1, 0]), (-4.0, &[0, 2, 0]), (1.0, &[0, 1, 1]), (1.0, &[1, 0, 0]), (2.0, &[0, 1, 0]), (-1.0, &[0, 0, 1])]),
    ])
    .unwrap()
}

fn i2() -> SparseSystem {
    SparseSystem::new(vec![
        poly(3, &[(1.0, &[1, 1, 0]), (-3.0, &[1, 0, 1]), (3.0, &[0, 1, 1]), (-1.0, &[0, 0, 0])]),
        poly(3, &[(3.0, &[1, 0, 2]), (-12.0, &[0, 1, 2]), (1.0, &[1, 0, 1]), (4.0, &[0, 1, 1]), (5.0, &[0, 0, 1]), (-1.0, &[0, 0, 0])]),
    ])
    .unwrap()
}

fn battery(eqs: &SparseSystem, mode: MembershipMode) -> Vec<bool> {
    let oracle = MembershipOracle::new(eqs, 1, mode, &OracleOptions::default(), &cfg()).unwrap();
    cube_directions().iter().map(|w| oracle.query(w).unwrap().member).collect()
}

fn phi_xyz() -> MonomialChange {
    MonomialChange::new(vec![vec![1, 0, 0], vec![1, 1, 0], vec![1, 0, 1]])
}

#[test]
fn membership_after_the_monomial_change() {
    let change = || MembershipMode::General(ChangeChoice::Supplied(phi_xyz()));
    assert_eq!(battery(&i1(), change()), vec![false, true, true, false, true, false, false, true]);
    assert_eq!(battery(&i2(), change()), vec![true, false, false, true, false, true, true, false]);
}

#[test]
fn membership_without_a_change_gives_false_positives() {
    assert_eq!(battery(&i1(), MembershipMode::General(ChangeChoice::Identity)), vec![true; 8]);
    assert_eq!(battery(&i2(), MembershipMode::General(ChangeChoice::Identity)), vec![true; 8]);
}

#[test]
fn hypersurface_membership_is_the_tropical_curve() {
    let eqs = SparseSystem::new(vec![sextic()]).unwrap();
    let options = OracleOptions::default();
    let m = |w: &[f64]| tropical_membership(&eqs, 1, w, MembershipMode::Hypersurface, &options, &cfg()).unwrap();
    // (2, 1) exposes the edge through (4, 0), (3, 2), (2, 4).
    assert!(m(&[2.0, 1.0]).member);
    assert!(!m(&[3.0, 2.0]).member);
    assert!(!m(&[3.0, 2.0]).heuristic);
    assert!(m(&[0.0, 0.0]).member);
}

#[test]
fn random_unimodular_changes_are_unimodular() {
    for seed in 0..20 {
        let m = random_unimodular(3, seed);
        assert!(m.is_unimodular());
        assert!(m.phi.iter().flatten().all(|v| (-3..=3).contains(v)));
    }
}

#[test]
fn pulled_back_directions() {
    let w = phi_xyz()
        .transform_direction(&rational::qvec(&[2, 1, 0]), sparsehom::intlin::ChangeDirection::Pull)
        .unwrap();
    assert_eq!(w.iter().map(q_to_f64).collect::<Vec<_>>(), vec![1.0, 1.0, 0.0]);
}
