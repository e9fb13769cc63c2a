//! Symmetric invariants: every oracle answer must satisfy the invariant
//! constraint and transform with the permutation action on coefficients.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sparsehom::hs_oracle::*;
use sparsehom::poly::{r, SparsePoly};
use sparsehom::polytope::{invariant_constraint, satisfies_constraint};
use sparsehom::rational::qi;
use sparsehom::tracker::TrackerConfig;

fn poly(n: usize, terms: &[(f64, &[i64])]) -> SparsePoly {
    let pairs: Vec<(sparsehom::poly::C64, &[i64])> = terms.iter().map(|(c, e)| (r(*c), *e)).collect();
    SparsePoly::from_pairs(n, &pairs)
}

/// Exponents of ternary quartics in the order
/// 400, 310, 301, 220, 211, 202, 130, 121, 112, 103, 040, 031, 022, 013, 004.
fn quartic_exponents() -> Vec<[i64; 3]> {
    let mut v = Vec::new();
    for i in (0..=4).rev() {
        for j in (0..=4 - i).rev() {
            v.push([i, j, 4 - i - j]);
        }
    }
    v
}

fn quartic_support_matrix() -> Vec<Vec<i64>> {
    let e = quartic_exponents();
    (0..3).map(|r| e.iter().map(|c| c[r]).collect()).collect()
}

/// The permutation of the 15 coefficients induced by swapping two of x, y, z.
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

fn from_cycles(n: usize, cycles: &[(usize, usize)]) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    for &(a, b) in cycles {
        p.swap(a, b);
    }
    p
}

fn act<T: Copy>(sigma: &[usize], v: &[T]) -> Vec<T> {
    let mut out = v.to_vec();
    for (i, &j) in sigma.iter().enumerate() {
        out[j] = v[i];
    }
    out
}

fn compose(a: &[usize], b: &[usize]) -> Vec<usize> {
    b.iter().map(|&i| a[i]).collect()
}

/// The subgroup of coefficient permutations generated by the given ones.
fn group(gens: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let n = gens[0].len();
    let mut g = vec![(0..n).collect::<Vec<_>>()];
    let mut i = 0;
    while i < g.len() {
        for s in gens {
            let h = compose(s, &g[i]);
            if !g.contains(&h) {
                g.push(h);
            }
        }
        i += 1;
    }
    g
}

/// Known monomials of the degree-54 invariant of ternary quartics.
fn luroth_vertices() -> Vec<Vec<i64>> {
    vec![
        vec![18, 0, 0, 0, 0, 0, 0, 0, 0, 0, 18, 0, 0, 0, 18],
        vec![0, 0, 18, 0, 0, 0, 18, 0, 0, 0, 0, 0, 0, 18, 0],
        vec![6, 0, 6, 0, 0, 0, 0, 30, 0, 0, 0, 0, 0, 12, 0],
        vec![0, 0, 24, 0, 0, 0, 0, 0, 0, 0, 18, 0, 0, 0, 12],
        vec![4, 0, 0, 0, 0, 28, 0, 0, 0, 0, 18, 0, 0, 0, 4],
        vec![0, 0, 0, 0, 0, 25, 22, 0, 0, 0, 0, 0, 3, 0, 4],
        vec![0, 0, 0, 0, 32, 0, 0, 0, 0, 8, 10, 0, 0, 0, 4],
        vec![0, 0, 0, 0, 32, 0, 0, 0, 0, 8, 6, 0, 8, 0, 0],
        vec![0, 0, 0, 0, 32, 0, 0, 0, 0, 8, 6, 4, 0, 4, 0],
    ]
}

#[test]
fn quartic_invariant_constraint() {
    let (mat, rhs) = invariant_constraint(&quartic_support_matrix(), 4, 54).unwrap();
    assert_eq!(rhs, vec![qi(72), qi(72), qi(72), qi(54)]);
    assert_eq!(mat[0].iter().map(|q| q.to_integer().try_into().unwrap()).collect::<Vec<i64>>(), vec![4, 3, 3, 2, 2, 2, 1, 1, 1, 1, 0, 0, 0, 0, 0]);
    for v in luroth_vertices() {
        assert!(satisfies_constraint(&mat, &rhs, &v), "{v:?}");
    }
    // A point of the right degree that breaks the symmetry fails.
    let mut skew = vec![0; 15];
    skew[0] = 54;
    assert!(!satisfies_constraint(&mat, &rhs, &skew));
}

#[test]
fn coefficient_permutations_match_the_variable_swaps() {
    let s_xy = from_cycles(15, &[(0, 10), (1, 6), (2, 11), (4, 7), (5, 12), (9, 13)]);
    let s_yz = from_cycles(15, &[(1, 2), (3, 5), (6, 9), (7, 8), (10, 14), (11, 13)]);
    let s_xz = from_cycles(15, &[(0, 14), (1, 13), (2, 9), (3, 12), (4, 8), (6, 11)]);
    assert_eq!(induced((0, 1)), s_xy);
    assert_eq!(induced((1, 2)), s_yz);
    assert_eq!(induced((0, 2)), s_xz);
    assert_eq!(compose(&s_xy, &compose(&s_yz, &s_xy)), s_xz);
    assert_eq!(group(&[s_xy, s_yz]).len(), 6);
}

#[test]
fn quartic_vertex_orbits_stay_on_the_constraint() {
    let (mat, rhs) = invariant_constraint(&quartic_support_matrix(), 4, 54).unwrap();
    let g = group(&[induced((0, 1)), induced((1, 2))]);
    let sizes: Vec<usize> = luroth_vertices()
        .iter()
        .map(|v| {
            let mut orbit: Vec<Vec<i64>> = g.iter().map(|s| act(s, v)).collect();
            for w in &orbit {
                assert!(satisfies_constraint(&mat, &rhs, w));
            }
            orbit.sort();
            orbit.dedup();
            orbit.len()
        })
        .collect();
    assert_eq!(sizes, vec![1, 2, 6, 6, 3, 6, 6, 6, 6]);
}

/// Exact vertex oracle of the G-symmetric hull of known invariant monomials.
struct OrbitOracle {
    points: Vec<Vec<i64>>,
}

impl OrbitOracle {
    fn query(&self, omega: &[f64]) -> Option<Vec<i64>> {
        let val = |p: &[i64]| p.iter().zip(omega).map(|(&a, &w)| a as f64 * w).sum::<f64>();
        let best = self.points.iter().map(|p| val(p)).fold(f64::NEG_INFINITY, f64::max);
        let top: Vec<&Vec<i64>> = self.points.iter().filter(|p| val(p) > best - 1e-9).collect();
        (top.len() == 1).then(|| top[0].clone())
    }
}

#[test]
fn synthetic_symmetric_oracle_is_equivariant() {
    let (mat, rhs) = invariant_constraint(&quartic_support_matrix(), 4, 54).unwrap();
    let g = group(&[induced((0, 1)), induced((1, 2))]);
    let mut points: Vec<Vec<i64>> = luroth_vertices().iter().flat_map(|v| g.iter().map(|s| act(s, v)).collect::<Vec<_>>()).collect();
    points.sort();
    points.dedup();
    let oracle = OrbitOracle { points };
    let mut rng = ChaCha8Rng::seed_from_u64(54);
    let mut exposed = 0;
    for _ in 0..200 {
        let w: Vec<i64> = (0..15).map(|_| rng.gen_range(-50..=50)).collect();
        let w = project_to_kernel(&w, &mat);
        let wf: Vec<f64> = w.iter().map(|&v| v as f64).collect();
        let Some(v) = oracle.query(&wf) else { continue };
        exposed += 1;
        assert!(satisfies_constraint(&mat, &rhs, &v));
        for s in &g {
            assert_eq!(oracle.query(&act(s, &wf)), Some(act(s, &v)));
        }
    }
    assert!(exposed > 150);
}

/// Discriminant of the binary cubic `a x^3 + b x^2 y + c x y^2 + d y^3`.
fn cubic_discriminant() -> SparsePoly {
    poly(
        4,
        &[(1.0, &[0, 2, 2, 0]), (-4.0, &[1, 0, 3, 0]), (-4.0, &[0, 3, 0, 1]), (-27.0, &[2, 0, 0, 2]), (18.0, &[1, 1, 1, 1])],
    )
}

/// Discriminant (determinant of the Gram matrix) of the ternary quadric
/// `a x^2 + b xy + c xz + d y^2 + e yz + f z^2`.
fn quadric_discriminant() -> SparsePoly {
    poly(
        6,
        &[
            (8.0, &[1, 0, 0, 1, 0, 1]),
            (-2.0, &[1, 0, 0, 0, 2, 0]),
            (-2.0, &[0, 2, 0, 0, 0, 1]),
            (2.0, &[0, 1, 1, 0, 1, 0]),
            (-2.0, &[0, 0, 2, 1, 0, 0]),
        ],
    )
}

#[test]
fn numerical_answers_on_the_cubic_discriminant() {
    let f = cubic_discriminant();
    let (mat, rhs) = invariant_constraint(&[vec![3, 2, 1, 0], vec![0, 1, 2, 3]], 3, 4).unwrap();
    assert_eq!(rhs, vec![qi(6), qi(6), qi(4)]);
    let setup = OracleSetup::from_hypersurface(&f, OracleOptions::default(), &TrackerConfig::default()).unwrap();
    let flip = vec![3, 2, 1, 0];
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..8 {
        let w: Vec<i64> = (0..4).map(|_| rng.gen_range(-9..=9)).collect();
        let w: Vec<f64> = project_to_kernel(&w, &mat).iter().map(|&v| v as f64).collect();
        let rep = oracle_query(&setup, &w).unwrap();
        let OracleAnswer::Beta(beta) = &rep.answer else { panic!("EEP at {w:?}") };
        assert_eq!(beta[4], 0, "homogeneous invariant diverged at {w:?}");
        let v = rep.answer.vertex(rep.degree).expect("generic direction exposes a vertex");
        assert!(satisfies_constraint(&mat, &rhs, &v), "{v:?}");
        let flipped = oracle_query(&setup, &act(&flip, &w)).unwrap();
        assert_eq!(flipped.answer.vertex(flipped.degree), Some(act(&flip, &v)));
    }
}

#[test]
fn constrained_reconstruction_of_the_cubic_discriminant() {
    let f = cubic_discriminant();
    let constraints = invariant_constraint(&[vec![3, 2, 1, 0], vec![0, 1, 2, 3]], 3, 4).unwrap();
    let setup = OracleSetup::from_hypersurface(&f, OracleOptions::default(), &TrackerConfig::default()).unwrap();
    let mut oracle = HsVertexOracle::new(&setup);
    let opts = ReconstructOptions { constraints: Some(constraints.clone()), degree_bound: Some(4), ..Default::default() };
    let rec = reconstruct_polytope(&mut oracle, &opts).unwrap();
    assert_eq!(rec.polytope.vertices(), f.newton_polytope(false).unwrap().vertices());
    assert_eq!(rec.polytope.vertices().len(), 4);
    for rep in &oracle.reports {
        if let Some(v) = rep.answer.vertex(rep.degree) {
            assert!(satisfies_constraint(&constraints.0, &constraints.1, &v));
        }
    }
}

#[test]
fn quadric_discriminant_answers_are_equivariant() {
    let f = quadric_discriminant();
    let support = vec![vec![2, 1, 1, 0, 0, 0], vec![0, 1, 0, 2, 1, 0], vec![0, 0, 1, 0, 1, 2]];
    let (mat, rhs) = invariant_constraint(&support, 2, 3).unwrap();
    // x<->y swaps a,d and c,e; y<->z swaps d,f and b,c.
    let g = group(&[from_cycles(6, &[(0, 3), (2, 4)]), from_cycles(6, &[(3, 5), (1, 2)])]);
    assert_eq!(g.len(), 6);
    let setup = OracleSetup::from_hypersurface(&f, OracleOptions::default(), &TrackerConfig::default()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..3 {
        let w: Vec<i64> = (0..6).map(|_| rng.gen_range(-9..=9)).collect();
        let w: Vec<f64> = project_to_kernel(&w, &mat).iter().map(|&v| v as f64).collect();
        let rep = oracle_query(&setup, &w).unwrap();
        let v = rep.answer.vertex(rep.degree).expect("vertex");
        assert!(satisfies_constraint(&mat, &rhs, &v));
        for s in &g {
            let other = oracle_query(&setup, &act(s, &w)).unwrap();
            assert_eq!(other.answer.vertex(other.degree), Some(act(s, &v)));
        }
    }
}
