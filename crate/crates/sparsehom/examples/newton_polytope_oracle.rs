//! Numerical Newton-polytope oracle: ask which face of the Newton polytope
//! of a plane curve a direction exposes, then rebuild the whole polytope
//! from such queries. The curve is known only through a witness set of the
//! space curve it is the image of.
//!
//! `cargo run --release --example newton_polytope_oracle`

use sparsehom::hs_oracle::{oracle_query, reconstruct_polytope, HsVertexOracle, OracleOptions, OracleSetup, ReconstructOptions};
use sparsehom::poly::r;
use sparsehom::tracker::TrackerConfig;
use sparsehom::witness::{pseudo_witness, witness_construct};
use sparsehom::{SparsePoly, SparseSystem, C64};

fn poly(n: usize, terms: &[(f64, &[i64])]) -> SparsePoly {
    let pairs: Vec<(C64, &[i64])> = terms.iter().map(|(c, e)| (r(*c), *e)).collect();
    SparsePoly::from_pairs(n, &pairs)
}

fn main() {
    // xyt - (x - y - t)^2 + 3x + t = x + y^2 + t^2 = 0, projected to (x, y).
    let curve = SparseSystem::new(vec![
        poly(3, &[(1.0, &[1, 1, 1]), (-1.0, &[2, 0, 0]), (-1.0, &[0, 2, 0]), (-1.0, &[0, 0, 2]), (2.0, &[1, 1, 0]), (2.0, &[1, 0, 1]), (-2.0, &[0, 1, 1]), (3.0, &[1, 0, 0]), (1.0, &[0, 0, 1])]),
        poly(3, &[(1.0, &[1, 0, 0]), (1.0, &[0, 2, 0]), (1.0, &[0, 0, 2])]),
    ])
    .unwrap();
    let cfg = TrackerConfig::default();
    let w = witness_construct(&curve, 1, &cfg).unwrap();
    let pw = pseudo_witness(&w, &[0, 1], &cfg).unwrap();
    let setup = OracleSetup::from_pseudo_witness(&pw, OracleOptions::default(), &cfg).unwrap();
    println!("space curve of degree {}; its image in the plane has degree {}", w.degree(), setup.degree());

    for omega in [[3.0, 2.0], [-1.0, 0.0], [0.0, -1.0], [1.0, 1.0], [2.0, 1.0], [0.0, 0.0]] {
        let q = oracle_query(&setup, &omega).unwrap();
        println!("  omega {omega:?}: {:?} -> {:?}, vertex {:?}", q.answer, q.kind(), q.answer.vertex(q.degree));
    }

    let mut oracle = HsVertexOracle::new(&setup);
    let rec = reconstruct_polytope(&mut oracle, &ReconstructOptions { degree_bound: Some(setup.degree() as i64), ..Default::default() }).unwrap();
    println!("Newton polytope from {} queries:", rec.queries);
    for v in rec.polytope.integer_vertices().unwrap() {
        println!("  {v:?}");
    }
}
