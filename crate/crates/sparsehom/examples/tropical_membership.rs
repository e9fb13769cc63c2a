//! Deciding membership in a tropical curve in 3-space. Projections alone
//! give false positives; a monomial change of coordinates first removes them.
//!
//! `cargo run --release --example tropical_membership`

use sparsehom::hs_oracle::{ChangeChoice, MembershipMode, MembershipOracle, OracleOptions};
use sparsehom::intlin::MonomialChange;
use sparsehom::poly::r;
use sparsehom::tracker::TrackerConfig;
use sparsehom::{SparsePoly, SparseSystem, C64};

fn poly(n: usize, terms: &[(f64, &[i64])]) -> SparsePoly {
    let pairs: Vec<(C64, &[i64])> = terms.iter().map(|(c, e)| (r(*c), *e)).collect();
    SparsePoly::from_pairs(n, &pairs)
}

fn main() {
    let curve = SparseSystem::new(vec![
        poly(3, &[(1.0, &[1, 0, 1]), (4.0, &[0, 1, 1]), (-1.0, &[0, 0, 2]), (3.0, &[1, 0, 0]), (-12.0, &[0, 1, 0]), (5.0, &[0, 0, 1])]),
        poly(3, &[(1.0, &[1, 1, 0]), (-4.0, &[0, 2, 0]), (1.0, &[0, 1, 1]), (1.0, &[1, 0, 0]), (2.0, &[0, 1, 0]), (-1.0, &[0, 0, 1])]),
    ])
    .unwrap();
    for p in &curve.polys {
        println!("  {p} = 0");
    }
    let cfg = TrackerConfig::default();
    let opts = OracleOptions::default();
    let phi = MonomialChange::new(vec![vec![1, 0, 0], vec![1, 1, 0], vec![1, 0, 1]]);
    let plain = MembershipOracle::new(&curve, 1, MembershipMode::General(ChangeChoice::Identity), &opts, &cfg).unwrap();
    let changed = MembershipOracle::new(&curve, 1, MembershipMode::General(ChangeChoice::Supplied(phi)), &opts, &cfg).unwrap();

    println!("  direction      projections only  after the change");
    for a in [1, -1] {
        for b in [1, -1] {
            for c in [1, -1] {
                let w = [a as f64, b as f64, c as f64];
                let p = plain.query(&w).unwrap();
                let q = changed.query(&w).unwrap();
                println!("  ({a:>2}, {b:>2}, {c:>2})   {:<5}             {}", p.member, q.member);
            }
        }
    }
}
