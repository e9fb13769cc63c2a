//! Smith normal forms, binomial systems and monomial changes of coordinates.
//!
//! `cargo run --example smith_normal_form`

use sparsehom::intlin::{lattice_data, smith_normal_form, solve_binomial, binomial_residual, ChangeDirection, MonomialChange};
use sparsehom::poly::c;
use sparsehom::SparsePoly;

fn main() {
    let a = vec![vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]];
    let s = smith_normal_form(&a);
    println!("A = {a:?}");
    println!("P = {:?}", s.p);
    println!("D = {:?}", s.d);
    println!("Q = {:?}", s.q);
    println!("invariant factors {:?}", s.invariant_factors());

    // Lacunary supports: the difference lattice has index 12 in Z^2.
    let a1 = vec![vec![0, 0], vec![0, 4], vec![3, 3], vec![6, 6], vec![12, 0]];
    let a2 = vec![vec![0, 0], vec![3, 7], vec![6, 2], vec![9, 1], vec![9, 5]];
    let ld = lattice_data(&[a1, a2], &[0, 1]).unwrap();
    println!("lattice rank {}, index {:?}", ld.rank, ld.index);

    // x^A = b has |det A| solutions in the torus.
    let a = vec![vec![3, 1], vec![-1, 2]];
    let b = vec![c(1.0, 1.0), c(-2.0, 0.5)];
    let sols = solve_binomial(&a, &b).unwrap();
    println!("binomial system with det 7: {} solutions", sols.len());
    for x in &sols {
        println!("  ({:.6}, {:.6})  residual {:.1e}", x[0], x[1], binomial_residual(&a, &b, x));
    }

    // Pulling a polynomial back along Phi(x, y) = (x^3 y^-1, y^4).
    let f = SparsePoly::from_pairs(2, &[(1.0, &[0, 0][..]), (2.0, &[0, 4]), (4.0, &[3, 3]), (8.0, &[6, 6]), (16.0, &[12, 0])]);
    let phi = MonomialChange::new(vec![vec![3, 0], vec![-1, 4]]);
    let g = phi.apply_poly(&f, ChangeDirection::Pull).unwrap();
    println!("f = {f}\ng = {g}   (f = g o Phi)");
}
