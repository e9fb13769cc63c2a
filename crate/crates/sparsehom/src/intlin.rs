//! Integer linear algebra: Smith normal form, lattices spanned by supports,
//! binomial systems and monomial changes of coordinates.
//!
//! Matrices are row-major `Vec<Vec<_>>`. Exponent vectors are *columns*:
//! for an `n x m` matrix `A`, `x^A` is the vector of the `m` monomials
//! `x^{A[.,j]}`, so that `(x^A)^B = x^{AB}`.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::poly::{SparsePoly, C64};
use crate::rational::{self, Q};

pub type IMat = Vec<Vec<BigInt>>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IntLinError {
    #[error("exponent matrix is singular")]
    SingularExponentMatrix,
    #[error("right-hand side entry {0} is zero")]
    ZeroRightHandSide(usize),
    #[error("matrix is not invertible")]
    NonInvertible,
    #[error("exponent {0:?} is not in the image lattice")]
    NotInLattice(Vec<i64>),
    #[error("empty support")]
    EmptySupport,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

/// `A = P D Q` with `P`, `Q` unimodular and `D` diagonal with
/// `d_1 | d_2 | ... | d_k`, `d_i > 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithDecomposition {
    pub p: IMat,
    pub d: IMat,
    pub q: IMat,
}

impl SmithDecomposition {
    /// The nonzero invariant factors.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        let k = self.d.len().min(self.d.first().map_or(0, |r| r.len()));
        (0..k).map(|i| self.d[i][i].clone()).filter(|x| !x.is_zero()).collect()
    }

    pub fn rank(&self) -> usize {
        self.invariant_factors().len()
    }
}

pub fn to_imat(a: &[Vec<i64>]) -> IMat {
    a.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
}

/// Converts to `i64`, panicking on overflow (only used on small matrices).
pub fn to_i64_mat(a: &IMat) -> Vec<Vec<i64>> {
    a.iter().map(|r| r.iter().map(|x| x.to_i64().expect("entry fits in i64")).collect()).collect()
}

pub fn identity(n: usize) -> IMat {
    (0..n).map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect()
}

pub fn mat_mul(a: &IMat, b: &IMat) -> IMat {
    let n = a.len();
    let k = b.len();
    let m = b.first().map_or(0, |r| r.len());
    let mut out = vec![vec![BigInt::zero(); m]; n];
    for i in 0..n {
        for l in 0..k {
            if a[i][l].is_zero() {
                continue;
            }
            for j in 0..m {
                out[i][j] += &a[i][l] * &b[l][j];
            }
        }
    }
    out
}

pub fn transpose(a: &IMat) -> IMat {
    let m = a.first().map_or(0, |r| r.len());
    (0..m).map(|j| a.iter().map(|r| r[j].clone()).collect()).collect()
}

pub fn det(a: &IMat) -> BigInt {
    let q: Vec<Vec<Q>> = a.iter().map(|r| r.iter().map(|x| Q::from_integer(x.clone())).collect()).collect();
    rational::det(&q).to_integer()
}

/// Inverse of a unimodular matrix (exact).
pub fn inverse_unimodular(a: &IMat) -> Result<IMat, IntLinError> {
    let inv = rational_inverse(a).ok_or(IntLinError::NonInvertible)?;
    inv.into_iter()
        .map(|r| r.into_iter().map(|x| if x.is_integer() { Ok(x.to_integer()) } else { Err(IntLinError::NonInvertible) }).collect())
        .collect()
}

/// Exact inverse over the rationals.
pub fn rational_inverse(a: &IMat) -> Option<Vec<Vec<Q>>> {
    let n = a.len();
    let mut aug: Vec<Vec<Q>> = a
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row: Vec<Q> = r.iter().map(|x| Q::from_integer(x.clone())).collect();
            row.extend((0..n).map(|j| if i == j { Q::one() } else { Q::zero() }));
            row
        })
        .collect();
    let piv = rational::rref(&mut aug);
    if piv.len() < n || piv.iter().enumerate().any(|(i, &p)| p != i) {
        return None;
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Smith normal form of an integer matrix.
pub fn smith_normal_form(a: &[Vec<i64>]) -> SmithDecomposition {
    smith_normal_form_big(&to_imat(a))
}

pub fn smith_normal_form_big(a: &IMat) -> SmithDecomposition {
    let n = a.len();
    let m = a.first().map_or(0, |r| r.len());
    let mut d = a.clone();
    let mut p = identity(n);
    let mut q = identity(m);
    // Invariant: A = P D Q. Row op D <- E D pairs with P <- P E^{-1};
    // column op D <- D F pairs with Q <- F^{-1} Q.
    let add_row = |d: &mut IMat, p: &mut IMat, dst: usize, src: usize, c: &BigInt| {
        for j in 0..m {
            let v = &d[src][j] * c;
            d[dst][j] += v;
        }
        for row in p.iter_mut() {
            let v = &row[dst] * c;
            row[src] -= v;
        }
    };
    let add_col = |d: &mut IMat, q: &mut IMat, dst: usize, src: usize, c: &BigInt| {
        for row in d.iter_mut() {
            let v = &row[src] * c;
            row[dst] += v;
        }
        for j in 0..m {
            let v = &q[dst][j] * c;
            q[src][j] -= v;
        }
    };
    let swap_rows = |d: &mut IMat, p: &mut IMat, i: usize, j: usize| {
        d.swap(i, j);
        for row in p.iter_mut() {
            row.swap(i, j);
        }
    };
    let swap_cols = |d: &mut IMat, q: &mut IMat, i: usize, j: usize| {
        for row in d.iter_mut() {
            row.swap(i, j);
        }
        q.swap(i, j);
    };
    for t in 0..n.min(m) {
        loop {
            // Pivot: smallest nonzero |entry| in the trailing block.
            let mut best: Option<(usize, usize)> = None;
            for i in t..n {
                for j in t..m {
                    if !d[i][j].is_zero() && best.is_none_or(|(bi, bj)| d[i][j].abs() < d[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((bi, bj)) = best else {
                return SmithDecomposition { p, d, q };
            };
            swap_rows(&mut d, &mut p, t, bi);
            swap_cols(&mut d, &mut q, t, bj);
            let mut clean = true;
            for i in t + 1..n {
                if !d[i][t].is_zero() {
                    let c = -d[i][t].div_floor(&d[t][t]);
                    add_row(&mut d, &mut p, i, t, &c);
                    clean &= d[i][t].is_zero();
                }
            }
            for j in t + 1..m {
                if !d[t][j].is_zero() {
                    let c = -d[t][j].div_floor(&d[t][t]);
                    add_col(&mut d, &mut q, j, t, &c);
                    clean &= d[t][j].is_zero();
                }
            }
            if !clean {
                continue;
            }
            // Divisibility: fold an offending row into row t and repeat.
            let offending = (t + 1..n).find(|&i| (t + 1..m).any(|j| !d[i][j].is_multiple_of(&d[t][t])));
            match offending {
                Some(i) => add_row(&mut d, &mut p, t, i, &BigInt::one()),
                None => break,
            }
        }
        if d[t][t].is_negative() {
            for j in 0..m {
                d[t][j] = -d[t][j].clone();
            }
            for row in p.iter_mut() {
                row[t] = -row[t].clone();
            }
        }
    }
    SmithDecomposition { p, d, q }
}

/// Rank, index and bases of the lattice spanned by a support collection.
#[derive(Clone, Debug)]
pub struct LatticeData {
    /// Rank of the lattice generated by differences.
    pub rank: usize,
    /// `[Z^n : Z A]` when the rank is full, `None` (infinite) otherwise.
    pub index: Option<BigInt>,
    /// Basis of `Z A`: the nonzero columns of `P D`.
    pub lattice_basis: Vec<Vec<BigInt>>,
    /// Basis of the saturation `Q A ∩ Z^n`: the first `rank` columns of `P`.
    pub saturation_basis: Vec<Vec<BigInt>>,
    pub snf: SmithDecomposition,
}

/// The `n x m` generator matrix of the lattice spanned by differences
/// `a - a_0` within each support indexed by `subset`.
pub fn difference_generators(supports: &[Vec<Vec<i64>>], subset: &[usize]) -> Result<Vec<Vec<i64>>, IntLinError> {
    let n = supports.iter().flatten().next().ok_or(IntLinError::EmptySupport)?.len();
    let mut cols = Vec::new();
    for &i in subset {
        let a = supports.get(i).filter(|a| !a.is_empty()).ok_or(IntLinError::EmptySupport)?;
        for p in &a[1..] {
            if p.len() != n {
                return Err(IntLinError::DimensionMismatch { expected: n, got: p.len() });
            }
            cols.push(p.iter().zip(&a[0]).map(|(x, y)| x - y).collect::<Vec<i64>>());
        }
    }
    if cols.is_empty() {
        cols.push(vec![0; n]);
    }
    Ok((0..n).map(|r| cols.iter().map(|c| c[r]).collect()).collect())
}

pub fn lattice_data(supports: &[Vec<Vec<i64>>], subset: &[usize]) -> Result<LatticeData, IntLinError> {
    let g = difference_generators(supports, subset)?;
    let n = g.len();
    let snf = smith_normal_form(&g);
    let f = snf.invariant_factors();
    let k = f.len();
    let index = (k == n).then(|| f.iter().product());
    let col = |m: &IMat, j: usize| m.iter().map(|r| r[j].clone()).collect::<Vec<_>>();
    let saturation_basis: Vec<Vec<BigInt>> = (0..k).map(|j| col(&snf.p, j)).collect();
    let lattice_basis = saturation_basis.iter().zip(&f).map(|(c, d)| c.iter().map(|x| x * d).collect()).collect();
    Ok(LatticeData { rank: k, index, lattice_basis, saturation_basis, snf })
}

/// `(x^M)_j = prod_i x_i^{M_ij}` in polar form: returns `(ln|.|, arg)`.
fn polar_pow(logmod: &[f64], arg: &[f64], m: &IMat) -> (Vec<f64>, Vec<f64>) {
    let cols = m.first().map_or(0, |r| r.len());
    let mut lm = vec![0.0; cols];
    let mut ag = vec![0.0; cols];
    for (i, row) in m.iter().enumerate() {
        for (j, e) in row.iter().enumerate() {
            let e = e.to_f64().unwrap();
            lm[j] += e * logmod[i];
            ag[j] += e * arg[i];
        }
    }
    (lm, ag)
}

/// All solutions in the torus of `x^A = b`, where column `j` of the square
/// matrix `A` is the exponent vector of equation `j`.
pub fn solve_binomial(a: &[Vec<i64>], b: &[C64]) -> Result<Vec<Vec<C64>>, IntLinError> {
    let n = a.len();
    if b.len() != n || a.iter().any(|r| r.len() != n) {
        return Err(IntLinError::DimensionMismatch { expected: n, got: b.len() });
    }
    if let Some(i) = b.iter().position(|z| *z == C64::new(0.0, 0.0)) {
        return Err(IntLinError::ZeroRightHandSide(i));
    }
    let snf = smith_normal_form(a);
    let f = snf.invariant_factors();
    if f.len() < n {
        return Err(IntLinError::SingularExponentMatrix);
    }
    // x^{PDQ} = b  <=>  y^D = b^{Q^{-1}} with y = x^P, x = y^{P^{-1}}.
    let qinv = inverse_unimodular(&snf.q).expect("unimodular");
    let pinv = inverse_unimodular(&snf.p).expect("unimodular");
    let lb: Vec<f64> = b.iter().map(|z| z.norm().ln()).collect();
    let ab: Vec<f64> = b.iter().map(|z| z.arg()).collect();
    let (lc, ac) = polar_pow(&lb, &ab, &qinv);
    let d: Vec<i64> = f.iter().map(|x| x.to_i64().expect("invariant factor fits in i64")).collect();
    // y_i = |c_i|^{1/d_i} exp(i (arg c_i + 2 pi j_i) / d_i). The root-of-unity
    // part of arg x = sum_i Pinv_ij 2 pi j_i / d_i is reduced exactly mod 1.
    let ly: Vec<f64> = (0..n).map(|i| lc[i] / d[i] as f64).collect();
    let ay: Vec<f64> = (0..n).map(|i| ac[i] / d[i] as f64).collect();
    let (lx, ax) = polar_pow(&ly, &ay, &pinv);
    let total: i64 = d.iter().product();
    let mut sols = Vec::with_capacity(total as usize);
    let mut jv = vec![0i64; n];
    for _ in 0..total {
        let x: Vec<C64> = (0..n)
            .map(|col| {
                let mut frac = Q::zero();
                for i in 0..n {
                    if jv[i] != 0 {
                        frac += Q::new(&pinv[i][col] * BigInt::from(jv[i]), BigInt::from(d[i]));
                    }
                }
                let frac = &frac - frac.floor();
                let theta = ax[col] + 2.0 * PI * rational::q_to_f64(&frac);
                C64::from_polar(lx[col].exp(), theta)
            })
            .collect();
        sols.push(x);
        for i in 0..n {
            jv[i] += 1;
            if jv[i] < d[i] {
                break;
            }
            jv[i] = 0;
        }
    }
    Ok(sols)
}

/// Relative back-substitution residual `max_j |x^{a_j} / b_j - 1|`.
pub fn binomial_residual(a: &[Vec<i64>], b: &[C64], x: &[C64]) -> f64 {
    let n = a.len();
    (0..n)
        .map(|j| {
            let e: Vec<i64> = a.iter().map(|r| r[j]).collect();
            (crate::poly::monomial_value(x, &e) / b[j] - 1.0).norm()
        })
        .fold(0.0, f64::max)
}

/// Direction of a monomial change.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChangeDirection {
    /// `alpha -> phi alpha`: the support of `g o Phi` from that of `g`.
    Push,
    /// `alpha -> phi^{-1} alpha`: recovers `g` from `f = g o Phi`.
    Pull,
}

/// A monomial map `Phi = phi^*`; column `i` of `phi` is the exponent vector
/// of the `i`-th component of `Phi`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialChange {
    pub phi: Vec<Vec<i64>>,
}

impl MonomialChange {
    pub fn new(phi: Vec<Vec<i64>>) -> MonomialChange {
        MonomialChange { phi }
    }

    pub fn identity(n: usize) -> MonomialChange {
        MonomialChange { phi: (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect() }
    }

    pub fn dim(&self) -> usize {
        self.phi.len()
    }

    pub fn det(&self) -> BigInt {
        det(&to_imat(&self.phi))
    }

    pub fn is_unimodular(&self) -> bool {
        self.det().abs().is_one()
    }

    /// Exponent map in the requested direction.
    pub fn map_exponent(&self, alpha: &[i64], dir: ChangeDirection) -> Result<Vec<i64>, IntLinError> {
        match dir {
            ChangeDirection::Push => Ok(self.phi.iter().map(|r| r.iter().zip(alpha).map(|(a, b)| a * b).sum()).collect()),
            ChangeDirection::Pull => {
                let inv = rational_inverse(&to_imat(&self.phi)).ok_or(IntLinError::NonInvertible)?;
                pull_with(&inv, alpha)
            }
        }
    }

    /// Map a support set.
    pub fn apply_support(&self, support: &[Vec<i64>], dir: ChangeDirection) -> Result<Vec<Vec<i64>>, IntLinError> {
        match dir {
            ChangeDirection::Push => support.iter().map(|a| self.map_exponent(a, dir)).collect(),
            ChangeDirection::Pull => {
                let inv = rational_inverse(&to_imat(&self.phi)).ok_or(IntLinError::NonInvertible)?;
                support.iter().map(|a| pull_with(&inv, a)).collect()
            }
        }
    }

    /// Map a polynomial's exponents; colliding terms are summed.
    pub fn apply_poly(&self, f: &SparsePoly, dir: ChangeDirection) -> Result<SparsePoly, IntLinError> {
        let n = self.dim();
        if f.nvars() != n {
            return Err(IntLinError::DimensionMismatch { expected: n, got: f.nvars() });
        }
        let support = self.apply_support(&f.support(), dir)?;
        let terms = support
            .into_iter()
            .zip(f.coefficients())
            .map(|(exponent, coeff)| crate::poly::Term { exponent, coeff })
            .collect();
        Ok(SparsePoly::new(n, terms).expect("dimensions checked"))
    }

    /// Transform a direction. Since `<phi alpha, w> = <alpha, phi^T w>`,
    /// `Push` (`w -> phi^T w`) carries directions for `f o Phi` to directions
    /// for `f`, and `Pull` (`w -> phi^{-T} w`) carries them back.
    pub fn transform_direction(&self, w: &[Q], dir: ChangeDirection) -> Result<Vec<Q>, IntLinError> {
        let n = self.dim();
        match dir {
            ChangeDirection::Push => Ok((0..n).map(|j| (0..n).map(|i| Q::from_integer(self.phi[i][j].into()) * &w[i]).sum()).collect()),
            ChangeDirection::Pull => {
                let inv = rational_inverse(&to_imat(&self.phi)).ok_or(IntLinError::NonInvertible)?;
                Ok((0..n).map(|j| (0..n).map(|i| &inv[i][j] * &w[i]).sum()).collect())
            }
        }
    }

    /// Evaluate `Phi(x)`.
    pub fn eval(&self, x: &[C64]) -> Vec<C64> {
        let n = self.dim();
        (0..n)
            .map(|j| {
                let e: Vec<i64> = self.phi.iter().map(|r| r[j]).collect();
                crate::poly::monomial_value(x, &e)
            })
            .collect()
    }
}

fn pull_with(inv: &[Vec<Q>], alpha: &[i64]) -> Result<Vec<i64>, IntLinError> {
    let v: Vec<Q> = inv.iter().map(|r| r.iter().zip(alpha).map(|(a, &b)| a * Q::from_integer(b.into())).sum()).collect();
    rational::qvec_to_i64(&v).ok_or_else(|| IntLinError::NotInLattice(alpha.to_vec()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::r;

    fn check_snf(a: &[Vec<i64>]) {
        let s = smith_normal_form(a);
        assert_eq!(mat_mul(&mat_mul(&s.p, &s.d), &s.q), to_imat(a));
        assert!(det(&s.p).abs().is_one());
        assert!(det(&s.q).abs().is_one());
        let f = s.invariant_factors();
        for w in f.windows(2) {
            assert!(w[1].is_multiple_of(&w[0]));
        }
        for (i, row) in s.d.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                if i != j {
                    assert!(x.is_zero());
                }
            }
        }
    }

    #[test]
    fn diag_two_three() {
        let s = smith_normal_form(&[vec![2, 0], vec![0, 3]]);
        assert_eq!(s.invariant_factors(), vec![BigInt::from(1), BigInt::from(6)]);
        check_snf(&[vec![2, 0], vec![0, 3]]);
        check_snf(&[vec![0, 4, 6], vec![2, 8, -2]]);
        check_snf(&[vec![0, 0], vec![0, 0]]);
    }

    #[test]
    fn lacunary_index() {
        let a1 = vec![vec![0, 0], vec![0, 4], vec![3, 3], vec![6, 6], vec![12, 0]];
        let a2 = vec![vec![0, 0], vec![3, 7], vec![6, 2], vec![9, 1], vec![9, 5]];
        let ld = lattice_data(&[a1, a2], &[0, 1]).unwrap();
        assert_eq!(ld.rank, 2);
        assert_eq!(ld.index, Some(BigInt::from(12)));
    }

    #[test]
    fn binomial_two_solutions() {
        // z1 z2 = -3, z1 z2^{-1} = 2
        let a = vec![vec![1, 1], vec![1, -1]];
        let b = vec![r(-3.0), r(2.0)];
        let sols = solve_binomial(&a, &b).unwrap();
        assert_eq!(sols.len(), 2);
        for s in &sols {
            assert!(binomial_residual(&a, &b, s) < 1e-12);
        }
        assert!((sols[0][0] - sols[1][0]).norm() > 1.0);
    }

    #[test]
    fn univariate_square_roots() {
        let sols = solve_binomial(&[vec![2]], &[r(4.0)]).unwrap();
        let mut re: Vec<f64> = sols.iter().map(|s| s[0].re).collect();
        re.sort_by(f64::total_cmp);
        assert!((re[0] + 2.0).abs() < 1e-14 && (re[1] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn binomial_errors() {
        assert_eq!(solve_binomial(&[vec![1, 2], vec![2, 4]], &[r(1.0), r(1.0)]), Err(IntLinError::SingularExponentMatrix));
        assert_eq!(solve_binomial(&[vec![1]], &[r(0.0)]), Err(IntLinError::ZeroRightHandSide(0)));
    }

    #[test]
    fn lacunary_pullback() {
        let f1 = SparsePoly::from_pairs(2, &[(1.0, &[0, 0][..]), (2.0, &[0, 4]), (4.0, &[3, 3]), (8.0, &[6, 6]), (16.0, &[12, 0])]);
        let g1 = SparsePoly::from_pairs(2, &[(1.0, &[0, 0][..]), (2.0, &[0, 1]), (4.0, &[1, 1]), (8.0, &[2, 2]), (16.0, &[4, 1])]);
        let phi = MonomialChange::new(vec![vec![3, 0], vec![-1, 4]]);
        assert_eq!(phi.apply_poly(&f1, ChangeDirection::Pull).unwrap(), g1);
        assert_eq!(phi.apply_poly(&g1, ChangeDirection::Push).unwrap(), f1);
        // f = g o Phi pointwise.
        let x = vec![C64::new(0.7, 0.2), C64::new(-0.4, 0.9)];
        let lhs = f1.eval(&x).unwrap();
        let rhs = g1.eval(&phi.eval(&x)).unwrap();
        assert!((lhs - rhs).norm() < 1e-9 * lhs.norm().max(1.0));
        let bad = SparsePoly::from_pairs(2, &[(1.0, &[1, 0][..])]);
        assert!(matches!(phi.apply_poly(&bad, ChangeDirection::Pull), Err(IntLinError::NotInLattice(_))));
    }

    #[test]
    fn direction_under_xyz_change() {
        // Phi(x, y, z) = (xyz, y, z).
        let phi = MonomialChange::new(vec![vec![1, 0, 0], vec![1, 1, 0], vec![1, 0, 1]]);
        let w = rational::qvec(&[1, 1, 1]);
        let got = phi.transform_direction(&w, ChangeDirection::Pull).unwrap();
        assert_eq!(got, rational::qvec(&[-1, 1, 1]));
        let back = phi.transform_direction(&got, ChangeDirection::Push).unwrap();
        assert_eq!(back, w);
    }
}
