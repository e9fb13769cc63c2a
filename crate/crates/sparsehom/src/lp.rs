//! A small dense two-phase simplex method (Bland's rule), generic over an
//! ordered field. The exact instance over `BigRational` serves as an
//! independent feasibility oracle; the `f64` instance is used for fast
//! pruning where every positive answer is later re-verified exactly.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{Signed, Zero};

use crate::rational::Q;

/// Scalar type usable by the simplex tableau.
pub trait LpScalar:
    Clone
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    /// Strictly positive beyond the scalar's tolerance.
    fn pos(&self) -> bool;
    /// Strictly negative beyond the scalar's tolerance.
    fn neg_strict(&self) -> bool;
    fn abs_val(&self) -> Self;
}

impl LpScalar for Q {
    fn zero() -> Self {
        <Q as Zero>::zero()
    }
    fn one() -> Self {
        crate::rational::qi(1)
    }
    fn pos(&self) -> bool {
        self.is_positive()
    }
    fn neg_strict(&self) -> bool {
        self.is_negative()
    }
    fn abs_val(&self) -> Self {
        self.abs()
    }
}

const F64_TOL: f64 = 1e-9;

impl LpScalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn pos(&self) -> bool {
        *self > F64_TOL
    }
    fn neg_strict(&self) -> bool {
        *self < -F64_TOL
    }
    fn abs_val(&self) -> Self {
        self.abs()
    }
}

/// One linear constraint `coeffs . x (<=|=) rhs`.
#[derive(Clone, Debug)]
pub struct Constraint<T> {
    pub coeffs: Vec<T>,
    pub rhs: T,
    pub equality: bool,
}

/// Decide feasibility of a system of linear constraints in free variables.
/// Returns a feasible point when one exists.
pub fn feasible_point<T: LpScalar>(nvars: usize, cons: &[Constraint<T>]) -> Option<Vec<T>> {
    // Standard form: x = u - v, slacks for inequalities, rows with rhs >= 0,
    // one artificial per row; phase one minimizes the artificial sum.
    let m = cons.len();
    if m == 0 {
        return Some(vec![T::zero(); nvars]);
    }
    let nslack = cons.iter().filter(|c| !c.equality).count();
    let ncols = 2 * nvars + nslack + m;
    let mut tab: Vec<Vec<T>> = Vec::with_capacity(m + 1);
    let mut slack_idx = 0;
    let mut basis = Vec::with_capacity(m);
    for (i, c) in cons.iter().enumerate() {
        let mut row = vec![T::zero(); ncols + 1];
        for j in 0..nvars {
            row[j] = c.coeffs[j].clone();
            row[nvars + j] = -c.coeffs[j].clone();
        }
        if !c.equality {
            row[2 * nvars + slack_idx] = T::one();
            slack_idx += 1;
        }
        row[ncols] = c.rhs.clone();
        if row[ncols] < T::zero() {
            for x in row.iter_mut() {
                *x = -x.clone();
            }
        }
        let art = 2 * nvars + nslack + i;
        row[art] = T::one();
        basis.push(art);
        tab.push(row);
    }
    // Objective row: minimize sum of artificials, expressed as reduced costs.
    let mut obj = vec![T::zero(); ncols + 1];
    for row in &tab {
        for j in 0..=ncols {
            if j >= 2 * nvars + nslack && j < ncols {
                continue;
            }
            obj[j] = obj[j].clone() + row[j].clone();
        }
    }
    tab.push(obj);
    let max_iter = 50 * (m + ncols) + 100;
    for _ in 0..max_iter {
        // Entering column: smallest index with positive reduced cost (Bland).
        let Some(col) = (0..ncols).find(|&j| tab[m][j].pos()) else {
            break;
        };
        // Ratio test, ties broken by smallest basic index.
        let mut best: Option<(usize, T)> = None;
        for i in 0..m {
            if tab[i][col].pos() {
                let ratio = tab[i][ncols].clone() / tab[i][col].clone();
                let better = match &best {
                    None => true,
                    Some((bi, br)) => ratio < *br || (!(ratio > *br) && basis[i] < basis[*bi]),
                };
                if better {
                    best = Some((i, ratio));
                }
            }
        }
        let Some((prow, _)) = best else {
            break;
        };
        pivot(&mut tab, prow, col);
        basis[prow] = col;
    }
    // Feasible iff the artificial sum is zero.
    let infeas = tab[m][ncols].clone();
    let scale = cons.iter().fold(T::one(), |acc, c| {
        let a = c.rhs.abs_val();
        if a > acc {
            a
        } else {
            acc
        }
    });
    if (infeas / scale).pos() {
        return None;
    }
    let mut x = vec![T::zero(); 2 * nvars];
    for (i, &b) in basis.iter().enumerate() {
        if b < 2 * nvars {
            x[b] = tab[i][ncols].clone();
        }
    }
    Some((0..nvars).map(|j| x[j].clone() - x[nvars + j].clone()).collect())
}

fn pivot<T: LpScalar>(tab: &mut [Vec<T>], prow: usize, col: usize) {
    let p = tab[prow][col].clone();
    let width = tab[prow].len();
    for j in 0..width {
        tab[prow][j] = tab[prow][j].clone() / p.clone();
    }
    let prow_vals = tab[prow].clone();
    for (i, row) in tab.iter_mut().enumerate() {
        if i == prow {
            continue;
        }
        let f = row[col].clone();
        if f == T::zero() {
            continue;
        }
        for j in 0..width {
            row[j] = row[j].clone() - f.clone() * prow_vals[j].clone();
        }
    }
}

/// Is `p` a convex combination of `points`? Exact; returns the weights.
pub fn convex_combination(points: &[Vec<Q>], p: &[Q]) -> Option<Vec<Q>> {
    // Variables: weights lambda_j >= 0 expressed as free variables with
    // explicit nonnegativity rows.
    let k = points.len();
    let n = p.len();
    let mut cons = Vec::new();
    for i in 0..n {
        cons.push(Constraint { coeffs: points.iter().map(|q| q[i].clone()).collect(), rhs: p[i].clone(), equality: true });
    }
    cons.push(Constraint { coeffs: vec![<Q as LpScalar>::one(); k], rhs: <Q as LpScalar>::one(), equality: true });
    for j in 0..k {
        let mut c = vec![<Q as LpScalar>::zero(); k];
        c[j] = -<Q as LpScalar>::one();
        cons.push(Constraint { coeffs: c, rhs: <Q as LpScalar>::zero(), equality: false });
    }
    feasible_point(k, &cons)
}
