//! Sparse Laurent polynomials with complex coefficients and square systems
//! of them: evaluation, Jacobians, supports and Newton polytopes.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::polytope::{self, Polytope};

pub type C64 = Complex64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolyError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("coordinate {index} is zero but carries a negative exponent")]
    ZeroBaseNegativeExponent { index: usize },
    #[error("system is not square: {polys} polynomials in {vars} variables")]
    NonSquare { polys: usize, vars: usize },
    #[error("the zero polynomial has no Newton polytope")]
    ZeroPolynomial,
}

/// A monomial `coeff * x^exponent`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub exponent: Vec<i64>,
    #[serde(with = "complex_pair")]
    pub coeff: C64,
}

/// JSON encoding of complex numbers as `[re, im]`.
pub mod complex_pair {
    use super::C64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(c: &C64, s: S) -> Result<S::Ok, S::Error> {
        [c.re, c.im].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<C64, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(C64::new(re, im))
    }
}

/// A sparse Laurent polynomial in canonical form: exponents sorted and
/// distinct, no coefficient exactly zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPoly", into = "RawPoly")]
pub struct SparsePoly {
    nvars: usize,
    terms: Vec<Term>,
}

#[derive(Serialize, Deserialize)]
struct RawPoly {
    nvars: usize,
    terms: Vec<Term>,
}

impl TryFrom<RawPoly> for SparsePoly {
    type Error = PolyError;
    fn try_from(r: RawPoly) -> Result<Self, PolyError> {
        SparsePoly::new(r.nvars, r.terms)
    }
}

impl From<SparsePoly> for RawPoly {
    fn from(p: SparsePoly) -> RawPoly {
        RawPoly { nvars: p.nvars, terms: p.terms }
    }
}

/// Integer power of a complex number, exact for small exponents.
#[inline]
pub fn cpow(x: C64, e: i64) -> C64 {
    if e >= 0 {
        x.powu(e as u32)
    } else {
        x.powu((-e) as u32).inv()
    }
}

/// `x^alpha` for a Laurent exponent vector.
pub fn monomial_value(x: &[C64], alpha: &[i64]) -> C64 {
    alpha.iter().zip(x).fold(C64::new(1.0, 0.0), |acc, (&e, &xi)| if e == 0 { acc } else { acc * cpow(xi, e) })
}

impl SparsePoly {
    /// Canonicalize a list of terms: merge duplicate exponents and drop
    /// coefficients that are exactly zero.
    pub fn new(nvars: usize, terms: Vec<Term>) -> Result<SparsePoly, PolyError> {
        let mut map: BTreeMap<Vec<i64>, C64> = BTreeMap::new();
        for t in terms {
            if t.exponent.len() != nvars {
                return Err(PolyError::DimensionMismatch { expected: nvars, got: t.exponent.len() });
            }
            *map.entry(t.exponent).or_insert(C64::new(0.0, 0.0)) += t.coeff;
        }
        let terms = map
            .into_iter()
            .filter(|(_, c)| *c != C64::new(0.0, 0.0))
            .map(|(exponent, coeff)| Term { exponent, coeff })
            .collect();
        Ok(SparsePoly { nvars, terms })
    }

    /// Build from `(coefficient, exponent)` pairs; panics on length mismatch.
    pub fn from_pairs<C: Into<C64> + Copy>(nvars: usize, pairs: &[(C, &[i64])]) -> SparsePoly {
        let terms = pairs.iter().map(|(c, e)| Term { exponent: e.to_vec(), coeff: (*c).into() }).collect();
        SparsePoly::new(nvars, terms).expect("exponent length")
    }

    /// Build from a support and matching coefficients.
    pub fn from_support(support: &[Vec<i64>], coeffs: &[C64]) -> SparsePoly {
        let nvars = support.first().map_or(0, |a| a.len());
        let terms = support.iter().zip(coeffs).map(|(a, &c)| Term { exponent: a.clone(), coeff: c }).collect();
        SparsePoly::new(nvars, terms).expect("exponent length")
    }

    pub fn zero(nvars: usize) -> SparsePoly {
        SparsePoly { nvars, terms: vec![] }
    }

    pub fn constant(nvars: usize, c: C64) -> SparsePoly {
        SparsePoly::new(nvars, vec![Term { exponent: vec![0; nvars], coeff: c }]).unwrap()
    }

    /// The coordinate function `x_i`.
    pub fn var(nvars: usize, i: usize) -> SparsePoly {
        let mut e = vec![0; nvars];
        e[i] = 1;
        SparsePoly::new(nvars, vec![Term { exponent: e, coeff: C64::new(1.0, 0.0) }]).unwrap()
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Exponents of the nonzero terms.
    pub fn support(&self) -> Vec<Vec<i64>> {
        self.terms.iter().map(|t| t.exponent.clone()).collect()
    }

    pub fn coefficients(&self) -> Vec<C64> {
        self.terms.iter().map(|t| t.coeff).collect()
    }

    /// Coefficient of a given exponent (zero if absent).
    pub fn coeff(&self, exponent: &[i64]) -> C64 {
        self.terms.iter().find(|t| t.exponent == exponent).map_or(C64::new(0.0, 0.0), |t| t.coeff)
    }

    /// Maximum total degree of a term.
    pub fn degree(&self) -> i64 {
        self.terms.iter().map(|t| t.exponent.iter().sum::<i64>()).max().unwrap_or(0)
    }

    /// Whether some exponent is negative.
    pub fn is_laurent(&self) -> bool {
        self.terms.iter().any(|t| t.exponent.iter().any(|&e| e < 0))
    }

    fn check_point(&self, x: &[C64]) -> Result<(), PolyError> {
        if x.len() != self.nvars {
            return Err(PolyError::DimensionMismatch { expected: self.nvars, got: x.len() });
        }
        for t in &self.terms {
            for (i, &e) in t.exponent.iter().enumerate() {
                if e < 0 && x[i] == C64::new(0.0, 0.0) {
                    return Err(PolyError::ZeroBaseNegativeExponent { index: i });
                }
            }
        }
        Ok(())
    }

    /// Evaluate at a point.
    pub fn eval(&self, x: &[C64]) -> Result<C64, PolyError> {
        self.check_point(x)?;
        Ok(self.eval_unchecked(x))
    }

    /// Evaluate without validation.
    pub fn eval_unchecked(&self, x: &[C64]) -> C64 {
        self.terms.iter().map(|t| t.coeff * monomial_value(x, &t.exponent)).sum()
    }

    /// Value and gradient at a point (no validation).
    pub fn eval_grad(&self, x: &[C64], grad: &mut [C64]) -> C64 {
        let n = self.nvars;
        for g in grad.iter_mut() {
            *g = C64::new(0.0, 0.0);
        }
        let mut val = C64::new(0.0, 0.0);
        for t in &self.terms {
            let m = t.coeff * monomial_value(x, &t.exponent);
            val += m;
            for j in 0..n {
                let e = t.exponent[j];
                if e == 0 {
                    continue;
                }
                // d/dx_j of c x^a = e * c x^a / x_j; recompute when x_j = 0.
                if x[j] != C64::new(0.0, 0.0) {
                    grad[j] += m * (e as f64) / x[j];
                } else if e == 1 {
                    let mut a = t.exponent.clone();
                    a[j] = 0;
                    grad[j] += t.coeff * monomial_value(x, &a);
                }
            }
        }
        val
    }

    /// Partial derivative with respect to `x_j`.
    pub fn partial(&self, j: usize) -> SparsePoly {
        let terms = self
            .terms
            .iter()
            .filter(|t| t.exponent[j] != 0)
            .map(|t| {
                let mut e = t.exponent.clone();
                let k = e[j];
                e[j] -= 1;
                Term { exponent: e, coeff: t.coeff * k as f64 }
            })
            .collect();
        SparsePoly::new(self.nvars, terms).unwrap()
    }

    /// Multiply by a scalar.
    pub fn scale(&self, c: C64) -> SparsePoly {
        let terms = self.terms.iter().map(|t| Term { exponent: t.exponent.clone(), coeff: t.coeff * c }).collect();
        SparsePoly::new(self.nvars, terms).unwrap()
    }

    /// Apply a map to every exponent (collisions are summed).
    pub fn map_exponents(&self, nvars: usize, f: impl Fn(&[i64]) -> Vec<i64>) -> SparsePoly {
        let terms = self.terms.iter().map(|t| Term { exponent: f(&t.exponent), coeff: t.coeff }).collect();
        SparsePoly::new(nvars, terms).expect("exponent map length")
    }

    /// Replace coefficients (same support order).
    pub fn with_coefficients(&self, coeffs: &[C64]) -> SparsePoly {
        let terms = self.terms.iter().zip(coeffs).map(|(t, &c)| Term { exponent: t.exponent.clone(), coeff: c }).collect();
        SparsePoly::new(self.nvars, terms).unwrap()
    }

    /// Newton polytope `conv(supp f)`; with `homogenize`, the lift
    /// `{(a, d - |a|)}` with `d` the total degree.
    pub fn newton_polytope(&self, homogenize: bool) -> Result<Polytope, PolyError> {
        if self.is_zero() {
            return Err(PolyError::ZeroPolynomial);
        }
        let d = self.degree();
        let pts: Vec<Vec<i64>> = self
            .terms
            .iter()
            .map(|t| {
                let mut a = t.exponent.clone();
                if homogenize {
                    a.push(d - t.exponent.iter().sum::<i64>());
                }
                a
            })
            .collect();
        Ok(polytope::convex_hull_int(&pts).expect("nonempty support"))
    }
}

/// Support of a polynomial (exponents with nonzero coefficients).
pub fn support_of(f: &SparsePoly) -> Vec<Vec<i64>> {
    f.support()
}

impl Add for &SparsePoly {
    type Output = SparsePoly;
    fn add(self, o: &SparsePoly) -> SparsePoly {
        let mut terms = self.terms.clone();
        terms.extend(o.terms.iter().cloned());
        SparsePoly::new(self.nvars, terms).expect("same number of variables")
    }
}

impl Sub for &SparsePoly {
    type Output = SparsePoly;
    fn sub(self, o: &SparsePoly) -> SparsePoly {
        self + &(-o)
    }
}

impl Neg for &SparsePoly {
    type Output = SparsePoly;
    fn neg(self) -> SparsePoly {
        self.scale(C64::new(-1.0, 0.0))
    }
}

impl Mul for &SparsePoly {
    type Output = SparsePoly;
    fn mul(self, o: &SparsePoly) -> SparsePoly {
        let mut terms = Vec::with_capacity(self.terms.len() * o.terms.len());
        for a in &self.terms {
            for b in &o.terms {
                let e = a.exponent.iter().zip(&b.exponent).map(|(x, y)| x + y).collect();
                terms.push(Term { exponent: e, coeff: a.coeff * b.coeff });
            }
        }
        SparsePoly::new(self.nvars, terms).expect("same number of variables")
    }
}

/// Human-readable form, e.g. `3 + 4*x1 - 2*x2 + x1*x2`; variables are
/// `x1, ..., xn` and nonreal coefficients are parenthesized.
impl fmt::Display for SparsePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        // Graded order, earlier variables first within a degree.
        let mut terms: Vec<&Term> = self.terms.iter().collect();
        terms.sort_by(|a, b| {
            let deg = |t: &Term| t.exponent.iter().sum::<i64>();
            deg(a).cmp(&deg(b)).then_with(|| b.exponent.cmp(&a.exponent))
        });
        for (k, t) in terms.into_iter().enumerate() {
            let mono: Vec<String> = t
                .exponent
                .iter()
                .enumerate()
                .filter(|(_, &e)| e != 0)
                .map(|(i, &e)| if e == 1 { format!("x{}", i + 1) } else { format!("x{}^{}", i + 1, e) })
                .collect();
            let c = t.coeff;
            let (sign, body) = if c.im == 0.0 {
                let sign = if c.re < 0.0 { "-" } else { "+" };
                let a = c.re.abs();
                (sign, if a == 1.0 && !mono.is_empty() { String::new() } else { format!("{a}") })
            } else {
                ("+", format!("({}{:+}i)", c.re, c.im))
            };
            match (k, sign) {
                (0, "-") => write!(f, "-")?,
                (0, _) => {}
                (_, s) => write!(f, " {s} ")?,
            }
            let joined = mono.join("*");
            match (body.is_empty(), joined.is_empty()) {
                (true, _) => write!(f, "{joined}")?,
                (false, true) => write!(f, "{body}")?,
                (false, false) => write!(f, "{body}*{joined}")?,
            }
        }
        Ok(())
    }
}

/// A list of polynomials in a common set of variables.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SparseSystem {
    pub polys: Vec<SparsePoly>,
}

impl SparseSystem {
    pub fn new(polys: Vec<SparsePoly>) -> Result<SparseSystem, PolyError> {
        if let Some(first) = polys.first() {
            let n = first.nvars();
            if let Some(p) = polys.iter().find(|p| p.nvars() != n) {
                return Err(PolyError::DimensionMismatch { expected: n, got: p.nvars() });
            }
        }
        Ok(SparseSystem { polys })
    }

    pub fn nvars(&self) -> usize {
        self.polys.first().map_or(0, |p| p.nvars())
    }

    pub fn len(&self) -> usize {
        self.polys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polys.is_empty()
    }

    pub fn is_square(&self) -> bool {
        self.polys.len() == self.nvars()
    }

    pub fn supports(&self) -> Vec<Vec<Vec<i64>>> {
        self.polys.iter().map(|p| p.support()).collect()
    }

    pub fn degrees(&self) -> Vec<i64> {
        self.polys.iter().map(|p| p.degree()).collect()
    }

    /// Values of all polynomials at `x`.
    pub fn eval(&self, x: &[C64]) -> Result<Vec<C64>, PolyError> {
        self.polys.iter().map(|p| p.eval(x)).collect()
    }

    /// Jacobian matrix at `x` (square systems only).
    pub fn jacobian(&self, x: &[C64]) -> Result<DMatrix<C64>, PolyError> {
        if !self.is_square() {
            return Err(PolyError::NonSquare { polys: self.len(), vars: self.nvars() });
        }
        for p in &self.polys {
            p.check_point(x)?;
        }
        let (_, j) = self.eval_jac(x);
        Ok(j)
    }

    /// Values and Jacobian (rectangular allowed, no validation).
    pub fn eval_jac(&self, x: &[C64]) -> (Vec<C64>, DMatrix<C64>) {
        let n = self.nvars();
        let mut jac = DMatrix::zeros(self.len(), n);
        let mut g = vec![C64::new(0.0, 0.0); n];
        let mut vals = Vec::with_capacity(self.len());
        for (i, p) in self.polys.iter().enumerate() {
            vals.push(p.eval_grad(x, &mut g));
            for j in 0..n {
                jac[(i, j)] = g[j];
            }
        }
        (vals, jac)
    }

    /// Max-norm of the residual (no validation).
    pub fn residual(&self, x: &[C64]) -> f64 {
        self.polys.iter().map(|p| p.eval_unchecked(x).norm()).fold(0.0, f64::max)
    }
}

/// Evaluate a system at `x`.
pub fn eval_system(f: &SparseSystem, x: &[C64]) -> Result<Vec<C64>, PolyError> {
    f.eval(x)
}

/// Jacobian of a square system at `x`.
pub fn jacobian(f: &SparseSystem, x: &[C64]) -> Result<DMatrix<C64>, PolyError> {
    f.jacobian(x)
}

/// Complex number shorthand.
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Real complex number shorthand.
pub fn r(re: f64) -> C64 {
    C64::new(re, 0.0)
}
