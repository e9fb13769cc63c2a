//! Double-double arithmetic, just enough to evaluate polynomial residuals
//! that cancel far below the size of their terms.

use std::ops::{Add, Mul, Neg, Sub};

use crate::poly::{SparsePoly, C64};

/// An unevaluated sum `hi + lo` with `|lo| <= ulp(hi) / 2`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DD {
    pub hi: f64,
    pub lo: f64,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn quick_two_sum(a: f64, b: f64) -> DD {
    let s = a + b;
    DD { hi: s, lo: b - (s - a) }
}

impl DD {
    pub fn new(x: f64) -> DD {
        DD { hi: x, lo: 0.0 }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}

impl Add for DD {
    type Output = DD;
    fn add(self, o: DD) -> DD {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let r = quick_two_sum(s, e + t);
        quick_two_sum(r.hi, r.lo + f)
    }
}

impl Neg for DD {
    type Output = DD;
    fn neg(self) -> DD {
        DD { hi: -self.hi, lo: -self.lo }
    }
}

impl Sub for DD {
    type Output = DD;
    fn sub(self, o: DD) -> DD {
        self + (-o)
    }
}

impl Mul for DD {
    type Output = DD;
    fn mul(self, o: DD) -> DD {
        let p = self.hi * o.hi;
        let e = self.hi.mul_add(o.hi, -p);
        quick_two_sum(p, e + (self.hi * o.lo + self.lo * o.hi))
    }
}

/// A complex number with double-double parts.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CDD {
    pub re: DD,
    pub im: DD,
}

impl CDD {
    pub fn new(z: C64) -> CDD {
        CDD { re: DD::new(z.re), im: DD::new(z.im) }
    }

    pub fn to_c64(self) -> C64 {
        C64::new(self.re.to_f64(), self.im.to_f64())
    }
}

impl Add for CDD {
    type Output = CDD;
    fn add(self, o: CDD) -> CDD {
        CDD { re: self.re + o.re, im: self.im + o.im }
    }
}

impl Sub for CDD {
    type Output = CDD;
    fn sub(self, o: CDD) -> CDD {
        CDD { re: self.re - o.re, im: self.im - o.im }
    }
}

impl Mul for CDD {
    type Output = CDD;
    fn mul(self, o: CDD) -> CDD {
        CDD { re: self.re * o.re - self.im * o.im, im: self.re * o.im + self.im * o.re }
    }
}

/// `f(x)` with all products and sums carried in double-double, so the
/// result is accurate to about `1e-32` times the size of the largest term.
pub fn eval_compensated(f: &SparsePoly, x: &[C64]) -> CDD {
    let xs: Vec<CDD> = x.iter().map(|&v| CDD::new(v)).collect();
    let inv: Vec<CDD> = x.iter().map(|&v| CDD::new(1.0 / v)).collect();
    let mut acc = CDD::default();
    for t in f.terms() {
        let mut m = CDD::new(t.coeff);
        for (j, &e) in t.exponent.iter().enumerate() {
            let base = if e >= 0 { xs[j] } else { inv[j] };
            for _ in 0..e.unsigned_abs() {
                m = m * base;
            }
        }
        acc = acc + m;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::r;

    #[test]
    fn recovers_cancelled_digits() {
        // x^2 - 1 - 2^-39 x at x = 1 + 2^-40 is -2^-80; plain doubles lose
        // the square's last term.
        let e = 2f64.powi(-40);
        let f = SparsePoly::from_pairs(1, &[(r(1.0), &[2][..]), (r(-1.0), &[0][..]), (r(-2.0 * e), &[1][..])]);
        let v = eval_compensated(&f, &[r(1.0 + e)]).to_c64();
        assert!((v.re + e * e).abs() < 1e-35);
        assert!((f.eval(&[r(1.0 + e)]).unwrap().re + e * e).abs() > 0.5 * e * e);
    }
}
