//! Exact rational and integer linear algebra used by the polytope code.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Arbitrary-precision rational number.
pub type Q = BigRational;
/// Rational vector.
pub type QVec = Vec<Q>;

/// Integer as a rational.
pub fn qi(v: i64) -> Q {
    Q::from_integer(BigInt::from(v))
}

/// The fraction `n/d`.
pub fn qf(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Integer vector as a rational vector.
pub fn qvec(v: &[i64]) -> QVec {
    v.iter().map(|&x| qi(x)).collect()
}

/// Nearest `f64` of a rational.
pub fn q_to_f64(q: &Q) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        // Extremely large numerators/denominators: fall back on scaled division.
        let n = q.numer().to_f64().unwrap_or(f64::INFINITY);
        let d = q.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

/// Exact rational approximation of a finite `f64` (the binary value itself).
pub fn f64_to_q(x: f64) -> Q {
    Q::from_float(x).expect("finite float")
}

/// Rational vector back to integers, if every entry is integral.
pub fn qvec_to_i64(v: &[Q]) -> Option<Vec<i64>> {
    v.iter()
        .map(|x| if x.is_integer() { x.to_integer().to_i64() } else { None })
        .collect()
}

pub fn dot(a: &[Q], b: &[Q]) -> Q {
    a.iter().zip(b).fold(Q::zero(), |acc, (x, y)| acc + x * y)
}

pub fn sub(a: &[Q], b: &[Q]) -> QVec {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[Q], b: &[Q]) -> QVec {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn scale(a: &[Q], s: &Q) -> QVec {
    a.iter().map(|x| x * s).collect()
}

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref(m: &mut [QVec]) -> Vec<usize> {
    let rows = m.len();
    if rows == 0 {
        return vec![];
    }
    let cols = m[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in c..cols {
                    let t = &m[r][j] * &f;
                    m[i][j] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Rank of a rational matrix given by rows.
pub fn rank(rows: &[QVec]) -> usize {
    let mut m = rows.to_vec();
    rref(&mut m).len()
}

/// Basis of the right null space {y : M y = 0}.
pub fn nullspace(rows: &[QVec], ncols: usize) -> Vec<QVec> {
    let mut m = rows.to_vec();
    let pivots = rref(&mut m);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut y = vec![Q::zero(); ncols];
            y[f] = Q::one();
            for (r, &p) in pivots.iter().enumerate() {
                y[p] = -m[r][f].clone();
            }
            y
        })
        .collect()
}

/// Solve the square system `A x = b` exactly; `None` if singular.
pub fn solve(a: &[QVec], b: &[Q]) -> Option<QVec> {
    let n = a.len();
    let mut m: Vec<QVec> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let piv = rref(&mut m);
    if piv.len() < n || piv.iter().any(|&p| p >= n) {
        return None;
    }
    Some(m.into_iter().map(|r| r[n].clone()).collect())
}

/// Determinant by fraction-keeping Gaussian elimination.
pub fn det(a: &[QVec]) -> Q {
    let n = a.len();
    let mut m = a.to_vec();
    let mut d = Q::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !m[i][c].is_zero()) else {
            return Q::zero();
        };
        if p != c {
            m.swap(p, c);
            d = -d;
        }
        d *= m[c][c].clone();
        let inv = m[c][c].recip();
        for i in c + 1..n {
            if !m[i][c].is_zero() {
                let f = &m[i][c] * &inv;
                for j in c..n {
                    let t = &m[c][j] * &f;
                    m[i][j] -= t;
                }
            }
        }
    }
    d
}

/// Scale a rational vector by a positive factor so that it becomes a
/// primitive integer vector (gcd of entries equal to one).
pub fn primitive_integer(v: &[Q]) -> Vec<BigInt> {
    let l = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * Q::from_integer(l.clone())).to_integer()).collect();
    make_primitive(ints)
}

/// Divide an integer vector by the (positive) gcd of its entries.
pub fn make_primitive(v: Vec<BigInt>) -> Vec<BigInt> {
    let g = v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() || g.is_one() {
        return v;
    }
    v.into_iter().map(|x| x / &g).collect()
}

/// Integer dot product.
pub fn idot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).fold(BigInt::zero(), |acc, (x, y)| acc + x * y)
}

/// Absolute value of a rational.
pub fn qabs(q: &Q) -> Q {
    q.abs()
}

/// `n!` as a rational.
pub fn factorial(n: usize) -> Q {
    (1..=n).fold(Q::one(), |acc, k| acc * qi(k as i64))
}
