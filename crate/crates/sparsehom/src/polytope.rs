//! Exact-rational convex polytopes: hulls, support functions, exposed
//! faces, Minkowski sums, lattice points and the invariant-hyperplane
//! constraint for symmetric invariants.

use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hull::{self, Halfspace, Hull};
use crate::rational::{self, q_to_f64, qi, Q, QVec};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolytopeError {
    #[error("convex hull of an empty point set")]
    EmptyInput,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("support is not of uniform degree: column {column} has degree {got}, expected {expected}")]
    NonUniformDegree { column: usize, expected: i64, got: i64 },
}

/// Cached halfspace description of a polytope.
#[derive(Clone, Debug)]
pub struct HalfspaceRep {
    pub dim: usize,
    pub inequalities: Vec<Halfspace>,
    pub equalities: Vec<Halfspace>,
}

/// A convex polytope stored by its exact vertex set.
///
/// The halfspace description is computed on demand and memoized behind a
/// mutex, so a `Polytope` can be shared freely between threads.
#[derive(Debug)]
pub struct Polytope {
    ambient_dim: usize,
    vertices: Vec<QVec>,
    cache: Mutex<Option<Arc<HalfspaceRep>>>,
}

impl Clone for Polytope {
    fn clone(&self) -> Self {
        Polytope {
            ambient_dim: self.ambient_dim,
            vertices: self.vertices.clone(),
            cache: Mutex::new(self.cache.lock().unwrap().clone()),
        }
    }
}

impl PartialEq for Polytope {
    fn eq(&self, other: &Self) -> bool {
        self.ambient_dim == other.ambient_dim && self.vertices == other.vertices
    }
}

impl Eq for Polytope {}

/// An exposed face: the direction and the vertices attaining the maximum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Face {
    pub direction: QVec,
    pub vertices: Vec<QVec>,
}

impl Face {
    pub fn is_vertex(&self) -> bool {
        self.vertices.len() == 1
    }
}

fn sort_points(v: &mut [QVec]) {
    v.sort();
}

/// Convex hull of a finite set of rational points.
pub fn convex_hull(points: &[QVec]) -> Result<Polytope, PolytopeError> {
    if points.is_empty() {
        return Err(PolytopeError::EmptyInput);
    }
    let n = points[0].len();
    if let Some(p) = points.iter().find(|p| p.len() != n) {
        return Err(PolytopeError::DimensionMismatch { expected: n, got: p.len() });
    }
    let h = hull::hull(points);
    Ok(Polytope::from_hull(n, points, &h))
}

/// Convex hull of integer points.
pub fn convex_hull_int(points: &[Vec<i64>]) -> Result<Polytope, PolytopeError> {
    let q: Vec<QVec> = points.iter().map(|p| rational::qvec(p)).collect();
    convex_hull(&q)
}

impl Polytope {
    fn from_hull(n: usize, points: &[QVec], h: &Hull) -> Polytope {
        let mut vertices: Vec<QVec> = h.vertices.iter().map(|&i| points[i].clone()).collect();
        sort_points(&mut vertices);
        let rep = HalfspaceRep { dim: h.dim, inequalities: h.facets.clone(), equalities: h.equalities.clone() };
        Polytope { ambient_dim: n, vertices, cache: Mutex::new(Some(Arc::new(rep))) }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    /// Vertices in lexicographic order.
    pub fn vertices(&self) -> &[QVec] {
        &self.vertices
    }

    /// Vertices as integers, if the polytope is integral.
    pub fn integer_vertices(&self) -> Option<Vec<Vec<i64>>> {
        self.vertices.iter().map(|v| rational::qvec_to_i64(v)).collect()
    }

    pub fn is_integral(&self) -> bool {
        self.vertices.iter().all(|v| v.iter().all(|x| x.is_integer()))
    }

    /// Halfspace representation (memoized).
    pub fn halfspaces(&self) -> Arc<HalfspaceRep> {
        let mut guard = self.cache.lock().unwrap();
        if let Some(rep) = guard.as_ref() {
            return rep.clone();
        }
        let h = hull::hull(&self.vertices);
        let rep = Arc::new(HalfspaceRep { dim: h.dim, inequalities: h.facets, equalities: h.equalities });
        *guard = Some(rep.clone());
        rep
    }

    /// Affine dimension.
    pub fn dim(&self) -> usize {
        self.halfspaces().dim
    }

    /// Exact membership test.
    pub fn contains(&self, x: &[Q]) -> bool {
        let rep = self.halfspaces();
        rep.equalities.iter().all(|h| h.value(x).is_zero())
            && rep.inequalities.iter().all(|h| !h.value(x).is_positive())
    }

    /// Support function value and exposed face for direction `omega`.
    pub fn support_data(&self, omega: &[Q]) -> Result<(Q, Face), PolytopeError> {
        if omega.len() != self.ambient_dim {
            return Err(PolytopeError::DimensionMismatch { expected: self.ambient_dim, got: omega.len() });
        }
        let vals: Vec<Q> = self.vertices.iter().map(|v| rational::dot(v, omega)).collect();
        let max = vals.iter().max().unwrap().clone();
        let verts = self
            .vertices
            .iter()
            .zip(&vals)
            .filter(|(_, v)| **v == max)
            .map(|(p, _)| p.clone())
            .collect();
        Ok((max, Face { direction: omega.to_vec(), vertices: verts }))
    }

    /// Support function `h_P(omega)`.
    pub fn support_value(&self, omega: &[Q]) -> Q {
        self.vertices.iter().map(|v| rational::dot(v, omega)).max().unwrap()
    }

    /// Minkowski sum with another polytope.
    pub fn minkowski_sum(&self, other: &Polytope) -> Result<Polytope, PolytopeError> {
        if other.ambient_dim != self.ambient_dim {
            return Err(PolytopeError::DimensionMismatch { expected: self.ambient_dim, got: other.ambient_dim });
        }
        let mut pts = Vec::with_capacity(self.vertices.len() * other.vertices.len());
        for p in &self.vertices {
            for q in &other.vertices {
                pts.push(rational::add(p, q));
            }
        }
        convex_hull(&pts)
    }

    /// Integer dilate `k P`.
    pub fn dilate(&self, k: i64) -> Polytope {
        let s = qi(k);
        let pts: Vec<QVec> = self.vertices.iter().map(|v| rational::scale(v, &s)).collect();
        convex_hull(&pts).unwrap()
    }

    /// Euclidean volume in the ambient space (zero if not full-dimensional).
    pub fn volume(&self) -> Q {
        hull::volume(&self.vertices)
    }

    /// Integer bounding box of the polytope.
    pub fn bounding_box(&self) -> (Vec<i64>, Vec<i64>) {
        let n = self.ambient_dim;
        let mut lo = vec![i64::MAX; n];
        let mut hi = vec![i64::MIN; n];
        for v in &self.vertices {
            for i in 0..n {
                let f: i64 = v[i].floor().to_integer().try_into().unwrap();
                let c: i64 = v[i].ceil().to_integer().try_into().unwrap();
                lo[i] = lo[i].min(f);
                hi[i] = hi[i].max(c);
            }
        }
        (lo, hi)
    }

    /// All lattice points of the polytope (boundary inclusive).
    pub fn lattice_points(&self) -> Vec<Vec<i64>> {
        let (lo, hi) = self.bounding_box();
        let rep = self.halfspaces();
        let mut out = Vec::new();
        let n = self.ambient_dim;
        let mut cur = lo.clone();
        loop {
            let x = rational::qvec(&cur);
            if rep.equalities.iter().all(|h| h.value(&x).is_zero())
                && rep.inequalities.iter().all(|h| !h.value(&x).is_positive())
            {
                out.push(cur.clone());
            }
            let mut i = 0;
            loop {
                if i == n {
                    return out;
                }
                cur[i] += 1;
                if cur[i] <= hi[i] {
                    break;
                }
                cur[i] = lo[i];
                i += 1;
            }
        }
    }

    /// Whether every vertex has the same coordinate sum.
    pub fn is_homogeneous(&self) -> bool {
        let s: Vec<Q> = self.vertices.iter().map(|v| v.iter().sum()).collect();
        s.windows(2).all(|w| w[0] == w[1])
    }

    /// Degree `h_P(1, ..., 1)`.
    pub fn degree(&self) -> Q {
        self.support_value(&vec![qi(1); self.ambient_dim])
    }

    /// Vertices as floating-point vectors (for display).
    pub fn vertices_f64(&self) -> Vec<Vec<f64>> {
        self.vertices.iter().map(|v| v.iter().map(q_to_f64).collect()).collect()
    }
}

impl Serialize for Polytope {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let v: Vec<Vec<String>> = self.vertices.iter().map(|p| p.iter().map(|x| x.to_string()).collect()).collect();
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Polytope {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v: Vec<Vec<String>> = Vec::deserialize(d)?;
        let pts: Result<Vec<QVec>, _> = v
            .iter()
            .map(|p| p.iter().map(|x| x.parse::<Q>()).collect::<Result<QVec, _>>())
            .collect();
        let pts = pts.map_err(serde::de::Error::custom)?;
        convex_hull(&pts).map_err(serde::de::Error::custom)
    }
}

/// The affine constraint satisfied by Newton polytopes of invariants that
/// are homogeneous of degree `big_d` in the coefficients of polynomials with
/// support `A` (columns, all of coordinate sum `d`) and invariant under
/// scaling and permuting the variables: `(A; 1) p = (dD/n, ..., dD/n, D)`.
pub fn invariant_constraint(a: &[Vec<i64>], d: i64, big_d: i64) -> Result<(Vec<QVec>, QVec), PolytopeError> {
    let n = a.len();
    let m = a[0].len();
    for col in 0..m {
        let s: i64 = (0..n).map(|r| a[r][col]).sum();
        if s != d {
            return Err(PolytopeError::NonUniformDegree { column: col, expected: d, got: s });
        }
    }
    let mut mat: Vec<QVec> = a.iter().map(|r| rational::qvec(r)).collect();
    mat.push(vec![qi(1); m]);
    let h = Q::new(BigInt::from(d * big_d), BigInt::from(n as i64));
    let mut rhs = vec![h; n];
    rhs.push(qi(big_d));
    Ok((mat, rhs))
}

/// Check whether an integer point satisfies an affine constraint system.
pub fn satisfies_constraint(mat: &[QVec], rhs: &[Q], p: &[i64]) -> bool {
    let x = rational::qvec(p);
    mat.iter().zip(rhs).all(|(row, r)| &rational::dot(row, &x) == r)
}

/// Rank of the vertex differences — the dimension of a point configuration.
pub fn affine_dimension(points: &[QVec]) -> usize {
    if points.is_empty() {
        return 0;
    }
    let diffs: Vec<QVec> = points[1..].iter().map(|p| rational::sub(p, &points[0])).collect();
    if diffs.is_empty() {
        0
    } else {
        rational::rank(&diffs)
    }
}
