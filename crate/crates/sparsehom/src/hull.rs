//! Exact convex hulls in any dimension by the double description method.
//!
//! Facets of `conv(S)` are the extreme rays of the cone
//! `{(c, c0) : c0 - <c, p> >= 0 for all p in S}`; the cone is built one
//! constraint at a time with the combinatorial adjacency test, entirely in
//! integer arithmetic. Lower-dimensional point sets are handled by working
//! in a coordinate projection that is injective on their affine hull.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::rational::{self, make_primitive, primitive_integer, Q, QVec};

/// An inequality `<normal, x> <= offset` (or an equation, by context).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Halfspace {
    pub normal: QVec,
    pub offset: Q,
}

impl Halfspace {
    pub fn value(&self, x: &[Q]) -> Q {
        rational::dot(&self.normal, x) - &self.offset
    }
}

/// Facet description of the convex hull of a finite point set.
#[derive(Clone, Debug)]
pub struct Hull {
    /// Affine dimension of the hull.
    pub dim: usize,
    /// Facet inequalities in ambient coordinates.
    pub facets: Vec<Halfspace>,
    /// Equations cutting out the affine hull.
    pub equalities: Vec<Halfspace>,
    /// Indices of input points that are vertices (first copy of duplicates).
    pub vertices: Vec<usize>,
    /// For each facet, the input points (deduplicated) lying on it.
    pub facet_points: Vec<Vec<usize>>,
}

impl Hull {
    pub fn contains(&self, x: &[Q]) -> bool {
        self.equalities.iter().all(|h| h.value(x).is_zero())
            && self.facets.iter().all(|h| !h.value(x).is_positive())
    }
}

#[derive(Clone)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64).max(1)])
    }
    fn set(&mut self, i: usize) {
        let w = i / 64;
        if w >= self.0.len() {
            self.0.resize(w + 1, 0);
        }
        self.0[w] |= 1 << (i % 64);
    }
    fn and(&self, o: &Bits) -> Bits {
        Bits(self.0.iter().zip(&o.0).map(|(a, b)| a & b).collect())
    }
    fn count(&self) -> u32 {
        self.0.iter().map(|w| w.count_ones()).sum()
    }
    fn contains_all(&self, o: &Bits) -> bool {
        o.0.iter().enumerate().all(|(i, w)| self.0.get(i).copied().unwrap_or(0) & w == *w)
    }
}

/// Extreme rays of `{y : rows[i] . y >= 0}` for a full-rank system whose
/// first `d` rows (d = row length) are linearly independent.
fn double_description(rows: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let d = rows[0].len();
    let nrows = rows.len();
    // Initial cone from the first d rows: rays are the columns of the inverse.
    let m: Vec<QVec> = rows[..d]
        .iter()
        .map(|r| r.iter().map(|x| Q::from_integer(x.clone())).collect())
        .collect();
    let mut rays: Vec<Vec<BigInt>> = Vec::with_capacity(d);
    let mut zeros: Vec<Bits> = Vec::with_capacity(d);
    for j in 0..d {
        let mut e = vec![Q::zero(); d];
        e[j] = Q::from_integer(1.into());
        let col = rational::solve(&m, &e).expect("initial rows independent");
        let ray = primitive_integer(&col);
        let mut z = Bits::new(nrows);
        for (i, r) in rows[..d].iter().enumerate() {
            if rational::idot(r, &ray).is_zero() {
                z.set(i);
            }
        }
        rays.push(ray);
        zeros.push(z);
    }
    let need = d.saturating_sub(2) as u32;
    for (k, a) in rows.iter().enumerate().skip(d) {
        let vals: Vec<BigInt> = rays.iter().map(|r| rational::idot(a, r)).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&i| vals[i].is_positive()).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&i| vals[i].is_negative()).collect();
        if neg.is_empty() {
            for (i, v) in vals.iter().enumerate() {
                if v.is_zero() {
                    zeros[i].set(k);
                }
            }
            continue;
        }
        let mut new_rays = Vec::new();
        let mut new_zeros = Vec::new();
        for &p in &pos {
            for &n in &neg {
                let common = zeros[p].and(&zeros[n]);
                if common.count() < need {
                    continue;
                }
                let adjacent = (0..rays.len())
                    .all(|o| o == p || o == n || !zeros[o].contains_all(&common));
                if !adjacent {
                    continue;
                }
                let vp = &vals[p];
                let vn = -&vals[n];
                let ray: Vec<BigInt> = rays[n]
                    .iter()
                    .zip(&rays[p])
                    .map(|(xn, xp)| vp * xn + &vn * xp)
                    .collect();
                let ray = make_primitive(ray);
                let mut z = common;
                z.set(k);
                new_rays.push(ray);
                new_zeros.push(z);
            }
        }
        let mut kept_rays = Vec::new();
        let mut kept_zeros = Vec::new();
        for i in 0..rays.len() {
            if vals[i].is_negative() {
                continue;
            }
            let mut z = zeros[i].clone();
            if vals[i].is_zero() {
                z.set(k);
            }
            kept_rays.push(rays[i].clone());
            kept_zeros.push(z);
        }
        kept_rays.extend(new_rays);
        kept_zeros.extend(new_zeros);
        rays = kept_rays;
        zeros = kept_zeros;
    }
    rays
}

/// Affine hull data: base point index, pivot coordinates, equations.
struct Affine {
    base: usize,
    coords: Vec<usize>,
    equalities: Vec<Halfspace>,
}

fn affine_hull(points: &[QVec], idx: &[usize]) -> Affine {
    let n = points[idx[0]].len();
    let base = idx[0];
    let diffs: Vec<QVec> = idx[1..].iter().map(|&i| rational::sub(&points[i], &points[base])).collect();
    let mut m = diffs.clone();
    let coords = rational::rref(&mut m);
    let eqs = if diffs.is_empty() {
        (0..n)
            .map(|i| {
                let mut e = vec![Q::zero(); n];
                e[i] = rational::qi(1);
                e
            })
            .collect()
    } else {
        rational::nullspace(&diffs, n)
    };
    let equalities = eqs
        .into_iter()
        .map(|y| {
            let y: QVec = primitive_integer(&y).into_iter().map(Q::from_integer).collect();
            let offset = rational::dot(&y, &points[base]);
            Halfspace { normal: y, offset }
        })
        .collect();
    Affine { base, coords, equalities }
}

/// Exact convex hull of a nonempty list of equal-length rational points.
pub fn hull(points: &[QVec]) -> Hull {
    assert!(!points.is_empty(), "hull of empty point set");
    let n = points[0].len();
    // Deduplicate, keeping first occurrences.
    let mut uniq: Vec<usize> = Vec::new();
    for i in 0..points.len() {
        if !uniq.iter().any(|&j| points[j] == points[i]) {
            uniq.push(i);
        }
    }
    let aff = affine_hull(points, &uniq);
    let k = aff.coords.len();
    if k == 0 {
        return Hull {
            dim: 0,
            facets: vec![],
            equalities: aff.equalities,
            vertices: vec![uniq[0]],
            facet_points: vec![],
        };
    }
    let proj = |i: usize| -> QVec { aff.coords.iter().map(|&c| points[i][c].clone()).collect() };
    // Constraint rows (-p, 1) scaled to integers.
    let row_of = |i: usize| -> Vec<BigInt> {
        let mut r: QVec = proj(i).into_iter().map(|x| -x).collect();
        r.push(rational::qi(1));
        primitive_integer(&r)
    };
    // Choose k+1 affinely independent points first.
    let mut order: Vec<usize> = vec![aff.base];
    let mut basis_rows: Vec<QVec> = Vec::new();
    for &i in &uniq {
        if order.len() == k + 1 {
            break;
        }
        if i == aff.base {
            continue;
        }
        let d = rational::sub(&proj(i), &proj(aff.base));
        let mut trial = basis_rows.clone();
        trial.push(d.clone());
        if rational::rank(&trial) == trial.len() {
            basis_rows.push(d);
            order.push(i);
        }
    }
    for &i in &uniq {
        if !order.contains(&i) {
            order.push(i);
        }
    }
    let rows: Vec<Vec<BigInt>> = order.iter().map(|&i| row_of(i)).collect();
    let rays = double_description(&rows);
    let mut facets = Vec::with_capacity(rays.len());
    let mut facet_points = Vec::with_capacity(rays.len());
    for ray in rays {
        let mut normal = vec![Q::zero(); n];
        for (j, &c) in aff.coords.iter().enumerate() {
            normal[c] = Q::from_integer(ray[j].clone());
        }
        let offset = Q::from_integer(ray[k].clone());
        let h = Halfspace { normal, offset };
        let on: Vec<usize> = uniq.iter().copied().filter(|&i| h.value(&points[i]).is_zero()).collect();
        facets.push(h);
        facet_points.push(on);
    }
    // A point is a vertex when its tight facet normals have rank k.
    let vertices = uniq
        .iter()
        .copied()
        .filter(|&i| {
            let tight: Vec<QVec> = facets
                .iter()
                .zip(&facet_points)
                .filter(|(_, on)| on.contains(&i))
                .map(|(h, _)| aff.coords.iter().map(|&c| h.normal[c].clone()).collect())
                .collect();
            tight.len() >= k && rational::rank(&tight) == k
        })
        .collect();
    Hull { dim: k, facets, equalities: aff.equalities, vertices, facet_points }
}

/// Pulling triangulation of `conv(points[idx])`: simplices as index lists
/// of length `dim + 1`.
pub fn triangulate(points: &[QVec], idx: &[usize]) -> Vec<Vec<usize>> {
    let sub: Vec<QVec> = idx.iter().map(|&i| points[i].clone()).collect();
    let h = hull(&sub);
    if h.dim == 0 {
        return vec![vec![idx[h.vertices[0]]]];
    }
    let verts: Vec<usize> = h.vertices.clone();
    let apex = verts[0];
    let mut out = Vec::new();
    for on in &h.facet_points {
        if on.contains(&apex) {
            continue;
        }
        let fv: Vec<usize> = on.iter().copied().filter(|i| verts.contains(i)).collect();
        let global: Vec<usize> = fv.iter().map(|&i| idx[i]).collect();
        for mut s in triangulate(points, &global) {
            s.push(idx[apex]);
            out.push(s);
        }
    }
    out
}

/// Euclidean volume of `conv(points)` in the ambient space (zero when the
/// hull is not full-dimensional).
pub fn volume(points: &[QVec]) -> Q {
    let n = points[0].len();
    let h = hull(points);
    if h.dim < n {
        return Q::zero();
    }
    let verts = h.vertices.clone();
    let simplices = triangulate(points, &verts);
    let mut total = Q::zero();
    for s in simplices {
        let base = &points[s[0]];
        let m: Vec<QVec> = s[1..].iter().map(|&i| rational::sub(&points[i], base)).collect();
        total += rational::det(&m).abs();
    }
    total / rational::factorial(n)
}
