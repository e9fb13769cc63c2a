//! Witness sets of positive-dimensional varieties: construction, moving
//! slices, pseudo-witness sets of coordinate projections, centroids and the
//! trace test.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::poly::{SparsePoly, SparseSystem, Term, C64};
use crate::tracker::{self, gamma_homotopy, track_all, Homotopy, HomotopyEval, SolveReport, TrackerConfig};

/// Witness points closer than this (max-norm) are identified.
pub const POINT_RADIUS: f64 = 1e-6;

/// Default collinearity threshold of the trace test.
pub const TRACE_TOL: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WitnessError {
    #[error("expected {expected} equations in {nvars} variables for dimension {dim}")]
    DimensionMismatch { expected: usize, nvars: usize, dim: usize },
    #[error("moving the slice lost points: {got} of {expected} arrived")]
    CardinalityDrop { expected: usize, got: usize },
    #[error("every path diverged")]
    AllPathsDiverged,
    #[error("no witness points")]
    Empty,
}

/// `m` affine-linear forms `a_0 + a_1 x_1 + ... + a_n x_n`, one row each.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearSlice {
    pub rows: Vec<Vec<C64>>,
}

impl LinearSlice {
    /// `m` forms in `n` variables with random unit-modulus coefficients.
    pub fn random(n: usize, m: usize, seed: u64) -> LinearSlice {
        Self::random_in(n, &(0..n).collect::<Vec<_>>(), m, seed)
    }

    /// Random forms involving only the coordinates `coords`.
    pub fn random_in(n: usize, coords: &[usize], m: usize, seed: u64) -> LinearSlice {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rows = (0..m)
            .map(|_| {
                let mut row = vec![C64::new(0.0, 0.0); n + 1];
                row[0] = tracker::random_unit(&mut rng);
                for &j in coords {
                    row[j + 1] = tracker::random_unit(&mut rng);
                }
                row
            })
            .collect();
        LinearSlice { rows }
    }

    pub fn codim(&self) -> usize {
        self.rows.len()
    }

    pub fn nvars(&self) -> usize {
        self.rows.first().map_or(0, |r| r.len() - 1)
    }

    pub fn polys(&self) -> Vec<SparsePoly> {
        let n = self.nvars();
        self.rows
            .iter()
            .map(|row| {
                let terms = row
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| c.norm() != 0.0)
                    .map(|(j, c)| {
                        let mut e = vec![0; n];
                        if j > 0 {
                            e[j - 1] = 1;
                        }
                        Term { exponent: e, coeff: *c }
                    })
                    .collect();
                SparsePoly::new(n, terms).expect("dimension")
            })
            .collect()
    }

    pub fn eval(&self, x: &[C64]) -> Vec<C64> {
        self.rows.iter().map(|r| r[0] + r[1..].iter().zip(x).map(|(a, b)| a * b).sum::<C64>()).collect()
    }

    /// `self + t v`, row by row.
    pub fn shifted(&self, v: &LinearSlice, t: C64) -> LinearSlice {
        LinearSlice {
            rows: self.rows.iter().zip(&v.rows).map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + t * y).collect()).collect(),
        }
    }
}

/// A witness set `(F, L, S)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WitnessData {
    pub equations: SparseSystem,
    pub slice: LinearSlice,
    pub points: Vec<Vec<C64>>,
}

impl WitnessData {
    pub fn dim(&self) -> usize {
        self.slice.codim()
    }

    pub fn nvars(&self) -> usize {
        self.equations.nvars()
    }

    pub fn degree(&self) -> usize {
        self.points.len()
    }

    /// The square system `[F | L]`.
    pub fn square_system(&self) -> SparseSystem {
        square(&self.equations, &self.slice)
    }

    pub fn residuals(&self) -> Vec<f64> {
        let s = self.square_system();
        self.points.iter().map(|x| s.residual(x)).collect()
    }

    /// Coordinate-wise mean of the given points (all points if `None`).
    pub fn centroid(&self, subset: Option<&[usize]>) -> Vec<C64> {
        match subset {
            Some(idx) => centroid(&idx.iter().map(|&i| self.points[i].clone()).collect::<Vec<_>>()),
            None => centroid(&self.points),
        }
    }

    /// Move the first slice form into the equations: a witness set of the
    /// variety cut by that hyperplane, with the same points.
    pub fn slice_down(&self) -> WitnessData {
        let mut eqs = self.equations.polys.clone();
        let mut rows = self.slice.rows.clone();
        let first = LinearSlice { rows: vec![rows.remove(0)] };
        eqs.extend(first.polys());
        WitnessData {
            equations: SparseSystem::new(eqs).expect("uniform"),
            slice: LinearSlice { rows },
            points: self.points.clone(),
        }
    }
}

fn square(f: &SparseSystem, l: &LinearSlice) -> SparseSystem {
    let mut polys = f.polys.clone();
    polys.extend(l.polys());
    SparseSystem::new(polys).expect("uniform")
}

pub fn centroid(points: &[Vec<C64>]) -> Vec<C64> {
    let n = points.first().map_or(0, |p| p.len());
    let k = points.len() as f64;
    (0..n).map(|j| points.iter().map(|p| p[j]).sum::<C64>() / k).collect()
}

/// Finite, distinct endpoints satisfying `sys`.
fn accept_points(sys: &SparseSystem, rep: &SolveReport, cfg: &TrackerConfig) -> Vec<Vec<C64>> {
    let pts: Vec<Vec<C64>> = rep
        .solutions()
        .into_iter()
        .filter(|x| tracker::max_norm(x) < cfg.divergence_bound && sys.residual(x) < 1e-6 * (1.0 + tracker::max_norm(x)))
        .collect();
    tracker::dedup_points(&pts, POINT_RADIUS)
}

/// A witness set for the `m`-dimensional part of `V(F)`: `m` random slices,
/// then a Bezout solve of the square system.
pub fn witness_construct(f: &SparseSystem, m: usize, cfg: &TrackerConfig) -> Result<WitnessData, WitnessError> {
    let n = f.nvars();
    if f.len() + m != n {
        return Err(WitnessError::DimensionMismatch { expected: n - m.min(n), nvars: n, dim: m });
    }
    let slice = LinearSlice::random(n, m, cfg.seed ^ 0x511ce);
    witness_with_slice(f, slice, cfg)
}

/// The finite points of `V(F) ∩ V(L)` for a given slice, by the Bezout
/// homotopy. The slice need not be generic.
pub fn witness_with_slice(f: &SparseSystem, slice: LinearSlice, cfg: &TrackerConfig) -> Result<WitnessData, WitnessError> {
    let sys = square(f, &slice);
    let rep = tracker::bezout_solve(&sys, cfg);
    let points = accept_points(&sys, &rep, cfg);
    Ok(WitnessData { equations: f.clone(), slice, points })
}

/// Track the witness points to a new slice by the gamma trick.
pub fn move_witness(w: &WitnessData, l_new: &LinearSlice, cfg: &TrackerConfig) -> Result<WitnessData, WitnessError> {
    let (moved, _) = move_points(w, l_new, cfg);
    if moved.points.len() < w.points.len() {
        return Err(WitnessError::CardinalityDrop { expected: w.points.len(), got: moved.points.len() });
    }
    Ok(moved)
}

/// Move without the cardinality check; also returns the path report.
fn move_points(w: &WitnessData, l_new: &LinearSlice, cfg: &TrackerConfig) -> (WitnessData, SolveReport) {
    let target = square(&w.equations, l_new);
    let h = gamma_homotopy(&target, &w.square_system(), cfg.seed.wrapping_add(0x3c));
    let rep = track_all(&h, &w.points, cfg);
    let points = accept_points(&target, &rep, cfg);
    (WitnessData { equations: w.equations.clone(), slice: l_new.clone(), points }, rep)
}

/// A pseudo-witness set for the projection onto `coords`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PseudoWitnessData {
    pub equations: SparseSystem,
    /// The kept coordinates of the projection.
    pub coords: Vec<usize>,
    /// Pullback of a slice of the image: involves only `coords`.
    pub slice: LinearSlice,
    pub points: Vec<Vec<C64>>,
    /// Paths that diverged while the slice was deformed.
    pub diverged: usize,
}

impl PseudoWitnessData {
    pub fn project(&self, x: &[C64]) -> Vec<C64> {
        self.coords.iter().map(|&j| x[j]).collect()
    }

    /// Distinct images of the points: a witness set of the image.
    pub fn image_points(&self) -> Vec<Vec<C64>> {
        tracker::dedup_points(&self.points.iter().map(|x| self.project(x)).collect::<Vec<_>>(), POINT_RADIUS)
    }

    /// `|S| / d` for a projection of fiber degree `d`.
    pub fn image_degree(&self) -> usize {
        self.image_points().len()
    }

    pub fn fiber_degree(&self) -> usize {
        self.points.len() / self.image_degree().max(1)
    }

    pub fn as_witness(&self) -> WitnessData {
        WitnessData { equations: self.equations.clone(), slice: self.slice.clone(), points: self.points.clone() }
    }
}

/// Deform the witness slice to one pulled back from the coordinates
/// `keep`; points that run off to infinity are counted.
pub fn pseudo_witness(w: &WitnessData, keep: &[usize], cfg: &TrackerConfig) -> Result<PseudoWitnessData, WitnessError> {
    let n = w.nvars();
    if keep.len() == n {
        return Ok(PseudoWitnessData {
            equations: w.equations.clone(),
            coords: keep.to_vec(),
            slice: w.slice.clone(),
            points: w.points.clone(),
            diverged: 0,
        });
    }
    let slice = LinearSlice::random_in(n, keep, w.dim(), cfg.seed ^ 0x9e5d0);
    let (moved, _) = move_points(w, &slice, cfg);
    if moved.points.is_empty() {
        return Err(WitnessError::AllPathsDiverged);
    }
    Ok(PseudoWitnessData {
        equations: w.equations.clone(),
        coords: keep.to_vec(),
        slice,
        diverged: w.points.len() - moved.points.len(),
        points: moved.points,
    })
}

/// `[F | L_from + t(L_to - L_from)]` tracked in real `t`, so the points
/// follow the pencil itself (no gamma detour).
struct PencilHomotopy<'a> {
    f: &'a SparseSystem,
    base: &'a LinearSlice,
    dir: &'a LinearSlice,
    from: f64,
    to: f64,
}

impl Homotopy for PencilHomotopy<'_> {
    fn nvars(&self) -> usize {
        self.f.nvars()
    }

    fn evaluate(&self, t: C64, x: &[C64]) -> HomotopyEval {
        // t = 1 at `from`, t = 0 at `to`.
        let s = t * self.from + (C64::new(1.0, 0.0) - t) * self.to;
        let slice = self.base.shifted(self.dir, s);
        let (mut h, jf) = self.f.eval_jac(x);
        let n = x.len();
        let k = self.f.len();
        let mut jx = DMatrix::zeros(n, n);
        jx.rows_mut(0, k).copy_from(&jf);
        h.extend(slice.eval(x));
        let mut dt = vec![C64::new(0.0, 0.0); k];
        let ds = self.from - self.to;
        for (i, (row, drow)) in slice.rows.iter().zip(&self.dir.rows).enumerate() {
            for j in 0..n {
                jx[(k + i, j)] = row[j + 1];
            }
            dt.push((drow[0] + drow[1..].iter().zip(x).map(|(a, b)| a * b).sum::<C64>()) * ds);
        }
        HomotopyEval { h, jx, dt }
    }
}

/// Outcome of the trace test.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TraceTest {
    pub is_complete: bool,
    /// Centroids over the pencil parameters 0, 1/2, 1.
    pub centroids: [Vec<C64>; 3],
    /// `|(p + q)/2 - m|` in max-norm.
    pub deviation: f64,
    /// Always true: a numerical zero test, not a certificate.
    pub heuristic: bool,
}

/// Transport the points of `subset` along a random pencil of translates of
/// the witness slice and test whether their centroid moves affine-linearly.
pub fn trace_test(w: &WitnessData, subset: &[usize], seed: u64, tol: f64, cfg: &TrackerConfig) -> Result<TraceTest, WitnessError> {
    if subset.is_empty() {
        return Err(WitnessError::Empty);
    }
    let n = w.nvars();
    // A pencil translates the slice: only the constant terms move.
    let mut dir = LinearSlice::random(n, w.dim(), seed ^ 0x7ace);
    for row in &mut dir.rows {
        row[1..].iter_mut().for_each(|c| *c = C64::new(0.0, 0.0));
    }
    let pts: Vec<Vec<C64>> = subset.iter().map(|&i| w.points[i].clone()).collect();
    let mut centroids = vec![centroid(&pts)];
    for to in [0.5, 1.0] {
        let h = PencilHomotopy { f: &w.equations, base: &w.slice, dir: &dir, from: 0.0, to };
        let rep = track_all(&h, &pts, cfg);
        let moved = rep.solutions();
        if moved.len() < pts.len() {
            return Err(WitnessError::CardinalityDrop { expected: pts.len(), got: moved.len() });
        }
        centroids.push(centroid(&moved));
    }
    let deviation = (0..n).map(|j| ((centroids[0][j] + centroids[2][j]) / 2.0 - centroids[1][j]).norm()).fold(0.0, f64::max);
    let [c0, c1, c2]: [Vec<C64>; 3] = centroids.try_into().expect("three centroids");
    Ok(TraceTest { is_complete: deviation < tol, centroids: [c0, c1, c2], deviation, heuristic: true })
}

/// Degrees in `x` and `y` of a plane curve `f(x, y)`.
fn bidegree(f: &SparsePoly) -> (i64, i64) {
    let s = f.support();
    (s.iter().map(|a| a[0]).max().unwrap_or(0), s.iter().map(|a| a[1]).max().unwrap_or(0))
}

/// The trace line `y = slope x + intercept` of a plane curve of degree `d`
/// with full support `dΔ_2`, for the pencil of vertical lines:
/// `y = -(c_{(1,d-1)} x + c_{(0,d-1)}) / (d c_{(0,d)})`.
pub fn trace_line(f: &SparsePoly) -> (C64, C64) {
    let d = f.degree();
    let top = f.coeff(&[0, d]) * d as f64;
    (-f.coeff(&[1, d - 1]) / top, -f.coeff(&[0, d - 1]) / top)
}

/// The trace curve of a plane curve for the vertical pencil, nongeneric in
/// general: `sum_i c_{i,e-1} x^i + e y sum_i c_{i,e} x^i` with `e = deg_y f`.
pub fn trace_curve(f: &SparsePoly) -> SparsePoly {
    let (dx, e) = bidegree(f);
    let mut terms = Vec::new();
    for i in 0..=dx {
        let a = f.coeff(&[i, e - 1]);
        if a.norm() != 0.0 {
            terms.push(Term { exponent: vec![i, 0], coeff: a });
        }
        let b = f.coeff(&[i, e]);
        if b.norm() != 0.0 {
            terms.push(Term { exponent: vec![i, 1], coeff: b * e as f64 });
        }
    }
    SparsePoly::new(2, terms).expect("dimension")
}

/// The vertical line `x = t` as a slice of the plane.
pub fn vertical_line(t: C64) -> LinearSlice {
    LinearSlice { rows: vec![vec![-t, C64::new(1.0, 0.0), C64::new(0.0, 0.0)]] }
}
