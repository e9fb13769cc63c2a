//! A numerical oracle for the Newton polytope of a hypersurface, read off
//! from the limits of witness points on the lines `s -> t^w (a s - b)` as
//! `t` grows; recovery of an integral polytope from a vertex oracle;
//! tropical membership through coordinate projections; and the
//! convergence-rate bound of the oracle's paths.

use std::collections::BTreeSet;

use nalgebra::{DMatrix, DVector};
use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ddouble::{self, CDD};
use crate::intlin::{ChangeDirection, IntLinError, MonomialChange};
use crate::poly::{SparsePoly, SparseSystem, Term, C64};
use crate::polytope::{self, Polytope, PolytopeError};
use crate::rational::{self, Q, QVec};
use crate::tracker::{self, Homotopy, HomotopyEval, TrackError, TrackerConfig};
use crate::witness::{self, LinearSlice, PseudoWitnessData, WitnessError};

#[derive(Debug, Error, Clone)]
pub enum OracleError {
    #[error(transparent)]
    Witness(#[from] WitnessError),
    #[error(transparent)]
    IntLin(#[from] IntLinError),
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
    #[error("expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("direction has a non-finite entry")]
    NonFiniteDirection,
    #[error("no witness points on the first line")]
    Empty,
    #[error("{undecided} paths undecided after the maximal number of probes")]
    MaxTracksReached { undecided: usize, report: Box<QueryReport> },
    #[error("oracle answer contradicts earlier answers: {0}")]
    OracleInconsistent(String),
    #[error("query budget exhausted")]
    QueryBudget,
}

/// Knobs of a query. Defaults: certainty 6, epsilon 0.05, `t <- 1.25 t`,
/// at most 400 probes, targets the `n`-th roots of unity.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OracleOptions {
    /// A path has converged once its derivative in `log t` (chordal metric
    /// on the Riemann sphere) stays below `10^-certainty` for two probes.
    pub certainty: i32,
    /// Radius around a target that counts as convergence to it.
    pub epsilon: f64,
    /// First probe at which convergence is monitored.
    pub min_tracks: usize,
    pub max_tracks: usize,
    /// `t` is multiplied by this between probes.
    pub step_resolution: f64,
    /// Chordal movement on the first probe below which a path is stationary.
    pub stationary_tol: f64,
    /// Targets `rho_i = b_i / a_i`.
    pub targets: Option<Vec<C64>>,
    /// The anchors `a`; random of unit modulus by default.
    pub anchors: Option<Vec<C64>>,
    /// Keep `(t, s(t))` at every probe.
    pub record_paths: bool,
    pub seed: u64,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions {
            certainty: 6,
            epsilon: 0.05,
            min_tracks: 2,
            max_tracks: 400,
            step_resolution: 1.25,
            stationary_tol: 1e-9,
            targets: None,
            anchors: None,
            record_paths: false,
            seed: 0,
        }
    }
}

/// Witness data of a hypersurface `H` in `C^n` (possibly the image of a
/// coordinate projection) moved onto the line `L_1 : s -> a s - b`. Built
/// once, reused by every query.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OracleSetup {
    /// Equations upstream of the projection.
    pub equations: SparseSystem,
    /// The coordinates kept by the projection.
    pub coords: Vec<usize>,
    pub a: Vec<C64>,
    pub b: Vec<C64>,
    pub targets: Vec<C64>,
    /// One upstream point per point of `H ∩ L_1`, with `s` appended.
    pub starts: Vec<Vec<C64>>,
    /// Upstream points per image point.
    pub fiber_degree: usize,
    pub options: OracleOptions,
    pub tracker: TrackerConfig,
}

fn roots_of_unity(n: usize) -> Vec<C64> {
    (0..n).map(|k| C64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / n as f64)).collect()
}

impl OracleSetup {
    /// The degree `d` of the hypersurface.
    pub fn degree(&self) -> usize {
        self.starts.len()
    }

    /// Dimension `n` of the ambient space of the hypersurface.
    pub fn n(&self) -> usize {
        self.coords.len()
    }

    fn anchors(n: usize, options: &OracleOptions) -> Result<(Vec<C64>, Vec<C64>, Vec<C64>), OracleError> {
        let targets = options.targets.clone().unwrap_or_else(|| roots_of_unity(n));
        let a = match &options.anchors {
            Some(a) => a.clone(),
            None => {
                let mut rng = ChaCha8Rng::seed_from_u64(options.seed ^ 0xa4c4);
                (0..n).map(|_| tracker::random_unit(&mut rng)).collect()
            }
        };
        if targets.len() != n || a.len() != n {
            return Err(OracleError::DimensionMismatch { expected: n, got: targets.len().min(a.len()) });
        }
        let b = a.iter().zip(&targets).map(|(ai, r)| ai * r).collect();
        Ok((a, b, targets))
    }

    /// The slice of the upstream space cut out by `x_J ∈ L_1`.
    fn line_slice(nvars: usize, coords: &[usize], a: &[C64], b: &[C64]) -> LinearSlice {
        let rows = (1..coords.len())
            .map(|i| {
                let mut row = vec![C64::new(0.0, 0.0); nvars + 1];
                row[0] = b[i] / a[i] - b[0] / a[0];
                row[coords[i] + 1] += 1.0 / a[i];
                row[coords[0] + 1] -= 1.0 / a[0];
                row
            })
            .collect();
        LinearSlice { rows }
    }

    /// Setup for `V(f)` itself: its points on `L_1` by a Bezout solve.
    pub fn from_hypersurface(f: &SparsePoly, options: OracleOptions, cfg: &TrackerConfig) -> Result<OracleSetup, OracleError> {
        let n = f.nvars();
        let coords: Vec<usize> = (0..n).collect();
        let (a, b, targets) = Self::anchors(n, &options)?;
        let eqs = SparseSystem::new(vec![f.clone()]).expect("one polynomial");
        let slice = Self::line_slice(n, &coords, &a, &b);
        let w = witness::witness_with_slice(&eqs, slice, cfg)?;
        Self::finish(eqs, coords, w.points, a, b, targets, options, cfg)
    }

    /// Setup for the image of a projection, from its pseudo-witness set.
    pub fn from_pseudo_witness(pw: &PseudoWitnessData, options: OracleOptions, cfg: &TrackerConfig) -> Result<OracleSetup, OracleError> {
        let n = pw.coords.len();
        if pw.slice.codim() + 1 != n {
            return Err(OracleError::DimensionMismatch { expected: n - 1, got: pw.slice.codim() });
        }
        let (a, b, targets) = Self::anchors(n, &options)?;
        let slice = Self::line_slice(pw.equations.nvars(), &pw.coords, &a, &b);
        let moved = witness::move_witness(&pw.as_witness(), &slice, cfg)?;
        Self::finish(pw.equations.clone(), pw.coords.clone(), moved.points, a, b, targets, options, cfg)
    }

    #[allow(clippy::too_many_arguments)]
    fn finish(
        equations: SparseSystem,
        coords: Vec<usize>,
        points: Vec<Vec<C64>>,
        a: Vec<C64>,
        b: Vec<C64>,
        targets: Vec<C64>,
        options: OracleOptions,
        cfg: &TrackerConfig,
    ) -> Result<OracleSetup, OracleError> {
        if points.is_empty() {
            return Err(OracleError::Empty);
        }
        let mut images: Vec<Vec<C64>> = Vec::new();
        let mut starts = Vec::new();
        for x in &points {
            let img: Vec<C64> = coords.iter().map(|&j| x[j]).collect();
            if images.iter().any(|q| tracker::max_norm(&diff(q, &img)) < witness::POINT_RADIUS) {
                continue;
            }
            images.push(img);
            let mut y = x.clone();
            y.push((x[coords[0]] + b[0]) / a[0]);
            starts.push(y);
        }
        let fiber_degree = points.len() / starts.len();
        Ok(OracleSetup { equations, coords, a, b, targets, starts, fiber_degree, options, tracker: cfg.clone() })
    }

    /// The `s`-coordinates of the points of `H ∩ L_1`.
    pub fn start_parameters(&self) -> Vec<C64> {
        let k = self.equations.nvars();
        self.starts.iter().map(|y| y[k]).collect()
    }
}

fn diff(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Where a path of a query ended up.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum PathFate {
    /// Converged to the target `rho_i`.
    Target(usize),
    Infinity,
    /// Converged to a point that is not a target.
    Elsewhere,
    Undecided,
    Failed,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PathRecord {
    pub fate: PathFate,
    /// `s` at the last probe.
    pub last: C64,
    /// `t` at which the fate was decided.
    pub decided_at: f64,
    /// `(t, s(t))` per probe, when recording.
    pub trace: Vec<(f64, C64)>,
}

/// The numerical oracle's answer for the homogenized Newton polytope.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum OracleAnswer {
    /// The direction exposes the entire polytope.
    Eep,
    /// `(beta_1, ..., beta_n, beta_inf)`.
    Beta(Vec<usize>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnswerKind {
    Vertex,
    Face,
    #[serde(rename = "EEP")]
    Eep,
}

impl OracleAnswer {
    pub fn total(&self) -> Option<usize> {
        match self {
            OracleAnswer::Eep => None,
            OracleAnswer::Beta(b) => Some(b.iter().sum()),
        }
    }

    /// A vertex exactly when `|beta| = d`.
    pub fn kind(&self, degree: usize) -> AnswerKind {
        match self.total() {
            None => AnswerKind::Eep,
            Some(t) if t == degree => AnswerKind::Vertex,
            Some(_) => AnswerKind::Face,
        }
    }

    /// The vertex of the (dehomogenized) Newton polytope, if exposed.
    pub fn vertex(&self, degree: usize) -> Option<Vec<i64>> {
        match self {
            OracleAnswer::Beta(b) if self.kind(degree) == AnswerKind::Vertex => Some(b[..b.len() - 1].iter().map(|&v| v as i64).collect()),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QueryReport {
    pub omega: Vec<f64>,
    pub degree: usize,
    pub answer: OracleAnswer,
    pub undecided: usize,
    /// Paths that converged away from every target (excluded from beta).
    pub elsewhere: usize,
    /// Largest probe index reached.
    pub probes: usize,
    pub paths: Vec<PathRecord>,
}

impl QueryReport {
    pub fn kind(&self) -> AnswerKind {
        self.answer.kind(self.degree)
    }
}

/// One stretch `u0 -> u0 + du` of `u = log t` for a single path, in
/// coordinates scaled by the path's current magnitudes so that every
/// unknown is of unit size: `x_j = e^{l_j} z_j`, `s = c + S s'` with `c` the
/// target the path is close to (or 0). Each equation is divided by its
/// largest coefficient, all computed in logarithms.
struct Stretch {
    eqs: SparseSystem,
    lines: Vec<LineRow>,
    nx: usize,
}

/// `cz z_col - exp(rate (1 - tau)) (a s' - b)`.
struct LineRow {
    col: usize,
    cz: f64,
    a: C64,
    b: C64,
    rate: f64,
}

impl Homotopy for Stretch {
    fn nvars(&self) -> usize {
        self.nx + 1
    }

    fn evaluate(&self, t: C64, y: &[C64]) -> HomotopyEval {
        let nx = self.nx;
        let (mut h, jf) = self.eqs.eval_jac(&y[..nx]);
        let k = h.len();
        let mut jx = DMatrix::zeros(nx + 1, nx + 1);
        jx.view_mut((0, 0), (k, nx)).copy_from(&jf);
        let mut dt = vec![C64::new(0.0, 0.0); k];
        for (i, r) in self.lines.iter().enumerate() {
            let e = ((C64::new(1.0, 0.0) - t) * r.rate).exp();
            let lin = r.a * y[nx] - r.b;
            h.push(r.cz * y[r.col] - e * lin);
            jx[(k + i, r.col)] = C64::new(r.cz, 0.0);
            jx[(k + i, nx)] = -e * r.a;
            dt.push(r.rate * e * lin);
        }
        HomotopyEval { h, jx, dt }
    }
}

impl Stretch {
    /// Residual at real `tau` in double-double arithmetic.
    fn accurate_residual(&self, tau: f64, y: &[C64]) -> Vec<C64> {
        let nx = self.nx;
        let mut h: Vec<C64> = self.eqs.polys.iter().map(|f| ddouble::eval_compensated(f, &y[..nx]).to_c64()).collect();
        for r in &self.lines {
            let e = (r.rate * (1.0 - tau)).exp();
            let v = CDD::new(C64::new(r.cz, 0.0)) * CDD::new(y[r.col]) - CDD::new(r.a * e) * CDD::new(y[nx]) + CDD::new(r.b * e);
            h.push(v.to_c64());
        }
        h
    }

    /// Newton at real `tau` on the accurate residual (iterative
    /// refinement); returns the point and the last residual norm.
    fn refine_accurate(&self, tau: f64, y: DVector<C64>, iters: usize) -> Option<(DVector<C64>, f64)> {
        let mut y = y;
        let mut res = f64::INFINITY;
        for _ in 0..iters {
            let r = self.accurate_residual(tau, y.as_slice());
            res = r.iter().fold(0.0, |m, v| m.max(v.norm()));
            let jx = self.evaluate(C64::new(tau, 0.0), y.as_slice()).jx;
            let dx = jx.lu().solve(&DVector::from_vec(r))?;
            if !dx.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
                return None;
            }
            y -= &dx;
            if dx.camax() <= 1e-15 * (1.0 + y.camax()) {
                break;
            }
        }
        Some((y, res))
    }
}

/// `(log |v|, v / |v|)`, with `(0, 0)` for zero.
fn polar(v: C64) -> (f64, C64) {
    let m = v.norm();
    if m > 0.0 && m.is_finite() {
        (m.ln(), v / m)
    } else {
        (0.0, C64::new(0.0, 0.0))
    }
}

/// A point `s = c + e^l z` on the line parameter, `|z| = 1`, where `c` is
/// the target `anchor` or 0. Anchoring keeps full relative precision in
/// `s - rho` as a path converges to a target.
#[derive(Clone, Copy, Debug)]
struct Param {
    anchor: Option<usize>,
    l: f64,
    z: C64,
}

impl Param {
    fn new(s: C64) -> Param {
        let (l, z) = polar(s);
        Param { anchor: None, l, z }
    }

    fn value(&self, targets: &[C64]) -> C64 {
        let c = self.anchor.map_or(C64::new(0.0, 0.0), |k| targets[k]);
        c + self.z * self.l.exp()
    }

    /// `(log |s|, arg s)`.
    fn log_polar(&self, targets: &[C64]) -> (f64, f64) {
        match self.anchor {
            None => (self.l, self.z.arg()),
            Some(_) => {
                let v = self.value(targets);
                (v.norm().ln(), v.arg())
            }
        }
    }

    /// Point on the Riemann sphere of radius 1/2, so that Euclidean
    /// distance is the chordal distance.
    fn sphere(&self, targets: &[C64]) -> [f64; 3] {
        let (ls, th) = self.log_polar(targets);
        let r = 0.5 / ls.cosh();
        [r * th.cos(), r * th.sin(), 0.5 * ls.tanh()]
    }

    /// At a target or at infinity to the full range of doubles: the path
    /// has nowhere left to go.
    fn pinned(&self) -> bool {
        match self.anchor {
            Some(_) => self.l < -600.0,
            None => self.l > 600.0,
        }
    }

    /// Re-anchor at the nearest target within `radius`, or drop the anchor.
    fn reanchor(self, targets: &[C64], radius: f64) -> Param {
        match self.anchor {
            Some(_) if self.l < radius.ln() => return self,
            None if self.l > 10.0 => return self,
            _ => {}
        }
        let s = self.value(targets);
        match targets.iter().position(|r| (s - r).norm() < radius) {
            Some(k) => {
                let (l, z) = polar(s - targets[k]);
                Param { anchor: Some(k), l, z }
            }
            None => Param::new(s),
        }
    }
}

/// Chordal distance on the Riemann sphere.
fn chordal(p: &[f64; 3], q: &[f64; 3]) -> f64 {
    p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

/// `log |s_1 - s_0|` for unanchored points.
fn log_gap(p0: &Param, p1: &Param, targets: &[C64]) -> f64 {
    if p0.anchor.is_none() && p1.anchor.is_none() {
        let (hi, lo) = if p1.l >= p0.l { (p1, p0) } else { (p0, p1) };
        hi.l + (hi.z - lo.z * (lo.l - hi.l).exp()).norm().ln()
    } else {
        (p1.value(targets) - p0.value(targets)).norm().ln()
    }
}

/// Path state: `x_j = e^{lx_j} zx_j`.
#[derive(Clone, Debug)]
struct Point {
    lx: Vec<f64>,
    zx: Vec<C64>,
    s: Param,
}

impl Point {
    fn new(y: &[C64]) -> Point {
        let nx = y.len() - 1;
        let (lx, zx) = y[..nx].iter().map(|&v| polar(v)).unzip();
        Point { lx, zx, s: Param::new(y[nx]) }
    }
}

fn build_stretch(setup: &OracleSetup, omega: &[f64], p: &Point, u0: f64, du: f64) -> (Stretch, Vec<C64>, f64) {
    let nx = p.lx.len();
    let lsig = &p.lx;
    let polys = setup
        .equations
        .polys
        .iter()
        .map(|f| {
            let logs: Vec<f64> = f
                .terms()
                .iter()
                .map(|tm| tm.coeff.norm().ln() + tm.exponent.iter().zip(lsig).map(|(&e, l)| e as f64 * l).sum::<f64>())
                .collect();
            let top = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let terms = f
                .terms()
                .iter()
                .zip(&logs)
                .map(|(tm, l)| Term { exponent: tm.exponent.clone(), coeff: (tm.coeff / tm.coeff.norm()) * (l - top).exp() })
                .collect();
            SparsePoly::new(nx, terms).expect("same variables")
        })
        .collect();
    let log_s = match p.s.anchor {
        Some(_) => p.s.l,
        None => p.s.l.max(0.0),
    };
    let c = p.s.anchor.map_or(C64::new(0.0, 0.0), |k| setup.targets[k]);
    let lines = setup
        .coords
        .iter()
        .enumerate()
        .map(|(i, &col)| {
            // a_i (c + S s') - b_i = a_i S s' - (b_i - a_i c)
            let b = if p.s.anchor == Some(i) { C64::new(0.0, 0.0) } else { setup.b[i] - setup.a[i] * c };
            let (la, pa) = polar(setup.a[i]);
            let la = la + log_s;
            let lb = if b.norm() > 0.0 { b.norm().ln() } else { f64::NEG_INFINITY };
            let lw = omega[i] * u0;
            let ln_n = lsig[col].max(lw + la.max(lb));
            LineRow {
                col,
                cz: (lsig[col] - ln_n).exp(),
                a: pa * (lw + la - ln_n).exp(),
                b: b * (lw - ln_n).exp(),
                rate: omega[i] * du,
            }
        })
        .collect();
    let mut y0 = p.zx.clone();
    y0.push(p.s.z * (p.s.l - log_s).exp());
    (Stretch { eqs: SparseSystem::new(polys).expect("uniform"), lines, nx }, y0, log_s)
}

/// Advance one path from `log t = u0` to `u0 + du`.
fn advance(setup: &OracleSetup, omega: &[f64], p: &Point, u0: f64, du: f64) -> Result<Point, TrackError> {
    let wmax = omega.iter().fold(0.0f64, |m, w| m.max(w.abs()));
    // Each piece changes t^w by at most a factor e^{1/2}.
    let base = ((wmax * du) / 0.5).ceil().max(1.0) as usize;
    let mut last_err = TrackError::SingularJacobian { iterate: 0 };
    // Paths sharing their leading asymptotics become numerically coincident
    // and the Jacobian nearly singular; the last attempt accepts a looser
    // correction, which cannot tell such paths apart anyway.
    let loose = TrackerConfig { newton_tol: 1e-6, max_newton: 6, ..setup.tracker.clone() };
    let radius = anchor_radius(&setup.targets);
    let attempts = [(base, Some(&setup.tracker)), (4 * base, Some(&setup.tracker)), (16 * base, Some(&loose)), (16 * base, None)];
    'attempt: for (pieces, cfg) in attempts {
        let mut cur = p.clone();
        for k in 0..pieces {
            cur.s = cur.s.reanchor(&setup.targets, radius);
            if cur.s.pinned() {
                break;
            }
            let u = u0 + du * k as f64 / pieces as f64;
            let (h, y0, log_s) = build_stretch(setup, omega, &cur, u, du / pieces as f64);
            let tracked = match cfg {
                Some(cfg) => tracker::track_regular(&h, &y0, cfg),
                None => Ok(creep(&h, &y0, 8)),
            };
            match tracked.map(|o| o.map(|y| h.refine_accurate(0.0, DVector::from_vec(y.clone()), 2).map_or(y, |r| r.0.as_slice().to_vec()))) {
                Ok(Some(y)) if y.iter().all(|v| v.re.is_finite() && v.im.is_finite()) => {
                    for j in 0..cur.lx.len() {
                        let (l, z) = polar(y[j]);
                        cur.lx[j] += l;
                        cur.zx[j] = z;
                    }
                    let (l, z) = polar(y[cur.lx.len()]);
                    cur.s = Param { anchor: cur.s.anchor, l: log_s + if z.norm() > 0.0 { l } else { -745.0 }, z };
                }
                Ok(_) => continue 'attempt,
                Err(e) => {
                    last_err = e;
                    continue 'attempt;
                }
            }
        }
        cur.s = cur.s.reanchor(&setup.targets, radius);
        return Ok(cur);
    }
    Err(last_err)
}

/// Newton continuation over `stations` equal steps of `tau` on the
/// accurate residual, accepting on the residual alone. Tolerates a
/// numerically multiple root, where Newton contracts only linearly, and
/// Jacobians too ill-conditioned for the tracker's corrector.
fn creep(h: &Stretch, y0: &[C64], stations: usize) -> Option<Vec<C64>> {
    let mut y = DVector::from_column_slice(y0);
    for k in 1..=stations {
        let tau = 1.0 - k as f64 / stations as f64;
        let (ny, res) = h.refine_accurate(tau, y, 60)?;
        if !(res <= 1e-9) {
            return None;
        }
        y = ny;
    }
    Some(y.as_slice().to_vec())
}

/// Anchoring radius: well inside half the separation of the targets.
fn anchor_radius(targets: &[C64]) -> f64 {
    let mut sep = f64::INFINITY;
    for (i, a) in targets.iter().enumerate() {
        for b in &targets[i + 1..] {
            sep = sep.min((a - b).norm());
        }
    }
    (sep / 3.0).min(0.25)
}

struct PathState {
    p: Point,
    /// Chordal movement per unit of `log t`, per probe.
    chordal_rate: Vec<f64>,
    /// `log(|Δs| / Δu)` per probe.
    log_raw_rate: Vec<f64>,
    trace: Vec<(f64, C64)>,
    fate: Option<PathFate>,
    decided_at: f64,
    probes: usize,
}

fn probe(setup: &OracleSetup, omega: &[f64], st: &mut PathState, du: f64) {
    let u0 = du * st.probes as f64;
    match advance(setup, omega, &st.p, u0, du) {
        Ok(next) => {
            let t = &setup.targets;
            st.chordal_rate.push(chordal(&next.s.sphere(t), &st.p.s.sphere(t)) / du);
            st.log_raw_rate.push(log_gap(&st.p.s, &next.s, t) - du.ln());
            st.p = next;
            st.probes += 1;
            if setup.options.record_paths {
                st.trace.push(((du * st.probes as f64).exp(), st.p.s.value(t)));
            }
        }
        Err(_) => {
            st.fate = Some(PathFate::Failed);
            st.decided_at = u0.exp();
        }
    }
}

fn classify(setup: &OracleSetup, s: &Param) -> PathFate {
    let eps = setup.options.epsilon;
    let (ls, _) = s.log_polar(&setup.targets);
    if ls > (1.0 / eps).ln() {
        return PathFate::Infinity;
    }
    let v = s.value(&setup.targets);
    let near = setup.targets.iter().enumerate().map(|(i, r)| (i, (v - r).norm())).min_by(|p, q| p.1.total_cmp(&q.1));
    match (s.anchor, near) {
        (Some(k), _) if s.l < eps.ln() => PathFate::Target(k),
        (_, Some((i, d))) if d < eps => PathFate::Target(i),
        _ => PathFate::Elsewhere,
    }
}

fn run_path(setup: &OracleSetup, omega: &[f64], st: &mut PathState, du: f64) {
    let opts = &setup.options;
    let small = 10f64.powi(-opts.certainty);
    let log_large = opts.certainty as f64 * std::f64::consts::LN_10;
    while st.fate.is_none() {
        if st.probes >= opts.max_tracks {
            st.fate = Some(PathFate::Undecided);
            st.decided_at = (du * st.probes as f64).exp();
            break;
        }
        probe(setup, omega, st, du);
        if st.fate.is_some() {
            break;
        }
        let k = st.chordal_rate.len();
        if st.probes < opts.min_tracks.max(2) || k < 2 {
            continue;
        }
        let t = (du * st.probes as f64).exp();
        let (ls, _) = st.p.s.log_polar(&setup.targets);
        if st.chordal_rate[k - 1] < small && st.chordal_rate[k - 2] < small {
            st.fate = Some(classify(setup, &st.p.s));
            st.decided_at = t;
        } else if ls > log_large && st.log_raw_rate[k - 1] > log_large && st.log_raw_rate[k - 2] > log_large {
            st.fate = Some(PathFate::Infinity);
            st.decided_at = t;
        }
    }
}

/// Query the numerical oracle of the homogenized Newton polytope of `H` in
/// direction `omega`: transport `H ∩ L_1` along `L_t` as `t -> inf` and
/// count the paths converging to each target and to infinity.
pub fn oracle_query(setup: &OracleSetup, omega: &[f64]) -> Result<QueryReport, OracleError> {
    let n = setup.n();
    if omega.len() != n {
        return Err(OracleError::DimensionMismatch { expected: n, got: omega.len() });
    }
    if !omega.iter().all(|w| w.is_finite()) {
        return Err(OracleError::NonFiniteDirection);
    }
    let du = setup.options.step_resolution.ln();
    let mut states: Vec<PathState> = setup
        .starts
        .par_iter()
        .map(|y| {
            let p = Point::new(y);
            let mut st = PathState {
                trace: if setup.options.record_paths { vec![(1.0, p.s.value(&setup.targets))] } else { Vec::new() },
                p,
                chordal_rate: Vec::new(),
                log_raw_rate: Vec::new(),
                fate: None,
                decided_at: 1.0,
                probes: 0,
            };
            probe(setup, omega, &mut st, du);
            st
        })
        .collect();
    let degree = setup.degree();
    let stationary = states.iter().all(|st| st.fate.is_none() && st.chordal_rate[0] * du < setup.options.stationary_tol);
    let targets = &setup.targets;
    if stationary {
        let paths = states
            .into_iter()
            .map(|st| PathRecord { fate: PathFate::Elsewhere, last: st.p.s.value(targets), decided_at: st.decided_at, trace: st.trace })
            .collect();
        return Ok(QueryReport { omega: omega.to_vec(), degree, answer: OracleAnswer::Eep, undecided: 0, elsewhere: 0, probes: 1, paths });
    }
    states.par_iter_mut().for_each(|st| run_path(setup, omega, st, du));
    let mut beta = vec![0usize; n + 1];
    let (mut undecided, mut elsewhere, mut probes) = (0, 0, 0);
    let paths: Vec<PathRecord> = states
        .into_iter()
        .map(|st| {
            let fate = st.fate.unwrap_or(PathFate::Undecided);
            match fate {
                PathFate::Target(i) => beta[i] += 1,
                PathFate::Infinity => beta[n] += 1,
                PathFate::Elsewhere => elsewhere += 1,
                PathFate::Undecided | PathFate::Failed => undecided += 1,
            }
            probes = probes.max(st.probes);
            PathRecord { fate, last: st.p.s.value(targets), decided_at: st.decided_at, trace: st.trace }
        })
        .collect();
    let report = QueryReport { omega: omega.to_vec(), degree, answer: OracleAnswer::Beta(beta), undecided, elsewhere, probes, paths };
    if undecided > 0 {
        return Err(OracleError::MaxTracksReached { undecided, report: Box::new(report) });
    }
    Ok(report)
}
// ---------------------------------------------------------------------------
// Convergence-rate bound

/// Constants of the convergence bound for a path converging to `z`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BoundData {
    /// `h_A(w) - h_{A \ A_w}(w)`.
    pub d_omega: f64,
    /// `max |c_alpha| / |K|`.
    pub c: f64,
    /// Leading coefficient `K` of `g(L_1(s))`, where `f_w = x^m g`.
    pub k_lead: C64,
    /// Coordinate-wise minimum `m` of the exposed support.
    pub m: Vec<i64>,
    /// Roots of `g(L_1(s))` with multiplicities.
    pub taus: Vec<(C64, usize)>,
    pub a_min: f64,
    pub a_max: f64,
    pub gamma_z: f64,
    pub big_gamma_z: f64,
    /// `|A \ A_w|`.
    pub complement: usize,
    /// Total degree of `f`.
    pub degree: usize,
}

impl BoundData {
    /// `t^{-d_w} C |A \ A_w| ((a_max / a_min)(1 + Gamma_z / gamma_z))^d`.
    pub fn value(&self, t: f64) -> f64 {
        let base = self.a_max / self.a_min * (1.0 + self.big_gamma_z / self.gamma_z);
        t.powf(-self.d_omega) * self.c * self.complement as f64 * base.powi(self.degree as i32)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum ConvergenceBound {
    /// `w` exposes the whole support: paths do not move, no bound applies.
    ExposesAll,
    Bound(BoundData),
}

fn upoly_mul(p: &[C64], q: &[C64]) -> Vec<C64> {
    let mut r = vec![C64::new(0.0, 0.0); p.len() + q.len() - 1];
    for (i, a) in p.iter().enumerate() {
        for (j, b) in q.iter().enumerate() {
            r[i + j] += a * b;
        }
    }
    r
}

fn upoly_eval(p: &[C64], x: C64) -> (C64, C64) {
    let mut v = C64::new(0.0, 0.0);
    let mut d = C64::new(0.0, 0.0);
    for c in p.iter().rev() {
        d = d * x + v;
        v = v * x + c;
    }
    (v, d)
}

/// Roots of a univariate polynomial (coefficients in increasing degree),
/// from the companion matrix, polished by Newton's method.
pub fn univariate_roots(p: &[C64]) -> Vec<C64> {
    let scale = p.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut deg = p.len() - 1;
    while deg > 0 && p[deg].norm() <= 1e-14 * scale {
        deg -= 1;
    }
    if deg == 0 {
        return Vec::new();
    }
    let lead = p[deg];
    let mut comp = DMatrix::<C64>::zeros(deg, deg);
    for i in 1..deg {
        comp[(i, i - 1)] = C64::new(1.0, 0.0);
    }
    for i in 0..deg {
        comp[(i, deg - 1)] = -p[i] / lead;
    }
    let eig = comp.eigenvalues().map(|v| v.iter().copied().collect::<Vec<_>>()).unwrap_or_default();
    eig.into_iter()
        .map(|mut r| {
            for _ in 0..3 {
                let (v, d) = upoly_eval(&p[..=deg], r);
                if d.norm() == 0.0 {
                    break;
                }
                let nr = r - v / d;
                if !(nr.re.is_finite() && nr.im.is_finite()) {
                    break;
                }
                r = nr;
            }
            r
        })
        .collect()
}

/// The constants of the convergence bound for the oracle paths of `f`
/// along `s -> t^w (a s - b)` converging to `z`.
pub fn convergence_bound(f: &SparsePoly, omega: &[f64], a: &[C64], b: &[C64], z: C64) -> ConvergenceBound {
    let support = f.support();
    let coeffs = f.coefficients();
    let vals: Vec<f64> = support.iter().map(|al| al.iter().zip(omega).map(|(&e, w)| e as f64 * w).sum()).collect();
    let h = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let tol = 1e-9 * (1.0 + h.abs());
    let exposed: Vec<usize> = (0..support.len()).filter(|&i| vals[i] >= h - tol).collect();
    if exposed.len() == support.len() {
        return ConvergenceBound::ExposesAll;
    }
    let h_c = (0..support.len()).filter(|i| !exposed.contains(i)).map(|i| vals[i]).fold(f64::NEG_INFINITY, f64::max);
    let n = f.nvars();
    let m: Vec<i64> = (0..n).map(|j| exposed.iter().map(|&i| support[i][j]).min().unwrap()).collect();
    // g(L_1(s)) with f_w(L_1) = (a s - b)^m g(L_1).
    let mut g = vec![C64::new(0.0, 0.0)];
    for &i in &exposed {
        let mut term = vec![coeffs[i]];
        for j in 0..n {
            for _ in 0..(support[i][j] - m[j]) {
                term = upoly_mul(&term, &[-b[j], a[j]]);
            }
        }
        if term.len() > g.len() {
            g.resize(term.len(), C64::new(0.0, 0.0));
        }
        for (k, c) in term.into_iter().enumerate() {
            g[k] += c;
        }
    }
    let scale = g.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut deg = g.len() - 1;
    while deg > 0 && g[deg].norm() <= 1e-12 * scale {
        deg -= 1;
    }
    let k_lead = g[deg];
    let mut taus: Vec<(C64, usize)> = Vec::new();
    for r in univariate_roots(&g[..=deg]) {
        match taus.iter_mut().find(|(t, _)| (t - r).norm() < 1e-5 * (1.0 + r.norm())) {
            Some(e) => e.1 += 1,
            None => taus.push((r, 1)),
        }
    }
    let rhos: Vec<C64> = b.iter().zip(a).map(|(bi, ai)| bi / ai).collect();
    let a_min = a.iter().map(|v| v.norm()).fold(1.0, f64::min);
    let a_max = a.iter().map(|v| v.norm()).fold(1.0, f64::max);
    let others = rhos.iter().copied().chain(taus.iter().map(|t| t.0)).filter(|p| (p - z).norm() > 1e-9);
    let gamma_z = others.map(|p| (p - z).norm() / 2.0).fold(a_min, f64::min);
    let big_gamma_z = rhos.iter().map(|r| (z - r).norm()).fold(2.0 / a_max, f64::max);
    let c = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max) / k_lead.norm();
    ConvergenceBound::Bound(BoundData {
        d_omega: h - h_c,
        c,
        k_lead,
        m,
        taus,
        a_min,
        a_max,
        gamma_z,
        big_gamma_z,
        complement: support.len() - exposed.len(),
        degree: f.degree() as usize,
    })
}

// ---------------------------------------------------------------------------
// Tropical membership

/// Monomial change applied before projecting.
#[derive(Clone, Debug)]
pub enum ChangeChoice {
    Identity,
    Supplied(MonomialChange),
    /// Random unimodular, entries in `[-3, 3]`, from the given seed.
    Random(u64),
}

#[derive(Clone, Debug)]
pub enum MembershipMode {
    /// A single equation of a hypersurface.
    Hypersurface,
    /// Any variety, through its coordinate projections.
    General(ChangeChoice),
}

/// A random unimodular matrix with entries in `[-3, 3]`.
pub fn random_unimodular(n: usize, seed: u64) -> MonomialChange {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let phi: Vec<Vec<i64>> = (0..n).map(|_| (0..n).map(|_| rng.gen_range(-3..=3)).collect()).collect();
        let m = MonomialChange::new(phi);
        if m.is_unimodular() {
            return m;
        }
    }
}

/// `f o Phi` with denominators cleared by a monomial.
pub fn compose_monomial(f: &SparsePoly, change: &MonomialChange) -> Result<SparsePoly, OracleError> {
    let g = change.apply_poly(f, ChangeDirection::Push)?;
    let n = g.nvars();
    let low: Vec<i64> = (0..n).map(|j| g.terms().iter().map(|t| t.exponent[j]).min().unwrap_or(0).min(0)).collect();
    Ok(g.map_exponents(n, |e| e.iter().zip(&low).map(|(a, l)| a - l).collect()))
}

fn to_f64_vec(v: &[Q]) -> Vec<f64> {
    v.iter().map(rational::q_to_f64).collect()
}

/// One coordinate projection whose image is a hypersurface.
#[derive(Clone, Debug)]
pub struct ProjectionOracle {
    pub coords: Vec<usize>,
    pub setup: OracleSetup,
}

/// Oracles for every coordinate projection of a variety onto `m + 1`
/// coordinates with hypersurface image, after an optional monomial change.
#[derive(Clone, Debug)]
pub struct MembershipOracle {
    pub change: Option<MonomialChange>,
    pub dim: usize,
    pub projections: Vec<ProjectionOracle>,
    /// Projections whose image is not a hypersurface.
    pub skipped: Vec<Vec<usize>>,
    /// True for the general mode: a positive answer is heuristic.
    pub heuristic: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProjectionAnswer {
    pub coords: Vec<usize>,
    pub member: bool,
    pub report: QueryReport,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MembershipReport {
    pub member: bool,
    /// A `false` is definitive; a `true` from projections is heuristic.
    pub heuristic: bool,
    /// The direction after the change of coordinates.
    pub omega: Vec<f64>,
    pub projections: Vec<ProjectionAnswer>,
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

impl MembershipOracle {
    pub fn new(
        equations: &SparseSystem,
        dim: usize,
        mode: MembershipMode,
        options: &OracleOptions,
        cfg: &TrackerConfig,
    ) -> Result<MembershipOracle, OracleError> {
        let n = equations.nvars();
        match mode {
            MembershipMode::Hypersurface => {
                if equations.len() != 1 || dim + 1 != n {
                    return Err(OracleError::DimensionMismatch { expected: 1, got: equations.len() });
                }
                let setup = OracleSetup::from_hypersurface(&equations.polys[0], options.clone(), cfg)?;
                Ok(MembershipOracle {
                    change: None,
                    dim,
                    projections: vec![ProjectionOracle { coords: (0..n).collect(), setup }],
                    skipped: Vec::new(),
                    heuristic: false,
                })
            }
            MembershipMode::General(choice) => {
                let change = match choice {
                    ChangeChoice::Identity => None,
                    ChangeChoice::Supplied(m) => Some(m),
                    ChangeChoice::Random(seed) => Some(random_unimodular(n, seed)),
                };
                let eqs = match &change {
                    Some(m) => SparseSystem::new(equations.polys.iter().map(|f| compose_monomial(f, m)).collect::<Result<_, _>>()?)
                        .expect("uniform"),
                    None => equations.clone(),
                };
                let w = witness::witness_construct(&eqs, dim, cfg)?;
                let mut projections = Vec::new();
                let mut skipped = Vec::new();
                for coords in subsets(n, dim + 1) {
                    match witness::pseudo_witness(&w, &coords, cfg) {
                        Ok(pw) => {
                            let setup = OracleSetup::from_pseudo_witness(&pw, options.clone(), cfg)?;
                            projections.push(ProjectionOracle { coords, setup });
                        }
                        Err(WitnessError::AllPathsDiverged) => skipped.push(coords),
                        Err(e) => return Err(e.into()),
                    }
                }
                Ok(MembershipOracle { change, dim, projections, skipped, heuristic: true })
            }
        }
    }

    /// Test `omega` (in the original coordinates). Stops at the first
    /// projection answering `false`.
    pub fn query(&self, omega: &[f64]) -> Result<MembershipReport, OracleError> {
        let omega_t = match &self.change {
            Some(m) => {
                let q: Vec<Q> = omega.iter().map(|&w| rational::f64_to_q(w)).collect();
                to_f64_vec(&m.transform_direction(&q, ChangeDirection::Pull)?)
            }
            None => omega.to_vec(),
        };
        let mut answers = Vec::new();
        let mut member = true;
        for p in &self.projections {
            let w: Vec<f64> = p.coords.iter().map(|&j| omega_t[j]).collect();
            let report = oracle_query(&p.setup, &w)?;
            let m = match report.answer.total() {
                None => true,
                Some(t) => t < report.degree,
            };
            answers.push(ProjectionAnswer { coords: p.coords.clone(), member: m, report });
            if !m {
                member = false;
                break;
            }
        }
        Ok(MembershipReport { member, heuristic: self.heuristic && member, omega: omega_t, projections: answers })
    }
}

/// Is `omega` in the tropical variety of `V(equations)` (of dimension `dim`)?
pub fn tropical_membership(
    equations: &SparseSystem,
    dim: usize,
    omega: &[f64],
    mode: MembershipMode,
    options: &OracleOptions,
    cfg: &TrackerConfig,
) -> Result<MembershipReport, OracleError> {
    MembershipOracle::new(equations, dim, mode, options, cfg)?.query(omega)
}

// ---------------------------------------------------------------------------
// Reconstruction from a vertex oracle

/// A vertex oracle answer: the exposed vertex, or "positive-dimensional
/// face exposed".
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum VertexAnswer {
    Vertex(Vec<i64>),
    Pfe,
}

pub trait VertexOracle {
    fn ambient_dim(&self) -> usize;
    fn query(&mut self, omega: &[i64]) -> Result<VertexAnswer, OracleError>;
}

/// Exact vertex oracle of a known integral polytope.
pub struct ExactVertexOracle {
    pub polytope: Polytope,
    pub queries: usize,
}

impl ExactVertexOracle {
    pub fn new(polytope: Polytope) -> ExactVertexOracle {
        ExactVertexOracle { polytope, queries: 0 }
    }
}

impl VertexOracle for ExactVertexOracle {
    fn ambient_dim(&self) -> usize {
        self.polytope.ambient_dim()
    }

    fn query(&mut self, omega: &[i64]) -> Result<VertexAnswer, OracleError> {
        self.queries += 1;
        let (_, face) = self.polytope.support_data(&rational::qvec(omega))?;
        Ok(match face.vertices.as_slice() {
            [v] => VertexAnswer::Vertex(rational::qvec_to_i64(v).ok_or_else(|| OracleError::OracleInconsistent("non-integral vertex".into()))?),
            _ => VertexAnswer::Pfe,
        })
    }
}

/// The HS oracle read as a vertex oracle of the dehomogenized Newton
/// polytope: a vertex exactly when `|beta| = d`.
pub struct HsVertexOracle<'a> {
    pub setup: &'a OracleSetup,
    pub reports: Vec<QueryReport>,
}

impl<'a> HsVertexOracle<'a> {
    pub fn new(setup: &'a OracleSetup) -> Self {
        HsVertexOracle { setup, reports: Vec::new() }
    }
}

impl VertexOracle for HsVertexOracle<'_> {
    fn ambient_dim(&self) -> usize {
        self.setup.n()
    }

    fn query(&mut self, omega: &[i64]) -> Result<VertexAnswer, OracleError> {
        let w: Vec<f64> = omega.iter().map(|&v| v as f64).collect();
        let rep = oracle_query(self.setup, &w)?;
        let ans = match rep.answer.vertex(rep.degree) {
            Some(v) => VertexAnswer::Vertex(v),
            None => VertexAnswer::Pfe,
        };
        self.reports.push(rep);
        Ok(ans)
    }
}

#[derive(Clone, Debug)]
pub struct ReconstructOptions {
    /// Affine constraints `M p = r` known to hold on the polytope.
    pub constraints: Option<(Vec<QVec>, QVec)>,
    /// Optional bound on the coordinate sum.
    pub degree_bound: Option<i64>,
    pub seed: u64,
    pub max_queries: usize,
    /// Random redraws per orthant until a vertex is exposed.
    pub orthant_retries: usize,
}

impl Default for ReconstructOptions {
    fn default() -> Self {
        ReconstructOptions { constraints: None, degree_bound: None, seed: 0, max_queries: 10_000, orthant_retries: 20 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepCase {
    /// An orthant query bounding the polytope.
    Orthant,
    /// The candidate vertex is a vertex.
    Confirmed,
    /// A positive-dimensional face: the candidate is not in the polytope.
    Removed,
    /// Another vertex: a new halfspace cuts the outer polytope.
    Cut,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReconstructStep {
    pub omega: Vec<i64>,
    pub candidate: Option<Vec<i64>>,
    pub answer: VertexAnswer,
    pub case: StepCase,
}

#[derive(Clone, Debug)]
pub struct Reconstruction {
    pub polytope: Polytope,
    pub queries: usize,
    pub steps: Vec<ReconstructStep>,
}

fn idot(a: &[i64], b: &[i64]) -> i128 {
    a.iter().zip(b).map(|(x, y)| *x as i128 * *y as i128).sum()
}

/// Integer rows `M' x = r'` equivalent to rational constraints.
fn integer_constraints(c: &(Vec<QVec>, QVec)) -> Vec<(Vec<i128>, i128)> {
    c.0.iter()
        .zip(&c.1)
        .map(|(row, r)| {
            let mut all = row.clone();
            all.push(r.clone());
            let den = all.iter().fold(num_bigint::BigInt::from(1), |l, q| num_integer::Integer::lcm(&l, q.denom()));
            let ints: Vec<i128> = all.iter().map(|q| (q * Q::from_integer(den.clone())).to_integer().to_i128().expect("constraint fits")).collect();
            (ints[..row.len()].to_vec(), ints[row.len()])
        })
        .collect()
}

/// Project `w` onto the kernel of the constraint matrix and make it a
/// primitive integer vector.
pub fn project_to_kernel(w: &[i64], rows: &[QVec]) -> Vec<i64> {
    let mut m: Vec<QVec> = rows.to_vec();
    let piv = rational::rref(&mut m);
    let basis: Vec<QVec> = m.into_iter().take(piv.len()).collect();
    if basis.is_empty() {
        return w.to_vec();
    }
    let wq = rational::qvec(w);
    let gram: Vec<QVec> = basis.iter().map(|r| basis.iter().map(|s| rational::dot(r, s)).collect()).collect();
    let rhs: QVec = basis.iter().map(|r| rational::dot(r, &wq)).collect();
    let y = rational::solve(&gram, &rhs).expect("independent rows");
    let mut p = wq;
    for (r, yi) in basis.iter().zip(&y) {
        p = rational::sub(&p, &rational::scale(r, yi));
    }
    if p.iter().all(|v| v.is_zero()) {
        return w.to_vec();
    }
    rational::primitive_integer(&p).iter().map(|v| v.to_i64().expect("direction fits")).collect()
}

/// Recover an integral polytope in the nonnegative orthant from its vertex
/// oracle: bound it by one vertex query per orthant, then resolve vertices
/// of the outer lattice polytope one at a time until inner and outer agree.
pub fn reconstruct_polytope(oracle: &mut dyn VertexOracle, opts: &ReconstructOptions) -> Result<Reconstruction, OracleError> {
    let n = oracle.ambient_dim();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x7ec0);
    let eqs = opts.constraints.as_ref().map(integer_constraints).unwrap_or_default();
    let mut halfspaces: Vec<(Vec<i64>, i128)> = Vec::new();
    let mut inner: BTreeSet<Vec<i64>> = BTreeSet::new();
    let mut steps: Vec<ReconstructStep> = Vec::new();
    let mut queries = 0usize;
    let check_eqs = |p: &[i64]| eqs.iter().all(|(r, v)| r.iter().zip(p).map(|(a, b)| a * *b as i128).sum::<i128>() == *v);
    let mut upper = vec![i64::MAX; n];
    for orthant in 0..(1usize << n) {
        let mut found = None;
        for _ in 0..opts.orthant_retries.max(1) {
            let w: Vec<i64> =
                (0..n).map(|i| if orthant >> i & 1 == 1 { -1 } else { 1 } * rng.gen_range(1000..2000)).collect();
            queries += 1;
            let ans = oracle.query(&w)?;
            steps.push(ReconstructStep { omega: w.clone(), candidate: None, answer: ans.clone(), case: StepCase::Orthant });
            if let VertexAnswer::Vertex(v) = ans {
                found = Some((w, v));
                break;
            }
        }
        let (w, v) = found.ok_or_else(|| OracleError::OracleInconsistent(format!("no vertex exposed in orthant {orthant}")))?;
        if v.len() != n || v.iter().any(|&x| x < 0) || !check_eqs(&v) {
            return Err(OracleError::OracleInconsistent(format!("vertex {v:?} violates the constraints")));
        }
        let h = idot(&w, &v);
        if orthant == 0 {
            for i in 0..n {
                upper[i] = (h / w[i] as i128) as i64;
            }
        }
        halfspaces.push((w, h));
        inner.insert(v);
    }
    if let Some(d) = opts.degree_bound {
        halfspaces.push((vec![1; n], d as i128));
    }
    // Lattice points of the outer polytope.
    let mut outer: Vec<Vec<i64>> = Vec::new();
    let mut cur = vec![0i64; n];
    loop {
        if halfspaces.iter().all(|(w, h)| idot(w, &cur) <= *h) && check_eqs(&cur) {
            outer.push(cur.clone());
        }
        let mut i = 0;
        while i < n {
            cur[i] += 1;
            if cur[i] <= upper[i] {
                break;
            }
            cur[i] = 0;
            i += 1;
        }
        if i == n {
            break;
        }
    }
    for v in &inner {
        if !outer.contains(v) {
            return Err(OracleError::OracleInconsistent(format!("vertex {v:?} outside the established halfspaces")));
        }
    }
    loop {
        let inner_poly = polytope::convex_hull_int(&inner.iter().cloned().collect::<Vec<_>>())?;
        let pts: Vec<QVec> = outer.iter().map(|p| rational::qvec(p)).collect();
        let hull = crate::hull::hull(&pts);
        let candidate = hull.vertices.iter().copied().find(|&i| !inner_poly.contains(&pts[i]));
        let Some(ci) = candidate else {
            return Ok(Reconstruction { polytope: inner_poly, queries, steps });
        };
        if queries >= opts.max_queries {
            return Err(OracleError::QueryBudget);
        }
        let p = outer[ci].clone();
        // An interior direction of the normal cone of p.
        let mut w = vec![0i64; n];
        for (f, on) in hull.facets.iter().zip(&hull.facet_points) {
            if on.contains(&ci) {
                let nrm = rational::primitive_integer(&f.normal);
                for (wj, v) in w.iter_mut().zip(&nrm) {
                    *wj += v.to_i64().expect("normal fits");
                }
            }
        }
        if let Some(c) = &opts.constraints {
            w = project_to_kernel(&w, &c.0);
        }
        queries += 1;
        let ans = oracle.query(&w)?;
        let case = match &ans {
            VertexAnswer::Vertex(q) if *q == p => {
                inner.insert(p.clone());
                StepCase::Confirmed
            }
            VertexAnswer::Pfe => {
                outer.remove(ci);
                StepCase::Removed
            }
            VertexAnswer::Vertex(q) => {
                if !outer.contains(q) {
                    return Err(OracleError::OracleInconsistent(format!("vertex {q:?} outside the outer polytope")));
                }
                let h = idot(&w, q);
                outer.retain(|x| idot(&w, x) <= h);
                inner.insert(q.clone());
                halfspaces.push((w.clone(), h));
                StepCase::Cut
            }
        };
        steps.push(ReconstructStep { omega: w, candidate: Some(p), answer: ans, case });
    }
}
