//! Path tracking: Newton's method with an alpha-theory report, Euler
//! prediction from the Davidenko equation, adaptive and fixed-step
//! predictor-corrector tracking, divergence detection, the Cauchy endgame,
//! and the straight-line (gamma-trick), Bezout and parameter homotopies.
//!
//! Convention: every homotopy is tracked from `t = 1` (start system) to
//! `t = 0` (target system).

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::poly::{monomial_value, SparsePoly, SparseSystem, C64};

/// `(13 - 3 sqrt(17)) / 4`: below this, `alpha` certifies quadratic
/// convergence of Newton's method from the point. Evaluated as the equal
/// `4 / (13 + 3 sqrt(17))`, which avoids the cancellation.
pub fn alpha_threshold() -> f64 {
    4.0 / (13.0 + 3.0 * 17f64.sqrt())
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TrackError {
    #[error("singular Jacobian at Newton iterate {iterate}")]
    SingularJacobian { iterate: usize },
    #[error("step budget exhausted at t = {t}")]
    MaxStepsExceeded { t: f64 },
    #[error("step size underflow at t = {t} (suspected path jump)")]
    PathJumpSuspected { t: f64 },
    #[error("Cauchy endgame did not close within {cap} loops")]
    EndgameNoClosure { cap: usize },
}

/// Values of `H`, `D_x H` and `D_t H` at one point.
pub struct HomotopyEval {
    pub h: Vec<C64>,
    pub jx: DMatrix<C64>,
    pub dt: Vec<C64>,
}

/// A square family `H(t; x)` with `t` complex.
pub trait Homotopy: Sync {
    fn nvars(&self) -> usize;
    fn evaluate(&self, t: C64, x: &[C64]) -> HomotopyEval;
}

/// `H(t; x) = (1 - t) gamma0 F(x) + t gamma1 G(x)`.
#[derive(Clone, Debug)]
pub struct StraightLine {
    pub target: SparseSystem,
    pub start: SparseSystem,
    pub gamma0: C64,
    pub gamma1: C64,
}

impl Homotopy for StraightLine {
    fn nvars(&self) -> usize {
        self.target.nvars()
    }

    fn evaluate(&self, t: C64, x: &[C64]) -> HomotopyEval {
        let (f, jf) = self.target.eval_jac(x);
        let (g, jg) = self.start.eval_jac(x);
        let a = (C64::new(1.0, 0.0) - t) * self.gamma0;
        let b = t * self.gamma1;
        let h = f.iter().zip(&g).map(|(fi, gi)| a * fi + b * gi).collect();
        let dt = f.iter().zip(&g).map(|(fi, gi)| self.gamma1 * gi - self.gamma0 * fi).collect();
        HomotopyEval { h, jx: jf * a + jg * b, dt }
    }
}

/// A homotopy given by polynomials in `(t, x_1, ..., x_n)`; variable 0 is `t`.
#[derive(Clone, Debug)]
pub struct PolyHomotopy {
    pub sys: SparseSystem,
}

impl PolyHomotopy {
    pub fn new(sys: SparseSystem) -> PolyHomotopy {
        assert_eq!(sys.len() + 1, sys.nvars(), "n equations in t and n unknowns");
        PolyHomotopy { sys }
    }
}

impl Homotopy for PolyHomotopy {
    fn nvars(&self) -> usize {
        self.sys.nvars() - 1
    }

    fn evaluate(&self, t: C64, x: &[C64]) -> HomotopyEval {
        let n = x.len();
        let mut y = Vec::with_capacity(n + 1);
        y.push(t);
        y.extend_from_slice(x);
        let mut grad = vec![C64::new(0.0, 0.0); n + 1];
        let mut h = Vec::with_capacity(n);
        let mut dt = Vec::with_capacity(n);
        let mut jx = DMatrix::zeros(n, n);
        for (i, p) in self.sys.polys.iter().enumerate() {
            h.push(p.eval_grad(&y, &mut grad));
            dt.push(grad[0]);
            for j in 0..n {
                jx[(i, j)] = grad[j + 1];
            }
        }
        HomotopyEval { h, jx, dt }
    }
}

/// The universal family of systems with fixed supports, parameterized by
/// the concatenated coefficient vector.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CoeffFamily {
    pub supports: Vec<Vec<Vec<i64>>>,
}

impl CoeffFamily {
    pub fn new(supports: Vec<Vec<Vec<i64>>>) -> CoeffFamily {
        CoeffFamily { supports }
    }

    /// The family through `f`, with `f`'s coefficients as parameters.
    pub fn from_system(f: &SparseSystem) -> (CoeffFamily, Vec<C64>) {
        let params = f.polys.iter().flat_map(|p| p.coefficients()).collect();
        (CoeffFamily { supports: f.supports() }, params)
    }

    pub fn nvars(&self) -> usize {
        self.supports.iter().flatten().next().map_or(0, |a| a.len())
    }

    pub fn nparams(&self) -> usize {
        self.supports.iter().map(|a| a.len()).sum()
    }

    pub fn system(&self, params: &[C64]) -> SparseSystem {
        let mut k = 0;
        let n = self.nvars();
        let polys = self
            .supports
            .iter()
            .map(|a| {
                let c = &params[k..k + a.len()];
                k += a.len();
                let terms = a.iter().zip(c).map(|(e, &coeff)| crate::poly::Term { exponent: e.clone(), coeff }).collect();
                SparsePoly::new(n, terms).expect("support dimension")
            })
            .collect();
        SparseSystem::new(polys).expect("uniform nvars")
    }

    /// Values, Jacobian, and monomial values (the derivative in each parameter).
    fn eval_parts(&self, params: &[C64], x: &[C64]) -> (Vec<C64>, DMatrix<C64>, Vec<C64>) {
        let n = x.len();
        let m = self.supports.len();
        let mut vals = vec![C64::new(0.0, 0.0); m];
        let mut jac = DMatrix::zeros(m, n);
        let mut mons = Vec::with_capacity(self.nparams());
        let mut k = 0;
        for (i, a) in self.supports.iter().enumerate() {
            for alpha in a {
                let mv = monomial_value(x, alpha);
                mons.push(mv);
                let c = params[k];
                vals[i] += c * mv;
                for j in 0..n {
                    if alpha[j] != 0 {
                        jac[(i, j)] += c * mv * alpha[j] as f64 / x[j];
                    }
                }
                k += 1;
            }
        }
        (vals, jac, mons)
    }
}

/// Parameter homotopy along `p(t) = (1 - t) target + t gamma start`.
#[derive(Clone, Debug)]
pub struct CoeffPath {
    pub family: CoeffFamily,
    pub start: Vec<C64>,
    pub target: Vec<C64>,
    pub gamma: C64,
}

impl CoeffPath {
    fn params(&self, t: C64) -> Vec<C64> {
        let one = C64::new(1.0, 0.0);
        self.start.iter().zip(&self.target).map(|(s, g)| (one - t) * g + t * self.gamma * s).collect()
    }
}

impl Homotopy for CoeffPath {
    fn nvars(&self) -> usize {
        self.family.nvars()
    }

    fn evaluate(&self, t: C64, x: &[C64]) -> HomotopyEval {
        let p = self.params(t);
        let (h, jx, mons) = self.family.eval_parts(&p, x);
        let mut dt = vec![C64::new(0.0, 0.0); h.len()];
        let mut k = 0;
        for (i, a) in self.family.supports.iter().enumerate() {
            for _ in a {
                dt[i] += (self.gamma * self.start[k] - self.target[k]) * mons[k];
                k += 1;
            }
        }
        HomotopyEval { h, jx, dt }
    }
}

/// Step-size strategy.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum StepMode {
    /// Halve on corrector failure, double after five clean steps.
    Adaptive,
    /// Constant step with exactly `newton_steps` corrections per step
    /// (zero gives Euler's method).
    Fixed { newton_steps: usize },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrackerConfig {
    pub mode: StepMode,
    /// Initial (adaptive) or constant (fixed) step in `t`.
    pub step: f64,
    pub max_step: f64,
    pub min_step: f64,
    /// Divergence bound `N` on `|x|`.
    pub divergence_bound: f64,
    /// Endgame radius.
    pub endgame_eps: f64,
    /// Relative tolerance of Newton corrections while tracking.
    pub newton_tol: f64,
    /// Residual tolerance of converged endpoints.
    pub final_tol: f64,
    pub max_newton: usize,
    pub max_steps: usize,
    pub endgame_samples: usize,
    pub winding_cap: usize,
    pub closure_tol: f64,
    pub seed: u64,
}

impl Default for TrackerConfig {
    fn default() -> Self {
        TrackerConfig {
            mode: StepMode::Adaptive,
            step: 0.02,
            max_step: 0.1,
            min_step: 1e-13,
            divergence_bound: 1e8,
            endgame_eps: 0.01,
            newton_tol: 1e-9,
            final_tol: 1e-8,
            max_newton: 3,
            max_steps: 50_000,
            endgame_samples: 32,
            winding_cap: 8,
            closure_tol: 1e-8,
            seed: 0,
        }
    }
}

impl TrackerConfig {
    /// Constant step `h` with `newton_steps` corrections per step and no endgame.
    pub fn fixed(h: f64, newton_steps: usize) -> TrackerConfig {
        TrackerConfig { mode: StepMode::Fixed { newton_steps }, step: h, endgame_eps: 0.0, ..Default::default() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PathStatus {
    Converged,
    Diverged,
    EndgameConverged,
}

/// Result of tracking one path.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PathOutcome {
    pub status: PathStatus,
    /// `None` for diverged paths.
    pub endpoint: Option<Vec<C64>>,
    pub winding: usize,
    pub residual: f64,
    /// Largest condition-number estimate seen along the path.
    pub max_condition: f64,
    pub steps: usize,
}

impl PathOutcome {
    pub fn is_finite(&self) -> bool {
        self.endpoint.is_some()
    }
}

fn norm_inf(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn lin_solve(j: &DMatrix<C64>, b: &[C64]) -> Option<Vec<C64>> {
    let rhs = DVector::from_column_slice(b);
    let sol = j.clone().lu().solve(&rhs)?;
    sol.iter().all(|z| z.re.is_finite() && z.im.is_finite()).then(|| sol.iter().copied().collect())
}

/// `||J||_F * ||J^{-1}||` with the latter from a short inverse power iteration.
pub fn condition_estimate(j: &DMatrix<C64>) -> f64 {
    let n = j.nrows();
    let lu = j.clone().lu();
    let mut v = DVector::from_fn(n, |i, _| C64::new(1.0, 0.1 * i as f64));
    let mut inv_norm = 0.0;
    let jh = j.adjoint().lu();
    for _ in 0..3 {
        let vn = v.norm();
        v /= C64::new(vn, 0.0);
        let Some(y) = lu.solve(&v) else {
            return f64::INFINITY;
        };
        let Some(z) = jh.solve(&y) else {
            return f64::INFINITY;
        };
        inv_norm = z.norm().sqrt();
        v = z;
    }
    let c = j.norm() * inv_norm;
    if c.is_finite() {
        c
    } else {
        f64::INFINITY
    }
}

/// `dx/dt = -(D_x H)^{-1} D_t H`.
pub fn davidenko(h: &dyn Homotopy, t: C64, x: &[C64]) -> Result<Vec<C64>, TrackError> {
    let e = h.evaluate(t, x);
    let neg: Vec<C64> = e.dt.iter().map(|z| -z).collect();
    lin_solve(&e.jx, &neg).ok_or(TrackError::SingularJacobian { iterate: 0 })
}

/// One Euler step from `(t, x)` to `t + dt` (use `dt < 0` to move toward
/// the target).
pub fn euler_predict(h: &dyn Homotopy, t: f64, x: &[C64], dt: f64) -> Result<Vec<C64>, TrackError> {
    let v = davidenko(h, C64::new(t, 0.0), x)?;
    Ok(x.iter().zip(&v).map(|(xi, vi)| xi + vi * dt).collect())
}

/// One Newton step on `H(t; .)`; returns the new point and the update norm.
fn newton_step(h: &dyn Homotopy, t: C64, x: &[C64]) -> Option<(Vec<C64>, f64)> {
    let e = h.evaluate(t, x);
    let dx = lin_solve(&e.jx, &e.h)?;
    let nx = x.iter().zip(&dx).map(|(a, b)| a - b).collect();
    Some((nx, norm_inf(&dx)))
}

/// Newton correction to relative tolerance; fails on divergence,
/// insufficient contraction, or a first update larger than `first_max`.
fn correct(h: &dyn Homotopy, t: C64, x: &[C64], iters: usize, tol: f64, first_max: f64) -> Option<Vec<C64>> {
    let mut x = x.to_vec();
    let mut prev = f64::INFINITY;
    for k in 0..iters {
        let (nx, d) = newton_step(h, t, &x)?;
        if k == 0 && d > first_max {
            return None;
        }
        x = nx;
        let scale = 1.0 + norm_inf(&x);
        if d <= tol * scale {
            return Some(x);
        }
        if d > 0.5 * prev {
            return None;
        }
        prev = d;
    }
    None
}

/// Newton refinement at `t`, up to `iters` steps or until the update is
/// below `tol` relative.
fn refine(h: &dyn Homotopy, t: C64, x: &[C64], iters: usize, tol: f64) -> Vec<C64> {
    let mut x = x.to_vec();
    for _ in 0..iters {
        let Some((nx, d)) = newton_step(h, t, &x) else {
            break;
        };
        if !nx.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            break;
        }
        x = nx;
        if d <= tol * (1.0 + norm_inf(&x)) {
            break;
        }
    }
    x
}

/// State of a segment track.
struct Segment {
    x: Vec<C64>,
    steps: usize,
    max_condition: f64,
    diverged: bool,
}

/// A path in the `t`-plane: `sigma -> (t(sigma), t'(sigma))`.
type TPath<'a> = &'a dyn Fn(f64) -> (C64, C64);

/// Track along `t(sigma)` for `sigma` from `s0` to `s1`.
fn track_segment(
    h: &dyn Homotopy,
    path: TPath,
    s0: f64,
    s1: f64,
    x0: &[C64],
    cfg: &TrackerConfig,
    budget: usize,
) -> Result<Segment, TrackError> {
    let dir = if s1 >= s0 { 1.0 } else { -1.0 };
    let mut s = s0;
    let mut x = x0.to_vec();
    let mut step = cfg.step;
    let mut clean = 0;
    let mut steps = 0;
    let mut max_condition: f64 = 0.0;
    let mut big = 0;
    while (s1 - s) * dir > 0.0 {
        if steps >= budget {
            return Err(TrackError::MaxStepsExceeded { t: path(s).0.re });
        }
        let hstep = step.min((s1 - s) * dir);
        let (t, tp) = path(s);
        let e = h.evaluate(t, &x);
        let rhs: Vec<C64> = e.dt.iter().map(|z| -z * tp).collect();
        let Some(v) = lin_solve(&e.jx, &rhs) else {
            if let StepMode::Fixed { .. } = cfg.mode {
                return Err(TrackError::SingularJacobian { iterate: steps });
            }
            step *= 0.5;
            if step < cfg.min_step {
                return Err(TrackError::SingularJacobian { iterate: steps });
            }
            continue;
        };
        let sn = s + dir * hstep;
        let pred: Vec<C64> = x.iter().zip(&v).map(|(xi, vi)| xi + vi * (dir * hstep)).collect();
        let (tn, _) = path(sn);
        match cfg.mode {
            StepMode::Fixed { newton_steps } => {
                let mut y = pred;
                for _ in 0..newton_steps {
                    y = newton_step(h, tn, &y).ok_or(TrackError::SingularJacobian { iterate: steps })?.0;
                }
                x = y;
                s = if (s1 - sn) * dir < 1e-12 { s1 } else { sn };
                steps += 1;
            }
            StepMode::Adaptive => {
                // The predictor error is second order in the step: a large
                // first correction means the step is under-resolved.
                let first_max = 0.25 * hstep * norm_inf(&v) + 1e-7 * (1.0 + norm_inf(&pred));
                let corrected = correct(h, tn, &pred, cfg.max_newton, cfg.newton_tol, first_max);
                let guard = 10.0 * hstep * norm_inf(&v) + 1e-6 * (1.0 + norm_inf(&pred));
                match corrected {
                    Some(y) if norm_inf(&sub(&y, &pred)) <= guard => {
                        x = y;
                        s = sn;
                        steps += 1;
                        clean += 1;
                        if clean >= 5 {
                            step = (2.0 * step).min(cfg.max_step);
                            clean = 0;
                        }
                    }
                    other => {
                        clean = 0;
                        step *= 0.5;
                        if step < cfg.min_step {
                            return Err(if other.is_some() {
                                TrackError::PathJumpSuspected { t: t.re }
                            } else {
                                TrackError::SingularJacobian { iterate: steps }
                            });
                        }
                        continue;
                    }
                }
            }
        }
        if steps % 8 == 0 {
            max_condition = max_condition.max(condition_estimate(&e.jx));
        }
        if norm_inf(&x) > cfg.divergence_bound {
            big += 1;
            if big >= 2 {
                return Ok(Segment { x, steps, max_condition, diverged: true });
            }
        } else {
            big = 0;
        }
    }
    Ok(Segment { x, steps, max_condition, diverged: false })
}

fn sub(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Track the path of `h` from `x_start` at `t = 1` to `t = 0`.
pub fn track_path(h: &dyn Homotopy, x_start: &[C64], cfg: &TrackerConfig) -> Result<PathOutcome, TrackError> {
    let real = |s: f64| (C64::new(s, 0.0), C64::new(1.0, 0.0));
    let eps = cfg.endgame_eps;
    if let StepMode::Fixed { .. } = cfg.mode {
        let seg = track_segment(h, &real, 1.0, 0.0, x_start, cfg, cfg.max_steps)?;
        let residual = norm_inf(&h.evaluate(C64::new(0.0, 0.0), &seg.x).h);
        return Ok(PathOutcome {
            status: PathStatus::Converged,
            endpoint: Some(seg.x),
            winding: 1,
            residual,
            max_condition: seg.max_condition,
            steps: seg.steps,
        });
    }
    let seg = track_segment(h, &real, 1.0, eps, x_start, cfg, cfg.max_steps)?;
    let mut steps = seg.steps;
    let max_condition = seg.max_condition;
    if seg.diverged {
        return Ok(diverged(steps, max_condition));
    }
    let x_eps = seg.x;
    let zero = C64::new(0.0, 0.0);
    // Healthy conditioning at eps: try to finish directly.
    let cond_eps = condition_estimate(&h.evaluate(C64::new(eps, 0.0), &x_eps).jx);
    if eps == 0.0 || cond_eps < 1e8 {
        if let Ok(fin) = track_segment(h, &real, eps, 0.0, &x_eps, cfg, cfg.max_steps) {
            steps += fin.steps;
            if fin.diverged {
                return Ok(diverged(steps, max_condition));
            }
            let x0 = refine(h, zero, &fin.x, 5, 1e-14);
            let e = h.evaluate(zero, &x0);
            let residual = norm_inf(&e.h);
            let smin_rel = 1.0 / condition_estimate(&e.jx) * e.jx.norm() / (1.0 + norm_inf(&x0));
            if residual < cfg.final_tol && smin_rel > 1e-6 {
                return Ok(PathOutcome {
                    status: PathStatus::Converged,
                    endpoint: Some(x0),
                    winding: 1,
                    residual,
                    max_condition: max_condition.max(1.0 / smin_rel),
                    steps,
                });
            }
        }
    }
    if eps == 0.0 {
        return Err(TrackError::SingularJacobian { iterate: steps });
    }
    let eg = cauchy_endgame(h, &x_eps, eps, cfg)?;
    steps += eg.steps;
    if eg.diverging {
        return Ok(diverged(steps, max_condition));
    }
    let residual = norm_inf(&h.evaluate(zero, &eg.x0).h);
    Ok(PathOutcome {
        status: PathStatus::EndgameConverged,
        endpoint: Some(eg.x0),
        winding: eg.winding,
        residual,
        max_condition: f64::INFINITY,
        steps,
    })
}

/// Track from `t = 1` to `t = 0` along a path known to stay regular: no
/// endgame and no conditioning check at the end, only a Newton polish.
/// `None` when the path crossed the divergence bound.
pub fn track_regular(h: &dyn Homotopy, x_start: &[C64], cfg: &TrackerConfig) -> Result<Option<Vec<C64>>, TrackError> {
    let real = |s: f64| (C64::new(s, 0.0), C64::new(1.0, 0.0));
    let seg = track_segment(h, &real, 1.0, 0.0, x_start, cfg, cfg.max_steps)?;
    if seg.diverged {
        return Ok(None);
    }
    Ok(Some(refine(h, C64::new(0.0, 0.0), &seg.x, 3, 1e-14)))
}

/// Constant-step Euler predictor with `newton_steps` corrections, from
/// `t = 1` to `t = 0`; returns every `(t, x)` visited, starting point
/// included.
pub fn fixed_step_trace(h: &dyn Homotopy, x_start: &[C64], step: f64, newton_steps: usize) -> Result<Vec<(f64, Vec<C64>)>, TrackError> {
    let n = (1.0 / step).round().max(1.0) as usize;
    let mut x = x_start.to_vec();
    let mut out = vec![(1.0, x.clone())];
    for k in 1..=n {
        let t0 = 1.0 - (k - 1) as f64 / n as f64;
        let t1 = 1.0 - k as f64 / n as f64;
        x = euler_predict(h, t0, &x, t1 - t0)?;
        for _ in 0..newton_steps {
            x = newton_step(h, C64::new(t1, 0.0), &x).ok_or(TrackError::SingularJacobian { iterate: k })?.0;
        }
        out.push((t1, x.clone()));
    }
    Ok(out)
}

fn diverged(steps: usize, max_condition: f64) -> PathOutcome {
    PathOutcome { status: PathStatus::Diverged, endpoint: None, winding: 1, residual: f64::INFINITY, max_condition, steps }
}

/// Result of the Cauchy endgame.
pub struct EndgameResult {
    pub x0: Vec<C64>,
    pub winding: usize,
    /// Negative Puiseux powers dominate: the path goes to infinity.
    pub diverging: bool,
    pub steps: usize,
}

/// Loop `t = eps e^{i theta}` until the path closes after `r` loops; the
/// endpoint is the mean of the `r * samples` equally spaced samples (the
/// trapezoid rule for the Cauchy integral in `s = t^{1/r}`).
pub fn cauchy_endgame(h: &dyn Homotopy, x_eps: &[C64], eps: f64, cfg: &TrackerConfig) -> Result<EndgameResult, TrackError> {
    let m = cfg.endgame_samples;
    let circle = move |th: f64| {
        let t = C64::from_polar(eps, th);
        (t, C64::new(0.0, 1.0) * t)
    };
    let dth = 2.0 * PI / m as f64;
    let sub_cfg = TrackerConfig { step: dth / 4.0, max_step: dth, newton_tol: 1e-12, ..cfg.clone() };
    let mut samples: Vec<Vec<C64>> = Vec::new();
    let mut x = x_eps.to_vec();
    let mut steps = 0;
    for r in 1..=cfg.winding_cap {
        for j in 0..m {
            samples.push(x.clone());
            let th0 = ((r - 1) * m + j) as f64 * dth;
            let seg = track_segment(h, &circle, th0, th0 + dth, &x, &sub_cfg, cfg.max_steps)?;
            steps += seg.steps;
            x = refine(h, circle(th0 + dth).0, &seg.x, 3, 1e-14);
        }
        let gap = norm_inf(&sub(&x, x_eps));
        if gap < cfg.closure_tol * (1.0 + norm_inf(x_eps)) {
            let n = x.len();
            let count = samples.len() as f64;
            let x0: Vec<C64> = (0..n).map(|i| samples.iter().map(|s| s[i]).sum::<C64>() / count).collect();
            // Fourier modes in s = t^{1/r}: the sample k sits at angle 2 pi k / (r m).
            let total = samples.len();
            let mut neg = 0.0f64;
            for k in 1..=(total / 2).min(4) {
                for i in 0..n {
                    let coef: C64 = samples
                        .iter()
                        .enumerate()
                        .map(|(q, s)| s[i] * C64::from_polar(1.0, 2.0 * PI * (k * q) as f64 / total as f64))
                        .sum::<C64>()
                        / total as f64;
                    neg = neg.max(coef.norm());
                }
            }
            // Coefficient of s^{-k} times eps^{-k/r}: compare with the mean.
            let diverging = neg > 10.0 * (1.0 + norm_inf(&x0)) || norm_inf(&x0) > cfg.divergence_bound;
            // Newton at t = 0 only helps at a regular endpoint; at a
            // singular one the Jacobian is (nearly) zero and it can throw
            // the mean far away.
            let x0 = if diverging || r > 1 { x0 } else { guarded_refine(h, &x0) };
            return Ok(EndgameResult { x0, winding: r, diverging, steps });
        }
    }
    Err(TrackError::EndgameNoClosure { cap: cfg.winding_cap })
}

/// Newton at `t = 0`, kept only when it lowers the residual without moving
/// far.
fn guarded_refine(h: &dyn Homotopy, x0: &[C64]) -> Vec<C64> {
    let zero = C64::new(0.0, 0.0);
    let y = refine(h, zero, x0, 2, 1e-14);
    let res = |x: &[C64]| norm_inf(&h.evaluate(zero, x).h);
    if norm_inf(&sub(&y, x0)) <= 1e-6 * (1.0 + norm_inf(x0)) && res(&y) <= res(x0) {
        y
    } else {
        x0.to_vec()
    }
}

/// Report of Newton's method with the alpha-theory quantities at the final
/// iterate.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AlphaReport {
    pub beta: f64,
    /// Upper estimate of `gamma` via Frobenius norms of the Taylor tensors.
    pub gamma: f64,
    pub alpha: f64,
    pub certified: bool,
    /// Update norms `||x_{i+1} - x_i||` of the iterations performed.
    pub updates: Vec<f64>,
}

/// `m` Newton iterations on `F` from `x0`.
pub fn newton_refine(f: &SparseSystem, x0: &[C64], m: usize) -> Result<(Vec<C64>, AlphaReport), TrackError> {
    let mut x = x0.to_vec();
    let mut updates = Vec::with_capacity(m);
    for i in 0..m {
        let (v, j) = f.eval_jac(&x);
        let dx = lin_solve(&j, &v).ok_or(TrackError::SingularJacobian { iterate: i })?;
        updates.push(norm2(&dx));
        x = x.iter().zip(&dx).map(|(a, b)| a - b).collect();
    }
    let mut report = alpha_report(f, &x).ok_or(TrackError::SingularJacobian { iterate: m })?;
    report.updates = updates;
    Ok((x, report))
}

fn norm2(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `beta`, an upper estimate of `gamma`, and `alpha = beta gamma` at `x`.
pub fn alpha_report(f: &SparseSystem, x: &[C64]) -> Option<AlphaReport> {
    let (v, j) = f.eval_jac(x);
    let beta = norm2(&lin_solve(&j, &v)?);
    let svd = j.clone().svd(false, false);
    let smin = svd.singular_values.iter().copied().fold(f64::INFINITY, f64::min);
    if smin == 0.0 {
        return None;
    }
    let inv_norm = 1.0 / smin;
    let maxdeg = f.polys.iter().map(|p| p.degree()).max().unwrap_or(0).max(2) as usize;
    let mut gamma: f64 = 0.0;
    for k in 2..=maxdeg {
        let frob2: f64 = f.polys.iter().map(|p| taylor_frobenius_sq(p, x, k)).sum();
        let bound = inv_norm * frob2.sqrt();
        gamma = gamma.max(bound.powf(1.0 / (k as f64 - 1.0)));
    }
    let laurent = f.polys.iter().any(|p| p.is_laurent());
    let alpha = beta * gamma;
    Some(AlphaReport { beta, gamma, alpha, certified: !laurent && alpha < alpha_threshold(), updates: vec![] })
}

/// Squared Frobenius norm of the symmetric tensor `D^k f(x) / k!`:
/// `sum_{|mu| = k} |C_mu|^2 mu! / k!` with `C_mu` the Taylor coefficients.
fn taylor_frobenius_sq(p: &SparsePoly, x: &[C64], k: usize) -> f64 {
    use std::collections::BTreeMap;
    let n = x.len();
    let mut coeffs: BTreeMap<Vec<i64>, C64> = BTreeMap::new();
    for term in p.terms() {
        let alpha = &term.exponent;
        if alpha.iter().any(|&a| a < 0) {
            continue;
        }
        let mut mu = vec![0i64; n];
        enumerate_mu(alpha, k as i64, 0, &mut mu, &mut |mu| {
            let mut c = term.coeff;
            for i in 0..n {
                c *= binom(alpha[i], mu[i]);
            }
            let rest: Vec<i64> = (0..n).map(|i| alpha[i] - mu[i]).collect();
            c *= monomial_value(x, &rest);
            *coeffs.entry(mu.to_vec()).or_insert(C64::new(0.0, 0.0)) += c;
        });
    }
    let kf = factorial(k as i64);
    coeffs.iter().map(|(mu, c)| c.norm_sqr() * mu.iter().map(|&m| factorial(m)).product::<f64>() / kf).sum()
}

fn enumerate_mu(alpha: &[i64], left: i64, i: usize, mu: &mut Vec<i64>, f: &mut dyn FnMut(&[i64])) {
    if i == alpha.len() {
        if left == 0 {
            f(mu);
        }
        return;
    }
    for m in 0..=alpha[i].min(left) {
        mu[i] = m;
        enumerate_mu(alpha, left - m, i + 1, mu, f);
    }
    mu[i] = 0;
}

fn binom(n: i64, k: i64) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn factorial(n: i64) -> f64 {
    (1..=n).fold(1.0, |a, b| a * b as f64)
}

/// Draw a unit-modulus complex number.
pub fn random_unit<R: Rng>(rng: &mut R) -> C64 {
    C64::from_polar(1.0, rng.gen_range(0.0..2.0 * PI))
}

/// A random complex number with standard normal real and imaginary parts.
pub fn random_gaussian<R: Rng>(rng: &mut R) -> C64 {
    // Box-Muller
    let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    let r = (-2.0 * u1.ln()).sqrt();
    C64::from_polar(r / 2f64.sqrt(), 2.0 * PI * u2)
}

/// The gamma-trick straight-line homotopy from `G` (at `t = 1`) to `F`.
pub fn gamma_homotopy(f: &SparseSystem, g: &SparseSystem, seed: u64) -> StraightLine {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gamma0 = random_unit(&mut rng);
    let gamma1 = random_unit(&mut rng);
    StraightLine { target: f.clone(), start: g.clone(), gamma0, gamma1 }
}

/// Endpoints of a batch of paths, with the per-path records.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolveReport {
    pub outcomes: Vec<Result<PathOutcome, String>>,
}

impl SolveReport {
    /// Finite endpoints, in path order.
    pub fn solutions(&self) -> Vec<Vec<C64>> {
        self.outcomes.iter().filter_map(|o| o.as_ref().ok().and_then(|p| p.endpoint.clone())).collect()
    }

    pub fn paths(&self) -> usize {
        self.outcomes.len()
    }

    pub fn failures(&self) -> usize {
        self.outcomes.iter().filter(|o| o.is_err()).count()
    }

    pub fn diverged(&self) -> usize {
        self.outcomes.iter().filter(|o| matches!(o, Ok(p) if p.status == PathStatus::Diverged)).count()
    }
}

/// Track every start point in parallel; results are in start order.
pub fn track_all(h: &dyn Homotopy, starts: &[Vec<C64>], cfg: &TrackerConfig) -> SolveReport {
    let outcomes = starts.par_iter().map(|s| track_path(h, s, cfg).map_err(|e| e.to_string())).collect();
    SolveReport { outcomes }
}

/// The total-degree start system `x_i^{d_i} - 1` and its solutions.
pub fn total_degree_start(degrees: &[i64]) -> (SparseSystem, Vec<Vec<C64>>) {
    let n = degrees.len();
    let polys = (0..n)
        .map(|i| {
            let mut e = vec![0; n];
            e[i] = degrees[i];
            SparsePoly::from_pairs(n, &[(1.0, &e[..]), (-1.0, &vec![0; n][..])])
        })
        .collect();
    let mut starts = vec![vec![]];
    for &d in degrees {
        let roots: Vec<C64> = (0..d).map(|j| C64::from_polar(1.0, 2.0 * PI * j as f64 / d as f64)).collect();
        starts = starts
            .into_iter()
            .flat_map(|s: Vec<C64>| {
                roots.iter().map(move |r| {
                    let mut v = s.clone();
                    v.push(*r);
                    v
                })
            })
            .collect();
    }
    (SparseSystem::new(polys).expect("uniform"), starts)
}

/// The Bezout homotopy: track all `prod d_i` roots of `x_i^{d_i} - 1` to `F`.
pub fn bezout_solve(f: &SparseSystem, cfg: &TrackerConfig) -> SolveReport {
    let (g, starts) = total_degree_start(&f.degrees());
    let h = gamma_homotopy(f, &g, cfg.seed);
    track_all(&h, &starts, cfg)
}

/// Solve a random dense system of the same degrees by the Bezout homotopy,
/// then retrack its finite solutions to `F`.
pub fn bezout_method(f: &SparseSystem, cfg: &TrackerConfig) -> SolveReport {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0xb3_20);
    let n = f.nvars();
    let dense: Vec<SparsePoly> = f
        .degrees()
        .iter()
        .map(|&d| {
            let support = dense_support(n, d);
            let coeffs: Vec<C64> = support.iter().map(|_| random_gaussian(&mut rng)).collect();
            SparsePoly::from_support(&support, &coeffs)
        })
        .collect();
    let g = SparseSystem::new(dense).expect("uniform");
    let first = bezout_solve(&g, cfg);
    let h = gamma_homotopy(f, &g, cfg.seed.wrapping_add(1));
    track_all(&h, &first.solutions(), cfg)
}

/// All exponents of total degree at most `d` in `n` variables.
pub fn dense_support(n: usize, d: i64) -> Vec<Vec<i64>> {
    fn rec(n: usize, left: i64, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for e in 0..=left {
            cur.push(e);
            rec(n, left - e, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, d, &mut Vec::new(), &mut out);
    out
}

/// Move solutions of the family at `start_params` to `target_params` along
/// `(1 - t) target + t gamma start`, with `gamma` drawn from the seed.
pub fn parameter_continue(
    family: &CoeffFamily,
    start_params: &[C64],
    start_sols: &[Vec<C64>],
    target_params: &[C64],
    cfg: &TrackerConfig,
) -> Vec<Result<PathOutcome, TrackError>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x9a4a);
    let gamma = random_unit(&mut rng);
    let h = CoeffPath { family: family.clone(), start: start_params.to_vec(), target: target_params.to_vec(), gamma };
    start_sols.par_iter().map(|s| track_path(&h, s, cfg)).collect()
}

/// Deduplicate points at max-norm radius `tol`, keeping first occurrences.
pub fn dedup_points(points: &[Vec<C64>], tol: f64) -> Vec<Vec<C64>> {
    let mut out: Vec<Vec<C64>> = Vec::new();
    for p in points {
        if !out.iter().any(|q| norm_inf(&sub(p, q)) < tol) {
            out.push(p.clone());
        }
    }
    out
}

/// Do two point sets agree as sets (each point matched within `tol`)?
pub fn same_point_set(a: &[Vec<C64>], b: &[Vec<C64>], tol: f64) -> bool {
    a.len() == b.len()
        && a.iter().all(|p| b.iter().any(|q| norm_inf(&sub(p, q)) < tol))
        && b.iter().all(|p| a.iter().any(|q| norm_inf(&sub(p, q)) < tol))
}

pub fn max_norm(v: &[Complex64]) -> f64 {
    norm_inf(v)
}
