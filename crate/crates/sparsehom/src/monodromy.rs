//! Monodromy loops in the coefficient space of a family, monodromy solving
//! (optionally closing under complex conjugation, optionally stopping by the
//! trace test), and the probability that a random permutation and a random
//! element of a model for complex conjugation act transitively.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::poly::C64;
use crate::rational::Q;
use crate::tracker::{self, track_all, CoeffFamily, CoeffPath, TrackerConfig};
use crate::witness::{self, LinearSlice, WitnessData};

/// Points closer than this (max-norm) are the same fiber point.
pub const CLUSTER_RADIUS: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MonodromyError {
    #[error("path {0} failed on a loop leg")]
    PathFailure(usize),
    #[error("endpoint of path {0} matches two known points")]
    MatchAmbiguity(usize),
    #[error("the fixed-point-free model needs even degree")]
    OddDForFpf,
    #[error("degree must be positive")]
    ZeroDegree,
}

/// A loop `s1 -> s2 -> s1` in parameter space: the legs are
/// `(1 - t) s2 + t c1 s1` and `(1 - t) s1 + t c2 s2`, `t` from 1 to 0. Over a
/// family that is linear in its parameters, the scalars only change the arc,
/// not the fibers at the ends.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LoopSpec {
    pub s2: Vec<C64>,
    pub c1: C64,
    pub c2: C64,
}

impl LoopSpec {
    pub fn random(nparams: usize, seed: u64) -> LoopSpec {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s2 = (0..nparams).map(|_| tracker::random_gaussian(&mut rng)).collect();
        LoopSpec { s2, c1: tracker::random_unit(&mut rng), c2: tracker::random_unit(&mut rng) }
    }
}

/// The action of one loop on the known points.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LoopResult {
    /// `image[i]` is the index of the known point where point `i` arrived,
    /// or `None` for a point outside the known set.
    pub image: Vec<Option<usize>>,
    /// Arrivals outside the known set, distinct.
    pub new_points: Vec<Vec<C64>>,
}

impl LoopResult {
    /// The permutation, when every point arrived in the known set.
    pub fn permutation(&self) -> Option<Vec<usize>> {
        let p: Option<Vec<usize>> = self.image.iter().copied().collect();
        p.filter(|p| {
            let mut seen = vec![false; p.len()];
            p.iter().all(|&j| !std::mem::replace(&mut seen[j], true))
        })
    }
}

fn track_leg(
    family: &CoeffFamily,
    from: &[C64],
    to: &[C64],
    gamma: C64,
    points: &[Vec<C64>],
    cfg: &TrackerConfig,
) -> Result<Vec<Vec<C64>>, MonodromyError> {
    let h = CoeffPath { family: family.clone(), start: from.to_vec(), target: to.to_vec(), gamma };
    let rep = track_all(&h, points, cfg);
    rep.outcomes
        .into_iter()
        .enumerate()
        .map(|(i, o)| o.ok().and_then(|p| p.endpoint).ok_or(MonodromyError::PathFailure(i)))
        .collect()
}

fn norm_diff(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Track `points` (distinct solutions at `s1`) around the loop and match
/// the arrivals against them.
pub fn monodromy_loop(
    family: &CoeffFamily,
    s1: &[C64],
    points: &[Vec<C64>],
    spec: &LoopSpec,
    cfg: &TrackerConfig,
) -> Result<LoopResult, MonodromyError> {
    let mid = track_leg(family, s1, &spec.s2, spec.c1, points, cfg)?;
    let back = track_leg(family, &spec.s2, s1, spec.c2, &mid, cfg)?;
    let mut image = Vec::with_capacity(points.len());
    let mut new_points: Vec<Vec<C64>> = Vec::new();
    for (i, x) in back.iter().enumerate() {
        let hits: Vec<usize> = (0..points.len()).filter(|&j| norm_diff(x, &points[j]) < CLUSTER_RADIUS).collect();
        match hits.len() {
            0 => {
                if !new_points.iter().any(|q| norm_diff(q, x) < CLUSTER_RADIUS) {
                    new_points.push(x.clone());
                }
                image.push(None);
            }
            1 => image.push(Some(hits[0])),
            _ => return Err(MonodromyError::MatchAmbiguity(i)),
        }
    }
    Ok(LoopResult { image, new_points })
}

/// When to stop monodromy solving.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum StopCriterion {
    /// The fiber size is known.
    Count(usize),
    /// The family is a witness cover: its first `equations` polynomials
    /// are the variety, the rest are the affine-linear slice. Stop when the
    /// trace test passes.
    Trace { equations: usize, tol: f64 },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MonodromyOptions {
    /// Add complex conjugates of new points (real family, real `s1`).
    pub conjugation: bool,
    pub stop: StopCriterion,
    /// Loop budget; default 10 loops (20 legs) per expected point.
    pub max_loops: Option<usize>,
    pub seed: u64,
}

/// The fiber found so far.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FiberState {
    pub points: Vec<Vec<C64>>,
    pub target: Option<usize>,
    /// `image` of every loop executed, against the points known then.
    pub log: Vec<Vec<Option<usize>>>,
    /// Points contributed by conjugation rather than tracking.
    pub conjugates_added: usize,
    /// False when the loop budget ran out first.
    pub complete: bool,
}

fn is_real(x: &[C64]) -> bool {
    x.iter().all(|z| z.im.abs() <= CLUSTER_RADIUS * (1.0 + z.norm()))
}

fn add_point(points: &mut Vec<Vec<C64>>, x: Vec<C64>) -> bool {
    if points.iter().any(|q| norm_diff(q, &x) < CLUSTER_RADIUS) {
        return false;
    }
    points.push(x);
    true
}

fn trace_complete(family: &CoeffFamily, s1: &[C64], equations: usize, points: &[Vec<C64>], tol: f64, seed: u64, cfg: &TrackerConfig) -> bool {
    let sys = family.system(s1);
    let n = sys.nvars();
    let eqs = crate::SparseSystem::new(sys.polys[..equations].to_vec()).expect("uniform");
    let rows = sys.polys[equations..]
        .iter()
        .map(|p| {
            let mut row = vec![p.coeff(&vec![0; n])];
            row.extend((0..n).map(|j| {
                let mut e = vec![0; n];
                e[j] = 1;
                p.coeff(&e)
            }));
            row
        })
        .collect();
    let w = WitnessData { equations: eqs, slice: LinearSlice { rows }, points: points.to_vec() };
    let all: Vec<usize> = (0..points.len()).collect();
    witness::trace_test(&w, &all, seed, tol, cfg).is_ok_and(|t| t.is_complete)
}

/// Grow a fiber from seed points by random loops until the stop criterion
/// holds or the loop budget is spent (then `complete` is false).
pub fn monodromy_solve(
    family: &CoeffFamily,
    s1: &[C64],
    seeds: &[Vec<C64>],
    opts: &MonodromyOptions,
    cfg: &TrackerConfig,
) -> Result<FiberState, MonodromyError> {
    let mut points: Vec<Vec<C64>> = Vec::new();
    let mut conjugates_added = 0;
    for x in seeds {
        add_point(&mut points, x.clone());
        if opts.conjugation && !is_real(x) && add_point(&mut points, x.iter().map(|z| z.conj()).collect()) {
            conjugates_added += 1;
        }
    }
    let target = match opts.stop {
        StopCriterion::Count(k) => Some(k),
        StopCriterion::Trace { .. } => None,
    };
    let budget = opts.max_loops.unwrap_or(10 * target.unwrap_or(10).max(1));
    let done = |points: &[Vec<C64>], seed: u64| match &opts.stop {
        StopCriterion::Count(k) => points.len() >= *k,
        StopCriterion::Trace { equations, tol } => trace_complete(family, s1, *equations, points, *tol, seed, cfg),
    };
    let mut log = Vec::new();
    let mut complete = done(&points, opts.seed);
    let mut k = 0;
    while !complete && k < budget {
        let spec = LoopSpec::random(family.nparams(), opts.seed.wrapping_add(1 + k as u64));
        k += 1;
        let res = match monodromy_loop(family, s1, &points, &spec, cfg) {
            Ok(r) => r,
            // A bad loop is discarded; the next one is independent.
            Err(_) => continue,
        };
        let mut grew = false;
        for x in res.new_points {
            let conj: Vec<C64> = x.iter().map(|z| z.conj()).collect();
            let real = is_real(&x);
            grew |= add_point(&mut points, x);
            if opts.conjugation && !real && add_point(&mut points, conj) {
                conjugates_added += 1;
                grew = true;
            }
        }
        log.push(res.image);
        if grew {
            complete = done(&points, opts.seed.wrapping_add(k as u64));
        }
    }
    Ok(FiberState { points, target, log, conjugates_added, complete })
}

/// Points reachable from `start` under the group generated by `perms`.
pub fn orbit(perms: &[Vec<usize>], start: usize) -> Vec<usize> {
    let mut seen = vec![start];
    let mut i = 0;
    while i < seen.len() {
        let p = seen[i];
        for g in perms {
            if !seen.contains(&g[p]) {
                seen.push(g[p]);
            }
        }
        i += 1;
    }
    seen.sort_unstable();
    seen
}

/// Which sets `R_i` model complex conjugation on a fiber.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConjugationModel {
    /// `R_i = S_i`: two random permutations.
    Symmetric,
    /// `R_i` = all involutions.
    Involutions,
    /// `R_{2i}` = fixed-point-free involutions; empty in odd degree.
    FixedPointFree,
}

/// `|R_i|` for `i = 0..=d`.
pub fn model_sizes(d: usize, model: ConjugationModel) -> Vec<BigInt> {
    let mut r = vec![BigInt::one(); d + 1];
    for i in 1..=d {
        r[i] = match model {
            ConjugationModel::Symmetric => &r[i - 1] * BigInt::from(i),
            ConjugationModel::Involutions => {
                let two_back = if i >= 2 { r[i - 2].clone() } else { BigInt::zero() };
                &r[i - 1] + two_back * BigInt::from(i - 1)
            }
            // (i - 1)!! on even i, 0 on odd i.
            ConjugationModel::FixedPointFree => {
                if i % 2 == 1 {
                    BigInt::zero()
                } else {
                    &r[i - 2] * BigInt::from(i - 1)
                }
            }
        };
    }
    r
}

/// `t_1, ..., t_d` by `t_d = 1 - sum_{i<d} (i/d) t_i |R_i||R_{d-i}| / |R_d|`;
/// entries with `|R_i| = 0` are 0.
pub fn transitivity_probabilities(d: usize, model: ConjugationModel) -> Result<Vec<Q>, MonodromyError> {
    if d == 0 {
        return Err(MonodromyError::ZeroDegree);
    }
    if model == ConjugationModel::FixedPointFree && d % 2 == 1 {
        return Err(MonodromyError::OddDForFpf);
    }
    let r = model_sizes(d, model);
    let mut t: Vec<Q> = vec![Q::zero(); d + 1];
    for k in 1..=d {
        if r[k].is_zero() {
            continue;
        }
        let mut s = Q::zero();
        for i in 1..k {
            if !r[i].is_zero() && !r[k - i].is_zero() {
                s += Q::new(BigInt::from(i), BigInt::from(k)) * &t[i] * Q::new(&r[i] * &r[k - i], r[k].clone());
            }
        }
        t[k] = Q::one() - s;
    }
    Ok(t.split_off(1))
}

/// The probability `t_d` that a uniform pair in `S_d x R_d` acts
/// transitively.
pub fn transitivity_probability(d: usize, model: ConjugationModel) -> Result<Q, MonodromyError> {
    Ok(transitivity_probabilities(d, model)?.pop().expect("d >= 1"))
}
