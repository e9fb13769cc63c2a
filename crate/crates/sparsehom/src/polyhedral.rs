//! The polyhedral homotopy: binomial start systems from fine mixed cells,
//! tracked through the lifted deformation to the target system.
//!
//! For a cell exposed by `(w, -1)`, substituting `x = z t^{-w}` into
//! `F_l(t; x) = sum c_a t^{l(a)} x^a` and dividing each equation by its
//! lowest power of `t` gives
//! `H(t; z) = sum c_a t^{e(a)} z^a`, `e(a) = M_i - (<w, a> - l(a)) >= 0`,
//! with `e = 0` exactly on the cell. At `t = 0` this is the binomial system
//! of the cell; at `t = 1` the substitution is the identity and `H = F`.
//! Paths are tracked in these coordinates over the whole interval, so no
//! explicit change back to `x` is needed.

use num_traits::{Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use nalgebra::DMatrix;

use crate::intlin::{self, IntLinError};
use crate::poly::{monomial_value, SparsePoly, SparseSystem, Term, C64};
use crate::rational::{self, q_to_f64, Q, QVec};
use crate::subdivision::{self, Cell, LiftedSupport, SubdivisionError};
use crate::tracker::{self, gamma_homotopy, track_all, track_path, Homotopy, HomotopyEval, PathOutcome, SolveReport, TrackerConfig};

/// Lift range used by the solvers: smaller than the subdivision default so
/// that the powers of `t` stay moderate.
pub const SOLVER_LIFT_RANGE: i64 = 1 << 10;

/// Distinct-endpoint radius (max-norm).
pub const CLUSTER_RADIUS: f64 = 1e-6;

#[derive(Debug, Error, Clone)]
pub enum PolyhedralError {
    #[error("system is not square")]
    NonSquare,
    #[error("cell {0} is not fine mixed")]
    NonFineCell(usize),
    #[error("cell {0} gives a monomial equation: no torus solutions")]
    MonomialEquation(usize),
    #[error(transparent)]
    Subdivision(#[from] SubdivisionError),
    #[error(transparent)]
    IntLin(#[from] IntLinError),
    #[error("found {got} distinct solutions, expected {expected}")]
    CountShortfall { expected: usize, got: usize, report: Box<PolyhedralReport> },
}

/// Binomial start data of one fine mixed cell.
#[derive(Clone, Debug)]
pub struct CellStart {
    pub cell: Cell,
    /// The binomial system `G^nu` in `z`.
    pub binomial: SparseSystem,
    pub solutions: Vec<Vec<C64>>,
    /// `nu` with `x = z t^nu`.
    pub nu: QVec,
}

/// Binomial start systems of the given fine mixed cells.
pub fn build_cell_starts(f: &SparseSystem, lifting: &LiftedSupport, cells: &[Cell]) -> Result<Vec<CellStart>, PolyhedralError> {
    let n = f.nvars();
    if !f.is_square() {
        return Err(PolyhedralError::NonSquare);
    }
    let mut out = Vec::with_capacity(cells.len());
    for (ci, cell) in cells.iter().enumerate() {
        if cell.subsets.iter().any(|c| c.len() == 1) {
            return Err(PolyhedralError::MonomialEquation(ci));
        }
        if !cell.is_fine_mixed() {
            return Err(PolyhedralError::NonFineCell(ci));
        }
        let mut cols = Vec::with_capacity(n);
        let mut rhs = Vec::with_capacity(n);
        let mut polys = Vec::with_capacity(n);
        for (i, c) in cell.subsets.iter().enumerate() {
            let a = &lifting.supports[i][c[0]];
            let b = &lifting.supports[i][c[1]];
            let ca = f.polys[i].coeff(a);
            let cb = f.polys[i].coeff(b);
            cols.push(a.iter().zip(b).map(|(x, y)| x - y).collect::<Vec<i64>>());
            rhs.push(-cb / ca);
            polys.push(
                SparsePoly::new(n, vec![Term { exponent: a.clone(), coeff: ca }, Term { exponent: b.clone(), coeff: cb }])
                    .expect("dimension"),
            );
        }
        let amat: Vec<Vec<i64>> = (0..n).map(|r| cols.iter().map(|c| c[r]).collect()).collect();
        let solutions = intlin::solve_binomial(&amat, &rhs)?;
        out.push(CellStart {
            cell: cell.clone(),
            binomial: SparseSystem::new(polys).expect("uniform"),
            solutions,
            nu: cell.nu(),
        });
    }
    Ok(out)
}

/// `H(tau; z) = sum c_a s^{e(a)} z^a` along the arc
/// `s = (1 - tau) + i kappa tau (1 - tau)`; `tau = 1` is the binomial start,
/// `tau = 0` the target. The complex arc keeps real systems away from real
/// singular points.
#[derive(Clone, Debug)]
pub struct CellHomotopy {
    n: usize,
    kappa: f64,
    /// Per equation: `(exponent, coefficient, power of s)`.
    eqs: Vec<Vec<(Vec<i64>, C64, f64)>>,
}

impl CellHomotopy {
    /// `scale` divides all exponents; it must be common to every cell of
    /// the lifting so that all cells follow the same path in `t`.
    pub fn new(f: &SparseSystem, lifting: &LiftedSupport, cell: &Cell, scale: &Q, kappa: f64) -> CellHomotopy {
        let n = f.nvars();
        let eqs = cell_exponents(lifting, cell)
            .into_iter()
            .enumerate()
            .map(|(i, es)| {
                lifting.supports[i]
                    .iter()
                    .zip(es)
                    .map(|(a, e)| (a.clone(), f.polys[i].coeff(a), q_to_f64(&(e / scale))))
                    .collect()
            })
            .collect();
        CellHomotopy { n, kappa, eqs }
    }
}

/// Smallest positive exponent over all cells: dividing by it makes every
/// exponent at least 1, so `dH/ds` stays bounded at the start.
pub fn common_scale(lifting: &LiftedSupport, cells: &[Cell]) -> Q {
    cells
        .iter()
        .flat_map(|c| cell_exponents(lifting, c).into_iter().flatten())
        .filter(|e| e.is_positive())
        .min()
        .unwrap_or_else(|| rational::qi(1))
}

impl Homotopy for CellHomotopy {
    fn nvars(&self) -> usize {
        self.n
    }

    fn evaluate(&self, tau: C64, z: &[C64]) -> HomotopyEval {
        let n = self.n;
        let one = C64::new(1.0, 0.0);
        let ik = C64::new(0.0, self.kappa);
        let s = (one - tau) + ik * tau * (one - tau);
        let ds = -one + ik * (one - 2.0 * tau);
        let mut h = vec![C64::new(0.0, 0.0); n];
        let mut dt = vec![C64::new(0.0, 0.0); n];
        let mut jx = DMatrix::zeros(n, n);
        for (i, eq) in self.eqs.iter().enumerate() {
            for (a, c, e) in eq {
                let mv = monomial_value(z, a);
                let (se, dse) = if *e == 0.0 {
                    (C64::new(1.0, 0.0), C64::new(0.0, 0.0))
                } else if s == C64::new(0.0, 0.0) {
                    (C64::new(0.0, 0.0), if *e == 1.0 { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) })
                } else {
                    let se = s.powf(*e);
                    (se, se * *e / s)
                };
                let cm = c * se;
                h[i] += cm * mv;
                dt[i] += c * dse * ds * mv;
                for j in 0..n {
                    if a[j] != 0 {
                        jx[(i, j)] += cm * mv * a[j] as f64 / z[j];
                    }
                }
            }
        }
        HomotopyEval { h, jx, dt }
    }
}

/// Per-path results of a polyhedral solve.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PolyhedralReport {
    pub mixed_volume: usize,
    /// Solutions per cell, in cell order.
    pub cell_counts: Vec<usize>,
    pub outcomes: Vec<Result<PathOutcome, String>>,
    /// Distinct finite endpoints.
    pub solutions: Vec<Vec<C64>>,
    /// Alpha-theory certification of each returned solution.
    pub certified: Vec<bool>,
}

impl PolyhedralReport {
    pub fn paths(&self) -> usize {
        self.outcomes.len()
    }
}

/// Fine mixed cells of `supp F` under a seeded random lifting.
pub fn random_cells(f: &SparseSystem, seed: u64) -> Result<(LiftedSupport, Vec<Cell>), SubdivisionError> {
    subdivision::random_fine_mixed_cells(&f.supports(), SOLVER_LIFT_RANGE, seed, 10)
}

/// Solve `F` (assumed general for its support) by the polyhedral homotopy.
pub fn polyhedral_solve(f: &SparseSystem, cfg: &TrackerConfig) -> Result<PolyhedralReport, PolyhedralError> {
    if !f.is_square() {
        return Err(PolyhedralError::NonSquare);
    }
    let (lifting, cells) = random_cells(f, cfg.seed)?;
    polyhedral_solve_with(f, &lifting, &cells, cfg)
}

/// The polyhedral homotopy with a given lifting and its fine mixed cells.
pub fn polyhedral_solve_with(
    f: &SparseSystem,
    lifting: &LiftedSupport,
    cells: &[Cell],
    cfg: &TrackerConfig,
) -> Result<PolyhedralReport, PolyhedralError> {
    let starts = build_cell_starts(f, lifting, cells)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0xa2c);
    let kappa = rand::Rng::gen_range(&mut rng, 0.3..0.9);
    let scale = common_scale(lifting, cells);
    let homotopies: Vec<CellHomotopy> = starts.iter().map(|s| CellHomotopy::new(f, lifting, &s.cell, &scale, kappa)).collect();
    let jobs: Vec<(usize, &Vec<C64>)> = starts.iter().enumerate().flat_map(|(i, s)| s.solutions.iter().map(move |x| (i, x))).collect();
    let mixed_volume = jobs.len();
    let outcomes: Vec<Result<PathOutcome, String>> =
        jobs.par_iter().map(|(i, x)| track_path(&homotopies[*i], x, cfg).map_err(|e| e.to_string())).collect();
    let finite: Vec<Vec<C64>> = outcomes.iter().filter_map(|o| o.as_ref().ok().and_then(|p| p.endpoint.clone())).collect();
    let solutions = tracker::dedup_points(&finite, CLUSTER_RADIUS);
    let certified = solutions.iter().map(|x| tracker::alpha_report(f, x).is_some_and(|r| r.certified)).collect();
    let report = PolyhedralReport {
        mixed_volume,
        cell_counts: starts.iter().map(|s| s.solutions.len()).collect(),
        outcomes,
        solutions,
        certified,
    };
    if report.solutions.len() < mixed_volume {
        return Err(PolyhedralError::CountShortfall { expected: mixed_volume, got: report.solutions.len(), report: Box::new(report) });
    }
    Ok(report)
}

/// A system with the supports of `F` and random complex coefficients.
pub fn random_system_like(f: &SparseSystem, seed: u64) -> SparseSystem {
    random_system(&f.supports(), seed)
}

pub fn random_system(supports: &[Vec<Vec<i64>>], seed: u64) -> SparseSystem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let polys = supports
        .iter()
        .map(|a| {
            let coeffs: Vec<C64> = a.iter().map(|_| tracker::random_gaussian(&mut rng)).collect();
            SparsePoly::from_support(a, &coeffs)
        })
        .collect();
    SparseSystem::new(polys).expect("uniform")
}

/// Result of solving an arbitrary system via a general one.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SparseSolveReport {
    pub start: PolyhedralReport,
    /// One report per gamma tried; later attempts happen only when paths
    /// were lost.
    pub retracks: Vec<SolveReport>,
    /// Distinct finite endpoints in the torus (coordinates bounded away
    /// from 0), merged over all attempts.
    pub solutions: Vec<Vec<C64>>,
    /// Distinct endpoints with a vanishing coordinate, excluded from
    /// `solutions`.
    pub off_torus: usize,
}

/// Gamma attempts in [`sparse_solve`].
pub const RETRACK_ATTEMPTS: u64 = 3;

/// Solve a general system with the supports of `F` by the polyhedral
/// homotopy, then retrack to `F` by a gamma-trick straight line. If some
/// paths diverge or fail, the retrack is repeated with a fresh gamma and
/// the endpoint sets are merged: every endpoint is a solution of `F`, so
/// the union is sound, and near-misses of the discriminant do not repeat.
pub fn sparse_solve(f: &SparseSystem, cfg: &TrackerConfig) -> Result<SparseSolveReport, PolyhedralError> {
    let g = random_system_like(f, cfg.seed ^ 0x5ba5e);
    let start = match polyhedral_solve(&g, cfg) {
        Ok(r) => r,
        Err(PolyhedralError::CountShortfall { report, .. }) => *report,
        Err(e) => return Err(e),
    };
    let mut retracks = Vec::new();
    let mut endpoints: Vec<Vec<C64>> = Vec::new();
    for attempt in 0..RETRACK_ATTEMPTS {
        let h = gamma_homotopy(f, &g, cfg.seed.wrapping_add(7 + 1000 * attempt));
        let rep = track_all(&h, &start.solutions, cfg);
        let lost = rep.diverged() + rep.failures();
        endpoints.extend(rep.solutions());
        endpoints = tracker::dedup_points(&endpoints, CLUSTER_RADIUS);
        retracks.push(rep);
        if lost == 0 || endpoints.len() >= start.solutions.len() {
            break;
        }
    }
    let (solutions, off): (Vec<_>, Vec<_>) = endpoints.into_iter().partition(|x| x.iter().all(|z| z.norm() >= 1e-8));
    Ok(SparseSolveReport { start, retracks, solutions, off_torus: off.len() })
}

/// Exponent weights `e(a)` of a cell, exact (before rescaling).
pub fn cell_exponents(lifting: &LiftedSupport, cell: &Cell) -> Vec<Vec<Q>> {
    let n = lifting.ambient_dim();
    let w = &cell.omega[..n];
    lifting
        .supports
        .iter()
        .zip(&lifting.lifts)
        .map(|(a, l)| {
            let vals: Vec<Q> = a.iter().zip(l).map(|(p, lv)| rational::dot(&rational::qvec(p), w) - lv).collect();
            let m = vals.iter().max().cloned().unwrap_or_else(Q::zero);
            vals.into_iter().map(|v| &m - v).collect()
        })
        .collect()
}
