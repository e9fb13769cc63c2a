//! Decomposable sparse systems.
//!
//! A support collection `A = (A_1, ..., A_n)` is *lacunary* when the lattice
//! spanned by differences within the supports is a proper sublattice of
//! `Z^n`; then every system with support `A` is a composition `g o Phi` with
//! a monomial map `Phi`. It is *triangular* when a proper subcollection
//! `A_I` spans a lattice of rank `|I|`; then `F_I` is a system in `|I|`
//! variables after a monomial change, and each of its solutions carries a
//! fiber cut out by the remaining equations. Either structure gives a
//! decomposition of the solution set, which [`solve_decomposable`] exploits
//! recursively, falling back on the polyhedral homotopy otherwise.

use std::f64::consts::PI;

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hs_oracle::univariate_roots;
use crate::intlin::{self, ChangeDirection, IntLinError, MonomialChange};
use crate::mixedvol::{self, MixedVolumeError};
use crate::poly::{cpow, SparsePoly, SparseSystem, Term, C64};
use crate::polyhedral::{self, PolyhedralError, CLUSTER_RADIUS};
use crate::polytope::{self, PolytopeError};
use crate::rational;
use crate::tracker::{self, CoeffFamily, SolveReport, TrackerConfig};

#[derive(Debug, Error, Clone)]
pub enum DecomposableError {
    #[error("system is not square")]
    NonSquare,
    #[error("mixed volume is zero")]
    ZeroMixedVolume,
    #[error("triangular witness is not strict")]
    NonStrict,
    #[error("structure report does not match the requested reduction")]
    WrongStructure,
    #[error(transparent)]
    IntLin(#[from] IntLinError),
    #[error(transparent)]
    Polyhedral(#[from] PolyhedralError),
    #[error(transparent)]
    MixedVolume(#[from] MixedVolumeError),
    #[error(transparent)]
    Polytope(#[from] PolytopeError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum StructureKind {
    Lacunary,
    Triangular,
    Indecomposable,
}

/// `Z A = phi(Z^n)` with `phi = P D_n`; `psi = P^{-1}` makes `Phi o Psi`
/// the diagonal map `x -> (x_1^{d_1}, ..., x_n^{d_n})`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LacunaryData {
    pub phi: Vec<Vec<i64>>,
    pub psi: Vec<Vec<i64>>,
    /// Invariant factors `d_1 | ... | d_n`.
    pub factors: Vec<i64>,
    /// `[Z^n : Z A] = prod d_i`.
    pub index: i64,
}

/// A triangular witness `I` (indices into the system). After the change
/// `x = Psi(w)`, the equations in `I` involve only `w_1..w_k` and `Phi o Psi`
/// is the projection onto those coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriangularData {
    pub subset: Vec<usize>,
    pub psi: Vec<Vec<i64>>,
    /// Basis of the saturation of `Z A_I` (first `k` columns of `P`).
    pub saturation_basis: Vec<Vec<i64>>,
    /// `MV(A_I)` in the saturated coordinates.
    pub base_mv: i64,
    /// `MV` of the images of the remaining supports in `Z^n / Z^I`.
    pub fiber_mv: i64,
    /// `1 < MV(A_I) < MV(A)`, equivalently both factors exceed one.
    pub strict: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum StructureReport {
    Lacunary(LacunaryData),
    Triangular(TriangularData),
    Indecomposable,
}

impl StructureReport {
    pub fn kind(&self) -> StructureKind {
        match self {
            StructureReport::Lacunary(_) => StructureKind::Lacunary,
            StructureReport::Triangular(_) => StructureKind::Triangular,
            StructureReport::Indecomposable => StructureKind::Indecomposable,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Stage {
    /// Polyhedral homotopy on an indecomposable system.
    Blackbox,
    /// Companion-matrix eigenvalues; no paths.
    Univariate,
    /// Parameter homotopy moving one fiber onto another.
    Fiber,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerEntry {
    pub stage: Stage,
    pub nvars: usize,
    pub paths: usize,
}

/// Every batch of paths tracked while solving.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathLedger {
    pub entries: Vec<LedgerEntry>,
}

impl PathLedger {
    pub fn total(&self) -> usize {
        self.entries.iter().map(|e| e.paths).sum()
    }

    pub fn stage_total(&self, stage: Stage) -> usize {
        self.entries.iter().filter(|e| e.stage == stage).map(|e| e.paths).sum()
    }

    fn push(&mut self, stage: Stage, nvars: usize, paths: usize) {
        self.entries.push(LedgerEntry { stage, nvars, paths });
    }

    fn absorb(&mut self, other: PathLedger) {
        self.entries.extend(other.entries);
    }
}

/// One decomposition decision, in the order they were made.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionStep {
    pub depth: usize,
    pub nvars: usize,
    pub kind: StructureKind,
    pub detail: String,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct DecomposableSolution {
    pub solutions: Vec<Vec<C64>>,
    pub ledger: PathLedger,
    pub steps: Vec<DecompositionStep>,
    pub warnings: Vec<String>,
}

impl DecomposableSolution {
    fn absorb(&mut self, other: DecomposableSolution) {
        self.ledger.absorb(other.ledger);
        self.steps.extend(other.steps);
        self.warnings.extend(other.warnings);
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DecomposableConfig {
    pub tracker: TrackerConfig,
    /// Use a triangular witness only when it is strict; otherwise the whole
    /// system goes to the polyhedral homotopy.
    pub require_strict: bool,
    /// Newton-polish returned solutions on the original system.
    pub polish: bool,
    /// Collapsed fiber coefficients below this magnitude raise a warning.
    pub collapse_warning: f64,
}

impl Default for DecomposableConfig {
    fn default() -> Self {
        DecomposableConfig { tracker: TrackerConfig::default(), require_strict: false, polish: true, collapse_warning: 1e-12 }
    }
}

/// Recursive solver callback used by the reductions.
pub type SubSolve<'a> = dyn FnMut(&SparseSystem) -> Result<DecomposableSolution, DecomposableError> + 'a;

fn big_to_i64(m: &intlin::IMat) -> Vec<Vec<i64>> {
    m.iter().map(|r| r.iter().map(|x| x.to_i64().expect("entry fits in i64")).collect()).collect()
}

fn rank(gens: &[Vec<i64>]) -> usize {
    let mut rows: Vec<rational::QVec> = gens.iter().map(|r| rational::qvec(r)).collect();
    rational::rref(&mut rows).len()
}

/// Subsets of `0..n` of size `k` in lexicographic order.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

fn mat_vec(m: &[Vec<i64>], v: &[i64]) -> Vec<i64> {
    m.iter().map(|r| r.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

fn dedup_support(s: Vec<Vec<i64>>) -> Vec<Vec<i64>> {
    let mut out: Vec<Vec<i64>> = Vec::new();
    for p in s {
        if !out.contains(&p) {
            out.push(p);
        }
    }
    out
}

/// Mixed volume in any dimension, including the univariate case.
fn support_mv(supports: &[Vec<Vec<i64>>]) -> Result<i64, DecomposableError> {
    if supports.len() == 1 {
        let xs: Vec<i64> = supports[0].iter().map(|p| p[0]).collect();
        return Ok(xs.iter().max().unwrap() - xs.iter().min().unwrap());
    }
    Ok(mixedvol::mixed_volume_of_supports(supports)?)
}

/// The supports of `F_I` and of the fiber system after `x = Psi(w)`.
fn split_supports(supports: &[Vec<Vec<i64>>], subset: &[usize], psi: &[Vec<i64>]) -> (Vec<Vec<Vec<i64>>>, Vec<Vec<Vec<i64>>>) {
    let k = subset.len();
    let mut base = Vec::new();
    let mut fiber = Vec::new();
    for (i, a) in supports.iter().enumerate() {
        let w: Vec<Vec<i64>> = a.iter().map(|p| mat_vec(psi, &p.iter().zip(&a[0]).map(|(x, y)| x - y).collect::<Vec<_>>())).collect();
        if subset.contains(&i) {
            base.push(dedup_support(w.into_iter().map(|p| p[..k].to_vec()).collect()));
        } else {
            fiber.push(dedup_support(w.into_iter().map(|p| p[k..].to_vec()).collect()));
        }
    }
    (base, fiber)
}

fn triangular_data(supports: &[Vec<Vec<i64>>], subset: &[usize]) -> Result<TriangularData, DecomposableError> {
    let ld = intlin::lattice_data(supports, subset)?;
    let p = big_to_i64(&ld.snf.p);
    let psi = big_to_i64(&intlin::inverse_unimodular(&ld.snf.p)?);
    let k = subset.len();
    let saturation_basis = (0..k).map(|j| p.iter().map(|r| r[j]).collect()).collect();
    let (base, fiber) = split_supports(supports, subset, &psi);
    let base_mv = support_mv(&base)?;
    let fiber_mv = support_mv(&fiber)?;
    Ok(TriangularData { subset: subset.to_vec(), psi, saturation_basis, base_mv, fiber_mv, strict: base_mv > 1 && fiber_mv > 1 })
}

/// The triangular data of `subset` when `Z A_I` has rank `|I|`.
pub fn triangular_witness(supports: &[Vec<Vec<i64>>], subset: &[usize]) -> Result<Option<TriangularData>, DecomposableError> {
    if subset.is_empty() || subset.len() >= supports.len() || rank(&intlin::difference_generators(supports, subset)?) != subset.len() {
        return Ok(None);
    }
    triangular_data(supports, subset).map(Some)
}

/// Classify a support collection: lacunary first (last invariant factor of
/// the difference lattice above one), then the proper subcollections by
/// increasing size, lexicographically, for a lattice of rank `|I|`. A strict
/// witness is preferred; the first non-strict one is reported otherwise.
pub fn detect_structure(supports: &[Vec<Vec<i64>>]) -> Result<StructureReport, DecomposableError> {
    let n = supports.len();
    if n == 0 || supports.iter().any(|a| a.is_empty() || a.iter().any(|p| p.len() != n)) {
        return Err(DecomposableError::NonSquare);
    }
    // MV > 0 iff every subcollection spans at least |I| dimensions.
    let mut witnesses = Vec::new();
    for k in 1..=n {
        for subset in combinations(n, k) {
            let r = rank(&intlin::difference_generators(supports, &subset)?);
            if r < k {
                return Err(DecomposableError::ZeroMixedVolume);
            }
            if r == k && k < n {
                witnesses.push(subset);
            }
        }
    }
    let ld = intlin::lattice_data(supports, &(0..n).collect::<Vec<_>>())?;
    let factors: Vec<i64> = ld.snf.invariant_factors().iter().map(|d| d.to_i64().expect("factor fits")).collect();
    if factors[n - 1] > 1 {
        let p = big_to_i64(&ld.snf.p);
        let phi = p.iter().map(|r| r.iter().zip(&factors).map(|(a, d)| a * d).collect()).collect();
        let psi = big_to_i64(&intlin::inverse_unimodular(&ld.snf.p)?);
        return Ok(StructureReport::Lacunary(LacunaryData { phi, psi, index: factors.iter().product(), factors }));
    }
    let mut first = None;
    for subset in &witnesses {
        let data = triangular_data(supports, subset)?;
        if data.strict {
            return Ok(StructureReport::Triangular(data));
        }
        first.get_or_insert(data);
    }
    Ok(first.map_or(StructureReport::Indecomposable, StructureReport::Triangular))
}

/// Divide by the first monomial so the support contains the origin.
fn shift_to_origin(f: &SparsePoly) -> SparsePoly {
    let a0 = f.terms()[0].exponent.clone();
    f.map_exponents(f.nvars(), |e| e.iter().zip(&a0).map(|(x, y)| x - y).collect())
}

/// `x = w^psi`, i.e. `x_c = prod_j w_j^{psi[j][c]}`.
fn apply_psi(psi: &[Vec<i64>], w: &[C64]) -> Vec<C64> {
    let n = psi.len();
    (0..n).map(|c| (0..n).fold(C64::new(1.0, 0.0), |acc, j| acc * cpow(w[j], psi[j][c]))).collect()
}

/// `iota(F)`: the system `G` with `F = G o Phi` (after clearing a monomial
/// from each equation).
pub fn lacunary_reduction(f: &SparseSystem, data: &LacunaryData) -> Result<SparseSystem, DecomposableError> {
    let change = MonomialChange::new(data.phi.clone());
    let polys = f.polys.iter().map(|p| change.apply_poly(&shift_to_origin(p), ChangeDirection::Pull)).collect::<Result<Vec<_>, _>>()?;
    Ok(SparseSystem::new(polys).expect("same variables"))
}

/// All `x` with `Phi(x) = y`: componentwise `d_i`-th roots of `y` (every
/// branch), then `Psi`.
pub fn lacunary_fiber(data: &LacunaryData, y: &[C64]) -> Vec<Vec<C64>> {
    let n = y.len();
    let total = data.index as usize;
    let mut out = Vec::with_capacity(total);
    let mut j = vec![0i64; n];
    for _ in 0..total {
        // ln|x_c| and arg x_c as sums over the root coordinates w_i.
        let mut lx = vec![0.0; n];
        let mut ax = vec![0.0; n];
        for i in 0..n {
            let d = data.factors[i] as f64;
            let lw = y[i].norm().ln() / d;
            let aw = (y[i].arg() + 2.0 * PI * j[i] as f64) / d;
            for c in 0..n {
                lx[c] += data.psi[i][c] as f64 * lw;
                ax[c] += data.psi[i][c] as f64 * aw;
            }
        }
        out.push((0..n).map(|c| C64::from_polar(lx[c].exp(), ax[c])).collect());
        for i in 0..n {
            j[i] += 1;
            if j[i] < data.factors[i] {
                break;
            }
            j[i] = 0;
        }
    }
    out
}

/// Solve a lacunary system: solve `iota(F)` with `solve` and pull every
/// solution back through the `prod d_i`-to-one map `Phi`.
pub fn solve_lacunary(f: &SparseSystem, report: &StructureReport, solve: &mut SubSolve<'_>) -> Result<DecomposableSolution, DecomposableError> {
    let StructureReport::Lacunary(data) = report else {
        return Err(DecomposableError::WrongStructure);
    };
    let g = lacunary_reduction(f, data)?;
    let sub = solve(&g)?;
    let solutions = sub.solutions.iter().flat_map(|y| lacunary_fiber(data, y)).collect();
    let mut out = DecomposableSolution { solutions, ..Default::default() };
    out.absorb(sub);
    Ok(out)
}

/// The pieces of a triangular system in the coordinates `x = Psi(w)`.
struct TriangularSplit {
    k: usize,
    base: SparseSystem,
    /// The fiber equations in all `n` variables `w`.
    fiber_polys: Vec<SparsePoly>,
    family: CoeffFamily,
}

impl TriangularSplit {
    fn new(f: &SparseSystem, data: &TriangularData) -> Result<TriangularSplit, DecomposableError> {
        let n = f.nvars();
        let k = data.subset.len();
        let change = MonomialChange::new(data.psi.clone());
        let w: Vec<SparsePoly> = f.polys.iter().map(|p| change.apply_poly(&shift_to_origin(p), ChangeDirection::Push)).collect::<Result<_, _>>()?;
        let mut base = Vec::new();
        let mut fiber_polys = Vec::new();
        for (i, p) in w.into_iter().enumerate() {
            if data.subset.contains(&i) {
                if p.terms().iter().any(|t| t.exponent[k..].iter().any(|&e| e != 0)) {
                    return Err(DecomposableError::WrongStructure);
                }
                base.push(p.map_exponents(k, |e| e[..k].to_vec()));
            } else {
                fiber_polys.push(p);
            }
        }
        let supports =
            fiber_polys.iter().map(|p| dedup_support(p.terms().iter().map(|t| t.exponent[k..].to_vec()).collect())).collect::<Vec<_>>();
        debug_assert_eq!(supports.len(), n - k);
        Ok(TriangularSplit { k, base: SparseSystem::new(base).expect("same variables"), fiber_polys, family: CoeffFamily::new(supports) })
    }

    /// Coefficients of the fiber system over the base point `y`: terms
    /// with the same image in `Z^n / Z^I` collapse to `sum c_a y^{a_I}`.
    fn collapse(&self, y: &[C64]) -> Vec<C64> {
        let k = self.k;
        let mut params = Vec::with_capacity(self.family.nparams());
        for (p, support) in self.fiber_polys.iter().zip(&self.family.supports) {
            let mut c = vec![C64::new(0.0, 0.0); support.len()];
            for t in p.terms() {
                let pos = support.iter().position(|b| b[..] == t.exponent[k..]).expect("image in support");
                c[pos] += t.coeff * crate::poly::monomial_value(y, &t.exponent[..k]);
            }
            params.extend(c);
        }
        params
    }
}

/// Solve a triangular system: solve `F_I` with `solve`, solve the fiber over
/// one base solution with `solve`, and move that fiber to every other base
/// solution by a parameter homotopy. Fibers that lose paths are re-solved
/// directly.
pub fn solve_triangular(
    f: &SparseSystem,
    report: &StructureReport,
    solve: &mut SubSolve<'_>,
    cfg: &DecomposableConfig,
) -> Result<DecomposableSolution, DecomposableError> {
    let StructureReport::Triangular(data) = report else {
        return Err(DecomposableError::WrongStructure);
    };
    if cfg.require_strict && !data.strict {
        return Err(DecomposableError::NonStrict);
    }
    let split = TriangularSplit::new(f, data)?;
    let mut out = DecomposableSolution::default();
    let base = solve(&split.base)?;
    let ys = base.solutions.clone();
    out.absorb(base);
    let Some(y0) = ys.first() else {
        return Ok(out);
    };
    let p0 = split.collapse(y0);
    if p0.iter().any(|c| c.norm() < cfg.collapse_warning) {
        out.warnings.push(format!("collapsed fiber coefficient below {:e}: fiber may be non-generic", cfg.collapse_warning));
    }
    let fiber0 = solve(&split.family.system(&p0))?;
    let z0 = fiber0.solutions.clone();
    out.absorb(fiber0);
    let nj = f.nvars() - split.k;
    let mut solutions = Vec::new();
    let add = |y: &[C64], zs: &[Vec<C64>], solutions: &mut Vec<Vec<C64>>| {
        for z in zs {
            let w: Vec<C64> = y.iter().chain(z).copied().collect();
            solutions.push(apply_psi(&data.psi, &w));
        }
    };
    add(y0, &z0, &mut solutions);
    for y in &ys[1..] {
        let py = split.collapse(y);
        let outcomes = tracker::parameter_continue(&split.family, &p0, &z0, &py, &cfg.tracker);
        out.ledger.push(Stage::Fiber, nj, z0.len());
        let ends: Vec<Vec<C64>> = outcomes.into_iter().filter_map(|o| o.ok().and_then(|p| p.endpoint)).collect();
        let ends = tracker::dedup_points(&ends, CLUSTER_RADIUS);
        if ends.len() == z0.len() {
            add(y, &ends, &mut solutions);
        } else {
            out.warnings.push(format!("fiber continuation kept {} of {} points; solving that fiber directly", ends.len(), z0.len()));
            let direct = solve(&split.family.system(&py))?;
            add(y, &direct.solutions, &mut solutions);
            out.absorb(direct);
        }
    }
    out.solutions = solutions;
    Ok(out)
}

/// Roots in `C^*` of a univariate Laurent polynomial.
fn univariate_solve(f: &SparsePoly) -> Vec<Vec<C64>> {
    let lo = f.terms().iter().map(|t| t.exponent[0]).min().unwrap_or(0);
    let hi = f.terms().iter().map(|t| t.exponent[0]).max().unwrap_or(0);
    let mut p = vec![C64::new(0.0, 0.0); (hi - lo + 1) as usize];
    for t in f.terms() {
        p[(t.exponent[0] - lo) as usize] += t.coeff;
    }
    univariate_roots(&p).into_iter().filter(|r| r.norm() > 0.0).map(|r| vec![r]).collect()
}

/// Polyhedral homotopy with up to three reseeded attempts, merging the
/// (always valid) endpoints of every attempt.
fn blackbox(f: &SparseSystem, cfg: &DecomposableConfig) -> Result<DecomposableSolution, DecomposableError> {
    let mut out = DecomposableSolution::default();
    let n = f.nvars();
    if n == 1 {
        out.ledger.push(Stage::Univariate, 1, 0);
        out.solutions = univariate_solve(&f.polys[0]);
        return Ok(out);
    }
    let mut tcfg = cfg.tracker.clone();
    for attempt in 0..3u64 {
        tcfg.seed = cfg.tracker.seed.wrapping_add(attempt * 0x9e37);
        let (report, complete) = match polyhedral::polyhedral_solve(f, &tcfg) {
            Ok(r) => (r, true),
            Err(PolyhedralError::CountShortfall { report, .. }) => (*report, false),
            Err(e) => return Err(e.into()),
        };
        out.ledger.push(Stage::Blackbox, n, report.paths());
        out.solutions.extend(report.solutions.iter().cloned());
        out.solutions = tracker::dedup_points(&out.solutions, CLUSTER_RADIUS);
        if complete || out.solutions.len() >= report.mixed_volume {
            return Ok(out);
        }
        out.warnings.push(format!("polyhedral solve found {} of {} solutions; reseeding", out.solutions.len(), report.mixed_volume));
    }
    Ok(out)
}

fn solve_rec(f: &SparseSystem, cfg: &DecomposableConfig, depth: usize) -> Result<DecomposableSolution, DecomposableError> {
    if !f.is_square() {
        return Err(DecomposableError::NonSquare);
    }
    let report = detect_structure(&f.supports())?;
    let n = f.nvars();
    let step = |kind, detail: String| DecompositionStep { depth, nvars: n, kind, detail };
    let mut recurse = |g: &SparseSystem| solve_rec(g, cfg, depth + 1);
    let (mut out, s) = match &report {
        StructureReport::Lacunary(d) => (solve_lacunary(f, &report, &mut recurse)?, step(StructureKind::Lacunary, format!("index {}", d.index))),
        StructureReport::Triangular(d) if d.strict || !cfg.require_strict => (
            solve_triangular(f, &report, &mut recurse, cfg)?,
            step(StructureKind::Triangular, format!("I = {:?}, {} x {}", d.subset, d.base_mv, d.fiber_mv)),
        ),
        StructureReport::Triangular(d) => {
            (blackbox(f, cfg)?, step(StructureKind::Triangular, format!("I = {:?} not strict; polyhedral homotopy", d.subset)))
        }
        StructureReport::Indecomposable => (blackbox(f, cfg)?, step(StructureKind::Indecomposable, String::new())),
    };
    out.steps.insert(0, s);
    if cfg.polish {
        out.solutions = out.solutions.iter().map(|x| polish(f, x)).collect();
    }
    out.solutions = tracker::dedup_points(&out.solutions, CLUSTER_RADIUS);
    Ok(out)
}

/// Two Newton steps on `F`, kept only if they stay close to `x`.
fn polish(f: &SparseSystem, x: &[C64]) -> Vec<C64> {
    match tracker::newton_refine(f, x, 2) {
        Ok((y, _)) if tracker::max_norm(&y.iter().zip(x).map(|(a, b)| a - b).collect::<Vec<_>>()) <= 1e-6 * (1.0 + tracker::max_norm(x)) => y,
        _ => x.to_vec(),
    }
}

/// Solve a system that is general for its support, recursively reducing
/// lacunary and triangular structure and using the polyhedral homotopy on
/// indecomposable pieces. Each recursive call lowers the mixed volume or the
/// number of variables, so the recursion terminates.
pub fn solve_decomposable(f: &SparseSystem, cfg: &DecomposableConfig) -> Result<DecomposableSolution, DecomposableError> {
    solve_rec(f, cfg, 0)
}

/// A start system on the vertices of the supports together with its
/// solutions, computed by [`solve_decomposable`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DecomposableStart {
    pub system: SparseSystem,
    pub solution: DecomposableSolution,
}

/// Vertices of `conv(A_i)`, as integer points.
pub fn vertex_supports(supports: &[Vec<Vec<i64>>]) -> Result<Vec<Vec<Vec<i64>>>, DecomposableError> {
    supports.iter().map(|a| Ok(polytope::convex_hull_int(a)?.integer_vertices().expect("integral hull"))).collect()
}

/// A general system supported on the vertices of each `conv(A_i)` (same
/// mixed volume, and more often decomposable), with its solutions.
pub fn decomposable_start(supports: &[Vec<Vec<i64>>], cfg: &DecomposableConfig) -> Result<DecomposableStart, DecomposableError> {
    let verts = vertex_supports(supports)?;
    let system = polyhedral::random_system(&verts, cfg.tracker.seed ^ 0xdec0);
    let solution = solve_decomposable(&system, cfg)?;
    Ok(DecomposableStart { system, solution })
}

/// Track the start solutions to `F` (any system on the original supports)
/// along a gamma-trick straight line.
pub fn retrack_from_start(f: &SparseSystem, start: &DecomposableStart, cfg: &DecomposableConfig) -> SolveReport {
    let h = tracker::gamma_homotopy(f, &start.system, cfg.tracker.seed ^ 0x57a7);
    tracker::track_all(&h, &start.solution.solutions, &cfg.tracker)
}

/// A copy of `f` with every term's exponent embedded by `embed`.
pub fn embed_poly(f: &SparsePoly, nvars: usize, embed: &[Vec<i64>]) -> SparsePoly {
    let terms = f.terms().iter().map(|t| Term { exponent: mat_vec(embed, &t.exponent), coeff: t.coeff }).collect();
    SparsePoly::new(nvars, terms).expect("embedding dimension")
}
