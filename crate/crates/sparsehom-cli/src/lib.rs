//! Command-line front end: read a system, dispatch to a solver or oracle,
//! and emit a JSON result
//! `{command, seed, input_digest, result, diagnostics{paths_tracked, failures, wall_time}}`.
//!
//! Exit status is 0 when the job completed, 2 when the result is partial
//! (failed paths, undecided oracle paths, fewer solutions than the mixed
//! volume) and 1 on error.

pub mod schema;

use std::io::Read;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use sparsehom::decomposable::{solve_decomposable, DecomposableConfig};
use sparsehom::hs_oracle::{
    oracle_query, reconstruct_polytope, ChangeChoice, HsVertexOracle, MembershipMode, MembershipOracle, OracleOptions, OracleSetup,
    ReconstructOptions,
};
use sparsehom::intlin::{smith_normal_form, MonomialChange};
use sparsehom::mixedvol::{mixed_volume_of_supports_seeded, mixed_volume_seeded, MvMethod};
use sparsehom::monodromy::{transitivity_probability, ConjugationModel};
use sparsehom::polyhedral::{build_cell_starts, polyhedral_solve, PolyhedralError};
use sparsehom::polytope::convex_hull_int;
use sparsehom::rational::{q_to_f64, qi, Q};
use sparsehom::subdivision::{fine_mixed_cells, induce_subdivision, random_fine_mixed_cells, LiftedSupport};
use sparsehom::tracker::{bezout_solve, PathOutcome, TrackerConfig};
use sparsehom::witness::{pseudo_witness, trace_test, witness_construct, TRACE_TOL};
use sparsehom::{SparseSystem, C64};

pub use schema::{Input, InputFile, SchemaError};

#[derive(Parser, Debug, Clone)]
#[command(name = "sparsehom", version, about = "Sparse polynomial systems: homotopy solvers, mixed volumes and Newton-polytope oracles")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Seed for every random choice; a fixed seed reproduces the result.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Residual tolerance for converged endpoints.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Radius in t at which the Cauchy endgame starts.
    #[arg(long, global = true)]
    pub eps_endgame: Option<f64>,
    /// Refuse to solve when the path count bound exceeds this.
    #[arg(long, global = true)]
    pub max_paths: Option<usize>,
    /// Write the JSON result here instead of stdout.
    #[arg(long, global = true)]
    pub json_out: Option<PathBuf>,
    /// Include per-path records (and the decomposable path ledger).
    #[arg(long, global = true)]
    pub trace_paths: bool,
    /// Read the input system from stdin.
    #[arg(long, global = true)]
    pub stdin: bool,
    /// Inline input system as JSON.
    #[arg(long, global = true, conflicts_with = "stdin")]
    pub input_json: Option<String>,
    /// Cap on worker threads.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Solve a square system in the torus.
    Solve {
        input: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = SolveMethod::Polyhedral)]
        method: SolveMethod,
    },
    /// Mixed volume of the Newton polytopes of the system.
    MixedVolume {
        input: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = MvChoice::All)]
        method: MvChoice,
    },
    /// Regular mixed subdivision induced by a lifting, with its mixed cells.
    Subdivision {
        input: Option<PathBuf>,
        /// Lifting values per support as JSON, e.g. `[[2,3,3,3],[1,1,1]]`; random if omitted.
        #[arg(long)]
        lifts: Option<String>,
    },
    /// Smith normal form `A = P D Q` of an integer matrix.
    Snf {
        /// Row-major matrix as JSON, e.g. `[[2,4],[6,8]]`.
        #[arg(long)]
        matrix: String,
    },
    /// Witness set of the variety of the system.
    Witness {
        input: Option<PathBuf>,
        /// Dimension; defaults to variables minus equations.
        #[arg(long)]
        dim: Option<usize>,
    },
    /// Trace test on (a subset of) a witness set of a curve.
    TraceTest {
        input: Option<PathBuf>,
        /// Witness point indices; all points if omitted.
        #[arg(long, value_delimiter = ',')]
        subset: Option<Vec<usize>>,
    },
    /// Which face of the Newton polytope does a direction expose?
    NpQuery {
        input: Option<PathBuf>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        direction: Vec<f64>,
        /// Coordinates kept when the input is a curve rather than a hypersurface.
        #[arg(long, value_delimiter = ',')]
        project: Option<Vec<usize>>,
    },
    /// Reconstruct the Newton polytope from oracle queries.
    NpReconstruct {
        input: Option<PathBuf>,
        #[arg(long, value_delimiter = ',')]
        project: Option<Vec<usize>>,
    },
    /// Tropical membership of a direction.
    Tropical {
        input: Option<PathBuf>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        direction: Vec<f64>,
        /// Monomial change as JSON (columns are the new monomials); `identity`, or `random`.
        #[arg(long, default_value = "random")]
        change: String,
    },
    /// Probability that two random loops generate a transitive group.
    MonodromyProb {
        #[arg(long, value_enum, default_value_t = Model::Symmetric)]
        model: Model,
        #[arg(long)]
        d: usize,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveMethod {
    Bezout,
    Polyhedral,
    Decomposable,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum MvChoice {
    Alternating,
    Lattice,
    Cells,
    All,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Model {
    Symmetric,
    Involutions,
    FixedPointFree,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Solve { .. } => "solve",
            Command::MixedVolume { .. } => "mixed-volume",
            Command::Subdivision { .. } => "subdivision",
            Command::Snf { .. } => "snf",
            Command::Witness { .. } => "witness",
            Command::TraceTest { .. } => "trace-test",
            Command::NpQuery { .. } => "np-query",
            Command::NpReconstruct { .. } => "np-reconstruct",
            Command::Tropical { .. } => "tropical",
            Command::MonodromyProb { .. } => "monodromy-prob",
        }
    }

    fn input_path(&self) -> Option<&PathBuf> {
        match self {
            Command::Solve { input, .. }
            | Command::MixedVolume { input, .. }
            | Command::Subdivision { input, .. }
            | Command::Witness { input, .. }
            | Command::TraceTest { input, .. }
            | Command::NpQuery { input, .. }
            | Command::NpReconstruct { input, .. }
            | Command::Tropical { input, .. } => input.as_ref(),
            Command::Snf { .. } | Command::MonodromyProb { .. } => None,
        }
    }

    fn needs_input(&self) -> bool {
        !matches!(self, Command::Snf { .. } | Command::MonodromyProb { .. })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Complete,
    Partial,
    Error,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Complete => 0,
            Status::Partial => 2,
            Status::Error => 1,
        }
    }
}

/// What a command produced besides its `result` object.
#[derive(Default)]
struct Diagnostics {
    paths_tracked: usize,
    failures: usize,
    partial: bool,
}

/// The finished job: the JSON document and its exit status.
pub struct JobOutput {
    pub json: Value,
    pub status: Status,
}

fn cpair(z: &C64) -> Value {
    json!([z.re, z.im])
}

fn point(x: &[C64]) -> Value {
    Value::Array(x.iter().map(cpair).collect())
}

fn points(xs: &[Vec<C64>]) -> Value {
    Value::Array(xs.iter().map(|x| point(x)).collect())
}

fn qstr(q: &Q) -> Value {
    Value::String(q.to_string())
}

fn path_record(o: &Result<PathOutcome, String>) -> Value {
    match o {
        Ok(p) => json!({
            "status": p.status,
            "endpoint": p.endpoint.as_deref().map(point),
            "winding": p.winding,
            "residual": p.residual,
            "steps": p.steps,
        }),
        Err(e) => json!({ "status": "Failed", "error": e }),
    }
}

impl Cli {
    pub fn tracker_config(&self) -> TrackerConfig {
        let mut cfg = TrackerConfig { seed: self.seed, ..TrackerConfig::default() };
        if let Some(t) = self.tol {
            cfg.final_tol = t;
        }
        if let Some(e) = self.eps_endgame {
            cfg.endgame_eps = e;
        }
        cfg
    }

    fn oracle_options(&self) -> OracleOptions {
        OracleOptions { seed: self.seed, ..OracleOptions::default() }
    }

    /// The input text from `--input-json`, `--stdin`, or the positional path.
    fn read_input(&self) -> Result<Option<String>, String> {
        if !self.command.needs_input() {
            return Ok(None);
        }
        if let Some(s) = &self.input_json {
            return Ok(Some(s.clone()));
        }
        if self.stdin {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s).map_err(|e| format!("reading stdin: {e}"))?;
            return Ok(Some(s));
        }
        match self.command.input_path() {
            Some(p) => std::fs::read_to_string(p).map(Some).map_err(|e| format!("reading {}: {e}", p.display())),
            None => Err("no input: give a file, --stdin or --input-json".into()),
        }
    }

    fn check_path_budget(&self, count: usize) -> Result<(), String> {
        match self.max_paths {
            Some(m) if count > m => Err(format!("{count} paths exceed --max-paths {m}")),
            _ => Ok(()),
        }
    }
}

/// Run one job. Never panics on bad input; errors become `Status::Error`.
pub fn run(cli: &Cli) -> JobOutput {
    let start = Instant::now();
    let mut digest = Value::Null;
    let outcome = cli.read_input().and_then(|text| {
        let input = match text {
            Some(t) => {
                let input = Input::parse(&t).map_err(|e| format!("schema error: {e}"))?;
                let hash = Sha256::digest(input.canonical_json().as_bytes());
                digest = Value::String(format!("{hash:x}"));
                Some(input)
            }
            None => None,
        };
        dispatch(cli, input.as_ref())
    });
    let wall_time = start.elapsed().as_secs_f64();
    let (status, result, diag, error) = match outcome {
        Ok((result, d)) => (if d.partial || d.failures > 0 { Status::Partial } else { Status::Complete }, result, d, None),
        Err(e) => (Status::Error, Value::Null, Diagnostics::default(), Some(e)),
    };
    let mut json = json!({
        "command": cli.command.name(),
        "seed": cli.seed,
        "input_digest": digest,
        "result": result,
        "diagnostics": { "paths_tracked": diag.paths_tracked, "failures": diag.failures, "wall_time": wall_time },
    });
    if let Some(e) = error {
        json["error"] = Value::String(e);
    }
    JobOutput { json, status }
}

fn require_input(input: Option<&Input>) -> Result<&Input, String> {
    input.ok_or_else(|| "missing input".to_string())
}

fn require_coefficients(input: &Input) -> Result<&SparseSystem, String> {
    if input.supports_only {
        return Err("this command needs coefficients, but the input is supports_only".into());
    }
    Ok(&input.system)
}

fn dispatch(cli: &Cli, input: Option<&Input>) -> Result<(Value, Diagnostics), String> {
    match &cli.command {
        Command::Solve { method, .. } => solve(cli, require_coefficients(require_input(input)?)?, *method),
        Command::MixedVolume { method, .. } => mixed_volume(cli, require_input(input)?, *method),
        Command::Subdivision { lifts, .. } => subdivision(cli, require_input(input)?, lifts.as_deref()),
        Command::Snf { matrix } => snf(matrix),
        Command::Witness { dim, .. } => witness(cli, require_input(input)?, *dim),
        Command::TraceTest { subset, .. } => trace(cli, require_coefficients(require_input(input)?)?, subset.as_deref()),
        Command::NpQuery { direction, project, .. } => np_query(cli, require_coefficients(require_input(input)?)?, direction, project.as_deref()),
        Command::NpReconstruct { project, .. } => np_reconstruct(cli, require_coefficients(require_input(input)?)?, project.as_deref()),
        Command::Tropical { direction, change, .. } => tropical(cli, require_coefficients(require_input(input)?)?, direction, change),
        Command::MonodromyProb { model, d } => monodromy_prob(*model, *d),
    }
}

fn solve(cli: &Cli, f: &SparseSystem, method: SolveMethod) -> Result<(Value, Diagnostics), String> {
    if !f.is_square() {
        return Err(format!("{} equations in {} variables: the system is not square", f.len(), f.nvars()));
    }
    let cfg = cli.tracker_config();
    let mut diag = Diagnostics::default();
    let mut result = json!({ "method": format!("{method:?}").to_lowercase() });
    match method {
        SolveMethod::Bezout => {
            let bezout: i64 = f.degrees().iter().product();
            cli.check_path_budget(bezout as usize)?;
            let rep = bezout_solve(f, &cfg);
            let sols = sparsehom::tracker::dedup_points(&rep.solutions(), 1e-8);
            diag.paths_tracked = rep.paths();
            diag.failures = rep.failures();
            result["bezout_number"] = json!(bezout);
            result["diverged"] = json!(rep.diverged());
            result["solutions"] = points(&sols);
            result["residuals"] = json!(sols.iter().map(|x| f.residual(x)).collect::<Vec<_>>());
            if cli.trace_paths {
                result["paths"] = Value::Array(rep.outcomes.iter().map(path_record).collect());
            }
        }
        SolveMethod::Polyhedral => {
            let mv = mixed_volume_of_supports_seeded(&f.supports(), cli.seed).map_err(|e| e.to_string())?;
            cli.check_path_budget(mv as usize)?;
            let rep = match polyhedral_solve(f, &cfg) {
                Ok(r) => r,
                Err(PolyhedralError::CountShortfall { report, .. }) => {
                    diag.partial = true;
                    *report
                }
                Err(e) => return Err(e.to_string()),
            };
            diag.paths_tracked = rep.paths();
            diag.failures = rep.outcomes.iter().filter(|o| o.is_err()).count();
            result["mixed_volume"] = json!(rep.mixed_volume);
            result["cell_counts"] = json!(rep.cell_counts);
            result["solutions"] = points(&rep.solutions);
            result["residuals"] = json!(rep.solutions.iter().map(|x| f.residual(x)).collect::<Vec<_>>());
            result["certified"] = json!(rep.certified);
            if cli.trace_paths {
                result["paths"] = Value::Array(rep.outcomes.iter().map(path_record).collect());
            }
        }
        SolveMethod::Decomposable => {
            let mv = mixed_volume_of_supports_seeded(&f.supports(), cli.seed).map_err(|e| e.to_string())?;
            cli.check_path_budget(mv as usize)?;
            let dcfg = DecomposableConfig { tracker: cfg, ..DecomposableConfig::default() };
            let sol = solve_decomposable(f, &dcfg).map_err(|e| e.to_string())?;
            diag.paths_tracked = sol.ledger.total();
            diag.partial = sol.solutions.len() < mv as usize;
            result["mixed_volume"] = json!(mv);
            result["solutions"] = points(&sol.solutions);
            result["residuals"] = json!(sol.solutions.iter().map(|x| f.residual(x)).collect::<Vec<_>>());
            result["steps"] = Value::Array(
                sol.steps.iter().map(|s| json!({ "depth": s.depth, "nvars": s.nvars, "kind": s.kind, "detail": s.detail })).collect(),
            );
            result["warnings"] = json!(sol.warnings);
            if cli.trace_paths {
                result["ledger"] = serde_json::to_value(&sol.ledger).expect("serializable");
            }
        }
    }
    Ok((result, diag))
}

fn mixed_volume(cli: &Cli, input: &Input, method: MvChoice) -> Result<(Value, Diagnostics), String> {
    let polys = input
        .system
        .supports()
        .iter()
        .map(|s| convex_hull_int(s).map_err(|e| e.to_string()))
        .collect::<Result<Vec<_>, _>>()?;
    let methods: Vec<(MvMethod, &str)> = match method {
        MvChoice::Alternating => vec![(MvMethod::AlternatingVolume, "alternating")],
        MvChoice::Lattice => vec![(MvMethod::LatticePoints, "lattice")],
        MvChoice::Cells => vec![(MvMethod::MixedCells, "cells")],
        MvChoice::All => vec![(MvMethod::AlternatingVolume, "alternating"), (MvMethod::LatticePoints, "lattice"), (MvMethod::MixedCells, "cells")],
    };
    let mut values = serde_json::Map::new();
    let mut first: Option<Q> = None;
    let mut agree = true;
    for (m, name) in methods {
        let v = mixed_volume_seeded(&polys, m, cli.seed).map_err(|e| e.to_string())?;
        agree &= first.as_ref().is_none_or(|f| *f == v);
        first.get_or_insert(v.clone());
        values.insert(name.into(), qstr(&v));
    }
    if !agree {
        return Err(format!("methods disagree: {values:?}"));
    }
    Ok((json!({ "mixed_volume": qstr(&first.expect("one method")), "methods": values }), Diagnostics::default()))
}

fn subdivision(cli: &Cli, input: &Input, lifts: Option<&str>) -> Result<(Value, Diagnostics), String> {
    let supports = input.system.supports();
    let lifting = match lifts {
        Some(text) => {
            let raw: Vec<Vec<i64>> = serde_json::from_str(text).map_err(|e| format!("--lifts: {e}"))?;
            let q = raw.into_iter().map(|l| l.into_iter().map(qi).collect()).collect();
            LiftedSupport::new(supports.clone(), q).map_err(|e| e.to_string())?
        }
        None => random_fine_mixed_cells(&supports, 1 << 10, cli.seed, 20).map_err(|e| e.to_string())?.0,
    };
    let sub = induce_subdivision(&lifting).map_err(|e| e.to_string())?;
    let cells: Vec<Value> = sub
        .cells
        .iter()
        .map(|c| {
            json!({
                "type": c.type_vec,
                "volume": qstr(&c.volume),
                "omega": c.omega.iter().map(qstr).collect::<Vec<_>>(),
                "subsets": c.subsets,
                "mixed": c.is_mixed(),
            })
        })
        .collect();
    let mut result = json!({
        "lifts": lifting.lifts.iter().map(|l| l.iter().map(qstr).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "cells": cells,
    });
    // Binomial start systems need a fine subdivision of a square system with coefficients.
    if !input.supports_only && input.system.is_square() {
        if let Ok(mixed) = fine_mixed_cells(&lifting) {
            let starts = build_cell_starts(&input.system, &lifting, &mixed).map_err(|e| e.to_string())?;
            result["starts"] = Value::Array(
                starts
                    .iter()
                    .map(|s| json!({ "omega": s.cell.omega.iter().map(qstr).collect::<Vec<_>>(), "solutions": points(&s.solutions) }))
                    .collect(),
            );
        }
    }
    Ok((result, Diagnostics::default()))
}

fn snf(matrix: &str) -> Result<(Value, Diagnostics), String> {
    let a: Vec<Vec<i64>> = serde_json::from_str(matrix).map_err(|e| format!("--matrix: {e}"))?;
    if a.is_empty() || a[0].is_empty() || a.iter().any(|r| r.len() != a[0].len()) {
        return Err("--matrix must be a nonempty rectangular array".into());
    }
    let s = smith_normal_form(&a);
    let big = |m: &Vec<Vec<num_bigint::BigInt>>| -> Value { json!(m.iter().map(|r| r.iter().map(|v| v.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>()) };
    Ok((
        json!({
            "P": big(&s.p),
            "D": big(&s.d),
            "Q": big(&s.q),
            "invariant_factors": s.invariant_factors().iter().map(|v| v.to_string()).collect::<Vec<_>>(),
            "rank": s.rank(),
        }),
        Diagnostics::default(),
    ))
}

fn default_dim(f: &SparseSystem) -> Result<usize, String> {
    f.nvars().checked_sub(f.len()).ok_or_else(|| "more equations than variables; give --dim".to_string())
}

fn witness(cli: &Cli, input: &Input, dim: Option<usize>) -> Result<(Value, Diagnostics), String> {
    let f = require_coefficients(input)?;
    let m = match dim {
        Some(m) => m,
        None => default_dim(f)?,
    };
    let w = witness_construct(f, m, &cli.tracker_config()).map_err(|e| e.to_string())?;
    Ok((
        json!({
            "dim": m,
            "degree": w.degree(),
            "equations": serde_json::to_value(input.to_file()).expect("serializable"),
            "slice": w.slice.rows.iter().map(|r| point(r)).collect::<Vec<_>>(),
            "points": points(&w.points),
            "residuals": w.residuals(),
        }),
        Diagnostics::default(),
    ))
}

fn trace(cli: &Cli, f: &SparseSystem, subset: Option<&[usize]>) -> Result<(Value, Diagnostics), String> {
    let cfg = cli.tracker_config();
    let w = witness_construct(f, default_dim(f)?, &cfg).map_err(|e| e.to_string())?;
    let all: Vec<usize> = (0..w.degree()).collect();
    let subset = subset.unwrap_or(&all);
    if let Some(&bad) = subset.iter().find(|&&i| i >= w.degree()) {
        return Err(format!("subset index {bad} out of range: the witness set has {} points", w.degree()));
    }
    let t = trace_test(&w, subset, cli.seed, TRACE_TOL, &cfg).map_err(|e| e.to_string())?;
    Ok((
        json!({
            "degree": w.degree(),
            "subset": subset,
            "is_complete": t.is_complete,
            "deviation": t.deviation,
            "centroids": t.centroids.iter().map(|c| point(c)).collect::<Vec<_>>(),
            "heuristic": t.heuristic,
        }),
        Diagnostics::default(),
    ))
}

/// Oracle setup: a hypersurface directly, or a curve through a pseudo-witness
/// set of its projection.
fn oracle_setup(cli: &Cli, f: &SparseSystem, project: Option<&[usize]>) -> Result<OracleSetup, String> {
    let cfg = cli.tracker_config();
    if f.len() == 1 && project.is_none() {
        return OracleSetup::from_hypersurface(&f.polys[0], cli.oracle_options(), &cfg).map_err(|e| e.to_string());
    }
    let dim = default_dim(f)?;
    let default: Vec<usize> = (0..=dim).collect();
    let keep = project.unwrap_or(&default);
    if keep.len() != dim + 1 {
        return Err(format!("a {dim}-dimensional variety projects to a hypersurface in {} coordinates, not {}", dim + 1, keep.len()));
    }
    let w = witness_construct(f, dim, &cfg).map_err(|e| e.to_string())?;
    let pw = pseudo_witness(&w, keep, &cfg).map_err(|e| e.to_string())?;
    OracleSetup::from_pseudo_witness(&pw, cli.oracle_options(), &cfg).map_err(|e| e.to_string())
}

fn np_query(cli: &Cli, f: &SparseSystem, direction: &[f64], project: Option<&[usize]>) -> Result<(Value, Diagnostics), String> {
    let setup = oracle_setup(cli, f, project)?;
    if direction.len() != setup.n() {
        return Err(format!("direction has {} entries, expected {}", direction.len(), setup.n()));
    }
    let q = oracle_query(&setup, direction).map_err(|e| e.to_string())?;
    let diag = Diagnostics { paths_tracked: setup.degree(), failures: 0, partial: q.undecided > 0 };
    let beta = match &q.answer {
        sparsehom::hs_oracle::OracleAnswer::Beta(b) => json!(b),
        sparsehom::hs_oracle::OracleAnswer::Eep => Value::Null,
    };
    Ok((
        json!({
            "direction": direction,
            "degree": q.degree,
            "kind": q.kind(),
            "beta": beta,
            "vertex": q.answer.vertex(q.degree),
            "undecided": q.undecided,
        }),
        diag,
    ))
}

fn np_reconstruct(cli: &Cli, f: &SparseSystem, project: Option<&[usize]>) -> Result<(Value, Diagnostics), String> {
    let setup = oracle_setup(cli, f, project)?;
    let mut oracle = HsVertexOracle::new(&setup);
    let opts = ReconstructOptions { degree_bound: Some(setup.degree() as i64), seed: cli.seed, ..ReconstructOptions::default() };
    let rec = reconstruct_polytope(&mut oracle, &opts).map_err(|e| e.to_string())?;
    let vertices = rec.polytope.integer_vertices().ok_or("reconstructed polytope is not integral")?;
    let diag = Diagnostics { paths_tracked: setup.degree() * rec.queries, ..Diagnostics::default() };
    Ok((json!({ "degree": setup.degree(), "vertices": vertices, "queries": rec.queries }), diag))
}

fn tropical(cli: &Cli, f: &SparseSystem, direction: &[f64], change: &str) -> Result<(Value, Diagnostics), String> {
    if direction.len() != f.nvars() {
        return Err(format!("direction has {} entries, expected {}", direction.len(), f.nvars()));
    }
    let dim = default_dim(f)?;
    let mode = if f.len() == 1 {
        MembershipMode::Hypersurface
    } else {
        MembershipMode::General(match change {
            "identity" => ChangeChoice::Identity,
            "random" => ChangeChoice::Random(cli.seed),
            json => {
                let phi: Vec<Vec<i64>> = serde_json::from_str(json).map_err(|e| format!("--change: {e}"))?;
                ChangeChoice::Supplied(MonomialChange::new(phi))
            }
        })
    };
    let oracle = MembershipOracle::new(f, dim, mode, &cli.oracle_options(), &cli.tracker_config()).map_err(|e| e.to_string())?;
    let rep = oracle.query(direction).map_err(|e| e.to_string())?;
    Ok((json!({ "direction": direction, "member": rep.member, "heuristic": rep.heuristic, "changed_direction": rep.omega }), Diagnostics::default()))
}

fn monodromy_prob(model: Model, d: usize) -> Result<(Value, Diagnostics), String> {
    let m = match model {
        Model::Symmetric => ConjugationModel::Symmetric,
        Model::Involutions => ConjugationModel::Involutions,
        Model::FixedPointFree => ConjugationModel::FixedPointFree,
    };
    let p = transitivity_probability(d, m).map_err(|e| e.to_string())?;
    Ok((json!({ "model": m, "d": d, "probability": qstr(&p), "decimal": q_to_f64(&p) }), Diagnostics::default()))
}

/// Serialize the result and write it to `--json-out` or stdout.
pub fn emit(cli: &Cli, out: &JobOutput) -> std::io::Result<()> {
    let mut text = serde_json::to_string_pretty(&out.json).expect("serializable");
    text.push('\n');
    match &cli.json_out {
        Some(p) => std::fs::write(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
