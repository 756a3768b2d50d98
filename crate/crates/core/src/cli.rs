//! Command orchestration shared by the binary and the validation suite.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use serde_json::json;
use thiserror::Error;

use crate::config::{ConfigError, Command, Format, RunConfig};
use crate::ensemble::{self, PairModel};
use crate::greens;
use crate::output::{Cell, Table};
use crate::solver::{self, Method, SelfConsistentSolution, SolveError, SweepPoint};
use crate::validation::{self, ValidationOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONVERGENCE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_IO: i32 = 3;

pub const SOLVE_COLUMNS: &[&str] = &[
    "cooperativity",
    "detuning",
    "gamma11",
    "delta11p",
    "s_re",
    "s_im",
    "residual",
    "iterations",
    "method",
    "continuous",
    "converged",
    "status",
];

pub const PAIR_COLUMNS: &[&str] =
    &["cooperativity", "detuning", "r", "s_re", "s_im", "gamma12", "delta12", "delta12_renormalized"];

pub const ENSEMBLE_COLUMNS: &[&str] = &[
    "shape",
    "size",
    "radius",
    "length",
    "pair_model",
    "cooperativity",
    "detuning",
    "rabi",
    "gamma11",
    "delta11p",
    "rho_re",
    "rho_im",
    "gamma_eff",
    "delta_eff",
    "mc_stderr",
    "n_samples",
    "seed",
    "status",
];

pub const VALIDATE_COLUMNS: &[&str] = &["id", "criterion", "passed", "detail"];

/// Command-line overrides applied on top of the config file.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub seed: Option<u64>,
    pub quiet: bool,
    pub threads: Option<usize>,
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error("config error: {0}")]
    Config(#[from] ConfigError),
    #[error("I/O error on {path}: {message}")]
    Io { path: String, message: String },
    #[error("{failed} of {total} points did not converge")]
    Convergence { failed: usize, total: usize },
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Convergence { .. } => EXIT_CONVERGENCE,
            RunError::Config(_) => EXIT_CONFIG,
            RunError::Io { .. } => EXIT_IO,
        }
    }

    /// One-line JSON error record for stderr.
    pub fn record(&self) -> String {
        let v = match self {
            RunError::Config(e) => json!({
                "error": "config",
                "field": e.field_name(),
                "message": e.to_string(),
            }),
            RunError::Io { path, message } => json!({ "error": "io", "path": path, "message": message }),
            RunError::Convergence { failed, total } => json!({
                "error": "convergence",
                "failed": failed,
                "total": total,
                "message": self.to_string(),
            }),
        };
        v.to_string()
    }
}

/// A computed table plus how many of its rows are failures.
#[derive(Debug, Clone)]
pub struct Report {
    pub table: Table,
    pub failures: usize,
}

fn method_name(m: Method) -> &'static str {
    match m {
        Method::FixedPoint => "fixed-point",
        Method::Newton => "newton",
    }
}

fn status(e: &SolveError) -> &'static str {
    match e {
        SolveError::DegenerateBranch { .. } => "no-physical-root",
        SolveError::NoConvergence { .. } => "no-convergence",
        SolveError::SingularSource => "singular-source",
        SolveError::InvalidParams(_) | SolveError::InvalidConfig(_) => "invalid",
    }
}

fn solution_row(c: f64, det: f64, outcome: &Result<SelfConsistentSolution<f64>, SolveError>) -> Vec<Cell> {
    match outcome {
        Ok(s) => vec![
            c.into(),
            det.into(),
            s.gamma11.into(),
            s.delta11p.into(),
            s.s.re.into(),
            s.s.im.into(),
            s.residual_norm.into(),
            s.iterations.into(),
            method_name(s.method).into(),
            s.branch.continuous.into(),
            true.into(),
            "ok".into(),
        ],
        Err(e) => {
            let nan = f64::NAN;
            let (iters, residual) = match e {
                SolveError::NoConvergence { iterations, residual, .. } => (*iterations, *residual),
                _ => (0, nan),
            };
            vec![
                c.into(),
                det.into(),
                nan.into(),
                nan.into(),
                nan.into(),
                nan.into(),
                residual.into(),
                iters.into(),
                "none".into(),
                false.into(),
                false.into(),
                status(e).into(),
            ]
        }
    }
}

fn sweep_report(command: Command, points: &[SweepPoint<f64>]) -> Report {
    let mut table = Table::new(command.name(), SOLVE_COLUMNS);
    let mut failures = 0;
    for p in points {
        failures += p.outcome.is_err() as usize;
        table.push(solution_row(p.cooperativity, p.detuning, &p.outcome));
    }
    Report { table, failures }
}

fn config_error(field: &str, e: impl ToString) -> RunError {
    RunError::Config(ConfigError::Field { field: field.into(), message: e.to_string() })
}

/// Runs a command on a validated config and returns its table without writing it.
pub fn execute(command: Command, cfg: &RunConfig) -> Result<Report, RunError> {
    cfg.validate_for(command)?;
    let solver_cfg = cfg.solver_config();
    let params = cfg.params();
    match command {
        Command::Solve => {
            let outcome = solver::solve(&params, &solver_cfg);
            Ok(sweep_report(
                command,
                &[SweepPoint { cooperativity: params.cooperativity, detuning: params.detuning, outcome }],
            ))
        }
        Command::SweepDetuning => {
            let pts = solver::sweep_detuning(params.cooperativity, &cfg.detuning_grid(), &solver_cfg)
                .map_err(|e| config_error("grid.detuning", e))?;
            Ok(sweep_report(command, &pts))
        }
        Command::SweepDensity => {
            let pts = solver::sweep_density(params.detuning, &cfg.cooperativity_grid(), &solver_cfg)
                .map_err(|e| config_error("grid.cooperativity", e))?;
            Ok(sweep_report(command, &pts))
        }
        Command::PairSweep => {
            let mut table = Table::new(command.name(), PAIR_COLUMNS);
            let grid = cfg.separation_grid();
            let sol = match solver::solve(&params, &solver_cfg) {
                Ok(s) => s,
                Err(_) => return Ok(Report { table, failures: grid.len() }),
            };
            for r in grid {
                let p = greens::pair_terms(r, sol.s).map_err(|e| config_error("grid.separation", e))?;
                table.push(vec![
                    params.cooperativity.into(),
                    params.detuning.into(),
                    r.into(),
                    sol.s.re.into(),
                    sol.s.im.into(),
                    p.gamma12.into(),
                    p.delta12.into(),
                    p.delta12_renormalized.into(),
                ]);
            }
            Ok(Report { table, failures: 0 })
        }
        Command::EnsembleSweep => Ok(ensemble_report(cfg)),
        Command::Validate => {
            let opts = ValidationOptions {
                seed: cfg.monte_carlo.seed.expect("validated"),
                mc_samples: cfg.monte_carlo.n_samples,
            };
            let mut table = Table::new(command.name(), VALIDATE_COLUMNS);
            let mut failures = 0;
            for r in validation::run_all(&opts) {
                failures += !r.passed as usize;
                table.push(vec![(r.id as u64).into(), r.name.into(), r.passed.into(), r.detail.into()]);
            }
            Ok(Report { table, failures })
        }
    }
}

fn pair_model_name(m: PairModel) -> &'static str {
    match m {
        PairModel::Renormalized => "renormalized",
        PairModel::Bare => "bare",
        PairModel::Off => "off",
    }
}

fn ensemble_report(cfg: &RunConfig) -> Report {
    let params = cfg.params();
    let geo = &cfg.geometry;
    let sizes = cfg.size_grid();
    let family: Vec<_> = sizes.iter().map(|&s| geo.at_size(s)).collect();
    let mc = ensemble::McConfig::new(cfg.monte_carlo.n_samples, cfg.monte_carlo.seed.expect("validated"));
    let solution = solver::solve(&params, &cfg.solver_config());
    let results: Vec<Result<ensemble::EnsembleResult, String>> = match &solution {
        Ok(sol) => ensemble::sweep_geometry(&family, sol, &params, geo.pair_model, &mc)
            .into_iter()
            .map(|r| r.map_err(|e| e.to_string()))
            .collect(),
        Err(e) => family.iter().map(|_| Err(status(e).to_string())).collect(),
    };
    let (g11, d11) = solution.as_ref().map_or((f64::NAN, f64::NAN), |s| (s.gamma11, s.delta11p));
    let mut table = Table::new(Command::EnsembleSweep.name(), ENSEMBLE_COLUMNS);
    let mut failures = 0;
    for (g, res) in family.iter().zip(results) {
        let (shape, radius, length) = match *g {
            ensemble::Geometry::Sphere { radius, .. } => ("sphere", radius, f64::NAN),
            ensemble::Geometry::Cylinder { radius, length, .. } => ("cylinder", radius, length),
        };
        let nan = f64::NAN;
        let (rho, ge, de, se, st) = match &res {
            Ok(r) => (r.rho_eff, r.gamma_eff, r.delta_eff, r.mc_stderr, "ok".to_string()),
            Err(e) => {
                failures += 1;
                (num_complex::Complex64::new(nan, nan), nan, nan, nan, e.clone())
            }
        };
        table.push(vec![
            shape.into(),
            g.size().into(),
            radius.into(),
            length.into(),
            pair_model_name(geo.pair_model).into(),
            params.cooperativity.into(),
            params.detuning.into(),
            params.rabi.into(),
            g11.into(),
            d11.into(),
            rho.re.into(),
            rho.im.into(),
            ge.into(),
            de.into(),
            se.into(),
            mc.n_samples.into(),
            mc.seed.into(),
            st.into(),
        ]);
    }
    Report { table, failures }
}

/// Applies overrides, computes, and writes the output. Output is written even when
/// some points fail; the failure is reported afterwards through the error.
pub fn run(command: Command, mut cfg: RunConfig, opts: &RunOptions) -> Result<Report, RunError> {
    if let Some(f) = opts.format {
        cfg.output.format = f;
    }
    if let Some(seed) = opts.seed {
        cfg.monte_carlo.seed = Some(seed);
    }
    if let Some(out) = &opts.out {
        cfg.output.path = Some(out.to_string_lossy().into_owned());
    }
    if let Some(c) = cfg.command {
        if c != command {
            return Err(config_error(
                "command",
                format!("config is for `{}` but `{}` was requested", c.name(), command.name()),
            ));
        }
    }
    cfg.validate_for(command)?;
    let report = match opts.threads {
        Some(n) => {
            if n == 0 {
                return Err(config_error("threads", "threads must be >= 1"));
            }
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| config_error("threads", e))?;
            pool.install(|| execute(command, &cfg))?
        }
        None => execute(command, &cfg)?,
    };
    let bytes = report.table.to_bytes(cfg.output.format, cfg.output.precision);
    match &cfg.output.path {
        Some(path) => fs::write(path, &bytes).map_err(|e| RunError::Io { path: path.clone(), message: e.to_string() })?,
        None => io::stdout()
            .write_all(&bytes)
            .map_err(|e| RunError::Io { path: "<stdout>".into(), message: e.to_string() })?,
    }
    if !opts.quiet {
        if command == Command::Validate {
            for row in &report.table.rows {
                if let [Cell::Int(id), Cell::Text(name), Cell::Bool(ok), Cell::Text(detail)] = row.as_slice() {
                    let tag = if *ok { "PASS" } else { "FAIL" };
                    eprintln!("[{tag}] criterion {id:>2} {name}: {detail}");
                }
            }
        }
        let target = cfg.output.path.as_deref().unwrap_or("stdout");
        eprintln!("{}: {} rows to {target}, {} failed", command.name(), report.table.rows.len(), report.failures);
    }
    if report.failures > 0 {
        return Err(RunError::Convergence { failed: report.failures, total: report.table.rows.len().max(report.failures) });
    }
    Ok(report)
}
