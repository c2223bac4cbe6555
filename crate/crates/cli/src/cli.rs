//! Command-line interface: argument definitions and subcommand drivers.
//!
//! Every driver writes a flat `key = value` report to the supplied writer.
//! Exit codes: 0 success, 1 numerical or threshold failure, 2 usage or
//! domain error (including malformed input files).

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use hankel_nuclear_core::certificate::{certify, Thresholds};
use hankel_nuclear_core::experiments::{single_pole_response, GridSpec, SweepSummary};
use hankel_nuclear_core::hankel::{materialize, nuclear_norm, numerical_rank, HankelSpec};
use hankel_nuclear_core::solver::{
    complete, oracle_complete, rank_landscape, OracleGrid, SolverConfig, RANK_TOL,
};
use hankel_nuclear_core::Error as CoreError;

use crate::formats::{self, float, FormatError};
use crate::{probe, runner};

#[derive(Debug, Parser)]
#[command(
    name = "hankel-nuclear",
    version,
    about = "Nuclear-norm completion of Hankel matrices"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the dual certificate for a single pole and report its residuals.
    Certify(CertifyArgs),
    /// Complete one Hankel matrix from its pinned anti-diagonals.
    Complete(CompleteArgs),
    /// Brute-force grid minimizer and rank landscape (n = 2 or 3 only).
    Oracle(OracleArgs),
    /// Recovery sweep over a grid of poles.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Args)]
pub struct SolverArgs {
    /// ADMM penalty parameter.
    #[arg(long, default_value_t = 1.0)]
    pub rho: f64,
    #[arg(long, default_value_t = 1e-10)]
    pub eps_abs: f64,
    #[arg(long, default_value_t = 1e-10)]
    pub eps_rel: f64,
    #[arg(long, default_value_t = 100_000)]
    pub max_iter: usize,
    /// Relative Frobenius error below which a completion counts as recovered.
    #[arg(long, default_value_t = 1e-5)]
    pub recovery_tol: f64,
}

impl SolverArgs {
    pub fn config(&self) -> SolverConfig {
        SolverConfig {
            rho: self.rho,
            eps_abs: self.eps_abs,
            eps_rel: self.eps_rel,
            max_iter: self.max_iter,
            recovery_tol: self.recovery_tol,
        }
    }
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    /// Pole, |h| < 1.
    #[arg(long, allow_negative_numbers = true)]
    pub h: f64,
    #[arg(long)]
    pub n: usize,
    /// Also write the report to this file.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Number of random unit deviations to probe the certificate with.
    #[arg(long, default_value_t = 0)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Multiply every residual bound by this factor.
    #[arg(long, default_value_t = 1.0)]
    pub tol_scale: f64,
}

#[derive(Debug, Args)]
pub struct PinnedSource {
    /// Use the single-pole response 1, h, h², ... as pinned values.
    #[arg(
        long,
        allow_negative_numbers = true,
        conflicts_with = "pinned_file",
        requires = "n"
    )]
    pub h: Option<f64>,
    /// File with one pinned value per line (`#` starts a comment).
    #[arg(long, required_unless_present = "h")]
    pub pinned_file: Option<PathBuf>,
    /// Matrix dimension; must match the file length when both are given.
    #[arg(long)]
    pub n: Option<usize>,
}

#[derive(Debug, Args)]
pub struct CompleteArgs {
    #[command(flatten)]
    pub source: PinnedSource,
    /// Write the completed anti-diagonals as `k,value` CSV.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub source: PinnedSource,
    /// Grid step; defaults to 1e-4 for n = 2 and 1e-2 for n = 3.
    #[arg(long)]
    pub step: Option<f64>,
    #[arg(long, allow_negative_numbers = true, default_value_t = -2.0)]
    pub lo: f64,
    #[arg(long, allow_negative_numbers = true, default_value_t = 2.0)]
    pub hi: f64,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, default_value_t = 10)]
    pub n: usize,
    #[arg(long, allow_negative_numbers = true, default_value_t = GridSpec::STANDARD.min)]
    pub h_min: f64,
    #[arg(long, allow_negative_numbers = true, default_value_t = GridSpec::STANDARD.max)]
    pub h_max: f64,
    #[arg(long, default_value_t = GridSpec::STANDARD.step)]
    pub step: f64,
    /// Per-cell CSV output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Gridded `diff` output, one row per h1 (two-pole sweeps only).
    #[arg(long, conflicts_with = "single_pole")]
    pub heatmap: Option<PathBuf>,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long)]
    pub workers: Option<usize>,
    /// Sweep single poles h1 = h2 instead of the full two-pole grid.
    #[arg(long)]
    pub single_pole: bool,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("invalid input: {0}")]
    Input(FormatError),
    #[error("{0}")]
    Failed(String),
    #[error(transparent)]
    Core(CoreError),
    #[error(transparent)]
    Output(FormatError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Input(_) => 2,
            CliError::Core(e) if is_domain_error(e) => 2,
            _ => 1,
        }
    }
}

fn is_domain_error(e: &CoreError) -> bool {
    match e {
        CoreError::UnstablePole { .. }
        | CoreError::Dimension { .. }
        | CoreError::Length { .. }
        | CoreError::InvalidParameter { .. }
        | CoreError::UnsupportedSize { .. } => true,
        CoreError::Cell { source, .. } => is_domain_error(source),
        _ => false,
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        CliError::Core(e)
    }
}

pub fn run(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Certify(a) => run_certify(&a, out),
        Command::Complete(a) => run_complete(&a, out),
        Command::Oracle(a) => run_oracle(&a, out),
        Command::Sweep(a) => run_sweep(&a, out),
    }
}

struct Report(Vec<(String, String)>);

impl Report {
    fn new() -> Self {
        Report(Vec::new())
    }

    fn push(&mut self, key: impl Into<String>, value: impl ToString) {
        self.0.push((key.into(), value.to_string()));
    }

    fn real(&mut self, key: impl Into<String>, value: f64) {
        self.push(key, float(value));
    }

    fn emit(&self, out: &mut dyn Write, file: Option<&PathBuf>) -> Result<(), CliError> {
        let text = formats::key_values(&self.0);
        out.write_all(text.as_bytes())?;
        if let Some(path) = file {
            formats::write_text(path, &text).map_err(CliError::Output)?;
        }
        Ok(())
    }
}

fn run_certify(a: &CertifyArgs, out: &mut dyn Write) -> Result<(), CliError> {
    if !(a.tol_scale.is_finite() && a.tol_scale > 0.0) {
        return Err(CliError::Usage(format!(
            "--tol-scale must be positive and finite, got {}",
            a.tol_scale
        )));
    }
    let set = certify(a.h, a.n)?;
    let base = Thresholds::for_case(a.h, a.n);
    let thresholds = Thresholds {
        identity: base.identity * a.tol_scale,
        spectral: base.spectral * a.tol_scale,
        trace: base.trace * a.tol_scale,
        reduction: base.reduction * a.tol_scale,
    };
    let ctx = &set.context;

    let mut r = Report::new();
    r.real("h", a.h);
    r.push("n", a.n);
    r.real("r2", ctx.r2());
    r.real("s", ctx.s());
    r.real("m0_spectral_norm", set.residuals.m0_spectral_norm);
    r.real("m0_spectral_target", ctx.m0_norm_target());
    let mut failures = Vec::new();
    for (name, value, bound) in set.checks(&thresholds) {
        r.real(name, value);
        r.real(format!("{name}.bound"), bound);
        if value.is_nan() || value > bound {
            failures.push(format!("{name} = {value:e} exceeds {bound:e}"));
        }
    }
    if a.trials > 0 {
        let p = probe::probe(&set, a.trials, a.seed)?;
        r.push("trials", p.trials);
        r.push("seed", a.seed);
        r.push("lemma_failures", p.lemma_failures);
        r.real("lemma_min_margin", p.min_lemma_margin);
        r.push("null_space_hits", p.null_space_hits);
        r.real("m1_max_spectral_norm", p.max_m1_spectral_norm);
        r.real("m1_max_trace_error", p.max_m1_trace_error);
        if p.lemma_failures > 0 {
            failures.push(format!(
                "lemma condition failed for {} deviations",
                p.lemma_failures
            ));
        }
        if p.null_space_hits > 0 {
            failures.push(format!("QHQ vanished for {} deviations", p.null_space_hits));
        }
        if p.max_m1_spectral_norm > 1.0 {
            failures.push(format!(
                "M1 spectral norm {:e} exceeds 1",
                p.max_m1_spectral_norm
            ));
        }
    }
    r.push("status", if failures.is_empty() { "pass" } else { "fail" });
    r.emit(out, a.out.as_ref())?;

    if failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Failed(failures.join("; ")))
    }
}

/// Pinned values plus the single-pole reference when one is known.
fn load_pinned(src: &PinnedSource) -> Result<(Vec<f64>, Option<HankelSpec>), CliError> {
    if let Some(h) = src.h {
        let n = src
            .n
            .ok_or_else(|| CliError::Usage("--h requires --n".into()))?;
        if !(h.is_finite() && h.abs() < 1.0) {
            return Err(CoreError::UnstablePole { h }.into());
        }
        if n < 2 {
            return Err(CliError::Usage(format!("n must be at least 2, got {n}")));
        }
        let reference = HankelSpec::new(n, single_pole_response(h, 2 * n - 1))?;
        return Ok((reference.pinned().to_vec(), Some(reference)));
    }
    let path = src
        .pinned_file
        .as_ref()
        .ok_or_else(|| CliError::Usage("one of --h or --pinned-file is required".into()))?;
    let text = formats::read_file(path).map_err(CliError::Input)?;
    let values = formats::parse_pinned(&text).map_err(CliError::Input)?;
    if let Some(n) = src.n {
        if n != values.len() {
            return Err(CliError::Usage(format!(
                "--n {n} does not match the {} values in {}",
                values.len(),
                path.display()
            )));
        }
    }
    Ok((values, None))
}

fn values_line(v: &[f64]) -> String {
    v.iter().map(|&x| float(x)).collect::<Vec<_>>().join(" ")
}

fn run_complete(a: &CompleteArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let cfg = a.solver.config();
    cfg.validate()?;
    let (pinned, reference) = load_pinned(&a.source)?;
    let result = complete(&pinned, &cfg)?;

    let mut r = Report::new();
    r.push("n", pinned.len());
    for (k, v) in result.completed.antidiag().iter().enumerate() {
        r.real(format!("g[{k}]"), *v);
    }
    r.real("nuclear_norm", result.nuclear_norm_hat);
    r.push("iterations", result.iterations);
    r.real("primal_residual", result.primal_residual);
    r.real("dual_residual", result.dual_residual);
    r.push("converged", result.converged);
    if let Some(reference) = &reference {
        r.real(
            "reference_nuclear_norm",
            nuclear_norm(&materialize(reference))?,
        );
        r.real("relative_error", result.relative_error(reference));
        r.push("recovered", result.recovers(reference, cfg.recovery_tol));
    }
    r.emit(out, None)?;
    if let Some(path) = &a.out {
        formats::write_text(path, &formats::antidiag_csv(&result.completed))
            .map_err(CliError::Output)?;
    }

    if result.converged {
        Ok(())
    } else {
        Err(CliError::Failed(format!(
            "solver did not converge within {} iterations",
            cfg.max_iter
        )))
    }
}

fn run_oracle(a: &OracleArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let cfg = a.solver.config();
    cfg.validate()?;
    let (pinned, _) = load_pinned(&a.source)?;
    let n = pinned.len();
    if !(2..=3).contains(&n) {
        return Err(CoreError::UnsupportedSize { n }.into());
    }
    let default = OracleGrid::default_for(n);
    let grid = OracleGrid {
        lo: a.lo,
        hi: a.hi,
        step: a.step.unwrap_or(default.step),
    };

    let oracle = oracle_complete(&pinned, &grid)?;
    let admm = complete(&pinned, &cfg)?;
    let landscape = rank_landscape(&pinned, &grid)?;
    let gap = oracle
        .free()
        .iter()
        .zip(admm.completed.free())
        .map(|(o, a)| (o - a).abs())
        .fold(0.0, f64::max);

    let mut r = Report::new();
    r.push("n", n);
    r.real("grid_step", grid.step);
    r.push("oracle_free", values_line(oracle.free()));
    r.real("oracle_nuclear_norm", nuclear_norm(&materialize(&oracle))?);
    r.push(
        "oracle_rank",
        numerical_rank(&materialize(&oracle), RANK_TOL)?,
    );
    r.push("admm_free", values_line(admm.completed.free()));
    r.real("admm_nuclear_norm", admm.nuclear_norm_hat);
    r.real("max_free_gap", gap);
    r.push("min_rank", landscape.min_rank);
    let minimizers: Vec<_> = landscape.minimizers().collect();
    r.push("min_rank_points", minimizers.len());
    // a full-rank minimum means no grid point is rank deficient; listing
    // arbitrary points would say nothing
    if landscape.min_rank < n {
        for (i, p) in minimizers.iter().take(5).enumerate() {
            r.push(format!("min_rank_point[{i}]"), values_line(&p.free));
        }
    }
    r.emit(out, None)
}

fn run_sweep(a: &SweepArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let cfg = a.solver.config();
    cfg.validate()?;
    let grid = GridSpec {
        min: a.h_min,
        max: a.h_max,
        step: a.step,
    };
    grid.validate()?;
    let workers = a.workers.unwrap_or_else(runner::default_workers);
    if workers == 0 {
        return Err(CliError::Usage("--workers must be at least 1".into()));
    }

    let records = if a.single_pole {
        runner::single_pole_sweep(a.n, &grid.values(), &cfg, workers)?
    } else {
        runner::two_pole_sweep(a.n, &grid, &cfg, workers)?
    };
    if let Some(path) = &a.out {
        formats::emit_csv(&records, path).map_err(CliError::Output)?;
    }
    if let Some(path) = &a.heatmap {
        formats::emit_heatmap(&records, path).map_err(CliError::Output)?;
    }

    let s = SweepSummary::of(&records);
    let mut r = Report::new();
    r.push("n", a.n);
    r.push("cells", s.cells);
    r.push("recovered", s.recovered);
    r.real("recovered_fraction", s.recovered_fraction());
    r.real("max_diff", s.max_diff);
    r.real("min_diff", s.min_diff);
    r.emit(out, None)
}
