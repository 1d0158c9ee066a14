//! Command-line surface: moments, weak/strong errors, rate fits, limit
//! constants, Monte Carlo validation, non-convergence gap curves, and full
//! report generation as CSV/JSON (optional SVG convergence plots).

mod output;
mod report;

use clap::{Args, Parser, Subcommand, ValueEnum};
use output::{fmt_f64, FitRecord, Format, Table, ValidationRecord, Value};
use spde_weak::experiments::{
    self, c0_gap_spectral, c0_gap_temporal, fit_rate_with_refit, mc_validate_cases,
    rate_suite_cases, FitReport, Phi1Grid, RateOutcome, Scheme, Sweep, WeakErrorCase,
    FIT_NOISE_FLOOR,
};
use spde_weak::gaussian::{
    c_alpha_closed_form, expectation_truncated, limit_constant, LimitKind, TestFunction,
};
use spde_weak::mc::{mc_expectation, mc_strong_error, MCConfig, StrongScheme};
use spde_weak::plot::{LogLogChart, Series};
use spde_weak::spectral::{
    alpha_moment, lambda, strong_error_spectral, strong_error_temporal,
    strong_error_temporal_truncated, Law, SeriesPolicy, SeriesStatus,
};
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "spde-weak",
    version,
    about = "Discretization-error analysis for the stochastic heat equation",
    after_help = "The SPDE_THREADS environment variable caps the worker count (0 = auto);\n\
                  results are bit-identical for any setting."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Alpha-norm second moments of a law, with divergence classification.
    Moments(MomentsArgs),
    /// Closed-form weak-error sweep for one test-function family.
    WeakError(WeakErrorArgs),
    /// Mean-square strong-error sweep, optionally validated by coupled MC.
    StrongError(StrongErrorArgs),
    /// Rate fits for the Lipschitz and smooth families on default grids.
    Rates(RatesArgs),
    /// Limit constants of the asymptotic error expansions.
    Constants(ConstantsArgs),
    /// Monte Carlo cross-check of one closed-form expectation.
    McValidate(McValidateArgs),
    /// Non-convergence gap curves over the bounded-continuous witnesses.
    Theorem0(Theorem0Args),
    /// Run every suite and write a directory of CSV artifacts plus index.json.
    Report(report::ReportArgs),
}

#[derive(Args, Clone)]
struct OutputArgs {
    /// Output file (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Also write a log-log SVG next to --out.
    #[arg(long)]
    plot: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum LawKind {
    Exact,
    Galerkin,
    Euler,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SchemeArg {
    Spectral,
    Temporal,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FamilyArg {
    Phi1,
    Phi2,
    Phi3,
    #[value(name = "gauss_exp", alias = "gauss-exp")]
    GaussExp,
}

#[derive(Args)]
struct LawArgs {
    #[arg(long, value_enum)]
    law: LawKind,
    /// Time horizon.
    #[arg(long = "T", default_value_t = 1.0)]
    t: f64,
    /// Galerkin dimension (law = galerkin).
    #[arg(long = "N")]
    n: Option<u64>,
    /// Euler step size (law = euler).
    #[arg(long)]
    dt: Option<f64>,
    /// Euler step count (law = euler; defaults to floor(T/dt)).
    #[arg(long)]
    k: Option<u64>,
}

impl LawArgs {
    fn build(&self) -> spde_weak::Result<Law> {
        match self.law {
            LawKind::Exact => Law::exact(self.t),
            LawKind::Galerkin => Law::galerkin(self.t, self.n.unwrap_or(64)),
            LawKind::Euler => {
                let dt = self.dt.unwrap_or(self.t / 64.0);
                let k = self.k.unwrap_or((self.t / dt).floor() as u64);
                Law::euler(dt, k)
            }
        }
    }

    fn describe(&self) -> String {
        match self.law {
            LawKind::Exact => format!("exact(T={})", self.t),
            LawKind::Galerkin => format!("galerkin(T={}, N={})", self.t, self.n.unwrap_or(64)),
            LawKind::Euler => {
                let dt = self.dt.unwrap_or(self.t / 64.0);
                let k = self.k.unwrap_or((self.t / dt).floor() as u64);
                format!("euler(dt={dt}, k={k})")
            }
        }
    }
}

#[derive(Args)]
struct MomentsArgs {
    #[command(flatten)]
    law: LawArgs,
    /// Regularity exponents to evaluate.
    #[arg(long, value_delimiter = ',', default_value = "0.0,0.2,0.25,0.5,0.75")]
    alpha: Vec<f64>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct WeakErrorArgs {
    #[arg(long, value_enum)]
    scheme: SchemeArg,
    #[arg(long, value_enum)]
    family: FamilyArg,
    /// Lipschitz-family regularity (family = phi3).
    #[arg(long)]
    alpha: Option<f64>,
    /// Fixed member parameters for phi1/phi2 sweeps.
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    m: Option<u64>,
    #[arg(long = "T", default_value_t = 1.0)]
    t: f64,
    /// Spectral grid of Galerkin dimensions.
    #[arg(long = "N", value_delimiter = ',')]
    n_grid: Option<Vec<u64>>,
    /// Temporal grid of coupling indices (dt = T / M^2).
    #[arg(long = "M", value_delimiter = ',')]
    m_grid: Option<Vec<u64>>,
    /// Cross-check every sweep point by common-random-number Monte Carlo.
    #[arg(long)]
    validate: bool,
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 256)]
    dim: u64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct StrongErrorArgs {
    #[arg(long, value_enum)]
    scheme: SchemeArg,
    #[arg(long = "T", default_value_t = 1.0)]
    t: f64,
    #[arg(long = "N", value_delimiter = ',')]
    n_grid: Option<Vec<u64>>,
    /// Temporal grid of step sizes.
    #[arg(long, value_delimiter = ',')]
    dt: Option<Vec<f64>>,
    #[arg(long)]
    validate: bool,
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 256)]
    dim: u64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct RatesArgs {
    #[arg(long, value_enum)]
    scheme: SchemeArg,
    #[arg(long = "T", default_value_t = 1.0)]
    t: f64,
    #[arg(long, value_delimiter = ',', default_value = "0.3,0.375,0.45")]
    alpha: Vec<f64>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ConstantKind {
    #[value(name = "C_alpha", alias = "c_alpha", alias = "c-alpha")]
    CAlpha,
    #[value(name = "Cbar_alpha", alias = "cbar_alpha", alias = "cbar-alpha")]
    CbarAlpha,
    #[value(name = "phi2_exact_limit", alias = "phi2-exact-limit")]
    Phi2ExactLimit,
    #[value(name = "phi2_euler_limit", alias = "phi2-euler-limit")]
    Phi2EulerLimit,
}

#[derive(Args)]
struct ConstantsArgs {
    #[arg(long, value_enum)]
    kind: ConstantKind,
    #[arg(long)]
    alpha: Option<f64>,
    /// Quadrature tolerance.
    #[arg(long, default_value_t = 1e-10)]
    tolerance: f64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct McValidateArgs {
    #[arg(long, value_enum)]
    family: FamilyArg,
    #[command(flatten)]
    law: LawArgs,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    m: Option<u64>,
    #[arg(long, default_value_t = 1_000_000)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 4096)]
    dim: u64,
    #[arg(long)]
    antithetic: bool,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct Theorem0Args {
    #[arg(long, value_enum)]
    scheme: SchemeArg,
    #[arg(long = "T", default_value_t = 1.0)]
    t: f64,
    #[arg(long = "N", value_delimiter = ',')]
    n_grid: Option<Vec<u64>>,
    #[arg(long = "M", value_delimiter = ',')]
    m_grid: Option<Vec<u64>>,
    /// Largest oscillation index searched by the phi2 channel (spectral).
    #[arg(long, default_value_t = 4096)]
    phi2_max_m: u64,
    #[command(flatten)]
    output: OutputArgs,
}

fn main() {
    configure_threads();
    let cli = Cli::parse();
    std::process::exit(run(cli));
}

/// Honor SPDE_THREADS (0 = auto) before any parallel work starts.
fn configure_threads() {
    if let Ok(v) = std::env::var("SPDE_THREADS") {
        if let Ok(n) = v.trim().parse::<usize>() {
            if n > 0 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
}

fn run(cli: Cli) -> i32 {
    let result = match cli.command {
        Command::Moments(args) => cmd_moments(args),
        Command::WeakError(args) => cmd_weak_error(args),
        Command::StrongError(args) => cmd_strong_error(args),
        Command::Rates(args) => cmd_rates(args),
        Command::Constants(args) => cmd_constants(args),
        Command::McValidate(args) => cmd_mc_validate(args),
        Command::Theorem0(args) => cmd_theorem0(args),
        Command::Report(args) => report::cmd_report(args),
    };
    match result {
        Ok(code) => code,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(CliError::Io(err)) => {
            eprintln!("error: {err}");
            1
        }
    }
}

enum CliError {
    Usage(String),
    Io(std::io::Error),
}

impl From<spde_weak::Error> for CliError {
    fn from(e: spde_weak::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

type CmdResult = Result<i32, CliError>;

fn emit(table: &Table, output: &OutputArgs, chart: Option<LogLogChart>) -> CmdResult {
    let rendered = table.render(output.format);
    match &output.out {
        Some(path) => {
            if let Some(dir) = path.parent() {
                if !dir.as_os_str().is_empty() {
                    std::fs::create_dir_all(dir)?;
                }
            }
            std::fs::write(path, rendered)?;
        }
        None => print!("{rendered}"),
    }
    if output.plot {
        let chart = chart.ok_or_else(|| {
            CliError::Usage("--plot is not available for this command".to_string())
        })?;
        let path = output
            .out
            .as_ref()
            .ok_or_else(|| CliError::Usage("--plot requires --out".to_string()))?
            .with_extension("svg");
        std::fs::write(path, chart.render_svg())?;
    }
    Ok(0)
}

fn policy() -> SeriesPolicy {
    SeriesPolicy::default()
}

fn status_str(s: SeriesStatus) -> &'static str {
    match s {
        SeriesStatus::Converged => "converged",
        SeriesStatus::ProvedDivergent => "proved_divergent",
        SeriesStatus::BudgetExhausted => "budget_exhausted",
    }
}

fn cmd_moments(args: MomentsArgs) -> CmdResult {
    let law = args.law.build()?;
    let mut table = Table {
        columns: vec!["alpha", "value", "diverges", "status"],
        ..Default::default()
    };
    table.push_config("command", "moments");
    table.push_config("law", args.law.describe());
    for &alpha in &args.alpha {
        let m = alpha_moment(&law, alpha, &policy())?;
        table.rows.push(vec![
            Value::F64(alpha),
            Value::F64(m.value),
            Value::Bool(m.diverges),
            Value::Str(status_str(m.status).to_string()),
        ]);
    }
    emit(&table, &args.output, None)
}

/// Build the weak-error cases for a command invocation.
fn weak_error_cases(args: &WeakErrorArgs) -> Result<(Vec<WeakErrorCase>, f64), CliError> {
    let scheme = match args.scheme {
        SchemeArg::Spectral => Scheme::Spectral,
        SchemeArg::Temporal => Scheme::Temporal,
    };
    let default_spectral: Vec<u64> = (4..=10).map(|j| 1u64 << j).collect();
    let default_temporal: Vec<u64> = (3..=8).map(|j| 1u64 << j).collect();
    let grid: &[u64] = match scheme {
        Scheme::Spectral => args.n_grid.as_deref().unwrap_or(&default_spectral),
        Scheme::Temporal => args.m_grid.as_deref().unwrap_or(&default_temporal),
    };

    let cases = match args.family {
        FamilyArg::Phi3 => {
            let alpha = args.alpha.unwrap_or(0.375);
            let (cases, expected) = match scheme {
                Scheme::Spectral => {
                    (rate_suite_cases(scheme, Some(alpha), args.t, grid)?, -alpha)
                }
                Scheme::Temporal => {
                    (rate_suite_cases(scheme, Some(alpha), args.t, grid)?, -2.0 * alpha)
                }
            };
            return Ok((cases, expected));
        }
        FamilyArg::GaussExp => {
            let expected = match scheme {
                Scheme::Spectral => -1.0,
                Scheme::Temporal => 0.5,
            };
            return Ok((rate_suite_cases(scheme, None, args.t, grid)?, expected));
        }
        FamilyArg::Phi1 => TestFunction::phi1(args.eps.unwrap_or(1.0), args.m.unwrap_or(256))?,
        FamilyArg::Phi2 => TestFunction::phi2(args.m.unwrap_or(32))?,
    };

    // Fixed-member sweeps for phi1/phi2: the individual error decays.
    let exact = Law::exact(args.t)?;
    let mut out = Vec::new();
    for &idx in grid {
        let (law_b, abscissa) = match scheme {
            Scheme::Spectral => (Law::galerkin(args.t, idx)?, idx as f64),
            Scheme::Temporal => {
                let dt = args.t / (idx * idx) as f64;
                (Law::euler(dt, idx * idx)?, dt)
            }
        };
        out.push(WeakErrorCase { index: idx, abscissa, tf: cases, law_a: exact, law_b });
    }
    Ok((out, 0.0))
}

fn sweep_fit(sweep: &Sweep) -> Option<FitReport> {
    let pts: Vec<(f64, f64)> = sweep
        .points
        .iter()
        .filter(|p| p.error > FIT_NOISE_FLOOR)
        .map(|p| (p.abscissa, p.error))
        .collect();
    fit_rate_with_refit(&pts).ok()
}

fn sweep_chart(title: &str, x_label: &str, sweep: &Sweep, fit: Option<&FitReport>) -> LogLogChart {
    let series = Series {
        label: match fit {
            Some(f) => format!("data (fitted slope {:.4})", f.best().slope),
            None => "data".to_string(),
        },
        points: sweep.points.iter().map(|p| (p.abscissa, p.error)).collect(),
        fit: fit.map(|f| (f.best().slope, f.best().intercept)),
    };
    LogLogChart {
        title: title.to_string(),
        x_label: x_label.to_string(),
        y_label: "error".to_string(),
        series: vec![series],
    }
}

fn family_name(f: FamilyArg) -> &'static str {
    match f {
        FamilyArg::Phi1 => "phi1",
        FamilyArg::Phi2 => "phi2",
        FamilyArg::Phi3 => "phi3",
        FamilyArg::GaussExp => "gauss_exp",
    }
}

fn cmd_weak_error(args: WeakErrorArgs) -> CmdResult {
    let (cases, _) = weak_error_cases(&args)?;
    let scheme = match args.scheme {
        SchemeArg::Spectral => Scheme::Spectral,
        SchemeArg::Temporal => Scheme::Temporal,
    };
    let sweep = experiments::weak_error_sweep(scheme, args.t, &cases, &policy())?;
    let fit = sweep_fit(&sweep);

    let spectral = scheme == Scheme::Spectral;
    let mut table = Table {
        columns: if spectral {
            vec!["N", "lambda_N", "weak_error", "method"]
        } else {
            vec!["M", "dt", "weak_error", "method"]
        },
        ..Default::default()
    };
    table.push_config("command", "weak-error");
    table.push_config("scheme", if spectral { "spectral" } else { "temporal" });
    table.push_config("family", family_name(args.family));
    if let Some(alpha) = args.alpha {
        table.push_config("alpha", alpha);
    }
    table.push_config("T", args.t);
    if args.validate {
        table.push_config("samples", args.samples);
        table.push_config("seed", args.seed);
        table.push_config("dim", args.dim);
    }

    for p in &sweep.points {
        let second = if spectral { lambda(p.index) } else { args.t / (p.index * p.index) as f64 };
        table.rows.push(vec![
            Value::U64(p.index),
            Value::F64(second),
            Value::F64(p.error),
            Value::Str(if spectral { "spectral" } else { "temporal" }.to_string()),
        ]);
    }
    if let Some(f) = &fit {
        let best = f.best();
        table.fit = Some(FitRecord {
            slope: best.slope,
            intercept: best.intercept,
            r2: best.r_squared,
        });
    }

    let mut code = 0;
    if args.validate {
        let cfg = MCConfig {
            samples: args.samples,
            seed: args.seed,
            dim: args.dim,
            antithetic: false,
        };
        let rows = mc_validate_cases(&cases, &cfg, &policy())?;
        let max_z = rows.iter().map(|r| r.z).fold(0.0, f64::max);
        let pass = rows.iter().all(|r| r.passes());
        table.validation = Some(ValidationRecord { pass, max_z });
        if !pass {
            code = 1;
        }
    }

    let x_label = if spectral { "N" } else { "M" };
    let chart = sweep_chart(
        &format!("{} weak error, {}", family_name(args.family), if spectral { "spectral" } else { "temporal" }),
        x_label,
        &sweep,
        fit.as_ref(),
    );
    emit(&table, &args.output, Some(chart))?;
    Ok(code)
}

fn cmd_strong_error(args: StrongErrorArgs) -> CmdResult {
    let mut table = Table::default();
    table.push_config("command", "strong-error");
    table.push_config("T", args.t);
    let cfg = MCConfig { samples: args.samples, seed: args.seed, dim: args.dim, antithetic: false };
    if args.validate {
        table.push_config("samples", args.samples);
        table.push_config("seed", args.seed);
        table.push_config("dim", args.dim);
    }

    let mut max_z: f64 = 0.0;
    let mut points = Vec::new();
    match args.scheme {
        SchemeArg::Spectral => {
            table.push_config("scheme", "spectral");
            table.columns = if args.validate {
                vec!["N", "mean_square_error", "mc_mean", "mc_std_error", "z"]
            } else {
                vec!["N", "mean_square_error"]
            };
            let default: Vec<u64> = (4..=10).map(|j| 1u64 << j).collect();
            let grid = args.n_grid.as_deref().unwrap_or(&default);
            for &n in grid {
                let closed = strong_error_spectral(args.t, n, &policy())?;
                points.push((n as f64, closed));
                let mut row = vec![Value::U64(n), Value::F64(closed)];
                if args.validate {
                    let est = mc_expectation_strong(args.t, StrongScheme::Spectral { n }, &cfg)?;
                    // The estimator sees only the first `dim` modes.
                    let mut truncated = 0.0;
                    let exact = Law::exact(args.t)?;
                    for j in (n + 1)..=cfg.dim {
                        truncated += exact.mode_variance(j);
                    }
                    let z = (est.mean - truncated).abs() / est.std_error.max(f64::MIN_POSITIVE);
                    max_z = max_z.max(z);
                    row.extend([Value::F64(est.mean), Value::F64(est.std_error), Value::F64(z)]);
                }
                table.rows.push(row);
            }
        }
        SchemeArg::Temporal => {
            table.push_config("scheme", "temporal");
            table.columns = if args.validate {
                vec!["dt", "k", "mean_square_error", "mc_mean", "mc_std_error", "z"]
            } else {
                vec!["dt", "k", "mean_square_error"]
            };
            let default: Vec<f64> = (1..=6).map(|j| args.t / 4f64.powi(j)).collect();
            let grid = args.dt.as_deref().unwrap_or(&default);
            for &dt in grid {
                let closed = strong_error_temporal(args.t, dt, &policy())?;
                let k = (args.t / dt).floor() as u64;
                points.push((dt, closed));
                let mut row = vec![Value::F64(dt), Value::U64(k), Value::F64(closed)];
                if args.validate {
                    let est = mc_expectation_strong(args.t, StrongScheme::Temporal { dt }, &cfg)?;
                    let truncated = strong_error_temporal_truncated(args.t, dt, cfg.dim)?;
                    let z = (est.mean - truncated).abs() / est.std_error.max(f64::MIN_POSITIVE);
                    max_z = max_z.max(z);
                    row.extend([Value::F64(est.mean), Value::F64(est.std_error), Value::F64(z)]);
                }
                table.rows.push(row);
            }
        }
    }

    let fat: Vec<(f64, f64)> = points.iter().filter(|p| p.1 > FIT_NOISE_FLOOR).cloned().collect();
    if let Ok(fit) = fit_rate_with_refit(&fat) {
        let best = fit.best();
        table.fit = Some(FitRecord { slope: best.slope, intercept: best.intercept, r2: best.r_squared });
    }
    let mut code = 0;
    if args.validate {
        let pass = max_z <= 3.0;
        table.validation = Some(ValidationRecord { pass, max_z });
        if !pass {
            code = 1;
        }
    }
    let chart = LogLogChart {
        title: "mean-square strong error".to_string(),
        x_label: if matches!(args.scheme, SchemeArg::Spectral) { "N" } else { "dt" }.to_string(),
        y_label: "E|X - X_h|^2".to_string(),
        series: vec![Series {
            label: "closed form".to_string(),
            points,
            fit: table.fit.map(|f| (f.slope, f.intercept)),
        }],
    };
    emit(&table, &args.output, Some(chart))?;
    Ok(code)
}

fn mc_expectation_strong(
    t: f64,
    scheme: StrongScheme,
    cfg: &MCConfig,
) -> Result<spde_weak::mc::Estimate, CliError> {
    Ok(mc_strong_error(t, scheme, cfg)?)
}

fn push_rate_row(table: &mut Table, family: &str, alpha: Option<f64>, out: &RateOutcome, tol: f64) {
    let best = out.fit.best();
    let within = (best.slope - out.expected_slope).abs() <= tol;
    table.rows.push(vec![
        Value::Str(family.to_string()),
        match alpha {
            Some(a) => Value::F64(a),
            None => Value::Str(String::new()),
        },
        Value::F64(best.slope),
        Value::F64(out.expected_slope),
        Value::F64(best.r_squared),
        match out.prefactor_ratio {
            Some(r) => Value::F64(r),
            None => Value::Str(String::new()),
        },
        Value::Bool(within),
    ]);
}

fn cmd_rates(args: RatesArgs) -> CmdResult {
    let mut table = Table {
        columns: vec![
            "family",
            "alpha",
            "slope",
            "expected_slope",
            "r_squared",
            "prefactor_ratio",
            "within_tolerance",
        ],
        ..Default::default()
    };
    table.push_config("command", "rates");
    table.push_config("T", args.t);
    let spectral_grid: Vec<u64> = (4..=10).map(|j| 1u64 << j).collect();
    let temporal_grid: Vec<u64> = (3..=8).map(|j| 1u64 << j).collect();
    match args.scheme {
        SchemeArg::Spectral => {
            table.push_config("scheme", "spectral");
            table.push_config("grid", "N = 2^4..2^10");
            for &alpha in &args.alpha {
                let out =
                    experiments::lipschitz_rate_spectral(args.t, alpha, &spectral_grid, &policy())?;
                push_rate_row(&mut table, "phi3", Some(alpha), &out, 0.05);
            }
            let out = experiments::c2_rate_spectral(args.t, &spectral_grid, &policy())?;
            push_rate_row(&mut table, "gauss_exp", None, &out, 0.05);
        }
        SchemeArg::Temporal => {
            table.push_config("scheme", "temporal");
            table.push_config("grid", "M = 2^3..2^8, dt = T/M^2");
            for &alpha in &args.alpha {
                let out =
                    experiments::lipschitz_rate_temporal(args.t, alpha, &temporal_grid, &policy())?;
                push_rate_row(&mut table, "phi3", Some(alpha), &out, 0.08);
            }
            let out = experiments::c2_rate_temporal(args.t, &temporal_grid, &policy())?;
            push_rate_row(&mut table, "gauss_exp", None, &out, 0.05);
        }
    }
    emit(&table, &args.output, None)
}

fn cmd_constants(args: ConstantsArgs) -> CmdResult {
    let quad = SeriesPolicy { abs_tol: args.tolerance, ..Default::default() };
    let (kind, name) = match args.kind {
        ConstantKind::CAlpha => (
            LimitKind::CAlpha { alpha: args.alpha.ok_or_else(|| CliError::Usage("--kind c-alpha requires --alpha".into()))? },
            "C_alpha",
        ),
        ConstantKind::CbarAlpha => (
            LimitKind::CbarAlpha { alpha: args.alpha.ok_or_else(|| CliError::Usage("--kind cbar-alpha requires --alpha".into()))? },
            "Cbar_alpha",
        ),
        ConstantKind::Phi2ExactLimit => (LimitKind::Phi2ExactLimit, "Phi2ExactLimit"),
        ConstantKind::Phi2EulerLimit => (LimitKind::Phi2EulerLimit, "Phi2EulerLimit"),
    };
    let c = limit_constant(kind, &quad)?;
    let mut table = Table {
        columns: vec!["kind", "alpha", "value", "quad_error", "closed_form"],
        ..Default::default()
    };
    table.push_config("command", "constants");
    table.push_config("tolerance", fmt_f64(args.tolerance));
    let closed = match kind {
        LimitKind::CAlpha { alpha } => Value::F64(c_alpha_closed_form(alpha)?),
        LimitKind::Phi2ExactLimit => {
            Value::F64((-1.0 / (2.0 * std::f64::consts::PI.powi(2))).exp())
        }
        _ => Value::Str(String::new()),
    };
    table.rows.push(vec![
        Value::Str(name.to_string()),
        match args.alpha {
            Some(a) => Value::F64(a),
            None => Value::Str(String::new()),
        },
        Value::F64(c.value),
        Value::F64(c.quad_error),
        closed,
    ]);
    emit(&table, &args.output, None)
}

fn cmd_mc_validate(args: McValidateArgs) -> CmdResult {
    let law = args.law.build()?;
    let tf = match args.family {
        FamilyArg::Phi1 => TestFunction::phi1(args.eps.unwrap_or(1.0), args.m.unwrap_or(256))?,
        FamilyArg::Phi2 => TestFunction::phi2(args.m.unwrap_or(32))?,
        FamilyArg::Phi3 => TestFunction::phi3(args.alpha.unwrap_or(0.375), args.m.unwrap_or(1))?,
        FamilyArg::GaussExp => TestFunction::gauss_exp(),
    };
    let cfg = MCConfig {
        samples: args.samples,
        seed: args.seed,
        dim: args.dim,
        antithetic: args.antithetic,
    };
    let closed = expectation_truncated(&tf, &law, cfg.dim, &policy())?;
    let est = mc_expectation(&law, &tf, &cfg)?;
    let z = (est.mean - closed).abs() / est.std_error.max(f64::MIN_POSITIVE);
    let pass = z <= 3.0;

    let mut table = Table {
        columns: vec!["family", "law", "closed_form", "mc_mean", "mc_std_error", "z", "pass"],
        ..Default::default()
    };
    table.push_config("command", "mc-validate");
    table.push_config("samples", args.samples);
    table.push_config("seed", args.seed);
    table.push_config("dim", args.dim);
    table.push_config("antithetic", args.antithetic);
    table.rows.push(vec![
        Value::Str(family_name(args.family).to_string()),
        Value::Str(args.law.describe()),
        Value::F64(closed),
        Value::F64(est.mean),
        Value::F64(est.std_error),
        Value::F64(z),
        Value::Bool(pass),
    ]);
    table.validation = Some(ValidationRecord { pass, max_z: z });
    emit(&table, &args.output, None)?;
    Ok(if pass { 0 } else { 1 })
}

fn cmd_theorem0(args: Theorem0Args) -> CmdResult {
    let mut table = Table::default();
    table.push_config("command", "theorem0");
    table.push_config("T", args.t);
    let phi1_grid = Phi1Grid::default();
    let mut chart_points = Vec::new();
    match args.scheme {
        SchemeArg::Spectral => {
            table.push_config("scheme", "spectral");
            table.push_config("phi2_max_m", args.phi2_max_m);
            table.columns = vec!["N", "phi2_gap", "phi2_m", "phi1_gap", "phi1_eps", "phi1_m"];
            let default: Vec<u64> = (4..=9).map(|j| 1u64 << j).collect();
            let grid = args.n_grid.as_deref().unwrap_or(&default);
            let rows = c0_gap_spectral(args.t, grid, args.phi2_max_m, &phi1_grid, &policy())?;
            for r in rows {
                chart_points.push((r.index as f64, r.phi2_gap));
                table.rows.push(vec![
                    Value::U64(r.index),
                    Value::F64(r.phi2_gap),
                    Value::U64(r.phi2_m),
                    Value::F64(r.phi1_gap),
                    Value::F64(r.phi1_eps),
                    Value::U64(r.phi1_m),
                ]);
            }
        }
        SchemeArg::Temporal => {
            table.push_config("scheme", "temporal");
            table.columns =
                vec!["M", "dt", "phi2_gap", "phi2_m", "phi1_gap", "phi1_eps", "phi1_m"];
            let default: Vec<u64> = (4..=9).map(|j| 1u64 << j).collect();
            let grid = args.m_grid.as_deref().unwrap_or(&default);
            let rows = c0_gap_temporal(args.t, grid, &phi1_grid, &policy())?;
            for r in rows {
                chart_points.push((r.index as f64, r.phi2_gap));
                table.rows.push(vec![
                    Value::U64(r.index),
                    Value::F64(r.dt.unwrap_or(f64::NAN)),
                    Value::F64(r.phi2_gap),
                    Value::U64(r.phi2_m),
                    Value::F64(r.phi1_gap),
                    Value::F64(r.phi1_eps),
                    Value::U64(r.phi1_m),
                ]);
            }
        }
    }
    let chart = LogLogChart {
        title: "weak-error gap over bounded continuous witnesses".to_string(),
        x_label: if matches!(args.scheme, SchemeArg::Spectral) { "N" } else { "M" }.to_string(),
        y_label: "gap".to_string(),
        series: vec![Series { label: "phi2 channel".to_string(), points: chart_points, fit: None }],
    };
    emit(&table, &args.output, Some(chart))?;
    Ok(0)
}
