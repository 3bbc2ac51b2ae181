//! The `heavytail` command line.
//!
//! Every run echoes its resolved configuration as `#` header lines, then
//! prints `key=value` lines or CSV. Exit codes: 0 success, 1 domain or
//! precondition error, 2 usage error.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};

use clap::{Args, CommandFactory, Parser, Subcommand};

use crate::ar2::{
    region_scan, stability_check, stable_tail_class, write_regions_csv, DEFAULT_KMAX,
};
use crate::dist::{phi_inv_compose_s, s_inv_compose_phi_log};
use crate::monte_carlo::{
    calibrate_risk, in_pool, real, run_tail_experiment, McConfig, Statistic, TGrid,
    DEFAULT_REPLICAS, RISK_A_GRID,
};
use crate::quadform::{autocov_matrix, test_matrix, ArModel, QuadForm};
use crate::tail::{ar1_upper_tail, classify, test_stat_tail, TailLaw};
use crate::{Error, StudentLaw};

/// Environment variable capping the number of simulation workers.
pub const THREADS_ENV: &str = "HEAVYTAIL_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "heavytail",
    version,
    about = "Tail approximations for heavy-tailed AR processes"
)]
struct Cli {
    /// Write output to this file instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Tail regime and coefficient of n·γ_n(k) or of the test statistic.
    Tail(TailArgs),
    /// Dump the quadratic-form matrix C.
    Matrix(ModelArgs),
    /// Scan the AR(2) parameter plane and emit the region CSV.
    Regions(RegionArgs),
    /// Monte Carlo survival curve against the asymptotic law.
    Simulate(SimulateArgs),
    /// Actual type-I risk of the approximate critical value.
    Calibrate(CalibrateArgs),
    /// Student law queries: density, cdf, tail constant, quantiles.
    Dist(DistArgs),
}

#[derive(Debug, Args)]
struct ModelArgs {
    /// First AR coefficient.
    #[arg(long, allow_negative_numbers = true)]
    a: f64,
    /// Second AR coefficient (AR(2) model).
    #[arg(long, allow_negative_numbers = true)]
    b: Option<f64>,
    /// Sample length.
    #[arg(long)]
    n: usize,
    /// Lag of the empirical autocovariance.
    #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
    k: i64,
    /// Null value: use the test statistic n(γ_n(1) − a0·γ̂_n(0)) instead.
    #[arg(long, allow_negative_numbers = true)]
    a0: Option<f64>,
}

#[derive(Debug, Args)]
struct TailArgs {
    /// Tail index of the Student innovations.
    #[arg(long, allow_negative_numbers = true)]
    alpha: f64,
    #[command(flatten)]
    model: ModelArgs,
    /// Evaluate the approximation at this threshold.
    #[arg(long)]
    t: Option<f64>,
}

#[derive(Debug, Args)]
struct RegionArgs {
    #[arg(long, default_value_t = -2.0, allow_negative_numbers = true)]
    a_min: f64,
    #[arg(long, default_value_t = 2.0, allow_negative_numbers = true)]
    a_max: f64,
    #[arg(long, default_value_t = -2.0, allow_negative_numbers = true)]
    b_min: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    b_max: f64,
    /// Grid points per axis.
    #[arg(long, default_value_t = 41)]
    steps: usize,
    /// Largest k searched for a covering region R_k.
    #[arg(long, default_value_t = DEFAULT_KMAX)]
    kmax: usize,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// Tail index of the Student innovations.
    #[arg(long, allow_negative_numbers = true)]
    alpha: f64,
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, default_value_t = 1.0)]
    t_min: f64,
    #[arg(long, default_value_t = 1e6)]
    t_max: f64,
    #[arg(long, default_value_t = 25)]
    points: usize,
    #[arg(long, default_value_t = DEFAULT_REPLICAS)]
    replicas: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct CalibrateArgs {
    /// Tail index of the Student innovations.
    #[arg(long, allow_negative_numbers = true)]
    alpha: f64,
    /// Grid value of a; repeat the flag for several. Defaults to the
    /// 38-point grid from 0.5 to 1.5.
    #[arg(long, allow_negative_numbers = true)]
    a: Vec<f64>,
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    a0: f64,
    #[arg(long, default_value_t = 20)]
    n: usize,
    /// Nominal risk.
    #[arg(long, default_value_t = 0.05)]
    eta: f64,
    #[arg(long, default_value_t = DEFAULT_REPLICAS)]
    replicas: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct DistArgs {
    /// Tail index of the Student innovations.
    #[arg(long, allow_negative_numbers = true)]
    alpha: f64,
    /// Point x for density, cdf and the normal compositions.
    #[arg(long, allow_negative_numbers = true)]
    t: Option<f64>,
    /// Upper-tail probability u for the quantiles.
    #[arg(long)]
    eta: Option<f64>,
}

enum Failure {
    Usage(String),
    Domain(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Domain(format!("i/o error: {e}"))
    }
}

type CliResult = std::result::Result<(), Failure>;

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return 0;
            }
            let _ = write!(err, "{e}");
            if let Some(help) = subcommand_help(&args) {
                let _ = write!(err, "\n{help}");
            }
            return 2;
        }
    };
    let result = match &cli.out {
        Some(path) => File::create(path)
            .map_err(|e| Failure::Domain(format!("cannot create {path}: {e}")))
            .and_then(|f| {
                let mut w = BufWriter::new(f);
                dispatch(&cli.command, &mut w)?;
                w.flush().map_err(Failure::from)
            }),
        None => dispatch(&cli.command, out),
    };
    match result {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "usage error: {msg}");
            2
        }
        Err(Failure::Domain(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            1
        }
    }
}

fn subcommand_help(args: &[OsString]) -> Option<String> {
    let mut cmd = Cli::command();
    cmd.build();
    let name = args.iter().skip(1).find_map(|a| {
        let a = a.to_str()?;
        cmd.find_subcommand(a).map(|_| a.to_string())
    })?;
    Some(cmd.find_subcommand_mut(name)?.render_help().to_string())
}

fn dispatch(command: &Command, out: &mut dyn Write) -> CliResult {
    match command {
        Command::Tail(args) => cmd_tail(args, out),
        Command::Matrix(args) => cmd_matrix(args, out),
        Command::Regions(args) => cmd_regions(args, out),
        Command::Simulate(args) => cmd_simulate(args, out),
        Command::Calibrate(args) => cmd_calibrate(args, out),
        Command::Dist(args) => cmd_dist(args, out),
    }
}

fn lag(k: i64) -> Result<usize, Error> {
    usize::try_from(k).map_err(|_| Error::Domain(format!("lag k must be nonnegative, got {k}")))
}

impl ModelArgs {
    fn model(&self) -> Result<ArModel, Error> {
        match self.b {
            Some(b) => ArModel::ar2(self.a, b, self.n),
            None => ArModel::ar1(self.a, self.n),
        }
    }

    fn statistic(&self) -> Result<Statistic, Error> {
        match self.a0 {
            Some(a0) if self.b.is_some() => Err(Error::Domain(format!(
                "the test statistic (a0 = {a0}) is defined for AR(1) models only"
            ))),
            Some(a0) => Ok(Statistic::TestStat { a0 }),
            None => Ok(Statistic::Autocov { k: lag(self.k)? }),
        }
    }

    fn matrix(&self) -> Result<QuadForm, Error> {
        let model = self.model()?;
        match self.statistic()? {
            Statistic::TestStat { a0 } => test_matrix(self.a, a0, self.n),
            Statistic::Autocov { k } => Ok(autocov_matrix(&model, k)),
        }
    }

    fn echo(&self, out: &mut dyn Write) -> io::Result<()> {
        writeln!(out, "# a={}", real(self.a))?;
        if let Some(b) = self.b {
            writeln!(out, "# b={}", real(b))?;
        }
        writeln!(out, "# n={}", self.n)?;
        match self.a0 {
            Some(a0) => writeln!(out, "# statistic=test a0={}", real(a0)),
            None => writeln!(out, "# statistic=autocov k={}", self.k),
        }
    }

    fn tail(&self, alpha: f64) -> Result<TailLaw, Error> {
        let model = self.model()?;
        let n = self.n;
        match (self.statistic()?, self.b) {
            (Statistic::TestStat { a0 }, _) => test_stat_tail(self.a, a0, n, alpha),
            (Statistic::Autocov { k }, None) => ar1_upper_tail(self.a, n, k, alpha),
            (Statistic::Autocov { k: 1 }, Some(b)) if n >= 3 && stability_check(self.a, b) => {
                stable_tail_class(self.a, b, n, alpha)
            }
            (Statistic::Autocov { k }, Some(_)) => {
                classify(&autocov_matrix(&model, k), alpha).map(|(_, tail)| tail)
            }
        }
    }
}

fn cmd_tail(args: &TailArgs, out: &mut dyn Write) -> CliResult {
    let tail = args.model.tail(args.alpha)?;
    writeln!(out, "# heavytail tail")?;
    writeln!(out, "# alpha={}", real(args.alpha))?;
    args.model.echo(out)?;
    match tail.coef {
        Some(c) => writeln!(out, "regime={} coef={}", tail.regime, real(c))?,
        None => writeln!(out, "regime={} coef=NA", tail.regime)?,
    }
    if let Some(d) = &tail.diagnostic {
        writeln!(out, "diagnostic={d}")?;
    }
    if let Some(t) = args.t {
        let raw = tail.evaluate(t)?;
        writeln!(
            out,
            "t={} p={} raw={}",
            real(t),
            real(raw.clamp(0.0, 1.0)),
            real(raw)
        )?;
    }
    Ok(())
}

fn cmd_matrix(args: &ModelArgs, out: &mut dyn Write) -> CliResult {
    let c = args.matrix()?;
    writeln!(out, "# heavytail matrix")?;
    args.echo(out)?;
    for row in c.matrix().outer_iter() {
        let cells: Vec<String> = row.iter().map(|&v| real(v)).collect();
        writeln!(out, "{}", cells.join(","))?;
    }
    Ok(())
}

fn cmd_regions(args: &RegionArgs, out: &mut dyn Write) -> CliResult {
    let reports = region_scan(
        (args.a_min, args.a_max),
        (args.b_min, args.b_max),
        args.steps,
        args.kmax,
    )?;
    writeln!(out, "# heavytail regions")?;
    writeln!(
        out,
        "# a_min={} a_max={}",
        real(args.a_min),
        real(args.a_max)
    )?;
    writeln!(
        out,
        "# b_min={} b_max={}",
        real(args.b_min),
        real(args.b_max)
    )?;
    writeln!(out, "# steps={} kmax={}", args.steps, args.kmax)?;
    write_regions_csv(out, &reports)?;
    Ok(())
}

/// Worker count from the environment, if set.
fn threads_from_env() -> std::result::Result<Option<usize>, Failure> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(t) if t > 0 => Ok(Some(t)),
            _ => Err(Failure::Usage(format!(
                "{THREADS_ENV} must be a positive integer, got {v:?}"
            ))),
        },
    }
}

fn with_threads<T: Send>(f: impl FnOnce() -> T + Send) -> std::result::Result<T, Failure> {
    match threads_from_env()? {
        Some(t) => Ok(in_pool(t, f)?),
        None => Ok(f()),
    }
}

fn cmd_simulate(args: &SimulateArgs, out: &mut dyn Write) -> CliResult {
    let cfg = McConfig::new(
        args.model.model()?,
        args.model.statistic()?,
        StudentLaw::new(args.alpha)?,
        args.replicas,
        args.seed,
        TGrid::log_spaced(args.t_min, args.t_max, args.points)?,
    )?;
    let est = with_threads(|| run_tail_experiment(&cfg))??;
    writeln!(out, "# heavytail simulate")?;
    writeln!(out, "# alpha={}", real(args.alpha))?;
    args.model.echo(out)?;
    writeln!(
        out,
        "# t_min={} t_max={} points={}",
        real(args.t_min),
        real(args.t_max),
        args.points
    )?;
    writeln!(out, "# replicas={} seed={}", args.replicas, args.seed)?;
    match est.theory.coef {
        Some(c) => writeln!(out, "# regime={} coef={}", est.theory.regime, real(c))?,
        None => writeln!(
            out,
            "# regime={} coef=NA theory_unavailable=true",
            est.theory.regime
        )?,
    }
    est.write_csv(out)?;
    Ok(())
}

fn cmd_calibrate(args: &CalibrateArgs, out: &mut dyn Write) -> CliResult {
    let grid: Vec<f64> = if args.a.is_empty() {
        RISK_A_GRID.to_vec()
    } else {
        args.a.clone()
    };
    let table = with_threads(|| {
        calibrate_risk(
            &grid,
            args.a0,
            args.n,
            args.alpha,
            args.eta,
            args.replicas,
            args.seed,
        )
    })??;
    writeln!(out, "# heavytail calibrate")?;
    writeln!(
        out,
        "# alpha={} a0={} n={}",
        real(args.alpha),
        real(args.a0),
        args.n
    )?;
    writeln!(
        out,
        "# eta={} replicas={} seed={}",
        real(args.eta),
        args.replicas,
        args.seed
    )?;
    let grid_text: Vec<String> = grid.iter().map(|&a| real(a)).collect();
    writeln!(out, "# a_grid={}", grid_text.join(" "))?;
    if !table.skipped.is_empty() {
        let skipped: Vec<String> = table.skipped.iter().map(|&a| real(a)).collect();
        writeln!(out, "# skipped (a <= a0)={}", skipped.join(" "))?;
    }
    table.write_csv(out)?;
    Ok(())
}

fn cmd_dist(args: &DistArgs, out: &mut dyn Write) -> CliResult {
    let law = StudentLaw::new(args.alpha)?;
    writeln!(out, "# heavytail dist")?;
    writeln!(out, "# alpha={}", real(args.alpha))?;
    writeln!(out, "k_s={}", real(law.k_s()))?;
    writeln!(out, "tail_constant={}", real(law.tail_constant()))?;
    if let Some(x) = args.t {
        if !x.is_finite() {
            return Err(Error::Domain(format!("x must be finite, got {x}")).into());
        }
        writeln!(out, "x={}", real(x))?;
        writeln!(out, "density={}", real(law.density(x)))?;
        writeln!(out, "cdf={}", real(law.cdf(x)))?;
        writeln!(out, "sf={}", real(law.sf(x)))?;
        let comp = phi_inv_compose_s(&law, x);
        writeln!(out, "phi_inv_s={}", real(comp.exact))?;
        if let Some(e) = comp.expansion {
            writeln!(out, "phi_inv_s_expansion={}", real(e))?;
        }
        if x > 0.0 {
            let comp = s_inv_compose_phi_log(&law, x)?;
            writeln!(out, "log_s_inv_phi={}", real(comp.exact))?;
            if let Some(e) = comp.expansion {
                writeln!(out, "log_s_inv_phi_expansion={}", real(e))?;
            }
        }
    }
    if let Some(u) = args.eta {
        writeln!(out, "u={}", real(u))?;
        writeln!(out, "quantile_tail={}", real(law.quantile_tail(u)?))?;
        writeln!(out, "upper_quantile={}", real(law.upper_quantile(u)?))?;
    }
    Ok(())
}
