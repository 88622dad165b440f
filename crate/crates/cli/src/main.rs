//! `mfp`: plan distillation factories, emit resource tables, and verify
//! block-code circuits.
//!
//! Exit codes: 0 ok, 1 usage, 2 infeasible, 3 I/O, 4 validation failure.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mfp_core::blocksim::{
    exact_statistics, generate_block_circuit, parse_circuit, run_monte_carlo, validate_circuit,
    Circuit, EXACT_MAX_SITES,
};
use mfp_core::planner::{emit_tables, write_csv, write_json, PgRule};
use mfp_core::report::{self, ExactComparison, PlanReport, SimReport};
use mfp_core::{optimize, Config, Epsilon, Error, Problem, Strategy};

const EXIT_USAGE: u8 = 1;
const EXIT_INFEASIBLE: u8 = 2;
const EXIT_IO: u8 = 3;
const EXIT_VALIDATION: u8 = 4;

#[derive(Parser, Debug)]
#[command(name = "mfp", version, about = "Magic-state factory planner")]
struct Cli {
    /// Worker threads for parallel search and sampling (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// key = value file overriding the cost model and search grid.
    #[arg(long, global = true, env = "MFP_CONFIG")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Optimize one distillation schedule.
    Plan(PlanArgs),
    /// Emit the resource tables over a grid of error rates.
    Table(TableArgs),
    /// Monte Carlo simulation of a block protocol circuit.
    Simulate(SimulateArgs),
    /// Exhaustive fault check of a block protocol circuit.
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Human,
    Json,
    Csv,
}

#[derive(Args, Debug)]
struct PlanArgs {
    #[arg(long)]
    pin: f64,
    #[arg(long)]
    pout: f64,
    #[arg(long, default_value = "best")]
    strategy: Strategy,
    /// Gate error rate (default: pin / 10).
    #[arg(long)]
    pg: Option<f64>,
    /// Pin the slack parameter instead of scanning the grid.
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long, value_enum, default_value = "human")]
    format: Format,
}

#[derive(Args, Debug)]
struct TableArgs {
    #[arg(long, value_delimiter = ',', default_value = "1e-2,1e-3,1e-4")]
    pin_list: Vec<f64>,
    /// Either `hi:lo` (every decade from hi down to lo) or a comma list.
    #[arg(long, default_value = "1e-5:1e-20")]
    pout_range: String,
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "15-1,one_block,two_block"
    )]
    strategies: Vec<Strategy>,
    /// Fixed gate error rate (default: pin / 10 per row).
    #[arg(long)]
    pg: Option<f64>,
    /// Output file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Args, Debug)]
#[command(group = clap::ArgGroup::new("source").required(true).args(["k", "circuit"]))]
struct SimulateArgs {
    #[arg(long, allow_negative_numbers = true)]
    k: Option<i64>,
    #[arg(long)]
    circuit: Option<PathBuf>,
    #[arg(long)]
    p: f64,
    #[arg(long, default_value_t = 100_000)]
    shots: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args, Debug)]
#[command(group = clap::ArgGroup::new("source").required(true).args(["k", "circuit"]))]
struct ValidateArgs {
    #[arg(long, allow_negative_numbers = true)]
    k: Option<i64>,
    #[arg(long)]
    circuit: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

/// A failure carrying its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::DistanceInfeasible { .. }
            | Error::TooManyLevels { .. }
            | Error::DegenerateTarget { .. }
            | Error::Infeasible(_) => EXIT_INFEASIBLE,
            Error::Io { .. } => EXIT_IO,
            _ => EXIT_USAGE,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

fn io_failure(path: &Path, e: io::Error) -> Failure {
    Failure {
        code: EXIT_IO,
        message: format!("{}: {e}", path.display()),
    }
}

type CmdResult = Result<ExitCode, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> CmdResult {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(usage("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| usage(e.to_string()))?;
    }
    let config = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    match cli.command {
        Command::Plan(a) => plan(a, config),
        Command::Table(a) => table(a, config),
        Command::Simulate(a) => simulate(a),
        Command::Validate(a) => validate(a),
    }
}

fn emit(text: &str) -> CmdResult {
    let mut out = io::stdout().lock();
    out.write_all(text.as_bytes())
        .and_then(|_| out.flush())
        .map_err(|e| io_failure(Path::new("<stdout>"), e))?;
    Ok(ExitCode::SUCCESS)
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

fn plan(a: PlanArgs, mut config: Config) -> CmdResult {
    let problem = Problem::new(a.pin, a.pout, a.pg)?;
    if let Some(eps) = a.eps {
        config.search.eps_grid = vec![Epsilon::new(eps)?];
    }
    let schedule = optimize(&problem, a.strategy, &config.cost, &config.search)?;
    match a.format {
        Format::Human => emit(&report::schedule_human(&schedule, a.strategy)),
        Format::Json => emit(&to_json(&PlanReport::new(
            a.strategy,
            &schedule,
            &config.cost,
        ))),
        Format::Csv => Err(usage("plan supports --format human or json")),
    }
}

fn parse_pout_range(s: &str) -> Result<Vec<f64>, Failure> {
    let num = |t: &str| {
        t.trim()
            .parse::<f64>()
            .map_err(|_| usage(format!("invalid number {t:?} in --pout-range")))
    };
    let values = if let Some((hi, lo)) = s.split_once(':') {
        let (hi, lo) = (
            num(hi)?.log10().round() as i32,
            num(lo)?.log10().round() as i32,
        );
        if lo > hi {
            return Err(usage("--pout-range hi:lo needs hi >= lo"));
        }
        (lo..=hi).rev().map(|e| 10f64.powi(e)).collect()
    } else {
        s.split(',').map(num).collect::<Result<Vec<_>, _>>()?
    };
    if values.is_empty() {
        return Err(usage("--pout-range is empty"));
    }
    Ok(values)
}

fn table(a: TableArgs, config: Config) -> CmdResult {
    if a.pin_list.is_empty() || a.strategies.is_empty() {
        return Err(usage("--pin-list and --strategies must be nonempty"));
    }
    let p_outs = parse_pout_range(&a.pout_range)?;
    let pg_rule = a.pg.map_or(PgRule::default(), PgRule::Fixed);
    let records = emit_tables(
        &a.pin_list,
        &p_outs,
        pg_rule,
        &a.strategies,
        &config.cost,
        &config.search,
    )?;
    let mut buf = Vec::new();
    let written = match a.format {
        Format::Csv => write_csv(&records, &mut buf),
        Format::Json => write_json(&records, &mut buf),
        Format::Human => return Err(usage("table supports --format csv or json")),
    };
    written.map_err(|e| io_failure(Path::new("<buffer>"), e))?;
    match &a.out {
        Some(path) => {
            fs::write(path, &buf).map_err(|e| io_failure(path, e))?;
            Ok(ExitCode::SUCCESS)
        }
        None => emit(&String::from_utf8(buf).expect("utf-8 table")),
    }
}

fn load_circuit(k: Option<i64>, path: Option<&Path>) -> Result<Circuit, Failure> {
    match (k, path) {
        (_, Some(path)) => {
            let text = fs::read_to_string(path).map_err(|e| io_failure(path, e))?;
            parse_circuit(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
        }
        (Some(k), None) => generate_block_circuit(k).map_err(|e| usage(e.to_string())),
        (None, None) => Err(usage("one of --k or --circuit is required")),
    }
}

fn simulate(a: SimulateArgs) -> CmdResult {
    let circuit = load_circuit(a.k, a.circuit.as_deref())?;
    let stats = run_monte_carlo(&circuit, a.p, a.shots, a.seed)?;
    let exact = if circuit.t_site_count() <= EXACT_MAX_SITES {
        Some(ExactComparison::new(
            &stats,
            &exact_statistics(&circuit, a.p)?,
        ))
    } else {
        None
    };
    let r = SimReport {
        k: circuit.k(),
        t_sites: circuit.t_site_count(),
        stats,
        exact,
    };
    match a.format {
        Format::Json => emit(&to_json(&r)),
        Format::Human => emit(&report::sim_human(&r)),
        Format::Csv => Err(usage("simulate supports --format json or human")),
    }
}

fn validate(a: ValidateArgs) -> CmdResult {
    let circuit = load_circuit(a.k, a.circuit.as_deref())?;
    let v = validate_circuit(&circuit)?;
    match a.format {
        Format::Json => emit(&to_json(&v))?,
        Format::Human => emit(&report::validation_human(&v))?,
        Format::Csv => return Err(usage("validate supports --format json or human")),
    };
    Ok(if v.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_VALIDATION)
    })
}
