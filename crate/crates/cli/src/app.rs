//! Argument parsing and dispatch.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use npcpt_core::Penalty;

use crate::bench::run_bench;
use crate::detect::{parse_k, run_detect, CostChoice, DetectOptions, Selection};
use crate::error::{CliError, Result};
use crate::ingest::{ColumnSpec, HeaderMode};

#[derive(Debug, Parser)]
#[command(name = "npcpt", version, about = "Nonparametric penalized changepoint detection")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Segment a series from a CSV file.
    Detect(DetectArgs),
    /// Run a simulation study from a config file.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
struct DetectArgs {
    /// Input CSV, one observation per row.
    input: PathBuf,
    #[arg(long, value_enum, default_value = "np")]
    cost: CostChoice,
    /// Number of quantiles for `--cost np`: `auto` or a positive integer.
    #[arg(long = "K", default_value = "auto")]
    k: String,
    /// Penalty per changepoint: a number or `logn`, `2logn`, `3logn`, ...
    #[arg(long, conflicts_with = "crops")]
    penalty: Option<String>,
    /// Every optimal segmentation for penalties in [MIN, MAX].
    #[arg(long, num_args = 2, value_names = ["MIN", "MAX"])]
    crops: Option<Vec<String>>,
    /// Column name or zero-based index; defaults to the last column.
    #[arg(long)]
    column: Option<String>,
    #[arg(long, value_enum, default_value = "auto")]
    header: HeaderMode,
    /// Maximum heart rate; when given, segments are labelled with training zones.
    #[arg(long)]
    max_hr: Option<f64>,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// Config file of `key = value` lines.
    config: PathBuf,
    /// Base seed; overrides NPCPT_SEED and the config file.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

fn parse_penalty(s: &str) -> Result<Penalty> {
    s.parse::<Penalty>().map_err(CliError::from)
}

fn detect_options(a: DetectArgs) -> Result<DetectOptions> {
    let selection = match (a.penalty, a.crops) {
        (Some(p), None) => Selection::Penalty(parse_penalty(&p)?),
        (None, Some(r)) => {
            let (lo, hi) = (parse_penalty(&r[0])?, parse_penalty(&r[1])?);
            Selection::Crops(lo, hi)
        }
        (None, None) => Selection::Penalty(Penalty::LogN(3.0)),
        (Some(_), Some(_)) => return Err(CliError::Usage("--penalty and --crops are mutually exclusive".into())),
    };
    let k = parse_k(&a.k)?;
    Ok(DetectOptions {
        input: a.input,
        column: a.column.as_deref().map(str::parse).transpose()?.unwrap_or(ColumnSpec::Last),
        header: a.header,
        cost: a.cost,
        k,
        selection,
        max_hr: a.max_hr,
        out_dir: a.out,
    })
}

fn dispatch(cli: Cli) -> Result<String> {
    match cli.command {
        Command::Detect(a) => Ok(run_detect(&detect_options(a)?)?.summary),
        Command::Bench(a) => Ok(run_bench(&a.config, a.seed, &a.out)?.summary),
    }
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
        }
    };
    match dispatch(cli) {
        Ok(summary) => {
            println!("{summary}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
