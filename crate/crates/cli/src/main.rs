use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;

use commands::{CliError, Outcome};

#[derive(Parser, Debug)]
#[command(name = "asthreshold", version, about = "Exact thresholds of LDPC absorbing sets under saturated Min-Sum")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check that every set in the catalogs is an elementary absorbing set.
    Validate(CommonArgs),
    /// Compute (and by default certify) the threshold of every set.
    Threshold(ThresholdArgs),
    /// Simulate trajectories with channel values in [-lch, lch].
    Sweep(SweepArgs),
    /// Threshold by solving every saturation pattern's LP (small sets only).
    BruteForce(BruteForceArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Args, Debug)]
pub struct CommonArgs {
    /// Catalog files (`.as` text or `.json`).
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads for batch processing (default: all cores).
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(Args, Debug)]
pub struct ThresholdArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Upper bound on λ in the LPs, as `p/q`. Reported values are min(τ, λ_max).
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    pub lambda_max: String,
    #[arg(long)]
    pub no_test1: bool,
    #[arg(long)]
    pub no_test2: bool,
    #[arg(long)]
    pub no_certify: bool,
    /// Node budget per set; exceeding it yields a lower bound (exit code 3).
    #[arg(long)]
    pub max_nodes: Option<u64>,
    /// Omit `wall_ms` so repeated runs are byte-identical.
    #[arg(long)]
    pub no_timing: bool,
}

#[derive(Args, Debug)]
pub struct BruteForceArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    pub lambda_max: String,
    /// Refuse sets with more internal messages than this.
    #[arg(long, default_value_t = asthreshold::search::DEFAULT_BRUTE_FORCE_CAP)]
    pub cap: usize,
    #[arg(long)]
    pub no_timing: bool,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Init {
    /// Uniform random entries in {-1, 0, 1}.
    Sampled,
    /// Every corner of {-1, 1}^N.
    Corners,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Channel saturation level in (0, 1], as `p/q`. Not used with `--puncture`.
    #[arg(long, allow_hyphen_values = true)]
    pub lch: Option<String>,
    /// Known threshold; computed when omitted.
    #[arg(long, allow_hyphen_values = true)]
    pub tau: Option<String>,
    #[arg(long, default_value_t = 10_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 200)]
    pub max_iters: usize,
    /// `parallel`, `seq` (ascending CN order) or `seq:c1,c2,...`.
    #[arg(long, default_value = "parallel")]
    pub schedule: String,
    #[arg(long, value_enum, default_value = "sampled")]
    pub init: Init,
    /// Extra run from x = -1 at this uniform channel value. Repeatable.
    #[arg(long, allow_hyphen_values = true)]
    pub probe: Vec<String>,
    /// Zero the channel of these VNs (comma separated) and fix the others.
    #[arg(long, value_delimiter = ',')]
    pub puncture: Vec<usize>,
    /// Channel value of the unpunctured VNs; defaults to τ + 1/16.
    #[arg(long, allow_hyphen_values = true)]
    pub rest: Option<String>,
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    pub lambda_max: String,
}

fn emit(text: &str, out: &Option<PathBuf>) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| CliError::Io(path.clone(), e)),
        None => {
            let mut stdout = io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| CliError::Io("<stdout>".into(), e))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (common, result) = match &cli.command {
        Command::Validate(a) => (a, commands::validate(a)),
        Command::Threshold(a) => (&a.common, commands::threshold(a)),
        Command::Sweep(a) => (&a.common, commands::sweep(a)),
        Command::BruteForce(a) => (&a.common, commands::brute_force(a)),
    };
    let Outcome { report, code, notes } = match result {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code());
        }
    };
    for note in notes {
        eprintln!("{note}");
    }
    if let Err(e) = emit(&report, &common.out) {
        eprintln!("error: {e}");
        return ExitCode::from(e.exit_code());
    }
    ExitCode::from(code)
}
