//! The `tagforge` command line, kept as a library so tests can drive it
//! in-process.

pub mod checkpoint;
mod commands;

use std::ffi::OsString;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use commands::run::{RunOutcome, RunRequest};

/// Exit statuses.
pub mod exit {
    pub const OK: i32 = 0;
    pub const UNDECIDED: i32 = 2;
    pub const USAGE: i32 = 64;
    pub const DATA: i32 = 65;
    pub const IO: i32 = 74;
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(String),
    Io(io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => exit::USAGE,
            CliError::Data(_) => exit::DATA,
            CliError::Io(_) => exit::IO,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Data(m) => write!(f, "data error: {m}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<tagforge::Error> for CliError {
    fn from(e: tagforge::Error) -> Self {
        use tagforge::Error as E;
        match e {
            E::Decode(_) | E::InsufficientData(_) => CliError::Data(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

#[derive(Parser, Debug)]
#[command(name = "tagforge", version, about = "Simulate and survey tag systems")]
pub struct Cli {
    /// Worker threads (defaults to TAGFORGE_THREADS, then the core count).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run one initial condition until it halts, cycles or runs out of steps.
    Run(RunArgs),
    /// Longest-halting-so-far search over all short initial conditions.
    Search(SearchArgs),
    /// Merge shard outputs of `search --shard`.
    Merge(MergeArgs),
    /// State transition graph of all short initial conditions.
    Graph(GraphArgs),
    /// m-gram census of the block automaton.
    Grams(GramsArgs),
    /// Cycle counts and block-family cycles.
    Cycles(CyclesArgs),
    /// Halting-time statistics and first-passage checks.
    Walk(WalkArgs),
    /// Other tag systems.
    Zoo(ZooArgs),
    /// Integer iterations.
    Collatz(CollatzArgs),
}

#[derive(Args, Debug)]
pub struct RunArgs {
    /// `m:value:phase`, or a plain digit string. Optional with --resume.
    pub state: Option<String>,
    /// Rule literal; Post's rule by default.
    #[arg(long)]
    pub rule: Option<String>,
    /// Total step budget, counted from the initial condition.
    #[arg(long, default_value_t = 1 << 40)]
    pub max_steps: u64,
    /// Write the uncompressed length trace as CSV.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Checkpoint file, written periodically and when the budget runs out.
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
    #[arg(long, default_value_t = 1_000_000_000)]
    pub checkpoint_every: u64,
    /// Seconds between checkpoint writes.
    #[arg(long, default_value_t = 60)]
    pub checkpoint_secs: u64,
    /// Continue from a checkpoint file.
    #[arg(long)]
    pub resume: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SearchArgs {
    /// Largest compressed word length.
    #[arg(long)]
    pub max_len: u32,
    #[arg(long, default_value_t = 1 << 34)]
    pub cap: u64,
    /// `i/N`: run shards whose index is `i` mod `N` and print candidates.
    #[arg(long)]
    pub shard: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct MergeArgs {
    pub inputs: Vec<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct GraphArgs {
    #[arg(long)]
    pub max_len: u32,
    #[arg(long, default_value_t = 1 << 24)]
    pub cap: u64,
    #[arg(long)]
    pub dot: Option<PathBuf>,
    #[arg(long)]
    pub json: Option<PathBuf>,
    /// Draw highways as single edges in the DOT output.
    #[arg(long)]
    pub collapse: bool,
}

#[derive(Args, Debug)]
pub struct GramsArgs {
    #[arg(long)]
    pub m: usize,
    /// Write the multiplicity table for lengths 1..=m as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CyclesArgs {
    /// Count cycles of `n` blocks.
    #[arg(long)]
    pub n: Option<u64>,
    /// List the distinct cycles seeded by `b` blocks, as JSON lines.
    #[arg(long)]
    pub blocks: Option<u32>,
}

#[derive(Args, Debug)]
pub struct WalkArgs {
    /// Halting histogram over all ICs of this word length.
    #[arg(long)]
    pub ensemble: Option<u32>,
    #[arg(long, default_value_t = 1 << 24)]
    pub cap: u64,
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Monte Carlo first passage of a +-1 walk from this height.
    #[arg(long)]
    pub first_passage: Option<u64>,
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 1000)]
    pub horizon: u64,
}

#[derive(Args, Debug)]
pub struct ZooArgs {
    #[arg(long)]
    pub rule: Option<String>,
    /// `len:value`, or a digit string.
    pub state: Option<String>,
    #[arg(long, default_value_t = 1 << 24)]
    pub max_steps: u64,
    /// Classify growth instead of only detecting halts.
    #[arg(long)]
    pub growth: bool,
    /// Ones-run lengths starting from this many 1s.
    #[arg(long)]
    pub ones: Option<u64>,
    /// Survey a rule family: `balanced` or `simple`.
    #[arg(long)]
    pub survey: Option<String>,
    #[arg(long, default_value_t = 6)]
    pub max_ic_len: usize,
}

#[derive(Args, Debug)]
pub struct CollatzArgs {
    #[arg(long)]
    pub n: String,
    /// `collatz`, `5n+1`, `mod3`, or `m:a,b;a,b;...` maps.
    #[arg(long, default_value = "collatz")]
    pub rule: String,
    #[arg(long, default_value_t = 1 << 24)]
    pub cap: u64,
    /// Include the bit-length trajectory.
    #[arg(long)]
    pub bits: bool,
}

fn configure_threads(threads: Option<usize>) -> Result<(), CliError> {
    let n = match threads {
        Some(n) => Some(n),
        None => match std::env::var("TAGFORGE_THREADS") {
            Ok(v) => Some(v.trim().parse().map_err(|_| CliError::Usage(format!("TAGFORGE_THREADS={v:?} is not a count")))?),
            Err(_) => None,
        },
    };
    if let Some(n) = n {
        // A pool may already exist when called twice in one process.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

/// Parses `args` and runs the command, returning the exit status.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { exit::USAGE } else { exit::OK };
            let _ = if e.use_stderr() { write!(err, "{}", e.render()) } else { write!(out, "{}", e.render()) };
            return code;
        }
    };
    let result = configure_threads(cli.threads).and_then(|()| commands::dispatch(cli.command, out));
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "tagforge: {e}");
            e.exit_code()
        }
    }
}
