//! Command-line driver: argument definitions, dispatch, and the JSON output
//! schemas shared with the integration tests.

mod commands;
pub mod schema;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dramsey_core::ttsearch::ColorScope;
use thiserror::Error;

pub const DEFAULT_CACHE: &str = "dramsey-cache.jsonl";

#[derive(Debug, Parser)]
#[command(
    name = "dramsey",
    version,
    about = "Power-residue tournaments, transitive subtournament search and directed Ramsey lower bounds"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalOpts {
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Result cache (JSON lines, append-only).
    #[arg(long, global = true, value_name = "PATH", default_value = DEFAULT_CACHE)]
    pub cache: PathBuf,
    /// Neither read nor write the result cache.
    #[arg(long, global = true)]
    pub no_cache: bool,
    /// Worker threads for searches; defaults to all cores.
    #[arg(long, global = true, value_name = "N")]
    pub threads: Option<usize>,
    /// Time budget per search in seconds; exhausted searches report partial results.
    #[arg(long, global = true, value_name = "SECS")]
    pub budget: Option<f64>,
    /// Fact base replacing the shipped one.
    #[arg(long, global = true, value_name = "PATH")]
    pub facts: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Finite field information.
    #[command(subcommand)]
    Field(FieldCmd),
    /// Build a graph and write it in the text graph format.
    #[command(subcommand)]
    Build(BuildCmd),
    /// Search for transitive subtournaments.
    #[command(subcommand)]
    Search(SearchCmd),
    /// Largest admissible q whose Paley digraph has no TT_m.
    Scan(ScanArgs),
    /// Structural checks and completion spot-checks.
    #[command(subcommand)]
    Verify(VerifyCmd),
    /// Lower bounds on R_t(m).
    #[command(subcommand)]
    Bounds(BoundsCmd),
}

#[derive(Debug, Subcommand)]
pub enum FieldCmd {
    Info { q: u64 },
}

#[derive(Debug, Clone, Args)]
pub struct KQ {
    #[arg(long)]
    pub k: u32,
    #[arg(long)]
    pub q: u64,
}

#[derive(Debug, Subcommand)]
pub enum BuildCmd {
    /// The k-th power Paley tournament on GF(q).
    Paley {
        #[command(flatten)]
        kq: KQ,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// The Mathon digraph; with --seed, its seeded completion to a tournament.
    Mathon {
        #[command(flatten)]
        kq: KQ,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GraphKind {
    Paley,
    Mathon,
    Completion,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    /// Use the graph's symmetry where available.
    Symmetric,
    /// Search every root.
    Brute,
}

#[derive(Debug, Clone, Args)]
pub struct SearchArgs {
    #[command(flatten)]
    pub kq: KQ,
    /// Chain order (an upper stop for `max`).
    #[arg(long)]
    pub m: Option<usize>,
    /// Color index, or `any` for every oriented arc.
    #[arg(long, default_value = "1")]
    pub color: ColorScope,
    #[arg(long, value_enum, default_value_t = MethodArg::Symmetric)]
    pub method: MethodArg,
    #[arg(long, value_enum, default_value_t = GraphKind::Paley)]
    pub graph: GraphKind,
    /// Completion seed for `--graph completion`.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
pub enum SearchCmd {
    Exists(SearchArgs),
    Count(SearchArgs),
    Max(SearchArgs),
}

#[derive(Debug, Clone, Args)]
pub struct ScanArgs {
    #[arg(long)]
    pub k: u32,
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub q_max: u64,
    /// Evaluate every admissible q from the bottom instead of stopping at the first hit from the top.
    #[arg(long)]
    pub ascending: bool,
}

#[derive(Debug, Subcommand)]
pub enum VerifyCmd {
    Structure {
        #[command(flatten)]
        kq: KQ,
    },
    Theorem {
        #[command(flatten)]
        kq: KQ,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Seed of the first random completion; later ones add 1 each.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Subcommand)]
pub enum BoundsCmd {
    Derive {
        #[arg(long, default_value_t = 6)]
        t_max: u32,
        #[arg(long, default_value_t = 20)]
        m_max: u32,
    },
    Tables,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Runtime(String),
    /// A check produced a counterexample; the report is already printed.
    #[error("check failed")]
    CheckFailed,
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::CheckFailed => 1,
            CliError::Usage(_) | CliError::Runtime(_) => 2,
        }
    }
}

pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    commands::dispatch(cli, out)
}
