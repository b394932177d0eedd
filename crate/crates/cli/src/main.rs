//! `rainbow`: generate bounded colorings, normalize them, extract rainbows,
//! build trees, check the counting claims and run the triple reduction.

mod commands;
mod sweep;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rainbow_core::format::Format;
use rainbow_core::Error;

#[derive(Parser, Debug)]
#[command(name = "rainbow", version, about = "Bounded colorings, rainbow trees and counting checks")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a seeded b-bounded coloring.
    Gen(GenArgs),
    /// Rewrite a pair coloring into normal form (triples: semi-normal form).
    Normalize(IoArgs),
    /// Greedy rainbow or tail rainbow.
    Rainbow(RainbowArgs),
    /// Build the bounded tree of rainbow extensions.
    Tree(TreeArgs),
    /// Check one of the counting claims.
    Verify {
        #[command(subcommand)]
        check: VerifyCommand,
    },
    /// Run the triples-to-pairs reduction and lift.
    Reduce(ReduceArgs),
    /// Run an experiment over a range of seeds and write CSV.
    Sweep(SweepArgs),
}

#[derive(Subcommand, Debug)]
enum VerifyCommand {
    /// Density of tail rainbows among block sequences.
    Block(BlockArgs),
    /// Bad-node counts below a quarter of each level.
    Lemma25(TreeArgs),
    /// Level sizes above three quarters of capacity.
    Bushy(TreeArgs),
    /// Homogeneous sets of the dual coloring are rainbows.
    Galvin(GalvinArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum FormatArg {
    Rrcol,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Format {
        match f {
            FormatArg::Rrcol => Format::Rrcol,
            FormatArg::Json => Format::Json,
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct IoArgs {
    /// Input coloring (RRCOL or JSON, detected from content).
    #[arg(long = "in")]
    input: PathBuf,
    /// Output path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "rrcol")]
    format: FormatArg,
    /// Include wall-clock timings in JSON output (breaks byte-for-byte reproducibility).
    #[arg(long)]
    timings: bool,
}

#[derive(Args, Debug, Clone)]
pub struct GenArgs {
    #[arg(long, default_value_t = 2)]
    arity: usize,
    #[arg(long, default_value_t = 2)]
    bound: usize,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Keep every color class inside one slice (same last coordinate).
    #[arg(long)]
    same_last: bool,
    /// Triple coloring whose least partners stabilize above the window.
    #[arg(long)]
    stable: bool,
    #[arg(long, default_value_t = 8)]
    window: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "rrcol")]
    format: FormatArg,
}

#[derive(Args, Debug, Clone)]
pub struct RainbowArgs {
    #[command(flatten)]
    io: IoArgs,
    /// Require a tail rainbow (all coordinates but the first).
    #[arg(long)]
    tail: bool,
    /// Require a k-tail rainbow of this width.
    #[arg(long, conflicts_with = "tail")]
    tail_width: Option<usize>,
}

#[derive(Args, Debug, Clone)]
pub struct TreeArgs {
    #[command(flatten)]
    io: IoArgs,
    #[arg(long, default_value_t = 2)]
    depth: usize,
    /// Head of the tree, e.g. "0,3,7".
    #[arg(long, default_value = "")]
    sigma: String,
    /// Refuse trees whose deepest level could exceed this many nodes.
    #[arg(long, default_value_t = rainbow_core::tree::DEFAULT_NODE_BUDGET as u64)]
    budget: u64,
    /// Viable-supply threshold for bushiness (default: 4 x branching).
    #[arg(long)]
    threshold: Option<u64>,
    /// Also emit the binary image of the tree.
    #[arg(long)]
    binary: bool,
}

#[derive(Args, Debug, Clone)]
pub struct BlockArgs {
    #[command(flatten)]
    io: IoArgs,
    #[arg(long, default_value_t = 4)]
    depth: usize,
}

#[derive(Args, Debug, Clone)]
pub struct GalvinArgs {
    #[command(flatten)]
    io: IoArgs,
    /// Bound of the input; defaults to its largest class.
    #[arg(long)]
    bound: Option<usize>,
    /// Random homogeneous sets to test when the domain is too large to scan.
    #[arg(long, default_value_t = 200)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug, Clone)]
pub struct ReduceArgs {
    #[command(flatten)]
    io: IoArgs,
    #[arg(long, default_value_t = 8)]
    window: usize,
    /// Stabilization threshold; defaults to the window.
    #[arg(long)]
    s0: Option<usize>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Experiment {
    Block,
    Lemma25,
    Bushy,
    Normalize,
    Galvin,
    Greedy,
    Reduce,
    Partition,
}

#[derive(Args, Debug, Clone)]
pub struct SweepArgs {
    #[arg(value_enum)]
    experiment: Experiment,
    /// Seed range `A..B` (half-open).
    #[arg(long, value_parser = parse_seeds)]
    seeds: std::ops::Range<u64>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    depth: Option<usize>,
    #[arg(long)]
    bound: Option<usize>,
    #[arg(long)]
    window: Option<usize>,
    /// Head length for the partition experiment.
    #[arg(long, default_value_t = 3)]
    sigma_len: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_seeds(s: &str) -> Result<std::ops::Range<u64>, String> {
    let (a, b) = s.split_once("..").ok_or_else(|| format!("expected A..B, got {s:?}"))?;
    let a: u64 = a.trim().parse().map_err(|e| format!("bad start {a:?}: {e}"))?;
    let b: u64 = b.trim().parse().map_err(|e| format!("bad end {b:?}: {e}"))?;
    if a > b {
        return Err(format!("empty seed range {s}"));
    }
    Ok(a..b)
}

/// Failure modes of a command, each with its own exit status.
#[derive(Debug)]
pub enum CliError {
    /// A check ran and found violations.
    Violation(String),
    Core(Error),
    Io(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Violation(_) => 1,
            CliError::Core(e) => match e.root() {
                Error::Parse { .. } => 2,
                _ => 3,
            },
            CliError::Io(_) => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Violation(m) => write!(f, "violation: {m}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(a) => commands::gen(&a),
        Command::Normalize(a) => commands::normalize(&a),
        Command::Rainbow(a) => commands::rainbow(&a),
        Command::Tree(a) => commands::tree(&a),
        Command::Verify { check } => match check {
            VerifyCommand::Block(a) => commands::verify_block(&a),
            VerifyCommand::Lemma25(a) => commands::verify_counting(&a),
            VerifyCommand::Bushy(a) => commands::verify_bushy(&a),
            VerifyCommand::Galvin(a) => commands::verify_galvin(&a),
        },
        Command::Reduce(a) => commands::reduce(&a),
        Command::Sweep(a) => sweep::run(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("rainbow: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
