use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "propcheck", version, about = "Differential testing of constraint propagators")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compare two filters on random instances.
    Run(RunArgs),
    /// Compare two stateful filters along random search dives.
    Dive(DiveArgs),
    /// Filter one instance (JSON on stdin) through a reference filter.
    Oracle(OracleArgs),
    /// Re-execute the counterexample stored in a report.
    Replay(ReplayArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    /// Outcomes must be equal.
    Check,
    /// The tested outcome must be included in the trusted one.
    Stronger,
}

#[derive(Debug, Args)]
pub struct Subjects {
    /// Trusted filter: `<level>:<checker>` (levels arc, boundz, boundd, range;
    /// checkers alldiff, sum=<c>) or a solver recipe.
    #[arg(long)]
    pub trusted: String,
    /// Filter under test: a solver recipe (sum-bc[=<c>], alldiff-fc,
    /// alldiff-ac, optionally followed by +bug:<id>) or `<level>:<checker>`.
    #[arg(long)]
    pub tested: String,
}

#[derive(Debug, Args)]
pub struct Generation {
    /// Campaign seed.
    #[arg(long, env = "PROPCHECK_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Number of random instances (roots, for dives).
    #[arg(long, default_value_t = 100)]
    pub tests: usize,
    /// Number of variables.
    #[arg(long, default_value_t = 5)]
    pub vars: usize,
    /// Smallest candidate value.
    #[arg(long, default_value_t = -10, allow_negative_numbers = true)]
    pub min: i32,
    /// Largest candidate value.
    #[arg(long, default_value_t = 10, allow_negative_numbers = true)]
    pub max: i32,
    /// Probability for each candidate value to enter a domain, in (0, 1].
    #[arg(long, default_value_t = 0.2)]
    pub density: f64,
    /// Largest Cartesian product a reference filter may enumerate.
    #[arg(long, default_value_t = 1_000_000)]
    pub cap: u64,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long, value_enum)]
    pub mode: Mode,
    #[command(flatten)]
    pub subjects: Subjects,
    #[command(flatten)]
    pub generation: Generation,
}

#[derive(Debug, Args)]
pub struct DiveArgs {
    #[command(flatten)]
    pub subjects: Subjects,
    /// Dives per root.
    #[arg(long, default_value_t = 20)]
    pub dives: usize,
    /// Restrictions allowed in one dive before it is cut.
    #[arg(long, default_value_t = 64)]
    pub max_depth: usize,
    #[command(flatten)]
    pub generation: Generation,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(long)]
    pub level: String,
    #[arg(long)]
    pub checker: String,
    #[arg(long, default_value_t = 1_000_000)]
    pub cap: u64,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    /// Report written by `run` or `dive`.
    #[arg(long)]
    pub report: PathBuf,
}
