//! `op3m`: mine on-shelf popular and profitable itemsets, verify the miner
//! against brute force, generate and regroup synthetic data, and run
//! benchmark sweeps.
//!
//! Exit codes: 0 success, 1 miner/oracle disagreement, 2 bad input or usage,
//! 3 oracle item cap exceeded.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use op3m_core::{MiningParams, ProfitScope, Threshold};

#[derive(Parser)]
#[command(name = "op3m", version, about = "On-shelf popular and profitable itemset mining")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Mine all qualifying itemsets and write them one per line.
    Mine(MineArgs),
    /// Compare the miner with exhaustive enumeration.
    OracleCheck(OracleArgs),
    /// Generate a synthetic profit table and transaction file.
    Gen(GenArgs),
    /// Reassign transactions to random periods.
    Regroup(RegroupArgs),
    /// Run a benchmark sweep and write CSV.
    Bench(BenchArgs),
    /// Print the OPP-list of one itemset.
    DumpList(DumpArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    /// `tid<TAB>period<TAB>item:qty ...` plus a profit table.
    Native,
    /// `items:TU:utilities:period`, utilities per transaction.
    SpmfPeriod,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Scope {
    Global,
    PerPeriod,
}

impl From<Scope> for ProfitScope {
    fn from(s: Scope) -> Self {
        match s {
            Scope::Global => ProfitScope::Global,
            Scope::PerPeriod => ProfitScope::PerPeriod,
        }
    }
}

#[derive(Args, Clone)]
struct InputArgs {
    /// Transaction file.
    #[arg(short = 't', long = "transactions")]
    transactions: PathBuf,
    /// Profit table (`item<TAB>unit profit`); required for the native format.
    #[arg(short = 'p', long = "profits")]
    profits: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Native)]
    format: Format,
    /// Sum the quantities of an item listed twice in one transaction
    /// instead of rejecting the line.
    #[arg(long)]
    merge_duplicates: bool,
}

#[derive(Args, Clone)]
struct TuningArgs {
    #[arg(long, value_enum, default_value_t = Scope::Global)]
    scope: Scope,
    #[arg(long, default_value_t = 1)]
    threads: usize,
    #[arg(long)]
    no_prune_pairs: bool,
    #[arg(long)]
    no_prune_rpp: bool,
    #[arg(long)]
    no_prune_freq: bool,
}

impl TuningArgs {
    fn apply(&self, params: MiningParams) -> MiningParams {
        MiningParams {
            scope: self.scope.into(),
            threads: self.threads,
            prune_pairs: !self.no_prune_pairs,
            prune_rpp: !self.no_prune_rpp,
            prune_freq: !self.no_prune_freq,
            ..params
        }
    }
}

#[derive(Args)]
struct MineArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    minfre: Threshold,
    #[arg(long)]
    minpro: Threshold,
    #[command(flatten)]
    tuning: TuningArgs,
    /// Output file; standard output when omitted.
    #[arg(short = 'o', long)]
    output: Option<PathBuf>,
    /// Print search counters to standard error.
    #[arg(long)]
    stats: bool,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(short = 't', long = "transactions", required_unless_present = "fuzz")]
    transactions: Option<PathBuf>,
    #[arg(short = 'p', long = "profits")]
    profits: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Native)]
    format: Format,
    #[arg(long)]
    merge_duplicates: bool,
    /// Check this many random databases instead of an input file.
    #[arg(long)]
    fuzz: Option<u64>,
    /// First seed of the fuzz run.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Item limit of fuzzed databases.
    #[arg(long, default_value_t = 12)]
    max_items: u32,
    #[arg(long, default_value_t = 40)]
    max_transactions: usize,
    #[arg(long, default_value_t = 4)]
    max_periods: u32,
    /// Refuse inputs with more distinct items than this.
    #[arg(long, default_value_t = op3m_core::oracle::DEFAULT_ITEM_CAP)]
    cap: usize,
    /// Single threshold; without it a small grid is checked.
    #[arg(long)]
    minfre: Option<Threshold>,
    #[arg(long)]
    minpro: Option<Threshold>,
    /// Check one scope only; both by default.
    #[arg(long, value_enum)]
    scope: Option<Scope>,
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Drop one mined pattern before comparing (harness self-test).
    #[arg(long, hide = true)]
    corrupt_miner: bool,
}

#[derive(Args)]
struct GenArgs {
    /// Transaction file to write.
    #[arg(short = 't', long = "transactions")]
    transactions: PathBuf,
    /// Profit table to write.
    #[arg(short = 'p', long = "profits")]
    profits: PathBuf,
    /// Start from a preset shape; explicit flags override it.
    #[arg(long, value_enum)]
    preset: Option<Preset>,
    #[arg(long = "n-transactions")]
    n_transactions: Option<usize>,
    #[arg(long = "n-items")]
    n_items: Option<u32>,
    #[arg(long)]
    avg_len: Option<f64>,
    #[arg(long)]
    min_quantity: Option<u32>,
    #[arg(long)]
    max_quantity: Option<u32>,
    #[arg(long)]
    min_profit: Option<op3m_core::Money>,
    #[arg(long)]
    max_profit: Option<op3m_core::Money>,
    #[arg(long)]
    negative_fraction: Option<f64>,
    #[arg(long = "periods")]
    n_periods: Option<u32>,
    #[arg(long)]
    period_skew: Option<f64>,
    #[arg(long)]
    item_skew: Option<f64>,
    #[arg(long)]
    seasonal_fraction: Option<f64>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Preset {
    Sparse,
    Dense,
}

#[derive(Args)]
struct RegroupArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(short = 'o', long)]
    output: PathBuf,
    #[arg(long)]
    periods: u32,
    #[arg(long, default_value_t = 7)]
    seed: u64,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Dataset label for the CSV; defaults to the file stem.
    #[arg(long)]
    dataset: Option<String>,
    /// Comma-separated; every pair with `--minpro` is run.
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    minfre: Vec<Threshold>,
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    minpro: Vec<Threshold>,
    /// Transaction-count prefixes, comma-separated.
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    prefixes: Vec<usize>,
    /// Period counts to regroup into, comma-separated.
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    periods: Vec<u32>,
    #[arg(long, default_value_t = 7)]
    regroup_seed: u64,
    #[arg(long, default_value_t = 1)]
    repeat: usize,
    #[command(flatten)]
    tuning: TuningArgs,
    #[arg(short = 'o', long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct DumpArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Item ids, space or comma separated.
    #[arg(long)]
    items: String,
    #[arg(short = 'o', long)]
    output: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Mine(args) => commands::mine(args),
        Command::OracleCheck(args) => commands::oracle_check(args),
        Command::Gen(args) => commands::generate(args),
        Command::Regroup(args) => commands::regroup(args),
        Command::Bench(args) => commands::bench(args),
        Command::DumpList(args) => commands::dump_list(args),
    };
    match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {}", err.message);
            ExitCode::from(err.code)
        }
    }
}
