use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "cl-entropy", version)]
#[command(about = "Certified Cohen-Lenstra measures, entropy, zeta values and KL divergences")]
#[command(after_help = "EXIT CODES\n  0  ok\n  2  usage error\n  3  certified computation refused\n  4  verification failure")]
pub struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,

    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Reserved; every computation is deterministic.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// Newline-delimited JSON, one record per line.
    Json,
    /// CSV with a header row.
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Entropy of the measure for each (p, u) pair.
    Entropy(EntropyArgs),
    /// KL divergence between two measures on the same prime.
    Kl(KlArgs),
    /// Per-class measure table up to a given order.
    Table(TableArgs),
    /// Re-run a verification suite.
    Verify(VerifyArgs),
    /// Zeta function values and derivative.
    Zeta(ZetaArgs),
}

#[derive(Debug, Args)]
pub struct EntropyArgs {
    /// Primes, comma separated.
    #[arg(long, required = true, value_delimiter = ',')]
    pub p: Vec<u64>,
    /// Unit ranks, comma separated; each must exceed -1.
    #[arg(long, required = true, value_delimiter = ',', allow_negative_numbers = true)]
    pub u: Vec<f64>,
    /// Target interval width.
    #[arg(long, default_value_t = 1e-6)]
    pub eps: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KlMode {
    Closed,
    Direct,
    Both,
}

#[derive(Debug, Args)]
pub struct KlArgs {
    #[arg(long)]
    pub p: u64,
    #[arg(long, allow_negative_numbers = true)]
    pub u1: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub u2: f64,
    #[arg(long, value_enum, default_value_t = KlMode::Closed)]
    pub mode: KlMode,
    /// Target width of the closed form.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// Target tail bound of the direct sum.
    #[arg(long, default_value_t = 1e-6)]
    pub eps: f64,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    #[arg(long)]
    pub p: u64,
    #[arg(long, allow_negative_numbers = true)]
    pub u: f64,
    /// Largest order exponent listed, at most 20.
    #[arg(long)]
    pub max_order_exponent: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Lemma1,
    Exceptions,
    Monotone,
    Hall,
    Zeta,
    Margins,
    All,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub suite: Suite,
    /// Largest prime in the lemma1 and exceptions scans.
    #[arg(long, default_value_t = 7)]
    pub p_max: u32,
    /// Largest order exponent in the lemma1 scan.
    #[arg(long, default_value_t = 12)]
    pub lemma1_max_order_exponent: u32,
    /// Largest order exponent in the exceptions scan.
    #[arg(long, default_value_t = 8)]
    pub exceptions_max_order_exponent: u32,
    /// Largest unit rank in the exceptions and monotone suites.
    #[arg(long)]
    pub u_max: Option<u32>,
    /// Order exponent of the Hall partial sums.
    #[arg(long, default_value_t = 25)]
    pub hall_order_exponent: u32,
    /// Entropy width in the monotone suite.
    #[arg(long, default_value_t = 1e-6)]
    pub eps: f64,
}

#[derive(Debug, Args)]
pub struct ZetaArgs {
    #[arg(long)]
    pub p: u64,
    /// Truncation level: a positive integer or `inf`.
    #[arg(long)]
    pub k: String,
    #[arg(long, allow_negative_numbers = true)]
    pub s: f64,
    /// Order exponent of the truncated sum (finite k only).
    #[arg(long, default_value_t = 30)]
    pub max_order_exponent: u32,
}
