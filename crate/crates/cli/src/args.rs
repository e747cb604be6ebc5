use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

#[derive(Parser, Debug)]
#[command(name = "adelic", version, about = "Verification suites for adelic mean value formulas")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run a verification suite.
    Verify {
        suite: Suite,
        #[command(flatten)]
        params: Params,
    },
    /// Count points.
    Count {
        what: CountKind,
        #[command(flatten)]
        params: Params,
    },
    /// Print constants.
    Constants {
        what: ConstantKind,
        #[command(flatten)]
        params: Params,
    },
    /// List suites and what each one checks.
    List {
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Hecke,
    ZetaIdentities,
    Inversion,
    Orders,
    Crux,
    Siegel,
    Rogers,
    SecondMoment,
    PrimitiveDensity,
    Echelon,
    Heights,
    Units,
    Overlap,
    Schanuel,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum CountKind {
    Projective,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum ConstantKind {
    Schanuel,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Independent,
    Full,
    Both,
}

#[derive(Args, Debug, Clone)]
pub struct Params {
    /// Field label: Q, Q(i), Q(sqrt2), Q(sqrt(-7)), ...
    #[arg(long)]
    pub field: Option<String>,
    /// Field spec file (overrides --field).
    #[arg(long)]
    pub spec: Option<PathBuf>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub k: Option<u32>,
    /// Exponent e of the modulus q^e.
    #[arg(long)]
    pub e: Option<u32>,
    /// Prime powers q (comma separated).
    #[arg(long, value_delimiter = ',')]
    pub q: Vec<u64>,
    /// Rational primes below the Hecke primes (comma separated).
    #[arg(long, value_delimiter = ',')]
    pub primes: Vec<u64>,
    /// Height bound.
    #[arg(long = "B")]
    pub bound: Option<f64>,
    /// Region as kind:params, e.g. ball:3.5 or annulus:1,2.
    #[arg(long)]
    pub region: Option<String>,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long)]
    pub tolerance: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Worker threads; defaults to available parallelism.
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long)]
    pub m_max: Option<usize>,
    #[arg(long)]
    pub k_max: Option<u32>,
    /// Truncation K of the local zeta series.
    #[arg(long = "K")]
    pub big_k: Option<u32>,
    /// Box half-width for primitive densities.
    #[arg(long)]
    pub half_width: Option<i64>,
    /// Grid half-width for the echelon identity.
    #[arg(long)]
    pub grid: Option<i64>,
    /// Denominator bound for random echelon forms.
    #[arg(long)]
    pub denominators: Option<i64>,
    /// Number of randomized cases.
    #[arg(long)]
    pub cases: Option<usize>,
    /// Monte Carlo samples per case.
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
}
