use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "costas-lab",
    version,
    about = "Golomb Costas permutations: construction, cross-correlation, bounds"
)]
pub struct Cli {
    /// Worker threads (defaults to all cores; never changes output).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Work budget in elementary correlation steps (overrides COSTAS_LAB_BUDGET).
    #[arg(long, global = true, value_parser = budget_arg)]
    pub budget: Option<u128>,
    /// Leave wall times out so reruns are byte-identical.
    #[arg(long, global = true)]
    pub no_timing: bool,
    /// Output path; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub cmd: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Describe GF(q): modulus and canonical generator.
    Field {
        #[arg(long)]
        q: u64,
    },
    /// Build the Golomb permutation for (g1, g2).
    Perm {
        #[arg(long)]
        q: u64,
        #[command(flatten)]
        pair: PairArgs,
    },
    /// Check the Costas property of a permutation file (JSON record or array).
    Verify { input: PathBuf },
    /// Full cross-correlation table of two Golomb permutations as CSV.
    Table {
        #[arg(long)]
        q: u64,
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long)]
        g3: String,
        #[arg(long)]
        g4: String,
    },
    /// Exhaustive maximal cross-correlation of one family.
    FamilyMax(FamilyMaxArgs),
    /// One family-max row per prime power in a range.
    Survey(SurveyArgs),
    /// Threshold counts N (fixed pair, shifts in S) or M (fixed shift, pairs of L_q).
    Count(CountArgs),
    /// Candidate bounds for the exponent pair (r, s).
    Bounds(BoundsArgs),
    /// Random character sums against the Weil estimate.
    Weil(WeilArgs),
}

/// Primitive elements as an encoding (`5`) or a discrete log (`d:3`).
#[derive(Debug, Args)]
pub struct PairArgs {
    #[arg(long)]
    pub g1: String,
    #[arg(long)]
    pub g2: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyKind {
    #[value(name = "G")]
    G,
    #[value(name = "L")]
    L,
    #[value(name = "Ldelta")]
    Ldelta,
}

impl FamilyKind {
    pub fn name(self) -> &'static str {
        match self {
            FamilyKind::G => "G",
            FamilyKind::L => "L",
            FamilyKind::Ldelta => "Ldelta",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct FamilyMaxArgs {
    #[arg(long)]
    pub q: u64,
    #[arg(long, value_enum)]
    pub family: FamilyKind,
    #[arg(long)]
    pub delta: Option<f64>,
    /// Fixed g2 of G_q (default: the canonical generator).
    #[arg(long)]
    pub g2: Option<String>,
    /// Scan this many random ordered pairs instead of all of them.
    #[arg(long)]
    pub sample: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum QFilter {
    All,
    Prime,
    StrictPower,
    Safe,
}

#[derive(Debug, Args)]
pub struct SurveyArgs {
    #[arg(long)]
    pub qmin: u64,
    #[arg(long)]
    pub qmax: u64,
    #[arg(long, value_enum)]
    pub family: FamilyKind,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long, value_enum, default_value_t = QFilter::All)]
    pub only: QFilter,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CountMode {
    #[value(name = "n", alias = "N")]
    N,
    #[value(name = "m", alias = "M")]
    M,
}

#[derive(Debug, Args)]
pub struct CountArgs {
    #[arg(value_enum)]
    pub mode: CountMode,
    #[arg(long)]
    pub q: u64,
    #[arg(long = "B")]
    pub b: u32,
    #[arg(long)]
    pub u: Option<u32>,
    #[arg(long)]
    pub v: Option<u32>,
    #[arg(long)]
    pub g1: Option<String>,
    #[arg(long)]
    pub g2: Option<String>,
    #[arg(long)]
    pub g3: Option<String>,
    #[arg(long)]
    pub g4: Option<String>,
    /// `u0:u1,v0:v1`, `random:K`, or a file of `u,v` lines (default: full square).
    #[arg(long = "S")]
    pub shifts: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Certified,
    All,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[arg(long)]
    pub q: u64,
    #[arg(long)]
    pub r: u64,
    #[arg(long)]
    pub s: u64,
    #[arg(long, value_enum, default_value_t = ModeArg::Certified)]
    pub mode: ModeArg,
    /// Also compute the exact maximum over all base pairs and check it.
    #[arg(long)]
    pub exact: bool,
}

#[derive(Debug, Args)]
pub struct WeilArgs {
    #[arg(long)]
    pub q: u64,
    /// Fixed exponent s (default: random admissible per sample).
    #[arg(long)]
    pub s: Option<u64>,
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

fn budget_arg(s: &str) -> Result<u128, String> {
    crate::parse_budget(s).ok_or_else(|| format!("{s:?} is not a step count"))
}
