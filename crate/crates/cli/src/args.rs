use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

pub const PRECISION_ENV: &str = "LAMBDASET_PRECISION_BITS";

#[derive(Parser, Debug)]
#[command(
    name = "lambdaset",
    version,
    about = "Codings, covers, thickness and certificates for the parameter sets Λ(x)"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct Global {
    /// Working precision of enclosures, in bits.
    #[arg(long, global = true, env = PRECISION_ENV, default_value_t = 128)]
    pub bits: u32,
    /// Bisection stops at enclosures at most 2^-N wide.
    #[arg(long, global = true, default_value_t = 80)]
    pub width_log2: u32,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Print the JSON schema of the subcommand's payload and exit.
    #[arg(long, global = true)]
    pub print_schema: bool,
    /// Suppress the run manifest on stderr.
    #[arg(long, global = true)]
    pub no_manifest: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CaseArg {
    A,
    B,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Greedy coding of x at a rational λ.
    Code {
        #[arg(long)]
        x: String,
        #[arg(long)]
        lambda: String,
        #[arg(long, default_value_t = 10_000)]
        max_steps: usize,
    },
    /// Exact value of the coding map at a rational λ.
    Pi {
        #[arg(long)]
        seq: String,
        #[arg(long)]
        lambda: String,
    },
    /// Binary expansion of x in PRE(PER) syntax.
    Expansion {
        #[arg(long)]
        x: String,
    },
    /// Interval cover of Λ(x) from admissible prefixes of a given length.
    Cover {
        #[arg(long)]
        x: String,
        #[arg(long)]
        depth: usize,
    },
    /// Gaps of Λ(x) certified at a given prefix length.
    Gaps {
        #[arg(long)]
        x: String,
        #[arg(long)]
        depth: usize,
    },
    /// Box-counting slope of Λ(x) on the window center ± radius.
    Dim {
        #[arg(long)]
        x: String,
        #[arg(long)]
        center: String,
        #[arg(long)]
        radius: String,
        /// Scales j as `a:b`, boxes of side 2^-j.
        #[arg(long, default_value = "8:13")]
        scales: String,
        #[arg(long, default_value_t = 26)]
        max_depth: usize,
    },
    /// Endpoints α_k, β_k, α_{k+1} of the k-th piece.
    Pieces {
        #[arg(long)]
        x: String,
        #[arg(long)]
        k: usize,
    },
    /// Truncated defining sequence of C_ℓ(x).
    CantorDs {
        #[arg(long)]
        x: String,
        #[arg(long)]
        ell: usize,
        #[arg(long, default_value_t = 4)]
        kmax: usize,
        #[arg(long, default_value_t = 2)]
        qmax: u32,
    },
    /// Thickness of a rational defining sequence given as JSON (inline or @file).
    Thickness {
        #[arg(long)]
        gaps: String,
    },
    /// Truncated thickness of C_ℓ(x) with analytic bound checks.
    ThicknessCl {
        #[arg(long)]
        x: String,
        #[arg(long)]
        ell: usize,
        #[arg(long, default_value_t = 4)]
        kmax: usize,
        #[arg(long, default_value_t = 2)]
        qmax: u32,
    },
    /// Randomized certified checks of the Case A or Case B estimates.
    Verify {
        #[arg(long, value_enum, ignore_case = true)]
        case: CaseArg,
        /// Target; Case B is x = 1/4.
        #[arg(long)]
        x: Option<String>,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Cover of the intersection of several Λ(y).
    Intersect {
        /// Comma-separated targets.
        #[arg(long)]
        targets: String,
        #[arg(long)]
        depth: usize,
    },
    /// Certified common points of several Λ(y).
    Common {
        #[arg(long)]
        targets: String,
        #[arg(long, default_value_t = 8)]
        depth: usize,
        #[arg(long, default_value_t = 60)]
        tolerance_log2: u32,
    },
    /// SVG diagram of the cover and gaps of Λ(x) by prefix length.
    SvgGaps {
        #[arg(long)]
        x: String,
        #[arg(long, default_value_t = 6)]
        depth: usize,
        #[arg(long, default_value_t = 900)]
        width: u32,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Code { .. } => "code",
            Command::Pi { .. } => "pi",
            Command::Expansion { .. } => "expansion",
            Command::Cover { .. } => "cover",
            Command::Gaps { .. } => "gaps",
            Command::Dim { .. } => "dim",
            Command::Pieces { .. } => "pieces",
            Command::CantorDs { .. } => "cantor-ds",
            Command::Thickness { .. } => "thickness",
            Command::ThicknessCl { .. } => "thickness-cl",
            Command::Verify { .. } => "verify",
            Command::Intersect { .. } => "intersect",
            Command::Common { .. } => "common",
            Command::SvgGaps { .. } => "svg-gaps",
        }
    }
}
