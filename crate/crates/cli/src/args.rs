use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(
    name = "expsmooth",
    version,
    about = "Coefficient laboratory for F(x) = exp(G(x))"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct GlobalOpts {
    /// Truncation order N (inclusive). Each command has its own default.
    #[arg(long, global = true)]
    pub order: Option<u64>,
    /// Coefficient backend; `auto` picks exact whenever the input allows it.
    #[arg(long, global = true, value_enum, default_value_t = BackendChoice::Auto)]
    pub backend: BackendChoice,
    /// Float precision in bits.
    #[arg(
        long,
        global = true,
        env = "EXPSMOOTH_PRECISION",
        default_value_t = 256
    )]
    pub precision: usize,
    /// Growth factor for the diverging trend label.
    #[arg(long, global = true, default_value_t = 1.5)]
    pub kappa: f64,
    /// Closeness to 1 for the tending-to-one trend label.
    #[arg(long, global = true, default_value_t = 0.05)]
    pub delta: f64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Report path; standard output when absent.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Worker threads for grid work; 1 runs sequentially, 0 uses all cores.
    #[arg(long, global = true, default_value_t = 0)]
    pub jobs: usize,
    /// Run the command's example table against the golden files.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub selftest: bool,
    /// Rewrite golden files instead of comparing (with --selftest).
    #[arg(long, global = true, hide = true)]
    #[serde(skip)]
    pub bless: bool,
    #[arg(long, global = true, hide = true)]
    #[serde(skip)]
    pub golden_dir: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BackendChoice {
    Auto,
    Exact,
    Float,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SideArg {
    Labelled,
    Unlabelled,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScopeArg {
    Total,
    Connected,
}

/// Where the series G (or F) comes from.
#[derive(Clone, Debug, Args, Serialize)]
pub struct SeriesInput {
    /// Sequence rule: a JSON file, inline JSON, or a shorthand such as `1/n!`.
    #[arg(long, conflicts_with = "input")]
    pub rule: Option<String>,
    /// Treat rule values as counts p(n) and use p(n)/n! as coefficients.
    #[arg(long, requires = "rule")]
    pub egf: bool,
    /// Series file written by another command.
    #[arg(long)]
    pub input: Option<PathBuf>,
}

#[derive(Clone, Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Coefficients of exp(G).
    Exp {
        #[command(flatten)]
        g: SeriesInput,
    },
    /// Coefficients of log(F) for F(0) = 1.
    Log {
        #[command(flatten)]
        f: SeriesInput,
    },
    /// prod_j (1 - x^j)^(-p(j)) for integer counts p.
    Euler {
        #[arg(long)]
        rule: Option<String>,
    },
    /// Ratio sequence f(n-1)/f(n) of F = exp(G), or of a series file, with a trend label.
    Ratios {
        #[command(flatten)]
        g: SeriesInput,
        /// Treat the input file as F itself rather than as G.
        #[arg(long)]
        direct: bool,
        #[arg(long, default_value_t = 1)]
        start: u64,
    },
    /// Saddle-point estimates for polynomial G.
    Saddle {
        #[command(flatten)]
        poly: PolyInput,
        #[arg(long, value_delimiter = ',', default_values_t = [10u64, 20, 50, 100, 200])]
        n: Vec<u64>,
    },
    /// s(n) = -d log f(n) / (n log n) for polynomial G.
    ExponentFit {
        #[command(flatten)]
        poly: PolyInput,
        #[arg(long, value_delimiter = ',', default_values_t = [50u64, 100, 200])]
        n: Vec<u64>,
    },
    /// Splits G into terms of degree <= ell and >= ell + 1.
    Split {
        #[command(flatten)]
        g: SeriesInput,
        #[arg(long)]
        ell: Option<u64>,
    },
    /// Constants C_r with n g(n) <= C_r f0(n + r), checked against f.
    CrBound {
        #[command(flatten)]
        g: SeriesInput,
        /// Positivity onset; the smallest certified one when absent.
        #[arg(long)]
        l: Option<u64>,
        #[arg(long)]
        ell: Option<u64>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_values_t = [-1i64, 0, 1, 2])]
        r: Vec<i64>,
    },
    /// End-to-end smoothing demonstration for g = rule with exponent theta.
    TheoremDemo {
        #[arg(long)]
        rule: Option<String>,
        #[arg(long)]
        theta: Option<String>,
        #[arg(long, default_value_t = 1.0)]
        hypothesis_cap: f64,
    },
    /// Recursive construction with infinitely many ratio violations below t.
    Counterexample {
        /// Threshold sequence t, e.g. `n^n/n!`.
        #[arg(long)]
        t: Option<String>,
        #[arg(long = "m", default_value_t = 1)]
        m_cutoff: u64,
        #[arg(long, default_value_t = 3)]
        stages: usize,
        #[arg(long, default_value_t = 500)]
        search_cap: u64,
        #[arg(long, default_value_t = 1e-40)]
        tol: f64,
    },
    /// Totals and 0-1 law verdicts for an adequate class.
    Class {
        /// Built-in class name.
        #[arg(long, conflicts_with = "spec")]
        name: Option<String>,
        /// Class spec JSON file.
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        colors: u64,
        #[arg(long, value_delimiter = ',', value_enum, default_values_t = [SideArg::Labelled, SideArg::Unlabelled])]
        check: Vec<SideArg>,
        #[arg(long, default_value_t = 0.95)]
        theta_max: f64,
        #[arg(long, default_value_t = 0.98)]
        radius_cutoff: f64,
    },
    /// Brute-force counts by enumeration.
    Oracle {
        #[arg(long)]
        class: Option<String>,
        /// Largest size; clamped to the class cap.
        #[arg(long)]
        n: Option<u64>,
        #[arg(long, value_enum, default_value_t = SideArg::Labelled)]
        side: SideArg,
        #[arg(long, value_enum, default_value_t = ScopeArg::Total)]
        scope: ScopeArg,
    },
    /// Root-test radius estimate of an integer sequence or a class side.
    Radius {
        #[arg(long, conflicts_with = "class")]
        rule: Option<String>,
        /// Estimate from the component counts of this built-in class.
        #[arg(long)]
        class: Option<String>,
        #[arg(long, value_enum, default_value_t = SideArg::Unlabelled)]
        side: SideArg,
    },
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct PolyInput {
    /// One of the built-in polynomials: x, x+x^2, x^2+x^3.
    #[arg(long, conflicts_with = "rule")]
    pub poly: Option<String>,
    /// Explicit coefficient rule for G.
    #[arg(long)]
    pub rule: Option<String>,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Exp { .. } => "exp",
            Command::Log { .. } => "log",
            Command::Euler { .. } => "euler",
            Command::Ratios { .. } => "ratios",
            Command::Saddle { .. } => "saddle",
            Command::ExponentFit { .. } => "exponent-fit",
            Command::Split { .. } => "split",
            Command::CrBound { .. } => "cr-bound",
            Command::TheoremDemo { .. } => "theorem-demo",
            Command::Counterexample { .. } => "counterexample",
            Command::Class { .. } => "class",
            Command::Oracle { .. } => "oracle",
            Command::Radius { .. } => "radius",
        }
    }

    pub fn default_order(&self) -> u64 {
        match self {
            Command::TheoremDemo { .. } => 200,
            Command::Class { .. } => 60,
            Command::Radius { .. } => 600,
            Command::Counterexample { .. } => 20,
            _ => 40,
        }
    }
}
