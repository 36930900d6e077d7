//! Command-line grammar.

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "ratfit", version, about = "Multivariate rational approximation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a sample design as CSV
    Sample(SampleArgs),
    /// Fit a model to a sample CSV
    Fit(FitArgs),
    /// Evaluate a saved model at the points of a CSV
    Eval(EvalArgs),
    /// Run a benchmark grid
    Bench(BenchArgs),
    /// Sweep the regularization weight of the pole-free fit
    Lcurve(LcurveArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Strategy {
    Lhs,
    Dlhd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, ValueEnum)]
pub enum Method {
    Poly,
    Ra,
    #[value(name = "ra-dr")]
    RaDr,
    #[value(name = "ra-sip")]
    RaSip,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Poly => "poly",
            Method::Ra => "ra",
            Method::RaDr => "ra-dr",
            Method::RaSip => "ra-sip",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum LcurveMode {
    /// Constraints at the data points only
    Relaxation,
    /// Full pole-free iteration per sigma
    Polefree,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[arg(long, value_enum)]
    pub strategy: Strategy,
    /// Test function id; its domain is used and a value column is written
    #[arg(long)]
    pub function: Option<String>,
    #[arg(long)]
    pub dim: Option<usize>,
    /// Box as lo:hi[,lo:hi...]; defaults to the function domain or [-1,1]^dim
    #[arg(long, allow_hyphen_values = true)]
    pub domain: Option<String>,
    #[arg(long = "M")]
    pub m: usize,
    #[arg(long = "N")]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: String,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[arg(long, value_enum)]
    pub method: Method,
    #[arg(long = "in")]
    pub input: String,
    #[arg(long = "M")]
    pub m: usize,
    #[arg(long = "N", default_value_t = 0)]
    pub n: usize,
    /// Degree-reduction threshold; defaults to max(10 epsilon, 1e-12)
    #[arg(long)]
    pub eta: Option<f64>,
    /// Relative noise level applied to the sample values before fitting
    #[arg(long, default_value_t = 0.0)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 1.0)]
    pub tau: f64,
    #[arg(long, default_value_t = 0.0)]
    pub sigma: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 200)]
    pub max_iterations: usize,
    #[arg(long, allow_hyphen_values = true)]
    pub domain: Option<String>,
    /// Take the domain from this test function
    #[arg(long)]
    pub function: Option<String>,
    #[arg(long)]
    pub out: String,
    /// Write the fit report here instead of stderr
    #[arg(long)]
    pub report: Option<String>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub model: String,
    #[arg(long = "in")]
    pub input: String,
    #[arg(long)]
    pub out: String,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    pub functions: Vec<String>,
    #[arg(long, value_enum, value_delimiter = ',', required = true)]
    pub methods: Vec<Method>,
    #[arg(long, value_delimiter = ',', default_value = "0")]
    pub epsilons: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5")]
    pub seeds: Vec<u64>,
    #[arg(long = "t", value_delimiter = ',', default_value = "1e2,1e3")]
    pub thresholds: Vec<f64>,
    #[arg(long = "M", default_value_t = 5)]
    pub m: usize,
    #[arg(long = "N", default_value_t = 5)]
    pub n: usize,
    #[arg(long, default_value_t = 1.0)]
    pub tau: f64,
    #[arg(long, default_value_t = 0.0)]
    pub sigma: f64,
    #[arg(long, default_value_t = ratfit::metrics::DEFAULT_FACE_POINTS)]
    pub face_points: usize,
    #[arg(long, default_value_t = ratfit::metrics::DEFAULT_INTERIOR_POINTS)]
    pub interior_points: usize,
    #[arg(long)]
    pub out: String,
}

#[derive(Debug, Args)]
pub struct LcurveArgs {
    #[arg(long = "in")]
    pub input: String,
    #[arg(long = "M")]
    pub m: usize,
    #[arg(long = "N")]
    pub n: usize,
    #[arg(long, value_delimiter = ',', required = true)]
    pub sigmas: Vec<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub tau: f64,
    #[arg(long, value_enum, default_value_t = LcurveMode::Relaxation)]
    pub mode: LcurveMode,
    #[arg(long, allow_hyphen_values = true)]
    pub domain: Option<String>,
    #[arg(long)]
    pub function: Option<String>,
    #[arg(long)]
    pub out: String,
}
