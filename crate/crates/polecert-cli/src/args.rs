use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "polecert",
    version,
    about = "Prescribed-decay pole placement for scalar neutral delay equations: \
             gain synthesis, dominance certification, spectrum maps, and \
             closed-loop simulation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(Subcommand)]
pub enum Cmd {
    /// Synthesize gains from a request document, certify dominance, report
    Design(DesignArgs),
    /// Map quasipolynomial roots over a window into a CSV table
    Spectrum(SpectrumArgs),
    /// Integrate the closed-loop (or open-loop) Hopfield plant
    Simulate(SimulateArgs),
    /// Contrast a three-root PD design with a two-root P design
    Compare(CompareArgs),
    /// Critical delay of a prescribed real root triple
    TauStar(TauStarArgs),
    /// Classify a two-root configuration and locate any third real root
    Regions(RegionsArgs),
    /// Exponential-envelope constants for a design request
    EstimateK(EstimateKArgs),
}

#[derive(Args)]
pub struct DesignArgs {
    /// Design request document (JSON)
    pub request: PathBuf,
    /// Decay-bound margin ε; overrides the request option (default 0.1)
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Certification height; overrides the request option (default 20π/τ)
    #[arg(long)]
    pub im_limit: Option<f64>,
    /// Simulation horizon; presence adds a simulation summary to the report
    #[arg(long)]
    pub horizon: Option<f64>,
    /// Integrator step (default τ/64)
    #[arg(long)]
    pub step: Option<f64>,
    /// Write the report here instead of stdout (atomic)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write an SVG scatter of the mapped spectrum
    #[arg(long)]
    pub plot: Option<PathBuf>,
}

#[derive(Args)]
pub struct SpectrumArgs {
    /// Design request document; the mapped quasipolynomial is its closed loop
    #[arg(required_unless_present = "coeffs", conflicts_with = "coeffs")]
    pub request: Option<PathBuf>,
    /// Direct coefficients a,alpha,beta,tau of Δ(s) = s + a + e^{−τs}(αs + β)
    #[arg(long, allow_hyphen_values = true)]
    pub coeffs: Option<String>,
    /// Search window re0,re1,im0,im1 (default [−50/τ, 50/τ]×[−20π/τ, 20π/τ])
    #[arg(long, allow_hyphen_values = true)]
    pub window: Option<String>,
    /// Write the table here instead of stdout (atomic)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write an SVG scatter of the found roots
    #[arg(long)]
    pub plot: Option<PathBuf>,
}

#[derive(Args)]
pub struct SimulateArgs {
    /// Design request document; omit with --no-control for an open loop
    #[arg(required_unless_present = "no_control", conflicts_with = "no_control")]
    pub request: Option<PathBuf>,
    /// Initial history on [−τ, 0]: sums and products of t, sin, cos, exp,
    /// and constants, e.g. "1+sin(t)"
    #[arg(long, allow_hyphen_values = true)]
    pub history: Option<String>,
    /// Final time (default 4.5)
    #[arg(long)]
    pub horizon: Option<f64>,
    /// Integrator step (default τ/64)
    #[arg(long)]
    pub step: Option<f64>,
    /// Run the plant without feedback
    #[arg(long, requires = "plant")]
    pub no_control: bool,
    /// Plant coefficients nu,mu (with --no-control)
    #[arg(long, allow_hyphen_values = true)]
    pub plant: Option<String>,
    /// Write the trajectory here instead of stdout (atomic)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write an SVG line plot of y(t)
    #[arg(long)]
    pub plot: Option<PathBuf>,
}

#[derive(Args)]
pub struct CompareArgs {
    /// Plant coefficients nu,mu
    #[arg(long, allow_hyphen_values = true)]
    pub plant: String,
    /// Three PD roots s1,s2,s3
    #[arg(long, allow_hyphen_values = true)]
    pub pd_roots: String,
    /// Two P roots s1,s2 (repeat s1 for the coincident design)
    #[arg(long, allow_hyphen_values = true)]
    pub p_pair: String,
    /// Simulation horizon (default 4.5)
    #[arg(long)]
    pub horizon: Option<f64>,
    /// Integrator step (default τ/64 per design)
    #[arg(long)]
    pub step: Option<f64>,
    /// Write the report here instead of stdout (atomic)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct TauStarArgs {
    /// Three prescribed roots s1,s2,s3
    #[arg(long, allow_hyphen_values = true)]
    pub roots: String,
    /// Also solve a(τ) = A for this plant coefficient target
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<f64>,
    /// Write the report here instead of stdout (atomic)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct RegionsArgs {
    /// Assigned pair s1,s2 (strictly decreasing)
    #[arg(long, allow_hyphen_values = true)]
    pub pair: String,
    /// Plant coefficient a
    #[arg(long, allow_hyphen_values = true)]
    pub a: f64,
    /// Delay τ
    #[arg(long)]
    pub tau: f64,
    /// Write the report here instead of stdout (atomic)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct EstimateKArgs {
    /// Design request document (JSON)
    pub request: PathBuf,
    /// Decay-bound margin ε; overrides the request option (default 0.1)
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Write the report here instead of stdout (atomic)
    #[arg(long)]
    pub out: Option<PathBuf>,
}
