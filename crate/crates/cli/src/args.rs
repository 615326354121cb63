use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "hamiltonize", version, about = "Hamiltonization of nonholonomic systems with one base coordinate")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate one formulation and write a CSV trajectory plus a JSON sidecar.
    Simulate(SimulateArgs),
    /// Integrate several formulations from a shared initial condition and compare them.
    Compare(CompareArgs),
    /// Run the Helmholtz, Pontryagin and measure checks and aggregate the verdicts.
    Certify(CertifyArgs),
    /// Singularity certificate and multiplier residuals for one associated system.
    HelmholtzCheck(HelmholtzArgs),
    /// Compare the optimal-control Hamiltonian with the closed-form one.
    PontryaginCheck(PontryaginArgs),
    /// Check the invariant-measure equations at sampled base points.
    MeasureCheck(MeasureArgs),
}

#[derive(Debug, Clone, Args)]
pub struct SystemArgs {
    /// Built-in system: free_particle, knife_edge or vertical_disk.
    #[arg(long, conflicts_with = "spec", required_unless_present = "spec")]
    pub system: Option<String>,
    /// TOML system file with keys I1, I2, I_alpha, A_alpha, names and optional N.
    #[arg(long, value_name = "FILE")]
    pub spec: Option<PathBuf>,
    #[arg(long, default_value_t = 1.0)]
    pub mass: f64,
    #[arg(long, default_value_t = 1.0)]
    pub radius: f64,
    /// Moment of inertia about the rolling axis.
    #[arg(long, default_value_t = 1.0)]
    pub inertia: f64,
    /// Moment of inertia about the vertical axis.
    #[arg(long, default_value_t = 1.0)]
    pub spin_inertia: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Directory for reports and trajectories.
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    /// Lagrangian (and Hamiltonian) kind.
    #[arg(long, value_enum, default_value_t = ModelKind::First)]
    pub model: ModelKind,
    /// Comma-separated parameter override: C_b for the first kind, a_beta for the second.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub coeffs: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Final time.
    #[arg(long = "t", default_value_t = 5.0)]
    pub t_end: f64,
    /// RK4 step.
    #[arg(long, default_value_t = 1e-3)]
    pub h: f64,
    /// Initial positions, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub q: Option<Vec<f64>>,
    /// Initial velocities, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub qdot: Option<Vec<f64>>,
    /// Replace the constrained velocities by the values the constraints
    /// prescribe from r1_dot and r2_dot.
    #[arg(long)]
    pub ic_on_constraint: bool,
    /// Associated system used by the `sode` formulation.
    #[arg(long, value_enum, default_value_t = SodeArg::Second)]
    pub sode: SodeArg,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub run: RunArgs,
    #[arg(long, value_enum, default_value_t = Formulation::Nonholonomic)]
    pub formulation: Formulation,
}

#[derive(Debug, Clone, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub run: RunArgs,
    /// Formulations to compare, comma separated or repeated.
    #[arg(long, value_enum, value_delimiter = ',', default_value = "nonholonomic,lagrangian,hamiltonian")]
    pub formulation: Vec<Formulation>,
    /// Largest admissible pairwise sup-norm.
    #[arg(long, default_value_t = 1e-5)]
    pub tol: f64,
}

#[derive(Debug, Clone, Args)]
pub struct CertifyArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    /// Checks to run; all by default.
    #[arg(long, value_enum, value_delimiter = ',')]
    pub check: Vec<CheckName>,
    /// Phase-space samples for the Pontryagin checks.
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
}

#[derive(Debug, Clone, Args)]
pub struct HelmholtzArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    #[arg(long, value_enum, default_value_t = SodeArg::Second)]
    pub sode: SodeArg,
    /// Multiplier to test: the Hessian of a Lagrangian. Defaults to the
    /// Lagrangian whose equations are the chosen system, if any.
    #[arg(long, value_enum)]
    pub model: Option<MultiplierArg>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub coeffs: Option<Vec<f64>>,
    #[arg(long, default_value_t = 50)]
    pub samples: usize,
    /// Number of total derivatives of the multiplier conditions in the certificate.
    #[arg(long, default_value_t = 3)]
    pub depth: usize,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
}

#[derive(Debug, Clone, Args)]
pub struct PontryaginArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    #[arg(long, value_enum, default_value_t = CostArg::G1)]
    pub kind: CostArg,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub coeffs: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Args)]
pub struct MeasureArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Formulation {
    Nonholonomic,
    Sode,
    Lagrangian,
    Hamiltonian,
    ClosedForm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelKind {
    First,
    Second,
    Variational,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MultiplierArg {
    First,
    Second,
    Variational,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SodeArg {
    First,
    Second,
    Third,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CostArg {
    G1,
    G2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CheckName {
    Certificate,
    Helmholtz,
    G1,
    G2,
    Ham2,
    Measure,
}

impl CheckName {
    pub const ALL: [CheckName; 6] = [
        CheckName::Certificate,
        CheckName::Helmholtz,
        CheckName::G1,
        CheckName::G2,
        CheckName::Ham2,
        CheckName::Measure,
    ];
}
