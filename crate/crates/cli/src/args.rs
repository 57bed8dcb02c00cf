use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "tresca",
    version,
    about = "Scalar Tresca friction and Signorini problems on the unit disk"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a unit-disk mesh and write it as text.
    Mesh(MeshArgs),
    /// Solve one boundary value problem.
    Solve {
        #[arg(value_enum)]
        problem: ProblemArg,
        #[command(flatten)]
        args: SolveArgs,
    },
    /// Sensitivity study: |u_t - u_0 - t u_0'| over a list of t.
    Study(StudyArgs),
    /// Property checks of the one-dimensional convex-analysis kernel.
    EpiCheck(EpiArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ProblemArg {
    Dn,
    Tresca,
    Signorini,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OrderArg {
    #[value(name = "1")]
    P1,
    #[value(name = "2")]
    P2,
}

#[derive(Debug, Args)]
pub struct MeshArgs {
    /// Number of boundary edges.
    #[arg(long, default_value_t = 190)]
    pub n_boundary: usize,
    /// Finite-element order.
    #[arg(long, value_enum, default_value = "2")]
    pub order: OrderArg,
    /// Boundary arcs of the reference example (the default when no --arc).
    #[arg(long, conflicts_with = "arc")]
    pub paper_labels: bool,
    /// Arc `LABEL:FROM:TO` with LABEL in D, N, T and angles as expressions,
    /// e.g. `D:pi/4:pi/2`. Repeat to cover the circle.
    #[arg(long)]
    pub arc: Vec<String>,
    /// Output file.
    #[arg(long, short, default_value = "mesh.txt")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct MeshSource {
    /// Mesh file written by `tresca mesh`; otherwise the reference mesh is
    /// generated from --n-boundary and --order.
    #[arg(long)]
    pub mesh: Option<PathBuf>,
    #[arg(long, default_value_t = 190, conflicts_with = "mesh")]
    pub n_boundary: usize,
    #[arg(long, value_enum, default_value = "2", conflicts_with = "mesh")]
    pub order: OrderArg,
}

#[derive(Debug, Args)]
pub struct SolverArgs {
    /// Band on the switching tests.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// Switching iteration limit.
    #[arg(long, default_value_t = 200)]
    pub max_iters: usize,
    /// Relative residual target of the linear solver.
    #[arg(long, default_value_t = 1e-12)]
    pub cg_tol: f64,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub mesh: MeshSource,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Use the built-in reference example data at parameter --t.
    #[arg(long)]
    pub paper_example: bool,
    /// Perturbation parameter for --paper-example and for expressions in t.
    #[arg(long, default_value_t = 0.0)]
    pub t: f64,
    /// Volume load.
    #[arg(long, default_value = "0")]
    pub f: String,
    /// Neumann datum on the N arc.
    #[arg(long, default_value = "0")]
    pub k: String,
    /// Neumann datum on the T arc (dn only).
    #[arg(long, default_value = "0")]
    pub h: String,
    /// Friction threshold (tresca only).
    #[arg(long, default_value = "1")]
    pub g: String,
    /// Derivative of the threshold in t, used for --partition-out.
    #[arg(long, default_value = "0")]
    pub g_prime: String,
    /// Partition file (`dof tag h` lines) for signorini.
    #[arg(long)]
    pub partition: Option<PathBuf>,
    /// Write the partition of the friction solution (tresca only).
    #[arg(long)]
    pub partition_out: Option<PathBuf>,
    #[command(flatten)]
    pub eps: EpsArgs,
    /// Structured text report.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Solution field as `i x y value` lines.
    #[arg(long)]
    pub field: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EpsArgs {
    /// Threshold for u0 = 0 (default scales with the mesh size).
    #[arg(long)]
    pub eps_u: Option<f64>,
    /// Threshold for |lambda0| = g0 (default scales with the mesh size).
    #[arg(long)]
    pub eps_g: Option<f64>,
}

#[derive(Debug, Args)]
pub struct StudyArgs {
    #[command(flatten)]
    pub mesh: MeshSource,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Use the built-in reference family (the default when no --f is given).
    #[arg(long)]
    pub paper_example: bool,
    /// Family given by expressions in x, y, t: load f_t.
    #[arg(long, requires_all = ["k", "g", "f_prime", "k_prime", "g_prime"], conflicts_with = "paper_example")]
    pub f: Option<String>,
    #[arg(long)]
    pub k: Option<String>,
    #[arg(long)]
    pub g: Option<String>,
    /// d f_t / dt at t = 0.
    #[arg(long)]
    pub f_prime: Option<String>,
    #[arg(long)]
    pub k_prime: Option<String>,
    #[arg(long)]
    pub g_prime: Option<String>,
    /// Comma-separated, strictly descending.
    #[arg(long, default_value = "0.6,0.4,0.2,0.1,0.075,0.05,0.025,0.01")]
    pub t_values: String,
    /// Range of t used for the slope fit.
    #[arg(long, default_value_t = 0.05)]
    pub fit_min: f64,
    #[arg(long, default_value_t = 0.6)]
    pub fit_max: f64,
    #[command(flatten)]
    pub eps: EpsArgs,
    #[arg(long, default_value = "study.csv")]
    pub csv: PathBuf,
    /// Slope and metadata report.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Two-column `t err` file for a log-log plot.
    #[arg(long)]
    pub plot: Option<PathBuf>,
    #[arg(long)]
    pub partition_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EpiArgs {
    /// Random cases per property.
    #[arg(long, default_value_t = 1000)]
    pub cases: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Claim this g0' in the convergence checks instead of the true one
    /// (negative control: the checks should fail).
    #[arg(long)]
    pub claimed_g_prime: Option<f64>,
    /// Print every Mosco report, not only failures.
    #[arg(long)]
    pub verbose: bool,
}
