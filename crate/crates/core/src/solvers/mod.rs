//! Dirichlet-Neumann, Tresca and Signorini solvers.
//!
//! Sign convention: `lambda_i = (K u - L)_i / w_i` approximates the outward
//! normal derivative. The Tresca law reads `-lambda_i in g_i d|.|(u_i)`, so a
//! dof with `u_i > 0` carries `lambda_i = -g_i`.

mod oracle;
mod problem;
mod report;
mod switching;

pub use oracle::{complementarity_residuals, projected_gradient_oracle, ContactProblem, OracleOptions, OracleResult};
pub use problem::{RegionTag, SignoriniProblem, TrescaProblem};
pub use report::{
    field_to_text, write_field, ActiveSetState, ComplementarityResiduals, IterationRecord, Mode, ProblemKind,
    SolveReport,
};
pub use switching::{
    signorini_residuals, solve_dirichlet_neumann, solve_signorini_switching, solve_tresca_switching, tresca_residuals,
    InitialState, SwitchingOptions,
};
