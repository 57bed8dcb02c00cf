//! Assembly, linear solves and norms for P1/P2 Lagrange elements.

pub mod assembly;
pub mod linear;
pub mod shape;
mod space;

pub use assembly::{
    assemble_boundary_load, assemble_boundary_mass, assemble_boundary_mass_lumped, assemble_load, assemble_mass,
    assemble_stiffness,
};
pub use linear::{apply_dirichlet, solve_spd, CgOptions, CgOutcome, ReducedSystem};
pub use space::{BoundaryFlux, ErrorNorms, FeSpace};
