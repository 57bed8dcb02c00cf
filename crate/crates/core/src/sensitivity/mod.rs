//! Derivative of the friction solution with respect to the data.

mod example;
mod partition;
mod study;

pub use example::*;
pub use partition::{
    classify_partition, derivative_flux_datum, derivative_problem, BoundaryPartition, PartitionTolerances,
};
pub use study::{
    convergence_study, family_problem, linear_sensitivity_ratio, linearize, solve_family_member, Linearization,
    StudyOptions, StudyResult, StudyRow,
};
