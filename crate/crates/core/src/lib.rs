//! Finite elements for the scalar Tresca friction problem and its
//! sensitivity with respect to the data.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod epi;
pub mod error;
pub mod fem;
pub mod field;
pub mod fit;
pub mod mesh;
pub mod quadrature;
pub mod sensitivity;
pub mod solvers;
pub mod sparse;

pub use error::{Error, Result};
pub use fem::{BoundaryFlux, CgOptions, ErrorNorms, FeSpace};
pub use field::{Breakline, DiscreteField, FieldFn};
pub use mesh::{generate_unit_disk, AngleRange, BoundaryEdge, BoundaryLabel, FeOrder, Mesh2D};
pub use sparse::SparseSymMatrix;
