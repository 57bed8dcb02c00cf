//! Coefficient functions and finite-element fields.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::mesh::Mesh2D;

/// Line `normal . p = offset` across which a coefficient is not smooth.
/// Assembly splits elements along it so quadrature stays accurate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Breakline {
    pub normal: [f64; 2],
    pub offset: f64,
}

impl Breakline {
    pub fn vertical(x: f64) -> Self {
        Breakline {
            normal: [1.0, 0.0],
            offset: x,
        }
    }

    pub(crate) fn side(&self, p: [f64; 2]) -> f64 {
        self.normal[0] * p[0] + self.normal[1] * p[1] - self.offset
    }
}

/// Closed-form coefficient `(x, y) -> value`.
#[derive(Clone)]
pub struct FieldFn {
    eval: Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>,
    breaklines: Vec<Breakline>,
}

impl FieldFn {
    pub fn new(f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        FieldFn {
            eval: Arc::new(f),
            breaklines: Vec::new(),
        }
    }

    pub fn constant(c: f64) -> Self {
        FieldFn::new(move |_, _| c)
    }

    pub fn zero() -> Self {
        FieldFn::constant(0.0)
    }

    pub fn with_breaklines(mut self, lines: impl IntoIterator<Item = Breakline>) -> Self {
        self.breaklines.extend(lines);
        self
    }

    pub fn breaklines(&self) -> &[Breakline] {
        &self.breaklines
    }

    #[inline]
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        (self.eval)(x, y)
    }

    pub fn scaled(&self, alpha: f64) -> FieldFn {
        let inner = self.eval.clone();
        FieldFn {
            eval: Arc::new(move |x, y| alpha * inner(x, y)),
            breaklines: self.breaklines.clone(),
        }
    }
}

impl fmt::Debug for FieldFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldFn")
            .field("breaklines", &self.breaklines)
            .finish_non_exhaustive()
    }
}

/// Finite-element function: one value per dof of `mesh`.
#[derive(Clone, Debug)]
pub struct DiscreteField {
    mesh: Arc<Mesh2D>,
    values: Vec<f64>,
}

impl DiscreteField {
    pub fn new(mesh: Arc<Mesh2D>, values: Vec<f64>) -> Result<Self> {
        if values.len() != mesh.n_dofs() {
            return Err(Error::Input(format!(
                "field has {} values but the mesh has {} dofs",
                values.len(),
                mesh.n_dofs()
            )));
        }
        Ok(DiscreteField { mesh, values })
    }

    pub fn zeros(mesh: Arc<Mesh2D>) -> Self {
        let n = mesh.n_dofs();
        DiscreteField {
            mesh,
            values: vec![0.0; n],
        }
    }

    /// Nodal interpolant of `f`.
    pub fn interpolate(mesh: Arc<Mesh2D>, f: impl Fn(f64, f64) -> f64) -> Self {
        let values = (0..mesh.n_dofs())
            .map(|d| {
                let [x, y] = mesh.dof_coords(d);
                f(x, y)
            })
            .collect();
        DiscreteField { mesh, values }
    }

    pub fn mesh(&self) -> &Arc<Mesh2D> {
        &self.mesh
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// `self + alpha * other`; both fields must live on the same mesh.
    pub fn axpy(&self, alpha: f64, other: &DiscreteField) -> Result<DiscreteField> {
        if !Arc::ptr_eq(&self.mesh, &other.mesh) && *self.mesh != *other.mesh {
            return Err(Error::Input("fields live on different meshes".into()));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a + alpha * b)
            .collect();
        Ok(DiscreteField {
            mesh: self.mesh.clone(),
            values,
        })
    }
}
