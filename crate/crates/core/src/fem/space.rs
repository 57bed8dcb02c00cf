use std::sync::Arc;

use super::assembly::{
    assemble_boundary_load, assemble_boundary_mass_lumped, assemble_load, assemble_mass, assemble_stiffness,
};
use super::linear::{apply_dirichlet, solve_spd, CgOptions, CgOutcome};
use super::shape;
use crate::error::{Error, Result};
use crate::field::{Breakline, DiscreteField, FieldFn};
use crate::mesh::{BoundaryLabel, Mesh2D};
use crate::quadrature::TriangleRule;
use crate::sparse::{norm2, SparseSymMatrix};

/// A mesh together with its stiffness and mass matrices.
#[derive(Clone, Debug)]
pub struct FeSpace {
    mesh: Arc<Mesh2D>,
    stiffness: SparseSymMatrix,
    mass: SparseSymMatrix,
}

/// Nodal flux `lambda_i ~ d_n u(s_i)` on the dofs of one boundary label.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryFlux {
    pub dofs: Vec<usize>,
    pub weights: Vec<f64>,
    pub values: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErrorNorms {
    pub l2: f64,
    pub h1_semi: f64,
    pub h1: f64,
}

impl FeSpace {
    pub fn new(mesh: Arc<Mesh2D>) -> Result<Self> {
        let stiffness = assemble_stiffness(&mesh)?;
        let mass = assemble_mass(&mesh)?;
        Ok(FeSpace { mesh, stiffness, mass })
    }

    pub fn mesh(&self) -> &Arc<Mesh2D> {
        &self.mesh
    }

    pub fn stiffness(&self) -> &SparseSymMatrix {
        &self.stiffness
    }

    pub fn mass(&self) -> &SparseSymMatrix {
        &self.mass
    }

    pub fn n_dofs(&self) -> usize {
        self.mesh.n_dofs()
    }

    pub fn load(&self, f: &FieldFn) -> Result<Vec<f64>> {
        assemble_load(&self.mesh, f)
    }

    /// Boundary load on `label`, or zeros when the mesh has no such edges.
    pub fn boundary_load(&self, label: BoundaryLabel, k: &FieldFn) -> Result<Vec<f64>> {
        if !self.mesh.has_label(label) {
            return Ok(vec![0.0; self.n_dofs()]);
        }
        assemble_boundary_load(&self.mesh, label, k)
    }

    pub fn lumped_weights(&self, label: BoundaryLabel) -> Result<Vec<f64>> {
        assemble_boundary_mass_lumped(&self.mesh, label)
    }

    pub fn dirichlet_dofs(&self) -> Vec<usize> {
        self.mesh.label_dofs(BoundaryLabel::Dirichlet)
    }

    /// Dofs of `label` that carry positive lumped weight and are not on the
    /// closure of the Dirichlet boundary, with their weights.
    pub fn label_dofs_with_weights(&self, label: BoundaryLabel) -> Result<(Vec<usize>, Vec<f64>)> {
        let w = self.lumped_weights(label)?;
        let mut dirichlet = vec![false; self.n_dofs()];
        if label != BoundaryLabel::Dirichlet {
            for d in self.dirichlet_dofs() {
                dirichlet[d] = true;
            }
        }
        Ok((0..self.n_dofs())
            .filter(|&i| w[i] > 0.0 && !dirichlet[i])
            .map(|i| (i, w[i]))
            .unzip())
    }

    pub fn h1_seminorm(&self, v: &[f64]) -> f64 {
        self.stiffness.bilinear(v, v).max(0.0).sqrt()
    }

    pub fn l2_norm(&self, v: &[f64]) -> f64 {
        self.mass.bilinear(v, v).max(0.0).sqrt()
    }

    /// Full norm: `|v|^2 = v^T (K + M) v`.
    pub fn h1_norm(&self, v: &[f64]) -> f64 {
        (self.stiffness.bilinear(v, v) + self.mass.bilinear(v, v))
            .max(0.0)
            .sqrt()
    }

    pub fn field_h1_norm(&self, f: &DiscreteField) -> f64 {
        self.h1_norm(f.values())
    }

    /// Discrete energy `1/2 v^T K v - L^T v`.
    pub fn quadratic_energy(&self, v: &[f64], load: &[f64]) -> f64 {
        0.5 * self.stiffness.bilinear(v, v) - load.iter().zip(v).map(|(a, b)| a * b).sum::<f64>()
    }

    /// Solves `K u = load` with `u = values` on `fixed`. `guess` seeds CG.
    pub fn solve_with_dirichlet(
        &self,
        load: &[f64],
        fixed: &[usize],
        values: &[f64],
        opts: CgOptions,
        guess: Option<&[f64]>,
    ) -> Result<(Vec<f64>, CgOutcome)> {
        let reduced = apply_dirichlet(&self.stiffness, load, fixed, values)?;
        let mut x = match guess {
            Some(g) => reduced.restrict(g),
            None => vec![0.0; reduced.free.len()],
        };
        let outcome = solve_spd(&reduced.matrix, &reduced.rhs, &mut x, opts)?;
        Ok((reduced.expand(&x), outcome))
    }

    /// `lambda = W^{-1} (K u - L)` on the dofs of `label`.
    ///
    /// Refuses when `u` does not satisfy the equations on the remaining
    /// non-Dirichlet dofs to within `tol` (relative to the load scale).
    pub fn flux_recovery(&self, load: &[f64], u: &[f64], label: BoundaryLabel, tol: f64) -> Result<BoundaryFlux> {
        let (dofs, weights) = self.label_dofs_with_weights(label)?;
        let ku = self.stiffness.mul_vec(u);
        let r: Vec<f64> = ku.iter().zip(load).map(|(a, b)| a - b).collect();

        let mut excluded = vec![false; self.n_dofs()];
        for &d in &dofs {
            excluded[d] = true;
        }
        for d in self.dirichlet_dofs() {
            excluded[d] = true;
        }
        let interior: Vec<f64> = (0..self.n_dofs()).filter(|&i| !excluded[i]).map(|i| r[i]).collect();
        let scale = norm2(load).max(norm2(&ku)).max(f64::MIN_POSITIVE);
        let residual = norm2(&interior) / scale;
        if residual > tol {
            return Err(Error::FluxResidual { residual, tol });
        }
        let values = dofs.iter().zip(&weights).map(|(&d, &w)| r[d] / w).collect();
        Ok(BoundaryFlux { dofs, weights, values })
    }

    /// Error norms of `u - exact` by quadrature on every element, split along
    /// `breaklines` where the exact solution is not smooth.
    pub fn error_against(
        &self,
        u: &[f64],
        exact: impl Fn(f64, f64) -> f64 + Sync,
        grad: impl Fn(f64, f64) -> [f64; 2] + Sync,
        breaklines: &[Breakline],
    ) -> Result<ErrorNorms> {
        use rayon::prelude::*;
        let mesh = &self.mesh;
        let order = mesh.fe_order();
        let rule = TriangleRule::degree6();
        let (l2sq, semisq) = (0..mesh.n_triangles())
            .into_par_iter()
            .map(|t| {
                let p = mesh.triangle_points(t);
                let (g, area) = shape::barycentric_gradients(&p);
                let (d, n) = mesh.element_dofs(t);
                let (mut a, mut b) = (0.0, 0.0);
                for (sub, frac) in shape::split_by_breaklines(&p, breaklines) {
                    for (q, w) in rule.points.iter().zip(&rule.weights) {
                        let l = shape::sub_point(&sub, *q);
                        let [x, y] = shape::physical(&p, l);
                        let v = shape::values(order, l);
                        let gr = shape::gradients(order, l, &g);
                        let (mut uh, mut gx, mut gy) = (0.0, 0.0, 0.0);
                        for k in 0..n {
                            uh += u[d[k]] * v[k];
                            gx += u[d[k]] * gr[k][0];
                            gy += u[d[k]] * gr[k][1];
                        }
                        let ge = grad(x, y);
                        let wq = w * frac * area;
                        a += wq * (uh - exact(x, y)).powi(2);
                        b += wq * ((gx - ge[0]).powi(2) + (gy - ge[1]).powi(2));
                    }
                }
                (a, b)
            })
            .collect::<Vec<_>>()
            .into_iter()
            .fold((0.0, 0.0), |(a, b), (c, d)| (a + c, b + d));
        Ok(ErrorNorms {
            l2: l2sq.sqrt(),
            h1_semi: semisq.sqrt(),
            h1: (l2sq + semisq).sqrt(),
        })
    }
}
