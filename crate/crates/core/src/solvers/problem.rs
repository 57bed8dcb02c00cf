use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fem::FeSpace;
use crate::field::FieldFn;
use crate::mesh::BoundaryLabel;

/// Friction problem: `-lap u = f`, `u = 0` on D, `d_n u = k` on N and the
/// Tresca law on T with nodal thresholds `g`.
#[derive(Clone, Debug)]
pub struct TrescaProblem {
    space: Arc<FeSpace>,
    load: Vec<f64>,
    dofs: Vec<usize>,
    weights: Vec<f64>,
    g: Vec<f64>,
}

impl TrescaProblem {
    /// `g` is sampled at the Tresca dofs.
    pub fn new(space: Arc<FeSpace>, f: &FieldFn, k: &FieldFn, g: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let load = volume_and_neumann_load(&space, f, k)?;
        let (dofs, _) = space.label_dofs_with_weights(BoundaryLabel::Tresca)?;
        let mesh = space.mesh().clone();
        let g = dofs
            .iter()
            .map(|&d| {
                let [x, y] = mesh.dof_coords(d);
                g(x, y)
            })
            .collect();
        TrescaProblem::from_parts(space, load, g)
    }

    /// `load` is the full assembled right-hand side, `g` one value per
    /// Tresca dof in the order of `FeSpace::label_dofs_with_weights`.
    pub fn from_parts(space: Arc<FeSpace>, load: Vec<f64>, g: Vec<f64>) -> Result<Self> {
        if load.len() != space.n_dofs() {
            return Err(Error::Input("load length differs from the dof count".into()));
        }
        let (dofs, weights) = space.label_dofs_with_weights(BoundaryLabel::Tresca)?;
        if g.len() != dofs.len() {
            return Err(Error::Input(format!(
                "{} thresholds for {} Tresca dofs",
                g.len(),
                dofs.len()
            )));
        }
        if let Some(i) = g.iter().position(|&v| !(v > 0.0) || !v.is_finite()) {
            return Err(Error::Input(format!(
                "threshold must be positive and finite, got {} at dof {}",
                g[i], dofs[i]
            )));
        }
        Ok(TrescaProblem {
            space,
            load,
            dofs,
            weights,
            g,
        })
    }

    pub fn space(&self) -> &Arc<FeSpace> {
        &self.space
    }

    pub fn load(&self) -> &[f64] {
        &self.load
    }

    pub fn dofs(&self) -> &[usize] {
        &self.dofs
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn thresholds(&self) -> &[f64] {
        &self.g
    }

    /// Same problem with `f`, `k` and `g` multiplied by `alpha`.
    pub fn scaled(&self, alpha: f64) -> Result<Self> {
        TrescaProblem::from_parts(
            self.space.clone(),
            self.load.iter().map(|v| alpha * v).collect(),
            self.g.iter().map(|v| alpha * v).collect(),
        )
    }

    /// `J(v) = 1/2 v^T K v - L^T v + sum w_i g_i |v_i|`.
    pub fn energy(&self, v: &[f64]) -> f64 {
        let friction: f64 = self
            .dofs
            .iter()
            .zip(self.weights.iter().zip(&self.g))
            .map(|(&d, (w, g))| w * g * v[d].abs())
            .sum();
        self.space.quadratic_energy(v, &self.load) + friction
    }
}

/// Region tag of a contact dof in a Signorini problem.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RegionTag {
    /// flux prescribed: `d_n u = h`
    Neumann,
    /// `u = 0`
    Dirichlet,
    /// `u <= 0`, `d_n u <= h`, `u (d_n u - h) = 0`
    Minus,
    /// `u >= 0`, `d_n u >= h`, `u (d_n u - h) = 0`
    Plus,
}

impl RegionTag {
    pub fn code(self) -> &'static str {
        match self {
            RegionTag::Neumann => "SN",
            RegionTag::Dirichlet => "SD",
            RegionTag::Minus => "S-",
            RegionTag::Plus => "S+",
        }
    }
}

impl fmt::Display for RegionTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for RegionTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "SN" => Ok(RegionTag::Neumann),
            "SD" => Ok(RegionTag::Dirichlet),
            "S-" => Ok(RegionTag::Minus),
            "S+" => Ok(RegionTag::Plus),
            _ => Err(Error::Input(format!(
                "unknown region tag {s:?} (expected SN, SD, S- or S+)"
            ))),
        }
    }
}

/// Unilateral problem on the Tresca boundary with per-dof regions and flux
/// datum `h`.
#[derive(Clone, Debug)]
pub struct SignoriniProblem {
    space: Arc<FeSpace>,
    load: Vec<f64>,
    dofs: Vec<usize>,
    weights: Vec<f64>,
    tags: Vec<RegionTag>,
    h: Vec<f64>,
}

impl SignoriniProblem {
    pub fn new(space: Arc<FeSpace>, f: &FieldFn, k: &FieldFn, tags: Vec<RegionTag>, h: Vec<f64>) -> Result<Self> {
        let load = volume_and_neumann_load(&space, f, k)?;
        SignoriniProblem::from_parts(space, load, tags, h)
    }

    /// `tags` and `h` follow the Tresca dof order of the space.
    pub fn from_parts(space: Arc<FeSpace>, load: Vec<f64>, tags: Vec<RegionTag>, h: Vec<f64>) -> Result<Self> {
        if load.len() != space.n_dofs() {
            return Err(Error::Input("load length differs from the dof count".into()));
        }
        let (dofs, weights) = space.label_dofs_with_weights(BoundaryLabel::Tresca)?;
        if tags.len() != dofs.len() || h.len() != dofs.len() {
            return Err(Error::Input(format!(
                "{} tags and {} data values for {} contact dofs",
                tags.len(),
                h.len(),
                dofs.len()
            )));
        }
        if h.iter().any(|v| !v.is_finite()) {
            return Err(Error::Input("flux datum must be finite".into()));
        }
        Ok(SignoriniProblem {
            space,
            load,
            dofs,
            weights,
            tags,
            h,
        })
    }

    pub fn space(&self) -> &Arc<FeSpace> {
        &self.space
    }

    pub fn load(&self) -> &[f64] {
        &self.load
    }

    pub fn dofs(&self) -> &[usize] {
        &self.dofs
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn tags(&self) -> &[RegionTag] {
        &self.tags
    }

    pub fn flux_datum(&self) -> &[f64] {
        &self.h
    }

    /// Load including the boundary datum on every non-Dirichlet contact dof.
    pub fn effective_load(&self) -> Vec<f64> {
        let mut l = self.load.clone();
        for (j, &d) in self.dofs.iter().enumerate() {
            if self.tags[j] != RegionTag::Dirichlet {
                l[d] += self.h[j] * self.weights[j];
            }
        }
        l
    }

    pub fn is_feasible(&self, v: &[f64]) -> bool {
        self.dofs.iter().zip(&self.tags).all(|(&d, tag)| match tag {
            RegionTag::Neumann => true,
            RegionTag::Dirichlet => v[d] == 0.0,
            RegionTag::Minus => v[d] <= 0.0,
            RegionTag::Plus => v[d] >= 0.0,
        }) && self.space.dirichlet_dofs().iter().all(|&d| v[d] == 0.0)
    }

    /// `1/2 v^T K v - L^T v - sum h_i w_i v_i` on the cone, `+inf` outside.
    pub fn energy(&self, v: &[f64]) -> f64 {
        if !self.is_feasible(v) {
            return f64::INFINITY;
        }
        self.space.quadratic_energy(v, &self.effective_load())
    }
}

pub(crate) fn volume_and_neumann_load(space: &FeSpace, f: &FieldFn, k: &FieldFn) -> Result<Vec<f64>> {
    let mut load = space.load(f)?;
    let kl = space.boundary_load(BoundaryLabel::Neumann, k)?;
    load.iter_mut().zip(&kl).for_each(|(a, b)| *a += b);
    Ok(load)
}
