use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::Arc;

use super::example::PerturbationFamily;
use crate::error::{Error, Result};
use crate::fem::{BoundaryFlux, FeSpace};
use crate::field::DiscreteField;
use crate::solvers::{RegionTag, SignoriniProblem};

/// Thresholds for deciding `u0 = 0` and `lambda0 = +-g0`. None selects the
/// default.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PartitionTolerances {
    /// default: `h_max^2 * max |u0|` over the domain, at least 1e-12
    pub eps_u: Option<f64>,
    /// default: `0.1 * h_max * max g0`; the discrete flux on a slipping arc
    /// falls short of `g0` by about `0.07 h`
    pub eps_g: Option<f64>,
}

impl PartitionTolerances {
    pub fn resolve(&self, u0: &DiscreteField, g0: &[f64]) -> (f64, f64) {
        let eps_u = self.eps_u.unwrap_or_else(|| {
            let h = u0.mesh().stats().h_max;
            let umax = u0.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
            (h * h * umax).max(1e-12)
        });
        let eps_g = self
            .eps_g
            .unwrap_or_else(|| 0.1 * u0.mesh().stats().h_max * g0.iter().cloned().fold(0.0, f64::max));
        (eps_u, eps_g)
    }
}

/// Region of every contact dof at `t = 0`, with the inputs kept for audit.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryPartition {
    pub dofs: Vec<usize>,
    pub tags: Vec<RegionTag>,
    pub u0: Vec<f64>,
    pub flux0: Vec<f64>,
    pub g0: Vec<f64>,
    pub eps_u: f64,
    pub eps_g: f64,
    /// dofs with `g0 + eps_g < |lambda0| <= g0 + 10 eps_g`
    pub bound_violations: usize,
}

impl BoundaryPartition {
    pub fn count(&self, tag: RegionTag) -> usize {
        self.tags.iter().filter(|&&t| t == tag).count()
    }

    pub fn summary(&self) -> String {
        [
            RegionTag::Neumann,
            RegionTag::Dirichlet,
            RegionTag::Minus,
            RegionTag::Plus,
        ]
        .iter()
        .map(|&t| format!("{t}={}", self.count(t)))
        .collect::<Vec<_>>()
        .join(" ")
    }

    /// Partition file: `dof tag h` per line, `h = g0' lambda0 / g0`.
    pub fn to_text(&self, h: &[f64]) -> String {
        let mut s = String::from("# dof tag h\n");
        let _ = writeln!(s, "# eps_u = {:e}, eps_g = {:e}", self.eps_u, self.eps_g);
        for ((d, t), hv) in self.dofs.iter().zip(&self.tags).zip(h) {
            let _ = writeln!(s, "{d} {t} {hv:.15e}");
        }
        s
    }
}

/// SN where `|u0| > eps_u`; otherwise S- where `lambda0 = g0`, S+ where
/// `lambda0 = -g0` (both within `eps_g`), SD elsewhere.
pub fn classify_partition(
    u0: &DiscreteField,
    flux0: &BoundaryFlux,
    g0: &[f64],
    tol: &PartitionTolerances,
) -> Result<BoundaryPartition> {
    if g0.len() != flux0.dofs.len() {
        return Err(Error::Input(format!(
            "{} thresholds for {} boundary dofs",
            g0.len(),
            flux0.dofs.len()
        )));
    }
    let (eps_u, eps_g) = tol.resolve(u0, g0);
    if !(eps_u > 0.0 && eps_g > 0.0) {
        return Err(Error::Input("partition tolerances must be positive".into()));
    }
    let u: Vec<f64> = flux0.dofs.iter().map(|&d| u0.values()[d]).collect();
    let mut bound_violations = 0;
    let mut tags = Vec::with_capacity(u.len());
    for j in 0..u.len() {
        let (lam, g) = (flux0.values[j], g0[j]);
        if lam.abs() > g + 10.0 * eps_g {
            return Err(Error::Input(format!(
                "flux {lam:.6e} exceeds threshold {g:.6e} at dof {} (inconsistent input)",
                flux0.dofs[j]
            )));
        }
        if lam.abs() > g + eps_g {
            bound_violations += 1;
        }
        tags.push(threshold_tag(u[j], lam, g, eps_u, eps_g));
    }
    // P2 midpoints sit on chords, off the curved boundary, and the lumped
    // weights make their flux alternate with the vertices'. A midpoint whose
    // two vertices agree takes their tag.
    let mesh = u0.mesh();
    let position: HashMap<usize, usize> = flux0.dofs.iter().enumerate().map(|(j, &d)| (d, j)).collect();
    let vertex_tags = tags.clone();
    for b in 0..mesh.boundary_edges().len() {
        let (d, n) = mesh.boundary_edge_dofs(b);
        if n < 3 {
            continue;
        }
        if let (Some(&a), Some(&c), Some(&m)) = (position.get(&d[0]), position.get(&d[1]), position.get(&d[2])) {
            if vertex_tags[a] == vertex_tags[c] {
                tags[m] = vertex_tags[a];
            }
        }
    }
    Ok(BoundaryPartition {
        dofs: flux0.dofs.clone(),
        tags,
        u0: u,
        flux0: flux0.values.clone(),
        g0: g0.to_vec(),
        eps_u,
        eps_g,
        bound_violations,
    })
}

fn threshold_tag(u: f64, lam: f64, g: f64, eps_u: f64, eps_g: f64) -> RegionTag {
    if u.abs() > eps_u {
        RegionTag::Neumann
    } else if (lam - g).abs() <= eps_g {
        RegionTag::Minus
    } else if (lam + g).abs() <= eps_g {
        RegionTag::Plus
    } else {
        RegionTag::Dirichlet
    }
}

/// Flux datum `h = g0' lambda0 / g0` with the ratio clipped to `[-1, 1]`.
pub fn derivative_flux_datum(partition: &BoundaryPartition, g0_prime: &[f64]) -> Result<Vec<f64>> {
    partition
        .flux0
        .iter()
        .zip(&partition.g0)
        .zip(g0_prime)
        .zip(&partition.dofs)
        .map(|(((lam, g), gp), d)| {
            if !(*g > 0.0) {
                return Err(Error::Input(format!("threshold {g} at dof {d} is not positive")));
            }
            Ok(gp * (lam / g).clamp(-1.0, 1.0))
        })
        .collect()
}

/// Unilateral problem solved by the derivative of the friction solution at
/// `t = 0`.
pub fn derivative_problem(
    space: &Arc<FeSpace>,
    partition: &BoundaryPartition,
    family: &PerturbationFamily,
) -> Result<SignoriniProblem> {
    let mesh = space.mesh();
    let gp: Vec<f64> = partition
        .dofs
        .iter()
        .map(|&d| {
            let [x, y] = mesh.dof_coords(d);
            family.g_prime().eval(x, y)
        })
        .collect();
    let h = derivative_flux_datum(partition, &gp)?;
    SignoriniProblem::new(
        space.clone(),
        family.f_prime(),
        family.k_prime(),
        partition.tags.clone(),
        h,
    )
}
