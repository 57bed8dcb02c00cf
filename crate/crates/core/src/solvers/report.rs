use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::fem::BoundaryFlux;
use crate::field::DiscreteField;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProblemKind {
    DirichletNeumann,
    Tresca,
    Signorini,
}

impl ProblemKind {
    pub fn name(self) -> &'static str {
        match self {
            ProblemKind::DirichletNeumann => "dirichlet-neumann",
            ProblemKind::Tresca => "tresca",
            ProblemKind::Signorini => "signorini",
        }
    }
}

/// Boundary condition currently imposed at one contact dof.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    /// Tresca, `u = 0` imposed
    Stick,
    /// Tresca, `d_n u = -g` imposed, expects `u >= 0`
    SlipPlus,
    /// Tresca, `d_n u = +g` imposed, expects `u <= 0`
    SlipMinus,
    /// Signorini inequality dof held at `u = 0`
    Bound,
    /// Signorini inequality dof with `d_n u = h` imposed
    Free,
    /// Signorini dof with a fixed flux datum
    Neumann,
    /// Signorini dof with `u = 0` fixed
    Fixed,
}

impl Mode {
    pub const ALL: [Mode; 7] = [
        Mode::Stick,
        Mode::SlipPlus,
        Mode::SlipMinus,
        Mode::Bound,
        Mode::Free,
        Mode::Neumann,
        Mode::Fixed,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Mode::Stick => "stick",
            Mode::SlipPlus => "slip+",
            Mode::SlipMinus => "slip-",
            Mode::Bound => "bound",
            Mode::Free => "free",
            Mode::Neumann => "neumann",
            Mode::Fixed => "fixed",
        }
    }
}

/// One mode per contact dof.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActiveSetState {
    pub dofs: Vec<usize>,
    pub modes: Vec<Mode>,
}

impl ActiveSetState {
    pub fn count(&self, mode: Mode) -> usize {
        self.modes.iter().filter(|&&m| m == mode).count()
    }

    /// `stick=12 slip+=3` style summary of the nonzero counts.
    pub fn summary(&self) -> String {
        Mode::ALL
            .iter()
            .filter_map(|&m| match self.count(m) {
                0 => None,
                c => Some(format!("{}={c}", m.name())),
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IterationRecord {
    pub iteration: usize,
    pub switches: usize,
    pub linear_iterations: usize,
    pub summary: String,
}

/// Per-dof violations of the discrete contact law.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplementarityResiduals {
    pub dofs: Vec<usize>,
    /// sign and bound violations
    pub feasibility: Vec<f64>,
    /// product (slackness) violations
    pub complementarity: Vec<f64>,
    /// relative residual of the equations away from the contact boundary
    pub interior: f64,
}

impl ComplementarityResiduals {
    pub fn max_feasibility(&self) -> f64 {
        self.feasibility.iter().cloned().fold(0.0, f64::max)
    }

    pub fn max_complementarity(&self) -> f64 {
        self.complementarity.iter().cloned().fold(0.0, f64::max)
    }

    pub fn max(&self) -> f64 {
        self.max_feasibility().max(self.max_complementarity())
    }
}

#[derive(Clone, Debug)]
pub struct SolveReport {
    pub kind: ProblemKind,
    pub solution: DiscreteField,
    pub converged: bool,
    /// outer (switching) iterations; 1 for a linear solve
    pub iterations: usize,
    pub linear_iterations: usize,
    pub linear_residual: f64,
    pub energy: f64,
    pub state: Option<ActiveSetState>,
    pub history: Vec<IterationRecord>,
    pub flux: Option<BoundaryFlux>,
    pub residuals: Option<ComplementarityResiduals>,
    /// free-form parameter echo, written verbatim into the report
    pub params: Vec<(String, String)>,
}

impl SolveReport {
    pub fn values(&self) -> &[f64] {
        self.solution.values()
    }

    pub fn push_param(&mut self, key: impl Into<String>, value: impl ToString) {
        self.params.push((key.into(), value.to_string()));
    }

    /// Structured text: `key = value` lines, then `[history]` and `[dofs]`
    /// tables with whitespace-separated columns.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mesh = self.solution.mesh();
        let stats = mesh.stats();
        let _ = writeln!(s, "problem = {}", self.kind.name());
        let _ = writeln!(s, "converged = {}", self.converged);
        let _ = writeln!(s, "iterations = {}", self.iterations);
        let _ = writeln!(s, "linear_iterations = {}", self.linear_iterations);
        let _ = writeln!(s, "linear_residual = {:.6e}", self.linear_residual);
        let _ = writeln!(s, "energy = {:.15e}", self.energy);
        if let Some(r) = &self.residuals {
            let _ = writeln!(s, "max_feasibility = {:.6e}", r.max_feasibility());
            let _ = writeln!(s, "max_complementarity = {:.6e}", r.max_complementarity());
            let _ = writeln!(s, "interior_residual = {:.6e}", r.interior);
        }
        if let Some(st) = &self.state {
            let _ = writeln!(s, "final_modes = {}", st.summary());
        }
        let _ = writeln!(s, "mesh.vertices = {}", stats.n_vertices);
        let _ = writeln!(s, "mesh.triangles = {}", stats.n_triangles);
        let _ = writeln!(s, "mesh.boundary_edges = {}", stats.n_boundary_edges);
        let _ = writeln!(s, "mesh.dofs = {}", stats.n_dofs);
        let _ = writeln!(s, "mesh.fe_order = {}", stats.fe_order);
        let _ = writeln!(s, "mesh.h_max = {:.6e}", stats.h_max);
        let _ = writeln!(s, "mesh.h_min = {:.6e}", stats.h_min);
        let _ = writeln!(s, "mesh.min_angle_deg = {:.4}", stats.min_angle_deg);
        for (k, v) in &self.params {
            let _ = writeln!(s, "{k} = {v}");
        }

        if !self.history.is_empty() {
            let _ = writeln!(s, "\n[history]\niteration switches linear_iterations modes");
            for h in &self.history {
                let _ = writeln!(
                    s,
                    "{} {} {} {}",
                    h.iteration, h.switches, h.linear_iterations, h.summary
                );
            }
        }

        if let Some(flux) = &self.flux {
            let _ = writeln!(s, "\n[dofs]\ndof x y u lambda mode feasibility complementarity");
            let u = self.solution.values();
            for (j, (&d, lam)) in flux.dofs.iter().zip(&flux.values).enumerate() {
                let [x, y] = mesh.dof_coords(d);
                let mode = self.state.as_ref().map_or("-", |st| st.modes[j].name());
                let (fe, co) = self
                    .residuals
                    .as_ref()
                    .map_or((0.0, 0.0), |r| (r.feasibility[j], r.complementarity[j]));
                let _ = writeln!(
                    s,
                    "{d} {x:.15e} {y:.15e} {:.15e} {lam:.15e} {mode} {fe:.3e} {co:.3e}",
                    u[d]
                );
            }
        }
        s
    }

    pub fn write_text(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }
}

/// Dof table `i x y value`, one line per dof.
pub fn field_to_text(field: &DiscreteField) -> String {
    let mesh = field.mesh();
    let mut s = String::from("# i x y value\n");
    for (i, v) in field.values().iter().enumerate() {
        let [x, y] = mesh.dof_coords(i);
        let _ = writeln!(s, "{i} {x:.15e} {y:.15e} {v:.15e}");
    }
    s
}

pub fn write_field(field: &DiscreteField, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, field_to_text(field)).map_err(|e| Error::io(path, e))
}
