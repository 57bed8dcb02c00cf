use std::collections::HashMap;
use std::sync::Arc;

use super::problem::{volume_and_neumann_load, RegionTag, SignoriniProblem, TrescaProblem};
use super::report::{ActiveSetState, ComplementarityResiduals, IterationRecord, Mode, ProblemKind, SolveReport};
use crate::error::{Error, Result};
use crate::fem::{BoundaryFlux, CgOptions, FeSpace};
use crate::field::{DiscreteField, FieldFn};
use crate::mesh::BoundaryLabel;
use crate::sparse::norm2;

/// Where the switching iteration starts.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum InitialState {
    /// every inequality dof held at zero (stick / bound)
    #[default]
    Constrained,
    /// every inequality dof released (slip+ / free)
    Released,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SwitchingOptions {
    pub max_iters: usize,
    /// band on all switch tests, absolute in both `u` and the flux
    pub tol: f64,
    pub cg: CgOptions,
    pub initial: InitialState,
}

impl Default for SwitchingOptions {
    fn default() -> Self {
        SwitchingOptions {
            max_iters: 200,
            tol: 1e-9,
            cg: CgOptions::default(),
            initial: InitialState::Constrained,
        }
    }
}

// Residual above which the interior equations are considered unsolved.
const FLUX_REFUSAL: f64 = 1e-6;

/// Linear problem: `u = 0` on D, `d_n u = k` on N, `d_n u = h` on T.
pub fn solve_dirichlet_neumann(
    space: &Arc<FeSpace>,
    f: &FieldFn,
    k: &FieldFn,
    h: &FieldFn,
    cg: CgOptions,
) -> Result<SolveReport> {
    let mesh = space.mesh();
    if !mesh.has_label(BoundaryLabel::Dirichlet) {
        return Err(Error::Input(
            "the Dirichlet-Neumann problem needs a Dirichlet arc".into(),
        ));
    }
    let mut load = volume_and_neumann_load(space, f, k)?;
    let hl = space.boundary_load(BoundaryLabel::Tresca, h)?;
    load.iter_mut().zip(&hl).for_each(|(a, b)| *a += b);
    let fixed = space.dirichlet_dofs();
    let (u, out) = space.solve_with_dirichlet(&load, &fixed, &vec![0.0; fixed.len()], cg, None)?;
    let energy = space.quadratic_energy(&u, &load);
    Ok(SolveReport {
        kind: ProblemKind::DirichletNeumann,
        solution: DiscreteField::new(mesh.clone(), u)?,
        converged: true,
        iterations: 1,
        linear_iterations: out.iterations,
        linear_residual: out.relative_residual,
        energy,
        state: None,
        history: Vec::new(),
        flux: None,
        residuals: None,
        params: Vec::new(),
    })
}

struct Outcome {
    u: Vec<f64>,
    flux: BoundaryFlux,
    modes: Vec<Mode>,
    history: Vec<IterationRecord>,
    converged: bool,
    linear_iterations: usize,
    linear_residual: f64,
}

/// Shared active-set loop. `datum(j, mode)` returns the flux imposed at
/// contact dof `j` (None means `u_j = 0`); `switch(j, u_j, lambda_j, mode)`
/// returns the next mode.
#[allow(clippy::too_many_arguments)]
fn run_switching(
    space: &FeSpace,
    load: &[f64],
    dofs: &[usize],
    weights: &[f64],
    mut modes: Vec<Mode>,
    datum: impl Fn(usize, Mode) -> Option<f64>,
    switch: impl Fn(usize, f64, f64, Mode) -> Mode,
    opts: &SwitchingOptions,
) -> Result<Outcome> {
    let dirichlet = space.dirichlet_dofs();
    let mut seen: HashMap<Vec<Mode>, usize> = HashMap::new();
    let mut history = Vec::new();
    let mut u = vec![0.0; space.n_dofs()];
    let mut total_cg = 0;
    for iteration in 1..=opts.max_iters {
        if let Some(&first) = seen.get(&modes) {
            let state = ActiveSetState {
                dofs: dofs.to_vec(),
                modes: modes.clone(),
            };
            return Err(Error::Cycle {
                iteration,
                first_seen: first,
                summary: state.summary(),
            });
        }
        seen.insert(modes.clone(), iteration);

        let mut fixed = dirichlet.clone();
        let mut rhs = load.to_vec();
        for (j, &d) in dofs.iter().enumerate() {
            match datum(j, modes[j]) {
                None => fixed.push(d),
                Some(v) => rhs[d] += v * weights[j],
            }
        }
        fixed.sort_unstable();
        fixed.dedup();
        let zeros = vec![0.0; fixed.len()];
        let (next, out) = space.solve_with_dirichlet(&rhs, &fixed, &zeros, opts.cg, Some(&u))?;
        u = next;
        total_cg += out.iterations;
        let flux = space.flux_recovery(load, &u, BoundaryLabel::Tresca, FLUX_REFUSAL)?;
        debug_assert_eq!(flux.dofs, dofs);

        let new_modes: Vec<Mode> = (0..dofs.len())
            .map(|j| switch(j, u[dofs[j]], flux.values[j], modes[j]))
            .collect();
        let switches = new_modes.iter().zip(&modes).filter(|(a, b)| a != b).count();
        let state = ActiveSetState {
            dofs: dofs.to_vec(),
            modes: modes.clone(),
        };
        history.push(IterationRecord {
            iteration,
            switches,
            linear_iterations: out.iterations,
            summary: state.summary(),
        });
        if switches == 0 {
            return Ok(Outcome {
                u,
                flux,
                modes,
                history,
                converged: true,
                linear_iterations: total_cg,
                linear_residual: out.relative_residual,
            });
        }
        modes = new_modes;
    }
    let flux = space.flux_recovery(load, &u, BoundaryLabel::Tresca, f64::INFINITY)?;
    Ok(Outcome {
        u,
        flux,
        modes,
        history,
        converged: false,
        linear_iterations: total_cg,
        linear_residual: f64::NAN,
    })
}

pub fn solve_tresca_switching(problem: &TrescaProblem, opts: &SwitchingOptions) -> Result<SolveReport> {
    let g = problem.thresholds();
    let tol = opts.tol;
    let start = match opts.initial {
        InitialState::Constrained => Mode::Stick,
        InitialState::Released => Mode::SlipPlus,
    };
    let out = run_switching(
        problem.space(),
        problem.load(),
        problem.dofs(),
        problem.weights(),
        vec![start; problem.dofs().len()],
        |j, mode| match mode {
            Mode::SlipPlus => Some(-g[j]),
            Mode::SlipMinus => Some(g[j]),
            _ => None,
        },
        |j, u, lam, mode| match mode {
            Mode::Stick if lam < -(g[j] + tol) => Mode::SlipPlus,
            Mode::Stick if lam > g[j] + tol => Mode::SlipMinus,
            Mode::SlipPlus if u < -tol => Mode::Stick,
            Mode::SlipMinus if u > tol => Mode::Stick,
            m => m,
        },
        opts,
    )?;
    let residuals = tresca_residuals(problem, &out.u);
    let energy = problem.energy(&out.u);
    finish(problem.space(), ProblemKind::Tresca, out, residuals, energy, opts)
}

pub fn solve_signorini_switching(problem: &SignoriniProblem, opts: &SwitchingOptions) -> Result<SolveReport> {
    let tags = problem.tags();
    let h = problem.flux_datum();
    let tol = opts.tol;
    let modes = tags
        .iter()
        .map(|t| match (t, opts.initial) {
            (RegionTag::Neumann, _) => Mode::Neumann,
            (RegionTag::Dirichlet, _) => Mode::Fixed,
            (_, InitialState::Constrained) => Mode::Bound,
            (_, InitialState::Released) => Mode::Free,
        })
        .collect();
    let out = run_switching(
        problem.space(),
        problem.load(),
        problem.dofs(),
        problem.weights(),
        modes,
        |j, mode| match mode {
            Mode::Free | Mode::Neumann => Some(h[j]),
            _ => None,
        },
        |j, u, lam, mode| match (tags[j], mode) {
            (RegionTag::Minus, Mode::Bound) if lam > h[j] + tol => Mode::Free,
            (RegionTag::Minus, Mode::Free) if u > tol => Mode::Bound,
            (RegionTag::Plus, Mode::Bound) if lam < h[j] - tol => Mode::Free,
            (RegionTag::Plus, Mode::Free) if u < -tol => Mode::Bound,
            (_, m) => m,
        },
        opts,
    )?;
    // free dofs may sit up to `tol` on the wrong side; project them onto the
    // cone so the returned field is feasible exactly
    let mut out = out;
    for (&d, t) in problem.dofs().iter().zip(tags) {
        out.u[d] = match t {
            RegionTag::Minus => out.u[d].min(0.0),
            RegionTag::Plus => out.u[d].max(0.0),
            _ => out.u[d],
        };
    }
    let residuals = signorini_residuals(problem, &out.u);
    let energy = problem.energy(&out.u);
    finish(problem.space(), ProblemKind::Signorini, out, residuals, energy, opts)
}

fn finish(
    space: &FeSpace,
    kind: ProblemKind,
    out: Outcome,
    residuals: ComplementarityResiduals,
    energy: f64,
    opts: &SwitchingOptions,
) -> Result<SolveReport> {
    let mut report = SolveReport {
        kind,
        solution: DiscreteField::new(space.mesh().clone(), out.u)?,
        converged: out.converged,
        iterations: out.history.len(),
        linear_iterations: out.linear_iterations,
        linear_residual: out.linear_residual,
        energy,
        state: Some(ActiveSetState {
            dofs: out.flux.dofs.clone(),
            modes: out.modes,
        }),
        history: out.history,
        flux: Some(out.flux),
        residuals: Some(residuals),
        params: Vec::new(),
    };
    report.push_param("switching.tol", format!("{:e}", opts.tol));
    report.push_param("switching.max_iters", opts.max_iters);
    report.push_param("cg.tol", format!("{:e}", opts.cg.tol));
    report.push_param(
        "switching.initial",
        match opts.initial {
            InitialState::Constrained => "constrained",
            InitialState::Released => "released",
        },
    );
    Ok(report)
}

fn raw_flux(space: &FeSpace, load: &[f64], u: &[f64]) -> (BoundaryFlux, f64) {
    // no refusal here: residuals must be computable for any field
    let flux = space
        .flux_recovery(load, u, BoundaryLabel::Tresca, f64::INFINITY)
        .expect("the Tresca label was validated when the problem was built");
    let ku = space.stiffness().mul_vec(u);
    let mut excluded = vec![false; u.len()];
    for &d in flux.dofs.iter().chain(&space.dirichlet_dofs()) {
        excluded[d] = true;
    }
    let interior: Vec<f64> = (0..u.len())
        .filter(|&i| !excluded[i])
        .map(|i| ku[i] - load[i])
        .collect();
    let scale = norm2(load).max(norm2(&ku)).max(f64::MIN_POSITIVE);
    (flux, norm2(&interior) / scale)
}

/// Violations of `|lambda| <= g` and `u lambda + g |u| = 0` per Tresca dof,
/// the latter divided by `1 + |u|`.
pub fn tresca_residuals(problem: &TrescaProblem, u: &[f64]) -> ComplementarityResiduals {
    let (flux, interior) = raw_flux(problem.space(), problem.load(), u);
    let g = problem.thresholds();
    let mut feasibility = Vec::with_capacity(g.len());
    let mut complementarity = Vec::with_capacity(g.len());
    for (j, &d) in flux.dofs.iter().enumerate() {
        let (ui, lam) = (u[d], flux.values[j]);
        feasibility.push((lam.abs() - g[j]).max(0.0));
        complementarity.push((ui * lam + g[j] * ui.abs()).abs() / (1.0 + ui.abs()));
    }
    ComplementarityResiduals {
        dofs: flux.dofs,
        feasibility,
        complementarity,
        interior,
    }
}

pub fn signorini_residuals(problem: &SignoriniProblem, u: &[f64]) -> ComplementarityResiduals {
    let (flux, interior) = raw_flux(problem.space(), problem.load(), u);
    let h = problem.flux_datum();
    let mut feasibility = Vec::with_capacity(h.len());
    let mut complementarity = Vec::with_capacity(h.len());
    for (j, &d) in flux.dofs.iter().enumerate() {
        let (ui, r) = (u[d], flux.values[j] - h[j]);
        let (fe, co) = match problem.tags()[j] {
            RegionTag::Neumann => (0.0, r.abs()),
            RegionTag::Dirichlet => (ui.abs(), 0.0),
            RegionTag::Minus => (ui.max(0.0) + r.max(0.0), (ui * r).abs()),
            RegionTag::Plus => ((-ui).max(0.0) + (-r).max(0.0), (ui * r).abs()),
        };
        feasibility.push(fe);
        complementarity.push(co);
    }
    ComplementarityResiduals {
        dofs: flux.dofs,
        feasibility,
        complementarity,
        interior,
    }
}
