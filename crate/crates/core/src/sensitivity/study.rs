use std::fmt::Write as _;
use std::sync::Arc;

use rayon::prelude::*;

use super::example::PerturbationFamily;
use super::partition::{classify_partition, derivative_problem, BoundaryPartition, PartitionTolerances};
use crate::error::{Error, Result};
use crate::fem::{CgOptions, FeSpace};
use crate::fit::loglog_slope;
use crate::solvers::{
    solve_dirichlet_neumann, solve_signorini_switching, solve_tresca_switching, SolveReport, SwitchingOptions,
    TrescaProblem,
};

/// Friction problem with the family's data at `t`.
pub fn family_problem(family: &PerturbationFamily, t: f64, space: &Arc<FeSpace>) -> Result<TrescaProblem> {
    if !(t >= 0.0) {
        return Err(Error::Input(format!("t must be nonnegative, got {t}")));
    }
    let g = family.g(t);
    TrescaProblem::new(space.clone(), &family.f(t), &family.k(t), |x, y| g.eval(x, y))
}

pub fn solve_family_member(
    family: &PerturbationFamily,
    t: f64,
    space: &Arc<FeSpace>,
    opts: &SwitchingOptions,
) -> Result<SolveReport> {
    let mut report = solve_tresca_switching(&family_problem(family, t, space)?, opts)?;
    report.push_param("t", t);
    Ok(report)
}

/// Solution at `t = 0`, its partition and the derivative.
#[derive(Clone, Debug)]
pub struct Linearization {
    pub base: SolveReport,
    pub partition: BoundaryPartition,
    pub derivative: SolveReport,
}

pub fn linearize(
    family: &PerturbationFamily,
    space: &Arc<FeSpace>,
    opts: &SwitchingOptions,
    tol: &PartitionTolerances,
) -> Result<Linearization> {
    let problem = family_problem(family, 0.0, space)?;
    let base = solve_tresca_switching(&problem, opts)?;
    if !base.converged {
        return Err(Error::Input("the solve at t = 0 did not converge".into()));
    }
    let flux = base.flux.as_ref().expect("switching reports carry the flux");
    let partition = classify_partition(&base.solution, flux, problem.thresholds(), tol)?;
    let derivative = solve_signorini_switching(&derivative_problem(space, &partition, family)?, opts)?;
    if !derivative.converged {
        return Err(Error::Input("the derivative problem did not converge".into()));
    }
    Ok(Linearization {
        base,
        partition,
        derivative,
    })
}

#[derive(Clone, Debug)]
pub struct StudyOptions {
    pub switching: SwitchingOptions,
    pub partition: PartitionTolerances,
    /// inclusive `t` range used for the slope fit
    pub fit_range: (f64, f64),
    /// points with `t` below this are flagged as floor-regime
    pub floor_below: f64,
}

impl Default for StudyOptions {
    fn default() -> Self {
        StudyOptions {
            switching: SwitchingOptions::default(),
            partition: PartitionTolerances::default(),
            fit_range: (0.05, 0.6),
            floor_below: 0.03,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StudyRow {
    pub t: f64,
    pub err_h1: f64,
    pub err_h1_semi: f64,
    pub converged: bool,
    pub iterations: usize,
    pub floor_regime: bool,
}

#[derive(Clone, Debug)]
pub struct StudyResult {
    pub rows: Vec<StudyRow>,
    /// slope of `log err` against `log t` over `fit_range`
    pub slope: Option<f64>,
    pub fit_range: (f64, f64),
    pub partition_summary: String,
    pub derivative_norm: f64,
    pub params: Vec<(String, String)>,
}

impl StudyResult {
    pub fn all_converged(&self) -> bool {
        self.rows.iter().all(|r| r.converged)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,err_h1,err_h1_semi,converged\n");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{:.14e},{:.14e},{:.14e},{}",
                r.t, r.err_h1, r.err_h1_semi, r.converged
            );
        }
        s
    }

    /// Two columns `t err_h1` for a log-log plot.
    pub fn to_plot_data(&self) -> String {
        let mut s = String::from("# t err_h1\n");
        for r in &self.rows {
            let _ = writeln!(s, "{:.14e} {:.14e}", r.t, r.err_h1);
        }
        s
    }

    pub fn to_report(&self) -> String {
        let mut s = String::new();
        match self.slope {
            Some(v) => {
                let _ = writeln!(s, "slope = {v:.6}");
            }
            None => s.push_str("slope = nan\n"),
        }
        let _ = writeln!(s, "fit_range = {} {}", self.fit_range.0, self.fit_range.1);
        let _ = writeln!(s, "all_converged = {}", self.all_converged());
        let _ = writeln!(s, "partition = {}", self.partition_summary);
        let _ = writeln!(s, "derivative_h1_norm = {:.15e}", self.derivative_norm);
        for (k, v) in &self.params {
            let _ = writeln!(s, "{k} = {v}");
        }
        s.push_str("\n[rows]\nt err_h1 err_h1_semi converged iterations floor_regime\n");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{:.14e} {:.14e} {:.14e} {} {} {}",
                r.t, r.err_h1, r.err_h1_semi, r.converged, r.iterations, r.floor_regime
            );
        }
        s
    }
}

/// `err(t) = |u_t - u_0 - t u_0'|` for each `t`, all on the mesh of `space`.
pub fn convergence_study(
    family: &PerturbationFamily,
    t_list: &[f64],
    space: &Arc<FeSpace>,
    opts: &StudyOptions,
) -> Result<StudyResult> {
    if t_list.is_empty() {
        return Err(Error::Input("empty list of t values".into()));
    }
    if t_list.iter().any(|&t| !(t > 0.0 && t.is_finite())) {
        return Err(Error::Input("t values must be positive".into()));
    }
    if t_list.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Input("t values must be strictly descending".into()));
    }
    let lin = linearize(family, space, &opts.switching, &opts.partition)?;
    let u0 = lin.base.values();
    let du = lin.derivative.values();

    let rows: Vec<StudyRow> = t_list
        .par_iter()
        .map(|&t| {
            let (values, converged, iterations) = match solve_family_member(family, t, space, &opts.switching) {
                Ok(r) => (Some(r.values().to_vec()), r.converged, r.iterations),
                Err(_) => (None, false, 0),
            };
            let (err_h1, err_h1_semi) = match values {
                Some(ut) => {
                    let diff: Vec<f64> = (0..ut.len()).map(|i| ut[i] - u0[i] - t * du[i]).collect();
                    (space.h1_norm(&diff), space.h1_seminorm(&diff))
                }
                None => (f64::NAN, f64::NAN),
            };
            StudyRow {
                t,
                err_h1,
                err_h1_semi,
                converged,
                iterations,
                floor_regime: t < opts.floor_below,
            }
        })
        .collect();

    let (lo, hi) = opts.fit_range;
    let (ts, es): (Vec<f64>, Vec<f64>) = rows
        .iter()
        .filter(|r| r.t >= lo && r.t <= hi && r.converged)
        .map(|r| (r.t, r.err_h1))
        .unzip();
    let stats = space.mesh().stats();
    let mut params = vec![
        ("mesh.boundary_edges".to_string(), stats.n_boundary_edges.to_string()),
        ("mesh.dofs".to_string(), stats.n_dofs.to_string()),
        ("mesh.fe_order".to_string(), stats.fe_order.to_string()),
        ("mesh.h_max".to_string(), format!("{:.6e}", stats.h_max)),
        ("switching.tol".to_string(), format!("{:e}", opts.switching.tol)),
        ("partition.eps_u".to_string(), format!("{:e}", lin.partition.eps_u)),
        ("partition.eps_g".to_string(), format!("{:e}", lin.partition.eps_g)),
    ];
    params.push(("base.iterations".into(), lin.base.iterations.to_string()));
    params.push(("derivative.iterations".into(), lin.derivative.iterations.to_string()));
    Ok(StudyResult {
        rows,
        slope: loglog_slope(&ts, &es),
        fit_range: opts.fit_range,
        partition_summary: lin.partition.summary(),
        derivative_norm: space.h1_norm(du),
        params,
    })
}

/// `|(F_t - F_0)/t - F_0'| / |F_0'|` for the linear problem with zero flux on
/// the friction arc.
pub fn linear_sensitivity_ratio(
    family: &PerturbationFamily,
    space: &Arc<FeSpace>,
    t: f64,
    cg: CgOptions,
) -> Result<f64> {
    let zero = crate::field::FieldFn::zero();
    let f0 = solve_dirichlet_neumann(space, &family.f(0.0), &family.k(0.0), &zero, cg)?;
    let ft = solve_dirichlet_neumann(space, &family.f(t), &family.k(t), &zero, cg)?;
    let fp = solve_dirichlet_neumann(space, family.f_prime(), family.k_prime(), &zero, cg)?;
    let (a, b, c) = (f0.values(), ft.values(), fp.values());
    let diff: Vec<f64> = (0..a.len()).map(|i| (b[i] - a[i]) / t - c[i]).collect();
    Ok(space.h1_norm(&diff) / space.h1_norm(c))
}
