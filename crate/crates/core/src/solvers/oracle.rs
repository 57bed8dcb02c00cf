use super::problem::{RegionTag, SignoriniProblem, TrescaProblem};
use super::report::{ComplementarityResiduals, SolveReport};
use super::switching::{signorini_residuals, tresca_residuals};
use crate::epi::prox_abs_scaled;
use crate::error::{Error, Result};
use crate::fem::FeSpace;
use crate::field::DiscreteField;
use crate::sparse::norm2;

/// Either contact problem, for code that treats both alike.
#[derive(Clone, Copy, Debug)]
pub enum ContactProblem<'a> {
    Tresca(&'a TrescaProblem),
    Signorini(&'a SignoriniProblem),
}

impl ContactProblem<'_> {
    pub fn space(&self) -> &FeSpace {
        match self {
            ContactProblem::Tresca(p) => p.space(),
            ContactProblem::Signorini(p) => p.space(),
        }
    }

    pub fn energy(&self, v: &[f64]) -> f64 {
        match self {
            ContactProblem::Tresca(p) => p.energy(v),
            ContactProblem::Signorini(p) => p.energy(v),
        }
    }

    /// Linear part of the energy, `grad = K v - load`.
    fn linear_load(&self) -> Vec<f64> {
        match self {
            ContactProblem::Tresca(p) => p.load().to_vec(),
            ContactProblem::Signorini(p) => p.effective_load(),
        }
    }

    /// Proximal map of the nonsmooth part with step `step`, in place.
    fn prox(&self, step: f64, x: &mut [f64]) {
        match self {
            ContactProblem::Tresca(p) => {
                for (j, &d) in p.dofs().iter().enumerate() {
                    x[d] = prox_abs_scaled(step * p.weights()[j] * p.thresholds()[j], x[d])
                        .expect("thresholds and weights are positive");
                }
            }
            ContactProblem::Signorini(p) => {
                for (j, &d) in p.dofs().iter().enumerate() {
                    x[d] = match p.tags()[j] {
                        RegionTag::Neumann => x[d],
                        RegionTag::Dirichlet => 0.0,
                        RegionTag::Minus => x[d].min(0.0),
                        RegionTag::Plus => x[d].max(0.0),
                    };
                }
            }
        }
    }
}

/// Residuals of the contact law for `u`, whatever produced it.
pub fn complementarity_residuals(report: &SolveReport, problem: ContactProblem<'_>) -> ComplementarityResiduals {
    match problem {
        ContactProblem::Tresca(p) => tresca_residuals(p, report.values()),
        ContactProblem::Signorini(p) => signorini_residuals(p, report.values()),
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleOptions {
    /// gradient step; None picks `1 / lambda_max(K)`
    pub step: Option<f64>,
    pub max_iters: usize,
    /// stop once `|x_{k+1} - x_k| <= tol * |x_k|`
    pub tol: f64,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions {
            step: None,
            max_iters: 2_000_000,
            tol: 1e-13,
        }
    }
}

#[derive(Clone, Debug)]
pub struct OracleResult {
    pub field: DiscreteField,
    pub iterations: usize,
    pub energy: f64,
    pub step: f64,
    pub converged: bool,
}

/// Proximal gradient iteration `x <- prox(x - step (K x - L))` on the
/// discrete energy, with Dirichlet dofs held at zero.
///
/// Errors when the step is not below `2 / lambda_max(K)` or when the energy
/// ever increases.
pub fn projected_gradient_oracle(problem: ContactProblem<'_>, opts: &OracleOptions) -> Result<OracleResult> {
    let space = problem.space();
    let k = space.stiffness();
    let lambda_max = k.max_eigenvalue(500);
    let step = opts.step.unwrap_or(1.0 / lambda_max);
    if !(step > 0.0 && step < 2.0 / lambda_max) {
        return Err(Error::Step(format!(
            "step {step:e} outside (0, 2 / lambda_max) = (0, {:e})",
            2.0 / lambda_max
        )));
    }
    let load = problem.linear_load();
    let dirichlet = space.dirichlet_dofs();
    let n = space.n_dofs();
    let mut x = vec![0.0; n];
    let mut grad = vec![0.0; n];
    let mut energy = problem.energy(&x);
    let mut converged = false;
    let mut iterations = 0;
    while iterations < opts.max_iters {
        iterations += 1;
        k.mul_vec_into(&x, &mut grad);
        let mut next: Vec<f64> = (0..n).map(|i| x[i] - step * (grad[i] - load[i])).collect();
        problem.prox(step, &mut next);
        for &d in &dirichlet {
            next[d] = 0.0;
        }
        let e = problem.energy(&next);
        if e > energy + 1e-13 * energy.abs().max(1e-300) {
            return Err(Error::Step(format!(
                "energy increased at iteration {iterations}: {energy:.15e} -> {e:.15e}"
            )));
        }
        let dx: Vec<f64> = next.iter().zip(&x).map(|(a, b)| a - b).collect();
        let change = norm2(&dx);
        x = next;
        energy = e;
        if change <= opts.tol * norm2(&x).max(f64::MIN_POSITIVE) {
            converged = true;
            break;
        }
    }
    Ok(OracleResult {
        field: DiscreteField::new(space.mesh().clone(), x)?,
        iterations,
        energy,
        step,
        converged,
    })
}
