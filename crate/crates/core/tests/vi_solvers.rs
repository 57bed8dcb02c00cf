use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tresca_core::epi::subdiff_abs;
use tresca_core::sensitivity::{reference_family, reference_mesh};
use tresca_core::solvers::*;
use tresca_core::*;

fn space(n: usize) -> Arc<FeSpace> {
    Arc::new(FeSpace::new(reference_mesh(n).unwrap()).unwrap())
}

fn problem_with_g(space: &Arc<FeSpace>, g: f64) -> TrescaProblem {
    let fam = reference_family();
    TrescaProblem::new(space.clone(), &fam.f(0.0), &fam.k(0.0), |_, _| g).unwrap()
}

fn rel_h1(space: &FeSpace, a: &[f64], b: &[f64]) -> f64 {
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    space.h1_norm(&d) / space.h1_norm(b).max(1e-300)
}

fn abs_h1(space: &FeSpace, a: &[f64], b: &[f64]) -> f64 {
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    space.h1_norm(&d)
}

#[test]
fn zero_data_gives_zero_solution() {
    let s = space(24);
    let z = FieldFn::zero();
    let dn = solve_dirichlet_neumann(&s, &z, &z, &z, CgOptions::default()).unwrap();
    assert!(dn.values().iter().all(|&v| v == 0.0));
    let p = TrescaProblem::new(s.clone(), &z, &z, |_, _| 1.0).unwrap();
    let r = solve_tresca_switching(&p, &SwitchingOptions::default()).unwrap();
    assert!(r.converged);
    assert!(r.values().iter().all(|&v| v == 0.0));
    assert_eq!(r.state.as_ref().unwrap().count(Mode::Stick), p.dofs().len());
}

#[test]
fn huge_threshold_sticks_everywhere() {
    let s = space(48);
    let p = problem_with_g(&s, 1e6);
    let r = solve_tresca_switching(&p, &SwitchingOptions::default()).unwrap();
    let mut fixed = s.dirichlet_dofs();
    fixed.extend_from_slice(p.dofs());
    let (clamped, _) = s
        .solve_with_dirichlet(p.load(), &fixed, &vec![0.0; fixed.len()], CgOptions::default(), None)
        .unwrap();
    assert!(abs_h1(&s, r.values(), &clamped) < 1e-6);
    let flux = r.flux.as_ref().unwrap();
    assert!(flux.values.iter().all(|l| l.abs() <= 1e6));
}

#[test]
fn vanishing_threshold_matches_free_boundary() {
    let s = space(48);
    let p = problem_with_g(&s, 1e-12);
    let r = solve_tresca_switching(&p, &SwitchingOptions::default()).unwrap();
    let fam = reference_family();
    let dn = solve_dirichlet_neumann(&s, &fam.f(0.0), &fam.k(0.0), &FieldFn::zero(), CgOptions::default()).unwrap();
    assert!(abs_h1(&s, r.values(), dn.values()) < 1e-6);
}

#[test]
fn converged_solve_satisfies_the_friction_law() {
    let s = space(48);
    let p = problem_with_g(&s, 1.0);
    let r = solve_tresca_switching(&p, &SwitchingOptions::default()).unwrap();
    assert!(r.converged);
    let res = r.residuals.as_ref().unwrap();
    assert!(res.max() <= 1e-9, "{}", res.max());
    let again = complementarity_residuals(&r, ContactProblem::Tresca(&p));
    assert!(again.max() <= 1e-9);
}

#[test]
fn released_start_reaches_the_same_solution() {
    let s = space(48);
    let p = problem_with_g(&s, 1.0);
    let a = solve_tresca_switching(&p, &SwitchingOptions::default()).unwrap();
    let opts = SwitchingOptions {
        initial: InitialState::Released,
        ..Default::default()
    };
    let b = solve_tresca_switching(&p, &opts).unwrap();
    assert!(a.converged && b.converged);
    assert!(abs_h1(&s, a.values(), b.values()) <= 1e-10);
}

#[test]
fn tresca_solution_minimizes_the_energy() {
    let s = space(48);
    let p = problem_with_g(&s, 1.0);
    let r = solve_tresca_switching(&p, &SwitchingOptions::default()).unwrap();
    let u = r.values();
    let ju = p.energy(u);
    let dirichlet = s.dirichlet_dofs();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for k in 0..100 {
        let scale = 10f64.powi(-(k % 6));
        let mut v: Vec<f64> = u.iter().map(|&x| x + scale * rng.gen_range(-1.0..1.0)).collect();
        for &d in &dirichlet {
            v[d] = 0.0;
        }
        assert!(ju <= p.energy(&v) + 1e-9, "perturbation {k}");
    }
}

#[test]
fn optimality_holds_dof_by_dof() {
    let s = space(48);
    let p = problem_with_g(&s, 1.0);
    let r = solve_tresca_switching(&p, &SwitchingOptions::default()).unwrap();
    let flux = r.flux.as_ref().unwrap();
    for (j, &d) in flux.dofs.iter().enumerate() {
        let g = p.thresholds()[j];
        let u = r.values()[d];
        // snap values at solver precision onto the kink
        let x = if u.abs() < 1e-12 { 0.0 } else { u };
        let sd = subdiff_abs(x).scaled(g);
        let lam = -flux.values[j];
        assert!(
            sd.lo - 1e-9 <= lam && lam <= sd.hi + 1e-9,
            "dof {d}: -lambda = {lam} outside [{}, {}]",
            sd.lo,
            sd.hi
        );
    }
}

#[test]
fn solution_is_homogeneous_in_the_data() {
    let s = space(48);
    let p = problem_with_g(&s, 1.0);
    let base = solve_tresca_switching(&p, &SwitchingOptions::default()).unwrap();
    for alpha in [0.5, 2.0, 10.0] {
        let r = solve_tresca_switching(&p.scaled(alpha).unwrap(), &SwitchingOptions::default()).unwrap();
        let expect: Vec<f64> = base.values().iter().map(|v| alpha * v).collect();
        assert!(rel_h1(&s, r.values(), &expect) <= 1e-10, "alpha {alpha}");
    }
}

#[test]
fn perturbing_one_dof_shows_in_the_residual() {
    let s = space(48);
    let p = problem_with_g(&s, 1.0);
    let mut r = solve_tresca_switching(&p, &SwitchingOptions::default()).unwrap();
    let d = p.dofs()[p.dofs().len() / 2];
    r.solution.values_mut()[d] += 0.1;
    let res = complementarity_residuals(&r, ContactProblem::Tresca(&p));
    let j = res.dofs.iter().position(|&x| x == d).unwrap();
    assert!(res.feasibility[j] + res.complementarity[j] > 1e-3);
}

#[test]
fn small_loads_keep_every_dof_stuck() {
    let s = space(48);
    let fam = reference_family();
    let p = TrescaProblem::new(s.clone(), &fam.f(0.0).scaled(1e-3), &fam.k(0.0).scaled(1e-3), |_, _| {
        1.0
    })
    .unwrap();
    let r = solve_tresca_switching(&p, &SwitchingOptions::default()).unwrap();
    assert_eq!(r.state.as_ref().unwrap().count(Mode::Stick), p.dofs().len());
    let flux = r.flux.as_ref().unwrap();
    assert!(flux.values.iter().zip(p.thresholds()).all(|(l, g)| l.abs() <= *g));
}

// Unit square split along a diagonal, Dirichlet on the top edge only, so the
// two bottom vertices are the free Tresca dofs.
fn square_space() -> Arc<FeSpace> {
    let v = vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
    let t = vec![[0, 1, 2], [0, 2, 3]];
    let e = |a, b, label| BoundaryEdge {
        vertices: [a, b],
        label,
    };
    let b = vec![
        e(0, 1, BoundaryLabel::Tresca),
        e(1, 2, BoundaryLabel::Tresca),
        e(2, 3, BoundaryLabel::Dirichlet),
        e(3, 0, BoundaryLabel::Tresca),
    ];
    Arc::new(FeSpace::new(Arc::new(Mesh2D::new(v, t, b).unwrap())).unwrap())
}

// min 1/2 x'Ax - b'x + sum c_i |x_i| by checking all nine sign patterns.
fn two_dof_minimizer(a: [[f64; 2]; 2], b: [f64; 2], c: [f64; 2]) -> [f64; 2] {
    let energy = |x: [f64; 2]| {
        0.5 * (a[0][0] * x[0] * x[0] + 2.0 * a[0][1] * x[0] * x[1] + a[1][1] * x[1] * x[1]) - b[0] * x[0] - b[1] * x[1]
            + c[0] * x[0].abs()
            + c[1] * x[1].abs()
    };
    let mut best = ([0.0, 0.0], energy([0.0, 0.0]));
    for s0 in [-1.0, 0.0, 1.0] {
        for s1 in [-1.0, 0.0, 1.0] {
            let r = [b[0] - c[0] * s0, b[1] - c[1] * s1];
            let x = match (s0 != 0.0, s1 != 0.0) {
                (true, true) => {
                    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
                    [
                        (r[0] * a[1][1] - a[0][1] * r[1]) / det,
                        (a[0][0] * r[1] - a[1][0] * r[0]) / det,
                    ]
                }
                (true, false) => [r[0] / a[0][0], 0.0],
                (false, true) => [0.0, r[1] / a[1][1]],
                (false, false) => continue,
            };
            let signs_ok = (s0 == 0.0 || x[0] * s0 > 0.0) && (s1 == 0.0 || x[1] * s1 > 0.0);
            if signs_ok && energy(x) < best.1 {
                best = (x, energy(x));
            }
        }
    }
    best.0
}

#[test]
fn two_dof_toy_matches_closed_form() {
    let s = square_space();
    for (fval, g) in [(10.0, 1.0), (3.0, 0.8), (-6.0, 0.5), (1.0, 5.0)] {
        let p = TrescaProblem::new(s.clone(), &FieldFn::constant(fval), &FieldFn::zero(), |_, _| g).unwrap();
        assert_eq!(p.dofs(), &[0, 1]);
        let k = s.stiffness();
        let a = [[k.get(0, 0), k.get(0, 1)], [k.get(1, 0), k.get(1, 1)]];
        let l = p.load();
        let w = p.weights();
        let exact = two_dof_minimizer(a, [l[0], l[1]], [w[0] * g, w[1] * g]);
        let o = projected_gradient_oracle(ContactProblem::Tresca(&p), &OracleOptions::default()).unwrap();
        let sw = solve_tresca_switching(&p, &SwitchingOptions::default()).unwrap();
        for (i, e) in exact.iter().enumerate() {
            assert!((o.field.values()[i] - e).abs() <= 1e-10, "f={fval} g={g}");
            assert!((sw.values()[i] - e).abs() <= 1e-10, "f={fval} g={g}");
        }
    }
}

#[test]
fn oracle_rejects_a_step_that_is_too_long() {
    let s = square_space();
    let p = TrescaProblem::new(s.clone(), &FieldFn::constant(1.0), &FieldFn::zero(), |_, _| 1.0).unwrap();
    let lmax = s.stiffness().max_eigenvalue(500);
    let opts = OracleOptions {
        step: Some(2.5 / lmax),
        ..Default::default()
    };
    assert!(matches!(
        projected_gradient_oracle(ContactProblem::Tresca(&p), &opts),
        Err(Error::Step(_))
    ));
}

fn signorini_with(space: &Arc<FeSpace>, tag: RegionTag) -> SignoriniProblem {
    let fam = reference_family();
    let n = space.label_dofs_with_weights(BoundaryLabel::Tresca).unwrap().0.len();
    SignoriniProblem::new(space.clone(), &fam.f(0.0), &fam.k(0.0), vec![tag; n], vec![0.0; n]).unwrap()
}

#[test]
fn signorini_without_constraints_is_the_linear_problem() {
    let s = space(48);
    let p = signorini_with(&s, RegionTag::Neumann);
    let r = solve_signorini_switching(&p, &SwitchingOptions::default()).unwrap();
    let fam = reference_family();
    let dn = solve_dirichlet_neumann(&s, &fam.f(0.0), &fam.k(0.0), &FieldFn::zero(), CgOptions::default()).unwrap();
    assert!(rel_h1(&s, r.values(), dn.values()) <= 1e-10);
    let o = projected_gradient_oracle(ContactProblem::Signorini(&p), &OracleOptions::default()).unwrap();
    assert!(rel_h1(&s, o.field.values(), dn.values()) <= 1e-6);
}

#[test]
fn signorini_all_fixed_is_the_clamped_problem() {
    let s = space(48);
    let p = signorini_with(&s, RegionTag::Dirichlet);
    let r = solve_signorini_switching(&p, &SwitchingOptions::default()).unwrap();
    let mut fixed = s.dirichlet_dofs();
    fixed.extend_from_slice(p.dofs());
    let (clamped, _) = s
        .solve_with_dirichlet(p.load(), &fixed, &vec![0.0; fixed.len()], CgOptions::default(), None)
        .unwrap();
    assert!(rel_h1(&s, r.values(), &clamped) <= 1e-10);
}

#[test]
fn signorini_solution_minimizes_over_the_cone() {
    let s = space(48);
    let fam = reference_family();
    let (dofs, _) = s.label_dofs_with_weights(BoundaryLabel::Tresca).unwrap();
    let tags: Vec<RegionTag> = (0..dofs.len())
        .map(|j| {
            [
                RegionTag::Minus,
                RegionTag::Plus,
                RegionTag::Neumann,
                RegionTag::Dirichlet,
            ][(j / 7) % 4]
        })
        .collect();
    let h: Vec<f64> = (0..dofs.len()).map(|j| 0.3 * ((j as f64) * 0.1).sin()).collect();
    let p = SignoriniProblem::new(s.clone(), &fam.f(0.0), &fam.k(0.0), tags.clone(), h).unwrap();
    let r = solve_signorini_switching(&p, &SwitchingOptions::default()).unwrap();
    assert!(r.converged);
    assert!(r.residuals.as_ref().unwrap().max() <= 1e-8);
    assert!(p.is_feasible(r.values()));
    let ju = p.energy(r.values());
    let dirichlet = s.dirichlet_dofs();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for k in 0..100 {
        let scale = 10f64.powi(-(k % 5));
        let mut v: Vec<f64> = r
            .values()
            .iter()
            .map(|&x| x + scale * rng.gen_range(-1.0..1.0))
            .collect();
        for &d in &dirichlet {
            v[d] = 0.0;
        }
        for (j, &d) in dofs.iter().enumerate() {
            v[d] = match tags[j] {
                RegionTag::Neumann => v[d],
                RegionTag::Dirichlet => 0.0,
                RegionTag::Minus => v[d].min(0.0),
                RegionTag::Plus => v[d].max(0.0),
            };
        }
        assert!(ju <= p.energy(&v) + 1e-9, "perturbation {k}");
    }
    let o = projected_gradient_oracle(ContactProblem::Signorini(&p), &OracleOptions::default()).unwrap();
    assert!(rel_h1(&s, o.field.values(), r.values()) <= 1e-4);
}

#[test]
fn report_text_lists_every_contact_dof() {
    let s = space(24);
    let p = problem_with_g(&s, 1.0);
    let r = solve_tresca_switching(&p, &SwitchingOptions::default()).unwrap();
    let text = r.to_text();
    assert!(text.contains("problem = tresca"));
    assert!(text.contains("[history]"));
    let dofs_section = text.split("[dofs]").nth(1).unwrap();
    assert_eq!(
        dofs_section.lines().filter(|l| !l.trim().is_empty()).count(),
        p.dofs().len() + 1
    );
}

#[test]
fn exhausted_iterations_are_reported_not_hidden() {
    let s = space(48);
    let p = problem_with_g(&s, 1.0);
    let opts = SwitchingOptions {
        max_iters: 1,
        ..Default::default()
    };
    let r = solve_tresca_switching(&p, &opts).unwrap();
    assert!(!r.converged);
}
