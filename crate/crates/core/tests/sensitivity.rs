use std::sync::Arc;

use tresca_core::sensitivity::*;
use tresca_core::solvers::*;
use tresca_core::*;

fn space(n: usize) -> Arc<FeSpace> {
    Arc::new(FeSpace::new(reference_mesh(n).unwrap()).unwrap())
}

fn synthetic_flux(space: &FeSpace, lambda: f64) -> BoundaryFlux {
    let (dofs, weights) = space.label_dofs_with_weights(BoundaryLabel::Tresca).unwrap();
    let values = vec![lambda; dofs.len()];
    BoundaryFlux { dofs, weights, values }
}

#[test]
fn nonzero_trace_is_all_neumann() {
    let s = space(24);
    let u0 = DiscreteField::interpolate(s.mesh().clone(), |_, _| 1.0);
    let flux = synthetic_flux(&s, 0.0);
    let g = vec![1.0; flux.dofs.len()];
    let p = classify_partition(&u0, &flux, &g, &PartitionTolerances::default()).unwrap();
    assert_eq!(p.count(RegionTag::Neumann), flux.dofs.len());
}

#[test]
fn interior_flux_is_all_dirichlet() {
    let s = space(24);
    let u0 = DiscreteField::zeros(s.mesh().clone());
    let flux = synthetic_flux(&s, 0.0);
    let g = vec![1.0; flux.dofs.len()];
    let p = classify_partition(&u0, &flux, &g, &PartitionTolerances::default()).unwrap();
    assert_eq!(p.count(RegionTag::Dirichlet), flux.dofs.len());
}

#[test]
fn saturated_flux_gives_the_matching_sign() {
    let s = space(24);
    let u0 = DiscreteField::zeros(s.mesh().clone());
    let g = vec![2.0; synthetic_flux(&s, 0.0).dofs.len()];
    let plus = classify_partition(&u0, &synthetic_flux(&s, -2.0), &g, &PartitionTolerances::default()).unwrap();
    assert_eq!(plus.count(RegionTag::Plus), g.len());
    let minus = classify_partition(&u0, &synthetic_flux(&s, 2.0), &g, &PartitionTolerances::default()).unwrap();
    assert_eq!(minus.count(RegionTag::Minus), g.len());
}

#[test]
fn flux_far_beyond_the_threshold_is_rejected() {
    let s = space(24);
    let u0 = DiscreteField::zeros(s.mesh().clone());
    let flux = synthetic_flux(&s, 1.5);
    let g = vec![1.0; flux.dofs.len()];
    let tol = PartitionTolerances {
        eps_u: None,
        eps_g: Some(1e-3),
    };
    assert!(matches!(classify_partition(&u0, &flux, &g, &tol), Err(Error::Input(_))));
    let nonpositive = PartitionTolerances {
        eps_u: Some(0.0),
        eps_g: None,
    };
    assert!(classify_partition(&u0, &synthetic_flux(&s, 0.0), &g, &nonpositive).is_err());
}

#[test]
fn partition_is_invariant_under_joint_scaling() {
    let s = space(95);
    let fam = reference_family();
    let p = family_problem(&fam, 0.0, &s).unwrap();
    let r = solve_tresca_switching(&p, &SwitchingOptions::default()).unwrap();
    let flux = r.flux.as_ref().unwrap();
    let base = classify_partition(&r.solution, flux, p.thresholds(), &PartitionTolerances::default()).unwrap();
    for alpha in [0.5, 2.0, 10.0] {
        let scaled = BoundaryFlux {
            values: flux.values.iter().map(|v| alpha * v).collect(),
            ..flux.clone()
        };
        let g: Vec<f64> = p.thresholds().iter().map(|v| alpha * v).collect();
        let q = classify_partition(&r.solution, &scaled, &g, &PartitionTolerances::default()).unwrap();
        assert_eq!(q.tags, base.tags, "alpha {alpha}");
    }
}

#[test]
fn flux_datum_examples() {
    let s = space(95);
    let fam = reference_family();
    let lin = linearize(&fam, &s, &SwitchingOptions::default(), &PartitionTolerances::default()).unwrap();
    let part = &lin.partition;
    let n = part.dofs.len();

    let h0 = derivative_flux_datum(part, &vec![0.0; n]).unwrap();
    assert!(h0.iter().all(|&v| v == 0.0));

    // g0' = 1 and g0 = 1: h is the flux itself, +-1 on the slipping regions
    let h = derivative_flux_datum(part, &vec![1.0; n]).unwrap();
    for (j, tag) in part.tags.iter().enumerate() {
        assert!(h[j].abs() <= 1.0);
        match tag {
            RegionTag::Minus => assert!((h[j] - 1.0).abs() <= part.eps_g),
            RegionTag::Plus => assert!((h[j] + 1.0).abs() <= part.eps_g),
            _ => {}
        }
    }

    let doubled = BoundaryPartition {
        g0: part.g0.iter().map(|g| 2.0 * g).collect(),
        ..part.clone()
    };
    let h2 = derivative_flux_datum(&doubled, &vec![2.0; n]).unwrap();
    for (j, (a, b)) in h.iter().zip(&h2).enumerate() {
        // the clip at |lambda| = g0 is the only place the ratio can move
        let slack = if part.flux0[j].abs() <= part.g0[j] {
            1e-15
        } else {
            part.eps_g
        };
        assert!((a - b).abs() <= slack);
    }

    let broken = BoundaryPartition {
        g0: vec![0.0; n],
        ..part.clone()
    };
    assert!(derivative_flux_datum(&broken, &vec![1.0; n]).is_err());
}

#[test]
fn derivative_respects_the_cone_exactly() {
    let s = space(95);
    let fam = reference_family();
    let lin = linearize(&fam, &s, &SwitchingOptions::default(), &PartitionTolerances::default()).unwrap();
    let du = lin.derivative.values();
    for (j, &d) in lin.partition.dofs.iter().enumerate() {
        match lin.partition.tags[j] {
            RegionTag::Dirichlet => assert_eq!(du[d], 0.0),
            RegionTag::Minus => assert!(du[d] <= 0.0),
            RegionTag::Plus => assert!(du[d] >= 0.0),
            RegionTag::Neumann => {}
        }
    }
    assert!(lin.derivative.residuals.as_ref().unwrap().max() <= 1e-8);
}

#[test]
fn huge_threshold_keeps_the_friction_arc_fixed() {
    let s = space(48);
    let fam = reference_family();
    let stuck = PerturbationFamily::new(
        move |t| fam.f(t),
        |_| FieldFn::zero(),
        |_| FieldFn::constant(1e6),
        FieldFn::zero(),
        FieldFn::zero(),
        FieldFn::zero(),
    );
    for t in [0.0, 0.1, 0.5] {
        let r = solve_family_member(&stuck, t, &s, &SwitchingOptions::default()).unwrap();
        let p = family_problem(&stuck, t, &s).unwrap();
        assert!(p.dofs().iter().all(|&d| r.values()[d] == 0.0), "t = {t}");
    }
}

#[test]
fn linear_sensitivity_decays_linearly() {
    let s = space(48);
    let fam = reference_family();
    let r2 = linear_sensitivity_ratio(&fam, &s, 1e-2, CgOptions::default()).unwrap();
    let r3 = linear_sensitivity_ratio(&fam, &s, 1e-3, CgOptions::default()).unwrap();
    assert!(r2 <= 1e-2, "{r2}");
    assert!(r3 <= 10.0 * r2);
    // analytic family: the first-order Taylor residual is O(t)
    assert!((r3 / r2 - 0.1).abs() < 0.02, "{}", r3 / r2);
}

#[test]
fn study_rejects_bad_t_lists() {
    let s = space(24);
    let fam = reference_family();
    let opts = StudyOptions::default();
    assert!(convergence_study(&fam, &[], &s, &opts).is_err());
    assert!(convergence_study(&fam, &[0.1, 0.2], &s, &opts).is_err());
    assert!(convergence_study(&fam, &[0.1, -0.1], &s, &opts).is_err());
}

#[test]
fn error_over_t_halves_with_t() {
    let s = space(190);
    let fam = reference_family();
    let ts = [0.4, 0.2, 0.1, 0.05];
    let st = convergence_study(&fam, &ts, &s, &StudyOptions::default()).unwrap();
    assert!(st.all_converged());
    for w in st.rows.windows(2) {
        let (a, b) = (w[0].err_h1 / w[0].t, w[1].err_h1 / w[1].t);
        assert!(b <= 0.5 * 1.25 * a, "t {} -> {}: {a} -> {b}", w[0].t, w[1].t);
    }
    let csv = st.to_csv();
    assert!(csv.starts_with("t,err_h1,err_h1_semi,converged\n"));
    assert_eq!(csv.lines().count(), ts.len() + 1);
    assert!(st.rows.iter().all(|r| r.err_h1_semi <= r.err_h1));
}
