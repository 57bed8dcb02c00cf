use std::f64::consts::PI;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tresca_core::fem::{assemble_boundary_load, assemble_boundary_mass_lumped, assemble_load};
use tresca_core::{
    generate_unit_disk, AngleRange, BoundaryLabel, Breakline, CgOptions, Error, FeSpace, FieldFn, Mesh2D,
};

fn labeled_disk(n: usize) -> Mesh2D {
    let ranges = [
        (AngleRange::new(PI / 4.0, PI / 2.0).unwrap(), BoundaryLabel::Dirichlet),
        (
            AngleRange::new(PI / 2.0, 3.0 * PI / 4.0).unwrap(),
            BoundaryLabel::Neumann,
        ),
        (
            AngleRange::new(-5.0 * PI / 4.0, PI / 4.0).unwrap(),
            BoundaryLabel::Tresca,
        ),
    ];
    generate_unit_disk(n, &ranges).unwrap()
}

fn labeled_disk_p2(n: usize) -> Arc<Mesh2D> {
    Arc::new(labeled_disk(n).p2_enrich().unwrap())
}

// Independent copies of the reference profile and its derivatives.
fn xi(x: f64) -> f64 {
    if x <= -0.5 {
        -1.0
    } else if x >= 0.5 {
        1.0
    } else {
        (PI * x).sin()
    }
}

fn dxi(x: f64) -> f64 {
    if x.abs() >= 0.5 {
        0.0
    } else {
        PI * (PI * x).cos()
    }
}

fn ddxi(x: f64) -> f64 {
    if x.abs() >= 0.5 {
        0.0
    } else {
        -PI * PI * (PI * x).sin()
    }
}

fn rhs(x: f64, y: f64) -> f64 {
    -2.0 * xi(x) - 2.0 * x * dxi(x) - 0.5 * (x * x + y * y - 1.0) * ddxi(x)
}

fn grad_u0(x: f64, y: f64) -> [f64; 2] {
    let s = 0.5 * (x * x + y * y - 1.0);
    [x * xi(x) + s * dxi(x), y * xi(x)]
}

fn rhs_field() -> FieldFn {
    FieldFn::new(rhs).with_breaklines([Breakline::vertical(-0.5), Breakline::vertical(0.5)])
}

fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
            return left + right + (left + right - whole) / 15.0;
        }
        rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, tol, 40)
}

#[test]
fn load_sum_matches_boundary_flux_oracle() {
    // f = -lap u0 with u0 in C^1, so int_P f = -sum over polygon edges of
    // int grad u0 . n ds, integrated adaptively edge by edge.
    let mesh = labeled_disk_p2(95);
    let load = assemble_load(&mesh, &rhs_field()).unwrap();
    let total: f64 = load.iter().sum();

    let mut oracle = 0.0;
    for e in mesh.boundary_edges() {
        let [a, b] = e.vertices.map(|v| mesh.vertices()[v]);
        let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
        // counter-clockwise loop: outward normal is (dy, -dx) / len, ds = len dt
        let flux = |s: f64| {
            let g = grad_u0(a[0] + s * dx, a[1] + s * dy);
            g[0] * dy - g[1] * dx
        };
        let mut cuts = vec![0.0, 1.0];
        for c in [-0.5, 0.5] {
            let s = (c - a[0]) / dx;
            if dx != 0.0 && s > 0.0 && s < 1.0 {
                cuts.push(s);
            }
        }
        cuts.sort_by(f64::total_cmp);
        for w in cuts.windows(2) {
            oracle -= adaptive_simpson(&flux, w[0], w[1], 1e-15);
        }
    }
    assert!((total - oracle).abs() <= 1e-8, "sum L = {total}, oracle = {oracle}");
}

#[test]
fn unit_neumann_load_sums_to_arc_length() {
    for n in [95, 190] {
        let mesh = labeled_disk_p2(n);
        let l = assemble_boundary_load(&mesh, BoundaryLabel::Neumann, &FieldFn::constant(1.0)).unwrap();
        let total: f64 = l.iter().sum();
        assert!((total - mesh.label_length(BoundaryLabel::Neumann)).abs() < 1e-13);
        let h = 2.0 * PI / n as f64;
        assert!((total - PI / 4.0).abs() < h * h, "n = {n}: {total}");
    }
}

#[test]
fn tresca_weights_sum_to_arc_and_halve_under_refinement() {
    let mut max_w = Vec::new();
    for n in [95, 190] {
        let mesh = labeled_disk(n);
        let w = assemble_boundary_mass_lumped(&mesh, BoundaryLabel::Tresca).unwrap();
        let total: f64 = w.iter().sum();
        assert!((total - mesh.label_length(BoundaryLabel::Tresca)).abs() < 1e-13);
        assert!((total - 1.5 * PI).abs() < 1e-3, "n = {n}: {total}");
        for d in mesh.label_dofs(BoundaryLabel::Tresca) {
            assert!(w[d] > 0.0);
        }
        max_w.push(w.iter().cloned().fold(0.0, f64::max));
    }
    let ratio = max_w[1] / max_w[0];
    assert!((ratio - 0.5).abs() < 0.05, "ratio {ratio}");
}

#[test]
fn stiffness_kernel_symmetry_and_semidefiniteness() {
    let mesh = labeled_disk_p2(190);
    let space = FeSpace::new(mesh.clone()).unwrap();
    let k = space.stiffness();
    assert_eq!(k.max_asymmetry(), 0.0);
    let ones = vec![1.0; k.dim()];
    let k1 = k.mul_vec(&ones);
    assert!(k1.iter().all(|v| v.abs() < 1e-11));
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let v: Vec<f64> = (0..k.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        assert!(k.bilinear(&v, &v) >= 0.0);
    }
}

#[test]
fn norms_of_simple_fields() {
    let mesh = labeled_disk_p2(95);
    let space = FeSpace::new(mesh.clone()).unwrap();
    let area: f64 = (0..mesh.n_triangles()).map(|t| mesh.triangle_area(t)).sum();
    let c = 2.5;
    let constant = vec![c; mesh.n_dofs()];
    assert!((space.l2_norm(&constant) - c * area.sqrt()).abs() < 1e-12);
    assert!((space.l2_norm(&constant) - c * PI.sqrt()).abs() < 1e-2);

    let x: Vec<f64> = (0..mesh.n_dofs()).map(|d| mesh.dof_coords(d)[0]).collect();
    let semi = space.h1_seminorm(&x);
    assert!((semi * semi - area).abs() < 1e-11);
    let (h, l, s) = (space.h1_norm(&x), space.l2_norm(&x), semi);
    assert!((h * h - l * l - s * s).abs() < 1e-12);
}

#[test]
fn harmonic_flux_converges_to_normal_component() {
    // u = x prescribed on the whole circle; the flux on the Tresca arc must
    // approach the outward normal component n_x.
    let mut errs = Vec::new();
    for n in [48, 95, 190] {
        let ranges = [
            (
                AngleRange::new(PI / 4.0, 3.0 * PI / 4.0).unwrap(),
                BoundaryLabel::Dirichlet,
            ),
            (
                AngleRange::new(-5.0 * PI / 4.0, PI / 4.0).unwrap(),
                BoundaryLabel::Tresca,
            ),
        ];
        let mesh = Arc::new(generate_unit_disk(n, &ranges).unwrap().p2_enrich().unwrap());
        let space = FeSpace::new(mesh.clone()).unwrap();
        let fixed = mesh.boundary_dofs();
        let values: Vec<f64> = fixed.iter().map(|&d| mesh.dof_coords(d)[0]).collect();
        let load = vec![0.0; mesh.n_dofs()];
        let (u, _) = space
            .solve_with_dirichlet(&load, &fixed, &values, CgOptions::default(), None)
            .unwrap();
        let flux = space.flux_recovery(&load, &u, BoundaryLabel::Tresca, 1e-9).unwrap();
        let mut err: f64 = 0.0;
        for (&d, &lam) in flux.dofs.iter().zip(&flux.values) {
            // skip the arc's end dofs, which touch the prescribed region
            let [x, y] = mesh.dof_coords(d);
            let theta = y.atan2(x);
            let near_end = (theta - PI / 4.0).abs() < 1e-9 || (theta - 3.0 * PI / 4.0).abs() < 1e-9;
            if !near_end {
                err = err.max((lam - x / (x * x + y * y).sqrt()).abs());
            }
        }
        errs.push(err);
    }
    assert!(errs[2] < errs[0], "{errs:?}");
    assert!(errs[2] < 1e-2, "{errs:?}");
}

#[test]
fn flux_of_zero_is_zero_and_consistent() {
    let mesh = labeled_disk_p2(48);
    let space = FeSpace::new(mesh.clone()).unwrap();
    let zero = vec![0.0; mesh.n_dofs()];
    let flux = space.flux_recovery(&zero, &zero, BoundaryLabel::Tresca, 1e-12).unwrap();
    assert!(flux.values.iter().all(|&v| v == 0.0));

    // discrete divergence theorem: sum w lambda = sum of the residual on the arc
    let load = space.load(&rhs_field()).unwrap();
    let fixed = mesh.label_dofs(BoundaryLabel::Dirichlet);
    let mut all_fixed = fixed.clone();
    all_fixed.extend(mesh.label_dofs(BoundaryLabel::Tresca));
    all_fixed.sort_unstable();
    all_fixed.dedup();
    let values = vec![0.0; all_fixed.len()];
    let (u, _) = space
        .solve_with_dirichlet(&load, &all_fixed, &values, CgOptions::default(), None)
        .unwrap();
    let flux = space.flux_recovery(&load, &u, BoundaryLabel::Tresca, 1e-9).unwrap();
    let ku = space.stiffness().mul_vec(&u);
    let direct: f64 = flux.dofs.iter().map(|&d| ku[d] - load[d]).sum();
    let weighted: f64 = flux.weights.iter().zip(&flux.values).map(|(w, l)| w * l).sum();
    assert!((direct - weighted).abs() < 1e-13);
}

#[test]
fn flux_recovery_refuses_unsolved_fields() {
    let mesh = labeled_disk_p2(48);
    let space = FeSpace::new(mesh.clone()).unwrap();
    let load = space.load(&FieldFn::constant(1.0)).unwrap();
    let zero = vec![0.0; mesh.n_dofs()];
    assert!(matches!(
        space.flux_recovery(&load, &zero, BoundaryLabel::Tresca, 1e-8),
        Err(Error::FluxResidual { .. })
    ));
}

#[test]
fn dn_solution_is_cauchy_under_refinement() {
    // f from the reference family, k = xi on N, h = 0 on T, u = 0 on D.
    let mut energies = Vec::new();
    for n in [48, 95, 190] {
        let mesh = labeled_disk_p2(n);
        let space = FeSpace::new(mesh.clone()).unwrap();
        let mut load = space.load(&rhs_field()).unwrap();
        let kl = space
            .boundary_load(
                BoundaryLabel::Neumann,
                &FieldFn::new(|x, _| xi(x)).with_breaklines([Breakline::vertical(-0.5)]),
            )
            .unwrap();
        load.iter_mut().zip(&kl).for_each(|(a, b)| *a += b);
        let fixed = mesh.label_dofs(BoundaryLabel::Dirichlet);
        let values = vec![0.0; fixed.len()];
        let (u, out) = space
            .solve_with_dirichlet(&load, &fixed, &values, CgOptions::default(), None)
            .unwrap();
        assert!(out.relative_residual <= 1e-12);
        assert!(fixed.iter().all(|&d| u[d] == 0.0));
        // Galerkin orthogonality on free dofs
        let r: Vec<f64> = space
            .stiffness()
            .mul_vec(&u)
            .iter()
            .zip(&load)
            .map(|(a, b)| a - b)
            .collect();
        let lnorm = load.iter().map(|v| v * v).sum::<f64>().sqrt();
        let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
        for _ in 0..10 {
            let v: Vec<f64> = (0..u.len())
                .map(|i| {
                    if fixed.binary_search(&i).is_ok() {
                        0.0
                    } else {
                        rng.gen_range(-1.0..1.0)
                    }
                })
                .collect();
            let vr: f64 = v.iter().zip(&r).map(|(a, b)| a * b).sum();
            let vn = v.iter().map(|a| a * a).sum::<f64>().sqrt();
            assert!(vr.abs() <= 1e-10 * lnorm * vn);
        }
        energies.push(-0.5 * u.iter().zip(&load).map(|(a, b)| a * b).sum::<f64>());
    }
    // the meshes are not nested, so compare discrete energies: successive
    // gaps must shrink
    let gaps = [(energies[1] - energies[0]).abs(), (energies[2] - energies[1]).abs()];
    assert!(gaps[1] < 0.5 * gaps[0], "{energies:?}");
}

#[test]
fn badly_scaled_load_stops_at_the_rounding_floor() {
    // u is large against |L| with only a short clamped arc; |r|/|L| cannot
    // reach 1e-12 in double precision here, the backward error can.
    let space = FeSpace::new(labeled_disk_p2(380)).unwrap();
    let load = space.load(&FieldFn::constant(1.0)).unwrap();
    let fixed = space.dirichlet_dofs();
    let (u, out) = space
        .solve_with_dirichlet(&load, &fixed, &vec![0.0; fixed.len()], CgOptions::default(), None)
        .unwrap();
    let k = space.stiffness();
    let free: Vec<usize> = (0..u.len()).filter(|i| fixed.binary_search(i).is_err()).collect();
    let ku = k.mul_vec(&u);
    let norm = |v: &mut dyn Iterator<Item = f64>| v.map(|x| x * x).sum::<f64>().sqrt();
    let r = norm(&mut free.iter().map(|&i| ku[i] - load[i]));
    let l = norm(&mut free.iter().map(|&i| load[i]));
    let a_inf = (0..u.len())
        .map(|i| k.row(i).map(|(_, v)| v.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    assert!((r / l - out.relative_residual).abs() <= 1e-3 * out.relative_residual);
    assert!(r <= 1e-12 * (a_inf * norm(&mut u.iter().copied()) + l));
    assert!(out.relative_residual < 1e-8);
}
