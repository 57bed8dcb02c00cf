use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::error::Result;
use crate::field::{Breakline, FieldFn};
use crate::mesh::{generate_unit_disk, normalize_angle, AngleRange, BoundaryLabel, FeOrder, Mesh2D};
use crate::solvers::RegionTag;

type Family = Arc<dyn Fn(f64) -> FieldFn + Send + Sync>;

/// Data `(f_t, k_t, g_t)` and their derivatives at `t = 0`.
#[derive(Clone)]
pub struct PerturbationFamily {
    f: Family,
    k: Family,
    g: Family,
    f_prime: FieldFn,
    k_prime: FieldFn,
    g_prime: FieldFn,
}

impl PerturbationFamily {
    pub fn new(
        f: impl Fn(f64) -> FieldFn + Send + Sync + 'static,
        k: impl Fn(f64) -> FieldFn + Send + Sync + 'static,
        g: impl Fn(f64) -> FieldFn + Send + Sync + 'static,
        f_prime: FieldFn,
        k_prime: FieldFn,
        g_prime: FieldFn,
    ) -> Self {
        PerturbationFamily {
            f: Arc::new(f),
            k: Arc::new(k),
            g: Arc::new(g),
            f_prime,
            k_prime,
            g_prime,
        }
    }

    pub fn f(&self, t: f64) -> FieldFn {
        (self.f)(t)
    }

    pub fn k(&self, t: f64) -> FieldFn {
        (self.k)(t)
    }

    pub fn g(&self, t: f64) -> FieldFn {
        (self.g)(t)
    }

    pub fn f_prime(&self) -> &FieldFn {
        &self.f_prime
    }

    pub fn k_prime(&self) -> &FieldFn {
        &self.k_prime
    }

    pub fn g_prime(&self) -> &FieldFn {
        &self.g_prime
    }
}

impl fmt::Debug for PerturbationFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PerturbationFamily").finish_non_exhaustive()
    }
}

/// `xi(x) = sin(pi x)` on `[-1/2, 1/2]`, extended by `-1` and `1`.
pub fn xi(x: f64) -> f64 {
    (PI * x.clamp(-0.5, 0.5)).sin()
}

pub fn xi_prime(x: f64) -> f64 {
    if x.abs() < 0.5 {
        PI * (PI * x).cos()
    } else {
        0.0
    }
}

pub fn xi_second(x: f64) -> f64 {
    if x.abs() < 0.5 {
        -PI * PI * (PI * x).sin()
    } else {
        0.0
    }
}

/// Lines where `xi''` jumps.
pub fn xi_breaklines() -> [Breakline; 2] {
    [Breakline::vertical(-0.5), Breakline::vertical(0.5)]
}

/// `f = -2 xi - 2 x xi' - (r^2 - 1) xi'' / 2`, the load for which
/// `u0 = (r^2 - 1) xi / 2` solves the problem at `t = 0`.
pub fn reference_load(x: f64, y: f64) -> f64 {
    -2.0 * xi(x) - 2.0 * x * xi_prime(x) - 0.5 * (x * x + y * y - 1.0) * xi_second(x)
}

pub fn reference_solution(x: f64, y: f64) -> f64 {
    0.5 * (x * x + y * y - 1.0) * xi(x)
}

pub fn reference_gradient(x: f64, y: f64) -> [f64; 2] {
    let s = 0.5 * (x * x + y * y - 1.0);
    [x * xi(x) + s * xi_prime(x), y * xi(x)]
}

/// Mesh parameters of the reference study.
#[derive(Clone, Debug, PartialEq)]
pub struct MeshSpec {
    pub n_boundary: usize,
    pub order: FeOrder,
    pub ranges: Vec<(AngleRange, BoundaryLabel)>,
}

impl MeshSpec {
    pub fn build(&self) -> Result<Arc<Mesh2D>> {
        let mesh = generate_unit_disk(self.n_boundary, &self.ranges)?;
        Ok(Arc::new(match self.order {
            FeOrder::P1 => mesh,
            FeOrder::P2 => mesh.p2_enrich()?,
        }))
    }
}

/// The unit-disk example: arcs, data family, exact solution at `t = 0` and
/// the expected boundary partition.
#[derive(Clone, Debug)]
pub struct ReferenceExample {
    pub mesh_spec: MeshSpec,
    pub family: PerturbationFamily,
}

/// Boundary arcs: D on `(pi/4, pi/2]`, N on `(pi/2, 3pi/4]`, T elsewhere.
pub fn reference_label_ranges() -> Vec<(AngleRange, BoundaryLabel)> {
    let r = |a: f64, b: f64| AngleRange::new(a, b).expect("constant ranges are valid");
    vec![
        (r(PI / 4.0, PI / 2.0), BoundaryLabel::Dirichlet),
        (r(PI / 2.0, 3.0 * PI / 4.0), BoundaryLabel::Neumann),
        (r(-5.0 * PI / 4.0, PI / 4.0), BoundaryLabel::Tresca),
    ]
}

pub fn reference_mesh(n_boundary: usize) -> Result<Arc<Mesh2D>> {
    MeshSpec {
        n_boundary,
        order: FeOrder::P2,
        ranges: reference_label_ranges(),
    }
    .build()
}

/// `f_t = e^t f`, `k_t = (1 + t) xi`, `g_t = 1 + t`.
pub fn reference_family() -> PerturbationFamily {
    let load = || FieldFn::new(reference_load).with_breaklines(xi_breaklines());
    let profile = || FieldFn::new(|x, _| xi(x)).with_breaklines(xi_breaklines());
    PerturbationFamily::new(
        move |t| load().scaled(t.exp()),
        move |t| profile().scaled(1.0 + t),
        |t| FieldFn::constant(1.0 + t),
        load(),
        profile(),
        FieldFn::constant(1.0),
    )
}

pub fn builtin_reference_example() -> ReferenceExample {
    ReferenceExample {
        mesh_spec: MeshSpec {
            n_boundary: 190,
            order: FeOrder::P2,
            ranges: reference_label_ranges(),
        },
        family: reference_family(),
    }
}

/// Partition of the Tresca arc at `t = 0`, by polar angle:
/// S- on `(-pi/3, pi/4]`, S+ on `(3pi/4, 4pi/3]`, SD on `(4pi/3, 5pi/3]`.
pub fn expected_partition(theta: f64) -> RegionTag {
    let th = normalize_angle(theta);
    // arcs are closed on the right; endpoints come from snapped vertices
    let eps = 1e-12;
    if th > -PI / 3.0 + eps && th <= PI / 4.0 + eps {
        RegionTag::Minus
    } else if th > 3.0 * PI / 4.0 + eps || th <= -2.0 * PI / 3.0 + eps {
        RegionTag::Plus
    } else {
        RegionTag::Dirichlet
    }
}

/// Reference errors `|u_t - u0 - t u0'|` in the full norm.
pub const REFERENCE_ERRORS: [(f64, f64); 6] = [
    (0.6, 0.6267),
    (0.4, 0.2558),
    (0.2, 0.0590),
    (0.1, 0.0145),
    (0.075, 0.0083),
    (0.05, 0.0042),
];

pub const DEFAULT_T_VALUES: [f64; 8] = [0.6, 0.4, 0.2, 0.1, 0.075, 0.05, 0.025, 0.01];
