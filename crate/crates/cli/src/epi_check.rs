//! Randomized battery for the pointwise second-order quotients of `g |.|`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tresca_core::epi::*;

use crate::args::EpiArgs;
use crate::error::{CliError, CliResult};

const GRID: [f64; 4] = [0.1, 0.05, 0.025, 0.0125];
const MOSCO_CASES: usize = 20;

struct Tally {
    name: &'static str,
    run: usize,
    failed: usize,
}

impl Tally {
    fn new(name: &'static str) -> Self {
        Tally {
            name,
            run: 0,
            failed: 0,
        }
    }

    fn check(&mut self, ok: bool) -> bool {
        self.run += 1;
        if !ok {
            self.failed += 1;
        }
        ok
    }

    fn print(&self) {
        let verdict = if self.failed == 0 { "ok" } else { "FAILED" };
        println!(
            "{:<28} {:>6} cases  {:>5} failed  {verdict}",
            self.name, self.run, self.failed
        );
    }
}

fn sign(rng: &mut ChaCha8Rng) -> f64 {
    if rng.gen() {
        1.0
    } else {
        -1.0
    }
}

fn dyadic(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    let s = (1u64 << 20) as f64;
    rng.gen_range((lo * s) as i64..=(hi * s) as i64) as f64 / s
}

fn examples() -> Vec<bool> {
    let edge = GPointData::new(0.0, 1.0, 1.0, 0.0, |_| 1.0).expect("feasible");
    let tilted = GPointData::affine(0.0, 0.5, 1.0, 1.0).expect("feasible");
    vec![
        prox_abs_scaled(1.0, 3.0).ok() == Some(2.0),
        prox_abs_scaled(1.0, -3.0).ok() == Some(-2.0),
        prox_abs_scaled(1.0, 0.5).ok() == Some(0.0),
        prox_abs_scaled(-1.0, 0.5).is_err(),
        subdiff_abs(0.0) == Interval { lo: -1.0, hi: 1.0 },
        classify_k(0.0, 1.0).ok() == Some(ConeK::NonNeg),
        classify_k(0.0, 0.3).ok() == Some(ConeK::ZeroOnly),
        (delta2_g(&tilted, 1.0, 0.1) - 6.0).abs() < 1e-12,
        (delta2_g(&edge, -1.0, 0.1) - 20.0).abs() < 1e-12,
        epi_derivative_g(&edge, -1.0) == ExtendedReal::PosInfinity,
    ]
}

fn random_point(rng: &mut ChaCha8Rng, g0: f64, gp: f64) -> GPointData {
    let smooth = move |t: f64| g0 * (gp * t / g0).exp();
    let (x, y) = match rng.gen_range(0..3) {
        0 => {
            let x = rng.gen_range(0.5..3.0) * sign(rng);
            (x, g0 * x.signum())
        }
        1 => (0.0, g0 * rng.gen_range(-0.9..0.9)),
        _ => (0.0, g0 * sign(rng)),
    };
    GPointData::new(x, y, g0, gp, smooth).expect("feasible by construction")
}

fn feasible_direction(rng: &mut ChaCha8Rng, cone: ConeK) -> f64 {
    let m = rng.gen_range(0.0..3.0);
    match cone {
        ConeK::FullLine => m * sign(rng),
        ConeK::NonNeg => m,
        ConeK::NonPos => -m,
        ConeK::ZeroOnly => 0.0,
    }
}

fn infeasible_direction(rng: &mut ChaCha8Rng, cone: ConeK) -> Option<f64> {
    let m = rng.gen_range(1.0..3.0);
    match cone {
        ConeK::FullLine => None,
        ConeK::NonNeg => Some(-m),
        ConeK::NonPos => Some(m),
        ConeK::ZeroOnly => Some(m * sign(rng)),
    }
}

fn report(verbose: bool, ok: bool, r: &MoscoReport) {
    if verbose || !ok {
        println!("{r}");
    }
}

pub fn run(a: &EpiArgs) -> CliResult<()> {
    if a.cases == 0 {
        return Err(CliError::Usage("--cases must be at least 1".into()));
    }
    if a.claimed_g_prime.is_some_and(|c| !c.is_finite()) {
        return Err(CliError::Usage("--claimed-g-prime must be finite".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let mut tallies = Vec::new();

    let mut t = Tally::new("closed-form examples");
    for ok in examples() {
        t.check(ok);
    }
    tallies.push(t);

    let mut t = Tally::new("split identity");
    for _ in 0..a.cases {
        let g0 = rng.gen_range(0.1..5.0);
        let gp = rng.gen_range(-3.0..3.0);
        let p = random_point(&mut rng, g0, gp);
        let (z, s) = (rng.gen_range(-5.0..5.0), rng.gen_range(0.01..1.0));
        let (lhs, rhs) = (delta2_g(&p, z, s), delta2_g_split(&p, z, s));
        t.check((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()));
    }
    tallies.push(t);

    let mut t = Tally::new("prox nonexpansive");
    for _ in 0..a.cases {
        let l = dyadic(&mut rng, 0.0, 10.0);
        let (x, y) = (dyadic(&mut rng, -50.0, 50.0), dyadic(&mut rng, -50.0, 50.0));
        let (px, py) = (prox_abs_scaled(l, x)?, prox_abs_scaled(l, y)?);
        t.check((px - py).abs() <= (x - y).abs());
    }
    tallies.push(t);

    let mut t = Tally::new("prox optimality");
    for _ in 0..a.cases {
        let l = dyadic(&mut rng, 0.0, 10.0);
        let x = dyadic(&mut rng, -50.0, 50.0);
        let p = prox_abs_scaled(l, x)?;
        t.check(subdiff_abs(p).scaled(l).contains(x - p));
    }
    tallies.push(t);

    let claim = |p: GPointData| match a.claimed_g_prime {
        Some(c) => p.with_claimed_derivative(c),
        None => p,
    };

    let mut t = Tally::new("convergence inside the cone");
    for _ in 0..MOSCO_CASES {
        let (g0, gp) = (rng.gen_range(0.5..2.0), rng.gen_range(-1.0..1.0));
        let p = random_point(&mut rng, g0, gp);
        let z = feasible_direction(&mut rng, p.cone());
        let r = mosco_pointwise_check(&claim(p), z, &GRID)?;
        let ok = t.check(r.converges && r.liminf_holds);
        report(a.verbose, ok, &r);
    }
    tallies.push(t);

    let mut t = Tally::new("divergence outside the cone");
    while t.run < MOSCO_CASES {
        let (g0, gp) = (rng.gen_range(1.0..2.0), rng.gen_range(-1.0..1.0));
        let p = random_point(&mut rng, g0, gp);
        let Some(z) = infeasible_direction(&mut rng, p.cone()) else {
            continue;
        };
        let r = mosco_pointwise_check(&claim(p), z, &GRID)?;
        let ok = t.check(
            !r.converges
                && r.liminf_holds
                && r.epi_derivative == ExtendedReal::PosInfinity
                && r.divergence_constant.is_some_and(|c| c >= 0.5),
        );
        report(a.verbose, ok, &r);
    }
    tallies.push(t);

    for t in &tallies {
        t.print();
    }
    let failed: usize = tallies.iter().map(|t| t.failed).sum();
    if failed == 0 {
        println!("all checks passed");
        Ok(())
    } else {
        Err(CliError::CheckFailed(format!("{failed} checks failed")))
    }
}
