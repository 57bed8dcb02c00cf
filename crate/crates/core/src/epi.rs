//! One-dimensional convex analysis of `G(t, x) = g_t |x|`: prox,
//! subdifferential, second-order difference quotients and their limits.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fit::loglog_slope;

/// `argmin_y lambda |y| + (y - x)^2 / 2`, i.e. soft thresholding.
pub fn prox_abs_scaled(lambda: f64, x: f64) -> Result<f64> {
    if !(lambda >= 0.0) {
        return Err(Error::Input(format!(
            "prox parameter must be nonnegative, got {lambda}"
        )));
    }
    Ok(x.signum() * (x.abs() - lambda).max(0.0))
}

/// Closed interval `[lo, hi]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn point(v: f64) -> Self {
        Interval { lo: v, hi: v }
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }

    pub fn scaled(&self, a: f64) -> Self {
        let (p, q) = (a * self.lo, a * self.hi);
        Interval {
            lo: p.min(q),
            hi: p.max(q),
        }
    }
}

pub fn subdiff_abs(x: f64) -> Interval {
    match x.partial_cmp(&0.0) {
        Some(Ordering::Greater) => Interval::point(1.0),
        Some(Ordering::Less) => Interval::point(-1.0),
        _ => Interval { lo: -1.0, hi: 1.0 },
    }
}

/// Domain of the second-order epi-derivative of `|.|` at `x` for the
/// subgradient `y / g`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ConeK {
    FullLine,
    NonNeg,
    NonPos,
    ZeroOnly,
}

impl ConeK {
    pub fn contains(self, z: f64) -> bool {
        match self {
            ConeK::FullLine => true,
            ConeK::NonNeg => z >= 0.0,
            ConeK::NonPos => z <= 0.0,
            ConeK::ZeroOnly => z == 0.0,
        }
    }
}

pub fn classify_k(x: f64, y_over_g: f64) -> Result<ConeK> {
    if !(y_over_g.abs() <= 1.0) {
        return Err(Error::Input(format!("y/g = {y_over_g} is not in [-1, 1]")));
    }
    if x != 0.0 {
        if y_over_g != x.signum() {
            return Err(Error::Input(format!(
                "y/g = {y_over_g} is not the subgradient of |.| at {x}"
            )));
        }
        return Ok(ConeK::FullLine);
    }
    Ok(if y_over_g == 1.0 {
        ConeK::NonNeg
    } else if y_over_g == -1.0 {
        ConeK::NonPos
    } else {
        ConeK::ZeroOnly
    })
}

/// Real number or `+inf`. Only comparisons are defined on the infinite value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExtendedReal {
    Finite(f64),
    PosInfinity,
}

impl ExtendedReal {
    pub fn is_finite(self) -> bool {
        matches!(self, ExtendedReal::Finite(_))
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            ExtendedReal::Finite(v) => Some(v),
            ExtendedReal::PosInfinity => None,
        }
    }
}

impl PartialOrd for ExtendedReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        use ExtendedReal::*;
        match (self, other) {
            (Finite(a), Finite(b)) => a.partial_cmp(b),
            (Finite(_), PosInfinity) => Some(Ordering::Less),
            (PosInfinity, Finite(_)) => Some(Ordering::Greater),
            (PosInfinity, PosInfinity) => Some(Ordering::Equal),
        }
    }
}

impl fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedReal::Finite(v) => write!(f, "{v}"),
            ExtendedReal::PosInfinity => f.write_str("+inf"),
        }
    }
}

/// A point `(x, y)` of the graph of `g_0 d|.|` together with the threshold
/// family `t -> g_t` and its derivative at zero.
#[derive(Clone)]
pub struct GPointData {
    pub x: f64,
    pub y: f64,
    pub g0: f64,
    pub g0prime: f64,
    g_of_t: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl GPointData {
    pub fn new(
        x: f64,
        y: f64,
        g0: f64,
        g0prime: f64,
        g_of_t: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        if !(g0 > 0.0) {
            return Err(Error::Input(format!("g0 must be positive, got {g0}")));
        }
        classify_k(x, y / g0)?;
        Ok(GPointData {
            x,
            y,
            g0,
            g0prime,
            g_of_t: Arc::new(g_of_t),
        })
    }

    /// `g_t = g0 + t g0'`.
    pub fn affine(x: f64, y: f64, g0: f64, g0prime: f64) -> Result<Self> {
        GPointData::new(x, y, g0, g0prime, move |t| g0 + t * g0prime)
    }

    /// Same family with a different claimed derivative (for negative controls).
    pub fn with_claimed_derivative(&self, g0prime: f64) -> Self {
        GPointData {
            g0prime,
            ..self.clone()
        }
    }

    pub fn g(&self, t: f64) -> f64 {
        (self.g_of_t)(t)
    }

    pub fn cone(&self) -> ConeK {
        classify_k(self.x, self.y / self.g0).expect("validated on construction")
    }
}

impl fmt::Debug for GPointData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GPointData")
            .field("x", &self.x)
            .field("y", &self.y)
            .field("g0", &self.g0)
            .field("g0prime", &self.g0prime)
            .finish_non_exhaustive()
    }
}

/// `(|x + t z| - |x| - t v z) / t^2`.
pub fn delta2_abs(x: f64, v: f64, z: f64, t: f64) -> f64 {
    // |x + tz| - |x| = sign(x) t z whenever x + tz keeps the sign of x;
    // dividing that out first avoids cancellation
    match abs_increment_over_t(x, z, t) {
        Some(d) => (d - v * z) / t,
        None => ((x + t * z).abs() - x.abs() - t * v * z) / (t * t),
    }
}

/// `(g_t |x + t z| - g_t |x| - t y z) / t^2`.
pub fn delta2_g(p: &GPointData, z: f64, t: f64) -> f64 {
    let gt = p.g(t);
    match abs_increment_over_t(p.x, z, t) {
        Some(d) => (gt * d - p.y * z) / t,
        None => (gt * (p.x + t * z).abs() - gt * p.x.abs() - t * p.y * z) / (t * t),
    }
}

// `(|x + t z| - |x|) / t` when it has a cancellation-free closed form.
fn abs_increment_over_t(x: f64, z: f64, t: f64) -> Option<f64> {
    let s = x + t * z;
    if x == 0.0 {
        Some(z.abs())
    } else if s.signum() == x.signum() && s != 0.0 {
        Some(x.signum() * z)
    } else {
        None
    }
}

/// Right-hand side of the split
/// `delta2_g = g_t delta2_abs(x | y/g0) + ((g_t - g0)/t) (y/g0) z`.
pub fn delta2_g_split(p: &GPointData, z: f64, t: f64) -> f64 {
    let gt = p.g(t);
    let v = p.y / p.g0;
    gt * delta2_abs(p.x, v, z, t) + (gt - p.g0) / t * v * z
}

/// `I_K(z) + g0' (y/g0) z`.
pub fn epi_derivative_g(p: &GPointData, z: f64) -> ExtendedReal {
    if p.cone().contains(z) {
        ExtendedReal::Finite(p.g0prime * p.y / p.g0 * z)
    } else {
        ExtendedReal::PosInfinity
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MoscoReport {
    pub z: f64,
    pub cone: ConeK,
    pub epi_derivative: ExtendedReal,
    /// `(t, delta2_g(z, t))` along the grid
    pub quotients: Vec<(f64, f64)>,
    /// `|quotient - limit|` per grid point (z in K only)
    pub errors: Vec<f64>,
    /// fitted exponent `p` in `error ~ t^p` (z in K, nonzero errors)
    pub observed_rate: Option<f64>,
    /// fitted `c` in `quotient ~ c / t` (z outside K)
    pub divergence_constant: Option<f64>,
    pub converges: bool,
    pub liminf_holds: bool,
}

impl fmt::Display for MoscoReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "z = {}, K = {:?}, D2G(z) = {}",
            self.z, self.cone, self.epi_derivative
        )?;
        for (i, (t, q)) in self.quotients.iter().enumerate() {
            match self.errors.get(i) {
                Some(e) => writeln!(f, "  t = {t:.6e}  quotient = {q:.12e}  error = {e:.3e}")?,
                None => writeln!(f, "  t = {t:.6e}  quotient = {q:.12e}  t*quotient = {:.6e}", t * q)?,
            }
        }
        if let Some(r) = self.observed_rate {
            writeln!(f, "  observed rate = {r:.4}")?;
        }
        if let Some(c) = self.divergence_constant {
            writeln!(f, "  divergence ~ {c:.6}/t")?;
        }
        write!(
            f,
            "  converges = {}, liminf holds = {}",
            self.converges, self.liminf_holds
        )
    }
}

/// Errors at or below this count as exact in the convergence test.
const EXACT: f64 = 1e-12;

/// Samples the difference quotients along the constant sequence `z_t = z`.
///
/// For `z` in `K` the quotients must approach the epi-derivative, with a
/// fitted rate of at least 1/2 unless they are exact. Outside `K` they must
/// grow like `c / t` with `c > 0`.
pub fn mosco_pointwise_check(p: &GPointData, z: f64, t_grid: &[f64]) -> Result<MoscoReport> {
    if t_grid.len() < 4 {
        return Err(Error::Input(format!(
            "need at least 4 grid points, got {}",
            t_grid.len()
        )));
    }
    if t_grid.iter().any(|&t| !(t > 0.0 && t <= 1.0)) {
        return Err(Error::Input("grid points must lie in (0, 1]".into()));
    }
    if t_grid.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Input("grid must be strictly descending".into()));
    }
    let limit = epi_derivative_g(p, z);
    let quotients: Vec<(f64, f64)> = t_grid.iter().map(|&t| (t, delta2_g(p, z, t))).collect();
    let mut report = MoscoReport {
        z,
        cone: p.cone(),
        epi_derivative: limit,
        quotients,
        errors: Vec::new(),
        observed_rate: None,
        divergence_constant: None,
        converges: false,
        liminf_holds: false,
    };
    match limit {
        ExtendedReal::Finite(d) => {
            report.errors = report.quotients.iter().map(|(_, q)| (q - d).abs()).collect();
            let ts: Vec<f64> = report.quotients.iter().map(|(t, _)| *t).collect();
            let exact = report.errors.iter().all(|&e| e <= EXACT * (1.0 + d.abs()));
            report.observed_rate = if exact { None } else { loglog_slope(&ts, &report.errors) };
            report.converges = exact || report.observed_rate.is_some_and(|r| r >= 0.5);
            // liminf along the sequence equals the limit when it converges
            report.liminf_holds = report.converges;
        }
        ExtendedReal::PosInfinity => {
            // least squares for q = c / t
            let (num, den) = report
                .quotients
                .iter()
                .fold((0.0, 0.0), |(a, b), (t, q)| (a + q / t, b + 1.0 / (t * t)));
            let c = num / den;
            report.divergence_constant = Some(c);
            let increasing = report.quotients.windows(2).all(|w| w[1].1 > w[0].1);
            report.converges = false;
            report.liminf_holds = c > 0.0 && increasing;
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prox_examples() {
        assert_eq!(prox_abs_scaled(1.0, 3.0).unwrap(), 2.0);
        assert_eq!(prox_abs_scaled(1.0, -3.0).unwrap(), -2.0);
        assert_eq!(prox_abs_scaled(1.0, 0.5).unwrap(), 0.0);
        assert!(prox_abs_scaled(-1.0, 0.5).is_err());
    }

    #[test]
    fn extended_order() {
        assert!(ExtendedReal::Finite(1e300) < ExtendedReal::PosInfinity);
        assert!(ExtendedReal::Finite(-1.0) < ExtendedReal::Finite(0.0));
    }

    #[test]
    fn grid_must_descend() {
        let p = GPointData::affine(0.0, 0.5, 1.0, 1.0).unwrap();
        assert!(mosco_pointwise_check(&p, 0.0, &[0.1, 0.2, 0.05, 0.01]).is_err());
        assert!(mosco_pointwise_check(&p, 0.0, &[0.1, 0.05, 0.01]).is_err());
    }
}
