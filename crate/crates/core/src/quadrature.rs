//! Quadrature rules on the reference triangle and the reference edge.

/// Points and weights on a reference cell.
///
/// Triangle rules use barycentric points `(l0, l1, l2)` with weights summing
/// to 1, so `sum w * f(x(l)) * area` integrates over a physical triangle.
/// Edge rules use a parameter `s` in `[0, 1]` with weights summing to 1.
#[derive(Clone, Debug)]
pub struct QuadratureRule<P> {
    pub points: Vec<P>,
    pub weights: Vec<f64>,
    pub degree: usize,
}

pub type TriangleRule = QuadratureRule<[f64; 3]>;
pub type EdgeRule = QuadratureRule<f64>;

impl TriangleRule {
    /// Picks the cheapest built-in rule exact to at least `degree`.
    pub fn with_degree(degree: usize) -> Self {
        match degree {
            0 | 1 => Self::centroid(),
            2 => Self::degree2(),
            3 | 4 => Self::degree4(),
            5 | 6 => Self::degree6(),
            _ => panic!("no triangle rule of degree {degree}"),
        }
    }

    pub fn centroid() -> Self {
        QuadratureRule {
            points: vec![[1.0 / 3.0; 3]],
            weights: vec![1.0],
            degree: 1,
        }
    }

    pub fn degree2() -> Self {
        let (a, b) = (2.0 / 3.0, 1.0 / 6.0);
        QuadratureRule {
            points: vec![[a, b, b], [b, a, b], [b, b, a]],
            weights: vec![1.0 / 3.0; 3],
            degree: 2,
        }
    }

    /// Six-point Dunavant rule.
    pub fn degree4() -> Self {
        let mut rule = QuadratureRule {
            points: Vec::new(),
            weights: Vec::new(),
            degree: 4,
        };
        rule.push_orbit3(0.108_103_018_168_070, 0.223_381_589_678_011);
        rule.push_orbit3(0.816_847_572_980_459, 0.109_951_743_655_322);
        rule
    }

    /// Twelve-point Dunavant rule.
    pub fn degree6() -> Self {
        let mut rule = QuadratureRule {
            points: Vec::new(),
            weights: Vec::new(),
            degree: 6,
        };
        rule.push_orbit3(0.501_426_509_658_179, 0.116_786_275_726_379);
        rule.push_orbit3(0.873_821_971_016_996, 0.050_844_906_370_207);
        rule.push_orbit6(0.053_145_049_844_817, 0.310_352_451_033_784, 0.082_851_075_618_374);
        rule
    }

    fn push_orbit3(&mut self, a: f64, w: f64) {
        let b = 0.5 * (1.0 - a);
        for p in [[a, b, b], [b, a, b], [b, b, a]] {
            self.points.push(p);
            self.weights.push(w);
        }
    }

    fn push_orbit6(&mut self, a: f64, b: f64, w: f64) {
        let c = 1.0 - a - b;
        for p in [[a, b, c], [a, c, b], [b, a, c], [b, c, a], [c, a, b], [c, b, a]] {
            self.points.push(p);
            self.weights.push(w);
        }
    }
}

impl EdgeRule {
    /// Gauss-Legendre with `n` points (1 to 4) on `[0, 1]`.
    pub fn gauss(n: usize) -> Self {
        let (x, w): (Vec<f64>, Vec<f64>) = match n {
            1 => (vec![0.0], vec![2.0]),
            2 => {
                let a = 1.0 / 3.0f64.sqrt();
                (vec![-a, a], vec![1.0, 1.0])
            }
            3 => {
                let a = (3.0f64 / 5.0).sqrt();
                (vec![-a, 0.0, a], vec![5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0])
            }
            4 => {
                let s = (6.0f64 / 5.0).sqrt();
                let a = ((3.0 - 2.0 * s) / 7.0).sqrt();
                let b = ((3.0 + 2.0 * s) / 7.0).sqrt();
                let wa = (18.0 + 30.0f64.sqrt()) / 36.0;
                let wb = (18.0 - 30.0f64.sqrt()) / 36.0;
                (vec![-b, -a, a, b], vec![wb, wa, wa, wb])
            }
            _ => panic!("no {n}-point Gauss rule"),
        };
        QuadratureRule {
            points: x.iter().map(|&x| 0.5 * (x + 1.0)).collect(),
            weights: w.iter().map(|&w| 0.5 * w).collect(),
            degree: 2 * n - 1,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factorial(n: u32) -> f64 {
        (1..=n).map(f64::from).product()
    }

    // integral of l1^a l2^b over the reference triangle (area 1/2), normalised by area
    fn monomial_exact(a: u32, b: u32) -> f64 {
        2.0 * factorial(a) * factorial(b) / factorial(a + b + 2)
    }

    #[test]
    fn triangle_rules_are_exact_to_declared_degree() {
        for rule in [
            TriangleRule::centroid(),
            TriangleRule::degree2(),
            TriangleRule::degree4(),
            TriangleRule::degree6(),
        ] {
            assert!(rule.weights.iter().all(|&w| w > 0.0));
            for a in 0..=rule.degree as u32 {
                for b in 0..=(rule.degree as u32 - a) {
                    let q: f64 = rule
                        .points
                        .iter()
                        .zip(&rule.weights)
                        .map(|(p, w)| w * p[1].powi(a as i32) * p[2].powi(b as i32))
                        .sum();
                    let exact = monomial_exact(a, b);
                    assert!(
                        (q - exact).abs() < 1e-14,
                        "degree {} rule, x^{a} y^{b}: {q} vs {exact}",
                        rule.degree
                    );
                }
            }
        }
    }

    #[test]
    fn degree6_is_not_exact_at_degree8() {
        // sanity: the monomial check is able to fail
        let rule = TriangleRule::degree6();
        let q: f64 = rule
            .points
            .iter()
            .zip(&rule.weights)
            .map(|(p, w)| w * p[1].powi(8))
            .sum();
        assert!((q - monomial_exact(8, 0)).abs() > 1e-8);
    }

    #[test]
    fn gauss_rules_are_exact() {
        for n in 1..=4 {
            let rule = EdgeRule::gauss(n);
            assert!(rule.weights.iter().all(|&w| w > 0.0));
            for k in 0..=rule.degree as i32 {
                let q: f64 = rule.points.iter().zip(&rule.weights).map(|(s, w)| w * s.powi(k)).sum();
                assert!((q - 1.0 / (k as f64 + 1.0)).abs() < 1e-14, "n={n} k={k}");
            }
        }
    }
}
