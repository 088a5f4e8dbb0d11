//! Gauss rules on the unit segment and the reference triangle.
//!
//! Triangle rules are tensor Gauss-Legendre rules pulled back through the
//! collapsed (Duffy) map `x = u, y = v (1 - u)`, which keeps all weights
//! positive and all points strictly inside the triangle.

use crate::error::{Error, Result};

pub const MAX_TRIANGLE_DEGREE: usize = 6;
pub const MAX_SEGMENT_DEGREE: usize = 9;

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule<P> {
    pub points: Vec<P>,
    pub weights: Vec<f64>,
    /// Polynomials up to this total degree are integrated exactly.
    pub degree: usize,
}

/// Rule on the unit segment `[0, 1]`.
pub type SegmentRule = QuadratureRule<f64>;
/// Rule on the reference triangle `(0,0), (1,0), (0,1)`.
pub type TriangleRule = QuadratureRule<[f64; 2]>;

impl<P> QuadratureRule<P> {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&P, f64)> + '_ {
        self.points.iter().zip(self.weights.iter().copied())
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`, nodes ascending.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    for i in 0..m {
        // Newton iteration from the Chebyshev-like initial guess
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(m, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(m, x);
        if d != 0.0 {
            dp = d;
        }
        nodes[m - 1 - i] = x;
        weights[m - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

fn legendre_with_derivative(m: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if m == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=m {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = m as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

fn unit_interval(m: usize) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(m);
    (
        x.iter().map(|x| 0.5 * (x + 1.0)).collect(),
        w.iter().map(|w| 0.5 * w).collect(),
    )
}

pub fn edge_quadrature(degree: usize) -> Result<SegmentRule> {
    if degree > MAX_SEGMENT_DEGREE {
        return Err(Error::invalid(format!(
            "segment rules support degree <= {MAX_SEGMENT_DEGREE}, got {degree}"
        )));
    }
    let (points, weights) = unit_interval(degree / 2 + 1);
    Ok(QuadratureRule {
        points,
        weights,
        degree,
    })
}

pub fn element_quadrature(degree: usize) -> Result<TriangleRule> {
    if degree > MAX_TRIANGLE_DEGREE {
        return Err(Error::invalid(format!(
            "triangle rules support degree <= {MAX_TRIANGLE_DEGREE}, got {degree}"
        )));
    }
    // the collapse adds one power of (1 - u) to the integrand
    let (u, wu) = unit_interval((degree + 3) / 2);
    let (v, wv) = unit_interval(degree / 2 + 1);
    let mut points = Vec::with_capacity(u.len() * v.len());
    let mut weights = Vec::with_capacity(u.len() * v.len());
    for (&ui, &wi) in u.iter().zip(&wu) {
        for (&vj, &wj) in v.iter().zip(&wv) {
            points.push([ui, vj * (1.0 - ui)]);
            weights.push(wi * wj * (1.0 - ui));
        }
    }
    Ok(QuadratureRule {
        points,
        weights,
        degree,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factorial(n: u32) -> f64 {
        (1..=n).map(f64::from).product()
    }

    /// Integral of x^a y^b over the reference triangle: a! b! / (a + b + 2)!.
    fn triangle_monomial(a: u32, b: u32) -> f64 {
        factorial(a) * factorial(b) / factorial(a + b + 2)
    }

    #[test]
    fn triangle_rules_integrate_monomials() {
        for d in 0..=MAX_TRIANGLE_DEGREE {
            let rule = element_quadrature(d).unwrap();
            for a in 0..=d as u32 {
                for b in 0..=(d as u32 - a) {
                    let q: f64 = rule
                        .iter()
                        .map(|(p, w)| w * p[0].powi(a as i32) * p[1].powi(b as i32))
                        .sum();
                    let exact = triangle_monomial(a, b);
                    assert!((q - exact).abs() <= 1e-14 * exact, "d={d} a={a} b={b}");
                }
            }
            let total: f64 = rule.weights.iter().sum();
            assert!((total - 0.5).abs() < 1e-15);
            assert!(rule.weights.iter().all(|&w| w > 0.0));
        }
    }

    #[test]
    fn degree_two_triangle_values() {
        let rule = element_quadrature(2).unwrap();
        let integrate = |f: &dyn Fn(f64, f64) -> f64| -> f64 {
            rule.iter().map(|(p, w)| w * f(p[0], p[1])).sum()
        };
        for (f, exact) in [
            (&(|x: f64, _y: f64| x * x) as &dyn Fn(f64, f64) -> f64, 1.0 / 12.0),
            (&|x: f64, y: f64| x * y, 1.0 / 24.0),
            (&|_x: f64, y: f64| y * y, 1.0 / 12.0),
        ] {
            assert!((integrate(f) - exact).abs() / exact < 1e-14);
        }
    }

    #[test]
    fn segment_rules_integrate_monomials() {
        for d in 0..=MAX_SEGMENT_DEGREE {
            let rule = edge_quadrature(d).unwrap();
            for a in 0..=d as i32 {
                let q: f64 = rule.iter().map(|(t, w)| w * t.powi(a)).sum();
                let exact = 1.0 / (a + 1) as f64;
                assert!((q - exact).abs() <= 1e-14 * exact, "d={d} a={a}");
            }
        }
    }

    #[test]
    fn midpoint_rule() {
        let rule = edge_quadrature(1).unwrap();
        assert_eq!(rule.points, vec![0.5]);
        assert_eq!(rule.weights, vec![1.0]);
    }

    #[test]
    fn unsupported_degrees_are_rejected() {
        assert!(element_quadrature(7).is_err());
        assert!(edge_quadrature(10).is_err());
    }
}
