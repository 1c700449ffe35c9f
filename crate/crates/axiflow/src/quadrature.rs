//! Element quadrature rules on the reference interval `[0, 1]`.
//!
//! Integrals over an element of the polygon are `L * sum_q w_q f(xi_q)`,
//! where `L` is the chord length and `f` is evaluated by linear
//! interpolation of the nodal values.  [`Quadrature::Lumped`] is the
//! trapezoidal rule on the node values, which is what mass lumping amounts
//! to for continuous piecewise linear data; [`Quadrature::Gauss3`] is exact
//! for polynomials up to degree five, which covers every integrand the
//! schemes produce (products of at most four linear factors).

use serde::{Deserialize, Serialize};

/// Quadrature rule applied element by element.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quadrature {
    /// Vertex rule (mass lumping).
    Lumped,
    /// Three-point Gauss–Legendre rule.
    Gauss3,
}

const GAUSS3_OFFSET: f64 = 0.387_298_334_620_741_7; // sqrt(3/5) / 2

impl Quadrature {
    /// Points in `[0, 1]` and weights summing to one.
    pub fn points(self) -> &'static [(f64, f64)] {
        const LUMPED: [(f64, f64); 2] = [(0.0, 0.5), (1.0, 0.5)];
        const GAUSS3: [(f64, f64); 3] = [
            (0.5 - GAUSS3_OFFSET, 5.0 / 18.0),
            (0.5, 8.0 / 18.0),
            (0.5 + GAUSS3_OFFSET, 5.0 / 18.0),
        ];
        match self {
            Quadrature::Lumped => &LUMPED,
            Quadrature::Gauss3 => &GAUSS3,
        }
    }
}

/// Linear interpolation between the values at the element start (`xi = 0`)
/// and end (`xi = 1`).
#[inline]
pub fn lerp(a: f64, b: f64, xi: f64) -> f64 {
    a + (b - a) * xi
}

/// Values of the two element hat functions at `xi`.
#[inline]
pub fn hats(xi: f64) -> [f64; 2] {
    [1.0 - xi, xi]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss3_integrates_quintics_exactly() {
        for k in 0..=5 {
            let exact = 1.0 / (k as f64 + 1.0);
            let approx: f64 = Quadrature::Gauss3
                .points()
                .iter()
                .map(|&(x, w)| w * x.powi(k))
                .sum();
            assert!((approx - exact).abs() < 1e-15, "degree {k}");
        }
    }

    #[test]
    fn lumped_rule_is_trapezoidal() {
        let approx: f64 = Quadrature::Lumped
            .points()
            .iter()
            .map(|&(x, w)| w * (2.0 + 3.0 * x))
            .sum();
        assert_eq!(approx, 3.5);
    }
}
