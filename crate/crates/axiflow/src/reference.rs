//! Exact sphere solutions and the error norms of the convergence study.
//!
//! A sphere of radius `R(t)` evolves under the generalized Willmore flow
//! (with all weights except the bending rigidity and the spontaneous
//! curvature switched off) by
//!
//! ```text
//! R' = -(kbar / R) (2 / R + kbar).
//! ```
//!
//! With `z = R + 2 / kbar` the equation integrates to the implicit relation
//!
//! ```text
//! (z^2 - z0^2) / 2 - 4 (z - z0) / kbar + 4 ln(z / z0) / kbar^2 + kbar^2 t = 0,
//! ```
//!
//! which [`sphere_radius`] solves by bisection on the branch between `z0`
//! and the stationary (or extinction) value.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{GeneratingCurve, Geometry};

/// Absolute accuracy of [`sphere_radius`].
pub const RADIUS_TOLERANCE: f64 = 1e-12;

/// Sphere evolving by generalized Willmore flow.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SphereReference {
    /// Spontaneous curvature.
    pub kbar: f64,
    /// Initial radius.
    pub r0: f64,
}

impl SphereReference {
    pub fn new(kbar: f64, r0: f64) -> Result<Self> {
        if !(r0 > 0.0 && r0.is_finite() && kbar.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "sphere reference needs r0 > 0 and finite kbar (got r0 = {r0}, kbar = {kbar})"
            )));
        }
        Ok(Self { kbar, r0 })
    }

    /// Right-hand side of the radius equation.
    pub fn velocity(&self, r: f64) -> f64 {
        -self.kbar / r * (2.0 / r + self.kbar)
    }

    /// Radius at time `t`; see [`sphere_radius`].
    pub fn radius(&self, t: f64) -> Result<f64> {
        sphere_radius(self, t)
    }
}

/// Radius of the reference sphere at time `t >= 0`.
///
/// For `kbar = 0` the sphere is stationary.  Otherwise the implicit
/// relation is monotone in `z` between `z0` and the end of the branch (the
/// stationary radius `-2 / kbar` when `kbar < 0`, extinction `R = 0` when
/// `kbar > 0`), and its root is located by bisection to
/// [`RADIUS_TOLERANCE`].
pub fn sphere_radius(reference: &SphereReference, t: f64) -> Result<f64> {
    let SphereReference { kbar, r0 } = *reference;
    if !(t >= 0.0) {
        return Err(Error::RootBracketFailure(format!(
            "time must be non-negative, got {t}"
        )));
    }
    if kbar == 0.0 || t == 0.0 {
        return Ok(r0);
    }
    let z0 = r0 + 2.0 / kbar;
    if z0 == 0.0 {
        // Already at the stationary radius.
        return Ok(r0);
    }
    let f = |z: f64| {
        0.5 * (z * z - z0 * z0) - 4.0 / kbar * (z - z0)
            + 4.0 / (kbar * kbar) * (z / z0).ln()
            + kbar * kbar * t
    };
    let z_end = if kbar < 0.0 { 0.0 } else { 2.0 / kbar };
    // f(z0) = kbar^2 t > 0; f decreases towards the end of the branch.
    let (mut lo, mut hi) = (z0, z_end);
    let end_value = if z_end == 0.0 {
        f64::NEG_INFINITY
    } else {
        f(z_end)
    };
    if end_value >= 0.0 {
        return Err(Error::RootBracketFailure(format!(
            "the sphere has shrunk to a point before t = {t}"
        )));
    }
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        let fm = f(mid);
        if fm > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo).abs() < 0.25 * RADIUS_TOLERANCE {
            break;
        }
    }
    let z = 0.5 * (lo + hi);
    Ok(z - 2.0 / kbar)
}

/// Error norms of a discrete evolution against a reference sphere.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ErrorNorms {
    /// `max_m max_j | |X^m_j| - R(t_m) |`.
    pub linf: f64,
    /// `max_m ( sum_j W_j (|X^m_j| - R(t_m))^2 )^(1/2)` with lumped weights.
    pub linf_l2: f64,
}

/// Accumulates [`ErrorNorms`] over a sequence of time levels.
#[derive(Clone, Copy, Debug)]
pub struct ErrorTracker {
    reference: SphereReference,
    norms: ErrorNorms,
}

impl ErrorTracker {
    pub fn new(reference: SphereReference) -> Self {
        Self {
            reference,
            norms: ErrorNorms {
                linf: 0.0,
                linf_l2: 0.0,
            },
        }
    }

    /// Includes the time level `(t, curve)`.
    pub fn record(&mut self, t: f64, curve: &GeneratingCurve) -> Result<()> {
        let r = self.reference.radius(t)?;
        let geom = Geometry::new(curve)?;
        let mut l2 = 0.0;
        for (i, p) in curve.nodes().iter().enumerate() {
            let e = p.norm() - r;
            self.norms.linf = self.norms.linf.max(e.abs());
            l2 += geom.vertices.weight[i] * e * e;
        }
        self.norms.linf_l2 = self.norms.linf_l2.max(l2.sqrt());
        Ok(())
    }

    pub fn norms(&self) -> ErrorNorms {
        self.norms
    }
}

/// Error norms over a history of `(time, curve)` snapshots.
pub fn error_norms(
    history: &[(f64, GeneratingCurve)],
    reference: SphereReference,
) -> Result<ErrorNorms> {
    let mut tracker = ErrorTracker::new(reference);
    for (t, c) in history {
        tracker.record(*t, c)?;
    }
    Ok(tracker.norms())
}

/// Experimental orders of convergence `log(e_k / e_{k+1}) / log(h_k / h_{k+1})`.
pub fn experimental_orders(h: &[f64], errors: &[f64]) -> Vec<f64> {
    h.windows(2)
        .zip(errors.windows(2))
        .map(|(h, e)| (e[0] / e[1]).ln() / (h[0] / h[1]).ln())
        .collect()
}
