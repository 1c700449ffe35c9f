//! Time-level state shared by both schemes.

use crate::error::Result;
use crate::functionals::{energy_kappa, energy_kappa_s, ModelParams, SchemeKind};
use crate::geometry::{BoundaryClass, GeneratingCurve, Geometry, Vec2};
use crate::linsolve::SolveReport;

/// Unknowns of one time level.
///
/// For the curvature scheme `curvature` is the curve curvature and
/// `costate` the vector Lagrange multiplier of the curvature identity; for
/// the mean-curvature schemes they are the surface mean curvature and its
/// costate.  The conormals are stored for the endpoints whose conormal is
/// not prescribed (Navier, semifree and free endpoints), in endpoint order.
#[derive(Clone, Debug, PartialEq)]
pub struct SchemeState {
    pub curve: GeneratingCurve,
    pub curvature: Vec<f64>,
    pub costate: Vec<Vec2>,
    pub conormals: Vec<(usize, Vec2)>,
    pub time: f64,
}

impl SchemeState {
    /// Conormal stored for endpoint `node`, if any.
    pub fn conormal(&self, node: usize) -> Option<Vec2> {
        self.conormals
            .iter()
            .find(|(i, _)| *i == node)
            .map(|(_, m)| *m)
    }

    /// Energy of this time level alone (geometry, curvature and boundary
    /// terms all taken from `self`), for monitoring.  The energy reported
    /// per step by the driver instead uses the previous geometry.
    pub fn energy(&self, params: &ModelParams, scheme: SchemeKind) -> Result<f64> {
        let geom = Geometry::new(&self.curve)?;
        match scheme {
            SchemeKind::Kappa => {
                energy_kappa(&geom, &self.curvature, &self.curve, &self.conormals, params)
            }
            kind => Ok(energy_kappa_s(
                &geom,
                &self.curvature,
                &self.curve,
                &self.conormals,
                params,
                kind.quadrature(),
            )),
        }
    }
}

/// Result of one time step.
#[derive(Clone, Debug)]
pub struct StepOutcome {
    /// The new time level.
    pub state: SchemeState,
    /// Quality of the linear solve.
    pub report: SolveReport,
    /// Relative residual of the position/curvature identity over the full
    /// test space, after conormal recovery.
    pub identity_residual: f64,
    /// Multipliers of the conserved variants (zero otherwise).
    pub lambda_area: f64,
    pub lambda_volume: f64,
    /// Newton iterations of the conserved variants (zero otherwise).
    pub newton_iterations: usize,
}

/// True endpoint conormals `(-1)^(p+1) tau(p)` at the endpoints with a free
/// conormal.
pub fn true_conormals(geom: &Geometry) -> Vec<(usize, Vec2)> {
    let curve = &geom.curve;
    let last = curve.num_elements().saturating_sub(1);
    curve
        .endpoints()
        .into_iter()
        .filter(|&i| {
            curve
                .boundary_class(i)
                .is_some_and(|c| c.has_free_conormal())
        })
        .map(|i| {
            let m = if i == 0 {
                -geom.elements.tangent[0]
            } else {
                geom.elements.tangent[last]
            };
            (i, m)
        })
        .collect()
}

/// Endpoints with a free conormal.
pub(crate) fn conormal_nodes(curve: &GeneratingCurve) -> Vec<usize> {
    curve
        .endpoints()
        .into_iter()
        .filter(|&i| {
            curve
                .boundary_class(i)
                .is_some_and(|c| c.has_free_conormal())
        })
        .collect()
}

/// Clamp direction at node `i`, if clamped.
pub(crate) fn clamp_at(curve: &GeneratingCurve, i: usize) -> Option<Vec2> {
    curve.boundary_class(i).and_then(|c| c.clamp_direction())
}

/// Endpoints subject to the line tension term.
pub(crate) fn line_energy_nodes(curve: &GeneratingCurve) -> Vec<usize> {
    curve
        .endpoints()
        .into_iter()
        .filter(|&i| {
            curve
                .boundary_class(i)
                .is_some_and(|c| c.carries_line_energy())
        })
        .collect()
}

/// Checks that every node other than axis endpoints lies strictly inside
/// the half-plane.
pub(crate) fn check_domain(curve: &GeneratingCurve) -> crate::error::Result<()> {
    for (i, p) in curve.nodes().iter().enumerate() {
        if curve.boundary_class(i) == Some(BoundaryClass::Axis) {
            continue;
        }
        if !(p.x > 0.0) {
            return Err(crate::error::Error::AssemblyDomain { vertex: i, x1: p.x });
        }
    }
    Ok(())
}

/// Sign of node `n` on element `(a, b)`: the derivative of its hat function
/// along the element is `sign / L`.
#[inline]
pub(crate) fn element_sign(n: usize, a: usize) -> f64 {
    if n == a {
        -1.0
    } else {
        1.0
    }
}

/// Describes which solvability hypothesis fails for `curve`, if one of the
/// cheaply detectable ones does.
pub(crate) fn failed_assumption(curve: &GeneratingCurve) -> Option<String> {
    let report = crate::geometry::validate(curve);
    let clamped_everywhere = !curve.endpoints().is_empty()
        && curve
            .endpoints()
            .iter()
            .all(|&i| matches!(curve.boundary_class(i), Some(BoundaryClass::Clamped { .. })));
    if report.straight_line && clamped_everywhere {
        Some("both endpoints are clamped and the curve is a straight line".into())
    } else if report.normal_span_dimension < 2 {
        Some(format!(
            "interior vertex normals span a space of dimension {}",
            report.normal_span_dimension
        ))
    } else if !report.is_valid() {
        Some(report.problems.join("; "))
    } else {
        None
    }
}

/// Relative residual of a set of nodal equations given their left-hand
/// sides, right-hand sides and a magnitude scale per equation.
pub(crate) fn relative_residual(rows: &[(f64, f64, f64)]) -> f64 {
    let scale = rows
        .iter()
        .map(|r| r.2)
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    rows.iter()
        .map(|(l, r, _)| (l - r).abs())
        .fold(0.0, f64::max)
        / scale
}
