//! Discrete functionals: curvature proxy, area-difference term, energies,
//! surface area, enclosed volume and the scalar diagnostics recorded during
//! a run.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{BoundaryClass, GeneratingCurve, Geometry, Vec2};
use crate::quadrature::{lerp, Quadrature};

/// Physical constants of the generalized Willmore energy.
///
/// The energy of a surface `S` with mean curvature `k` (sum of the principal
/// curvatures) and Gaussian curvature `K` is
///
/// ```text
/// alpha/2 ∫ (k - kbar)^2 + lambda |S| + beta/2 (∫ k - m0)^2
///     + alpha_g ∫ K + sigma |∂S|
/// ```
///
/// where the Gaussian-curvature integral is realized through its boundary
/// terms.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelParams {
    /// Bending rigidity, strictly positive.
    pub alpha: f64,
    /// Spontaneous curvature.
    pub kbar: f64,
    /// Surface tension weight.
    pub lambda: f64,
    /// Area-difference elasticity weight, non-negative.
    pub beta: f64,
    /// Area-difference offset.
    pub m0: f64,
    /// Gaussian bending rigidity.
    pub alpha_g: f64,
    /// Line tension on free boundaries.
    pub sigma: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            kbar: 0.0,
            lambda: 0.0,
            beta: 0.0,
            m0: 0.0,
            alpha_g: 0.0,
            sigma: 0.0,
        }
    }
}

impl ModelParams {
    /// Checks `alpha > 0` and `beta >= 0` and that every value is finite.
    pub fn check(&self) -> Result<()> {
        let all = [
            self.alpha,
            self.kbar,
            self.lambda,
            self.beta,
            self.m0,
            self.alpha_g,
            self.sigma,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig(
                "model parameters must be finite".into(),
            ));
        }
        if !(self.alpha > 0.0) {
            return Err(Error::InvalidConfig("alpha must be positive".into()));
        }
        if self.beta < 0.0 {
            return Err(Error::InvalidConfig("beta must be non-negative".into()));
        }
        Ok(())
    }
}

/// Which of the two discretizations is in use.  The curvature-based scheme
/// works with the curve curvature `kappa`; the other two work directly with
/// the surface mean curvature `kappa_s`, with either mass-lumped or exactly
/// integrated inner products.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeKind {
    Kappa,
    KappaSLumped,
    KappaSExact,
}

impl SchemeKind {
    /// Quadrature used in the inner products that may be lumped.
    pub fn quadrature(self) -> Quadrature {
        match self {
            SchemeKind::Kappa | SchemeKind::KappaSLumped => Quadrature::Lumped,
            SchemeKind::KappaSExact => Quadrature::Gauss3,
        }
    }
}

/// Nodal values of the curvature proxy together with the nodal factor by
/// which the curvature enters it (2 on the axis, 1 elsewhere).
#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureProxyField {
    pub values: Vec<f64>,
    pub factor: Vec<f64>,
}

/// Nodal factor of the curvature in the proxy: 2 at axis vertices, 1
/// elsewhere.
pub fn axis_factor(curve: &GeneratingCurve) -> Vec<f64> {
    (0..curve.num_nodes())
        .map(|i| if curve.is_axis_node(i) { 2.0 } else { 1.0 })
        .collect()
}

/// Discrete mean curvature of the surface built from the curve curvature:
/// `kappa - (omega . e1) / x1` away from the axis and `2 kappa` on it.
pub fn curvature_proxy(geom: &Geometry, kappa: &[f64]) -> Result<CurvatureProxyField> {
    let curve = &geom.curve;
    check_len(kappa.len(), curve.num_nodes())?;
    let factor = axis_factor(curve);
    let mut values = Vec::with_capacity(kappa.len());
    for (i, &k) in kappa.iter().enumerate() {
        if curve.is_axis_node(i) {
            values.push(2.0 * k);
        } else {
            let x1 = geom.x1(i);
            if x1 == 0.0 {
                return Err(Error::DivisionByAxis { vertex: i });
            }
            values.push(k - geom.vertices.omega[i].x / x1);
        }
    }
    Ok(CurvatureProxyField { values, factor })
}

fn check_len(found: usize, expected: usize) -> Result<()> {
    if found != expected {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// Area-difference term of the curvature scheme,
/// `2 pi (x1 kappa - nu . e1, |X_rho|)^h - m0`.
pub fn ade_kappa(geom: &Geometry, kappa: &[f64], m0: f64) -> f64 {
    let w = &geom.vertices.weight;
    let nodal: f64 = (0..geom.curve.num_nodes())
        .map(|i| w[i] * geom.x1(i) * kappa[i])
        .sum();
    let normal: f64 = geom
        .elements
        .length
        .iter()
        .zip(&geom.elements.normal)
        .map(|(l, n)| l * n.x)
        .sum();
    2.0 * PI * (nodal - normal) - m0
}

/// Integral `∫ f ds` over the curve, where `f` is computed at each
/// quadrature point from the interpolated radial coordinate and the
/// interpolated nodal field.
pub(crate) fn integrate_x1_field(
    geom: &Geometry,
    field: &[f64],
    quad: Quadrature,
    f: impl Fn(f64, f64) -> f64,
) -> f64 {
    let curve = &geom.curve;
    (0..curve.num_elements())
        .map(|e| {
            let (a, b) = curve.element_nodes(e);
            let l = geom.elements.length[e];
            l * quad
                .points()
                .iter()
                .map(|&(xi, w)| {
                    w * f(
                        lerp(geom.x1(a), geom.x1(b), xi),
                        lerp(field[a], field[b], xi),
                    )
                })
                .sum::<f64>()
        })
        .sum()
}

/// Area-difference term of the mean-curvature schemes,
/// `2 pi (x1 kappa_s, |X_rho|) - m0`, lumped or exactly integrated.
pub fn ade_kappa_s(geom: &Geometry, kappa_s: &[f64], m0: f64, quad: Quadrature) -> f64 {
    2.0 * PI * integrate_x1_field(geom, kappa_s, quad, |x1, k| x1 * k) - m0
}

/// Boundary contributions shared by both energies: the Gaussian-curvature
/// term carried by the conormals and the line energy of free boundaries.
fn boundary_energy(
    x_next: &GeneratingCurve,
    conormals: &[(usize, Vec2)],
    params: &ModelParams,
) -> f64 {
    let gauss: f64 = conormals.iter().map(|(_, m)| m.x).sum();
    let line: f64 = x_next
        .endpoints()
        .into_iter()
        .filter(|&i| {
            x_next
                .boundary_class(i)
                .is_some_and(|c| c.carries_line_energy())
        })
        .map(|i| x_next.nodes()[i].x)
        .sum();
    -2.0 * PI * params.alpha_g * gauss + 2.0 * PI * params.sigma * line
}

/// Discrete energy of the curvature scheme.  Geometry-dependent weights are
/// taken from `geom` (the old time level), the curvature from `kappa`, and
/// the boundary terms from `x_next` and `conormals`.  Passing the same time
/// level everywhere gives the energy of a single state.
pub fn energy_kappa(
    geom: &Geometry,
    kappa: &[f64],
    x_next: &GeneratingCurve,
    conormals: &[(usize, Vec2)],
    params: &ModelParams,
) -> Result<f64> {
    let proxy = curvature_proxy(geom, kappa)?;
    let w = &geom.vertices.weight;
    let bulk: f64 = (0..geom.curve.num_nodes())
        .map(|i| {
            let d = proxy.values[i] - params.kbar;
            w[i] * geom.x1(i) * (params.alpha * d * d + 2.0 * params.lambda)
        })
        .sum();
    let ade = ade_kappa(geom, kappa, params.m0);
    Ok(PI * bulk + 0.5 * params.beta * ade * ade + boundary_energy(x_next, conormals, params))
}

/// Discrete energy of the mean-curvature schemes, with the same time-level
/// conventions as [`energy_kappa`].
pub fn energy_kappa_s(
    geom: &Geometry,
    kappa_s: &[f64],
    x_next: &GeneratingCurve,
    conormals: &[(usize, Vec2)],
    params: &ModelParams,
    quad: Quadrature,
) -> f64 {
    let bulk = integrate_x1_field(geom, kappa_s, quad, |x1, k| {
        let d = k - params.kbar;
        x1 * (params.alpha * d * d + 2.0 * params.lambda)
    });
    let ade = ade_kappa_s(geom, kappa_s, params.m0, quad);
    PI * bulk + 0.5 * params.beta * ade * ade + boundary_energy(x_next, conormals, params)
}

/// Surface area of the revolved polygon, `2 pi ∫ x1 ds` (exact).
pub fn surface_area(curve: &GeneratingCurve) -> f64 {
    let nodes = curve.nodes();
    PI * (0..curve.num_elements())
        .map(|e| {
            let (a, b) = curve.element_nodes(e);
            (nodes[b] - nodes[a]).norm() * (nodes[a].x + nodes[b].x)
        })
        .sum::<f64>()
}

/// Gradient of [`surface_area`] with respect to the node positions.
pub fn surface_area_gradient(curve: &GeneratingCurve) -> Vec<Vec2> {
    let nodes = curve.nodes();
    let mut g = vec![Vec2::zeros(); nodes.len()];
    for e in 0..curve.num_elements() {
        let (a, b) = curve.element_nodes(e);
        let d = nodes[b] - nodes[a];
        let l = d.norm();
        let t = d / l;
        let s = nodes[a].x + nodes[b].x;
        g[a] += PI * (-t * s + Vec2::new(l, 0.0));
        g[b] += PI * (t * s + Vec2::new(l, 0.0));
    }
    g
}

/// Volume enclosed by the revolved surface, `-pi ∫ x1^2 dx2` (exact).
/// Positive when the normal `nu` points outwards, i.e. for clockwise
/// profiles.
pub fn enclosed_volume(curve: &GeneratingCurve) -> Result<f64> {
    if !curve.is_closed_surface() {
        return Err(Error::NotClosed);
    }
    let nodes = curve.nodes();
    Ok(-PI / 3.0
        * (0..curve.num_elements())
            .map(|e| {
                let (a, b) = curve.element_nodes(e);
                let (p, q) = (nodes[a], nodes[b]);
                (q.y - p.y) * (p.x * p.x + p.x * q.x + q.x * q.x)
            })
            .sum::<f64>())
}

/// Gradient of [`enclosed_volume`] with respect to the node positions.
pub fn enclosed_volume_gradient(curve: &GeneratingCurve) -> Result<Vec<Vec2>> {
    if !curve.is_closed_surface() {
        return Err(Error::NotClosed);
    }
    let nodes = curve.nodes();
    let mut g = vec![Vec2::zeros(); nodes.len()];
    for e in 0..curve.num_elements() {
        let (a, b) = curve.element_nodes(e);
        let (p, q) = (nodes[a], nodes[b]);
        let dy = q.y - p.y;
        let s = p.x * p.x + p.x * q.x + q.x * q.x;
        g[a] += -PI / 3.0 * Vec2::new(dy * (2.0 * p.x + q.x), -s);
        g[b] += -PI / 3.0 * Vec2::new(dy * (p.x + 2.0 * q.x), s);
    }
    Ok(g)
}

/// Ratio of the longest to the shortest element.
pub fn mesh_ratio(curve: &GeneratingCurve) -> f64 {
    let nodes = curve.nodes();
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for e in 0..curve.num_elements() {
        let (a, b) = curve.element_nodes(e);
        let l = (nodes[b] - nodes[a]).norm();
        lo = lo.min(l);
        hi = hi.max(l);
    }
    hi / lo
}

/// Mass-lumped length of the curve in the hyperbolic half-plane,
/// `(1 / x1, |X_rho|)^h`.
pub fn hyperbolic_length(geom: &Geometry) -> Result<f64> {
    let mut sum = 0.0;
    for (i, w) in geom.vertices.weight.iter().enumerate() {
        let x1 = geom.x1(i);
        if !(x1 > 0.0) {
            return Err(Error::AxisContact { vertex: i });
        }
        sum += w / x1;
    }
    Ok(sum)
}

/// Turning number of a closed polygon together with the distance of the
/// unrounded winding to the nearest integer.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TurningNumber {
    pub value: i64,
    /// `|raw - value|`; above [`TURNING_TOLERANCE`] the polygon is too
    /// irregular for the rounding to be trusted.
    pub residue: f64,
}

/// Rounding tolerance for [`turning_number`].
pub const TURNING_TOLERANCE: f64 = 1e-6;

impl TurningNumber {
    /// Whether the unrounded value was within [`TURNING_TOLERANCE`] of an
    /// integer.
    pub fn is_clean(&self) -> bool {
        self.residue <= TURNING_TOLERANCE
    }
}

/// Winding number of the tangent: the sum of the signed exterior angles
/// divided by `2 pi`.  Counterclockwise convex polygons give `+1`.
pub fn turning_number(curve: &GeneratingCurve) -> Result<TurningNumber> {
    if !curve.is_periodic() {
        return Err(Error::NotPeriodic);
    }
    let nodes = curve.nodes();
    let n = nodes.len();
    let mut total = 0.0;
    for i in 0..n {
        let t0 = nodes[i] - nodes[(i + n - 1) % n];
        let t1 = nodes[(i + 1) % n] - nodes[i];
        total += (t0.x * t1.y - t0.y * t1.x).atan2(t0.dot(&t1));
    }
    let raw = total / (2.0 * PI);
    let value = raw.round();
    Ok(TurningNumber {
        value: value as i64,
        residue: (raw - value).abs(),
    })
}

/// Angle in degrees between each element touching the axis and the
/// horizontal; zero means the surface meets the axis orthogonally.
pub fn axis_contact_angles(curve: &GeneratingCurve) -> Vec<(usize, f64)> {
    let nodes = curve.nodes();
    curve
        .endpoints()
        .into_iter()
        .filter(|&i| curve.boundary_class(i) == Some(BoundaryClass::Axis))
        .map(|i| {
            let j = if i == 0 { 1 } else { i - 1 };
            let d = nodes[j] - nodes[i];
            (i, d.y.abs().atan2(d.x.abs()).to_degrees())
        })
        .collect()
}

/// Per-step record written to the diagnostics file.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Diagnostics {
    pub step: usize,
    pub time: f64,
    pub energy: f64,
    pub ratio: f64,
    pub area: f64,
    /// Only for closed surfaces.
    pub volume: Option<f64>,
    /// Only when no vertex touches the axis.
    pub hyp_length: Option<f64>,
    /// Only for periodic curves.
    pub turning: Option<i64>,
    pub ade: f64,
    #[serde(rename = "lambda_A")]
    pub lambda_a: f64,
    #[serde(rename = "lambda_V")]
    pub lambda_v: f64,
    pub newton_iters: usize,
}

/// Geometric part of a diagnostics record (everything that depends on the
/// curve alone).
#[derive(Clone, Debug, PartialEq)]
pub struct ShapeMeasures {
    pub ratio: f64,
    pub area: f64,
    pub volume: Option<f64>,
    pub hyp_length: Option<f64>,
    pub turning: Option<TurningNumber>,
}

/// Evaluates the curve-only diagnostics.
pub fn shape_measures(geom: &Geometry) -> ShapeMeasures {
    let curve = &geom.curve;
    ShapeMeasures {
        ratio: mesh_ratio(curve),
        area: surface_area(curve),
        volume: enclosed_volume(curve).ok(),
        hyp_length: hyperbolic_length(geom).ok(),
        turning: turning_number(curve).ok(),
    }
}

/// Integral `∫ x1 f g ds` of the product of two hat functions weighted by
/// the radial coordinate, for the element with end radii `x1a`, `x1b`.
/// Returns the 2x2 local matrix.
#[cfg(test)]
pub(crate) fn weighted_mass(x1a: f64, x1b: f64, len: f64, quad: Quadrature) -> [[f64; 2]; 2] {
    let mut m = [[0.0; 2]; 2];
    for &(xi, w) in quad.points() {
        let phi = crate::quadrature::hats(xi);
        let x1 = lerp(x1a, x1b, xi);
        for r in 0..2 {
            for c in 0..2 {
                m[r][c] += len * w * x1 * phi[r] * phi[c];
            }
        }
    }
    m
}
