//! Polygonal generating curves and their discrete geometry.
//!
//! A [`GeneratingCurve`] is a polygon in the half-plane `x1 >= 0`; rotating
//! it about the `x2`-axis produces the axisymmetric surface.  The curve is
//! parameterized over the unit interval with uniformly spaced nodes
//! `q_j = j / J`, so every derivative with respect to the parameter is a
//! nodal difference times `J`.  All formulas below are written in terms of
//! chord lengths instead, which is the same thing after the factors of `J`
//! cancel.
//!
//! Orientation conventions:
//!
//! * the rotated vector of `(a, b)` is `perp((a, b)) = (b, -a)`;
//! * the element normal is `nu = -perp(tau)`, i.e. `tau = (a, b)` gives
//!   `nu = (-b, a)`;
//! * closed genus-0 profiles are traversed clockwise (top to bottom along
//!   the right half-plane) so that `nu` is the outer normal of the surface.
//!   [`signed_area`] tells the two orientations apart.

use nalgebra::{Matrix2, Vector2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point or vector in the meridian half-plane.
pub type Vec2 = Vector2<f64>;

/// 2x2 matrix used for the vertex projections.
pub type Mat2 = Matrix2<f64>;

/// Clockwise rotation by a right angle: `(a, b) -> (b, -a)`.
#[inline]
pub fn perp(v: Vec2) -> Vec2 {
    Vec2::new(v.y, -v.x)
}

/// First unit vector (radial direction).
#[inline]
pub fn e1() -> Vec2 {
    Vec2::new(1.0, 0.0)
}

/// Second unit vector (direction of the rotation axis).
#[inline]
pub fn e2() -> Vec2 {
    Vec2::new(0.0, 1.0)
}

/// Boundary condition attached to an endpoint of an open generating curve.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryClass {
    /// The endpoint sits on the rotation axis (`x1 = 0`); the surface is
    /// closed there.
    Axis,
    /// Position and conormal are prescribed.  The conormal direction is
    /// `(sin angle, cos angle)`, where `angle` is the contact angle with the
    /// `x1`-axis.
    Clamped { angle: f64 },
    /// Position prescribed, natural curvature condition.
    Navier,
    /// The endpoint may only move vertically (stays on a cylinder).
    Semifree1,
    /// The endpoint may only move radially (stays in a horizontal plane).
    Semifree2,
    /// No positional constraint.
    Free,
}

impl BoundaryClass {
    /// Prescribed conormal of a clamped endpoint.
    pub fn clamp_direction(&self) -> Option<Vec2> {
        match *self {
            BoundaryClass::Clamped { angle } => Some(Vec2::new(angle.sin(), angle.cos())),
            _ => None,
        }
    }

    /// Endpoints where the conormal is an unknown of the schemes (Navier,
    /// semifree and free endpoints).
    pub fn has_free_conormal(&self) -> bool {
        matches!(
            self,
            BoundaryClass::Navier
                | BoundaryClass::Semifree1
                | BoundaryClass::Semifree2
                | BoundaryClass::Free
        )
    }

    /// Endpoints that carry a line-energy contribution (free endpoints and
    /// endpoints sliding in a horizontal plane).
    pub fn carries_line_energy(&self) -> bool {
        matches!(self, BoundaryClass::Semifree2 | BoundaryClass::Free)
    }

    /// Whether the given displacement component (0 = radial, 1 = axial) is
    /// held fixed at an endpoint of this class.
    pub fn fixes_position_component(&self, component: usize) -> bool {
        match self {
            BoundaryClass::Axis => component == 0,
            BoundaryClass::Clamped { .. } | BoundaryClass::Navier => true,
            BoundaryClass::Semifree1 => component == 0,
            BoundaryClass::Semifree2 => component == 1,
            BoundaryClass::Free => false,
        }
    }
}

/// Global topology of the generating curve.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Topology {
    /// Closed curve not touching the axis: the surface is a torus-like
    /// surface of genus one.
    Periodic,
    /// Open curve with a boundary class at each end.
    Interval {
        start: BoundaryClass,
        end: BoundaryClass,
    },
}

/// Polygonal generating curve.
///
/// For an interval curve with `J` elements there are `J + 1` nodes; for a
/// periodic curve there are `J` nodes and the last element joins node
/// `J - 1` back to node `0`.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneratingCurve {
    nodes: Vec<Vec2>,
    topology: Topology,
}

impl GeneratingCurve {
    /// Builds a curve from its nodes.  Only structural properties are
    /// checked here; geometric admissibility is reported by [`validate`].
    pub fn new(nodes: Vec<Vec2>, topology: Topology) -> Result<Self> {
        let min = match topology {
            Topology::Periodic => 3,
            Topology::Interval { .. } => 2,
        };
        if nodes.len() < min {
            return Err(Error::InvalidCurve(format!(
                "need at least {min} nodes, got {}",
                nodes.len()
            )));
        }
        if let Some(i) = nodes
            .iter()
            .position(|p| !(p.x.is_finite() && p.y.is_finite()))
        {
            return Err(Error::InvalidCurve(format!("node {i} is not finite")));
        }
        Ok(Self { nodes, topology })
    }

    /// Node positions.
    pub fn nodes(&self) -> &[Vec2] {
        &self.nodes
    }

    /// Topology and boundary classification.
    pub fn topology(&self) -> Topology {
        self.topology
    }

    /// Whether the curve is closed without endpoints.
    pub fn is_periodic(&self) -> bool {
        matches!(self.topology, Topology::Periodic)
    }

    /// Number of nodes.
    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    /// Number of elements `J`.
    pub fn num_elements(&self) -> usize {
        match self.topology {
            Topology::Periodic => self.nodes.len(),
            Topology::Interval { .. } => self.nodes.len() - 1,
        }
    }

    /// Node indices `(a, b)` of element `e`, oriented along the curve.
    #[inline]
    pub fn element_nodes(&self, e: usize) -> (usize, usize) {
        let n = self.nodes.len();
        (e, if e + 1 == n { 0 } else { e + 1 })
    }

    /// Elements to the left and right of node `i` (`None` past an endpoint).
    #[inline]
    pub fn node_elements(&self, i: usize) -> (Option<usize>, Option<usize>) {
        let j = self.num_elements();
        match self.topology {
            Topology::Periodic => (Some(if i == 0 { j - 1 } else { i - 1 }), Some(i)),
            Topology::Interval { .. } => (
                if i == 0 { None } else { Some(i - 1) },
                if i == j { None } else { Some(i) },
            ),
        }
    }

    /// Boundary class of node `i`, or `None` for interior nodes.
    pub fn boundary_class(&self, i: usize) -> Option<BoundaryClass> {
        match self.topology {
            Topology::Periodic => None,
            Topology::Interval { start, end } => {
                if i == 0 {
                    Some(start)
                } else if i + 1 == self.nodes.len() {
                    Some(end)
                } else {
                    None
                }
            }
        }
    }

    /// Whether node `i` is an axis endpoint.
    pub fn is_axis_node(&self, i: usize) -> bool {
        self.boundary_class(i) == Some(BoundaryClass::Axis)
    }

    /// Indices of the endpoints (empty for periodic curves).
    pub fn endpoints(&self) -> Vec<usize> {
        match self.topology {
            Topology::Periodic => Vec::new(),
            Topology::Interval { .. } => vec![0, self.nodes.len() - 1],
        }
    }

    /// Whether the revolved surface is closed: periodic curves and curves
    /// with both endpoints on the axis.
    pub fn is_closed_surface(&self) -> bool {
        match self.topology {
            Topology::Periodic => true,
            Topology::Interval { start, end } => {
                start == BoundaryClass::Axis && end == BoundaryClass::Axis
            }
        }
    }

    /// Returns a copy with the node positions replaced (same topology).
    pub fn with_nodes(&self, nodes: Vec<Vec2>) -> Result<Self> {
        if nodes.len() != self.nodes.len() {
            return Err(Error::DimensionMismatch {
                expected: self.nodes.len(),
                found: nodes.len(),
            });
        }
        Self::new(nodes, self.topology)
    }

    /// Returns a copy with a different boundary classification.
    pub fn with_topology(&self, topology: Topology) -> Result<Self> {
        Self::new(self.nodes.clone(), topology)
    }
}

/// Per-element tangent, normal and chord length.
#[derive(Clone, Debug, PartialEq)]
pub struct ElementFrames {
    pub tangent: Vec<Vec2>,
    pub normal: Vec<Vec2>,
    pub length: Vec<f64>,
}

/// Computes the element frames of a curve.
pub fn element_frames(curve: &GeneratingCurve) -> Result<ElementFrames> {
    let j = curve.num_elements();
    let mut tangent = Vec::with_capacity(j);
    let mut normal = Vec::with_capacity(j);
    let mut length = Vec::with_capacity(j);
    let nodes = curve.nodes();
    for e in 0..j {
        let (a, b) = curve.element_nodes(e);
        let d = nodes[b] - nodes[a];
        let l = d.norm();
        if !(l > 0.0) {
            return Err(Error::DegenerateElement {
                element: e,
                length: l,
            });
        }
        let t = d / l;
        tangent.push(t);
        normal.push(-perp(t));
        length.push(l);
    }
    Ok(ElementFrames {
        tangent,
        normal,
        length,
    })
}

/// Per-vertex averaged normal `omega`, its normalization `v`, the velocity
/// projection and the lumped mass weight.
#[derive(Clone, Debug, PartialEq)]
pub struct VertexFrames {
    /// Length-weighted average of the adjacent element normals.
    pub omega: Vec<Vec2>,
    /// `omega / |omega|`.
    pub unit_normal: Vec<Vec2>,
    /// Identity at endpoints away from the axis, `v v^T` elsewhere.
    pub projection: Vec<Mat2>,
    /// Lumped mass: half the summed lengths of the adjacent elements.
    pub weight: Vec<f64>,
}

/// Lumped mass weights `(L_left + L_right) / 2` per vertex.
pub fn lumped_weights(curve: &GeneratingCurve, frames: &ElementFrames) -> Vec<f64> {
    (0..curve.num_nodes())
        .map(|i| {
            let (l, r) = curve.node_elements(i);
            0.5 * (l.map_or(0.0, |e| frames.length[e]) + r.map_or(0.0, |e| frames.length[e]))
        })
        .collect()
}

/// Computes the vertex frames.  Interior vertices use
/// `omega_j = -perp(X_{j+1} - X_{j-1}) / (L_j + L_{j+1})`; endpoints take
/// the normal of their only element.
pub fn vertex_frames(curve: &GeneratingCurve, frames: &ElementFrames) -> Result<VertexFrames> {
    let n = curve.num_nodes();
    let weight = lumped_weights(curve, frames);
    let mut omega = Vec::with_capacity(n);
    let mut unit_normal = Vec::with_capacity(n);
    let mut projection = Vec::with_capacity(n);
    for i in 0..n {
        let (l, r) = curve.node_elements(i);
        let w = match (l, r) {
            (Some(l), Some(r)) => {
                (frames.length[l] * frames.normal[l] + frames.length[r] * frames.normal[r])
                    / (frames.length[l] + frames.length[r])
            }
            (Some(e), None) | (None, Some(e)) => frames.normal[e],
            (None, None) => unreachable!("every node touches an element"),
        };
        let norm = w.norm();
        if !(norm > 0.0) {
            return Err(Error::ZeroAveragedNormal { vertex: i });
        }
        let v = w / norm;
        let p = match curve.boundary_class(i) {
            Some(c) if c != BoundaryClass::Axis => Mat2::identity(),
            _ => v * v.transpose(),
        };
        omega.push(w);
        unit_normal.push(v);
        projection.push(p);
    }
    Ok(VertexFrames {
        omega,
        unit_normal,
        projection,
        weight,
    })
}

/// A curve together with all of its element and vertex quantities.
#[derive(Clone, Debug)]
pub struct Geometry {
    pub curve: GeneratingCurve,
    pub elements: ElementFrames,
    pub vertices: VertexFrames,
}

impl Geometry {
    /// Computes element and vertex frames of `curve`.
    pub fn new(curve: &GeneratingCurve) -> Result<Self> {
        let elements = element_frames(curve)?;
        let vertices = vertex_frames(curve, &elements)?;
        Ok(Self {
            curve: curve.clone(),
            elements,
            vertices,
        })
    }

    /// Radial coordinate of node `i`.
    #[inline]
    pub fn x1(&self, i: usize) -> f64 {
        self.curve.nodes()[i].x
    }

    /// Total length of the curve.
    pub fn length(&self) -> f64 {
        self.elements.length.iter().sum()
    }
}

/// One-sided nodal values `(limit from the left, limit from the right)`.
pub type TwoSided = (f64, f64);

/// Wraps continuous nodal values as equal one-sided pairs.
pub fn continuous(values: &[f64]) -> Vec<TwoSided> {
    values.iter().map(|&v| (v, v)).collect()
}

/// Mass-lumped inner product `(f, g |X_rho|)^h`: on each element the
/// trapezoidal rule applied to the one-sided values of `f g` at its two
/// end nodes, weighted by the chord length.
pub fn lumped_inner(
    curve: &GeneratingCurve,
    f: &[TwoSided],
    g: &[TwoSided],
    frames: &ElementFrames,
) -> f64 {
    debug_assert_eq!(f.len(), curve.num_nodes());
    debug_assert_eq!(g.len(), curve.num_nodes());
    (0..curve.num_elements())
        .map(|e| {
            let (a, b) = curve.element_nodes(e);
            0.5 * frames.length[e] * (f[a].1 * g[a].1 + f[b].0 * g[b].0)
        })
        .sum()
}

/// Outcome of [`validate`]; every flag is `true` when the property holds.
#[derive(Clone, Debug, PartialEq)]
pub struct ValidationReport {
    /// `x1 > 0` at every node that is not an axis endpoint.
    pub positive_off_axis: bool,
    /// `x1 == 0` exactly at axis endpoints.
    pub axis_exact: bool,
    /// Consecutive nodes are distinct.
    pub elements_nondegenerate: bool,
    /// Next-nearest nodes are distinct (averaged normals are defined).
    pub next_nearest_distinct: bool,
    /// Dimension of the span of the interior unit normals.
    pub normal_span_dimension: usize,
    /// All nodes are collinear.
    pub straight_line: bool,
    /// Human-readable description of every failed check.
    pub problems: Vec<String>,
}

impl ValidationReport {
    /// Whether the curve is admissible for the schemes.
    pub fn is_valid(&self) -> bool {
        self.positive_off_axis
            && self.axis_exact
            && self.elements_nondegenerate
            && self.next_nearest_distinct
            && self.normal_span_dimension == 2
    }
}

/// Reports which admissibility conditions hold for `curve`.
pub fn validate(curve: &GeneratingCurve) -> ValidationReport {
    let nodes = curve.nodes();
    let n = nodes.len();
    let mut problems = Vec::new();

    let mut positive_off_axis = true;
    let mut axis_exact = true;
    for (i, p) in nodes.iter().enumerate() {
        if curve.is_axis_node(i) {
            if p.x != 0.0 {
                axis_exact = false;
                problems.push(format!("axis node {i} has x1 = {:e}", p.x));
            }
        } else if !(p.x > 0.0) {
            positive_off_axis = false;
            problems.push(format!("node {i} has x1 = {:e} <= 0", p.x));
        }
    }

    let mut elements_nondegenerate = true;
    for e in 0..curve.num_elements() {
        let (a, b) = curve.element_nodes(e);
        if nodes[a] == nodes[b] {
            elements_nondegenerate = false;
            problems.push(format!("element {e} has coincident nodes"));
        }
    }

    let mut next_nearest_distinct = true;
    for i in 0..n {
        if let (Some(l), Some(r)) = curve.node_elements(i) {
            let (prev, _) = curve.element_nodes(l);
            let (_, next) = curve.element_nodes(r);
            if nodes[prev] == nodes[next] {
                next_nearest_distinct = false;
                problems.push(format!("neighbours of node {i} coincide"));
            }
        }
    }

    let straight_line = {
        let p0 = nodes[0];
        let far = nodes
            .iter()
            .map(|p| p - p0)
            .max_by(|a, b| a.norm().total_cmp(&b.norm()))
            .unwrap_or_else(Vec2::zeros);
        let scale = far.norm();
        scale > 0.0
            && nodes.iter().all(|p| {
                let d = p - p0;
                (far.x * d.y - far.y * d.x).abs() <= 1e-12 * scale * scale
            })
    };

    let normal_span_dimension = if elements_nondegenerate && next_nearest_distinct {
        match element_frames(curve).and_then(|f| vertex_frames(curve, &f)) {
            Ok(vf) => {
                let interior: Vec<Vec2> = (0..n)
                    .filter(|&i| curve.boundary_class(i).is_none())
                    .map(|i| vf.unit_normal[i])
                    .collect();
                span_dimension(&interior)
            }
            Err(_) => 0,
        }
    } else {
        0
    };
    if normal_span_dimension < 2 {
        problems.push(format!(
            "interior unit normals span a space of dimension {normal_span_dimension} < 2"
        ));
    }
    if straight_line {
        problems.push("curve is a straight line".to_string());
    }

    ValidationReport {
        positive_off_axis,
        axis_exact,
        elements_nondegenerate,
        next_nearest_distinct,
        normal_span_dimension,
        straight_line,
        problems,
    }
}

fn span_dimension(vectors: &[Vec2]) -> usize {
    let Some(first) = vectors.iter().find(|v| v.norm() > 0.0) else {
        return 0;
    };
    let independent = vectors
        .iter()
        .any(|v| (first.x * v.y - first.y * v.x).abs() > 1e-12 * first.norm() * v.norm());
    if independent {
        2
    } else {
        1
    }
}

/// Signed area enclosed by the curve in the meridian plane; open curves
/// are closed by the straight segment from the last node back to the first
/// (for axis-to-axis curves this is the axis itself).  Positive values mean
/// counterclockwise orientation, so closed genus-0 profiles in the standard
/// outward-normal orientation give negative values.
pub fn signed_area(curve: &GeneratingCurve) -> f64 {
    let nodes = curve.nodes();
    let n = nodes.len();
    0.5 * (0..n)
        .map(|i| {
            let a = nodes[i];
            let b = nodes[(i + 1) % n];
            a.x * b.y - b.x * a.y
        })
        .sum::<f64>()
}

/// First variations of the element quantities of element `e` in the
/// direction of the nodal field `chi` (one vector per node).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ElementVariation {
    /// `tau . dchi`, with `dchi` the difference of `chi` over the element.
    pub length: f64,
    /// `(dchi . nu) nu / L`.
    pub tangent: Vec2,
    /// `-(dchi . nu) tau / L`.
    pub normal: Vec2,
    /// Variation of `L nu`: `-perp(dchi)`.
    pub scaled_normal: Vec2,
}

/// Evaluates the [`ElementVariation`] of element `e`.
pub fn element_variation(
    curve: &GeneratingCurve,
    frames: &ElementFrames,
    e: usize,
    chi: &[Vec2],
) -> ElementVariation {
    let (a, b) = curve.element_nodes(e);
    let d = chi[b] - chi[a];
    let (t, n, l) = (frames.tangent[e], frames.normal[e], frames.length[e]);
    ElementVariation {
        length: t.dot(&d),
        tangent: d.dot(&n) * n / l,
        normal: -d.dot(&n) * t / l,
        scaled_normal: -perp(d),
    }
}

/// First variation of the averaged normal at vertex `i` in the direction
/// `chi`: at interior vertices `omega = sum(L nu) / sum(L)`, whose
/// variation is `(sum(-perp(dchi)) - omega sum(tau . dchi)) / sum(L)`; at
/// endpoints it is the variation of the adjacent element normal.
pub fn omega_variation(
    curve: &GeneratingCurve,
    frames: &ElementFrames,
    vertices: &VertexFrames,
    i: usize,
    chi: &[Vec2],
) -> Vec2 {
    match curve.node_elements(i) {
        (Some(l), Some(r)) => {
            let (vl, vr) = (
                element_variation(curve, frames, l, chi),
                element_variation(curve, frames, r, chi),
            );
            let total = frames.length[l] + frames.length[r];
            (vl.scaled_normal + vr.scaled_normal - vertices.omega[i] * (vl.length + vr.length))
                / total
        }
        (Some(e), None) | (None, Some(e)) => element_variation(curve, frames, e, chi).normal,
        (None, None) => unreachable!("every node touches an element"),
    }
}
