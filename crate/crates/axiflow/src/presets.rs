//! Initial generating curves for the standard experiments.
//!
//! Each preset is a documented parametric family.  Smooth parametric shapes
//! are sampled densely and redistributed to equal arclength, so that the
//! initial mesh ratio is close to one; the perturbed semicircle is the
//! deliberate exception, as its purpose is a non-uniform initial mesh.
//!
//! Closed genus-0 profiles run clockwise from the top axis point to the
//! bottom one, so that the element normals point out of the enclosed
//! volume.  Open profiles with both ends off the axis run left to right
//! (or top to bottom when vertical), which makes the normal of a straight
//! profile point up (or to the right).

use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{BoundaryClass, GeneratingCurve, Topology, Vec2};

/// Which side of the unit circle the small circle of [`Preset::TwoCircles`]
/// touches.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
}

/// Parametric initial curves.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Preset {
    /// Unit semicircle from `(0, 1)` to `(0, -1)` with the node angles
    /// `(1/2 - q) pi + 0.1 cos((1/2 - q) pi)`, `q = j / J`.
    PerturbedSemicircle { elements: usize },
    /// Regular polygon inscribed in a circle (periodic).
    Circle {
        elements: usize,
        center: [f64; 2],
        radius: f64,
        #[serde(default = "default_true")]
        clockwise: bool,
    },
    /// Vertical stadium (two half circles joined by straight sides),
    /// periodic: the elongated profile of a thin torus.
    Cigar {
        elements: usize,
        #[serde(default = "cigar_center")]
        center: [f64; 2],
        #[serde(default = "cigar_width")]
        width: f64,
        #[serde(default = "cigar_height")]
        height: f64,
    },
    /// Unit circle centred at `sqrt(2) e1` traversed once, followed by a
    /// circle of radius `small_radius` touching it from the inside on the
    /// given side.  Right: counterclockwise, turning number +2; left:
    /// clockwise, turning number -2.
    TwoCircles {
        elements: usize,
        side: Side,
        #[serde(default = "two_circle_radius")]
        small_radius: f64,
    },
    /// Figure-eight curve
    /// `x1 = c + a cos t`, `x2 = b sin t cos t (1 - skew cos t)`:
    /// with `skew > 0` the lobe closer to the axis is the larger one.
    /// `flip` rotates the curve by 180 degrees about `(c, 0)`.
    Lemniscate {
        elements: usize,
        #[serde(default = "lem_c")]
        center: f64,
        #[serde(default = "lem_a")]
        half_width: f64,
        #[serde(default = "lem_b")]
        height: f64,
        #[serde(default = "lem_skew")]
        skew: f64,
        #[serde(default)]
        flip: bool,
    },
    /// Axis-to-axis profile of a flat disc of diameter `width` and thickness
    /// `thickness`: horizontal sides capped by a half circle of radius
    /// `thickness / 2`.
    FlatDisc {
        elements: usize,
        #[serde(default = "disc_width")]
        width: f64,
        #[serde(default = "disc_thickness")]
        thickness: f64,
    },
    /// Spherical cap: arc of the circle of radius `radius` about the origin
    /// from the top axis point `(0, radius)`, clockwise through the polar
    /// angle `angle`, so that the normal is the outer normal of the sphere.
    /// The conormal at the end makes the angle `pi / 2 + angle` with the
    /// `x1`-axis.  The start is an axis endpoint; the end class is chosen by
    /// the run configuration (Navier by default).
    SphericalCap {
        elements: usize,
        #[serde(default = "one")]
        radius: f64,
        #[serde(default = "half_pi")]
        angle: f64,
    },
    /// Vertical segment `x1 = radius`, `x2` from `height / 2` down to
    /// `-height / 2` (an open cylinder).
    OpenCylinder {
        elements: usize,
        #[serde(default = "one")]
        radius: f64,
        #[serde(default = "two")]
        height: f64,
    },
    /// Cut cylinder with a neck: `x1 = radius (1 - depth cos^2(pi s / 2))`,
    /// `x2 = s`, `s` from 1 down to -1.
    Dumbbell {
        elements: usize,
        #[serde(default = "one")]
        radius: f64,
        #[serde(default = "half")]
        depth: f64,
    },
    /// Upper part of the circle of radius `radius` about `(center, 0)`,
    /// traversed clockwise from the polar angle `start_angle` down to 0.
    /// The conormal at the start makes the angle `2 pi - start_angle` with
    /// the `x1`-axis.
    TorusCap {
        elements: usize,
        #[serde(default = "two")]
        center: f64,
        #[serde(default = "one")]
        radius: f64,
        #[serde(default = "pi")]
        start_angle: f64,
    },
    /// Straight segment with equally spaced nodes.
    Segment {
        elements: usize,
        from: [f64; 2],
        to: [f64; 2],
    },
}

fn default_true() -> bool {
    true
}
fn cigar_center() -> [f64; 2] {
    [3.0, 0.0]
}
fn cigar_width() -> f64 {
    0.5
}
fn cigar_height() -> f64 {
    4.0
}
fn two_circle_radius() -> f64 {
    0.1
}
fn lem_c() -> f64 {
    1.5
}
fn lem_a() -> f64 {
    1.0
}
fn lem_b() -> f64 {
    1.2
}
fn lem_skew() -> f64 {
    0.3
}
fn disc_width() -> f64 {
    5.0
}
fn disc_thickness() -> f64 {
    1.0
}
fn one() -> f64 {
    1.0
}
fn two() -> f64 {
    2.0
}
fn half() -> f64 {
    0.5
}
fn pi() -> f64 {
    PI
}
fn half_pi() -> f64 {
    0.5 * PI
}

/// Names of all presets with a one-line description.
pub const PRESET_LIST: &[(&str, &str)] = &[
    (
        "perturbed_semicircle",
        "unit semicircle with non-uniform nodes (axis to axis)",
    ),
    ("circle", "regular polygon on a circle (periodic)"),
    (
        "cigar",
        "vertical stadium profile of a thin torus (periodic)",
    ),
    (
        "two_circles",
        "unit circle plus an inscribed small circle, turning number +-2 (periodic)",
    ),
    (
        "lemniscate",
        "figure-eight profile, turning number 0 (periodic)",
    ),
    (
        "flat_disc",
        "flat disc of diameter 5 and thickness 1 (axis to axis)",
    ),
    (
        "spherical_cap",
        "spherical cap starting on the axis (one boundary curve)",
    ),
    (
        "open_cylinder",
        "straight vertical segment (two boundary curves)",
    ),
    ("dumbbell", "cut cylinder with a neck (two boundary curves)"),
    (
        "torus_cap",
        "upper half of a torus tube (two boundary curves)",
    ),
    (
        "segment",
        "straight segment between two points (two boundary curves)",
    ),
];

impl Preset {
    /// Number of elements requested.
    pub fn elements(&self) -> usize {
        match *self {
            Preset::PerturbedSemicircle { elements }
            | Preset::Circle { elements, .. }
            | Preset::Cigar { elements, .. }
            | Preset::TwoCircles { elements, .. }
            | Preset::Lemniscate { elements, .. }
            | Preset::FlatDisc { elements, .. }
            | Preset::SphericalCap { elements, .. }
            | Preset::OpenCylinder { elements, .. }
            | Preset::Dumbbell { elements, .. }
            | Preset::TorusCap { elements, .. }
            | Preset::Segment { elements, .. } => elements,
        }
    }

    /// Default topology: periodic, axis to axis, axis to Navier (caps) or
    /// Navier at both ends (open profiles).
    pub fn default_topology(&self) -> Topology {
        use BoundaryClass::*;
        match self {
            Preset::Circle { .. }
            | Preset::Cigar { .. }
            | Preset::TwoCircles { .. }
            | Preset::Lemniscate { .. } => Topology::Periodic,
            Preset::PerturbedSemicircle { .. } | Preset::FlatDisc { .. } => Topology::Interval {
                start: Axis,
                end: Axis,
            },
            Preset::SphericalCap { .. } => Topology::Interval {
                start: Axis,
                end: Navier,
            },
            Preset::OpenCylinder { .. }
            | Preset::Dumbbell { .. }
            | Preset::TorusCap { .. }
            | Preset::Segment { .. } => Topology::Interval {
                start: Navier,
                end: Navier,
            },
        }
    }
}

/// Builds the curve of `preset` with its default topology.
pub fn make_preset(preset: &Preset) -> Result<GeneratingCurve> {
    make_preset_with(preset, None)
}

/// Builds the curve of `preset`, replacing the boundary classes of an open
/// profile when `ends` is given.  Axis classes cannot be added to or
/// removed from a preset, since they are tied to the geometry.
pub fn make_preset_with(
    preset: &Preset,
    ends: Option<(BoundaryClass, BoundaryClass)>,
) -> Result<GeneratingCurve> {
    let j = preset.elements();
    let min = match preset.default_topology() {
        Topology::Periodic => 3,
        Topology::Interval { .. } => 2,
    };
    if j < min {
        return Err(Error::InvalidPresetParams(format!(
            "need at least {min} elements, got {j}"
        )));
    }
    let nodes = match *preset {
        Preset::PerturbedSemicircle { elements } => perturbed_semicircle(elements),
        Preset::Circle {
            elements,
            center,
            radius,
            clockwise,
        } => {
            positive("radius", radius)?;
            let c = Vec2::new(center[0], center[1]);
            let sign = if clockwise { -1.0 } else { 1.0 };
            (0..elements)
                .map(|k| {
                    let t = sign * 2.0 * PI * k as f64 / elements as f64;
                    c + radius * Vec2::new(t.cos(), t.sin())
                })
                .collect()
        }
        Preset::Cigar {
            elements,
            center,
            width,
            height,
        } => {
            positive("width", width)?;
            if !(height > width) {
                return Err(Error::InvalidPresetParams(
                    "cigar height must exceed its width".into(),
                ));
            }
            let r = 0.5 * width;
            let straight = height - width;
            let c = Vec2::new(center[0], center[1]);
            // Clockwise: right side downwards, bottom cap, left side up, top cap.
            let pieces = vec![
                Piece::Line(
                    c + Vec2::new(r, 0.5 * straight),
                    c + Vec2::new(r, -0.5 * straight),
                ),
                Piece::Arc {
                    center: c + Vec2::new(0.0, -0.5 * straight),
                    radius: r,
                    from: 0.0,
                    to: -PI,
                },
                Piece::Line(
                    c + Vec2::new(-r, -0.5 * straight),
                    c + Vec2::new(-r, 0.5 * straight),
                ),
                Piece::Arc {
                    center: c + Vec2::new(0.0, 0.5 * straight),
                    radius: r,
                    from: PI,
                    to: 0.0,
                },
            ];
            resample_pieces(&pieces, elements, true)
        }
        Preset::TwoCircles {
            elements,
            side,
            small_radius,
        } => {
            if !(small_radius > 0.0 && small_radius < 1.0) {
                return Err(Error::InvalidPresetParams(
                    "small radius must lie in (0, 1)".into(),
                ));
            }
            let big = Vec2::new(SQRT_2, 0.0);
            let pieces = match side {
                Side::Right => vec![
                    Piece::Arc {
                        center: big,
                        radius: 1.0,
                        from: 0.0,
                        to: 2.0 * PI,
                    },
                    Piece::Arc {
                        center: big + Vec2::new(1.0 - small_radius, 0.0),
                        radius: small_radius,
                        from: 0.0,
                        to: 2.0 * PI,
                    },
                ],
                Side::Left => vec![
                    Piece::Arc {
                        center: big,
                        radius: 1.0,
                        from: PI,
                        to: -PI,
                    },
                    Piece::Arc {
                        center: big - Vec2::new(1.0 - small_radius, 0.0),
                        radius: small_radius,
                        from: PI,
                        to: -PI,
                    },
                ],
            };
            resample_pieces(&pieces, elements, true)
        }
        Preset::Lemniscate {
            elements,
            center,
            half_width,
            height,
            skew,
            flip,
        } => {
            positive("half_width", half_width)?;
            positive("height", height)?;
            if !(center > half_width) {
                return Err(Error::InvalidPresetParams(
                    "lemniscate must stay off the axis (center > half_width)".into(),
                ));
            }
            if !(skew.abs() < 1.0) {
                return Err(Error::InvalidPresetParams(
                    "lemniscate skew must lie in (-1, 1)".into(),
                ));
            }
            let f = |t: f64| {
                let p = Vec2::new(
                    center + half_width * t.cos(),
                    height * t.sin() * t.cos() * (1.0 - skew * t.cos()),
                );
                if flip {
                    Vec2::new(2.0 * center - p.x, -p.y)
                } else {
                    p
                }
            };
            resample_parametric(f, 0.0, 2.0 * PI, elements, true)
        }
        Preset::FlatDisc {
            elements,
            width,
            thickness,
        } => {
            positive("thickness", thickness)?;
            if !(width > thickness) {
                return Err(Error::InvalidPresetParams(
                    "disc width must exceed its thickness".into(),
                ));
            }
            let r = 0.5 * thickness;
            let x = 0.5 * width - r;
            let pieces = vec![
                Piece::Line(Vec2::new(0.0, r), Vec2::new(x, r)),
                Piece::Arc {
                    center: Vec2::new(x, 0.0),
                    radius: r,
                    from: 0.5 * PI,
                    to: -0.5 * PI,
                },
                Piece::Line(Vec2::new(x, -r), Vec2::new(0.0, -r)),
            ];
            let mut nodes = resample_pieces(&pieces, elements, false);
            snap_axis(&mut nodes);
            nodes
        }
        Preset::SphericalCap {
            elements,
            radius,
            angle,
        } => {
            positive("radius", radius)?;
            if !(angle > 0.0 && angle < PI) {
                return Err(Error::InvalidPresetParams(
                    "cap angle must lie in (0, pi)".into(),
                ));
            }
            let mut nodes: Vec<Vec2> = (0..=elements)
                .map(|k| {
                    let t = angle * k as f64 / elements as f64;
                    radius * Vec2::new(t.sin(), t.cos())
                })
                .collect();
            nodes[0].x = 0.0;
            nodes
        }
        Preset::OpenCylinder {
            elements,
            radius,
            height,
        } => {
            positive("radius", radius)?;
            positive("height", height)?;
            (0..=elements)
                .map(|k| Vec2::new(radius, 0.5 * height - height * k as f64 / elements as f64))
                .collect()
        }
        Preset::Dumbbell {
            elements,
            radius,
            depth,
        } => {
            positive("radius", radius)?;
            if !(0.0..1.0).contains(&depth) {
                return Err(Error::InvalidPresetParams(
                    "dumbbell depth must lie in [0, 1)".into(),
                ));
            }
            let f = |s: f64| {
                let c = (0.5 * PI * s).cos();
                Vec2::new(radius * (1.0 - depth * c * c), s)
            };
            resample_parametric(f, 1.0, -1.0, elements, false)
        }
        Preset::TorusCap {
            elements,
            center,
            radius,
            start_angle,
        } => {
            positive("radius", radius)?;
            if !(center > radius) {
                return Err(Error::InvalidPresetParams(
                    "torus cap must stay off the axis".into(),
                ));
            }
            if !(start_angle > 0.0 && start_angle <= PI) {
                return Err(Error::InvalidPresetParams(
                    "torus cap start angle must lie in (0, pi]".into(),
                ));
            }
            (0..=elements)
                .map(|k| {
                    let t = start_angle * (1.0 - k as f64 / elements as f64);
                    Vec2::new(center + radius * t.cos(), radius * t.sin())
                })
                .collect()
        }
        Preset::Segment { elements, from, to } => {
            let (a, b) = (Vec2::new(from[0], from[1]), Vec2::new(to[0], to[1]));
            if a == b {
                return Err(Error::InvalidPresetParams(
                    "segment end points coincide".into(),
                ));
            }
            (0..=elements)
                .map(|k| a + (b - a) * (k as f64 / elements as f64))
                .collect()
        }
    };
    let mut topology = preset.default_topology();
    if let (Some((s, e)), Topology::Interval { start, end }) = (ends, topology) {
        let axis = |c: BoundaryClass| c == BoundaryClass::Axis;
        if axis(s) != axis(start) || axis(e) != axis(end) {
            return Err(Error::InvalidPresetParams(
                "axis endpoints of a preset cannot be reclassified".into(),
            ));
        }
        topology = Topology::Interval { start: s, end: e };
    }
    let on_axis_end = |i: usize| match topology {
        Topology::Interval { start, .. } if i == 0 => start == BoundaryClass::Axis,
        Topology::Interval { end, .. } if i + 1 == nodes.len() => end == BoundaryClass::Axis,
        _ => false,
    };
    if let Some(i) = (0..nodes.len()).find(|&i| !on_axis_end(i) && !(nodes[i].x > 0.0)) {
        return Err(Error::InvalidPresetParams(format!(
            "vertex {i} is not in the open right half-plane (x1 = {})",
            nodes[i].x
        )));
    }
    GeneratingCurve::new(nodes, topology)
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidPresetParams(format!(
            "{name} must be positive, got {v}"
        )))
    }
}

fn perturbed_semicircle(j: usize) -> Vec<Vec2> {
    let mut nodes: Vec<Vec2> = (0..=j)
        .map(|k| {
            let q = k as f64 / j as f64;
            let base = (0.5 - q) * PI;
            let t = base + 0.1 * base.cos();
            Vec2::new(t.cos(), t.sin())
        })
        .collect();
    snap_axis(&mut nodes);
    nodes
}

/// Places the first and last node exactly on the axis.
fn snap_axis(nodes: &mut [Vec2]) {
    let last = nodes.len() - 1;
    nodes[0].x = 0.0;
    nodes[last].x = 0.0;
}

/// Straight segment or circular arc (angles in radians, `to < from` for
/// clockwise arcs).
enum Piece {
    Line(Vec2, Vec2),
    Arc {
        center: Vec2,
        radius: f64,
        from: f64,
        to: f64,
    },
}

impl Piece {
    fn length(&self) -> f64 {
        match *self {
            Piece::Line(a, b) => (b - a).norm(),
            Piece::Arc {
                radius, from, to, ..
            } => radius * (to - from).abs(),
        }
    }

    fn at(&self, fraction: f64) -> Vec2 {
        match *self {
            Piece::Line(a, b) => a + (b - a) * fraction,
            Piece::Arc {
                center,
                radius,
                from,
                to,
            } => {
                let t = from + (to - from) * fraction;
                center + radius * Vec2::new(t.cos(), t.sin())
            }
        }
    }
}

/// Nodes at equal arclength along a chain of pieces.  Periodic chains
/// produce `elements` nodes, open chains `elements + 1`.
fn resample_pieces(pieces: &[Piece], elements: usize, periodic: bool) -> Vec<Vec2> {
    let lengths: Vec<f64> = pieces.iter().map(Piece::length).collect();
    let total: f64 = lengths.iter().sum();
    let count = if periodic { elements } else { elements + 1 };
    (0..count)
        .map(|k| {
            if !periodic && k == elements {
                return pieces.last().unwrap().at(1.0);
            }
            let mut s = total * k as f64 / elements as f64;
            for (p, &l) in pieces.iter().zip(&lengths) {
                if s <= l {
                    return p.at(s / l);
                }
                s -= l;
            }
            pieces.last().unwrap().at(1.0)
        })
        .collect()
}

/// Nodes at (nearly) equal arclength along `f(t)`, `t` from `t0` to `t1`,
/// using a dense polyline to measure arclength.
fn resample_parametric(
    f: impl Fn(f64) -> Vec2,
    t0: f64,
    t1: f64,
    elements: usize,
    periodic: bool,
) -> Vec<Vec2> {
    let dense = 64 * elements.max(64);
    let ts: Vec<f64> = (0..=dense)
        .map(|k| t0 + (t1 - t0) * k as f64 / dense as f64)
        .collect();
    let pts: Vec<Vec2> = ts.iter().map(|&t| f(t)).collect();
    let mut cum = vec![0.0; pts.len()];
    for k in 1..pts.len() {
        cum[k] = cum[k - 1] + (pts[k] - pts[k - 1]).norm();
    }
    let total = cum[dense];
    let count = if periodic { elements } else { elements + 1 };
    let mut seg = 0;
    (0..count)
        .map(|k| {
            if !periodic && k == elements {
                return f(t1);
            }
            let s = total * k as f64 / elements as f64;
            while seg + 1 < dense && cum[seg + 1] < s {
                seg += 1;
            }
            let span = cum[seg + 1] - cum[seg];
            let frac = if span > 0.0 {
                (s - cum[seg]) / span
            } else {
                0.0
            };
            f(ts[seg] + (ts[seg + 1] - ts[seg]) * frac)
        })
        .collect()
}
