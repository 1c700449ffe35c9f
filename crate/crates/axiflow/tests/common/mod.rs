//! Random curves and independent reference computations shared by the
//! oracle suites and the acceptance run.

#![allow(dead_code)]

use std::f64::consts::PI;

use axiflow::functionals::SchemeKind;
use axiflow::geometry::{BoundaryClass, GeneratingCurve, Topology, Vec2};
use axiflow::linsolve;
use axiflow::reference::SphereReference;
use axiflow::{scheme_kappa, scheme_kappa_s, ModelParams};
use proptest::prelude::*;

/// Star-shaped closed polygon about `(3, 0)`.
pub fn periodic_curve() -> impl Strategy<Value = GeneratingCurve> {
    (6usize..24).prop_flat_map(|j| {
        (
            prop::collection::vec(0.0..0.3f64, j),
            prop::collection::vec(-0.3..0.3f64, j),
        )
            .prop_map(move |(dr, dt)| {
                let nodes = (0..j)
                    .map(|k| {
                        let t = -2.0 * PI * (k as f64 + dt[k]) / j as f64;
                        (1.0 + dr[k]) * Vec2::new(t.cos(), t.sin()) + Vec2::new(3.0, 0.0)
                    })
                    .collect();
                GeneratingCurve::new(nodes, Topology::Periodic).unwrap()
            })
    })
}

/// Star-shaped profile running clockwise from the top of the axis to the
/// bottom.
pub fn axis_curve() -> impl Strategy<Value = GeneratingCurve> {
    (4usize..24).prop_flat_map(|j| {
        (
            prop::collection::vec(0.0..0.3f64, j + 1),
            prop::collection::vec(-0.3..0.3f64, j + 1),
        )
            .prop_map(move |(dr, dt)| {
                let mut nodes: Vec<Vec2> = (0..=j)
                    .map(|k| {
                        let jitter = if k == 0 || k == j { 0.0 } else { dt[k] };
                        let t = 0.5 * PI - PI * (k as f64 + jitter) / j as f64;
                        (1.0 + dr[k]) * Vec2::new(t.cos(), t.sin())
                    })
                    .collect();
                nodes[0].x = 0.0;
                nodes[j].x = 0.0;
                GeneratingCurve::new(
                    nodes,
                    Topology::Interval {
                        start: BoundaryClass::Axis,
                        end: BoundaryClass::Axis,
                    },
                )
                .unwrap()
            })
    })
}

/// Open arc off the axis with a boundary class drawn from all non-axis
/// classes at each end.
pub fn open_curve() -> impl Strategy<Value = GeneratingCurve> {
    let class = prop_oneof![
        (0.0..2.0 * PI).prop_map(|angle| BoundaryClass::Clamped { angle }),
        Just(BoundaryClass::Navier),
        Just(BoundaryClass::Semifree1),
        Just(BoundaryClass::Semifree2),
        Just(BoundaryClass::Free),
    ];
    (4usize..20, class.clone(), class).prop_flat_map(|(j, start, end)| {
        prop::collection::vec(0.0..0.2f64, j + 1).prop_map(move |dr| {
            let nodes = (0..=j)
                .map(|k| {
                    let t = PI * (1.0 - k as f64 / j as f64);
                    (1.0 + dr[k]) * Vec2::new(t.cos(), t.sin()) + Vec2::new(2.5, 0.0)
                })
                .collect();
            GeneratingCurve::new(nodes, Topology::Interval { start, end }).unwrap()
        })
    })
}

pub fn any_curve() -> impl Strategy<Value = GeneratingCurve> {
    prop_oneof![periodic_curve(), axis_curve(), open_curve()]
}

pub fn direction(n: usize) -> impl Strategy<Value = Vec<Vec2>> {
    prop::collection::vec(
        (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(a, b)| Vec2::new(a, b)),
        n,
    )
}

pub fn shifted(curve: &GeneratingCurve, chi: &[Vec2], eps: f64) -> GeneratingCurve {
    let nodes = curve
        .nodes()
        .iter()
        .zip(chi)
        .map(|(p, c)| p + eps * c)
        .collect();
    curve.with_nodes(nodes).unwrap()
}

/// Solves the step system of `scheme` for `curve` with a zero right-hand
/// side and returns the largest entry of the solution.
pub fn homogeneous_solution(curve: &GeneratingCurve, scheme: SchemeKind) -> f64 {
    let params = ModelParams {
        kbar: -0.5,
        lambda: 0.3,
        beta: 0.2,
        alpha_g: 0.4,
        sigma: 0.1,
        ..Default::default()
    };
    let dt = 1e-3;
    let system = match scheme {
        SchemeKind::Kappa => {
            let state = scheme_kappa::init_state(curve, &params).unwrap();
            scheme_kappa::assemble_step(&state, &params, dt).unwrap()
        }
        kind => {
            let state = scheme_kappa_s::init_state(curve, &params, kind).unwrap();
            scheme_kappa_s::assemble_step(&state, &params, dt, kind).unwrap()
        }
    };
    let fact = linsolve::factor(&system.matrix).unwrap();
    let (x, _) = linsolve::solve(&fact, &vec![0.0; system.dim()]).unwrap();
    x.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

/// Classical fourth-order Runge-Kutta for the radius equation.
pub fn rk4_radius(reference: &SphereReference, t_end: f64, h: f64) -> Vec<(f64, f64)> {
    let f = |r: f64| reference.velocity(r);
    let steps = (t_end / h).round() as usize;
    let mut r = reference.r0;
    let mut out = vec![(0.0, r)];
    for k in 0..steps {
        let k1 = f(r);
        let k2 = f(r + 0.5 * h * k1);
        let k3 = f(r + 0.5 * h * k2);
        let k4 = f(r + h * k3);
        r += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        out.push(((k + 1) as f64 * h, r));
    }
    out
}
