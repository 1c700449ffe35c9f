//! The curvature-based scheme.
//!
//! One time step solves a linear system for the new positions
//! `X^{m+1} = X^m + dX`, the new curve curvature `kappa^{m+1}` and the new
//! costate `Y^{m+1}`.  Three groups of equations are assembled:
//!
//! * **position equations**, tested with admissible displacements: a
//!   weighted, normally projected mass term for the velocity, the costate
//!   stiffness (implicit) and all remaining first-variation terms of the
//!   energy evaluated at the old time level;
//! * **curvature equations**, tested with admissible curvatures: they link
//!   the curvature to the normal component of the costate;
//! * **identity equations**, tested with admissible costate variations: the
//!   discrete curvature identity `kappa nu = X_ss` together with the clamp
//!   data.  Testing with costate variations (which vanish at endpoints with
//!   a free conormal) removes the unknown conormals; they are recovered
//!   afterwards from the untested identity rows.
//!
//! Inner products over the parameter interval are evaluated element by
//! element in arclength, so that `(f, g |X_rho|) = ∫ f g ds`,
//! `(f_rho, g_rho |X_rho|^{-1}) = ∫ f_s g_s ds` and `(f, g_rho) = ∫ f g_s ds`.
//! Mass-lumped products use the vertex rule on every element.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::functionals::{ade_kappa, curvature_proxy, ModelParams};
use crate::geometry::{e1, perp, GeneratingCurve, Geometry, Vec2};
use crate::linsolve::{self, SolveReport, Solver};
use crate::state::{
    check_domain, clamp_at, conormal_nodes, element_sign, failed_assumption, line_energy_nodes,
    relative_residual, true_conormals, SchemeState, StepOutcome,
};
use crate::system::{Assembler, BlockSystem, DofMap, Slot};

/// Discrete curvature vector of the initial polygon: the lumped solution
/// of `kappa_vec = X_ss` with the true conormals as boundary data.  It is
/// `(tau_{j+1} - tau_j) / W_j` at interior vertices, zero at endpoints away
/// from the axis, and purely axial at axis endpoints.
pub fn initial_curvature_vector(geom: &Geometry) -> Vec<Vec2> {
    let curve = &geom.curve;
    let tau = &geom.elements.tangent;
    (0..curve.num_nodes())
        .map(|i| {
            let w = geom.vertices.weight[i];
            match curve.boundary_class(i) {
                None => {
                    let (l, r) = curve.node_elements(i);
                    (tau[r.unwrap()] - tau[l.unwrap()]) / w
                }
                Some(crate::geometry::BoundaryClass::Axis) => {
                    let (l, r) = curve.node_elements(i);
                    let (e, s) = match (l, r) {
                        (Some(e), None) => (e, 1.0),
                        (None, Some(e)) => (e, -1.0),
                        _ => unreachable!("axis nodes are endpoints"),
                    };
                    Vec2::new(0.0, -s * tau[e].y / w)
                }
                Some(_) => Vec2::zeros(),
            }
        })
        .collect()
}

/// Initial scalar curvature: the curvature vector projected onto the unit
/// vertex normals, zero at axis endpoints.
pub fn initial_curvature(geom: &Geometry) -> Vec<f64> {
    let kv = initial_curvature_vector(geom);
    (0..geom.curve.num_nodes())
        .map(|i| {
            if geom.curve.is_axis_node(i) {
                0.0
            } else {
                kv[i].dot(&geom.vertices.unit_normal[i])
            }
        })
        .collect()
}

/// Initial state of the curvature scheme for `curve`.
pub fn init_state(curve: &GeneratingCurve, params: &ModelParams) -> Result<SchemeState> {
    params.check()?;
    let geom = Geometry::new(curve)?;
    let kappa = initial_curvature(&geom);
    let proxy = curvature_proxy(&geom, &kappa)?;
    let ade = ade_kappa(&geom, &kappa, params.m0);
    let conormal_at = conormal_nodes(curve);
    let costate = (0..curve.num_nodes())
        .map(|i| {
            let w = geom.vertices.omega[i];
            let star = 2.0
                * PI
                * geom.x1(i)
                * (params.alpha * (proxy.values[i] - params.kbar) + params.beta * ade)
                * w
                / w.norm_squared();
            if curve.is_axis_node(i) {
                Vec2::new(0.0, star.y)
            } else if conormal_at.contains(&i) {
                2.0 * PI * params.alpha_g * e1()
            } else {
                star
            }
        })
        .collect();
    Ok(SchemeState {
        curve: curve.clone(),
        curvature: kappa,
        costate,
        conormals: true_conormals(&geom),
        time: 0.0,
    })
}

/// Slot map of the curvature scheme for `curve`.
pub fn dof_map(curve: &GeneratingCurve, params: &ModelParams) -> DofMap {
    let fixed = 2.0 * PI * params.alpha_g * e1();
    DofMap::new(curve, |_| fixed, false)
}

/// Assembles the linear system of one time step of size `dt`.
pub fn assemble_step(state: &SchemeState, params: &ModelParams, dt: f64) -> Result<BlockSystem> {
    let geom = prepare(state, params, dt)?;
    assemble_with(&geom, state, params, dt)
}

fn prepare(state: &SchemeState, params: &ModelParams, dt: f64) -> Result<Geometry> {
    params.check()?;
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "time step must be positive, got {dt}"
        )));
    }
    check_domain(&state.curve)?;
    let n = state.curve.num_nodes();
    if state.curvature.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: state.curvature.len(),
        });
    }
    if state.costate.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: state.costate.len(),
        });
    }
    Geometry::new(&state.curve)
}

fn assemble_with(
    geom: &Geometry,
    state: &SchemeState,
    params: &ModelParams,
    dt: f64,
) -> Result<BlockSystem> {
    let curve = &state.curve;
    let n = curve.num_nodes();
    let dofs = dof_map(curve, params);
    let mut asm = Assembler::new(&dofs);

    let kappa = &state.curvature;
    let y = &state.costate;
    let x = curve.nodes();
    let proxy = curvature_proxy(geom, kappa)?;
    let ade = ade_kappa(geom, kappa, params.m0);
    let w = &geom.vertices.weight;
    let omega = &geom.vertices.omega;
    let x1 = |i: usize| x[i].x;

    // Nodal coefficients of the energy variation.
    let dev: Vec<f64> = proxy.values.iter().map(|k| k - params.kbar).collect();
    let g: Vec<f64> = (0..n)
        .map(|i| {
            params.alpha * dev[i] * dev[i]
                + 2.0 * params.lambda
                + 2.0 * params.beta * ade * kappa[i]
        })
        .collect();
    let dz: Vec<f64> = (0..n).map(|i| dev[i] * (proxy.factor[i] - 2.0)).collect();

    // Vertex terms.
    for i in 0..n {
        let p = geom.vertices.projection[i];
        let mass = 2.0 * PI * w[i] * x1(i) / dt;
        for c in 0..2 {
            let row = Slot::Displacement(i, c);
            for d in 0..2 {
                asm.add(row, Slot::Displacement(i, d), mass * p[(c, d)]);
            }
        }
        if !curve.is_axis_node(i) {
            // Variation of the curvature proxy through the averaged normal.
            asm.add_rhs(
                Slot::Displacement(i, 0),
                2.0 * PI * params.alpha * w[i] * dz[i] * omega[i].x / x1(i),
            );
        }
        // Curvature equation.
        let row = Slot::Curvature(i);
        asm.add(
            row,
            Slot::Curvature(i),
            2.0 * PI * params.alpha * w[i] * x1(i),
        );
        for d in 0..2 {
            asm.add(row, Slot::Costate(i, d), -w[i] * omega[i][d]);
        }
        asm.add_rhs(
            row,
            2.0 * PI * params.alpha * w[i] * omega[i].x
                + 2.0 * PI * w[i] * x1(i) * (params.alpha * params.kbar - params.beta * ade),
        );
        // Identity equation: lumped curvature term.
        for c in 0..2 {
            asm.add(Slot::Costate(i, c), Slot::Curvature(i), w[i] * omega[i][c]);
        }
        if let Some(zeta) = clamp_at(curve, i) {
            for c in 0..2 {
                asm.add_rhs(Slot::Costate(i, c), zeta[c]);
            }
        }
    }
    for i in line_energy_nodes(curve) {
        asm.add_rhs(Slot::Displacement(i, 0), -2.0 * PI * params.sigma);
    }

    // Element terms.
    for e in 0..curve.num_elements() {
        let (a, b) = curve.element_nodes(e);
        let len = geom.elements.length[e];
        let tau = geom.elements.tangent[e];
        let nu = geom.elements.normal[e];
        let dy_old = y[b] - y[a];
        let dx_old = x[b] - x[a];
        let gx = 0.5 * (g[a] * x1(a) + g[b] * x1(b));
        let bend: Vec<(f64, f64)> = [a, b].iter().map(|&k| (dz[k], omega[k].x)).collect();
        let mixed: Vec2 = [a, b]
            .iter()
            .map(|&k| {
                0.5 * (kappa[k] * perp(y[k]) - 2.0 * PI * params.beta * ade * Vec2::new(0.0, 1.0))
            })
            .sum();
        for &nd in &[a, b] {
            let s = element_sign(nd, a);
            for c in 0..2 {
                let row = Slot::Displacement(nd, c);
                // Costate stiffness.
                asm.add(row, Slot::Costate(b, c), -s / len);
                asm.add(row, Slot::Costate(a, c), s / len);
                // Explicit tangential term.
                let mut rhs = -dy_old.dot(&tau) * s * tau[c] / len;
                // Variation of the area-weighted energy density.
                rhs -= PI * (if c == 0 { 0.5 * len * g[nd] } else { 0.0 } + gx * tau[c] * s);
                // Variation of the curvature proxy through the normal.
                rhs += PI
                    * params.alpha
                    * bend
                        .iter()
                        .map(|&(d, w1)| d * (nu[c] * s * tau.x + tau[c] * s * (w1 - nu.x)))
                        .sum::<f64>();
                // Curvature/costate coupling and area-difference term.
                rhs += mixed[c] * s;
                asm.add_rhs(row, rhs);

                // Identity equation: stiffness of the new positions.
                let row = Slot::Costate(nd, c);
                asm.add(row, Slot::Displacement(b, c), s / len);
                asm.add(row, Slot::Displacement(a, c), -s / len);
                asm.add_rhs(row, -s * dx_old[c] / len);
            }
        }
    }

    let (matrix, rhs) = asm.finish()?;
    let multiplier_columns = Some(multiplier_columns(geom, &dofs));
    Ok(BlockSystem {
        matrix,
        rhs,
        dofs,
        multiplier_columns,
    })
}

/// Right-hand side contributions per unit multiplier of the surface-area
/// and volume constraints; both are minus `2 pi` times the respective first
/// variation, which equals minus the gradient of the discrete area and
/// volume.
fn multiplier_columns(geom: &Geometry, dofs: &DofMap) -> [Vec<f64>; 2] {
    let curve = &geom.curve;
    let x = curve.nodes();
    let mut area = vec![0.0; dofs.num_free()];
    let mut volume = vec![0.0; dofs.num_free()];
    for e in 0..curve.num_elements() {
        let (a, b) = curve.element_nodes(e);
        let len = geom.elements.length[e];
        let tau = geom.elements.tangent[e];
        let nu = geom.elements.normal[e];
        let xbar = 0.5 * (x[a].x + x[b].x);
        for &(nd, other) in &[(a, b), (b, a)] {
            let s = element_sign(nd, a);
            for c in 0..2 {
                if let Some(r) = dofs.index(Slot::Displacement(nd, c)) {
                    let da = if c == 0 { 0.5 * len } else { 0.0 } + xbar * tau[c] * s;
                    area[r] -= 2.0 * PI * da;
                    volume[r] -= 2.0 * PI * nu[c] * len * (2.0 * x[nd].x + x[other].x) / 6.0;
                }
            }
        }
    }
    [area, volume]
}

/// Factorizes and solves one time step.
pub fn solve_step(
    state: &SchemeState,
    params: &ModelParams,
    dt: f64,
    solver: &mut Solver,
) -> Result<StepOutcome> {
    let geom = prepare(state, params, dt)?;
    let system = assemble_with(&geom, state, params, dt)?;
    let fact = factor_with_diagnosis(solver, &system, &state.curve)?;
    let (sol, report) = linsolve::solve(&fact, &system.rhs)?;
    complete_step(&geom, state, &system, &sol, report, dt, (0.0, 0.0, 0))
}

/// Factorizes a step matrix, attaching the failed hypothesis to singular
/// system errors when it can be identified.
pub(crate) fn factor_with_diagnosis(
    solver: &mut Solver,
    system: &BlockSystem,
    curve: &GeneratingCurve,
) -> Result<linsolve::Factorization> {
    solver.factor(&system.matrix).map_err(|e| match e {
        Error::SingularSystem { rcond, .. } => Error::SingularSystem {
            rcond,
            assumption: failed_assumption(curve),
        },
        other => other,
    })
}

/// Builds the new state from a reduced solution: updates positions,
/// recovers the conormals and checks the identity residual.
pub(crate) fn complete_step(
    geom: &Geometry,
    state: &SchemeState,
    system: &BlockSystem,
    reduced: &[f64],
    report: SolveReport,
    dt: f64,
    multipliers: (f64, f64, usize),
) -> Result<StepOutcome> {
    if reduced.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteSolution);
    }
    let curve = &state.curve;
    let (costate, dx, kappa) = system.dofs.expand(reduced);
    let nodes: Vec<Vec2> = curve.nodes().iter().zip(&dx).map(|(p, d)| p + d).collect();
    let next = curve.with_nodes(nodes)?;

    // Left-hand side of the identity at every node and component.
    let x = next.nodes();
    let n = curve.num_nodes();
    let mut lhs = vec![Vec2::zeros(); n];
    let mut scale = vec![0.0f64; n];
    for i in 0..n {
        let t = geom.vertices.weight[i] * kappa[i] * geom.vertices.omega[i];
        lhs[i] += t;
        scale[i] += t.abs().max();
    }
    for e in 0..curve.num_elements() {
        let (a, b) = curve.element_nodes(e);
        let d = (x[b] - x[a]) / geom.elements.length[e];
        lhs[a] -= d;
        lhs[b] += d;
        scale[a] += d.abs().max();
        scale[b] += d.abs().max();
    }
    let conormal_at = conormal_nodes(curve);
    let conormals: Vec<(usize, Vec2)> = conormal_at.iter().map(|&i| (i, lhs[i])).collect();
    let mut rows = Vec::with_capacity(2 * n);
    for i in 0..n {
        let mut target = clamp_at(curve, i).unwrap_or_else(Vec2::zeros);
        if let Some((_, m)) = conormals.iter().find(|(k, _)| *k == i) {
            target += m;
        }
        for c in 0..2 {
            if c == 0 && curve.is_axis_node(i) {
                continue;
            }
            rows.push((lhs[i][c], target[c], scale[i].max(target.abs().max())));
        }
    }
    let identity_residual = relative_residual(&rows);
    Ok(StepOutcome {
        state: SchemeState {
            curve: next,
            curvature: kappa,
            costate,
            conormals,
            time: state.time + dt,
        },
        report,
        identity_residual,
        lambda_area: multipliers.0,
        lambda_volume: multipliers.1,
        newton_iterations: multipliers.2,
    })
}

pub(crate) fn prepare_geometry(
    state: &SchemeState,
    params: &ModelParams,
    dt: f64,
) -> Result<Geometry> {
    prepare(state, params, dt)
}

pub(crate) fn assemble_prepared(
    geom: &Geometry,
    state: &SchemeState,
    params: &ModelParams,
    dt: f64,
) -> Result<BlockSystem> {
    assemble_with(geom, state, params, dt)
}
