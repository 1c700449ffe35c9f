//! The mean-curvature-based scheme, in a mass-lumped and an exactly
//! integrated variant.
//!
//! The unknowns are the new positions, the surface mean curvature
//! `kappa_s^{m+1}` and a costate `Y_s^{m+1}`.  The equations have the same
//! three groups as in [`crate::scheme_kappa`], but every inner product
//! carries the radial weight `x1` explicitly.  The inner products that may
//! be lumped are evaluated with the quadrature of the chosen
//! [`SchemeKind`]: vertex rule for the lumped variant, three-point Gauss
//! rule (exact for all integrands that occur) otherwise.  The velocity mass
//! term is lumped in both variants, and the stiffness terms are always
//! integrated exactly.
//!
//! In the lumped variant the mean curvature is fixed to zero at axis
//! endpoints; in the exact variant it is an unknown there as well.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::functionals::{ade_kappa_s, curvature_proxy, ModelParams, SchemeKind};
use crate::geometry::{e1, perp, GeneratingCurve, Geometry, Vec2};
use crate::linsolve::{self, SolveReport, Solver};
use crate::quadrature::{hats, lerp, Quadrature};
use crate::scheme_kappa::{factor_with_diagnosis, initial_curvature};
use crate::state::{
    check_domain, clamp_at, conormal_nodes, element_sign, line_energy_nodes, relative_residual,
    true_conormals, SchemeState, StepOutcome,
};
use crate::system::{Assembler, BlockSystem, DofMap, Slot};

fn check_variant(kind: SchemeKind) -> Result<Quadrature> {
    match kind {
        SchemeKind::Kappa => Err(Error::InvalidConfig(
            "the mean-curvature scheme needs a lumped or exact variant".into(),
        )),
        k => Ok(k.quadrature()),
    }
}

/// Initial state of the mean-curvature scheme: the mean curvature is the
/// curvature proxy of the initial curve curvature.
pub fn init_state(
    curve: &GeneratingCurve,
    params: &ModelParams,
    kind: SchemeKind,
) -> Result<SchemeState> {
    params.check()?;
    let quad = check_variant(kind)?;
    let geom = Geometry::new(curve)?;
    let kappa = initial_curvature(&geom);
    let kappa_s = curvature_proxy(&geom, &kappa)?.values;
    let ade = ade_kappa_s(&geom, &kappa_s, params.m0, quad);
    let conormal_at = conormal_nodes(curve);
    let mut costate = Vec::with_capacity(curve.num_nodes());
    for i in 0..curve.num_nodes() {
        let w = geom.vertices.omega[i];
        let star = 2.0 * PI * (params.alpha * (kappa_s[i] - params.kbar) + params.beta * ade) * w
            / w.norm_squared();
        costate.push(if curve.is_axis_node(i) {
            Vec2::new(0.0, star.y)
        } else if conormal_at.contains(&i) {
            let x1 = geom.x1(i);
            if !(x1 > 0.0) {
                return Err(Error::DivisionByAxis { vertex: i });
            }
            2.0 * PI * params.alpha_g * e1() / x1
        } else {
            star
        });
    }
    Ok(SchemeState {
        curve: curve.clone(),
        curvature: kappa_s,
        costate,
        conormals: true_conormals(&geom),
        time: 0.0,
    })
}

/// Slot map of the mean-curvature scheme.
pub fn dof_map(curve: &GeneratingCurve, params: &ModelParams, kind: SchemeKind) -> DofMap {
    let fixed = |i: usize| 2.0 * PI * params.alpha_g * e1() / curve.nodes()[i].x;
    DofMap::new(curve, fixed, kind == SchemeKind::KappaSExact)
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
    for len in [state.curvature.len(), state.costate.len()] {
        if len != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: len,
            });
        }
    }
    Geometry::new(&state.curve)
}

/// Assembles the linear system of one time step.
pub fn assemble_step(
    state: &SchemeState,
    params: &ModelParams,
    dt: f64,
    kind: SchemeKind,
) -> Result<BlockSystem> {
    let quad = check_variant(kind)?;
    let geom = prepare(state, params, dt)?;
    assemble_with(&geom, state, params, dt, kind, quad)
}

fn assemble_with(
    geom: &Geometry,
    state: &SchemeState,
    params: &ModelParams,
    dt: f64,
    kind: SchemeKind,
    quad: Quadrature,
) -> Result<BlockSystem> {
    let curve = &state.curve;
    let n = curve.num_nodes();
    let dofs = dof_map(curve, params, kind);
    let mut asm = Assembler::new(&dofs);
    let ks = &state.curvature;
    let y = &state.costate;
    let x = curve.nodes();
    let ade = ade_kappa_s(geom, ks, params.m0, quad);
    let density = |k: f64| {
        let d = k - params.kbar;
        params.alpha * d * d + 2.0 * params.lambda + 2.0 * params.beta * ade * k
    };

    // Lumped velocity mass.
    for i in 0..n {
        let p = geom.vertices.projection[i];
        let mass = 2.0 * PI * geom.vertices.weight[i] * x[i].x / dt;
        for c in 0..2 {
            for d in 0..2 {
                asm.add(
                    Slot::Displacement(i, c),
                    Slot::Displacement(i, d),
                    mass * p[(c, d)],
                );
            }
        }
        if let Some(zeta) = clamp_at(curve, i) {
            for c in 0..2 {
                asm.add_rhs(Slot::Costate(i, c), x[i].x * zeta[c]);
            }
        }
    }
    for i in line_energy_nodes(curve) {
        let m = state.conormal(i).unwrap_or_else(Vec2::zeros);
        asm.add_rhs(
            Slot::Displacement(i, 0),
            -(2.0 * PI * params.sigma + m.dot(&y[i])),
        );
    }

    for e in 0..curve.num_elements() {
        let (a, b) = curve.element_nodes(e);
        let ends = [a, b];
        let len = geom.elements.length[e];
        let tau = geom.elements.tangent[e];
        let nu = geom.elements.normal[e];
        let xbar = 0.5 * (x[a].x + x[b].x);
        let dy_old = y[b] - y[a];
        let dx_old = x[b] - x[a];

        // Old-level integrands at the quadrature points.
        let mut r1 = 0.0; // ∫ (pi x1 G - Y.e1) dρ / h
        let mut r2 = [0.0; 2]; // ∫ (pi G - kappa_s Y.nu) phi_k ds
        let mut r3 = Vec2::zeros(); // ∫ x1 kappa_s perp(Y) dρ / h
        for &(xi, wq) in quad.points() {
            let phi = hats(xi);
            let x1q = lerp(x[a].x, x[b].x, xi);
            let kq = lerp(ks[a], ks[b], xi);
            let yq = y[a] * phi[0] + y[b] * phi[1];
            let gq = density(kq);
            r1 += wq * (PI * x1q * gq - yq.x);
            let f2 = PI * gq - kq * yq.dot(&nu);
            r2[0] += wq * len * phi[0] * f2;
            r2[1] += wq * len * phi[1] * f2;
            r3 += wq * x1q * kq * perp(yq);
        }

        for (local, &nd) in ends.iter().enumerate() {
            let s = element_sign(nd, a);
            for c in 0..2 {
                let row = Slot::Displacement(nd, c);
                asm.add(row, Slot::Costate(b, c), -xbar * s / len);
                asm.add(row, Slot::Costate(a, c), xbar * s / len);
                let mut rhs = -xbar * dy_old.dot(&tau) * s * tau[c] / len;
                rhs -= s * tau[c] * r1;
                if c == 0 {
                    rhs -= r2[local];
                    rhs += 0.5 * dy_old.dot(&tau);
                }
                rhs += s * r3[c];
                asm.add_rhs(row, rhs);

                // Identity equation.
                let row = Slot::Costate(nd, c);
                asm.add(row, Slot::Displacement(b, c), xbar * s / len);
                asm.add(row, Slot::Displacement(a, c), -xbar * s / len);
                let mut rhs = -xbar * s * dx_old[c] / len;
                if c == 0 {
                    rhs -= 0.5 * len;
                }
                asm.add_rhs(row, rhs);
            }
        }

        // Weighted mass couplings of the new curvature and costate.
        for &(xi, wq) in quad.points() {
            let phi = hats(xi);
            let x1q = lerp(x[a].x, x[b].x, xi);
            for (ln, &nd) in ends.iter().enumerate() {
                let row = Slot::Curvature(nd);
                asm.add_rhs(
                    row,
                    2.0 * PI
                        * wq
                        * len
                        * phi[ln]
                        * x1q
                        * (params.alpha * params.kbar - params.beta * ade),
                );
                for (lk, &k) in ends.iter().enumerate() {
                    let m = wq * len * phi[ln] * phi[lk] * x1q;
                    asm.add(row, Slot::Curvature(k), 2.0 * PI * params.alpha * m);
                    for d in 0..2 {
                        asm.add(row, Slot::Costate(k, d), -m * nu[d]);
                        asm.add(Slot::Costate(nd, d), Slot::Curvature(k), m * nu[d]);
                    }
                }
            }
        }
    }

    let (matrix, rhs) = asm.finish()?;
    Ok(BlockSystem {
        matrix,
        rhs,
        dofs,
        multiplier_columns: None,
    })
}

/// Factorizes and solves one time step.
pub fn solve_step(
    state: &SchemeState,
    params: &ModelParams,
    dt: f64,
    kind: SchemeKind,
    solver: &mut Solver,
) -> Result<StepOutcome> {
    let quad = check_variant(kind)?;
    let geom = prepare(state, params, dt)?;
    let system = assemble_with(&geom, state, params, dt, kind, quad)?;
    let fact = factor_with_diagnosis(solver, &system, &state.curve)?;
    let (sol, report) = linsolve::solve(&fact, &system.rhs)?;
    complete_step(&geom, state, &system, &sol, report, dt, quad)
}

fn complete_step(
    geom: &Geometry,
    state: &SchemeState,
    system: &BlockSystem,
    reduced: &[f64],
    report: SolveReport,
    dt: f64,
    quad: Quadrature,
) -> Result<StepOutcome> {
    if reduced.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteSolution);
    }
    let curve = &state.curve;
    let (costate, dx, ks) = system.dofs.expand(reduced);
    let nodes: Vec<Vec2> = curve.nodes().iter().zip(&dx).map(|(p, d)| p + d).collect();
    let next = curve.with_nodes(nodes)?;
    let xn = next.nodes();
    let x = curve.nodes();
    let n = curve.num_nodes();

    let mut lhs = vec![Vec2::zeros(); n];
    let mut scale = vec![0.0f64; n];
    for e in 0..curve.num_elements() {
        let (a, b) = curve.element_nodes(e);
        let ends = [a, b];
        let len = geom.elements.length[e];
        let nu = geom.elements.normal[e];
        let xbar = 0.5 * (x[a].x + x[b].x);
        let d = xbar * (xn[b] - xn[a]) / len;
        for (ln, &nd) in ends.iter().enumerate() {
            let mut curv = Vec2::zeros();
            for &(xi, wq) in quad.points() {
                let phi = hats(xi);
                let kq = lerp(ks[a], ks[b], xi);
                curv += wq * len * phi[ln] * lerp(x[a].x, x[b].x, xi) * kq * nu;
            }
            let s = element_sign(nd, a);
            let area = Vec2::new(0.5 * len, 0.0);
            lhs[nd] += curv + area + s * d;
            scale[nd] += curv.abs().max() + 0.5 * len + d.abs().max();
        }
    }
    let conormals: Vec<(usize, Vec2)> = conormal_nodes(curve)
        .into_iter()
        .map(|i| (i, lhs[i] / x[i].x))
        .collect();
    let mut rows = Vec::with_capacity(2 * n);
    for i in 0..n {
        let mut target = clamp_at(curve, i).map_or_else(Vec2::zeros, |z| x[i].x * z);
        if let Some((_, m)) = conormals.iter().find(|(k, _)| *k == i) {
            target += x[i].x * m;
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
            curvature: ks,
            costate,
            conormals,
            time: state.time + dt,
        },
        report,
        identity_residual,
        lambda_area: 0.0,
        lambda_volume: 0.0,
        newton_iterations: 0,
    })
}
