//! Surface-area and volume conserving time steps of the curvature scheme.
//!
//! The position equations gain the terms `-lambda_A dA - lambda_V dV`,
//! where `dA` and `dV` are the first variations of the discrete area and
//! volume at the old time level, and the multipliers are chosen such that
//! the area and/or volume of the new curve equal their initial values.
//! Because the step system is linear for fixed multipliers, the new
//! positions are affine in `(lambda_A, lambda_V)`:
//!
//! ```text
//! X(lambda) = X^m + dX_0 + lambda_A dX_A + lambda_V dX_V,
//! ```
//!
//! with the three displacements obtained from one factorization and three
//! solves.  Newton's method is then applied to the two scalar constraints,
//! whose Jacobian is the gradient of area and volume at `X(lambda)`
//! contracted with `dX_A` and `dX_V`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functionals::{
    enclosed_volume, enclosed_volume_gradient, surface_area, surface_area_gradient, ModelParams,
};
use crate::geometry::{GeneratingCurve, Vec2};
use crate::linsolve::{self, Solver};
use crate::scheme_kappa::{
    assemble_prepared, complete_step, factor_with_diagnosis, prepare_geometry,
};
use crate::state::{SchemeState, StepOutcome};

/// Which quantities are conserved.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConservationMode {
    #[default]
    None,
    Area,
    Volume,
    AreaAndVolume,
}

impl ConservationMode {
    fn conserves_area(self) -> bool {
        matches!(
            self,
            ConservationMode::Area | ConservationMode::AreaAndVolume
        )
    }

    fn conserves_volume(self) -> bool {
        matches!(
            self,
            ConservationMode::Volume | ConservationMode::AreaAndVolume
        )
    }
}

/// Newton iteration settings.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NewtonConfig {
    /// Absolute tolerance on both constraint residuals.
    pub tolerance: f64,
    /// Maximum number of Newton iterations per time step.
    pub max_iterations: usize,
    /// Starting multipliers `(lambda_A, lambda_V)`.
    pub initial: (f64, f64),
}

impl Default for NewtonConfig {
    fn default() -> Self {
        Self {
            tolerance: 1e-10,
            max_iterations: 20,
            initial: (0.0, 0.0),
        }
    }
}

impl NewtonConfig {
    pub fn check(&self) -> Result<()> {
        if !(self.tolerance > 0.0) || self.max_iterations == 0 {
            return Err(Error::InvalidConfig(
                "Newton tolerance must be positive and at least one iteration allowed".into(),
            ));
        }
        Ok(())
    }
}

/// Target values of the conserved quantities.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Targets {
    pub area: f64,
    pub volume: Option<f64>,
}

impl Targets {
    /// Area and (for closed surfaces) volume of `curve`.
    pub fn of(curve: &GeneratingCurve) -> Self {
        Self {
            area: surface_area(curve),
            volume: enclosed_volume(curve).ok(),
        }
    }
}

/// Smallest relative determinant accepted for the 2x2 constraint Jacobian.
const JACOBIAN_THRESHOLD: f64 = 1e-12;

/// One conserving time step.  With [`ConservationMode::None`] this is the
/// plain step of the curvature scheme.
pub fn conserved_step(
    state: &SchemeState,
    params: &ModelParams,
    dt: f64,
    mode: ConservationMode,
    targets: Targets,
    cfg: &NewtonConfig,
    solver: &mut Solver,
) -> Result<StepOutcome> {
    cfg.check()?;
    if mode.conserves_volume() && !state.curve.is_closed_surface() {
        return Err(Error::NotClosed);
    }
    let volume_target = match (mode.conserves_volume(), targets.volume) {
        (true, Some(v)) => v,
        (true, None) => return Err(Error::NotClosed),
        (false, _) => 0.0,
    };
    let geom = prepare_geometry(state, params, dt)?;
    let system = assemble_prepared(&geom, state, params, dt)?;
    let fact = factor_with_diagnosis(solver, &system, &state.curve)?;
    let (base, report) = linsolve::solve(&fact, &system.rhs)?;
    if mode == ConservationMode::None {
        return complete_step(&geom, state, &system, &base, report, dt, (0.0, 0.0, 0));
    }
    let [area_col, volume_col] = system
        .multiplier_columns
        .clone()
        .expect("curvature scheme provides multiplier columns");
    let (sens_a, _) = linsolve::solve(&fact, &area_col)?;
    let (sens_v, _) = linsolve::solve(&fact, &volume_col)?;

    let x0 = state.curve.nodes();
    let d0 = system.dofs.displacement(&base);
    let da = system.dofs.displacement(&sens_a);
    let dv = system.dofs.displacement(&sens_v);
    let positions = |la: f64, lv: f64| -> Vec<Vec2> {
        (0..x0.len())
            .map(|i| x0[i] + d0[i] + la * da[i] + lv * dv[i])
            .collect()
    };
    let dot = |g: &[Vec2], d: &[Vec2]| g.iter().zip(d).map(|(a, b)| a.dot(b)).sum::<f64>();

    let (mut la, mut lv) = cfg.initial;
    if !mode.conserves_area() {
        la = 0.0;
    }
    if !mode.conserves_volume() {
        lv = 0.0;
    }
    let mut iterations = 0;
    loop {
        let curve = state.curve.with_nodes(positions(la, lv))?;
        let fa = surface_area(&curve) - targets.area;
        let fv = if mode.conserves_volume() {
            enclosed_volume(&curve)? - volume_target
        } else {
            0.0
        };
        let residual = fa.abs().max(fv.abs());
        let converged = (!mode.conserves_area() || fa.abs() <= cfg.tolerance)
            && (!mode.conserves_volume() || fv.abs() <= cfg.tolerance);
        if converged {
            break;
        }
        if iterations == cfg.max_iterations || !residual.is_finite() {
            return Err(Error::NewtonDivergence {
                iterations,
                residual,
            });
        }
        iterations += 1;
        match mode {
            ConservationMode::Area => {
                let g = surface_area_gradient(&curve);
                let j = dot(&g, &da);
                check_pivot(j, dot_norm(&g) * dot_norm(&da))?;
                la -= fa / j;
            }
            ConservationMode::Volume => {
                let g = enclosed_volume_gradient(&curve)?;
                let j = dot(&g, &dv);
                check_pivot(j, dot_norm(&g) * dot_norm(&dv))?;
                lv -= fv / j;
            }
            ConservationMode::AreaAndVolume => {
                let ga = surface_area_gradient(&curve);
                let gv = enclosed_volume_gradient(&curve)?;
                let (j11, j12) = (dot(&ga, &da), dot(&ga, &dv));
                let (j21, j22) = (dot(&gv, &da), dot(&gv, &dv));
                let det = j11 * j22 - j12 * j21;
                let size = (j11.abs() + j12.abs()) * (j21.abs() + j22.abs());
                if !(det.abs() > JACOBIAN_THRESHOLD * size) {
                    return Err(Error::SingularConstraintJacobian { determinant: det });
                }
                la -= (j22 * fa - j12 * fv) / det;
                lv -= (-j21 * fa + j11 * fv) / det;
            }
            ConservationMode::None => unreachable!(),
        }
    }
    let reduced: Vec<f64> = (0..base.len())
        .map(|i| base[i] + la * sens_a[i] + lv * sens_v[i])
        .collect();
    complete_step(
        &geom,
        state,
        &system,
        &reduced,
        report,
        dt,
        (la, lv, iterations),
    )
}

fn dot_norm(d: &[Vec2]) -> f64 {
    d.iter().map(|v| v.norm_squared()).sum::<f64>().sqrt()
}

fn check_pivot(j: f64, scale: f64) -> Result<()> {
    if !(j.abs() > JACOBIAN_THRESHOLD * scale) {
        return Err(Error::SingularConstraintJacobian { determinant: j });
    }
    Ok(())
}
