//! Run configuration, the time-stepping loop and run-directory output.
//!
//! A run is described by a JSON [`RunConfig`].  [`Simulation`] advances it
//! in memory one step at a time; [`run`] drives a simulation to the end
//! and writes the run directory:
//!
//! - `diagnostics.csv`: one row per time level, including the initial one;
//! - `snapshots/snapshot_NNNNNN.csv`: the curve every `snapshot_every`
//!   steps and at the final step;
//! - `final.obj`: the revolved surface of the last curve;
//! - `summary.json`: final diagnostics and, when a reference sphere is
//!   configured, the error norms;
//! - on a scheme error, `failure.json` and `last_state.json` describing
//!   the last valid time level instead of `final.obj` and `summary.json`.
//!
//! Runs are deterministic: the same configuration produces byte-identical
//! files.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::conserved::{conserved_step, ConservationMode, NewtonConfig, Targets};
use crate::error::{Error, Result};
use crate::functionals::{
    ade_kappa, ade_kappa_s, energy_kappa, energy_kappa_s, mesh_ratio, shape_measures, Diagnostics,
    ModelParams, SchemeKind,
};
use crate::geometry::{BoundaryClass, GeneratingCurve, Geometry, Topology, Vec2};
use crate::linsolve::Solver;
use crate::mesh::{export_revolved, read_snapshot, write_snapshot};
use crate::presets::{make_preset_with, Preset};
use crate::reference::{ErrorNorms, ErrorTracker, SphereReference};
use crate::state::SchemeState;
use crate::{scheme_kappa, scheme_kappa_s};

/// Where the initial curve comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum CurveSource {
    /// A parametric preset.
    Preset(Preset),
    /// A snapshot CSV with an explicit topology.  Relative paths are
    /// resolved against the directory of the configuration file.
    File { path: PathBuf, topology: Topology },
}

/// Time-step size.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum TimeStep {
    /// A fixed step size.
    Fixed(f64),
    /// `factor * h^2`, with `h` the longest element of the initial curve.
    MeshScaled(f64),
}

/// Complete description of a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub curve: CurveSource,
    /// Boundary classes of the two endpoints, replacing the defaults of a
    /// preset with an open profile.
    #[serde(default)]
    pub boundary: Option<[BoundaryClass; 2]>,
    pub scheme: SchemeKind,
    #[serde(default)]
    pub params: ModelParams,
    pub dt: TimeStep,
    /// Final time; the last step is shortened to end exactly there.
    #[serde(default)]
    pub t_end: Option<f64>,
    /// Number of steps (alternative to `t_end`).
    #[serde(default)]
    pub steps: Option<usize>,
    #[serde(default)]
    pub conservation: ConservationMode,
    #[serde(default)]
    pub newton: NewtonConfig,
    /// Snapshot cadence in steps; 0 writes only the initial and final curve.
    #[serde(default = "default_snapshot_every")]
    pub snapshot_every: usize,
    /// Azimuthal segments of the exported surface mesh.
    #[serde(default = "default_ktheta")]
    pub ktheta: usize,
    /// Exact sphere solution to measure errors against.
    #[serde(default)]
    pub reference_sphere: Option<SphereReference>,
    /// Abort with a degenerate-element error once the mesh ratio exceeds
    /// this value (vertex coalescence).
    #[serde(default = "default_max_mesh_ratio")]
    pub max_mesh_ratio: Option<f64>,
}

fn default_snapshot_every() -> usize {
    1000
}
fn default_ktheta() -> usize {
    64
}
fn default_max_mesh_ratio() -> Option<f64> {
    Some(100.0)
}

impl RunConfig {
    /// Parses a configuration from JSON text.
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Reads a configuration file; relative curve paths are resolved
    /// against its directory.
    pub fn from_file(path: &Path) -> Result<Self> {
        let mut cfg = Self::from_json(&fs::read_to_string(path)?)?;
        if let CurveSource::File { path: p, .. } = &mut cfg.curve {
            if p.is_relative() {
                if let Some(dir) = path.parent() {
                    *p = dir.join(&*p);
                }
            }
        }
        Ok(cfg)
    }

    /// Checks the configuration for consistency.
    pub fn check(&self) -> Result<()> {
        self.params.check()?;
        self.newton.check()?;
        match (self.t_end, self.steps) {
            (Some(t), None) if t >= 0.0 && t.is_finite() => {}
            (None, Some(_)) => {}
            _ => {
                return Err(Error::InvalidConfig(
                    "exactly one of t_end (non-negative) and steps must be given".into(),
                ))
            }
        }
        let dt = match self.dt {
            TimeStep::Fixed(v) | TimeStep::MeshScaled(v) => v,
        };
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "time step must be positive, got {dt}"
            )));
        }
        if self.conservation != ConservationMode::None && self.scheme != SchemeKind::Kappa {
            return Err(Error::InvalidConfig(
                "conserved flows are only available for the curvature scheme".into(),
            ));
        }
        if self.ktheta < 3 {
            return Err(Error::InvalidConfig("ktheta must be at least 3".into()));
        }
        if let Some(r) = self.max_mesh_ratio {
            if !(r > 1.0) {
                return Err(Error::InvalidConfig("max_mesh_ratio must exceed 1".into()));
            }
        }
        Ok(())
    }

    /// Builds the initial curve.
    pub fn initial_curve(&self) -> Result<GeneratingCurve> {
        let curve = match &self.curve {
            CurveSource::Preset(p) => make_preset_with(p, self.boundary.map(|[a, b]| (a, b)))?,
            CurveSource::File { path, topology } => {
                let nodes = read_snapshot(File::open(path)?)?;
                let topology = match (self.boundary, topology) {
                    (Some([start, end]), Topology::Interval { .. }) => {
                        Topology::Interval { start, end }
                    }
                    (Some(_), Topology::Periodic) => {
                        return Err(Error::InvalidConfig(
                            "periodic curves have no boundary".into(),
                        ))
                    }
                    (None, t) => *t,
                };
                GeneratingCurve::new(nodes, topology)?
            }
        };
        Ok(curve)
    }
}

/// Longest element of `curve`.
pub fn max_element_length(curve: &GeneratingCurve) -> f64 {
    (0..curve.num_elements())
        .map(|e| {
            let (a, b) = curve.element_nodes(e);
            (curve.nodes()[b] - curve.nodes()[a]).norm()
        })
        .fold(0.0, f64::max)
}

/// In-memory state of a run.
pub struct Simulation {
    config: RunConfig,
    state: SchemeState,
    step: usize,
    dt: f64,
    targets: Targets,
    solver: Solver,
    tracker: Option<ErrorTracker>,
    last_identity_residual: f64,
    /// Total number of steps of the run.
    total_steps: usize,
}

impl Simulation {
    pub fn new(config: RunConfig) -> Result<Self> {
        config.check()?;
        let curve = config.initial_curve()?;
        let dt = match config.dt {
            TimeStep::Fixed(v) => v,
            TimeStep::MeshScaled(f) => f * max_element_length(&curve).powi(2),
        };
        let state = match config.scheme {
            SchemeKind::Kappa => scheme_kappa::init_state(&curve, &config.params)?,
            kind => scheme_kappa_s::init_state(&curve, &config.params, kind)?,
        };
        // Times are m * dt (not accumulated sums), and the last step is
        // shortened to end exactly at t_end.
        let total_steps = match (config.t_end, config.steps) {
            (Some(t), _) => (t / dt - 1e-9).ceil().max(0.0) as usize,
            (None, Some(m)) => m,
            (None, None) => 0,
        };
        let mut tracker = config.reference_sphere.map(ErrorTracker::new);
        if let Some(t) = &mut tracker {
            t.record(0.0, &state.curve)?;
        }
        Ok(Self {
            targets: Targets::of(&curve),
            config,
            state,
            step: 0,
            dt,
            solver: Solver::default(),
            tracker,
            last_identity_residual: 0.0,
            total_steps,
        })
    }

    pub fn config(&self) -> &RunConfig {
        &self.config
    }

    /// The current time level.
    pub fn state(&self) -> &SchemeState {
        &self.state
    }

    /// Number of steps taken so far.
    pub fn step_index(&self) -> usize {
        self.step
    }

    /// Nominal time-step size.
    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Relative residual of the curvature identity in the last step.
    pub fn identity_residual(&self) -> f64 {
        self.last_identity_residual
    }

    /// Error norms accumulated so far, when a reference sphere is set.
    pub fn error_norms(&self) -> Option<ErrorNorms> {
        self.tracker.map(|t| t.norms())
    }

    /// Whether the configured end has been reached.
    pub fn is_finished(&self) -> bool {
        self.step >= self.total_steps
    }

    /// Total number of steps of the run.
    pub fn total_steps(&self) -> usize {
        self.total_steps
    }

    /// Diagnostics of the initial time level.
    pub fn initial_diagnostics(&self) -> Result<Diagnostics> {
        let geom = Geometry::new(&self.state.curve)?;
        self.diagnostics(&geom, &self.state, 0.0, 0.0, 0)
    }

    /// Advances one time step and returns its diagnostics.  On error the
    /// simulation keeps the last valid time level.
    pub fn advance(&mut self) -> Result<Diagnostics> {
        let next_time = match self.config.t_end {
            Some(t) if self.step + 1 >= self.total_steps => t,
            _ => (self.step + 1) as f64 * self.dt,
        };
        let dt = next_time - self.state.time;
        let params = &self.config.params;
        let mut outcome = match self.config.scheme {
            SchemeKind::Kappa => conserved_step(
                &self.state,
                params,
                dt,
                self.config.conservation,
                self.targets,
                &self.config.newton,
                &mut self.solver,
            )?,
            kind => scheme_kappa_s::solve_step(&self.state, params, dt, kind, &mut self.solver)?,
        };
        outcome.state.time = next_time;
        if let Some(limit) = self.config.max_mesh_ratio {
            let ratio = mesh_ratio(&outcome.state.curve);
            if ratio > limit {
                let (element, length) = shortest_element(&outcome.state.curve);
                return Err(Error::DegenerateElement { element, length });
            }
        }
        let old = Geometry::new(&self.state.curve)?;
        let diag = self.diagnostics(
            &old,
            &outcome.state,
            outcome.lambda_area,
            outcome.lambda_volume,
            outcome.newton_iterations,
        )?;
        if let Some(t) = &mut self.tracker {
            t.record(outcome.state.time, &outcome.state.curve)?;
        }
        self.last_identity_residual = outcome.identity_residual;
        self.state = outcome.state;
        self.step += 1;
        Ok(Diagnostics {
            step: self.step,
            ..diag
        })
    }

    /// Diagnostics of `state`, with the energy evaluated using the
    /// geometric weights of `weights` (the previous time level), which is
    /// the quantity the schemes decrease.
    fn diagnostics(
        &self,
        weights: &Geometry,
        state: &SchemeState,
        lambda_a: f64,
        lambda_v: f64,
        newton_iters: usize,
    ) -> Result<Diagnostics> {
        let params = &self.config.params;
        let (energy, ade) = match self.config.scheme {
            SchemeKind::Kappa => (
                energy_kappa(
                    weights,
                    &state.curvature,
                    &state.curve,
                    &state.conormals,
                    params,
                )?,
                ade_kappa(weights, &state.curvature, params.m0),
            ),
            kind => (
                energy_kappa_s(
                    weights,
                    &state.curvature,
                    &state.curve,
                    &state.conormals,
                    params,
                    kind.quadrature(),
                ),
                ade_kappa_s(weights, &state.curvature, params.m0, kind.quadrature()),
            ),
        };
        let shape = shape_measures(&Geometry::new(&state.curve)?);
        Ok(Diagnostics {
            step: self.step,
            time: state.time,
            energy,
            ratio: shape.ratio,
            area: shape.area,
            volume: shape.volume,
            hyp_length: shape.hyp_length,
            turning: shape.turning.map(|t| t.value),
            ade,
            lambda_a,
            lambda_v,
            newton_iters,
        })
    }
}

fn shortest_element(curve: &GeneratingCurve) -> (usize, f64) {
    (0..curve.num_elements())
        .map(|e| {
            let (a, b) = curve.element_nodes(e);
            (e, (curve.nodes()[b] - curve.nodes()[a]).norm())
        })
        .fold(
            (0, f64::INFINITY),
            |best, c| if c.1 < best.1 { c } else { best },
        )
}

/// Contents of `summary.json`.
#[derive(Clone, Debug, Serialize)]
pub struct RunSummary {
    pub steps: usize,
    pub final_time: f64,
    pub dt: f64,
    pub final_diagnostics: Diagnostics,
    pub error_norms: Option<ErrorNorms>,
}

/// Contents of `failure.json`.
#[derive(Clone, Debug, Serialize)]
pub struct FailureReport {
    /// Index of the step that failed (the number of completed steps plus one).
    pub step: usize,
    /// Time of the last valid time level.
    pub time: f64,
    pub error: &'static str,
    pub message: String,
}

/// Contents of `last_state.json`.
#[derive(Clone, Debug, Serialize)]
struct StateDump<'a> {
    time: f64,
    nodes: Vec<[f64; 2]>,
    curvature: &'a [f64],
    costate: Vec<[f64; 2]>,
    conormals: Vec<(usize, [f64; 2])>,
}

fn pair(v: Vec2) -> [f64; 2] {
    [v.x, v.y]
}

/// Error of a run together with the failure report written for it.
#[derive(Debug)]
pub struct RunFailure {
    pub error: Error,
    pub report: Option<FailureReport>,
}

impl std::fmt::Display for RunFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.error.fmt(f)
    }
}

impl std::error::Error for RunFailure {}

impl From<Error> for RunFailure {
    fn from(error: Error) -> Self {
        Self {
            error,
            report: None,
        }
    }
}

/// Runs `config` to completion, writing the run directory `out`.
///
/// A scheme error during time stepping writes `failure.json` and
/// `last_state.json` and is returned together with the failure report.
pub fn run(config: RunConfig, out: &Path) -> std::result::Result<RunSummary, RunFailure> {
    let mut sim = Simulation::new(config)?;
    fs::create_dir_all(out.join("snapshots")).map_err(Error::from)?;
    let mut diag_file = csv::Writer::from_writer(BufWriter::new(
        File::create(out.join("diagnostics.csv")).map_err(Error::from)?,
    ));
    let every = sim.config.snapshot_every;
    let snapshot = |sim: &Simulation| -> Result<()> {
        let name = format!("snapshot_{:06}.csv", sim.step_index());
        write_snapshot(
            &sim.state().curve,
            BufWriter::new(File::create(out.join("snapshots").join(name))?),
        )
    };
    let mut last = sim.initial_diagnostics()?;
    diag_file.serialize(&last).map_err(Error::from)?;
    snapshot(&sim)?;
    while !sim.is_finished() {
        match sim.advance() {
            Ok(d) => {
                diag_file.serialize(&d).map_err(Error::from)?;
                last = d;
                if every > 0 && sim.step_index() % every == 0 {
                    snapshot(&sim)?;
                }
            }
            Err(error) => {
                diag_file.flush().map_err(Error::from)?;
                let report = FailureReport {
                    step: sim.step_index() + 1,
                    time: sim.state().time,
                    error: error.kind(),
                    message: error.to_string(),
                };
                write_failure(&sim, &report, out)?;
                return Err(RunFailure {
                    error,
                    report: Some(report),
                });
            }
        }
    }
    diag_file.flush().map_err(Error::from)?;
    if every == 0 || sim.step_index() % every != 0 {
        snapshot(&sim)?;
    }
    let mesh = export_revolved(&sim.state().curve, sim.config.ktheta)?;
    mesh.write_obj(BufWriter::new(
        File::create(out.join("final.obj")).map_err(Error::from)?,
    ))?;
    let summary = RunSummary {
        steps: sim.step_index(),
        final_time: sim.state().time,
        dt: sim.dt(),
        final_diagnostics: last,
        error_norms: sim.error_norms(),
    };
    serde_json::to_writer_pretty(
        File::create(out.join("summary.json")).map_err(Error::from)?,
        &summary,
    )
    .map_err(Error::from)?;
    Ok(summary)
}

fn write_failure(sim: &Simulation, report: &FailureReport, out: &Path) -> Result<()> {
    serde_json::to_writer_pretty(File::create(out.join("failure.json"))?, report)?;
    let s = sim.state();
    let dump = StateDump {
        time: s.time,
        nodes: s.curve.nodes().iter().map(|&p| pair(p)).collect(),
        curvature: &s.curvature,
        costate: s.costate.iter().map(|&p| pair(p)).collect(),
        conormals: s.conormals.iter().map(|&(i, m)| (i, pair(m))).collect(),
    };
    serde_json::to_writer_pretty(File::create(out.join("last_state.json"))?, &dump)?;
    write_snapshot(&s.curve, File::create(out.join("last_state.csv"))?)
}
