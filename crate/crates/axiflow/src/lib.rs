//! Parametric finite element solver for the generalized Willmore and
//! Helfrich flow of axisymmetric surfaces.
//!
//! A surface of revolution is represented by its generating curve in the
//! meridian half-plane.  Two discretizations are provided: one in terms of
//! the curvature of the generating curve ([`scheme_kappa`]) and one in
//! terms of the mean curvature of the surface ([`scheme_kappa_s`]).  Both
//! are linear in the unknowns at each time step; [`conserved`] adds exact
//! conservation of surface area and enclosed volume on top of the former.
//! [`driver`] runs complete evolutions from a JSON configuration.

// Checks of the form `!(x > 0.0)` deliberately also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Assembly loops index several per-node arrays at once.
#![allow(clippy::needless_range_loop)]

pub mod conserved;
pub mod driver;
pub mod error;
pub mod functionals;
pub mod geometry;
pub mod linsolve;
pub mod mesh;
pub mod presets;
pub mod quadrature;
pub mod reference;
pub mod scheme_kappa;
pub mod scheme_kappa_s;
pub mod state;
pub mod system;

pub use conserved::{conserved_step, ConservationMode, NewtonConfig, Targets};
pub use error::{Error, Result};
pub use functionals::{ModelParams, SchemeKind};
pub use geometry::{BoundaryClass, GeneratingCurve, Topology, Vec2};
pub use presets::{make_preset, Preset};
pub use reference::{sphere_radius, SphereReference};
pub use state::{SchemeState, StepOutcome};
