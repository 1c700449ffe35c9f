//! The user guide in `book/`, compiled as documentation so that
//! `cargo test` runs every code listing in it.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/generating-curves.md")]
pub mod generating_curves {}

#[doc = include_str!("../../../book/src/energy.md")]
pub mod energy {}

#[doc = include_str!("../../../book/src/time-stepping.md")]
pub mod time_stepping {}

#[doc = include_str!("../../../book/src/conservation.md")]
pub mod conservation {}

#[doc = include_str!("../../../book/src/running.md")]
pub mod running {}

#[doc = include_str!("../../../book/src/failures.md")]
pub mod failures {}

#[doc = include_str!("../../../book/src/convergence.md")]
pub mod convergence {}
