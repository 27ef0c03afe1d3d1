//! Elastic-rod solitons and the electrons they trap.
//!
//! The crate is organised around the pipeline that takes a thin elastic rod
//! from its static Kirchhoff balance laws to the quantum state of an electron
//! confined to it:
//!
//! - [`kirchhoff_static`]: material-parameter reductions, the curvature ODE
//!   and its sech solution, the closed-form force field and finite-difference
//!   residual evaluators used as numerical oracles.
//! - [`rod_geometry`]: Darboux-frame kinematics, curve reconstruction from a
//!   curvature/torsion profile and the inverse curvature/torsion extraction.
//! - [`quantum_transport`]: the geometry-induced effective potential, the
//!   closed-form breather and envelope soliton, and split-step spectral
//!   solvers for the linear and cubic nonlinear Schrödinger equations.
//! - [`analysis`]: norms, localization moments, velocities and fidelities.
//! - [`io_cli`]: configuration parsing, run dispatch and file emitters behind
//!   the `conformon` binary.

pub mod analysis;
pub mod error;
pub mod io_cli;
pub mod kirchhoff_static;
pub mod profile;
pub mod quantum_transport;
pub mod rod_geometry;

pub use error::{Error, Result};
pub use profile::CurvatureProfile;
