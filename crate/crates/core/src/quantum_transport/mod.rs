//! Electron transport in the curvature-induced potential.
//!
//! Closed-form breather/soliton oracles live in [`analytic`]; the split-step
//! spectral propagators in [`solver`].

pub mod analytic;
pub mod grid;
pub mod solver;

pub use analytic::{
    analytic_breather, analytic_envelope_soliton, analytic_gauged_soliton, carrier_velocity,
    effective_potential, gauge_factor, gauge_transform, kovalevskaya_curvature, soliton_field,
    soliton_parameters, velocity_product, DimensionlessConvention, GaugeDirection, SolitonParams,
};
pub use grid::{Grid, WaveField};
pub use solver::{
    cnlse_linear_equivalence, equivalence_run, evolve_cnlse, evolve_cnlse_observed, evolve_linear,
    evolve_linear_observed, EquivalenceOutcome, Observer, Oracle, StepControl,
};
