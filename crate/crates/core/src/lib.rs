//! Numerical workbench for coupled inhomogeneous quadratic Schrödinger
//! systems `iα_k ∂_t u_k + γ_k Δu_k − β_k u_k + |x|^{-b} f_k(u) = 0`.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dichotomy;
pub mod error;
pub mod evolution;
pub mod functionals;
pub mod grid;
pub mod groundstate;
pub mod interaction;
mod linalg;

pub use dichotomy::{
    bootstrap_gamma, build_cutoff, classify, delta_margin, pohozaev_functional, virial_consistency,
    virial_sample, Classification, CutoffFunction, Verdict, VirialObserver, VirialSample,
};
pub use error::{Error, Result};
pub use evolution::{
    detect_blowup, evolve, evolve_observed, linear_half_step, nonlinear_step, scaling_check, BlowUp,
    BlowUpReason, EvolutionTrace, EvolveOptions, TraceRow,
};
pub use functionals::{
    action, charge, critical_index, energy, pohozaev_residuals, thresholds_from_groundstate, weinstein,
    Criticality, FunctionalReport, PohozaevResiduals, ThresholdSet,
};
pub use grid::{h1_report, CartesianGrid, Field, Grid, H1Report, RadialGrid};
pub use groundstate::{certify, omega_sweep, Certification, GroundStateOptions, GroundStateResult};
pub use interaction::{
    check_hypotheses, presets, Hypothesis, HypothesisReport, HypothesisStatus, InteractionPotential,
    Monomial, Polynomial, SystemSpec,
};
