//! Average capacity and adaptive-modulation spectral efficiency of a
//! multi-user cognitive radio secondary link.
//!
//! The pipeline is:
//!
//! 1. [`fading`] describes the single-user SNR law, either the direct link
//!    (transmit-power constrained, opportunistic access) or the gain-ratio
//!    link (interference-power constrained, spectrum sharing).
//! 2. [`mud`] wraps it in the distribution of the best of `L` users.
//! 3. [`power`] solves the water-filling cutoffs and the discrete-rate
//!    region parameter so the average power constraint holds.
//! 4. [`metrics`] integrates capacity and the continuous/discrete-rate
//!    spectral efficiencies; [`oracle`] re-estimates all of them by Monte
//!    Carlo without touching the quadrature or root-finding code.
//!
//! [`sweep`] drives parameter grids and writes CSV.

// `!(x > 0.0)` is used on purpose so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fading;
pub mod metrics;
pub mod mud;
pub mod oracle;
pub mod power;
pub mod quad;
pub mod roots;
pub mod selftest;
pub mod specfun;
pub mod sweep;

pub use error::{Error, Result};
pub use fading::{FadingFamily, FadingSpec, LinkKind, SnrDistribution};
pub use metrics::{capacity, spectral_efficiency_cr, spectral_efficiency_dr, MetricResult};
pub use mud::MudDistribution;
pub use oracle::{McConfig, McEstimate};
pub use power::{
    power_loss_factor, solve_cutoff, solve_cutoff_cr, solve_dr_policy, ConstellationSet,
    ConstraintMode, ConstraintSpec, CutoffSolution, DrPolicy, Policy,
};

/// Converts a decibel quantity to a linear ratio.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}
