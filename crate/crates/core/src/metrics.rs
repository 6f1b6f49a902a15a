//! Average capacity and adaptive-modulation spectral efficiencies, all per
//! unit bandwidth (bit/s/Hz).

use crate::error::{Error, Result};
use crate::mud::MudDistribution;
use crate::oracle::{self, McConfig, McEstimate};
use crate::power::{ConstellationSet, CutoffSolution, DrPolicy, Policy};
use crate::quad::{self, Tolerance};

#[derive(Debug, Clone, PartialEq)]
pub struct MetricResult {
    /// bit/s/Hz
    pub value: f64,
    pub quadrature_error_estimate: f64,
    pub policy: Policy,
}

fn metric_tolerance() -> Tolerance {
    Tolerance {
        abs: 1e-13,
        rel: 1e-11,
        max_intervals: 4000,
    }
}

/// ∫_t^∞ log₂(x/t) f_max(x) dx, opened slightly above t so the log never
/// sees a zero argument.
fn log_rate(dist: &MudDistribution, threshold: f64) -> Result<(f64, f64)> {
    let lower = threshold * (1.0 + 1e-12);
    let r = quad::integrate_to_infinity(
        |x| {
            let p = dist.pdf(x);
            if p == 0.0 {
                0.0
            } else {
                (x / threshold).log2() * p
            }
        },
        lower,
        &metric_tolerance(),
    )?;
    Ok((r.value.max(0.0), r.abs_error))
}

/// Average capacity under the water-filling policy with cutoff γ₀.
pub fn capacity(dist: &MudDistribution, cut: &CutoffSolution) -> Result<MetricResult> {
    let (value, err) = log_rate(dist, cut.gamma0)?;
    Ok(MetricResult {
        value,
        quadrature_error_estimate: err,
        policy: Policy::Capacity(*cut),
    })
}

/// Continuous-rate M-QAM spectral efficiency, ∫_{γ₀/K}^∞ log₂(xK/γ₀) f_max.
pub fn spectral_efficiency_cr(
    dist: &MudDistribution,
    cut: &CutoffSolution,
    k: f64,
) -> Result<MetricResult> {
    if !(k > 0.0 && k <= 1.0) {
        return Err(Error::InvalidInput(format!(
            "power-loss factor must lie in (0, 1], got {k}"
        )));
    }
    let (value, err) = log_rate(dist, cut.gamma0 / k)?;
    Ok(MetricResult {
        value,
        quadrature_error_estimate: err,
        policy: Policy::ContinuousRate { cutoff: *cut, k },
    })
}

/// Discrete-rate spectral efficiency Σ_j log₂(M_j)·Pr(region j).
pub fn spectral_efficiency_dr(
    _dist: &MudDistribution,
    pol: &DrPolicy,
    set: &ConstellationSet,
) -> Result<MetricResult> {
    if pol.region_probs.len() != set.active().len() {
        return Err(Error::InvalidInput(format!(
            "policy has {} regions but the constellation set has {}",
            pol.region_probs.len(),
            set.active().len()
        )));
    }
    let value = set
        .active()
        .iter()
        .zip(&pol.region_probs)
        .map(|(&m, &p)| (m as f64).log2() * p)
        .sum::<f64>();
    Ok(MetricResult {
        value,
        quadrature_error_estimate: 0.0,
        policy: Policy::DiscreteRate {
            policy: pol.clone(),
            set: set.clone(),
        },
    })
}

/// Analytic value of whichever metric `policy` serves.
pub fn evaluate(dist: &MudDistribution, policy: &Policy) -> Result<MetricResult> {
    match policy {
        Policy::Capacity(cut) => capacity(dist, cut),
        Policy::ContinuousRate { cutoff, k } => spectral_efficiency_cr(dist, cutoff, *k),
        Policy::DiscreteRate { policy, set } => spectral_efficiency_dr(dist, policy, set),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleComparison {
    pub analytic: f64,
    pub estimate: McEstimate,
    /// |MC − analytic| / analytic
    pub rel_error: f64,
}

impl OracleComparison {
    /// Distance between the two in units of the Monte Carlo standard error.
    pub fn sigmas(&self) -> f64 {
        (self.estimate.mean - self.analytic).abs() / self.estimate.stderr
    }
}

/// Re-estimates the metric served by `policy` by simulation and compares.
pub fn validate_against_oracle(
    dist: &MudDistribution,
    policy: &Policy,
    cfg: &McConfig,
) -> Result<OracleComparison> {
    if cfg.samples < 100_000 {
        return Err(Error::InvalidInput(format!(
            "oracle validation needs at least 1e5 samples, got {}",
            cfg.samples
        )));
    }
    let analytic = evaluate(dist, policy)?.value;
    let estimate = match policy {
        Policy::Capacity(cut) => oracle::mc_capacity(dist, cut, cfg),
        Policy::ContinuousRate { cutoff, k } => oracle::mc_se_cr(dist, cutoff, *k, cfg),
        Policy::DiscreteRate { policy, set } => oracle::mc_se_dr(dist, policy, set, cfg),
    };
    Ok(OracleComparison {
        analytic,
        estimate,
        rel_error: (estimate.mean - analytic).abs() / analytic,
    })
}
