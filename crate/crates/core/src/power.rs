//! Power control: water-filling cutoffs and discrete-rate switching levels.
//!
//! All three policies spend power as a function of the selected user's SNR
//! x and are tuned so that the average normalized power E[P(x)/P̄] equals
//! the budget of the active constraint:
//!
//! * capacity:         P/P̄ = 1/γ₀ − 1/x                  for x ≥ γ₀
//! * continuous rate:  P/P̄ = 1/γ₀ − 1/(xK)               for x ≥ γ₀/K
//! * discrete rate:    P/P̄ = (M_j − 1)/(xK)              for M_j γ* ≤ x < M_{j+1} γ*
//!
//! K = −1.5/ln(5·BER) is the SNR penalty that keeps M-QAM at the target BER.
//! Each left-hand side is strictly decreasing in its threshold, which is what
//! the bracketing solver relies on.

use crate::error::{Error, Result};
use crate::mud::MudDistribution;
use crate::quad::{self, Integral, Tolerance};
use crate::roots;

/// Largest residual a returned policy may carry.
pub const RESIDUAL_BOUND: f64 = 1e-8;

/// Search interval for the discrete-rate level γ*.
pub const GAMMA_STAR_BRACKET: (f64, f64) = (1e-6, 1e6);

fn constraint_tolerance() -> Tolerance {
    Tolerance {
        abs: 1e-14,
        rel: 1e-12,
        max_intervals: 4000,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintMode {
    /// Average transmit power, opportunistic spectrum access.
    TransmitPower,
    /// Average interference power at the primary receiver, spectrum sharing.
    InterferencePower,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstraintSpec {
    mode: ConstraintMode,
    budget_ratio: f64,
}

impl ConstraintSpec {
    pub fn new(mode: ConstraintMode, budget_ratio: f64) -> Result<Self> {
        if !(budget_ratio > 0.0) || !budget_ratio.is_finite() {
            return Err(Error::InvalidInput(format!(
                "budget ratio must be positive and finite, got {budget_ratio}"
            )));
        }
        Ok(ConstraintSpec { mode, budget_ratio })
    }

    /// E[P/P̄] = 1.
    pub fn transmit() -> Self {
        ConstraintSpec {
            mode: ConstraintMode::TransmitPower,
            budget_ratio: 1.0,
        }
    }

    /// Interference budget expressed as the linear ratio Q̄/P̄.
    pub fn interference(q_over_p: f64) -> Result<Self> {
        Self::new(ConstraintMode::InterferencePower, q_over_p)
    }

    pub fn mode(&self) -> ConstraintMode {
        self.mode
    }

    pub fn budget_ratio(&self) -> f64 {
        self.budget_ratio
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffSolution {
    /// γ₀, the water level's reciprocal.
    pub gamma0: f64,
    /// Constraint left-hand side minus budget at `gamma0`.
    pub residual: f64,
    pub iterations: usize,
}

/// K = −1.5 / ln(5·BER).
pub fn power_loss_factor(target_ber: f64) -> f64 {
    -1.5 / (5.0 * target_ber).ln()
}

/// M-QAM sizes available to the discrete-rate scheme, `M₀ = 0` first.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstellationSet {
    sizes: Vec<u32>,
    target_ber: f64,
    k: f64,
}

impl ConstellationSet {
    pub fn new(sizes: Vec<u32>, target_ber: f64) -> Result<Self> {
        if sizes.len() < 2 || sizes[0] != 0 {
            return Err(Error::InvalidInput(format!(
                "constellation sizes must start with 0 and list at least one constellation, got {sizes:?}"
            )));
        }
        if sizes[1] < 2 || sizes[1..].windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput(format!(
                "constellation sizes must be >= 2 and strictly increasing after M0, got {sizes:?}"
            )));
        }
        if !(target_ber > 0.0 && target_ber < 0.04) {
            return Err(Error::InvalidInput(format!(
                "target BER must lie in (0, 0.04), got {target_ber}"
            )));
        }
        Ok(ConstellationSet {
            sizes,
            target_ber,
            k: power_loss_factor(target_ber),
        })
    }

    /// {0, 4, 8, 16, 64}.
    pub fn standard(target_ber: f64) -> Result<Self> {
        Self::new(vec![0, 4, 8, 16, 64], target_ber)
    }

    pub fn sizes(&self) -> &[u32] {
        &self.sizes
    }

    /// Sizes of the transmitting constellations, M₁ … M_N.
    pub fn active(&self) -> &[u32] {
        &self.sizes[1..]
    }

    pub fn target_ber(&self) -> f64 {
        self.target_ber
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn max_rate(&self) -> f64 {
        (*self.sizes.last().unwrap() as f64).log2()
    }
}

/// Discrete-rate switching policy.
#[derive(Debug, Clone, PartialEq)]
pub struct DrPolicy {
    pub gamma_star: f64,
    /// Lower edge M_j·γ* of each active region; the last region is unbounded.
    pub boundaries: Vec<f64>,
    /// Probability of each active region.
    pub region_probs: Vec<f64>,
    /// Probability of no transmission, x < M₁·γ*.
    pub outage_prob: f64,
    /// E[P/P̄] under this policy.
    pub average_power: f64,
    /// `average_power` minus budget.
    pub residual: f64,
    /// The budget cannot be spent even at the lower end of the γ* bracket;
    /// the policy sits there and leaves power unused.
    pub saturated: bool,
}

/// A solved policy, tagged with the metric it serves.
#[derive(Debug, Clone, PartialEq)]
pub enum Policy {
    Capacity(CutoffSolution),
    ContinuousRate {
        cutoff: CutoffSolution,
        k: f64,
    },
    DiscreteRate {
        policy: DrPolicy,
        set: ConstellationSet,
    },
}

/// E[P/P̄] for the continuous policy 1/γ₀ − 1/(xk) on x ≥ γ₀/k.
pub fn cutoff_power(dist: &MudDistribution, gamma0: f64, k: f64) -> Result<Integral> {
    let threshold = gamma0 / k;
    let r = quad::integrate_to_infinity(
        |x| {
            if x <= threshold {
                0.0
            } else {
                (1.0 - threshold / x) * dist.pdf(x)
            }
        },
        threshold,
        &constraint_tolerance(),
    )?;
    Ok(Integral {
        value: r.value / gamma0,
        abs_error: r.abs_error / gamma0,
        intervals: r.intervals,
    })
}

/// Water-filling cutoff for the capacity-achieving policy.
pub fn solve_cutoff(dist: &MudDistribution, c: &ConstraintSpec) -> Result<CutoffSolution> {
    solve_threshold(dist, c, 1.0)
}

/// Cutoff γ₀ of the continuous-rate policy with power loss `k`.
pub fn solve_cutoff_cr(
    dist: &MudDistribution,
    c: &ConstraintSpec,
    k: f64,
) -> Result<CutoffSolution> {
    if !(k > 0.0 && k <= 1.0) {
        return Err(Error::InvalidInput(format!(
            "power-loss factor must lie in (0, 1], got {k}"
        )));
    }
    solve_threshold(dist, c, k)
}

fn solve_threshold(dist: &MudDistribution, c: &ConstraintSpec, k: f64) -> Result<CutoffSolution> {
    let budget = c.budget_ratio();
    let mut h = |g: f64| Ok(cutoff_power(dist, g, k)?.value - budget);
    let bracket = roots::expand_decreasing(
        &mut h,
        1e-4,
        10.0,
        4.0,
        40,
        "water-filling cutoff outside the searchable range",
        budget,
    )?;
    let root = roots::solve_decreasing(&mut h, bracket, 1e-12 * budget.max(1.0))?;
    if root.residual.abs() > RESIDUAL_BOUND {
        return Err(Error::Residual {
            what: "water-filling cutoff",
            residual: root.residual,
            iterations: root.iterations,
        });
    }
    Ok(CutoffSolution {
        gamma0: root.x,
        residual: root.residual,
        iterations: root.iterations,
    })
}

/// E[P/P̄] of the discrete-rate policy at level `gamma_star`.
pub fn dr_power(
    dist: &MudDistribution,
    gamma_star: f64,
    set: &ConstellationSet,
) -> Result<Integral> {
    let tol = constraint_tolerance();
    let active = set.active();
    let k = set.k();
    let mut total = Integral {
        value: 0.0,
        abs_error: 0.0,
        intervals: 0,
    };
    for (j, &m) in active.iter().enumerate() {
        let lo = m as f64 * gamma_star;
        let g = |x: f64| dist.pdf(x) / x;
        let r = match active.get(j + 1) {
            Some(&next) => quad::integrate(g, lo, next as f64 * gamma_star, &tol)?,
            None => quad::integrate_to_infinity(g, lo, &tol)?,
        };
        let weight = (m as f64 - 1.0) / k;
        total.value += weight * r.value;
        total.abs_error += weight * r.abs_error;
        total.intervals += r.intervals;
    }
    Ok(total)
}

/// Outage plus per-region probabilities at level `gamma_star`.
pub fn region_probabilities(
    dist: &MudDistribution,
    gamma_star: f64,
    set: &ConstellationSet,
) -> (f64, Vec<f64>) {
    let active = set.active();
    let outage = dist.cdf(active[0] as f64 * gamma_star);
    let probs = active
        .iter()
        .enumerate()
        .map(|(j, &m)| {
            let lo = m as f64 * gamma_star;
            match active.get(j + 1) {
                // Differences of survival functions stay accurate in the tail.
                Some(&next) => (dist.sf(lo) - dist.sf(next as f64 * gamma_star)).max(0.0),
                None => dist.sf(lo),
            }
        })
        .collect();
    (outage, probs)
}

/// Solves for γ* so the discrete-rate policy spends exactly the budget.
pub fn solve_dr_policy(
    dist: &MudDistribution,
    c: &ConstraintSpec,
    set: &ConstellationSet,
) -> Result<DrPolicy> {
    let budget = c.budget_ratio();
    let (lo, hi) = GAMMA_STAR_BRACKET;
    let mut h = |g: f64| Ok(dr_power(dist, g, set)?.value - budget);
    let f_hi = h(hi)?;
    if f_hi > 0.0 {
        return Err(Error::NoSolution {
            what: "discrete-rate budget is below the power spent at the top of the gamma* bracket",
            target: budget,
            limit: f_hi + budget,
        });
    }
    let f_lo = h(lo)?;
    if f_lo < 0.0 {
        return Ok(build_policy(dist, set, lo, f_lo + budget, f_lo, true));
    }
    let bracket = roots::Bracket { lo, hi, f_lo, f_hi };
    let root = roots::solve_decreasing(&mut h, bracket, 1e-12 * budget.max(1.0))?;
    if root.residual.abs() > RESIDUAL_BOUND {
        return Err(Error::Residual {
            what: "discrete-rate level",
            residual: root.residual,
            iterations: root.iterations,
        });
    }
    Ok(build_policy(
        dist,
        set,
        root.x,
        root.residual + budget,
        root.residual,
        false,
    ))
}

fn build_policy(
    dist: &MudDistribution,
    set: &ConstellationSet,
    gamma_star: f64,
    average_power: f64,
    residual: f64,
    saturated: bool,
) -> DrPolicy {
    let (outage_prob, region_probs) = region_probabilities(dist, gamma_star, set);
    DrPolicy {
        gamma_star,
        boundaries: set
            .active()
            .iter()
            .map(|&m| m as f64 * gamma_star)
            .collect(),
        region_probs,
        outage_prob,
        average_power,
        residual,
        saturated,
    }
}
