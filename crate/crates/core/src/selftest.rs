//! Fast internal consistency checks and Monte Carlo validation points,
//! exposed through the `selftest` and `validate` subcommands.

use crate::error::Result;
use crate::fading::{FadingSpec, SnrDistribution};
use crate::metrics::{self, OracleComparison};
use crate::mud::MudDistribution;
use crate::oracle::{self, McConfig};
use crate::power::{self, ConstellationSet, ConstraintSpec, Policy};
use crate::specfun;
use crate::sweep::{Mode, PointSpec};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &str, passed: bool, detail: String) -> Check {
    Check {
        name: name.to_string(),
        passed,
        detail,
    }
}

fn failed(name: &str, e: crate::Error) -> Check {
    check(name, false, e.to_string())
}

pub fn run_selftest() -> Vec<Check> {
    let mut out = Vec::new();

    let k = power::power_loss_factor(1e-3);
    let k_ref = 1.5 / (5.0f64 * 1e-3).ln().abs();
    out.push(check(
        "power-loss factor at BER 1e-3",
        (k - k_ref).abs() < 1e-12,
        format!("K = {k:.10}"),
    ));

    out.push(match rayleigh_closed_form() {
        Ok((g0, cap, closed)) => check(
            "Rayleigh single-user capacity closed form",
            (cap - closed).abs() < 1e-8 && (0.39..=0.40).contains(&g0),
            format!("gamma0 = {g0:.9}, capacity = {cap:.9}, closed form = {closed:.9}"),
        ),
        Err(e) => failed("Rayleigh single-user capacity closed form", e),
    });

    out.push(match ratio_cdf_identity() {
        Ok(worst) => check(
            "Rayleigh gain-ratio CDF equals x/(1+x)",
            worst < 1e-12,
            format!("max deviation {worst:.3e}"),
        ),
        Err(e) => failed("Rayleigh gain-ratio CDF equals x/(1+x)", e),
    });

    out.push(match cr_capacity_identity() {
        Ok((se, cap)) => check(
            "continuous-rate efficiency equals capacity at budget K",
            (se - cap).abs() < 1e-8,
            format!("se_cr = {se:.10}, capacity = {cap:.10}"),
        ),
        Err(e) => failed("continuous-rate efficiency equals capacity at budget K", e),
    });

    out.push(match ordering_at(20.0, 5) {
        Ok(pm) => check(
            "capacity >= se_cr >= se_dr at 20 dB, 5 users",
            pm.0 >= pm.1 && pm.1 >= pm.2,
            format!("{:.6} >= {:.6} >= {:.6}", pm.0, pm.1, pm.2),
        ),
        Err(e) => failed("capacity >= se_cr >= se_dr at 20 dB, 5 users", e),
    });

    out
}

fn rayleigh_closed_form() -> Result<(f64, f64, f64)> {
    let d = MudDistribution::new(SnrDistribution::direct(FadingSpec::rayleigh(1.0)?), 1)?;
    let cut = power::solve_cutoff(&d, &ConstraintSpec::transmit())?;
    let cap = metrics::capacity(&d, &cut)?.value;
    let closed = std::f64::consts::LOG2_E * specfun::exp_integral_e1(cut.gamma0)?;
    Ok((cut.gamma0, cap, closed))
}

fn ratio_cdf_identity() -> Result<f64> {
    let d = SnrDistribution::ratio(FadingSpec::rayleigh(1.0)?);
    let mut worst = 0.0f64;
    for i in 0..=200 {
        let x = i as f64 * 0.5;
        worst = worst.max((d.try_cdf(x)? - x / (1.0 + x)).abs());
    }
    Ok(worst)
}

fn cr_capacity_identity() -> Result<(f64, f64)> {
    let d = MudDistribution::new(SnrDistribution::direct(FadingSpec::rayleigh(3.0)?), 4)?;
    let k = power::power_loss_factor(1e-3);
    let cr = power::solve_cutoff_cr(&d, &ConstraintSpec::transmit(), k)?;
    let se = metrics::spectral_efficiency_cr(&d, &cr, k)?.value;
    let c = ConstraintSpec::interference(k)?;
    let cap = metrics::capacity(&d, &power::solve_cutoff(&d, &c)?)?.value;
    Ok((se, cap))
}

fn ordering_at(p_av_db: f64, users: u32) -> Result<(f64, f64, f64)> {
    let pm = crate::sweep::evaluate_point(&PointSpec {
        mode: Mode::Osa,
        p_av_db,
        q_av_db: 0.0,
        users,
        m: 1.0,
        ber_target: 1e-3,
        constellation: vec![0, 4, 8, 16, 64],
    })?;
    Ok((pm.capacity, pm.se_cr, pm.se_dr))
}

/// Points used by `validate`: both constraint modes, Rayleigh and
/// Nakagami-2, one and several users.
pub fn validation_points() -> Vec<PointSpec> {
    let base = PointSpec {
        mode: Mode::Osa,
        p_av_db: 0.0,
        q_av_db: 0.0,
        users: 1,
        m: 1.0,
        ber_target: 1e-3,
        constellation: vec![0, 4, 8, 16, 64],
    };
    vec![
        base.clone(),
        PointSpec {
            p_av_db: 10.0,
            users: 5,
            ..base.clone()
        },
        PointSpec {
            p_av_db: 10.0,
            users: 5,
            m: 2.0,
            ..base.clone()
        },
        PointSpec {
            mode: Mode::Ss,
            p_av_db: 10.0,
            q_av_db: 0.0,
            users: 1,
            ..base.clone()
        },
        PointSpec {
            mode: Mode::Ss,
            p_av_db: 10.0,
            q_av_db: 10.0,
            users: 5,
            ..base.clone()
        },
        PointSpec {
            mode: Mode::Ss,
            p_av_db: 10.0,
            q_av_db: 0.0,
            users: 1,
            m: 2.0,
            ..base
        },
    ]
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointValidation {
    pub point: PointSpec,
    /// capacity, continuous rate, discrete rate
    pub metrics: [OracleComparison; 3],
    /// Monte Carlo average power of each policy, as a fraction of budget.
    pub power: [oracle::McEstimate; 3],
    pub budget: f64,
    /// The discrete-rate policy could not spend its budget; its power check
    /// is then an upper bound rather than an equality.
    pub dr_saturated: bool,
}

/// Solves all three policies at `p` and checks each metric and each
/// policy's average power against simulation.
pub fn validate_point(p: &PointSpec, cfg: &McConfig) -> Result<PointValidation> {
    let dist = p.distribution()?;
    let c = p.constraint()?;
    let set: ConstellationSet = p.constellation_set()?;
    let policies = [
        Policy::Capacity(power::solve_cutoff(&dist, &c)?),
        Policy::ContinuousRate {
            cutoff: power::solve_cutoff_cr(&dist, &c, set.k())?,
            k: set.k(),
        },
        Policy::DiscreteRate {
            policy: power::solve_dr_policy(&dist, &c, &set)?,
            set: set.clone(),
        },
    ];
    let dr_saturated =
        matches!(&policies[2], Policy::DiscreteRate { policy, .. } if policy.saturated);
    let mut comps = Vec::with_capacity(3);
    let mut pw = Vec::with_capacity(3);
    for (i, pol) in policies.iter().enumerate() {
        let sub = McConfig {
            seed: cfg.seed.wrapping_add(2 * i as u64),
            ..*cfg
        };
        comps.push(metrics::validate_against_oracle(&dist, pol, &sub)?);
        let psub = McConfig {
            seed: cfg.seed.wrapping_add(2 * i as u64 + 1),
            ..*cfg
        };
        pw.push(oracle::mc_power_check(&dist, pol, &psub));
    }
    Ok(PointValidation {
        point: p.clone(),
        metrics: [comps[0], comps[1], comps[2]],
        power: [pw[0], pw[1], pw[2]],
        budget: c.budget_ratio(),
        dr_saturated,
    })
}
