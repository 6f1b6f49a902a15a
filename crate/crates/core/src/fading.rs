//! Single-user SNR distributions.
//!
//! Two effective-SNR variables are modelled:
//!
//! * [`LinkKind::Direct`]: the secondary-link SNR γ_s. Under Nakagami-m
//!   fading the power gain is Gamma distributed, so γ_s ~ Gamma(shape m,
//!   mean γ̄); Rayleigh is the m = 1 case, an exponential with mean γ̄.
//! * [`LinkKind::Ratio`]: the spectrum-sharing SNR γ_sp = s·g_s/g_p with
//!   unit-mean gains sharing the same m. The gain ratio is Beta-prime(m, m),
//!   and all link constants are folded into the scale `s`, carried in
//!   [`FadingSpec::mean_snr`].

use rand::Rng;

use crate::error::{Error, Result};
use crate::specfun;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FadingFamily {
    Rayleigh,
    Nakagami { m: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FadingSpec {
    family: FadingFamily,
    mean_snr: f64,
}

impl FadingSpec {
    pub fn rayleigh(mean_snr: f64) -> Result<Self> {
        check_mean(mean_snr)?;
        Ok(FadingSpec {
            family: FadingFamily::Rayleigh,
            mean_snr,
        })
    }

    pub fn nakagami(m: f64, mean_snr: f64) -> Result<Self> {
        if !(m >= 0.5) || !m.is_finite() {
            return Err(Error::InvalidInput(format!(
                "Nakagami shape factor must be >= 0.5, got {m}"
            )));
        }
        check_mean(mean_snr)?;
        Ok(FadingSpec {
            family: FadingFamily::Nakagami { m },
            mean_snr,
        })
    }

    /// Rayleigh for m = 1, Nakagami otherwise.
    pub fn from_shape(m: f64, mean_snr: f64) -> Result<Self> {
        if m == 1.0 {
            Self::rayleigh(mean_snr)
        } else {
            Self::nakagami(m, mean_snr)
        }
    }

    pub fn family(&self) -> FadingFamily {
        self.family
    }

    /// Mean of γ_s for the direct link, scale `s` for the ratio link. Linear.
    pub fn mean_snr(&self) -> f64 {
        self.mean_snr
    }

    pub fn shape(&self) -> f64 {
        match self.family {
            FadingFamily::Rayleigh => 1.0,
            FadingFamily::Nakagami { m } => m,
        }
    }
}

fn check_mean(mean_snr: f64) -> Result<()> {
    if mean_snr > 0.0 && mean_snr.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!(
            "mean SNR must be positive and finite, got {mean_snr}"
        )))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinkKind {
    /// γ_s, constrained by the average transmit power.
    Direct,
    /// γ_sp ∝ g_s/g_p, constrained by the average interference power.
    Ratio,
}

/// PDF/CDF pair of an effective SNR on [0, ∞).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrDistribution {
    spec: FadingSpec,
    link: LinkKind,
    // ln of the normalising constant, cached per distribution
    ln_norm: f64,
}

impl SnrDistribution {
    pub fn new(spec: FadingSpec, link: LinkKind) -> Self {
        let m = spec.shape();
        let ln_norm = match (spec.family, link) {
            (FadingFamily::Rayleigh, _) => 0.0,
            (FadingFamily::Nakagami { .. }, LinkKind::Direct) => {
                // (m/γ̄)^m / Γ(m)
                m * (m / spec.mean_snr).ln() - specfun::log_gamma(m).expect("m >= 0.5")
            }
            (FadingFamily::Nakagami { .. }, LinkKind::Ratio) => {
                -specfun::ln_beta(m, m).expect("m >= 0.5")
            }
        };
        SnrDistribution {
            spec,
            link,
            ln_norm,
        }
    }

    pub fn direct(spec: FadingSpec) -> Self {
        Self::new(spec, LinkKind::Direct)
    }

    pub fn ratio(spec: FadingSpec) -> Self {
        Self::new(spec, LinkKind::Ratio)
    }

    pub fn spec(&self) -> &FadingSpec {
        &self.spec
    }

    pub fn link(&self) -> LinkKind {
        self.link
    }

    pub fn pdf(&self, x: f64) -> f64 {
        if !(x >= 0.0) {
            return 0.0;
        }
        match self.link {
            LinkKind::Direct => self.pdf_direct(x),
            LinkKind::Ratio => {
                let s = self.spec.mean_snr;
                self.pdf_ratio_unit(x / s) / s
            }
        }
    }

    /// CDF; a failed hypergeometric evaluation yields NaN, which the
    /// quadrature layer reports as an error. Use [`Self::try_cdf`] to see
    /// the cause.
    pub fn cdf(&self, x: f64) -> f64 {
        self.try_cdf(x).unwrap_or(f64::NAN)
    }

    pub fn try_cdf(&self, x: f64) -> Result<f64> {
        if !(x >= 0.0) {
            return if x.is_nan() {
                Err(Error::domain("cdf", "x is NaN"))
            } else {
                Ok(0.0)
            };
        }
        match self.link {
            LinkKind::Direct => self.cdf_direct(x),
            LinkKind::Ratio => self.cdf_ratio_unit(x / self.spec.mean_snr),
        }
    }

    /// Complementary CDF, accurate in the upper tail.
    pub fn sf(&self, x: f64) -> f64 {
        if !(x > 0.0) {
            return 1.0;
        }
        match (self.link, self.spec.family) {
            (LinkKind::Direct, FadingFamily::Rayleigh) => (-x / self.spec.mean_snr).exp(),
            (LinkKind::Direct, FadingFamily::Nakagami { m }) => {
                specfun::reg_upper_gamma(m, m * x / self.spec.mean_snr).unwrap_or(f64::NAN)
            }
            (LinkKind::Ratio, _) => {
                // X and 1/X share the Beta-prime(m, m) law.
                let u = x / self.spec.mean_snr;
                self.cdf_ratio_unit(1.0 / u).unwrap_or(f64::NAN)
            }
        }
    }

    fn pdf_direct(&self, x: f64) -> f64 {
        let mean = self.spec.mean_snr;
        match self.spec.family {
            FadingFamily::Rayleigh => (-x / mean).exp() / mean,
            FadingFamily::Nakagami { m } => {
                let rate = m / mean;
                if x == 0.0 {
                    return if m < 1.0 {
                        f64::INFINITY
                    } else if m == 1.0 {
                        rate
                    } else {
                        0.0
                    };
                }
                (self.ln_norm + (m - 1.0) * x.ln() - rate * x).exp()
            }
        }
    }

    fn cdf_direct(&self, x: f64) -> Result<f64> {
        let mean = self.spec.mean_snr;
        match self.spec.family {
            FadingFamily::Rayleigh => Ok(-(-x / mean).exp_m1()),
            FadingFamily::Nakagami { m } => specfun::reg_lower_gamma(m, m * x / mean),
        }
    }

    fn pdf_ratio_unit(&self, u: f64) -> f64 {
        match self.spec.family {
            FadingFamily::Rayleigh => 1.0 / ((1.0 + u) * (1.0 + u)),
            FadingFamily::Nakagami { m } => {
                if u == 0.0 {
                    return if m < 1.0 {
                        f64::INFINITY
                    } else if m == 1.0 {
                        1.0
                    } else {
                        0.0
                    };
                }
                if u.is_infinite() {
                    return 0.0;
                }
                (self.ln_norm + (m - 1.0) * u.ln() - 2.0 * m * u.ln_1p()).exp()
            }
        }
    }

    fn cdf_ratio_unit(&self, u: f64) -> Result<f64> {
        match self.spec.family {
            FadingFamily::Rayleigh => Ok(if u.is_infinite() { 1.0 } else { u / (1.0 + u) }),
            FadingFamily::Nakagami { m } => {
                if u == 0.0 {
                    return Ok(0.0);
                }
                if u.is_infinite() {
                    return Ok(1.0);
                }
                if u > 1.0 {
                    // F(u) = 1 − F(1/u) keeps the series argument in [0, 1/2].
                    return Ok(1.0 - self.cdf_ratio_small(m, 1.0 / u)?);
                }
                self.cdf_ratio_small(m, u)
            }
        }
    }

    /// (1/B(m,m))·(u^m/m)·₂F₁(m, 2m; 1+m; −u), for 0 < u ≤ 1.
    fn cdf_ratio_small(&self, m: f64, u: f64) -> Result<f64> {
        let f21 = specfun::hyp2f1(m, 2.0 * m, 1.0 + m, -u)?;
        Ok((self.ln_norm + m * u.ln() - m.ln()).exp() * f21)
    }

    /// Draws one SNR value.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self.link {
            LinkKind::Direct => self.spec.mean_snr * unit_mean_gain(self.spec.family, rng),
            LinkKind::Ratio => loop {
                let num = unit_mean_gain(self.spec.family, rng);
                let den = unit_mean_gain(self.spec.family, rng);
                if den > 0.0 {
                    break self.spec.mean_snr * num / den;
                }
            },
        }
    }
}

/// Unit-mean channel power gain: Exp(1) or Gamma(m, 1/m).
fn unit_mean_gain<R: Rng + ?Sized>(family: FadingFamily, rng: &mut R) -> f64 {
    match family {
        FadingFamily::Rayleigh => -(1.0 - rng.random::<f64>()).ln(),
        FadingFamily::Nakagami { m } => crate::mud::gamma_variate(m, rng) / m,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn direct(m: f64, mean: f64) -> SnrDistribution {
        SnrDistribution::direct(FadingSpec::from_shape(m, mean).unwrap())
    }

    fn ratio(m: f64, s: f64) -> SnrDistribution {
        SnrDistribution::ratio(FadingSpec::from_shape(m, s).unwrap())
    }

    #[test]
    fn rayleigh_direct_values() {
        let d = direct(1.0, 1.0);
        assert_eq!(d.pdf(0.0), 1.0);
        assert!((d.cdf(2f64.ln()) - 0.5).abs() < 1e-15);
        assert_eq!(d.cdf(0.0), 0.0);
    }

    #[test]
    fn nakagami_unit_shape_matches_rayleigh() {
        for &mean in &[0.3, 1.0, 17.0] {
            let r = direct(1.0, mean);
            let n = SnrDistribution::direct(FadingSpec::nakagami(1.0, mean).unwrap());
            for &x in &[0.0, 0.1, 1.0, 5.0] {
                assert!((r.pdf(x) - n.pdf(x)).abs() < 1e-12, "x = {x}");
                assert!((r.cdf(x) - n.cdf(x)).abs() < 1e-12, "x = {x}");
            }
            let rr = ratio(1.0, mean);
            let nr = SnrDistribution::ratio(FadingSpec::nakagami(1.0, mean).unwrap());
            for &x in &[0.0, 0.1, 1.0, 5.0, 300.0] {
                assert!((rr.pdf(x) - nr.pdf(x)).abs() < 1e-12);
                assert!((rr.cdf(x) - nr.cdf(x)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn nakagami_two_mode() {
        // 4x e^{−2x} peaks at x = 1/2
        let d = direct(2.0, 1.0);
        let p = d.pdf(0.5);
        assert!((p - 2.0 * (-1.0f64).exp()).abs() < 1e-14);
        assert!(p > d.pdf(0.5 - 1e-4) && p > d.pdf(0.5 + 1e-4));
        assert!((d.cdf(1.0) - specfun::reg_lower_gamma(2.0, 2.0).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn ratio_reference_values() {
        assert!((ratio(1.0, 1.0).pdf(1.0) - 0.25).abs() < 1e-15);
        assert_eq!(ratio(1.0, 1.0).pdf(0.0), 1.0);
        assert!((ratio(2.0, 1.0).pdf(1.0) - 0.375).abs() < 1e-13);
        assert!((ratio(1.0, 1.0).cdf(1.0) - 0.5).abs() < 1e-15);
        for &m in &[0.5, 1.0, 2.0, 3.7] {
            assert_eq!(ratio(m, 1.0).cdf(0.0), 0.0);
            assert!((ratio(m, 1.0).cdf(1.0) - 0.5).abs() < 1e-9, "m = {m}");
        }
    }

    #[test]
    fn ratio_scaling() {
        let unit = ratio(2.0, 1.0);
        let scaled = ratio(2.0, 8.0);
        for &x in &[0.2, 3.0, 40.0] {
            assert!((scaled.pdf(x) - unit.pdf(x / 8.0) / 8.0).abs() < 1e-15);
            assert!((scaled.cdf(x) - unit.cdf(x / 8.0)).abs() < 1e-15);
        }
    }

    #[test]
    fn ratio_unit_shape_cdf_closed_form() {
        let nak = SnrDistribution::ratio(FadingSpec::nakagami(1.0, 1.0).unwrap());
        let mut x = 0.0;
        while x <= 100.0 {
            assert!((nak.cdf(x) - x / (1.0 + x)).abs() < 1e-10, "x = {x}");
            x += 0.25;
        }
    }

    #[test]
    fn survival_complements_cdf() {
        for d in [
            direct(1.0, 2.0),
            direct(2.5, 2.0),
            ratio(1.0, 3.0),
            ratio(2.0, 3.0),
        ] {
            for &x in &[0.01, 1.0, 7.0, 60.0] {
                assert!((d.sf(x) + d.cdf(x) - 1.0).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(FadingSpec::nakagami(0.4, 1.0).is_err());
        assert!(FadingSpec::rayleigh(0.0).is_err());
        assert!(FadingSpec::rayleigh(f64::INFINITY).is_err());
    }
}
