//! Best-of-L user selection.
//!
//! The transmitter serves whichever of `L` i.i.d. users reports the largest
//! SNR, so the selected SNR has CDF F(x)^L and density L·f(x)·F(x)^{L−1}.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::fading::SnrDistribution;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MudDistribution {
    base: SnrDistribution,
    users: u32,
}

impl MudDistribution {
    pub fn new(base: SnrDistribution, users: u32) -> Result<Self> {
        if users == 0 {
            return Err(Error::InvalidInput("number of users must be >= 1".into()));
        }
        Ok(MudDistribution { base, users })
    }

    pub fn base(&self) -> &SnrDistribution {
        &self.base
    }

    pub fn users(&self) -> u32 {
        self.users
    }

    pub fn pdf(&self, x: f64) -> f64 {
        let f = self.base.pdf(x);
        if self.users == 1 {
            return f;
        }
        let cdf = self.base.cdf(x);
        let tail = cdf.powi(self.users as i32 - 1);
        if tail == 0.0 {
            return 0.0;
        }
        self.users as f64 * f * tail
    }

    pub fn cdf(&self, x: f64) -> f64 {
        self.base.cdf(x).powi(self.users as i32)
    }

    /// 1 − F(x)^L without cancellation when F(x) is close to one.
    pub fn sf(&self, x: f64) -> f64 {
        if self.users == 1 {
            return self.base.sf(x);
        }
        let sf = self.base.sf(x);
        // 1 − (1 − q)^L = −expm1(L·ln1p(−q))
        -(self.users as f64 * (-sf).ln_1p()).exp_m1()
    }

    /// Draws `L` base SNRs and keeps the largest.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let mut best = self.base.sample(rng);
        for _ in 1..self.users {
            best = best.max(self.base.sample(rng));
        }
        best
    }
}

/// Gamma(shape, 1) variate.
///
/// Marsaglia–Tsang squeeze/rejection for shape ≥ 1; shapes below one are
/// boosted through Gamma(shape + 1)·U^{1/shape}.
pub fn gamma_variate<R: Rng + ?Sized>(shape: f64, rng: &mut R) -> f64 {
    if shape < 1.0 {
        let u: f64 = 1.0 - rng.random::<f64>();
        return gamma_variate(shape + 1.0, rng) * u.powf(1.0 / shape);
    }
    let d = shape - 1.0 / 3.0;
    let c = 1.0 / (9.0 * d).sqrt();
    loop {
        let z: f64 = rng.sample(StandardNormal);
        let t = 1.0 + c * z;
        if t <= 0.0 {
            continue;
        }
        let v = t * t * t;
        let u: f64 = rng.random();
        let z2 = z * z;
        if u < 1.0 - 0.0331 * z2 * z2 {
            return d * v;
        }
        if u.ln() < 0.5 * z2 + d * (1.0 - v + v.ln()) {
            return d * v;
        }
    }
}
