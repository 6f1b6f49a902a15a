//! Monte Carlo estimates of every analytic metric.
//!
//! Each draw samples `L` channel realisations, keeps the best user and
//! applies the solved policy to that SNR. Nothing here calls the quadrature
//! or root-finding code; the policies enter only through their thresholds.
//!
//! Draws are split into batches of `McConfig::batch`. Batch `i` runs on a
//! ChaCha8 generator seeded with `McConfig::seed` on stream `i`, and batch
//! accumulators are merged in index order, so results are bit-identical for
//! a given seed no matter how many worker threads run.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::mud::MudDistribution;
use crate::power::{ConstellationSet, CutoffSolution, DrPolicy, Policy};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McConfig {
    pub samples: u64,
    pub seed: u64,
    pub batch: u64,
}

impl McConfig {
    pub fn new(samples: u64, seed: u64) -> Self {
        McConfig {
            samples: samples.max(1),
            seed,
            batch: 65_536,
        }
    }

    fn batches(&self) -> impl IndexedParallelIterator<Item = (u64, u64)> + '_ {
        let batch = self.batch.max(1);
        let count = self.samples.div_ceil(batch) as usize;
        (0..count).into_par_iter().map(move |i| {
            let i = i as u64;
            let start = i * batch;
            (i, batch.min(self.samples - start))
        })
    }

    fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    /// sample standard deviation / √n
    pub stderr: f64,
    pub samples: u64,
}

#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, v: f64) {
        self.n += 1;
        let d = v - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (v - self.mean);
    }

    // Chan et al. pairwise merge
    fn merge(self, other: Moments) -> Moments {
        if self.n == 0 {
            return other;
        }
        if other.n == 0 {
            return self;
        }
        let n = self.n + other.n;
        let d = other.mean - self.mean;
        let mean = self.mean + d * other.n as f64 / n as f64;
        let m2 = self.m2 + other.m2 + d * d * self.n as f64 * other.n as f64 / n as f64;
        Moments { n, mean, m2 }
    }

    fn estimate(&self) -> McEstimate {
        let var = if self.n > 1 {
            self.m2 / (self.n - 1) as f64
        } else {
            0.0
        };
        McEstimate {
            mean: self.mean,
            stderr: (var / self.n as f64).sqrt(),
            samples: self.n,
        }
    }
}

/// Mean of `per_draw(x)` over draws of the best-user SNR x.
pub fn estimate<F>(dist: &MudDistribution, cfg: &McConfig, per_draw: F) -> McEstimate
where
    F: Fn(f64) -> f64 + Sync,
{
    let parts: Vec<Moments> = cfg
        .batches()
        .map(|(i, n)| {
            let mut rng = cfg.rng(i);
            let mut acc = Moments::default();
            for _ in 0..n {
                acc.push(per_draw(dist.sample(&mut rng)));
            }
            acc
        })
        .collect();
    parts
        .into_iter()
        .fold(Moments::default(), Moments::merge)
        .estimate()
}

fn log_rate(x: f64, threshold: f64) -> f64 {
    if x > threshold {
        (x / threshold).log2()
    } else {
        0.0
    }
}

pub fn mc_capacity(dist: &MudDistribution, cut: &CutoffSolution, cfg: &McConfig) -> McEstimate {
    let g0 = cut.gamma0;
    estimate(dist, cfg, |x| log_rate(x, g0))
}

pub fn mc_se_cr(
    dist: &MudDistribution,
    cut: &CutoffSolution,
    k: f64,
    cfg: &McConfig,
) -> McEstimate {
    let threshold = cut.gamma0 / k;
    estimate(dist, cfg, |x| log_rate(x, threshold))
}

/// Index into `set.sizes()` of the constellation used at SNR `x`; 0 is
/// outage.
fn region_of(x: f64, gamma_star: f64, sizes: &[u32]) -> usize {
    let mut region = 0;
    for (j, &m) in sizes.iter().enumerate().skip(1) {
        if x >= m as f64 * gamma_star {
            region = j;
        } else {
            break;
        }
    }
    region
}

pub fn mc_se_dr(
    dist: &MudDistribution,
    pol: &DrPolicy,
    set: &ConstellationSet,
    cfg: &McConfig,
) -> McEstimate {
    let sizes = set.sizes();
    let gs = pol.gamma_star;
    estimate(dist, cfg, |x| match region_of(x, gs, sizes) {
        0 => 0.0,
        j => (sizes[j] as f64).log2(),
    })
}

/// Empirical frequency of outage followed by each active region.
pub fn mc_region_frequencies(
    dist: &MudDistribution,
    pol: &DrPolicy,
    set: &ConstellationSet,
    cfg: &McConfig,
) -> Vec<f64> {
    let sizes = set.sizes();
    let counts: Vec<Vec<u64>> = cfg
        .batches()
        .map(|(i, n)| {
            let mut rng = cfg.rng(i);
            let mut counts = vec![0u64; sizes.len()];
            for _ in 0..n {
                counts[region_of(dist.sample(&mut rng), pol.gamma_star, sizes)] += 1;
            }
            counts
        })
        .collect();
    let mut total = vec![0u64; sizes.len()];
    for c in counts {
        for (t, v) in total.iter_mut().zip(c) {
            *t += v;
        }
    }
    total
        .into_iter()
        .map(|c| c as f64 / cfg.samples as f64)
        .collect()
}

/// Average normalized transmit power P/P̄ spent by `policy`.
pub fn mc_power_check(dist: &MudDistribution, policy: &Policy, cfg: &McConfig) -> McEstimate {
    match policy {
        Policy::Capacity(cut) => {
            let g0 = cut.gamma0;
            estimate(dist, cfg, |x| if x > g0 { 1.0 / g0 - 1.0 / x } else { 0.0 })
        }
        Policy::ContinuousRate { cutoff, k } => {
            let (g0, k) = (cutoff.gamma0, *k);
            estimate(dist, cfg, |x| {
                if x >= g0 / k {
                    1.0 / g0 - 1.0 / (x * k)
                } else {
                    0.0
                }
            })
        }
        Policy::DiscreteRate { policy, set } => {
            let sizes = set.sizes();
            let (gs, k) = (policy.gamma_star, set.k());
            estimate(dist, cfg, |x| match region_of(x, gs, sizes) {
                0 => 0.0,
                j => (sizes[j] as f64 - 1.0) / (x * k),
            })
        }
    }
}
