//! Globally adaptive Gauss–Kronrod (7/15) quadrature.
//!
//! Subintervals live in a max-heap keyed by their error estimate; the worst
//! one is bisected until the summed estimate meets the tolerance. Half-lines
//! are mapped onto [0, 1) through a logarithmic tail map (see
//! [`integrate_to_infinity`]). Nodes are never placed on an interval
//! endpoint, so integrable endpoint singularities are fine.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the odd Kronrod nodes 1, 3, 5 and the centre.
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            abs: 1e-13,
            rel: 1e-11,
            max_intervals: 4000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub abs_error: f64,
    pub intervals: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        scaled = res_asc * (200.0 * scaled / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        scaled = scaled.max(50.0 * f64::EPSILON * res_abs);
    }
    scaled
}

fn kronrod15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(centre);
    let mut res_k = fc * WGK[7];
    let mut res_g = fc * WG[3];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let x = half * XGK[j];
        let f1 = f(centre - x);
        let f2 = f(centre + x);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let err = (res_k - res_g) * half;
    let scale = half.abs();
    (
        res_k * half,
        rescale_error(err, res_abs * scale, res_asc * scale),
    )
}

/// Integrates `f` over the finite interval [a, b].
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: &Tolerance) -> Result<Integral> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "integrate needs finite limits, got [{a}, {b}]"
        )));
    }
    if a == b {
        return Ok(Integral {
            value: 0.0,
            abs_error: 0.0,
            intervals: 0,
        });
    }
    if a > b {
        let r = adaptive(&f, b, a, tol, (a, b))?;
        return Ok(Integral {
            value: -r.value,
            ..r
        });
    }
    adaptive(&f, a, b, tol, (a, b))
}

/// Integrates `f` over [a, ∞).
///
/// [0, ½] maps linearly onto [a, b]; (½, 1) maps onto [b, ∞) through
/// x = b·e^u with u = τ/(1 − τ), τ = 2t − 1. In the log variable an
/// algebraic tail x^{-1-p} decays like e^{-pu}, so heavy tails stay smooth.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(f: F, a: f64, tol: &Tolerance) -> Result<Integral> {
    if !a.is_finite() {
        return Err(Error::InvalidInput(format!(
            "integrate_to_infinity needs a finite lower limit, got {a}"
        )));
    }
    let b = if a >= 0.0 { a + a.max(1.0) } else { 1.0 };
    let mapped = |t: f64| {
        if t <= 0.5 {
            return 2.0 * (b - a) * f(a + 2.0 * t * (b - a));
        }
        let tau = 2.0 * t - 1.0;
        let s = 1.0 - tau;
        let x = b * (tau / s).exp();
        if !x.is_finite() {
            return 0.0;
        }
        let v = f(x);
        if v == 0.0 {
            0.0
        } else {
            2.0 * v * x / (s * s)
        }
    };
    adaptive(&mapped, 0.0, 1.0, tol, (a, f64::INFINITY))
}

fn adaptive<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    tol: &Tolerance,
    limits: (f64, f64),
) -> Result<Integral> {
    let failure = |estimate: f64, abs_error: f64, reason: &'static str| Error::Quadrature {
        lower: limits.0,
        upper: limits.1,
        estimate,
        abs_error,
        reason,
    };

    let (value, error) = kronrod15(f, a, b);
    if !value.is_finite() || !error.is_finite() {
        return Err(failure(value, error, "integrand is not finite"));
    }
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value, error });
    let mut total = value;
    let mut total_err = error;
    // Segments too narrow to split keep their contribution here.
    let mut frozen_value = 0.0;
    let mut frozen_err = 0.0;
    let mut intervals = 1;

    loop {
        if total_err <= tol.abs.max(tol.rel * total.abs()) {
            break;
        }
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b)
            || (worst.b - worst.a) <= 4.0 * f64::EPSILON * mid.abs().max(f64::MIN_POSITIVE)
        {
            frozen_value += worst.value;
            frozen_err += worst.error;
            continue;
        }
        if intervals >= tol.max_intervals {
            heap.push(worst);
            return Err(failure(total, total_err, "subdivision limit reached"));
        }
        let (v1, e1) = kronrod15(f, worst.a, mid);
        let (v2, e2) = kronrod15(f, mid, worst.b);
        if !(v1.is_finite() && v2.is_finite() && e1.is_finite() && e2.is_finite()) {
            return Err(failure(total, total_err, "integrand is not finite"));
        }
        intervals += 1;
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.error;
        heap.push(Segment {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
        });
        heap.push(Segment {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
        });
    }

    // Re-sum to drop the running-update rounding.
    let (mut value, mut error) = (frozen_value, frozen_err);
    for s in heap.iter() {
        value += s.value;
        error += s.error;
    }
    if error > tol.abs.max(tol.rel * value.abs()) * 10.0 {
        return Err(failure(
            value,
            error,
            "roundoff prevents the requested accuracy",
        ));
    }
    Ok(Integral {
        value,
        abs_error: error,
        intervals,
    })
}
