//! Reference implementations used only by the integration tests. They share
//! no code with the library's quadrature or root finders.

#![allow(dead_code)]

use std::path::PathBuf;

/// Tanh-sinh quadrature on [a, b]. `f` is called as f(x, dist_to_a,
/// dist_to_b) so integrable endpoint singularities can be evaluated without
/// cancellation.
pub fn tanh_sinh<F: Fn(f64, f64, f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    let half = 0.5 * (b - a);
    let node = |t: f64| -> f64 {
        let s = std::f64::consts::FRAC_PI_2 * t.sinh();
        let c = s.cosh();
        let w = std::f64::consts::FRAC_PI_2 * t.cosh() / (c * c);
        // 1 − tanh(s) and 1 + tanh(s), computed without cancellation
        let one_minus = 2.0 / (1.0 + (2.0 * s).exp());
        let one_plus = 2.0 / (1.0 + (-2.0 * s).exp());
        let dl = half * one_plus;
        let dr = half * one_minus;
        if dl <= 0.0 || dr <= 0.0 || !w.is_finite() || w == 0.0 {
            return 0.0;
        }
        let x = if dl < dr { a + dl } else { b - dr };
        let v = f(x, dl, dr);
        if v.is_finite() {
            w * v
        } else {
            0.0
        }
    };
    let t_max = 6.5;
    let mut h = 0.5;
    let mut sum = node(0.0);
    let mut k = 1;
    while k as f64 * h <= t_max {
        let t = k as f64 * h;
        sum += node(t) + node(-t);
        k += 1;
    }
    let mut estimate = sum * h * half;
    for _ in 0..12 {
        h *= 0.5;
        let mut add = 0.0;
        let mut k = 1;
        while k as f64 * h <= t_max {
            let t = k as f64 * h;
            add += node(t) + node(-t);
            k += 2;
        }
        sum += add;
        let next = sum * h * half;
        if (next - estimate).abs() <= tol * next.abs().max(1e-300) {
            return next;
        }
        estimate = next;
    }
    estimate
}

/// ∫_a^b f(x) dx.
pub fn integral<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    tanh_sinh(|x, _, _| f(x), a, b, 1e-13)
}

/// ∫_a^∞ f(x) dx through x = a + u/(1−u).
pub fn integral_to_infinity<F: Fn(f64) -> f64>(f: F, a: f64) -> f64 {
    tanh_sinh(
        |_, u, one_minus_u| {
            let x = a + u / one_minus_u;
            let v = f(x);
            if v == 0.0 {
                0.0
            } else {
                v / (one_minus_u * one_minus_u)
            }
        },
        0.0,
        1.0,
        1e-13,
    )
}

/// Piecewise version of `integral_to_infinity` that splits at `breaks`,
/// used when the integrand has kinks.
pub fn integral_to_infinity_split<F: Fn(f64) -> f64>(f: F, a: f64, breaks: &[f64]) -> f64 {
    let mut total = 0.0;
    let mut lo = a;
    for &b in breaks.iter().filter(|&&b| b > a) {
        total += integral(&f, lo, b);
        lo = b;
    }
    total + integral_to_infinity(&f, lo)
}

/// Plain bisection for a root of `g` in [lo, hi] (sign change required).
pub fn bisect<G: Fn(f64) -> f64>(g: G, mut lo: f64, mut hi: f64) -> f64 {
    let mut g_lo = g(lo);
    assert!(g_lo * g(hi) <= 0.0, "no sign change on [{lo}, {hi}]");
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let g_mid = g(mid);
        if g_mid == 0.0 {
            return mid;
        }
        if (g_mid < 0.0) == (g_lo < 0.0) {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi.abs() {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// E1(x) from its defining integral.
pub fn e1(x: f64) -> f64 {
    integral_to_infinity(|t| (-t).exp() / t, x)
}

pub fn configs_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

/// Small deterministic generator for test inputs.
pub struct SplitMix(pub u64);

impl SplitMix {
    pub fn next_f64(&mut self) -> f64 {
        self.0 = self.0.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        ((z ^ (z >> 31)) >> 11) as f64 / (1u64 << 53) as f64
    }
}
