//! Bracketed root finding for positive, monotonically decreasing residuals.
//!
//! Every constraint in this crate is a strictly decreasing function of a
//! positive threshold, so the solver works in log space: it expands a
//! bracket geometrically, then runs Illinois-style false position with a
//! bisection fallback whenever the bracket fails to halve.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: f64,
    pub residual: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
    pub f_lo: f64,
    pub f_hi: f64,
}

/// Widens [lo, hi] by `factor` until `h(lo) ≥ 0 ≥ h(hi)`.
///
/// `h` must be decreasing. On failure the returned error carries the last
/// residual at the offending end.
pub fn expand_decreasing<F>(
    h: &mut F,
    mut lo: f64,
    mut hi: f64,
    factor: f64,
    max_expansions: usize,
    what: &'static str,
    target: f64,
) -> Result<Bracket>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut f_lo = h(lo)?;
    let mut n = 0;
    while f_lo < 0.0 {
        if n == max_expansions {
            return Err(Error::NoSolution {
                what,
                target,
                limit: f_lo + target,
            });
        }
        hi = lo;
        lo /= factor;
        f_lo = h(lo)?;
        n += 1;
    }
    let mut f_hi = h(hi)?;
    n = 0;
    while f_hi > 0.0 {
        if n == max_expansions {
            return Err(Error::NoSolution {
                what,
                target,
                limit: f_hi + target,
            });
        }
        lo = hi;
        f_lo = f_hi;
        hi *= factor;
        f_hi = h(hi)?;
        n += 1;
    }
    Ok(Bracket { lo, hi, f_lo, f_hi })
}

/// Finds x in the bracket with |h(x)| ≤ `f_tol`, or the best point once the
/// bracket has collapsed to floating-point resolution.
pub fn solve_decreasing<F>(h: &mut F, bracket: Bracket, f_tol: f64) -> Result<Root>
where
    F: FnMut(f64) -> Result<f64>,
{
    const MAX_ITER: usize = 200;
    if bracket.f_lo == 0.0 {
        return Ok(Root {
            x: bracket.lo,
            residual: 0.0,
            iterations: 0,
        });
    }
    if bracket.f_hi == 0.0 {
        return Ok(Root {
            x: bracket.hi,
            residual: 0.0,
            iterations: 0,
        });
    }
    let (mut a, mut fa) = (bracket.lo.ln(), bracket.f_lo);
    let (mut b, mut fb) = (bracket.hi.ln(), bracket.f_hi);
    let mut best = if fa.abs() < fb.abs() {
        (a, fa)
    } else {
        (b, fb)
    };
    let mut side = 0i8;
    let mut width = b - a;

    for iter in 1..=MAX_ITER {
        let mut c = b - fb * (b - a) / (fb - fa);
        let margin = 1e-3 * (b - a);
        if !(c > a + margin && c < b - margin) || iter % 4 == 0 && (b - a) > 0.5 * width {
            c = 0.5 * (a + b);
        }
        if iter % 4 == 0 {
            width = b - a;
        }
        let fc = h(c.exp())?;
        if fc.abs() < best.1.abs() {
            best = (c, fc);
        }
        if fc.abs() <= f_tol {
            return Ok(Root {
                x: c.exp(),
                residual: fc,
                iterations: iter,
            });
        }
        if fc > 0.0 {
            a = c;
            fa = fc;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        } else {
            b = c;
            fb = fc;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        }
        if b - a <= 4.0 * f64::EPSILON * a.abs().max(b.abs()).max(1.0) {
            return Ok(Root {
                x: best.0.exp(),
                residual: best.1,
                iterations: iter,
            });
        }
    }
    Ok(Root {
        x: best.0.exp(),
        residual: best.1,
        iterations: MAX_ITER,
    })
}
