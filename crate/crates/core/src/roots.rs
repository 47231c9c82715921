//! One-dimensional bracketed root finding and minimization.

use crate::error::{Error, Result};

/// Outcome of a bracketed solve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Root {
    pub x: f64,
    pub residual: f64,
    pub iterations: usize,
}

/// Finds a sign change of `f` in `[lo, hi]`.
///
/// Each step tries a secant (regula falsi) point from the current bracket
/// and falls back to the midpoint when that point is not finite, leaves the
/// bracket, or the previous step failed to halve it. Infinite endpoint values
/// are allowed as long as their sign is right. Stops when the bracket is
/// narrower than `xtol` or the residual is exactly zero.
pub fn bracketed<F>(mut f: F, lo: f64, hi: f64, xtol: f64, max_iter: usize) -> Result<Root>
where
    F: FnMut(f64) -> f64,
{
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa.is_nan() || fb.is_nan() {
        return Err(Error::Numerical(format!("NaN at bracket end ({fa}, {fb})")));
    }
    if fa == 0.0 {
        return Ok(Root {
            x: a,
            residual: 0.0,
            iterations: 0,
        });
    }
    if fb == 0.0 {
        return Ok(Root {
            x: b,
            residual: 0.0,
            iterations: 0,
        });
    }
    if fa.signum() == fb.signum() {
        return Err(Error::Numerical(format!(
            "root not bracketed on [{lo}, {hi}]: f = ({fa:e}, {fb:e})"
        )));
    }
    let mut width = b - a;
    let mut best = if fa.abs() < fb.abs() {
        (a, fa)
    } else {
        (b, fb)
    };
    for it in 1..=max_iter {
        let secant = if fa.is_finite() && fb.is_finite() {
            b - fb * (b - a) / (fb - fa)
        } else {
            f64::NAN
        };
        let mid = 0.5 * (a + b);
        let x = if secant.is_finite() && secant > a && secant < b && (b - a) < 0.5 * width {
            secant
        } else {
            mid
        };
        width = b - a;
        let fx = f(x);
        if fx.is_nan() {
            return Err(Error::Numerical(format!("NaN at x = {x}")));
        }
        if fx.abs() < best.1.abs() {
            best = (x, fx);
        }
        if fx == 0.0 {
            return Ok(Root {
                x,
                residual: 0.0,
                iterations: it,
            });
        }
        if fx.signum() == fa.signum() {
            a = x;
            fa = fx;
        } else {
            b = x;
            fb = fx;
        }
        if b - a <= xtol {
            // Keep polishing with secant steps from the tight bracket.
            let x = if fa.is_finite() && fb.is_finite() && fb != fa {
                let s = b - fb * (b - a) / (fb - fa);
                if s >= a && s <= b {
                    s
                } else {
                    best.0
                }
            } else {
                best.0
            };
            let fx = f(x);
            let (x, fx) = if fx.abs() <= best.1.abs() {
                (x, fx)
            } else {
                best
            };
            return Ok(Root {
                x,
                residual: fx,
                iterations: it,
            });
        }
    }
    Err(Error::Numerical(format!(
        "no convergence after {max_iter} iterations, bracket [{a}, {b}]"
    )))
}

/// Golden-section search for the minimum of a unimodal `f` on `[lo, hi]`.
pub fn golden_min<F>(mut f: F, lo: f64, hi: f64, xtol: f64) -> (f64, f64)
where
    F: FnMut(f64) -> f64,
{
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (lo, hi);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > xtol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}
