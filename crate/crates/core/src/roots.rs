//! Bracketed root finding for monotone functions.

use crate::error::{Result, SpdError};

/// Safeguarded Newton iteration for an increasing function on `[lo, hi]`
/// with `f(lo) ≤ 0 ≤ f(hi)`.
///
/// `f` returns `(value, derivative)`. A Newton step is taken only when it
/// lands strictly inside the current bracket; after three steps that fail to
/// halve the bracket the iteration switches to bisection.
pub fn newton_bracketed<F>(f: F, mut lo: f64, mut hi: f64, abs_tol: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<(f64, f64)>,
{
    if !(lo < hi) {
        return Err(SpdError::NoBracket(format!("empty bracket [{lo}, {hi}]")));
    }
    let mut x = 0.5 * (lo + hi);
    let mut stalled = 0;
    let mut width = hi - lo;
    for _ in 0..400 {
        let (fx, dfx) = f(x)?;
        if fx == 0.0 {
            return Ok(x);
        }
        if fx < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        if hi - lo <= abs_tol {
            return Ok(0.5 * (lo + hi));
        }
        let newton = x - fx / dfx;
        let contracting = (hi - lo) <= 0.5 * width;
        width = hi - lo;
        if contracting {
            stalled = 0;
        } else {
            stalled += 1;
        }
        let step_ok = dfx > 0.0 && newton.is_finite() && newton > lo && newton < hi && stalled < 3;
        let next = if step_ok { newton } else { 0.5 * (lo + hi) };
        if (next - x).abs() <= abs_tol {
            // converged in x; confirm the sign change straddles the tolerance
            let probe = if fx < 0.0 {
                (next + abs_tol).min(hi)
            } else {
                (next - abs_tol).max(lo)
            };
            let (fp, _) = f(probe)?;
            if (fp < 0.0) != (fx < 0.0) || fp == 0.0 {
                return Ok(next);
            }
        }
        if !step_ok {
            stalled = 0;
        }
        x = next;
    }
    Err(SpdError::NoConvergence(format!(
        "newton bracket [{lo}, {hi}] did not collapse"
    )))
}

/// Plain bisection for an increasing function, returning the sign-change point.
pub fn bisect<F>(f: F, mut lo: f64, mut hi: f64, abs_tol: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= abs_tol || mid <= lo || mid >= hi {
            return Ok(mid);
        }
        if f(mid)? <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Grows `start` geometrically until `pred` holds, up to an overflow guard.
pub fn expand_up<F>(start: f64, pred: F) -> Result<f64>
where
    F: Fn(f64) -> Result<bool>,
{
    let mut x = start.max(f64::MIN_POSITIVE);
    while x < 1e250 {
        if pred(x)? {
            return Ok(x);
        }
        x *= 2.0;
    }
    Err(SpdError::NoBracket(format!("no bracket found growing from {start}")))
}

/// Shrinks `start` geometrically until `pred` holds, down to an underflow guard.
pub fn expand_down<F>(start: f64, pred: F) -> Result<f64>
where
    F: Fn(f64) -> Result<bool>,
{
    let mut x = start;
    while x > 1e-250 {
        if pred(x)? {
            return Ok(x);
        }
        x *= 0.5;
    }
    Err(SpdError::NoBracket(format!("no bracket found shrinking from {start}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn newton_finds_square_root() {
        let r = newton_bracketed(|x| Ok((x * x - 2.0, 2.0 * x)), 0.0, 4.0, 1e-15).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn newton_survives_bad_derivative() {
        // derivative lies by a factor of 100: the safeguard must still converge
        let r = newton_bracketed(|x: f64| Ok((x.powi(3) - 8.0, 100.0 * x * x + 1e-3)), 0.0, 10.0, 1e-13).unwrap();
        assert!((r - 2.0).abs() < 1e-12);
    }

    #[test]
    fn bisect_and_expand() {
        let hi = expand_up(1.0, |x| Ok(x > 1000.0)).unwrap();
        assert!(hi > 1000.0 && hi <= 2048.0);
        let r = bisect(|x| Ok(x - 3.0), 0.0, hi, 1e-13).unwrap();
        assert!((r - 3.0).abs() < 1e-12);
        assert!(expand_up(1.0, |_| Ok(false)).is_err());
    }
}
