//! Gamma-type special functions used by the closed-form jump moments.
//!
//! `statrs` supplies Γ, the incomplete gamma functions for positive order and
//! the exponential integral; the pieces here extend them to the non-positive
//! orders that appear once a power-law singularity `s^(-1-alpha)` is folded
//! into the integrand.

use statrs::function::exponential;
use statrs::function::gamma as sg;

use crate::error::{Result, SpdError};

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

pub fn gamma(x: f64) -> f64 {
    sg::gamma(x)
}

pub fn ln_gamma(x: f64) -> f64 {
    sg::ln_gamma(x)
}

/// Exponential integral E1(x), x > 0.
pub fn expint_e1(x: f64) -> f64 {
    exponential::integral(x, 1).unwrap_or(f64::NAN)
}

/// Upper incomplete gamma Γ(p, x) for any real `p` and `x > 0`.
pub fn upper_gamma(p: f64, x: f64) -> f64 {
    debug_assert!(x > 0.0);
    if p > 0.0 {
        if x > p + 1.0 {
            return upper_gamma_cf(p, x);
        }
        return sg::gamma_ui(p, x);
    }
    if p == 0.0 {
        return expint_e1(x);
    }
    if x >= 1.0 {
        return upper_gamma_cf(p, x);
    }
    // Upward to the first positive order (or zero), then back down with
    // Γ(s-1, x) = (Γ(s, x) - x^(s-1) e^(-x)) / (s-1).
    let steps = (-p).ceil() as i32;
    let mut s = p + steps as f64;
    let mut g = if s == 0.0 { expint_e1(x) } else { sg::gamma_ui(s, x) };
    let ex = (-x).exp();
    for _ in 0..steps {
        g = (g - x.powf(s - 1.0) * ex) / (s - 1.0);
        s -= 1.0;
    }
    g
}

/// Modified Lentz continued fraction for Γ(p, x); converges for x ≳ p + 1.
fn upper_gamma_cf(p: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0 - p;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..10_000 {
        let an = -(i as f64) * (i as f64 - p);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            break;
        }
    }
    (p * x.ln() - x).exp() * h
}

/// γ(p, x) = Γ(p) - Γ(p, x), analytically continued to non-integer `p < 0`.
pub fn lower_gamma(p: f64, x: f64) -> f64 {
    if p > 0.0 && x < p + 30.0 {
        if x > p + 1.0 {
            return gamma(p) - upper_gamma_cf(p, x);
        }
        return sg::gamma_li(p, x);
    }
    if x > 30.0 {
        return gamma(p) - upper_gamma(p, x);
    }
    // Kummer series x^p e^-x Σ x^k / (p)_{k+1}.
    let mut term = 1.0 / p;
    let mut sum = term;
    let mut k = 0.0;
    while k < 500.0 {
        k += 1.0;
        term *= x / (p + k);
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    (p * x.ln() - x).exp() * sum
}

/// ∫_a^b s^(p-1) e^(-mu s) ds for 0 ≤ a < b ≤ ∞ and mu ≥ 0.
pub fn pow_exp_integral(p: f64, mu: f64, a: f64, b: f64) -> Result<f64> {
    if !(a >= 0.0 && b > a) {
        return Ok(0.0);
    }
    let divergent = |what: &str| Err(SpdError::DivergentMoment(format!("∫ s^{}·e^(-{mu}s) {what}", p - 1.0)));
    if mu == 0.0 {
        if a == 0.0 && p <= 0.0 {
            return divergent("at 0");
        }
        if b.is_infinite() && p >= 0.0 {
            return divergent("at ∞");
        }
        if p == 0.0 {
            return Ok((b / a).ln());
        }
        let upper = if b.is_infinite() { 0.0 } else { b.powf(p) };
        let lower = if a == 0.0 { 0.0 } else { a.powf(p) };
        return Ok((upper - lower) / p);
    }
    if a == 0.0 && p <= 0.0 {
        return divergent("at 0");
    }
    let scale = mu.powf(-p);
    let (xa, xb) = (mu * a, mu * b);
    let value = if a == 0.0 {
        if b.is_infinite() {
            gamma(p)
        } else {
            lower_gamma(p, xb)
        }
    } else if b.is_infinite() {
        upper_gamma(p, xa)
    } else if p > 0.0 && xa < 1.0 {
        lower_gamma(p, xb) - lower_gamma(p, xa)
    } else {
        upper_gamma(p, xa) - upper_gamma(p, xb)
    };
    Ok(scale * value)
}
