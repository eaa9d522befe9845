//! Reference densities by numerical inversion of the Laplace transform along
//! a vertical contour:
//!
//! `p(t, x) = e^(tφ(w) + wx) / π · ∫_0^∞ Re exp{t(φ(w+iλ) − φ(w)) + iλx} dλ`.
//!
//! The integral runs over Gauss–Legendre panels `[0,h], [h,2h], [2h,4h], …`
//! with dyadic refinement inside each panel, and is truncated once a fitted
//! stretched-exponential majorant of the integrand modulus says the
//! remainder is negligible. The `w = 0` line gives an independent second
//! route through ψ.

use std::cell::RefCell;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::density::{DensityEstimate, Method};
use crate::error::{Result, SpdError};
use crate::exponents::ExponentSuite;
use crate::quadrature::{gauss_legendre_32, integrate, QuadOptions};
use crate::saddlepoint::saddle_w;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContourW {
    AutoSaddle,
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleConfig {
    pub rel_tol: f64,
    pub contour_w: ContourW,
    pub max_nodes: usize,
    /// Decay index q in the majorant `exp(A − Bλ^q)`; defaults to the
    /// model's small-jump index.
    pub tail_alpha: Option<f64>,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            contour_w: ContourW::AutoSaddle,
            max_nodes: 4_000_000,
            tail_alpha: None,
        }
    }
}

impl OracleConfig {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            return Err(SpdError::InvalidParameter {
                path: "rel_tol".into(),
                reason: format!("must lie in (0, 1), got {}", self.rel_tol),
            });
        }
        if let ContourW::Fixed(w) = self.contour_w {
            if !(w > 0.0 && w.is_finite()) {
                return Err(SpdError::InvalidParameter {
                    path: "contour_w".into(),
                    reason: format!("fixed abscissa must be positive, got {w}"),
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
struct ContourOutput {
    integral: f64,
    err: f64,
    nodes: usize,
}

/// ∫_0^∞ Re e^{g(λ)} dλ where `Re g ≤ 0` decays like `-Bλ^q` and each
/// evaluation of `g` carries absolute rounding noise up to `g_noise`.
fn contour_integral<G>(g: &G, h: f64, q: f64, rel_tol: f64, max_nodes: usize, g_noise: f64) -> Result<ContourOutput>
where
    G: Fn(f64) -> Result<Complex64>,
{
    let (nodes, weights) = gauss_legendre_32();
    let used = std::cell::Cell::new(0usize);
    let gl = |a: f64, b: f64| -> Result<(f64, f64)> {
        let (c, r) = (0.5 * (a + b), 0.5 * (b - a));
        let (mut v, mut m) = (0.0, 0.0);
        for (xi, wi) in nodes.iter().zip(weights) {
            let e = g(c + r * xi)?.exp();
            v += wi * e.re;
            m += wi * e.norm();
        }
        used.set(used.get() + nodes.len());
        Ok((v * r, m * r))
    };
    let q = q.max(1.0);
    let noise = (10.0 * f64::EPSILON).max(2.0 * g_noise);
    let mut total = 0.0;
    let mut abs_total = 0.0;
    let mut err = 0.0;
    let mut a = 0.0;
    let mut b = h;
    for _ in 0..4000 {
        let (whole, whole_abs) = gl(a, b)?;
        let panel_width = b - a;
        let mut stack = vec![(a, b, whole, whole_abs, 0u32)];
        let (mut pv, mut pa) = (0.0, 0.0);
        while let Some((lo, hi, v, va, depth)) = stack.pop() {
            let mid = 0.5 * (lo + hi);
            let (l, la) = gl(lo, mid)?;
            let (r, ra) = gl(mid, hi)?;
            let diff = (l + r - v).abs();
            let frac = (hi - lo) / panel_width;
            let scale = (total + whole).abs();
            let floor = noise * (la + ra).max((abs_total + whole_abs) * frac);
            let target = (0.01 * rel_tol * scale * frac).max(floor);
            if diff <= target || depth >= 24 || mid <= lo || mid >= hi {
                pv += l + r;
                pa += la + ra;
                err += diff.min(va + la + ra);
            } else {
                stack.push((lo, mid, l, la, depth + 1));
                stack.push((mid, hi, r, ra, depth + 1));
            }
            if used.get() > max_nodes {
                return Err(SpdError::NoConvergence(format!(
                    "contour quadrature exceeded {max_nodes} nodes at λ ≈ {hi:e}"
                )));
            }
        }
        total += pv;
        abs_total += pa;
        if b >= 4.0 * h {
            let u = b;
            let l_u = g(u)?.re;
            let l_half = g(0.5 * u)?.re;
            let slope = (l_half - l_u) / (u.powf(q) - (0.5 * u).powf(q));
            let target = (0.01 * rel_tol * total.abs()).max(f64::EPSILON * abs_total);
            if slope > 0.0 && l_u < l_half {
                let bound = 4.0 * l_u.exp() / (slope * q * u.powf(q - 1.0));
                let crude = l_u.exp() * u;
                if bound <= target && crude <= target {
                    err += bound;
                    return Ok(ContourOutput {
                        integral: total,
                        err: err + noise * abs_total,
                        nodes: used.get(),
                    });
                }
            } else if l_u < -745.0 && l_half < -745.0 {
                return Ok(ContourOutput {
                    integral: total,
                    err: err + noise * abs_total,
                    nodes: used.get(),
                });
            }
        }
        a = b;
        b *= 2.0;
        if !b.is_finite() {
            break;
        }
    }
    Err(SpdError::NoConvergence("contour integrand did not decay".into()))
}

fn check_tx(t: f64, x: f64) -> Result<()> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(SpdError::InvalidParameter {
            path: "t".into(),
            reason: format!("must be positive and finite, got {t}"),
        });
    }
    if !x.is_finite() {
        return Err(SpdError::InvalidParameter {
            path: "x".into(),
            reason: "must be finite".into(),
        });
    }
    Ok(())
}

fn decay_index(suite: &ExponentSuite, config: &OracleConfig) -> f64 {
    config.tail_alpha.unwrap_or_else(|| suite.model().decay_index())
}

/// Contour abscissa and the λ-scale of the integrand's central bump.
fn resolve_contour(suite: &ExponentSuite, t: f64, x: f64, config: &OracleConfig) -> Result<(f64, f64)> {
    match config.contour_w {
        ContourW::Fixed(w) => {
            let h = 1.0 / (t * suite.phi(w, 2)?).sqrt();
            Ok((w, h.min(suite.big_phi_inv(1.0 / t)?)))
        }
        ContourW::AutoSaddle => {
            if let Some(c) = left_contour(suite, t, x)? {
                return Ok(c);
            }
            if x < 0.0 {
                match saddle_w(suite, t, x) {
                    Ok(s) => return Ok((s.w, 1.0 / (t * s.phi_d2).sqrt())),
                    Err(SpdError::OutOfRange(_)) => {}
                    Err(e) => return Err(e),
                }
            }
            let scale = suite.big_phi_inv(1.0 / t)?;
            let w = if x > 0.0 { scale.min(1.0 / x) } else { scale };
            Ok((w, scale))
        }
    }
}

/// φ on the real axis, continued to negative arguments through the complex form.
fn phi_real(suite: &ExponentSuite, w: f64) -> Result<f64> {
    if w >= 0.0 {
        suite.phi(w, 0)
    } else {
        Ok(suite.phi_complex(Complex64::new(w, 0.0))?.re)
    }
}

/// φ' by complex-step differentiation.
fn phi_d1_step(suite: &ExponentSuite, w: f64) -> Result<f64> {
    if w == 0.0 {
        return suite.phi(0.0, 1);
    }
    let eps = 1e-30 * w.abs().max(1.0);
    Ok(suite.phi_complex(Complex64::new(w, eps))?.im / eps)
}

/// Real saddle on `(-r, 0)` for `x > 0` when the jumps carry exponential
/// moments of order `r`. Falls back to an abscissa `1/x` inside the
/// boundary when `φ'` stays above `-x/t` on the whole interval.
fn left_contour(suite: &ExponentSuite, t: f64, x: f64) -> Result<Option<(f64, f64)>> {
    let r = suite.model().exponential_moment_bound();
    if x <= 0.0 || r <= 0.0 {
        return Ok(None);
    }
    let target = -x / t;
    if phi_d1_step(suite, 0.0)? <= target {
        return Ok(None);
    }
    let mut lo = if r.is_finite() { -r * (1.0 - 1e-12) } else { -1.0 };
    if !r.is_finite() {
        let mut k = 0;
        while phi_d1_step(suite, lo)? > target {
            lo *= 2.0;
            k += 1;
            if k > 200 {
                return Ok(None);
            }
        }
    }
    let w = if phi_d1_step(suite, lo)? > target {
        -r + (0.5 * r).min(1.0 / x)
    } else {
        let (mut a, mut b) = (lo, 0.0);
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if m == a || m == b {
                break;
            }
            if phi_d1_step(suite, m)? > target {
                b = m;
            } else {
                a = m;
            }
        }
        0.5 * (a + b)
    };
    let room = if r.is_finite() { (w + r).min(-w) } else { -w };
    let delta = 1e-4 * room;
    let d2 = (phi_d1_step(suite, w + delta)? - phi_d1_step(suite, w - delta)?) / (2.0 * delta);
    if !(d2.is_finite() && d2 > 0.0) {
        return Ok(None);
    }
    let h = 1.0 / (t * d2).sqrt();
    Ok(Some((w, h.min(suite.big_phi_inv(1.0 / t)?))))
}

fn finish(
    ln_prefactor: f64,
    out: ContourOutput,
    rel_tol: f64,
    typical: f64,
    w: Option<f64>,
) -> Result<DensityEstimate> {
    let err_abs = (ln_prefactor + out.err.ln()).exp();
    let mut clamped = false;
    let ln_value = if out.integral > 0.0 {
        ln_prefactor + out.integral.ln()
    } else {
        let value = -(ln_prefactor + (-out.integral).ln()).exp();
        let tol = (2.0 * err_abs).max(rel_tol * typical);
        if out.integral < 0.0 && value < -tol {
            return Err(SpdError::NegativeDensity { value, tol });
        }
        clamped = true;
        f64::NEG_INFINITY
    };
    let mut d = DensityEstimate::from_ln(ln_value, Method::Oracle, err_abs);
    d.clamped = clamped;
    d.contour_w = w;
    d.nodes_used = out.nodes;
    Ok(d)
}

/// Runs the contour quadrature and repeats it once at a tighter tolerance
/// when the reported error exceeds the request.
fn integrate_with_retry<G>(g: &G, h: f64, q: f64, g_noise: f64, config: &OracleConfig) -> Result<ContourOutput>
where
    G: Fn(f64) -> Result<Complex64>,
{
    let first = contour_integral(g, h, q, config.rel_tol, config.max_nodes, g_noise)?;
    if first.err <= config.rel_tol * first.integral.abs() {
        return Ok(first);
    }
    let second = contour_integral(g, h, q, config.rel_tol * 1e-2, config.max_nodes, g_noise)?;
    Ok(ContourOutput {
        nodes: first.nodes + second.nodes,
        ..second
    })
}

/// Density by inversion along `Re z = w` (saddle contour when available).
pub fn density_oracle(suite: &ExponentSuite, t: f64, x: f64, config: &OracleConfig) -> Result<DensityEstimate> {
    check_tx(t, x)?;
    config.validate()?;
    let (w, h) = resolve_contour(suite, t, x, config)?;
    let phi_w = phi_real(suite, w)?;
    let g = |lam: f64| -> Result<Complex64> {
        let z = suite.phi_complex(Complex64::new(w, lam))?;
        Ok(t * (z - phi_w) + Complex64::new(0.0, lam * x))
    };
    let g_noise = 4.0 * f64::EPSILON * t * phi_w.abs();
    let out = integrate_with_retry(&g, h, decay_index(suite, config), g_noise, config)?;
    let ln_prefactor = t * phi_w + w * x - std::f64::consts::PI.ln();
    let typical = suite.big_phi_inv(1.0 / t).unwrap_or(1.0);
    finish(ln_prefactor, out, config.rel_tol, typical, Some(w))
}

/// Density by Fourier inversion of `e^{-tψ}` along the imaginary axis.
pub fn density_oracle_psi(suite: &ExponentSuite, t: f64, x: f64, config: &OracleConfig) -> Result<DensityEstimate> {
    check_tx(t, x)?;
    config.validate()?;
    let h = suite.big_phi_inv(1.0 / t)?;
    let g = |xi: f64| -> Result<Complex64> {
        if xi == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        Ok(-t * suite.char_exponent(xi)? - Complex64::new(0.0, xi * x))
    };
    let out = integrate_with_retry(&g, h, decay_index(suite, config), 0.0, config)?;
    finish(-std::f64::consts::PI.ln(), out, config.rel_tol, h, Some(0.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossContour {
    pub value_saddle_contour: f64,
    pub value_psi_contour: f64,
    pub discrepancy: f64,
}

/// Both inversion routes and their relative discrepancy.
pub fn oracle_cross_contour(suite: &ExponentSuite, t: f64, x: f64, config: &OracleConfig) -> Result<CrossContour> {
    let a = density_oracle(suite, t, x, config)?.value;
    let b = density_oracle_psi(suite, t, x, config)?.value;
    let denom = a.max(b).max(f64::MIN_POSITIVE);
    Ok(CrossContour {
        value_saddle_contour: a,
        value_psi_contour: b,
        discrepancy: (a - b).abs() / denom,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MassReport {
    pub mass: f64,
    pub left_cut: f64,
    pub right_cut: f64,
    /// Estimated mass beyond `right_cut`.
    pub right_tail: f64,
}

/// ∫ p(t, x) dx: adaptive quadrature of the oracle on `[left_cut, right_cut]`
/// plus an analytic right-tail correction fitted to `a x^(-1-α) + b x^(-1-2α)`
/// for power-law tails. The left tail decays super-exponentially and is cut
/// where the density is negligible.
pub fn total_mass(suite: &ExponentSuite, t: f64, config: &OracleConfig) -> Result<MassReport> {
    check_tx(t, 0.0)?;
    let ell = 1.0 / suite.big_phi_inv(1.0 / t)?;
    let center = match suite.model().mean_at_one() {
        Ok(m) if m.is_finite() => t * m,
        _ => 0.0,
    };
    let p = |x: f64| -> Result<f64> { Ok(density_oracle(suite, t, x, config)?.value) };
    // a cut is far enough once the density is negligible or at the oracle's noise level
    let negligible = |x: f64, peak: f64| -> Result<bool> {
        let d = density_oracle(suite, t, x, config)?;
        Ok(d.value * (x - center).abs() <= 1e-13 * peak * ell || d.value <= 2.0 * d.error_indicator)
    };
    let peak = p(center)?;
    let mut left = center - 2.0 * ell;
    while !negligible(left, peak)? {
        left = center - 2.0 * (center - left);
    }
    let tail_index = suite.model().jumps.as_ref().and_then(|j| j.power_tail_index());
    let mut right = center + 100.0 * ell;
    let right_tail = match tail_index {
        Some(alpha) if alpha.is_finite() => {
            let (x1, x2) = (right, 2.0 * right);
            let (p1, p2) = (p(x1)?, p(x2)?);
            // p = a x^(-1-α) + b x^(-1-2α)
            let (u1, v1) = (x1.powf(-1.0 - alpha), x1.powf(-1.0 - 2.0 * alpha));
            let (u2, v2) = (x2.powf(-1.0 - alpha), x2.powf(-1.0 - 2.0 * alpha));
            let det = u1 * v2 - u2 * v1;
            let a = (p1 * v2 - p2 * v1) / det;
            let b = (u1 * p2 - u2 * p1) / det;
            a * right.powf(-alpha) / alpha + b * right.powf(-2.0 * alpha) / (2.0 * alpha)
        }
        _ => {
            while !negligible(right, peak)? {
                right = center + 2.0 * (right - center);
            }
            0.0
        }
    };
    let failure: RefCell<Option<SpdError>> = RefCell::new(None);
    let f = |x: f64| match p(x) {
        Ok(v) => v,
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            0.0
        }
    };
    let opts = QuadOptions {
        rel_tol: 1e-10,
        abs_tol: 1e-12,
        max_evals: 200_000,
    };
    let mut mass = right_tail;
    let mut cuts = vec![left, center - ell, center + ell];
    let mut edge = center + ell;
    while edge < right {
        edge = (edge * 4.0 - center * 3.0).min(right);
        cuts.push(edge);
    }
    for pair in cuts.windows(2) {
        mass += integrate(f, pair[0], pair[1], opts)?.value;
        if let Some(e) = failure.borrow_mut().take() {
            return Err(e);
        }
    }
    Ok(MassReport {
        mass,
        left_cut: left,
        right_cut: right,
        right_tail,
    })
}
