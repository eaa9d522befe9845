//! Spectrally positive Lévy models `(sigma, b, nu)` and the jump-measure
//! primitives every other module is built from.
//!
//! The drift `b` always refers to the `1{s<1}` compensation cutoff. All
//! parametric jump families are instances of one power-law kernel
//! `scale · s^(-1-alpha) · e^(-theta s) · 1{s < cutoff}`, which gives closed
//! forms for moments, tails and the Laplace integral through incomplete
//! gamma functions. `Custom` densities go through quadrature.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SpdError};
use crate::quadrature::{integrate, integrate_log_scale, QuadOptions, QuadValue};
use crate::special::{gamma, lower_gamma, pow_exp_integral, EULER_GAMMA};

pub type DensityFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecayHint {
    Exponential,
    Polynomial,
}

/// A user-supplied jump density. The singularity order `rho` describes
/// `nu(x) ~ x^(-1-rho)` as `x -> 0`.
#[derive(Clone)]
pub struct CustomJumps {
    pub density: DensityFn,
    pub tail_hint: Option<DensityFn>,
    pub singularity_order: f64,
    pub decay_hint: DecayHint,
    /// Declares the density nonincreasing on (0, ∞).
    pub monotone: bool,
}

impl fmt::Debug for CustomJumps {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomJumps")
            .field("singularity_order", &self.singularity_order)
            .field("decay_hint", &self.decay_hint)
            .field("monotone", &self.monotone)
            .field("tail_hint", &self.tail_hint.is_some())
            .finish()
    }
}

#[derive(Debug, Clone)]
pub enum JumpFamily {
    /// `scale · x^(-1-alpha)`, alpha in (1, 2).
    Stable {
        alpha: f64,
        scale: f64,
    },
    /// `scale · x^(-2)`.
    StableBoundary {
        scale: f64,
    },
    /// `scale · e^(-theta x) · x^(-1-alpha)`, alpha in (0, 2).
    TemperedStable {
        alpha: f64,
        theta: f64,
        scale: f64,
    },
    /// `scale · x^(-1-alpha) · 1{x < cutoff}`, alpha in (0, 2).
    TruncatedStable {
        alpha: f64,
        cutoff: f64,
        scale: f64,
    },
    Custom(CustomJumps),
    Mixture(Vec<JumpFamily>),
}

/// Integration window for [`JumpFamily::weighted_moment`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Window {
    All,
    Below(f64),
    Above(f64),
    Between(f64, f64),
}

impl Window {
    pub fn bounds(self) -> (f64, f64) {
        match self {
            Window::All => (0.0, f64::INFINITY),
            Window::Below(r) => (0.0, r),
            Window::Above(r) => (r, f64::INFINITY),
            Window::Between(a, b) => (a, b),
        }
    }
}

/// `scale · s^(-1-alpha) · e^(-theta s)` on `(0, cutoff)`.
#[derive(Debug, Clone, Copy)]
struct Kernel {
    alpha: f64,
    theta: f64,
    cutoff: f64,
    scale: f64,
}

impl Kernel {
    fn density(&self, x: f64) -> f64 {
        if x >= self.cutoff {
            return 0.0;
        }
        self.scale * x.powf(-1.0 - self.alpha) * (-self.theta * x).exp()
    }

    fn moment(&self, k: f64, lambda: f64, lo: f64, hi: f64) -> Result<f64> {
        let hi = hi.min(self.cutoff);
        if hi <= lo {
            return Ok(0.0);
        }
        Ok(self.scale * pow_exp_integral(k - self.alpha, lambda + self.theta, lo, hi)?)
    }

    fn has_laplace_closed_form(&self) -> bool {
        self.cutoff.is_infinite() && (self.alpha != 1.0 || self.theta == 0.0)
    }

    /// L = ∫ s·1{s<1} e^(-theta s) s^(-1-alpha) ds continued analytically in alpha
    /// so that J(z) = c {Γ(-α)[(z+θ)^α - θ^α] + z L}.
    fn linear_coefficient(&self) -> f64 {
        let a = self.alpha;
        if self.theta == 0.0 {
            1.0 / (1.0 - a)
        } else {
            self.theta.powf(a - 1.0) * lower_gamma(1.0 - a, self.theta)
        }
    }

    fn laplace_complex(&self, z: Complex64) -> Complex64 {
        let c = self.scale;
        if self.alpha == 1.0 {
            // theta == 0 guaranteed by has_laplace_closed_form
            if z.norm() == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            return c * (z * z.ln() + (EULER_GAMMA - 1.0) * z);
        }
        let a = self.alpha;
        let shifted = z + self.theta;
        let pow = if shifted.norm() == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            shifted.powf(a)
        };
        c * (gamma(-a) * (pow - self.theta.powf(a)) + z * self.linear_coefficient())
    }

    fn laplace_real(&self, lambda: f64) -> f64 {
        if self.alpha == 1.0 {
            if lambda == 0.0 {
                return 0.0;
            }
            return self.scale * (lambda * lambda.ln() + (EULER_GAMMA - 1.0) * lambda);
        }
        let a = self.alpha;
        let pow = (lambda + self.theta).powf(a) - self.theta.powf(a);
        self.scale * (gamma(-a) * pow + lambda * self.linear_coefficient())
    }

    fn laplace_d1(&self, lambda: f64) -> Result<f64> {
        let a = self.alpha;
        if a == 1.0 {
            if lambda == 0.0 {
                return Err(SpdError::DivergentMoment("∫_1^∞ s ν(ds) for alpha = 1".into()));
            }
            return Ok(self.scale * (lambda.ln() + EULER_GAMMA));
        }
        let shifted = lambda + self.theta;
        if shifted == 0.0 && a < 1.0 {
            return Err(SpdError::DivergentMoment("∫_1^∞ s ν(ds) for alpha < 1".into()));
        }
        let pow = if shifted == 0.0 { 0.0 } else { shifted.powf(a - 1.0) };
        Ok(self.scale * (-gamma(1.0 - a) * pow + self.linear_coefficient()))
    }
}

fn check_positive(path: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(SpdError::InvalidParameter {
            path: path.into(),
            reason: format!("must be a positive finite number, got {v}"),
        })
    }
}

fn check_open_interval(path: &str, v: f64, lo: f64, hi: f64) -> Result<()> {
    if v.is_finite() && v > lo && v < hi {
        Ok(())
    } else {
        Err(SpdError::InvalidParameter {
            path: path.into(),
            reason: format!("must lie in ({lo}, {hi}), got {v}"),
        })
    }
}

/// The scale that turns `Stable { alpha, .. }` with centered drift into
/// `phi(lambda) = lambda^alpha`, i.e. `alpha (alpha - 1) / Γ(2 - alpha)`.
pub fn stable_unit_scale(alpha: f64) -> f64 {
    alpha * (alpha - 1.0) / gamma(2.0 - alpha)
}

// 1 - cos y and e^-y - 1 + y without cancellation near y = 0.
fn one_minus_cos(y: f64) -> f64 {
    let s = (0.5 * y).sin();
    2.0 * s * s
}

fn exp_compensated(y: f64) -> f64 {
    if y.abs() < 0.1 {
        let mut term = y * y / 2.0;
        let mut sum = term;
        for n in 3..20 {
            term *= -y / n as f64;
            sum += term;
            if term.abs() < 1e-18 * sum.abs() {
                break;
            }
        }
        sum
    } else {
        (-y).exp_m1() + y
    }
}

fn exp_compensated_complex(y: Complex64) -> Complex64 {
    if y.norm() < 0.1 {
        let mut term = y * y / 2.0;
        let mut sum = term;
        for n in 3..20 {
            term *= -y / n as f64;
            sum += term;
            if term.norm() < 1e-18 * sum.norm() {
                break;
            }
        }
        sum
    } else {
        (-y).exp() - 1.0 + y
    }
}

fn sin_minus_linear(y: f64) -> f64 {
    if y.abs() < 0.1 {
        let y2 = y * y;
        let mut term = -y * y2 / 6.0;
        let mut sum = term;
        let mut n = 3;
        while term.abs() > 1e-18 * sum.abs() && n < 20 {
            term *= -y2 / ((n + 1) * (n + 2)) as f64;
            sum += term;
            n += 2;
        }
        sum
    } else {
        y.sin() - y
    }
}

/// Wynn's epsilon algorithm on a sequence of partial sums; returns the
/// latest accelerated estimate.
fn wynn_epsilon(sums: &[f64]) -> f64 {
    let n = sums.len();
    if n < 3 {
        return *sums.last().unwrap_or(&0.0);
    }
    let mut prev = vec![0.0; n + 1];
    let mut cur: Vec<f64> = sums.to_vec();
    let mut best = *sums.last().unwrap();
    let mut k = 0;
    while cur.len() > 1 {
        let mut next = Vec::with_capacity(cur.len() - 1);
        for i in 0..cur.len() - 1 {
            let diff = cur[i + 1] - cur[i];
            let val = if diff == 0.0 {
                f64::INFINITY
            } else {
                prev[i + 1] + 1.0 / diff
            };
            next.push(val);
        }
        prev = cur;
        cur = next;
        k += 1;
        if k % 2 == 0 {
            if let Some(&v) = cur.last() {
                if v.is_finite() {
                    best = v;
                }
            }
        }
        if cur.iter().any(|v| !v.is_finite()) {
            break;
        }
    }
    best
}

impl JumpFamily {
    pub fn stable(alpha: f64, scale: f64) -> Result<Self> {
        check_open_interval("jumps.alpha", alpha, 1.0, 2.0)?;
        check_positive("jumps.scale", scale)?;
        Ok(JumpFamily::Stable { alpha, scale })
    }

    pub fn stable_boundary(scale: f64) -> Result<Self> {
        check_positive("jumps.scale", scale)?;
        Ok(JumpFamily::StableBoundary { scale })
    }

    pub fn tempered_stable(alpha: f64, theta: f64, scale: f64) -> Result<Self> {
        check_open_interval("jumps.alpha", alpha, 0.0, 2.0)?;
        check_positive("jumps.theta", theta)?;
        check_positive("jumps.scale", scale)?;
        Ok(JumpFamily::TemperedStable { alpha, theta, scale })
    }

    pub fn truncated_stable(alpha: f64, cutoff: f64, scale: f64) -> Result<Self> {
        check_open_interval("jumps.alpha", alpha, 0.0, 2.0)?;
        check_positive("jumps.cutoff", cutoff)?;
        check_positive("jumps.scale", scale)?;
        Ok(JumpFamily::TruncatedStable { alpha, cutoff, scale })
    }

    pub fn custom(jumps: CustomJumps) -> Result<Self> {
        if !jumps.singularity_order.is_finite() {
            return Err(SpdError::InvalidParameter {
                path: "jumps.singularity_order".into(),
                reason: "must be finite".into(),
            });
        }
        Ok(JumpFamily::Custom(jumps))
    }

    pub fn mixture(components: Vec<JumpFamily>) -> Result<Self> {
        if components.is_empty() {
            return Err(SpdError::InvalidParameter {
                path: "jumps.components".into(),
                reason: "mixture needs at least one component".into(),
            });
        }
        Ok(JumpFamily::Mixture(components))
    }

    fn kernel(&self) -> Option<Kernel> {
        match *self {
            JumpFamily::Stable { alpha, scale } => Some(Kernel {
                alpha,
                theta: 0.0,
                cutoff: f64::INFINITY,
                scale,
            }),
            JumpFamily::StableBoundary { scale } => Some(Kernel {
                alpha: 1.0,
                theta: 0.0,
                cutoff: f64::INFINITY,
                scale,
            }),
            JumpFamily::TemperedStable { alpha, theta, scale } => Some(Kernel {
                alpha,
                theta,
                cutoff: f64::INFINITY,
                scale,
            }),
            JumpFamily::TruncatedStable { alpha, cutoff, scale } => Some(Kernel {
                alpha,
                theta: 0.0,
                cutoff,
                scale,
            }),
            _ => None,
        }
    }

    /// Default scaling anchor: 0 for stable laws, theta for tempering,
    /// 1/cutoff for truncation; mixtures take the largest component anchor.
    pub fn default_x0(&self) -> f64 {
        match self {
            JumpFamily::Stable { .. } | JumpFamily::StableBoundary { .. } => 0.0,
            JumpFamily::TemperedStable { theta, .. } => *theta,
            JumpFamily::TruncatedStable { cutoff, .. } => 1.0 / cutoff,
            JumpFamily::Custom(_) => 0.0,
            JumpFamily::Mixture(cs) => cs.iter().map(|c| c.default_x0()).fold(0.0, f64::max),
        }
    }

    /// Order of the singularity at 0: `nu(x) ~ x^(-1-rho)`.
    pub fn singularity_order(&self) -> f64 {
        match self {
            JumpFamily::Custom(c) => c.singularity_order,
            JumpFamily::Mixture(cs) => cs
                .iter()
                .map(|c| c.singularity_order())
                .fold(f64::NEG_INFINITY, f64::max),
            _ => self.kernel().map(|k| k.alpha).unwrap_or(0.0),
        }
    }

    /// Index `a` of a power-law right tail `nu(x) ~ x^(-1-a)`, if any.
    pub fn power_tail_index(&self) -> Option<f64> {
        match self {
            JumpFamily::Stable { alpha, .. } => Some(*alpha),
            JumpFamily::StableBoundary { .. } => Some(1.0),
            JumpFamily::TemperedStable { .. } | JumpFamily::TruncatedStable { .. } => None,
            JumpFamily::Custom(c) => match c.decay_hint {
                DecayHint::Exponential => None,
                DecayHint::Polynomial => Some(f64::NAN),
            },
            JumpFamily::Mixture(cs) => cs
                .iter()
                .filter_map(|c| c.power_tail_index())
                .fold(None, |acc: Option<f64>, a| Some(acc.map_or(a, |b| b.min(a)))),
        }
    }

    /// Supremum of `r >= 0` with `∫_1^∞ e^(r x) ν(dx) < ∞`.
    pub fn exponential_moment_bound(&self) -> f64 {
        match self {
            JumpFamily::Stable { .. } | JumpFamily::StableBoundary { .. } | JumpFamily::Custom(_) => 0.0,
            JumpFamily::TemperedStable { theta, .. } => *theta,
            JumpFamily::TruncatedStable { .. } => f64::INFINITY,
            JumpFamily::Mixture(cs) => cs
                .iter()
                .map(|c| c.exponential_moment_bound())
                .fold(f64::INFINITY, f64::min),
        }
    }

    pub fn has_monotone_density(&self) -> bool {
        match self {
            JumpFamily::Custom(c) => c.monotone,
            JumpFamily::Mixture(cs) => cs.iter().all(|c| c.has_monotone_density()),
            _ => true,
        }
    }

    fn support_end(&self) -> f64 {
        match self {
            JumpFamily::TruncatedStable { cutoff, .. } => *cutoff,
            JumpFamily::Mixture(cs) => cs.iter().map(|c| c.support_end()).fold(0.0, f64::max),
            _ => f64::INFINITY,
        }
    }

    pub fn density(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) {
            return Err(SpdError::InvalidParameter {
                path: "x".into(),
                reason: format!("jump density needs x > 0, got {x}"),
            });
        }
        match self {
            JumpFamily::Custom(c) => {
                let v = (c.density)(x);
                if v.is_finite() && v >= 0.0 {
                    Ok(v)
                } else {
                    Err(SpdError::Unsupported(format!("custom density returned {v} at x = {x}")))
                }
            }
            JumpFamily::Mixture(cs) => cs.iter().map(|c| c.density(x)).sum(),
            _ => Ok(self.kernel().expect("parametric family").density(x)),
        }
    }

    /// ν((u, ∞)).
    pub fn tail(&self, u: f64) -> Result<f64> {
        if !(u > 0.0) {
            return Err(SpdError::InvalidParameter {
                path: "u".into(),
                reason: format!("jump tail needs u > 0, got {u}"),
            });
        }
        match self {
            JumpFamily::Custom(c) => match &c.tail_hint {
                Some(t) => Ok(t(u)),
                None => self.moment_quadrature(0, 0.0, Window::Above(u)),
            },
            JumpFamily::Mixture(cs) => cs.iter().map(|c| c.tail(u)).sum(),
            _ => self
                .kernel()
                .expect("parametric family")
                .moment(0.0, 0.0, u, f64::INFINITY),
        }
    }

    /// ∫_window s^k e^(-lambda s) ν(ds).
    pub fn weighted_moment(&self, k: u32, lambda: f64, window: Window) -> Result<f64> {
        if !(lambda >= 0.0) {
            return Err(SpdError::InvalidParameter {
                path: "lambda".into(),
                reason: format!("must be nonnegative, got {lambda}"),
            });
        }
        let (lo, hi) = window.bounds();
        if !(lo >= 0.0 && hi >= lo) {
            return Err(SpdError::InvalidParameter {
                path: "window".into(),
                reason: format!("invalid window {window:?}"),
            });
        }
        match self {
            JumpFamily::Mixture(cs) => cs.iter().map(|c| c.weighted_moment(k, lambda, window)).sum(),
            JumpFamily::Custom(c) => {
                if lo == 0.0 && (k as f64) - c.singularity_order <= 0.0 {
                    return Err(SpdError::DivergentMoment(format!(
                        "∫ s^{k} ν(ds) near 0 with singularity order {}",
                        c.singularity_order
                    )));
                }
                self.moment_quadrature(k, lambda, window)
            }
            _ => self
                .kernel()
                .expect("parametric family")
                .moment(k as f64, lambda, lo, hi),
        }
    }

    /// Quadrature route for moments, valid for every family (used for
    /// custom densities and to cross-check the closed forms).
    pub fn moment_quadrature(&self, k: u32, lambda: f64, window: Window) -> Result<f64> {
        let (lo, hi) = window.bounds();
        let hi = hi.min(self.support_end());
        if hi <= lo {
            return Ok(0.0);
        }
        let center = if lambda > 0.0 {
            (1.0 / lambda).clamp(lo.max(1e-300), hi)
        } else {
            1.0f64.clamp(lo.max(1e-300), hi)
        };
        self.integrate_against(|s| s.powi(k as i32) * (-lambda * s).exp(), lo, hi, center)
    }

    /// ∫_lo^hi f(s) ν(s) ds by log-scale quadrature on the density.
    pub fn integrate_against<V: QuadValue, F: Fn(f64) -> V>(&self, f: F, lo: f64, hi: f64, center: f64) -> Result<V> {
        self.integrate_against_dyn(&f, lo, hi, center)
    }

    fn integrate_against_dyn<V: QuadValue>(&self, f: &dyn Fn(f64) -> V, lo: f64, hi: f64, center: f64) -> Result<V> {
        match self {
            JumpFamily::Mixture(cs) => {
                let mut acc = V::zero();
                for c in cs {
                    acc = acc.add(c.integrate_against_dyn(f, lo, hi, center)?);
                }
                Ok(acc)
            }
            _ => {
                let hi = hi.min(self.support_end());
                if hi <= lo {
                    return Ok(V::zero());
                }
                let kernel = self.kernel();
                let custom = match self {
                    JumpFamily::Custom(c) => Some(c.density.clone()),
                    _ => None,
                };
                let dens = move |s: f64| match (&kernel, &custom) {
                    (Some(k), _) => k.density(s),
                    (None, Some(d)) => d(s),
                    _ => 0.0,
                };
                let out = integrate_log_scale(
                    |s| f(s).scale(dens(s)),
                    lo,
                    hi,
                    center,
                    QuadOptions::with_rel_tol(1e-11),
                )?;
                Ok(out.value)
            }
        }
    }

    /// J(λ) = ∫ (e^(-λs) - 1 + λ s 1{s<1}) ν(ds), so that φ(λ) = σ²λ² - bλ + J(λ).
    pub fn laplace_integral(&self, lambda: f64) -> Result<f64> {
        match self {
            JumpFamily::Mixture(cs) => cs.iter().map(|c| c.laplace_integral(lambda)).sum(),
            _ => match self.kernel() {
                Some(k) if k.has_laplace_closed_form() => Ok(k.laplace_real(lambda)),
                _ => self.laplace_integral_quadrature(lambda),
            },
        }
    }

    pub fn laplace_integral_quadrature(&self, lambda: f64) -> Result<f64> {
        if lambda == 0.0 {
            return Ok(0.0);
        }
        let center = (1.0 / lambda).min(1.0);
        let small = self.integrate_against(|s| exp_compensated(lambda * s), 0.0, 1.0, center)?;
        let large = self.integrate_against(|s| (-lambda * s).exp_m1(), 1.0, f64::INFINITY, 1.0)?;
        Ok(small + large)
    }

    /// J'(λ) = ∫ s (1{s<1} - e^(-λs)) ν(ds).
    pub fn laplace_integral_d1(&self, lambda: f64) -> Result<f64> {
        match self {
            JumpFamily::Mixture(cs) => cs.iter().map(|c| c.laplace_integral_d1(lambda)).sum(),
            _ => match self.kernel() {
                Some(k) if k.has_laplace_closed_form() => k.laplace_d1(lambda),
                _ => {
                    if lambda == 0.0 {
                        return Ok(-self.weighted_moment(1, 0.0, Window::Above(1.0))?);
                    }
                    let center = (1.0 / lambda).min(1.0);
                    let small = self.integrate_against(|s| -s * (-lambda * s).exp_m1(), 0.0, 1.0, center)?;
                    let large = self.weighted_moment(1, lambda, Window::Above(1.0))?;
                    Ok(small - large)
                }
            },
        }
    }

    /// J(z) on Re z ≥ 0 (holomorphic extension).
    pub fn laplace_integral_complex(&self, z: Complex64) -> Result<Complex64> {
        match self {
            JumpFamily::Mixture(cs) => {
                let mut acc = Complex64::new(0.0, 0.0);
                for c in cs {
                    acc += c.laplace_integral_complex(z)?;
                }
                Ok(acc)
            }
            _ => match self.kernel() {
                Some(k) if k.has_laplace_closed_form() => Ok(k.laplace_complex(z)),
                _ => self.laplace_integral_complex_quadrature(z),
            },
        }
    }

    pub fn laplace_integral_complex_quadrature(&self, z: Complex64) -> Result<Complex64> {
        if z.norm() == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        if z.re == 0.0 {
            return self.char_integral_quadrature(-z.im);
        }
        let center = (1.0 / z.norm()).min(1.0);
        let small = self.integrate_against(|s| exp_compensated_complex(z * s), 0.0, 1.0, center)?;
        let large = self.integrate_against(|s| (-z * s).exp() - 1.0, 1.0, f64::INFINITY, 1.0)?;
        Ok(small + large)
    }

    /// ∫ (e^(iξs) - 1 - iξ s 1{s<1}) ν(ds) by oscillatory quadrature: direct
    /// adaptive integration on (0, 1], then half-period panels between zeros
    /// of the trigonometric factor on (1, ∞) summed with Wynn's epsilon.
    pub fn char_integral_quadrature(&self, xi: f64) -> Result<Complex64> {
        if xi == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        if let JumpFamily::Mixture(cs) = self {
            let mut acc = Complex64::new(0.0, 0.0);
            for c in cs {
                acc += c.char_integral_quadrature(xi)?;
            }
            return Ok(acc);
        }
        let w = xi.abs();
        let sign = xi.signum();
        let center = (1.0 / w).min(1.0);
        let re_small = self.integrate_against(|s| -one_minus_cos(w * s), 0.0, 1.0, center)?;
        let im_small = self.integrate_against(|s| sin_minus_linear(w * s), 0.0, 1.0, center)?;
        let cos_tail = self.oscillatory_tail(w, true)?;
        let sin_tail = self.oscillatory_tail(w, false)?;
        let nu_bar_one = self.tail(1.0)?;
        let re = re_small - nu_bar_one + cos_tail;
        let im = im_small + sin_tail;
        Ok(Complex64::new(re, sign * im))
    }

    /// ∫_1^∞ trig(w s) ν(s) ds with trig = cos or sin.
    fn oscillatory_tail(&self, w: f64, cosine: bool) -> Result<f64> {
        let end = self.support_end();
        if end <= 1.0 {
            return Ok(0.0);
        }
        let trig = move |s: f64| if cosine { (w * s).cos() } else { (w * s).sin() };
        let piece = |a: f64, b: f64| -> Result<f64> {
            if b / a > 4.0 {
                self.integrate_against(trig, a, b, (a * b).sqrt())
            } else {
                let dens = |s: f64| self.density(s).unwrap_or(0.0);
                Ok(integrate(|s| trig(s) * dens(s), a, b, QuadOptions::with_rel_tol(1e-12))?.value)
            }
        };
        let half = std::f64::consts::PI / w;
        let offset = if cosine { 0.5 } else { 0.0 };
        // first zero of the trig factor strictly beyond s = 1
        let mut k = ((w - offset * std::f64::consts::PI) / std::f64::consts::PI).floor() + 1.0;
        let mut zero = (k + offset) * half;
        if end.is_finite() && zero >= end {
            return piece(1.0, end);
        }
        let mut sum = piece(1.0, zero)?;
        let mut partials = vec![sum];
        let mut last_estimate = sum;
        for _ in 0..2000 {
            k += 1.0;
            let next = ((k + offset) * half).min(end);
            let p = piece(zero, next)?;
            sum += p;
            zero = next;
            if end.is_finite() && zero >= end {
                return Ok(sum);
            }
            partials.push(sum);
            if partials.len() > 40 {
                partials.remove(0);
            }
            if p.abs() <= 1e-15 * sum.abs().max(1e-300) {
                return Ok(sum);
            }
            if partials.len() >= 7 {
                let est = wynn_epsilon(&partials);
                if (est - last_estimate).abs() <= 1e-12 * est.abs().max(1e-14) {
                    return Ok(est);
                }
                last_estimate = est;
            }
        }
        Err(SpdError::QuadratureFailure(format!(
            "oscillatory tail at xi = {w} did not converge"
        )))
    }
}

/// A spectrally positive Lévy model.
#[derive(Debug, Clone)]
pub struct LevyModel {
    pub sigma: f64,
    pub b: f64,
    pub jumps: Option<JumpFamily>,
    pub x0: f64,
    pub declared_alpha: Option<f64>,
    pub declared_beta: Option<f64>,
}

/// Outcome of [`validate_model`].
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationVerdict {
    pub violations: Vec<SpdError>,
}

impl ValidationVerdict {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl LevyModel {
    /// A model with the family's default scaling anchor.
    pub fn new(sigma: f64, b: f64, jumps: Option<JumpFamily>) -> Result<Self> {
        if !(sigma.is_finite() && sigma >= 0.0) {
            return Err(SpdError::InvalidParameter {
                path: "sigma".into(),
                reason: format!("must be nonnegative, got {sigma}"),
            });
        }
        if !b.is_finite() {
            return Err(SpdError::InvalidParameter {
                path: "b".into(),
                reason: "must be finite".into(),
            });
        }
        if sigma == 0.0 && jumps.is_none() {
            return Err(SpdError::InvalidParameter {
                path: "jumps".into(),
                reason: "sigma = 0 and no jumps: there is no process".into(),
            });
        }
        let x0 = jumps.as_ref().map_or(0.0, |j| j.default_x0());
        Ok(Self {
            sigma,
            b,
            jumps,
            x0,
            declared_alpha: None,
            declared_beta: None,
        })
    }

    /// Drift chosen so that E X_1 = 0, i.e. φ'(0+) = 0.
    pub fn centered(sigma: f64, jumps: JumpFamily) -> Result<Self> {
        let b = -jumps.weighted_moment(1, 0.0, Window::Above(1.0))?;
        Self::new(sigma, b, Some(jumps))
    }

    pub fn brownian(sigma: f64, b: f64) -> Result<Self> {
        Self::new(sigma, b, None)
    }

    /// Centered stable model with φ(λ) = λ^alpha.
    pub fn unit_stable(alpha: f64) -> Result<Self> {
        let mut m = Self::centered(0.0, JumpFamily::stable(alpha, stable_unit_scale(alpha))?)?;
        m.declared_alpha = Some(alpha);
        m.declared_beta = Some(alpha);
        Ok(m)
    }

    /// The boundary case with φ(λ) = λ ln λ (jump density x^-2, drift γ - 1).
    pub fn unit_boundary_stable() -> Result<Self> {
        let mut m = Self::new(0.0, EULER_GAMMA - 1.0, Some(JumpFamily::stable_boundary(1.0)?))?;
        m.declared_alpha = Some(1.0);
        m.declared_beta = Some(1.0);
        Ok(m)
    }

    pub fn with_x0(mut self, x0: f64) -> Self {
        self.x0 = x0;
        self
    }

    pub fn jump_density(&self, x: f64) -> Result<f64> {
        match &self.jumps {
            Some(j) => j.density(x),
            None => Ok(0.0),
        }
    }

    pub fn jump_tail(&self, u: f64) -> Result<f64> {
        match &self.jumps {
            Some(j) => j.tail(u),
            None => Ok(0.0),
        }
    }

    pub fn weighted_moment(&self, k: u32, lambda: f64, window: Window) -> Result<f64> {
        match &self.jumps {
            Some(j) => j.weighted_moment(k, lambda, window),
            None => Ok(0.0),
        }
    }

    /// E X_1 = b + ∫_[1,∞) x ν(dx), possibly +∞.
    pub fn mean_at_one(&self) -> Result<f64> {
        match self.weighted_moment(1, 0.0, Window::Above(1.0)) {
            Ok(m) => Ok(self.b + m),
            Err(SpdError::DivergentMoment(_)) => Ok(f64::INFINITY),
            Err(e) => Err(e),
        }
    }

    pub fn has_monotone_density(&self) -> bool {
        self.jumps.as_ref().is_some_and(|j| j.has_monotone_density())
    }

    /// Exponential moment bound of the jump part; infinite without jumps.
    pub fn exponential_moment_bound(&self) -> f64 {
        self.jumps
            .as_ref()
            .map_or(f64::INFINITY, |j| j.exponential_moment_bound())
    }

    /// Index used for stretched-exponential decay bounds on inversion contours.
    pub fn decay_index(&self) -> f64 {
        if self.sigma > 0.0 {
            return 2.0;
        }
        if let Some(a) = self.declared_alpha {
            return a.clamp(1.0, 2.0);
        }
        self.jumps
            .as_ref()
            .map_or(2.0, |j| j.singularity_order().clamp(1.0, 2.0))
    }
}

/// Checks integrability of the Lévy measure and unbounded variation.
pub fn validate_model(model: &LevyModel) -> ValidationVerdict {
    let mut verdict = ValidationVerdict::default();
    let Some(jumps) = &model.jumps else {
        if model.sigma == 0.0 {
            verdict.violations.push(SpdError::BoundedVariation);
        }
        return verdict;
    };
    let rho = jumps.singularity_order();
    if rho >= 2.0 {
        verdict
            .violations
            .push(SpdError::NonIntegrable(format!("singularity order {rho} ≥ 2 near 0")));
    } else {
        let small = jumps.weighted_moment(2, 0.0, Window::Below(1.0));
        let large = jumps.tail(1.0);
        for part in [small, large] {
            match part {
                Ok(v) if v.is_finite() => {}
                Ok(v) => verdict
                    .violations
                    .push(SpdError::NonIntegrable(format!("integral evaluated to {v}"))),
                Err(SpdError::DivergentMoment(m)) => verdict.violations.push(SpdError::NonIntegrable(m)),
                Err(e) => verdict.violations.push(e),
            }
        }
    }
    if model.sigma == 0.0 {
        let unbounded = match jumps {
            JumpFamily::Custom(c) => c.singularity_order >= 1.0,
            _ => matches!(
                jumps.weighted_moment(1, 0.0, Window::Below(1.0)),
                Err(SpdError::DivergentMoment(_))
            ),
        };
        if !unbounded {
            verdict.violations.push(SpdError::BoundedVariation);
        }
    }
    verdict
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn validate_examples() {
        let stable = LevyModel::new(0.0, 0.0, Some(JumpFamily::stable(1.5, 1.0).unwrap())).unwrap();
        assert!(validate_model(&stable).is_ok());
        let trunc = JumpFamily::truncated_stable(0.5, 1.0, 1.0).unwrap();
        let bv = LevyModel::new(0.0, 0.0, Some(trunc.clone())).unwrap();
        assert_eq!(validate_model(&bv).violations, vec![SpdError::BoundedVariation]);
        let with_gauss = LevyModel::new(1.0, 0.0, Some(trunc)).unwrap();
        assert!(validate_model(&with_gauss).is_ok());
    }

    #[test]
    fn custom_non_integrable_is_flagged() {
        let custom = CustomJumps {
            density: Arc::new(|x: f64| x.powf(-3.5)),
            tail_hint: None,
            singularity_order: 2.5,
            decay_hint: DecayHint::Polynomial,
            monotone: true,
        };
        let m = LevyModel::new(0.0, 0.0, Some(JumpFamily::custom(custom).unwrap())).unwrap();
        let v = validate_model(&m);
        assert!(matches!(v.violations[0], SpdError::NonIntegrable(_)));
    }

    #[test]
    fn jump_density_examples() {
        let s = JumpFamily::stable(1.5, 1.0).unwrap();
        assert!(rel(s.density(2.0).unwrap(), 0.176_776_695_296_636_9) < 1e-12);
        let t = JumpFamily::tempered_stable(1.5, 1.0, 1.0).unwrap();
        assert!(rel(t.density(1.0).unwrap(), (-1.0f64).exp()) < 1e-15);
        let m = JumpFamily::mixture(vec![s.clone(), s]).unwrap();
        assert!(rel(m.density(1.0).unwrap(), 2.0) < 1e-15);
    }

    #[test]
    fn jump_tail_examples() {
        let s = JumpFamily::stable(1.5, 1.0).unwrap();
        assert!(rel(s.tail(1.0).unwrap(), 2.0 / 3.0) < 1e-14);
        assert!(rel(s.tail(4.0).unwrap(), 1.0 / 12.0) < 1e-14);
        let t = JumpFamily::tempered_stable(1.5, 1.0, 1.0).unwrap();
        let closed = t.tail(1.0).unwrap();
        let quad = t.moment_quadrature(0, 0.0, Window::Above(1.0)).unwrap();
        assert!(rel(closed, quad) < 1e-9);
        assert!(closed < (-1.0f64).exp() * 2.0 / 3.0);
    }

    #[test]
    fn weighted_moment_examples() {
        let s = JumpFamily::stable(1.5, 1.0).unwrap();
        let m = s.weighted_moment(2, 1.0, Window::All).unwrap();
        assert!(rel(m, std::f64::consts::PI.sqrt()) < 1e-13);
        let q = s.moment_quadrature(2, 1.0, Window::All).unwrap();
        assert!(rel(q, std::f64::consts::PI.sqrt()) < 1e-9);
        assert!(matches!(
            s.weighted_moment(1, 0.0, Window::All),
            Err(SpdError::DivergentMoment(_))
        ));
        let mut prev = f64::INFINITY;
        for lam in [1.0, 10.0, 100.0, 1e3, 1e4] {
            let v = s.weighted_moment(2, lam, Window::All).unwrap();
            assert!(v < prev);
            assert!(rel(v, (std::f64::consts::PI / lam).sqrt()) < 1e-13);
            prev = v;
        }
    }

    #[test]
    fn closed_forms_match_quadrature_on_lambda_grid() {
        let families = [
            JumpFamily::stable(1.5, 0.7).unwrap(),
            JumpFamily::stable(1.2, 1.0).unwrap(),
            JumpFamily::tempered_stable(1.5, 1.0, 1.0).unwrap(),
            JumpFamily::tempered_stable(0.6, 2.0, 1.3).unwrap(),
            JumpFamily::truncated_stable(1.4, 2.0, 1.0).unwrap(),
            JumpFamily::stable_boundary(1.0).unwrap(),
        ];
        for fam in &families {
            for i in 0..=12 {
                let lam = 10f64.powf(-3.0 + 0.5 * i as f64);
                for k in [2u32, 3] {
                    for window in [Window::All, Window::Below(0.7), Window::Above(0.7)] {
                        let a = fam.weighted_moment(k, lam, window).unwrap();
                        let b = fam.moment_quadrature(k, lam, window).unwrap();
                        assert!(
                            rel(a, b) < 1e-8 || (a - b).abs() < 1e-300,
                            "{fam:?} k={k} lam={lam} {window:?}: {a} vs {b}"
                        );
                    }
                }
                for window in [Window::Above(0.7), Window::Between(0.3, 4.0)] {
                    let a = fam.weighted_moment(1, lam, window).unwrap();
                    let b = fam.moment_quadrature(1, lam, window).unwrap();
                    assert!(rel(a, b) < 1e-8, "{fam:?} k=1 lam={lam} {window:?}: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn laplace_closed_forms_match_quadrature() {
        let families = [
            JumpFamily::stable(1.5, 0.7).unwrap(),
            JumpFamily::stable(1.8, 1.0).unwrap(),
            JumpFamily::tempered_stable(1.5, 1.0, 1.0).unwrap(),
            JumpFamily::tempered_stable(0.6, 2.0, 1.3).unwrap(),
            JumpFamily::stable_boundary(1.0).unwrap(),
        ];
        for fam in &families {
            for lam in [1e-3, 0.1, 1.0, 7.0, 300.0] {
                let a = fam.laplace_integral(lam).unwrap();
                let b = fam.laplace_integral_quadrature(lam).unwrap();
                assert!(rel(a, b) < 1e-8, "{fam:?} J({lam}): {a} vs {b}");
                let d = fam.laplace_integral_d1(lam).unwrap();
                let h = 1e-5 * lam;
                let fd = (fam.laplace_integral(lam + h).unwrap() - fam.laplace_integral(lam - h).unwrap()) / (2.0 * h);
                assert!(rel(d, fd) < 1e-6, "{fam:?} J'({lam}): {d} vs {fd}");
            }
            for z in [
                Complex64::new(0.5, 3.0),
                Complex64::new(2.0, -10.0),
                Complex64::new(0.0, 4.0),
            ] {
                let a = fam.laplace_integral_complex(z).unwrap();
                let b = fam.laplace_integral_complex_quadrature(z).unwrap();
                assert!((a - b).norm() < 1e-8 * a.norm(), "{fam:?} J({z}): {a} vs {b}");
            }
        }
    }

    #[test]
    fn stable_calibration_oracle() {
        // ∫_0^∞ (e^-λx - 1 + λx) x^(-1-α) dx = λ^α Γ(2-α) / (α(α-1)), checked by quadrature.
        for alpha in [1.2, 1.5, 1.8] {
            let lam: f64 = 4.0;
            let f = |x: f64| exp_compensated(lam * x) * x.powf(-1.0 - alpha);
            let q = integrate_log_scale(f, 0.0, f64::INFINITY, 1.0 / lam, QuadOptions::with_rel_tol(1e-12)).unwrap();
            let want = lam.powf(alpha) * gamma(2.0 - alpha) / (alpha * (alpha - 1.0));
            assert!(rel(q.value, want) < 1e-9, "alpha {alpha}");
        }
    }

    #[test]
    fn char_integral_quadrature_matches_closed_form() {
        for fam in [
            JumpFamily::stable(1.5, 0.7).unwrap(),
            JumpFamily::tempered_stable(1.5, 1.0, 1.0).unwrap(),
            JumpFamily::stable(1.2, 1.0).unwrap(),
        ] {
            for xi in [0.01, 0.3, 1.0, -2.0, 25.0] {
                let q = fam.char_integral_quadrature(xi).unwrap();
                let c = fam.laplace_integral_complex(Complex64::new(0.0, -xi)).unwrap();
                assert!((q - c).norm() < 1e-8 * c.norm(), "{fam:?} xi={xi}: {q} vs {c}");
            }
        }
    }

    #[test]
    fn mean_at_one_examples() {
        let mut m = LevyModel::new(0.0, -2.0, Some(JumpFamily::stable(1.5, 1.0).unwrap())).unwrap();
        assert!(m.mean_at_one().unwrap().abs() < 1e-14);
        m.jumps = Some(JumpFamily::stable_boundary(1.0).unwrap());
        assert_eq!(m.mean_at_one().unwrap(), f64::INFINITY);
        assert_eq!(LevyModel::brownian(1.0, 0.3).unwrap().mean_at_one().unwrap(), 0.3);
    }

    #[test]
    fn monotone_tail_and_density() {
        let fams = [
            JumpFamily::stable(1.5, 1.0).unwrap(),
            JumpFamily::tempered_stable(1.5, 1.0, 1.0).unwrap(),
            JumpFamily::truncated_stable(0.5, 1.0, 1.0).unwrap(),
        ];
        for f in &fams {
            let mut prev = (f64::INFINITY, f64::INFINITY);
            for i in 0..60 {
                let u = 10f64.powf(-3.0 + 0.1 * i as f64);
                let t = f.tail(u).unwrap();
                let d = f.density(u).unwrap();
                assert!(t <= prev.0 && d <= prev.1);
                prev = (t, d);
            }
        }
    }
}
