//! The Laplace exponent φ, the characteristic exponent ψ and everything
//! derived from them: Pruitt functions, `Φ(x) = x²φ''(x)`, monotone
//! envelopes with generalized inverses, the roots θ₀ ≤ θ₁ and the ladder
//! height exponent.

mod monotone;
mod scaling;

use std::sync::{Arc, OnceLock};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SpdError};
use crate::levy_model::{LevyModel, Window};
use crate::roots::{bisect, expand_down, expand_up, newton_bracketed};

pub use monotone::{MonotoneEnvelope, ScalarFn};
pub use scaling::{ScalingReport, ScalingTarget};

pub const DEFAULT_NODES_PER_DECADE: usize = 512;

/// Which reading of the ladder-height tail prefactor to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LadderReading {
    /// `e^θ₀ · x · ∫_x^∞ e^(-θ₀u) ν((u,∞)) du`
    AsPrinted,
    /// `e^(θ₀x) · ∫_x^∞ e^(-θ₀u) ν((u,∞)) du`
    Corrected,
}

/// Evaluators for one model. Roots are solved at construction; envelope
/// tables are built lazily and shared between threads.
#[derive(Debug)]
pub struct ExponentSuite {
    model: LevyModel,
    theta0: f64,
    theta1: f64,
    nodes_per_decade: usize,
    big_phi_env: OnceLock<MonotoneEnvelope>,
    psi_env: OnceLock<MonotoneEnvelope>,
}

fn root_tol(theta: f64) -> f64 {
    1e-12 * (1.0 + theta)
}

impl ExponentSuite {
    pub fn new(model: LevyModel) -> Result<Self> {
        Self::with_resolution(model, DEFAULT_NODES_PER_DECADE)
    }

    pub fn with_resolution(model: LevyModel, nodes_per_decade: usize) -> Result<Self> {
        let mut suite = Self {
            model,
            theta0: 0.0,
            theta1: 0.0,
            nodes_per_decade,
            big_phi_env: OnceLock::new(),
            psi_env: OnceLock::new(),
        };
        let (t0, t1) = suite.solve_roots()?;
        suite.theta0 = t0;
        suite.theta1 = t1;
        Ok(suite)
    }

    pub fn model(&self) -> &LevyModel {
        &self.model
    }

    pub fn nodes_per_decade(&self) -> usize {
        self.nodes_per_decade
    }

    /// `(θ₀, θ₁)`.
    pub fn roots(&self) -> (f64, f64) {
        (self.theta0, self.theta1)
    }

    pub fn theta0(&self) -> f64 {
        self.theta0
    }

    pub fn theta1(&self) -> f64 {
        self.theta1
    }

    /// φ and its first three derivatives.
    pub fn phi(&self, lambda: f64, order: u8) -> Result<f64> {
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(SpdError::InvalidParameter {
                path: "lambda".into(),
                reason: format!("must be finite and nonnegative, got {lambda}"),
            });
        }
        let m = &self.model;
        let s2 = m.sigma * m.sigma;
        let jumps = m.jumps.as_ref();
        match order {
            0 => {
                let j = match jumps {
                    Some(j) => j.laplace_integral(lambda)?,
                    None => 0.0,
                };
                Ok(s2 * lambda * lambda - m.b * lambda + j)
            }
            1 => {
                let j = match jumps {
                    Some(j) => j.laplace_integral_d1(lambda)?,
                    None => 0.0,
                };
                Ok(2.0 * s2 * lambda - m.b + j)
            }
            2 => Ok(2.0 * s2 + m.weighted_moment(2, lambda, Window::All)?),
            3 => Ok(-m.weighted_moment(3, lambda, Window::All)?),
            _ => Err(SpdError::InvalidParameter {
                path: "order".into(),
                reason: format!("order must be 0..=3, got {order}"),
            }),
        }
    }

    /// φ on the closed right half-plane.
    pub fn phi_complex(&self, z: Complex64) -> Result<Complex64> {
        let m = &self.model;
        let j = match &m.jumps {
            Some(j) => j.laplace_integral_complex(z)?,
            None => Complex64::new(0.0, 0.0),
        };
        Ok(m.sigma * m.sigma * z * z - m.b * z + j)
    }

    /// ψ(ξ) = -φ(-iξ).
    pub fn char_exponent(&self, xi: f64) -> Result<Complex64> {
        if xi == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        Ok(-self.phi_complex(Complex64::new(0.0, -xi))?)
    }

    pub fn re_psi(&self, xi: f64) -> Result<f64> {
        Ok(self.char_exponent(xi)?.re)
    }

    fn psi_envelope(&self) -> &MonotoneEnvelope {
        self.psi_env.get_or_init(|| {
            let model = self.model.clone();
            let f: ScalarFn = Arc::new(move |r: f64| {
                let s2 = model.sigma * model.sigma;
                let j = match &model.jumps {
                    Some(j) => j.laplace_integral_complex(Complex64::new(0.0, -r))?.re,
                    None => 0.0,
                };
                Ok(s2 * r * r - j)
            });
            MonotoneEnvelope::new(f, self.nodes_per_decade)
        })
    }

    fn big_phi_envelope(&self) -> &MonotoneEnvelope {
        self.big_phi_env.get_or_init(|| {
            let model = self.model.clone();
            let f: ScalarFn = Arc::new(move |x: f64| {
                let s2 = model.sigma * model.sigma;
                Ok(x * x * (2.0 * s2 + model.weighted_moment(2, x, Window::All)?))
            });
            MonotoneEnvelope::new(f, self.nodes_per_decade)
        })
    }

    /// ψ*(r) = sup_{|z| ≤ r} Re ψ(z).
    pub fn psi_star(&self, r: f64) -> Result<f64> {
        self.psi_envelope().value(r)
    }

    /// ψ⁻¹(s) = sup{r > 0 : ψ*(r) = s}.
    pub fn psi_inv(&self, s: f64) -> Result<f64> {
        self.psi_envelope().inverse(s)
    }

    /// K(r) = σ²/r² + r⁻² ∫_(0,r) s² ν(ds).
    pub fn pruitt_k(&self, r: f64) -> Result<f64> {
        let s2 = self.model.sigma * self.model.sigma;
        Ok((s2 + self.model.weighted_moment(2, 0.0, Window::Below(r))?) / (r * r))
    }

    /// h(r) = σ²/r² + ∫ (1 ∧ s²/r²) ν(ds).
    pub fn pruitt_h(&self, r: f64) -> Result<f64> {
        Ok(self.pruitt_k(r)? + self.model.jump_tail(r)?)
    }

    /// The solution u of h(u) = r (h is strictly decreasing).
    pub fn h_inv(&self, r: f64) -> Result<f64> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(SpdError::RangeError(format!("h⁻¹ needs a positive level, got {r}")));
        }
        let hi = expand_up(1.0, |u| Ok(self.pruitt_h(u)? < r))?;
        let lo = expand_down(1.0, |u| Ok(self.pruitt_h(u)? > r))?;
        let (a, b) = (lo.ln(), hi.ln());
        let u = bisect(|v| Ok(r - self.pruitt_h(v.exp())?), a, b, 1e-14)?;
        Ok(u.exp())
    }

    /// Φ(x) = x²φ''(x).
    pub fn big_phi(&self, x: f64) -> Result<f64> {
        Ok(x * x * self.phi(x, 2)?)
    }

    /// Φ*(r) = sup_{0 < u ≤ r} Φ(u).
    pub fn big_phi_star(&self, r: f64) -> Result<f64> {
        self.big_phi_envelope().value(r)
    }

    /// Φ⁻¹(s) = sup{r > 0 : Φ*(r) = s}.
    pub fn big_phi_inv(&self, s: f64) -> Result<f64> {
        self.big_phi_envelope().inverse(s)
    }

    /// Inverse of φ restricted to (θ₀, ∞), where it is increasing.
    pub fn phi_inv(&self, s: f64) -> Result<f64> {
        if !(s >= 0.0 && s.is_finite()) {
            return Err(SpdError::RangeError(format!("φ⁻¹ needs a nonnegative level, got {s}")));
        }
        if s == 0.0 {
            return Ok(self.theta0);
        }
        let start = if self.theta0 > 0.0 { 2.0 * self.theta0 } else { 1.0 };
        let hi = expand_up(start, |x| Ok(self.phi(x, 0)? > s))?;
        let lo = if self.theta0 > 0.0 {
            self.theta0
        } else {
            expand_down(hi, |x| Ok(self.phi(x, 0)? < s))?
        };
        newton_bracketed(|x| Ok((self.phi(x, 0)? - s, self.phi(x, 1)?)), lo, hi, 1e-15 * hi)
    }

    fn solve_roots(&self) -> Result<(f64, f64)> {
        let mean = self.model.mean_at_one()?;
        if mean <= 0.0 {
            return Ok((0.0, 0.0));
        }
        let d1 = |x: f64| -> Result<(f64, f64)> { Ok((self.phi(x, 1)?, self.phi(x, 2)?)) };
        let lo1 = expand_down(1.0, |x| Ok(self.phi(x, 1)? < 0.0))?;
        let hi1 = expand_up(1.0, |x| Ok(self.phi(x, 1)? > 0.0))?;
        let theta1 = newton_bracketed(d1, lo1, hi1, root_tol(hi1) * 1e-3)?;
        let d0 = |x: f64| -> Result<(f64, f64)> { Ok((self.phi(x, 0)?, self.phi(x, 1)?)) };
        let hi0 = expand_up(2.0 * theta1, |x| Ok(self.phi(x, 0)? > 0.0))?;
        let theta0 = newton_bracketed(d0, theta1, hi0, root_tol(hi0) * 1e-3)?;
        Ok((theta0, theta1))
    }

    /// φ̂(λ) = φ(λ) / (λ − θ₀), the Laplace exponent of the ascending ladder
    /// height process.
    pub fn ladder_exponent(&self, lambda: f64) -> Result<f64> {
        if !(lambda > 0.0) {
            return Err(SpdError::InvalidParameter {
                path: "lambda".into(),
                reason: format!("must be positive, got {lambda}"),
            });
        }
        if (lambda - self.theta0).abs() <= root_tol(self.theta0) {
            return Err(SpdError::PoleAtTheta0(self.theta0));
        }
        Ok(self.phi(lambda, 0)? / (lambda - self.theta0))
    }

    /// Tail γ((x, ∞)) of the ladder height Lévy measure.
    pub fn ladder_tail(&self, x: f64, reading: LadderReading) -> Result<f64> {
        if !(x > 0.0) {
            return Err(SpdError::InvalidParameter {
                path: "x".into(),
                reason: format!("must be positive, got {x}"),
            });
        }
        let t0 = self.theta0;
        let m = &self.model;
        // ∫_x^∞ e^(-θ₀u) ν((u,∞)) du = ∫_(x,∞) ∫_x^s e^(-θ₀u) du ν(ds)
        let integral = if t0 == 0.0 {
            m.weighted_moment(1, 0.0, Window::Above(x))? - x * m.jump_tail(x)?
        } else {
            ((-t0 * x).exp() * m.jump_tail(x)? - m.weighted_moment(0, t0, Window::Above(x))?) / t0
        };
        Ok(match reading {
            LadderReading::AsPrinted => t0.exp() * x * integral,
            LadderReading::Corrected => (t0 * x).exp() * integral,
        })
    }

    /// Empirical scaling indices of `target` on `probe_range`.
    pub fn scaling_report(&self, target: ScalingTarget, probe_range: (f64, f64)) -> Result<ScalingReport> {
        scaling::report(self, target, probe_range, 64)
    }

    pub fn scaling_report_with_density(
        &self,
        target: ScalingTarget,
        probe_range: (f64, f64),
        per_decade: usize,
    ) -> Result<ScalingReport> {
        scaling::report(self, target, probe_range, per_decade)
    }
}
