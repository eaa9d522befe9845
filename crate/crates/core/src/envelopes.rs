//! Sharp two-sided density shapes without their unnamed constants: the
//! upper majorant `min{Φ⁻¹(1/t), tη(|x|)}`, the mode window, the right-tail
//! lower shape `tν(x)` and the three-regime envelope.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SpdError};
use crate::exponents::{ExponentSuite, ScalingTarget};
use crate::levy_model::Window;
use crate::roots::bisect;
use crate::saddlepoint::saddle_w;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegimeTag {
    LeftTail,
    Bulk,
    RightTail,
}

impl RegimeTag {
    pub fn name(self) -> &'static str {
        match self {
            RegimeTag::LeftTail => "left_tail",
            RegimeTag::Bulk => "bulk",
            RegimeTag::RightTail => "right_tail",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Regime {
    pub tag: RegimeTag,
    /// x·φ⁻¹(1/t)
    pub boundary_value: f64,
}

impl Regime {
    pub fn classify(boundary_value: f64) -> Self {
        let tag = if boundary_value <= -1.0 {
            RegimeTag::LeftTail
        } else if boundary_value <= 1.0 {
            RegimeTag::Bulk
        } else {
            RegimeTag::RightTail
        };
        Self { tag, boundary_value }
    }
}

/// Unnamed constants of the lower bounds, exposed as knobs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeConstants {
    pub m: f64,
    pub rho0: f64,
    pub rho1: f64,
    pub rho2: f64,
}

impl Default for EnvelopeConstants {
    fn default() -> Self {
        Self {
            m: 2.0,
            rho0: 4.0,
            rho1: 1.0,
            rho2: 1.0,
        }
    }
}

/// The nonincreasing majorant η with its anchor `x0` and constant `A`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EtaMajorant {
    pub x0: f64,
    pub a: Option<f64>,
}

impl EtaMajorant {
    /// Uses the model anchor, moved down to θ₁ when θ₁ > 0.
    pub fn new(suite: &ExponentSuite) -> Result<Self> {
        let mut x0 = suite.model().x0;
        let theta1 = suite.theta1();
        if theta1 > 0.0 && x0 > 0.0 {
            x0 = x0.min(theta1);
        }
        let a = if x0 > 0.0 {
            let phi = suite.phi(x0, 0)?.abs();
            if phi == 0.0 {
                return Err(SpdError::HypothesisViolation(format!(
                    "φ vanishes at the anchor x0 = {x0}"
                )));
            }
            Some(suite.big_phi_star(x0)? / phi)
        } else {
            None
        };
        Ok(Self { x0, a })
    }
}

pub fn eta(suite: &ExponentSuite, majorant: &EtaMajorant, s: f64) -> Result<f64> {
    if s < 0.0 || s.is_nan() {
        return Err(SpdError::InvalidParameter {
            path: "s".into(),
            reason: format!("must be nonnegative, got {s}"),
        });
    }
    if s == 0.0 {
        return Ok(f64::INFINITY);
    }
    match majorant.a {
        Some(a) if s >= 1.0 / majorant.x0 => Ok(a * suite.phi(1.0 / s, 0)?.abs() / s),
        _ => Ok(suite.big_phi_star(1.0 / s)? / s),
    }
}

/// b_r = b + ∫ s (1{s<r} − 1{s<1}) ν(ds).
pub fn drift_compensator(suite: &ExponentSuite, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(SpdError::InvalidParameter {
            path: "r".into(),
            reason: format!("must be positive, got {r}"),
        });
    }
    let m = suite.model();
    if r == 1.0 {
        return Ok(m.b);
    }
    if r < 1.0 {
        Ok(m.b - m.weighted_moment(1, 0.0, Window::Between(r, 1.0))?)
    } else {
        Ok(m.b + m.weighted_moment(1, 0.0, Window::Between(1.0, r))?)
    }
}

fn check_time(suite: &ExponentSuite, t: f64, anchor: f64) -> Result<()> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(SpdError::InvalidParameter {
            path: "t".into(),
            reason: format!("must be positive and finite, got {t}"),
        });
    }
    if anchor > 0.0 {
        let t_max = 1.0 / suite.big_phi(anchor)?;
        if t >= t_max {
            return Err(SpdError::OutOfTimeRange { t, t_max });
        }
    }
    Ok(())
}

fn require_pure_jump(suite: &ExponentSuite) -> Result<()> {
    if suite.model().sigma > 0.0 {
        return Err(SpdError::HypothesisViolation("sigma = 0 required".into()));
    }
    Ok(())
}

/// min{Φ⁻¹(1/t), tη(|x|)}: the upper shape at the shifted argument.
pub fn upper_bound(suite: &ExponentSuite, majorant: &EtaMajorant, t: f64, x: f64) -> Result<f64> {
    require_pure_jump(suite)?;
    if !suite.model().has_monotone_density() {
        return Err(SpdError::HypothesisViolation(
            "almost monotone jump density required".into(),
        ));
    }
    check_time(suite, t, majorant.x0)?;
    let flat = suite.big_phi_inv(1.0 / t)?;
    let tail = t * eta(suite, majorant, x.abs())?;
    Ok(flat.min(tail))
}

/// |x*| where Φ⁻¹(1/t) = tη(|x*|).
pub fn upper_bound_crossover(suite: &ExponentSuite, majorant: &EtaMajorant, t: f64) -> Result<f64> {
    let flat = suite.big_phi_inv(1.0 / t)?;
    let g = |u: f64| -> Result<f64> { Ok(flat - t * eta(suite, majorant, u.exp())?) };
    let mut lo = -1.0f64;
    while g(lo)? > 0.0 {
        lo -= 4.0;
        if lo < -700.0 {
            return Err(SpdError::NoBracket("crossover below the probed range".into()));
        }
    }
    let mut hi = 1.0f64;
    while g(hi)? <= 0.0 {
        hi += 4.0;
        if hi > 700.0 {
            return Err(SpdError::NoBracket("crossover above the probed range".into()));
        }
    }
    Ok(bisect(g, lo, hi, 1e-14)?.exp())
}

/// The x-window around `x_t = −tφ'(Φ⁻¹(M/t))` with radii ρ/Φ⁻¹(1/t).
pub fn mode_window(suite: &ExponentSuite, t: f64, m: f64, rho1: f64, rho2: f64) -> Result<(f64, f64)> {
    require_pure_jump(suite)?;
    if !(m > 1.0) {
        return Err(SpdError::InvalidParameter {
            path: "M".into(),
            reason: format!("must exceed 1, got {m}"),
        });
    }
    check_time(suite, t, suite.model().x0)?;
    let center = mode_center(suite, t, m)?;
    let scale = suite.big_phi_inv(1.0 / t)?;
    Ok((center - rho1 / scale, center + rho2 / scale))
}

pub fn mode_center(suite: &ExponentSuite, t: f64, m: f64) -> Result<f64> {
    Ok(-t * suite.phi(suite.big_phi_inv(m / t)?, 1)?)
}

/// t·ν(x), the right-tail lower shape.
pub fn tail_lower_shape(suite: &ExponentSuite, t: f64, x: f64) -> Result<f64> {
    Ok(t * suite.model().jump_density(x)?)
}

/// Whether x·Φ⁻¹(1/t) ≥ ρ₀.
pub fn in_tail_region(suite: &ExponentSuite, t: f64, x: f64, rho0: f64) -> Result<bool> {
    Ok(x * suite.big_phi_inv(1.0 / t)? >= rho0)
}

/// The three-regime envelope after its hypotheses have been verified once.
#[derive(Debug, Clone)]
pub struct ThreeRegimeEnvelope {
    pub alpha_hat: f64,
    pub beta_hat: f64,
    pub x0: f64,
}

impl ThreeRegimeEnvelope {
    pub fn new(suite: &ExponentSuite) -> Result<Self> {
        let model = suite.model();
        require_pure_jump(suite)?;
        let x0 = model.x0;
        let dd = suite.scaling_report(ScalingTarget::PhiDd, (x0.max(1e-3), 1e3))?;
        if !(dd.alpha_hat > 1.0) {
            return Err(SpdError::HypothesisViolation(format!(
                "alpha_hat > 1 required for φ'', got {}",
                dd.alpha_hat
            )));
        }
        let report = suite.scaling_report(ScalingTarget::Phi, (x0.max(1e-3), 1e3))?;
        if !(report.alpha_hat > 1.0 && report.beta_hat < 2.0) {
            return Err(SpdError::HypothesisViolation(format!(
                "1 < alpha_hat ≤ beta_hat < 2 required for φ, got [{}, {}]",
                report.alpha_hat, report.beta_hat
            )));
        }
        if suite.theta1() > 0.0 {
            return Err(SpdError::HypothesisViolation(format!(
                "θ₁ = 0 required, got {}",
                suite.theta1()
            )));
        }
        let d1 = match suite.phi(0.0, 1) {
            Ok(v) => v,
            Err(SpdError::DivergentMoment(_)) => f64::NEG_INFINITY,
            Err(e) => return Err(e),
        };
        if !(d1.abs() <= 1e-9 * (1.0 + model.b.abs())) {
            return Err(SpdError::HypothesisViolation(format!("φ'(0) = 0 required, got {d1}")));
        }
        Ok(Self {
            alpha_hat: report.alpha_hat,
            beta_hat: report.beta_hat,
            x0,
        })
    }

    pub fn evaluate(&self, suite: &ExponentSuite, t: f64, x: f64) -> Result<(Regime, f64)> {
        let (regime, ln_value) = self.evaluate_ln(suite, t, x)?;
        Ok((regime, ln_value.exp()))
    }

    /// Logarithm of the envelope, finite where the left branch underflows.
    pub fn evaluate_ln(&self, suite: &ExponentSuite, t: f64, x: f64) -> Result<(Regime, f64)> {
        check_time(suite, t, self.x0)?;
        if self.x0 > 0.0 && x >= 1.0 / self.x0 {
            return Err(SpdError::HypothesisViolation(format!(
                "x < 1/x0 = {} required",
                1.0 / self.x0
            )));
        }
        let scale = suite.phi_inv(1.0 / t)?;
        let regime = Regime::classify(x * scale);
        let ln_value = match regime.tag {
            RegimeTag::LeftTail => {
                let s = saddle_w(suite, t, x)?;
                -0.5 * (t * s.phi_d2).ln() - s.exponent
            }
            RegimeTag::Bulk => scale.ln(),
            RegimeTag::RightTail => (t * suite.phi(1.0 / x, 0)? / x).ln(),
        };
        Ok((regime, ln_value))
    }
}

pub fn envelope(suite: &ExponentSuite, t: f64, x: f64) -> Result<(Regime, f64)> {
    ThreeRegimeEnvelope::new(suite)?.evaluate(suite, t, x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levy_model::{stable_unit_scale, JumpFamily, LevyModel};
    use crate::saddlepoint::asym_density;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    fn stable() -> ExponentSuite {
        ExponentSuite::new(LevyModel::unit_stable(1.5).unwrap()).unwrap()
    }

    #[test]
    fn eta_examples() {
        let s = stable();
        let maj = EtaMajorant::new(&s).unwrap();
        assert!(rel(eta(&s, &maj, 1.0).unwrap(), 0.75) < 1e-12);
        assert!(rel(eta(&s, &maj, 3.0).unwrap(), 0.75 * 3f64.powf(-2.5)) < 1e-12);
        assert_eq!(eta(&s, &maj, 0.0).unwrap(), f64::INFINITY);
    }

    #[test]
    fn eta_tempered_branches_are_comparable() {
        let m = LevyModel::centered(0.0, JumpFamily::tempered_stable(1.5, 1.0, 1.0).unwrap()).unwrap();
        let s = ExponentSuite::new(m).unwrap();
        let maj = EtaMajorant::new(&s).unwrap();
        assert_eq!(maj.x0, 1.0);
        let below = eta(&s, &maj, 1.0 - 1e-9).unwrap();
        let above = eta(&s, &maj, 1.0).unwrap();
        assert!(rel(below, above) < 1e-6, "{below} vs {above}");
        let mut prev = f64::INFINITY;
        for i in 0..80 {
            let v = eta(&s, &maj, 10f64.powf(-3.0 + 0.075 * i as f64)).unwrap();
            assert!(v <= prev * (1.0 + 1e-12));
            prev = v;
        }
    }

    #[test]
    fn drift_compensator_examples() {
        let s = stable();
        let c = stable_unit_scale(1.5);
        assert!(rel(drift_compensator(&s, 1.0).unwrap(), -c / 0.5) < 1e-13);
        assert!(rel(drift_compensator(&s, 1.0).unwrap(), -0.846_284_375_321_634_3) < 1e-9);
        for r in [0.1, 0.5, 3.0] {
            let closed = drift_compensator(&s, r).unwrap();
            let tail = s.model().weighted_moment(1, 0.0, Window::Above(r)).unwrap();
            assert!(rel(closed, -tail) < 1e-12);
        }
        for (r1, r2) in [(0.1, 0.5), (0.3, 3.0), (2.0, 9.0)] {
            let lhs = (drift_compensator(&s, r1).unwrap() - drift_compensator(&s, r2).unwrap()).abs();
            let rhs = r2 * r2 * s.pruitt_h(r2).unwrap() / r1;
            assert!(lhs <= rhs);
        }
    }

    #[test]
    fn upper_bound_examples() {
        let s = stable();
        let maj = EtaMajorant::new(&s).unwrap();
        assert!(
            rel(
                upper_bound(&s, &maj, 1.0, 0.0).unwrap(),
                (1.0f64 / 0.75).powf(2.0 / 3.0)
            ) < 1e-10
        );
        assert!(rel(upper_bound(&s, &maj, 1.0, 10.0).unwrap(), 0.75 * 10f64.powf(-2.5)) < 1e-12);
        let xs = upper_bound_crossover(&s, &maj, 1.0).unwrap();
        let left = upper_bound(&s, &maj, 1.0, xs * (1.0 - 1e-9)).unwrap();
        let right = upper_bound(&s, &maj, 1.0, xs * (1.0 + 1e-9)).unwrap();
        assert!(rel(left, right) < 1e-8);
        let b = ExponentSuite::new(LevyModel::brownian(1.0, 0.0).unwrap()).unwrap();
        assert!(matches!(
            upper_bound(&b, &maj, 1.0, 0.0),
            Err(SpdError::HypothesisViolation(_))
        ));
    }

    #[test]
    fn mode_window_examples() {
        let s = stable();
        let (lo, hi) = mode_window(&s, 1.0, 2.0, 1.0, 1.0).unwrap();
        let center = -1.5 * (2.0f64 / 0.75).powf(1.0 / 3.0);
        let r = 1.0 / (1.0f64 / 0.75).powf(2.0 / 3.0);
        assert!(rel(0.5 * (lo + hi), center) < 1e-10);
        assert!(rel(0.5 * (hi - lo), r) < 1e-10);
        assert!((center + 2.0801).abs() < 1e-4);
        let b = ExponentSuite::new(LevyModel::brownian(1.0, 0.0).unwrap()).unwrap();
        assert!(mode_window(&b, 1.0, 2.0, 1.0, 1.0).is_err());
        for t in [1e-3, 0.1, 1.0, 10.0] {
            let c = mode_center(&s, t, 1.0 + 1e-12).unwrap();
            let ratio = c.abs() * s.phi_inv(1.0 / t).unwrap();
            assert!(ratio > 0.1 && ratio < 10.0);
        }
    }

    #[test]
    fn tail_lower_shape_example() {
        let s = stable();
        let c = stable_unit_scale(1.5);
        assert!(rel(tail_lower_shape(&s, 1.0, 2.0).unwrap(), c * 2f64.powf(-2.5)) < 1e-14);
        assert!((tail_lower_shape(&s, 1.0, 2.0).unwrap() - 0.0748).abs() < 1e-4);
    }

    #[test]
    fn envelope_examples() {
        let s = stable();
        let (r, v) = envelope(&s, 1.0, 2.0).unwrap();
        assert_eq!(r.tag, RegimeTag::RightTail);
        assert!(rel(v, 0.5 * 0.5f64.powf(1.5)) < 1e-12);
        let (r, v) = envelope(&s, 1.0, 0.0).unwrap();
        assert_eq!(r.tag, RegimeTag::Bulk);
        assert!(rel(v, 1.0) < 1e-12);
        let (r, v) = envelope(&s, 1.0, -3.0).unwrap();
        assert_eq!(r.tag, RegimeTag::LeftTail);
        let a = asym_density(&s, 1.0, -3.0).unwrap().value;
        assert!(rel(v, a * (2.0 * std::f64::consts::PI).sqrt()) < 1e-12);
    }

    #[test]
    fn envelope_rejects_bounded_variation_like_indices() {
        let m = LevyModel::new(1.0, 0.0, Some(JumpFamily::truncated_stable(0.5, 1.0, 1.0).unwrap())).unwrap();
        let s = ExponentSuite::new(m).unwrap();
        assert!(matches!(envelope(&s, 1.0, 0.0), Err(SpdError::HypothesisViolation(_))));
    }
}
