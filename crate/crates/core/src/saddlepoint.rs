//! The saddle point w = (φ')⁻¹(-x/t) and the leading-order saddle-point
//! density `(2π t φ''(w))^(-1/2) exp{-t(wφ'(w) - φ(w))}`.

use serde::{Deserialize, Serialize};

use crate::density::{DensityEstimate, Method};
use crate::error::{Result, SpdError};
use crate::exponents::ExponentSuite;
use crate::roots::{expand_down, expand_up, newton_bracketed};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SaddleResult {
    pub t: f64,
    pub x: f64,
    pub w: f64,
    /// t·w²·φ''(w)
    pub hardness: f64,
    /// t·(wφ'(w) − φ(w))
    pub exponent: f64,
    /// (2π t φ''(w))^(-1/2)
    pub prefactor: f64,
    pub phi: f64,
    pub phi_d1: f64,
    pub phi_d2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    Inside,
    Outside,
}

/// Which gates `asym_region` applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RegionGate {
    /// hardness > M only.
    #[default]
    Hardness,
    /// Additionally `-x φ⁻¹(1/t) > M` when `t < 1/Φ(x0 ∨ 2θ₀)`.
    HardnessAndScaled,
}

fn check_t(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(SpdError::InvalidParameter {
            path: "t".into(),
            reason: format!("must be positive and finite, got {t}"),
        })
    }
}

/// Smallest value of φ' on (θ₁, ∞).
fn phi_d1_floor(suite: &ExponentSuite) -> Result<f64> {
    if suite.theta1() > 0.0 {
        Ok(0.0)
    } else {
        match suite.phi(0.0, 1) {
            Ok(v) => Ok(v),
            Err(SpdError::DivergentMoment(_)) => Ok(f64::NEG_INFINITY),
            Err(e) => Err(e),
        }
    }
}

pub fn saddle_w(suite: &ExponentSuite, t: f64, x: f64) -> Result<SaddleResult> {
    check_t(t)?;
    let y = -x / t;
    let floor = phi_d1_floor(suite)?;
    if !(y > floor) || !y.is_finite() {
        return Err(SpdError::OutOfRange(format!(
            "-x/t = {y} is not above φ'(θ₁+) = {floor}; no saddle point"
        )));
    }
    let theta1 = suite.theta1();
    let hi = expand_up(theta1.max(1.0), |w| Ok(suite.phi(w, 1)? > y))?;
    let lo = if theta1 > 0.0 {
        theta1
    } else {
        expand_down(hi, |w| Ok(suite.phi(w, 1)? < y))?
    };
    let f = |w: f64| -> Result<(f64, f64)> { Ok((suite.phi(w, 1)? - y, suite.phi(w, 2)?)) };
    let w = newton_bracketed(f, lo, hi, 1e-16 * hi)?;
    if w <= theta1 {
        return Err(SpdError::OutOfRange(format!(
            "saddle point {w} not above θ₁ = {theta1}"
        )));
    }
    let phi = suite.phi(w, 0)?;
    let phi_d1 = suite.phi(w, 1)?;
    let phi_d2 = suite.phi(w, 2)?;
    if (phi_d1 - y).abs() > 1e-10 * y.abs().max(f64::MIN_POSITIVE) && (phi_d1 - y).abs() > 1e-13 {
        return Err(SpdError::NoConvergence(format!("φ'(w) = {phi_d1} misses target {y}")));
    }
    Ok(SaddleResult {
        t,
        x,
        w,
        hardness: t * w * w * phi_d2,
        exponent: t * (w * y - phi),
        prefactor: (2.0 * std::f64::consts::PI * t * phi_d2).powf(-0.5),
        phi,
        phi_d1,
        phi_d2,
    })
}

/// Saddle-point density; the error indicator is the hardness.
pub fn asym_density(suite: &ExponentSuite, t: f64, x: f64) -> Result<DensityEstimate> {
    let s = saddle_w(suite, t, x)?;
    Ok(asym_from_saddle(&s))
}

pub fn asym_from_saddle(s: &SaddleResult) -> DensityEstimate {
    let ln = -0.5 * (2.0 * std::f64::consts::PI * s.t * s.phi_d2).ln() - s.exponent;
    let mut d = DensityEstimate::from_ln(ln, Method::Asym, s.hardness);
    d.contour_w = Some(s.w);
    d
}

/// Whether (t, x) lies where the saddle-point asymptotic is expected to hold.
pub fn asym_region(suite: &ExponentSuite, t: f64, x: f64, m: f64, gate: RegionGate) -> Result<Region> {
    let s = match saddle_w(suite, t, x) {
        Ok(s) => s,
        Err(SpdError::OutOfRange(_)) => return Ok(Region::Outside),
        Err(e) => return Err(e),
    };
    if !(s.hardness > m) {
        return Ok(Region::Outside);
    }
    if gate == RegionGate::HardnessAndScaled {
        let anchor = suite.model().x0.max(2.0 * suite.theta0());
        let applicable = anchor == 0.0 || t < 1.0 / suite.big_phi(anchor)?;
        if applicable && !(-x * suite.phi_inv(1.0 / t)? > m) {
            return Ok(Region::Outside);
        }
    }
    Ok(Region::Inside)
}
