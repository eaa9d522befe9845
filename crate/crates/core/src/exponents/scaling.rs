//! Empirical weak-scaling indices on a log grid.

use serde::{Deserialize, Serialize};

use super::ExponentSuite;
use crate::error::{Result, SpdError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ScalingTarget {
    #[serde(rename = "phi")]
    Phi,
    #[serde(rename = "phi_dd")]
    PhiDd,
    #[serde(rename = "re_psi")]
    RePsi,
    #[serde(rename = "Phi")]
    BigPhi,
}

impl ScalingTarget {
    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "phi" => Some(Self::Phi),
            "phi_dd" => Some(Self::PhiDd),
            "re_psi" => Some(Self::RePsi),
            "Phi" => Some(Self::BigPhi),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Phi => "phi",
            Self::PhiDd => "phi_dd",
            Self::RePsi => "re_psi",
            Self::BigPhi => "Phi",
        }
    }

    /// Added to the raw log-slope so that every target reports the index of
    /// the underlying exponent (φ'' scales like x^(α-2)).
    fn index_offset(self) -> f64 {
        match self {
            Self::PhiDd => 2.0,
            _ => 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub target: ScalingTarget,
    pub probe_range: (f64, f64),
    pub points: usize,
    pub alpha_hat: f64,
    pub beta_hat: f64,
    /// Largest c ≤ 1 with f(y)/f(x) ≥ c (y/x)^(α_ref - offset) on all grid pairs.
    pub c_hat: f64,
    /// Smallest C ≥ 1 with f(y)/f(x) ≤ C (y/x)^(β_ref - offset) on all grid pairs.
    #[serde(rename = "C_hat")]
    pub big_c_hat: f64,
    pub alpha_ref: f64,
    pub beta_ref: f64,
    pub degenerate: bool,
}

pub(super) fn grid(lo: f64, hi: f64, per_decade: usize) -> Vec<f64> {
    let decades = (hi / lo).log10();
    let n = ((decades * per_decade as f64).ceil() as usize).max(1);
    (0..=n).map(|i| lo * (hi / lo).powf(i as f64 / n as f64)).collect()
}

pub(super) fn report(
    suite: &ExponentSuite,
    target: ScalingTarget,
    probe_range: (f64, f64),
    per_decade: usize,
) -> Result<ScalingReport> {
    let (lo, hi) = probe_range;
    if !(lo > 0.0 && hi.is_finite()) {
        return Err(SpdError::GridError(format!(
            "probe range ({lo}, {hi}) must lie in (0, ∞)"
        )));
    }
    let offset = target.index_offset();
    let declared_alpha = suite.model().declared_alpha;
    let declared_beta = suite.model().declared_beta;
    if hi <= lo {
        return Ok(ScalingReport {
            target,
            probe_range,
            points: 0,
            alpha_hat: f64::NAN,
            beta_hat: f64::NAN,
            c_hat: 1.0,
            big_c_hat: 1.0,
            alpha_ref: declared_alpha.unwrap_or(f64::NAN),
            beta_ref: declared_beta.unwrap_or(f64::NAN),
            degenerate: true,
        });
    }
    let xs = grid(lo, hi, per_decade);
    let mut logs = Vec::with_capacity(xs.len());
    for &x in &xs {
        let v = match target {
            ScalingTarget::Phi => suite.phi(x, 0)?,
            ScalingTarget::PhiDd => suite.phi(x, 2)?,
            ScalingTarget::RePsi => suite.re_psi(x)?,
            ScalingTarget::BigPhi => suite.big_phi(x)?,
        };
        if !(v > 0.0) {
            return Err(SpdError::GridError(format!(
                "{} is not positive at {x} ({v}); choose a probe range above θ₀",
                target.name()
            )));
        }
        logs.push((x.ln(), v.ln()));
    }
    let mut alpha_hat = f64::INFINITY;
    let mut beta_hat = f64::NEG_INFINITY;
    for i in 0..logs.len() {
        for j in i + 1..logs.len() {
            let slope = (logs[j].1 - logs[i].1) / (logs[j].0 - logs[i].0) + offset;
            alpha_hat = alpha_hat.min(slope);
            beta_hat = beta_hat.max(slope);
        }
    }
    let alpha_ref = declared_alpha.unwrap_or(alpha_hat);
    let beta_ref = declared_beta.unwrap_or(beta_hat);
    let mut c_hat: f64 = 1.0;
    let mut big_c_hat: f64 = 1.0;
    for i in 0..logs.len() {
        for j in i + 1..logs.len() {
            let dl = logs[j].0 - logs[i].0;
            let df = logs[j].1 - logs[i].1;
            c_hat = c_hat.min((df - (alpha_ref - offset) * dl).exp());
            big_c_hat = big_c_hat.max((df - (beta_ref - offset) * dl).exp());
        }
    }
    Ok(ScalingReport {
        target,
        probe_range,
        points: xs.len(),
        alpha_hat,
        beta_hat,
        c_hat,
        big_c_hat,
        alpha_ref,
        beta_ref,
        degenerate: false,
    })
}
