//! Density values tagged with the method that produced them.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Asym,
    Oracle,
    Envelope,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityEstimate {
    pub value: f64,
    /// Natural log of `value`, finite even when `value` underflows.
    pub ln_value: f64,
    pub method: Method,
    /// Hardness for `Asym`, absolute error bound for `Oracle`.
    pub error_indicator: f64,
    /// Set when a slightly negative oracle value was clamped to zero.
    pub clamped: bool,
    /// Contour abscissa used by the oracle.
    pub contour_w: Option<f64>,
    pub nodes_used: usize,
}

impl DensityEstimate {
    pub fn from_ln(ln_value: f64, method: Method, error_indicator: f64) -> Self {
        Self {
            value: ln_value.exp(),
            ln_value,
            method,
            error_indicator,
            clamped: false,
            contour_w: None,
            nodes_used: 0,
        }
    }
}
