//! Transition densities of spectrally positive Lévy processes.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod density;
pub mod envelopes;
pub mod error;
pub mod exponents;
pub mod inversion_oracle;
pub mod levy_model;
pub mod quadrature;
pub mod roots;
pub mod saddlepoint;
pub mod special;
pub mod validation;

pub use density::{DensityEstimate, Method};
pub use envelopes::{
    drift_compensator, envelope, eta, in_tail_region, mode_center, mode_window, tail_lower_shape, upper_bound,
    upper_bound_crossover, EnvelopeConstants, EtaMajorant, Regime, RegimeTag, ThreeRegimeEnvelope,
};
pub use error::{Result, SpdError};
pub use exponents::{ExponentSuite, LadderReading, MonotoneEnvelope, ScalingReport, ScalingTarget};
pub use inversion_oracle::{
    density_oracle, density_oracle_psi, oracle_cross_contour, total_mass, ContourW, CrossContour, MassReport,
    OracleConfig,
};
pub use levy_model::{validate_model, CustomJumps, DecayHint, JumpFamily, LevyModel, ValidationVerdict, Window};
pub use saddlepoint::{asym_density, asym_region, saddle_w, Region, RegionGate, SaddleResult};
pub use validation::{run_check, run_suite, CheckId, CheckReport, CheckStatus, GridSpec, SuiteOutcome, SuiteSummary};
