//! Finite-size key rates for continuous-variable measurement-device-independent
//! QKD with trusted source-noise monitoring and RIN-aware calibration.
//!
//! Covariance matrices are in shot-noise units with xpxp ordering. Rates are
//! in bits per channel use.

// NaN must fail every range check, so `!(x > 0.0)` is deliberate.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod calibration;
pub mod channel;
pub mod error;
pub mod gaussian;
pub mod keyrate;
pub mod oracle;
pub mod protocol;

pub use calibration::{Estimate, EstimationResult, RinModel};
pub use channel::{AttackModel, AttackParams, ChannelParams, Geometry};
pub use error::{Error, Result};
pub use gaussian::{CovarianceMatrix, ModeLabel, Quadrature, SymplecticSpectrum};
pub use keyrate::{FiniteSizeParams, KeyRateBreakdown, PeMode, Scenario};
pub use protocol::{CaseId, ProtocolParams, TrustedSetup};
