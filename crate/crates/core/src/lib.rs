//! Long-range dependence analysis for wireless channel-gain traces.
//!
//! The pipeline loads traces ([`ingest`]), estimates and fits the decay of
//! their autocorrelation ([`acf`], [`fit`]), estimates the Hurst exponent by
//! rescaled-range analysis ([`hurst`]) and screens for wide-sense
//! stationarity ([`stationarity`]). [`synth`] generates processes of known
//! memory used to validate the estimators.

pub mod acf;
pub mod analysis;
pub mod error;
pub mod export;
pub mod fit;
pub mod hurst;
pub mod ingest;
pub mod stationarity;
pub mod synth;
pub mod validate;

pub use error::{Error, Result};
