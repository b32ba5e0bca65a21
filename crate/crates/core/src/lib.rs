//! Simulation, calibration and analysis engine for a seamless Phase II/III
//! oncology design with Bayesian dose optimization at the interim.
//!
//! Module map:
//!
//! - [`stats`]: normal distribution functions, quadrature, random streams
//! - [`design`]: design/scenario specifications and summary records
//! - [`interim`]: posteriors, dose selection and the interim decision
//! - [`ssr`]: predictive probability of success and event re-estimation
//! - [`engine`]: patient-level trial simulation and operating characteristics
//! - [`calibration`]: grid-search calibration of the decision margins
//! - [`bounds`]: numerical Type I error bounds

// `!(x > 0.0)` is used on purpose so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod bounds;
pub mod calibration;
pub mod design;
pub mod engine;
mod error;
pub mod interim;
pub mod ssr;
pub mod stats;

pub use error::{Error, Result};

/// Engine version recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
