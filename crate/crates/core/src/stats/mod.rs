//! Numerical primitives shared by the rest of the crate.
//!
//! - [`normal`]: standard normal cdf, density and quantile
//! - [`quadrature`]: adaptive Gauss–Kronrod integration with infinite-range substitution
//! - [`rng`]: counter-based random streams keyed by `(seed, replicate, substream)`
//! - [`planning`]: Schoenfeld event-count planning

pub mod normal;
pub mod planning;
pub mod quadrature;
pub mod rng;

pub use normal::{normal_cdf, normal_log_cdf, normal_pdf, normal_quantile, normal_sf};
pub use planning::schoenfeld_events;
pub use quadrature::{integrate, Quadrature};
pub use rng::RandomStream;
