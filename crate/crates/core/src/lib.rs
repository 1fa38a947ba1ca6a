//! Robust posted-price and lottery mechanisms for sellers who know only the
//! mean and a bound on the standard deviation of buyer values, together with
//! the adversarial distributions that make their guarantees tight.

pub mod adversary;
pub mod auctions;
pub mod curves;
pub mod distributions;
mod error;
pub mod math;
pub mod mechanisms;
mod report;
pub mod stats;

pub use error::{Error, Result};
pub use math::{MomentInfo, SolverConfig};
pub use report::ratio;
