//! Exact symbolic and numeric tools for almost-Poisson, Poisson and twisted
//! Poisson structures on coordinate phase spaces with polynomial
//! coefficients.

pub mod error;
pub mod exterior;
pub mod flows;
pub mod liealg;
pub mod magnetic;
pub mod parse;
pub mod poly;
pub mod report;
pub mod reproduce;
pub mod vlasov;

pub use error::{Error, Result};
