pub mod asymptotics;
pub mod determinants;
pub mod ensembles;
pub mod error;
pub mod harness;
pub mod physics;
pub mod precision;
pub mod specfun;
pub mod symbols;

pub use error::{FhError, Result};
