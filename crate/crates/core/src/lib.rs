pub mod benchmarks;
pub mod domain;
pub mod error;
pub mod experiment;
pub mod learners;
pub mod metrics;
pub mod optimizer;
pub mod stats;
pub mod strategies;
pub mod surrogate;

pub use error::{Error, Result};
