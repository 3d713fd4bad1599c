pub mod cli;
pub mod error;
pub mod metrics;
pub mod model;
pub mod objective;
pub mod optimizers;
pub mod simulator;

pub use error::{Error, Result};
