pub mod channels;
pub mod cli;
pub mod comparison;
pub mod entanglement;
pub mod error;
pub mod geometry;
pub mod numerics;
pub mod optimal_inputs;
pub mod repetition;

pub use error::{Error, Result};
