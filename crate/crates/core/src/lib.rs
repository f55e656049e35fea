pub mod cli;
pub mod error;
pub mod eval;
pub mod lattice;
pub mod model;
pub mod oscillator;
pub mod verify;
pub mod whittaker;

pub use error::{GkzError, Result};
