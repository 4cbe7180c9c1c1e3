//! Depth-3 circuits for elementary symmetric polynomials modulo composite `m`.

pub mod artifact;
pub mod astrong;
mod block;
pub mod circuit;
pub mod cli;
pub mod cover2d;
pub mod coverkd;
pub mod error;
pub mod sympoly;
pub mod zmod;

pub use error::{Error, Result};
