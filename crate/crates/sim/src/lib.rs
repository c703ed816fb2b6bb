//! File formats, Monte Carlo simulation and the `bmp` command line tool
//! built on `bmp-core`.

pub mod ber;
pub mod cli;
pub mod error;
pub mod formats;

pub use error::{Result, SimError};
