//! Analysis, design and decoding of binary message-passing (BMP) decoders
//! for LDPC codes with quantized channel observations.
//!
//! The crate is `no_std` compatible (it needs `alloc`). Everything here is a
//! pure computation; file formats, Monte Carlo simulation and the command
//! line tool live in the `bmp-sim` crate.
//!
//! Modules, bottom-up:
//!
//! - [`channel`]: binary entropy, BSC reliabilities, the BIAWGN channel and
//!   sign-magnitude quantizers decomposed into BSC sub-channels.
//! - [`exit`]: check and variable node transfer functions in the
//!   crossover-probability domain, EXIT curves and stability.
//! - [`de`]: density evolution, threshold search and reliability schedules.
//! - [`mixing`]: mutual information of tabulated symmetric L-value densities.
//! - [`lp`]: a small dense two-phase simplex solver.
//! - [`design`]: degree distributions and LP-based code design.
//! - [`graph`]: Tanner graphs, progressive edge growth and weak cycles.
//! - [`decoder`]: the bit-exact BMP decoder and its majority-rule twin.
#![cfg_attr(not(feature = "std"), no_std)]
#![warn(missing_debug_implementations, rust_2018_idioms)]

extern crate alloc;

pub mod channel;
pub mod de;
pub mod decoder;
pub mod design;
mod error;
pub mod exit;
pub mod graph;
pub mod lp;
pub(crate) mod math;
pub mod mixing;

pub use channel::{
    binary_entropy, binary_entropy_inv, mutual_info_bsc, reliability, BiawgnChannel, BscParams,
    Quantizer, SubChannel, SubChannelDecomposition,
};
pub use de::{DeConfig, DeTrajectory};
pub use decoder::{ChannelObservation, DecodeResult, Decoder, DecoderConfig, ReliabilityMode};
pub use design::DegreeDistribution;
pub use error::{Error, Result};
pub use exit::{ChannelModel, ExitPoint, VndThresholds};
pub use graph::TannerGraph;
