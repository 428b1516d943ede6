//! Encoding, decoding and analysis of Science Birds block structures.
//!
//! Structures are rasterized onto a 128×128 grid at 0.07 units per cell and
//! one-hot encoded over five layers (air, wood, ice, stone, pig). Generated or
//! noisy layer tensors are decoded back to blocks with a kernel-based greedy
//! selection. Corpus generation and deduplication, static stability checks
//! and diversity metrics sit on top.

pub mod corpus;
pub mod decode;
pub mod error;
pub mod level;
pub mod metrics;
pub mod pgm;
pub mod raster;
pub mod stability;

pub use error::{Error, Result};
