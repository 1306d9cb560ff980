//! Audio-to-image representations, augmentation protocols and score fusion.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod audio;
pub mod augment;
pub mod dsp;
pub mod repr;
pub mod error;
pub mod fusion;
pub mod pipeline;
pub mod rng;
pub mod tsm;

mod fsutil;
#[cfg(test)]
mod testutil;

pub use audio::AudioClip;
pub use error::{Error, Result};
pub use rng::RngStream;
