//! OFDM ISAC simulation and channel knowledge maps.
//!
//! The pipeline runs from waveform generation ([`waveform`]) through geometric
//! echo and downlink synthesis ([`channel`]), radar estimation ([`dsp`]) and
//! map construction ([`ckm`]) to the two experiment drivers in [`scenario`].

// Range checks are written `!(x > 0.0)` so that NaN fails them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod ckm;
pub mod cli;
pub mod dsp;
pub mod error;
pub mod geom;
pub mod linalg;
pub mod par;
pub mod scenario;
pub mod selftest;
pub mod waveform;

pub use error::{Error, Result};

/// Complex sample type used throughout.
pub type C64 = num_complex::Complex64;

/// Propagation speed in m/s. The round value keeps the range bin at the
/// default numerology exactly 1.875 m.
pub const SPEED_OF_LIGHT: f64 = 3.0e8;
