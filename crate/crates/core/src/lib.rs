//! Synchrosqueezing-transform instantaneous-frequency estimation and
//! ECG-derived respiration.
//!
//! The library follows the signal through the whole chain: uniform-signal
//! conditioning ([`signal`]), continuous wavelet transform on a geometric
//! scale grid ([`cwt`]), phase transform and frequency reassignment
//! ([`sst`]), penalized ridge extraction ([`ridge`]), band reconstruction
//! ([`reconstruct`]) and the composed pipelines ([`pipeline`], [`edr`]).
//! Synthetic generators with exported ground truth ([`synth`]) and scoring
//! utilities ([`eval`]) make every stage verifiable without clinical data.

pub mod cwt;
pub mod edr;
pub mod error;
pub mod eval;
pub mod pipeline;
pub mod reconstruct;
pub mod ridge;
pub mod signal;
pub mod spline;
pub mod sst;
pub mod synth;

pub use error::{Error, Result};
