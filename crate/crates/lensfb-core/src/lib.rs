//! Core library for limited feedback in lens-based mmWave massive MIMO.
//!
//! The downlink is a ULA base station behind a DFT lens with a beam
//! selector reducing `M` antennas to `N_RF` RF chains. Users quantize the
//! dimension-reduced equivalent channel with either the classical RVQ
//! codebook or the dimension-reduced subspace codebook, and the BS applies
//! zero-forcing precoding on the fed-back channels.
//!
//! The crate is `no_std` (with `alloc`); all IO, configuration and the
//! Monte Carlo harness live in the companion `lensfb-sim` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod beamspace;
pub mod channel;
pub mod codebook;
pub mod error;
pub mod numerics;
pub mod precoding;

pub use error::{Error, Result};
pub use numerics::{ComplexMatrix, RngStream, C64};
