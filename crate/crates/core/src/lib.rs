//! Link-level simulator for an OFDM baseband chain.
//!
//! The crate models a transmitter (bit source, QAM/PSK/DPSK constellation
//! mapping, optional differential encoding, OFDM framing with cyclic
//! prefix), a channel (AWGN, flat Rayleigh or Rician fading with a Clarke
//! Doppler spectrum), and a pilotless receiver (FFT, differential or
//! coherent detection, hard decisions), plus a Monte Carlo harness that
//! measures BER-vs-Eb/N0 curves against closed-form references.
//!
//! Everything is deterministic per seed: data, noise and fading use
//! independent derived streams, and sweep results do not depend on thread
//! count.

pub mod channel;
pub mod error;
pub mod harness;
pub mod link;
pub mod mapping;
pub mod math;
pub mod ofdm;
pub mod seed;

pub use error::{Error, Result};
