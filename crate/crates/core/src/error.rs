use thiserror::Error;

/// Errors reported by the simulator.
///
/// `Config` covers parameters that can never be valid (wrong constellation
/// order, zero-length FFT, negative noise variance); `Domain` covers inputs
/// that are malformed for an otherwise valid configuration (bit counts that
/// do not divide into symbols, mismatched buffer lengths).
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("invalid input: {0}")]
    Domain(String),
}

pub type Result<T> = std::result::Result<T, Error>;
