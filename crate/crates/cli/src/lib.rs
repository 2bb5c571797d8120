//! Library surface of the `linksim` command-line tool: scenario presets,
//! output emission, and the error/exit-code policy.  The binary in
//! `main.rs` is a thin clap wrapper over this.

pub mod error;
pub mod output;
pub mod scenario;

pub use error::CliError;
