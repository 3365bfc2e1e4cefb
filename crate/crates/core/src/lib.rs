//! CRC-aided polar list decoding laboratory.
//!
//! The crate bundles a fixed-point list successive cancellation decoder with
//! several list-management engines (exact sort, double thresholding, and
//! tuple-based simplified multi-bit double thresholding), a cycle-accurate
//! latency model for the matching semi-parallel hardware schedule, and an
//! AWGN Monte-Carlo harness for block-error-rate sweeps.
//!
//! Modules:
//! - [`polar`]: code construction, encoding, CRC, code-spec file format
//! - [`channel`]: BPSK/AWGN transmission and LLR quantization
//! - [`scd`]: single successive-cancellation decoder and its LLR kernels
//! - [`list`]: list decoding engines and path management
//! - [`latency`]: closed-form and schedule-walk cycle accounting
//! - [`sim`]: Monte-Carlo sweeps, scheme comparison, report output

pub mod channel;
pub mod latency;
pub mod list;
pub mod polar;
pub mod scd;
pub mod sim;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unsupported configuration: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
