//! Error-probability analysis for quantum-illumination secure communication.
//!
//! Alice sends the signal half of a two-mode squeezed vacuum to Bob over a
//! pure-loss channel, Bob BPSK-modulates it, adds classical Gaussian noise and
//! returns it. Alice decodes with the retained idler; a passive eavesdropper
//! collects everything the channel loses in both directions.
//!
//! The crate works at the level of Wigner covariance matrices (vacuum = I/4):
//!
//! - [`symplectic`]: Williamson decomposition of 4×4 covariance matrices.
//! - [`protocol`]: conditional covariances and scalar symbols of the protocol.
//! - [`discrimination`]: Chernoff / Bhattacharyya exponents and error bounds.
//! - [`fock`]: truncated Fock-space oracle for the Gaussian overlap formula.
//! - [`montecarlo`]: sampled homodyne and OPA receivers.
//! - [`cli`]: the `qillum` command-line tool.

#![forbid(unsafe_code)]

pub mod cli;
pub mod discrimination;
pub mod error;
pub mod exec;
pub mod fock;
pub mod montecarlo;
pub mod protocol;
pub mod symplectic;

pub use error::{Error, Result};
pub use exec::Exec;
pub use protocol::{Bit, DerivedSymbols, ProtocolParams};
pub use symplectic::{CovMat4, WilliamsonDecomp};
