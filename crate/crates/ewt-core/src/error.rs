//! Error type shared by every module of the crate.

use alloc::string::String;
use core::fmt;

/// Errors reported by transforms, detectors and solvers.
#[derive(Debug, Clone, PartialEq)]
pub enum EwtError {
    /// A precondition on the inputs was violated (sizes, ranges, overlap
    /// conditions, ...).
    InvalidArgument(String),
    /// Boundary detection could not produce a usable partition.
    Detection(String),
}

impl fmt::Display for EwtError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EwtError::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            EwtError::Detection(msg) => write!(f, "detection failure: {msg}"),
        }
    }
}

impl core::error::Error for EwtError {}
