//! Adaptive ("empirical") wavelet transforms for 1D signals and images.
//!
//! Classic wavelet filter banks tile the Fourier axis dyadically. The
//! transforms in this crate instead detect the Fourier supports from the
//! analyzed data and build Meyer-style filters on the detected partition,
//! yielding tight frames adapted to the signal:
//!
//! - [`ewt1d`]: the 1D empirical wavelet transform on a detected partition
//!   of `[0, pi]`,
//! - [`tensor`]: separable 2D transform with shared row/column banks,
//! - [`littlewood_paley`]: isotropic annular 2D transform with radii
//!   detected on the pseudo-polar radial spectrum,
//! - [`directional`]: empirical ridgelet (1D transforms along pseudo-polar
//!   rays) and empirical curvelet (scale x angle wedges, two angle-detection
//!   variants),
//! - [`boundaries`]: the spectrum segmentation toolbox (trend removal,
//!   midpoint / lowest-minima / fine-to-coarse rules),
//! - [`pseudopolar`]: self-contained pseudo-polar Fourier transform with
//!   adjoint and conjugate-gradient least-squares inverse,
//! - [`denoise`]: soft-threshold denoising harness with PSNR/SSIM scoring.
//!
//! The crate is `no_std` (with `alloc`); file formats and the batch CLI live
//! in the companion `ewt-cli` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod array;
pub mod boundaries;
pub mod denoise;
pub mod directional;
pub mod error;
pub mod ewt1d;
pub(crate) mod fft;
pub mod littlewood_paley;
pub mod morphology;
pub mod pseudopolar;
pub mod tensor;

pub use array::{dft1, dft2, idft1, idft2, ComplexPlane, FreqLayout, Image, Signal1D};
pub use boundaries::{BoundarySet, DetectConfig, Detection, Rule, Spectrum1D, Trend};
pub use error::EwtError;

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, EwtError>;
