//! 1D empirical wavelet transform: Meyer/Littlewood-Paley style filters on
//! a detected partition of `[0, pi]`.
//!
//! Masks are real, symmetric in frequency and built from cos/sin ramps of
//! the polynomial [`beta`] inside transition intervals `[(1-gamma)w^n,
//! (1+gamma)w^n]`, so the squared masks sum to one at every frequency. The
//! final detail band stays at one up to the Nyquist bin (no down-ramp at
//! `pi`), matching the corner-preserving treatment of the 2D annular banks
//! and keeping the partition of unity exact on the discrete circle.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_2;
use num_complex::Complex64;

use crate::array::{bin_omega, dft1, idft1_real, Signal1D};
use crate::boundaries::BoundarySet;
use crate::error::EwtError;
use crate::Result;

/// Scale factor applied to the disjointness bound when picking `gamma`.
pub const GAMMA_SAFETY: f64 = 0.99;

/// Meyer ramp profile: `0` below `0`, `1` above `1`, and
/// `x^4 (35 - 84x + 70x^2 - 20x^3)` in between.
///
/// Evaluated in odd form around `x = 1/2` (all coefficients dyadic), which
/// keeps `beta(x) + beta(1-x) - 1` at rounding level; the monomial form
/// loses ~1e-14 to cancellation near the endpoints.
pub fn beta(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else {
        let u = x - 0.5;
        let u2 = u * u;
        0.5 + u * (2.1875 + u2 * (-8.75 + u2 * (21.0 - 20.0 * u2)))
    }
}

/// Lowpass mask value at radius `r` for the first boundary `w1`.
pub(crate) fn lowpass_value(r: f64, w1: f64, gamma: f64) -> f64 {
    let lo = (1.0 - gamma) * w1;
    let hi = (1.0 + gamma) * w1;
    if r <= lo {
        1.0
    } else if r <= hi {
        libm::cos(FRAC_PI_2 * beta((r - lo) / (2.0 * gamma * w1)))
    } else {
        0.0
    }
}

/// Bandpass mask value at radius `r` for the band `[lo_bound, hi_bound]`.
/// `hi_bound = None` marks the last band, which keeps the value `1` for
/// every radius above its rising transition.
pub(crate) fn bandpass_value(r: f64, lo_bound: f64, hi_bound: Option<f64>, gamma: f64) -> f64 {
    let rise_lo = (1.0 - gamma) * lo_bound;
    let rise_hi = (1.0 + gamma) * lo_bound;
    if r < rise_lo {
        return 0.0;
    }
    if r <= rise_hi {
        return libm::sin(FRAC_PI_2 * beta((r - rise_lo) / (2.0 * gamma * lo_bound)));
    }
    match hi_bound {
        None => 1.0,
        Some(hi) => {
            let fall_lo = (1.0 - gamma) * hi;
            let fall_hi = (1.0 + gamma) * hi;
            if r < fall_lo {
                1.0
            } else if r <= fall_hi {
                libm::cos(FRAC_PI_2 * beta((r - fall_lo) / (2.0 * gamma * hi)))
            } else {
                0.0
            }
        }
    }
}

/// Largest `gamma` keeping consecutive transition intervals disjoint,
/// scaled by [`GAMMA_SAFETY`]: the intervals around `w^n` and `w^{n+1}` are
/// disjoint iff `gamma < (w^{n+1}-w^n)/(w^{n+1}+w^n)`.
pub fn choose_gamma(omega: &BoundarySet) -> f64 {
    let bounds = omega.as_slice();
    let mut ratio = 1.0f64;
    for w in bounds[1..].windows(2) {
        ratio = ratio.min((w[1] - w[0]) / (w[1] + w[0]));
    }
    GAMMA_SAFETY * ratio
}

/// Check the disjointness precondition, naming the first offending band.
fn check_overlap(omega: &BoundarySet, gamma: f64) -> Result<()> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(EwtError::InvalidArgument(format!(
            "gamma must lie in (0, 1), got {gamma}"
        )));
    }
    let bounds = omega.as_slice();
    for (n, w) in bounds[1..].windows(2).enumerate() {
        if (1.0 + gamma) * w[0] >= (1.0 - gamma) * w[1] {
            return Err(EwtError::InvalidArgument(format!(
                "transition areas around boundaries {} and {} overlap for gamma {gamma}",
                n + 1,
                n + 2
            )));
        }
    }
    Ok(())
}

/// Fourier-domain masks of the 1D empirical wavelet bank: one lowpass plus
/// `N-1` bandpass filters, sampled on an explicit frequency axis.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterBank1D {
    masks: Vec<Vec<f64>>,
    gamma: f64,
    omega: BoundarySet,
    len: usize,
}

impl FilterBank1D {
    /// Bank sampled at the DFT bin frequencies of a length-`len` signal.
    pub fn new(omega: &BoundarySet, gamma: f64, len: usize) -> Result<Self> {
        if len < 2 {
            return Err(EwtError::InvalidArgument(format!(
                "bank length must be >= 2, got {len}"
            )));
        }
        let freqs: Vec<f64> = (0..len).map(|k| bin_omega(k, len)).collect();
        Self::from_frequencies(omega, gamma, &freqs)
    }

    /// Bank sampled at arbitrary signed frequencies (masks use `|freq|`).
    pub fn from_frequencies(omega: &BoundarySet, gamma: f64, freqs: &[f64]) -> Result<Self> {
        if freqs.len() < 2 {
            return Err(EwtError::InvalidArgument(String::from(
                "frequency axis needs at least 2 samples",
            )));
        }
        let bounds = omega.as_slice();
        let n_bands = omega.n_bands();
        let mut masks = Vec::with_capacity(n_bands);
        if n_bands == 1 {
            // A one-band partition has no transition: the bank is allpass.
            masks.push(freqs.iter().map(|_| 1.0).collect());
        } else {
            check_overlap(omega, gamma)?;
            let w1 = bounds[1];
            masks.push(
                freqs
                    .iter()
                    .map(|&w| lowpass_value(w.abs(), w1, gamma))
                    .collect(),
            );
            for n in 1..n_bands {
                let lo = bounds[n];
                let hi = if n + 1 < n_bands {
                    Some(bounds[n + 1])
                } else {
                    None
                };
                masks.push(
                    freqs
                        .iter()
                        .map(|&w| bandpass_value(w.abs(), lo, hi, gamma))
                        .collect(),
                );
            }
        }
        Ok(Self {
            masks,
            gamma,
            omega: omega.clone(),
            len: freqs.len(),
        })
    }

    pub fn n_bands(&self) -> usize {
        self.masks.len()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn omega(&self) -> &BoundarySet {
        &self.omega
    }

    pub fn mask(&self, band: usize) -> &[f64] {
        &self.masks[band]
    }

    /// Largest deviation of the squared-mask sum from one.
    pub fn frame_deviation(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.len {
            let sum: f64 = self.masks.iter().map(|m| m[i] * m[i]).sum();
            worst = worst.max((sum - 1.0).abs());
        }
        worst
    }
}

/// Subband sequences of a 1D transform; band 0 is the approximation.
#[derive(Debug, Clone, PartialEq)]
pub struct EwtCoeffs1D {
    bands: Vec<Vec<f64>>,
}

impl EwtCoeffs1D {
    pub fn n_bands(&self) -> usize {
        self.bands.len()
    }

    pub fn band(&self, n: usize) -> &[f64] {
        &self.bands[n]
    }

    pub fn bands(&self) -> &[Vec<f64>] {
        &self.bands
    }

    pub fn bands_mut(&mut self) -> &mut [Vec<f64>] {
        &mut self.bands
    }

    pub fn from_bands(bands: Vec<Vec<f64>>) -> Result<Self> {
        if bands.is_empty() {
            return Err(EwtError::InvalidArgument(String::from(
                "coefficient set needs at least one band",
            )));
        }
        Ok(Self { bands })
    }
}

/// Forward transform: each subband is the inverse DFT of the spectrum
/// multiplied by the (real) conjugate mask.
pub fn ewt1d_forward(signal: &Signal1D, bank: &FilterBank1D) -> Result<EwtCoeffs1D> {
    if signal.len() != bank.len() {
        return Err(EwtError::InvalidArgument(format!(
            "signal length {} does not match bank length {}",
            signal.len(),
            bank.len()
        )));
    }
    let spectrum = dft1(signal);
    let scale = signal
        .samples()
        .iter()
        .fold(1.0f64, |m, v| m.max(v.abs()));
    let mut bands = Vec::with_capacity(bank.n_bands());
    for n in 0..bank.n_bands() {
        let masked: Vec<Complex64> = spectrum
            .iter()
            .zip(bank.mask(n))
            .map(|(s, &m)| s * m)
            .collect();
        let (band, residue) = idft1_real(&masked);
        debug_assert!(
            residue <= 1e-10 * scale,
            "imaginary residue {residue} above tolerance"
        );
        bands.push(band);
    }
    Ok(EwtCoeffs1D { bands })
}

/// Inverse transform: sum of subband spectra re-weighted by the masks.
pub fn ewt1d_inverse(coeffs: &EwtCoeffs1D, bank: &FilterBank1D) -> Result<Signal1D> {
    if coeffs.n_bands() != bank.n_bands() {
        return Err(EwtError::InvalidArgument(format!(
            "coefficient bands {} do not match bank bands {}",
            coeffs.n_bands(),
            bank.n_bands()
        )));
    }
    let len = bank.len();
    let mut acc = alloc::vec![Complex64::new(0.0, 0.0); len];
    let mut scale = 1.0f64;
    for (n, band) in coeffs.bands.iter().enumerate() {
        if band.len() != len {
            return Err(EwtError::InvalidArgument(format!(
                "band {n} has length {}, expected {len}",
                band.len()
            )));
        }
        scale = band.iter().fold(scale, |m, v| m.max(v.abs()));
        let spec = dft1(&Signal1D::new(band.clone())?);
        for ((a, s), &m) in acc.iter_mut().zip(spec.iter()).zip(bank.mask(n)) {
            *a += s * m;
        }
    }
    let (samples, residue) = idft1_real(&acc);
    debug_assert!(
        residue <= 1e-10 * scale,
        "imaginary residue {residue} above tolerance"
    );
    Signal1D::new(samples)
}
