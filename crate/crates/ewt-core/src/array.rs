//! Real/complex sample grids and the discrete Fourier transform contract.
//!
//! Conventions used across the crate:
//!
//! - forward transforms are unnormalized, inverses divide by the sample
//!   count;
//! - spectra are stored DC-at-index-0; [`fftshift`] produces DC-centered
//!   views when needed;
//! - bin `k` of a length-`K` axis maps to `omega = 2*pi*k/K` folded into
//!   `(-pi, pi]` (see [`bin_omega`]).

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;

use crate::error::EwtError;
use crate::fft;
use crate::Result;

/// A real-valued 1D signal with at least two finite samples.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal1D {
    samples: Vec<f64>,
}

impl Signal1D {
    pub fn new(samples: Vec<f64>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(EwtError::InvalidArgument(format!(
                "signal needs at least 2 samples, got {}",
                samples.len()
            )));
        }
        if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
            return Err(EwtError::InvalidArgument(format!(
                "non-finite sample at index {i}"
            )));
        }
        Ok(Self { samples })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    /// Squared Euclidean norm of the samples.
    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|v| v * v).sum()
    }
}

/// A real-valued image stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    rows: usize,
    cols: usize,
    pixels: Vec<f64>,
}

impl Image {
    pub fn new(rows: usize, cols: usize, pixels: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 || rows * cols < 4 {
            return Err(EwtError::InvalidArgument(format!(
                "image dimensions {rows}x{cols} too small (need rows*cols >= 4)"
            )));
        }
        if pixels.len() != rows * cols {
            return Err(EwtError::InvalidArgument(format!(
                "pixel buffer holds {} values, expected {}",
                pixels.len(),
                rows * cols
            )));
        }
        if let Some(i) = pixels.iter().position(|v| !v.is_finite()) {
            return Err(EwtError::InvalidArgument(format!(
                "non-finite pixel at flat index {i}"
            )));
        }
        Ok(Self { rows, cols, pixels })
    }

    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        Self::new(rows, cols, vec![0.0; rows * cols])
    }

    /// Build from a per-pixel closure `f(row, col)`.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut pixels = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                pixels.push(f(r, c));
            }
        }
        Self::new(rows, cols, pixels)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.pixels[row * self.cols + col]
    }

    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }

    pub fn into_pixels(self) -> Vec<f64> {
        self.pixels
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.pixels[r * self.cols..(r + 1) * self.cols]
    }

    /// Squared Frobenius norm.
    pub fn energy(&self) -> f64 {
        self.pixels.iter().map(|v| v * v).sum()
    }

    /// Centered square crop of even side, largest that fits.
    pub fn center_even_square(&self) -> Result<Image> {
        let side = self.rows.min(self.cols) & !1usize;
        if side < 4 {
            return Err(EwtError::InvalidArgument(format!(
                "image {}x{} too small for an even square crop",
                self.rows, self.cols
            )));
        }
        let r0 = (self.rows - side) / 2;
        let c0 = (self.cols - side) / 2;
        Image::from_fn(side, side, |r, c| self.get(r0 + r, c0 + c))
    }
}

/// Frequency-axis layout of a [`ComplexPlane`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FreqLayout {
    /// Bin `(0, 0)` holds the DC coefficient (native DFT order).
    DcFirst,
    /// DC sits at `(rows/2, cols/2)` (shifted view).
    DcCentered,
}

/// A complex matrix tagged with its frequency layout.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexPlane {
    rows: usize,
    cols: usize,
    values: Vec<Complex64>,
    layout: FreqLayout,
    conjugate_symmetric: bool,
}

impl ComplexPlane {
    pub fn new(rows: usize, cols: usize, values: Vec<Complex64>, layout: FreqLayout) -> Result<Self> {
        if rows == 0 || cols == 0 || values.len() != rows * cols {
            return Err(EwtError::InvalidArgument(format!(
                "complex plane buffer holds {} values, expected {rows}x{cols}",
                values.len()
            )));
        }
        Ok(Self {
            rows,
            cols,
            values,
            layout,
            conjugate_symmetric: false,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn layout(&self) -> FreqLayout {
        self.layout
    }

    /// Whether the content is known to satisfy `F(-w) = conj(F(w))`.
    pub fn is_conjugate_symmetric(&self) -> bool {
        self.conjugate_symmetric
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.values[row * self.cols + col]
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        self.conjugate_symmetric = false;
        &mut self.values
    }
}

/// Map DFT bin `k` of a length-`n` axis to its frequency in `(-pi, pi]`.
/// Mirrored bins get exactly negated values (`bin_omega(n-k, n) ==
/// -bin_omega(k, n)`), which keeps frequency masks bit-exactly symmetric.
#[inline]
pub fn bin_omega(k: usize, n: usize) -> f64 {
    if 2 * k <= n {
        2.0 * PI * k as f64 / n as f64
    } else {
        -(2.0 * PI * (n - k) as f64 / n as f64)
    }
}

/// Forward 1D DFT (unnormalized).
pub fn dft1(signal: &Signal1D) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = signal
        .samples()
        .iter()
        .map(|&v| Complex64::new(v, 0.0))
        .collect();
    fft::fft_forward(&mut buf);
    buf
}

/// Inverse 1D DFT carrying the `1/K` factor.
pub fn idft1(spectrum: &[Complex64]) -> Vec<Complex64> {
    let mut buf = spectrum.to_vec();
    fft::fft_inverse(&mut buf);
    buf
}

/// Real part of the inverse 1D DFT, returning the largest imaginary residue
/// alongside. Callers filtering with symmetric real masks expect the residue
/// to sit at rounding level.
pub fn idft1_real(spectrum: &[Complex64]) -> (Vec<f64>, f64) {
    let buf = idft1(spectrum);
    let mut residue = 0.0f64;
    let out = buf
        .iter()
        .map(|v| {
            residue = residue.max(v.im.abs());
            v.re
        })
        .collect();
    (out, residue)
}

/// Forward 2D DFT of a real image (row transforms, then column transforms).
/// The output is DC-at-index-0 and flagged conjugate symmetric.
pub fn dft2(image: &Image) -> ComplexPlane {
    let (rows, cols) = (image.rows(), image.cols());
    let mut values: Vec<Complex64> = image
        .pixels()
        .iter()
        .map(|&v| Complex64::new(v, 0.0))
        .collect();

    let mut row_buf: Vec<Complex64> = Vec::with_capacity(cols);
    for r in 0..rows {
        row_buf.clear();
        row_buf.extend_from_slice(&values[r * cols..(r + 1) * cols]);
        fft::fft_forward(&mut row_buf);
        values[r * cols..(r + 1) * cols].copy_from_slice(&row_buf);
    }
    let mut col_buf: Vec<Complex64> = Vec::with_capacity(rows);
    for c in 0..cols {
        col_buf.clear();
        col_buf.extend((0..rows).map(|r| values[r * cols + c]));
        fft::fft_forward(&mut col_buf);
        for r in 0..rows {
            values[r * cols + c] = col_buf[r];
        }
    }

    let mut plane = ComplexPlane::new(rows, cols, values, FreqLayout::DcFirst)
        .expect("dimensions come from a valid image");
    plane.conjugate_symmetric = true;
    plane
}

/// Inverse 2D DFT returning the real part; the caller gets the largest
/// imaginary residue for conjugate-symmetry checks. Accepts either layout.
pub fn idft2(plane: &ComplexPlane) -> (Image, f64) {
    let native;
    let plane = match plane.layout {
        FreqLayout::DcFirst => plane,
        FreqLayout::DcCentered => {
            native = fftshift(plane);
            &native
        }
    };
    let (rows, cols) = (plane.rows, plane.cols);
    let mut values = plane.values.clone();

    let mut row_buf: Vec<Complex64> = Vec::with_capacity(cols);
    for r in 0..rows {
        row_buf.clear();
        row_buf.extend_from_slice(&values[r * cols..(r + 1) * cols]);
        fft::fft_inverse(&mut row_buf);
        values[r * cols..(r + 1) * cols].copy_from_slice(&row_buf);
    }
    let mut col_buf: Vec<Complex64> = Vec::with_capacity(rows);
    for c in 0..cols {
        col_buf.clear();
        col_buf.extend((0..rows).map(|r| values[r * cols + c]));
        fft::fft_inverse(&mut col_buf);
        for r in 0..rows {
            values[r * cols + c] = col_buf[r];
        }
    }

    let mut residue = 0.0f64;
    let pixels: Vec<f64> = values
        .iter()
        .map(|v| {
            residue = residue.max(v.im.abs());
            v.re
        })
        .collect();
    let image = Image::new(rows, cols, pixels).expect("dimensions preserved, values finite");
    (image, residue)
}

/// Swap quadrants so the DC bin moves between native and centered layouts.
/// Applying it twice restores the input on even axes; the function is its
/// own inverse only for even dimensions, which is all the crate uses it for.
pub fn fftshift(plane: &ComplexPlane) -> ComplexPlane {
    let (rows, cols) = (plane.rows, plane.cols);
    let (dr, dc) = match plane.layout {
        FreqLayout::DcFirst => (rows / 2, cols / 2),
        FreqLayout::DcCentered => (rows.div_ceil(2), cols.div_ceil(2)),
    };
    let mut values = vec![Complex64::new(0.0, 0.0); rows * cols];
    for r in 0..rows {
        for c in 0..cols {
            let nr = (r + dr) % rows;
            let nc = (c + dc) % cols;
            values[nr * cols + nc] = plane.values[r * cols + c];
        }
    }
    ComplexPlane {
        rows,
        cols,
        values,
        layout: match plane.layout {
            FreqLayout::DcFirst => FreqLayout::DcCentered,
            FreqLayout::DcCentered => FreqLayout::DcFirst,
        },
        conjugate_symmetric: plane.conjugate_symmetric,
    }
}
