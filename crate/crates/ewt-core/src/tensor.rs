//! Separable 2D empirical wavelet transform: one shared bank filters every
//! row, a second shared bank filters every column of each row output, so a
//! subband plane `(n, m)` carries the rectangular Fourier support
//! `mask_row_n(w2) * mask_col_m(w1)`.
//!
//! Both banks are detected on averaged magnitude spectra (rows averaged for
//! the row bank, columns for the column bank); per-row adaptive banks would
//! make subband content jump between neighboring rows.

use alloc::format;
use alloc::vec::Vec;
use num_complex::Complex64;

use crate::array::{dft1, idft1_real, Image, Signal1D};
use crate::boundaries::{self, DetectConfig, Detection, Spectrum1D};
use crate::error::EwtError;
use crate::ewt1d::{choose_gamma, FilterBank1D};
use crate::Result;

/// The pair of shared 1D banks: `bank_row` acts along rows (length = image
/// columns), `bank_col` along columns (length = image rows).
#[derive(Debug, Clone, PartialEq)]
pub struct TensorBanks {
    pub bank_row: FilterBank1D,
    pub bank_col: FilterBank1D,
}

impl TensorBanks {
    pub fn n_row_bands(&self) -> usize {
        self.bank_row.n_bands()
    }

    pub fn n_col_bands(&self) -> usize {
        self.bank_col.n_bands()
    }
}

/// `N_R x N_C` real subband planes, row-band major.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorCoeffs {
    planes: Vec<Image>,
    n_row_bands: usize,
    n_col_bands: usize,
}

impl TensorCoeffs {
    pub fn from_planes(planes: Vec<Image>, n_row_bands: usize, n_col_bands: usize) -> Result<Self> {
        if planes.len() != n_row_bands * n_col_bands {
            return Err(EwtError::InvalidArgument(format!(
                "{} planes provided, expected {n_row_bands}x{n_col_bands}",
                planes.len()
            )));
        }
        Ok(Self {
            planes,
            n_row_bands,
            n_col_bands,
        })
    }

    pub fn n_row_bands(&self) -> usize {
        self.n_row_bands
    }

    pub fn n_col_bands(&self) -> usize {
        self.n_col_bands
    }

    pub fn plane(&self, n: usize, m: usize) -> &Image {
        &self.planes[n * self.n_col_bands + m]
    }

    pub fn planes(&self) -> &[Image] {
        &self.planes
    }

    pub fn planes_mut(&mut self) -> &mut [Image] {
        &mut self.planes
    }

    pub fn total_energy(&self) -> f64 {
        self.planes.iter().map(Image::energy).sum()
    }
}

/// Detection and bank records of a full tensor decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorDecomposition {
    pub banks: TensorBanks,
    pub coeffs: TensorCoeffs,
    pub row_detection: Detection,
    pub col_detection: Detection,
}

fn check_2d(image: &Image) -> Result<()> {
    if image.rows() < 2 || image.cols() < 2 {
        return Err(EwtError::InvalidArgument(format!(
            "tensor transform needs rows and cols >= 2, got {}x{}",
            image.rows(),
            image.cols()
        )));
    }
    Ok(())
}

/// Average magnitude of the per-row DFTs, restricted to `[0, pi]`.
pub fn row_mean_spectrum(image: &Image) -> Result<Spectrum1D> {
    check_2d(image)?;
    let cols = image.cols();
    let bins = cols / 2 + 1;
    let mut acc = alloc::vec![0.0f64; bins];
    for r in 0..image.rows() {
        let spec = dft1(&Signal1D::new(image.row(r).to_vec())?);
        for (b, a) in acc.iter_mut().enumerate() {
            *a += spec[b].norm();
        }
    }
    for a in acc.iter_mut() {
        *a /= image.rows() as f64;
    }
    Spectrum1D::from_magnitudes(acc)
}

/// Average magnitude of the per-column DFTs, restricted to `[0, pi]`.
pub fn col_mean_spectrum(image: &Image) -> Result<Spectrum1D> {
    check_2d(image)?;
    let rows = image.rows();
    let bins = rows / 2 + 1;
    let mut acc = alloc::vec![0.0f64; bins];
    let mut col = Vec::with_capacity(rows);
    for c in 0..image.cols() {
        col.clear();
        col.extend((0..rows).map(|r| image.get(r, c)));
        let spec = dft1(&Signal1D::new(col.clone())?);
        for (b, a) in acc.iter_mut().enumerate() {
            *a += spec[b].norm();
        }
    }
    for a in acc.iter_mut() {
        *a /= image.cols() as f64;
    }
    Spectrum1D::from_magnitudes(acc)
}

/// Filter every row of `image` with each band of `bank` (bank length must
/// equal the column count). Returns one plane per band.
fn filter_rows(image: &Image, bank: &FilterBank1D) -> Result<Vec<Image>> {
    let (rows, cols) = (image.rows(), image.cols());
    let mut planes = alloc::vec![alloc::vec![0.0f64; rows * cols]; bank.n_bands()];
    for r in 0..rows {
        let spec = dft1(&Signal1D::new(image.row(r).to_vec())?);
        for (n, plane) in planes.iter_mut().enumerate() {
            let masked: Vec<Complex64> = spec
                .iter()
                .zip(bank.mask(n))
                .map(|(s, &m)| s * m)
                .collect();
            let (band, _) = idft1_real(&masked);
            plane[r * cols..(r + 1) * cols].copy_from_slice(&band);
        }
    }
    planes
        .into_iter()
        .map(|p| Image::new(rows, cols, p))
        .collect()
}

/// Filter every column of `image` with each band of `bank` (bank length
/// must equal the row count).
fn filter_cols(image: &Image, bank: &FilterBank1D) -> Result<Vec<Image>> {
    let (rows, cols) = (image.rows(), image.cols());
    let mut planes = alloc::vec![alloc::vec![0.0f64; rows * cols]; bank.n_bands()];
    let mut col = Vec::with_capacity(rows);
    for c in 0..cols {
        col.clear();
        col.extend((0..rows).map(|r| image.get(r, c)));
        let spec = dft1(&Signal1D::new(col.clone())?);
        for (m, plane) in planes.iter_mut().enumerate() {
            let masked: Vec<Complex64> = spec
                .iter()
                .zip(bank.mask(m))
                .map(|(s, &mv)| s * mv)
                .collect();
            let (band, _) = idft1_real(&masked);
            for r in 0..rows {
                plane[r * cols + c] = band[r];
            }
        }
    }
    planes
        .into_iter()
        .map(|p| Image::new(rows, cols, p))
        .collect()
}

/// Synthesize rows: sum of per-band row spectra re-weighted by the masks.
fn synth_rows(planes: &[Image], bank: &FilterBank1D) -> Result<Image> {
    let (rows, cols) = (planes[0].rows(), planes[0].cols());
    let mut out = alloc::vec![0.0f64; rows * cols];
    for r in 0..rows {
        let mut acc = alloc::vec![Complex64::new(0.0, 0.0); cols];
        for (n, plane) in planes.iter().enumerate() {
            let spec = dft1(&Signal1D::new(plane.row(r).to_vec())?);
            for ((a, s), &m) in acc.iter_mut().zip(spec.iter()).zip(bank.mask(n)) {
                *a += s * m;
            }
        }
        let (row, _) = idft1_real(&acc);
        out[r * cols..(r + 1) * cols].copy_from_slice(&row);
    }
    Image::new(rows, cols, out)
}

/// Synthesize columns, dual of [`synth_rows`].
fn synth_cols(planes: &[Image], bank: &FilterBank1D) -> Result<Image> {
    let (rows, cols) = (planes[0].rows(), planes[0].cols());
    let mut out = alloc::vec![0.0f64; rows * cols];
    let mut col = Vec::with_capacity(rows);
    for c in 0..cols {
        let mut acc = alloc::vec![Complex64::new(0.0, 0.0); rows];
        for (m, plane) in planes.iter().enumerate() {
            col.clear();
            col.extend((0..rows).map(|r| plane.get(r, c)));
            let spec = dft1(&Signal1D::new(col.clone())?);
            for ((a, s), &mv) in acc.iter_mut().zip(spec.iter()).zip(bank.mask(m)) {
                *a += s * mv;
            }
        }
        let (column, _) = idft1_real(&acc);
        for r in 0..rows {
            out[r * cols + c] = column[r];
        }
    }
    Image::new(rows, cols, out)
}

/// Apply prebuilt banks: rows with the row bank, then columns of every row
/// output with the column bank.
pub fn tensor_apply(image: &Image, banks: &TensorBanks) -> Result<TensorCoeffs> {
    check_2d(image)?;
    if banks.bank_row.len() != image.cols() || banks.bank_col.len() != image.rows() {
        return Err(EwtError::InvalidArgument(format!(
            "banks sized {}x{} do not match image {}x{}",
            banks.bank_col.len(),
            banks.bank_row.len(),
            image.rows(),
            image.cols()
        )));
    }
    let row_planes = filter_rows(image, &banks.bank_row)?;
    let mut planes = Vec::with_capacity(banks.n_row_bands() * banks.n_col_bands());
    for plane in &row_planes {
        planes.extend(filter_cols(plane, &banks.bank_col)?);
    }
    TensorCoeffs::from_planes(planes, banks.n_row_bands(), banks.n_col_bands())
}

/// Detect both partitions on the averaged spectra, build the banks and
/// decompose.
pub fn tensor_forward(
    image: &Image,
    n_row_bands: usize,
    n_col_bands: usize,
    cfg: &DetectConfig,
) -> Result<TensorDecomposition> {
    if n_row_bands < 2 || n_col_bands < 2 {
        return Err(EwtError::InvalidArgument(format!(
            "band counts must be >= 2, got {n_row_bands} and {n_col_bands}"
        )));
    }
    let row_cfg = DetectConfig {
        n_bands: n_row_bands,
        ..*cfg
    };
    let col_cfg = DetectConfig {
        n_bands: n_col_bands,
        ..*cfg
    };
    let row_detection = boundaries::detect(&row_mean_spectrum(image)?, &row_cfg)
        .map_err(|e| tag_axis(e, "row"))?;
    let col_detection = boundaries::detect(&col_mean_spectrum(image)?, &col_cfg)
        .map_err(|e| tag_axis(e, "column"))?;

    let bank_row = FilterBank1D::new(
        &row_detection.boundaries,
        choose_gamma(&row_detection.boundaries),
        image.cols(),
    )?;
    let bank_col = FilterBank1D::new(
        &col_detection.boundaries,
        choose_gamma(&col_detection.boundaries),
        image.rows(),
    )?;
    let banks = TensorBanks { bank_row, bank_col };
    let coeffs = tensor_apply(image, &banks)?;
    Ok(TensorDecomposition {
        banks,
        coeffs,
        row_detection,
        col_detection,
    })
}

fn tag_axis(err: EwtError, axis: &str) -> EwtError {
    match err {
        EwtError::Detection(msg) => EwtError::Detection(format!("{axis} spectrum: {msg}")),
        other => other,
    }
}

/// Invert in the adjoint order: columns first, then rows.
pub fn tensor_inverse(coeffs: &TensorCoeffs, banks: &TensorBanks) -> Result<Image> {
    if coeffs.n_row_bands() != banks.n_row_bands() || coeffs.n_col_bands() != banks.n_col_bands() {
        return Err(EwtError::InvalidArgument(format!(
            "coefficient layout {}x{} does not match banks {}x{}",
            coeffs.n_row_bands(),
            coeffs.n_col_bands(),
            banks.n_row_bands(),
            banks.n_col_bands()
        )));
    }
    let plane0 = &coeffs.planes()[0];
    if plane0.rows() != banks.bank_col.len() || plane0.cols() != banks.bank_row.len() {
        return Err(EwtError::InvalidArgument(format!(
            "subband planes {}x{} do not match banks sized {}x{}",
            plane0.rows(),
            plane0.cols(),
            banks.bank_col.len(),
            banks.bank_row.len()
        )));
    }
    let mut row_planes = Vec::with_capacity(banks.n_row_bands());
    for n in 0..banks.n_row_bands() {
        let group: Vec<Image> = (0..banks.n_col_bands())
            .map(|m| coeffs.plane(n, m).clone())
            .collect();
        row_planes.push(synth_cols(&group, &banks.bank_col)?);
    }
    synth_rows(&row_planes, &banks.bank_row)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundaries::BoundarySet;
    use alloc::vec;
    use core::f64::consts::PI;

    fn lcg_image(rows: usize, cols: usize, seed: u64) -> Image {
        let mut state = seed;
        Image::from_fn(rows, cols, |_, _| {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        })
        .unwrap()
    }

    fn synthetic_banks(rows: usize, cols: usize) -> TensorBanks {
        let omega = BoundarySet::new(vec![0.0, PI / 2.0, PI]).unwrap();
        let gamma = choose_gamma(&omega);
        TensorBanks {
            bank_row: FilterBank1D::new(&omega, gamma, cols).unwrap(),
            bank_col: FilterBank1D::new(&omega, gamma, rows).unwrap(),
        }
    }

    #[test]
    fn constant_image_spectrum_is_a_dc_spike() {
        let img = Image::from_fn(8, 8, |_, _| 5.0).unwrap();
        let spec = row_mean_spectrum(&img).unwrap();
        assert!((spec.values()[0] - 40.0).abs() < 1e-10);
        for v in &spec.values()[1..] {
            assert!(*v < 1e-10);
        }
    }

    #[test]
    fn cosine_rows_peak_at_their_bin() {
        let cols = 32;
        let k = 5;
        let img = Image::from_fn(8, cols, |_, c| {
            libm::cos(2.0 * PI * k as f64 * c as f64 / cols as f64)
        })
        .unwrap();
        let spec = row_mean_spectrum(&img).unwrap();
        let argmax = (0..spec.len())
            .max_by(|&a, &b| spec.values()[a].total_cmp(&spec.values()[b]))
            .unwrap();
        assert_eq!(argmax, k);
    }

    #[test]
    fn constant_image_concentrates_in_plane_zero_zero() {
        let img = Image::from_fn(16, 16, |_, _| 2.0).unwrap();
        let banks = synthetic_banks(16, 16);
        let coeffs = tensor_apply(&img, &banks).unwrap();
        let e00 = coeffs.plane(0, 0).energy();
        assert!((e00 - img.energy()).abs() < 1e-9 * img.energy());
        for n in 0..2 {
            for m in 0..2 {
                if n != 0 || m != 0 {
                    assert!(coeffs.plane(n, m).energy() < 1e-18 * e00);
                }
            }
        }
    }

    #[test]
    fn separable_cosine_lands_in_one_plane() {
        let (rows, cols) = (32, 32);
        // Row frequency 12 -> 0.75*pi (detail flat), col frequency 2 ->
        // pi/8 (inside the lowpass flat for gamma = 0.33).
        let img = Image::from_fn(rows, cols, |r, c| {
            libm::cos(2.0 * PI * 12.0 * c as f64 / cols as f64)
                * libm::cos(2.0 * PI * 2.0 * r as f64 / rows as f64)
        })
        .unwrap();
        let banks = synthetic_banks(rows, cols);
        let coeffs = tensor_apply(&img, &banks).unwrap();
        let total: f64 = coeffs.total_energy();
        assert!(coeffs.plane(1, 0).energy() >= 0.99 * total);
    }

    #[test]
    fn energy_is_conserved_and_round_trip_holds() {
        let img = lcg_image(24, 32, 9);
        let banks = synthetic_banks(24, 32);
        let coeffs = tensor_apply(&img, &banks).unwrap();
        let e = coeffs.total_energy();
        assert!((e - img.energy()).abs() <= 1e-8 * img.energy());
        let back = tensor_inverse(&coeffs, &banks).unwrap();
        let sup = img
            .pixels()
            .iter()
            .zip(back.pixels())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        assert!(sup < 1e-9);
    }

    #[test]
    fn detected_pipeline_round_trips_rectangular_images() {
        let (rows, cols) = (24, 32);
        let img = Image::from_fn(rows, cols, |r, c| {
            libm::cos(2.0 * PI * 10.0 * c as f64 / cols as f64)
                + 0.5 * libm::cos(2.0 * PI * 8.0 * r as f64 / rows as f64)
                + 0.1 * ((r * 31 + c * 17) % 7) as f64
        })
        .unwrap();
        let cfg = DetectConfig::scales(3);
        let dec = tensor_forward(&img, 3, 2, &cfg).unwrap();
        assert_eq!(dec.banks.bank_row.len(), cols);
        assert_eq!(dec.banks.bank_col.len(), rows);
        let back = tensor_inverse(&dec.coeffs, &dec.banks).unwrap();
        let sup = img
            .pixels()
            .iter()
            .zip(back.pixels())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        assert!(sup < 1e-9, "sup error {sup}");
    }

    #[test]
    fn zero_coefficients_invert_to_zero_and_inverse_is_linear() {
        let banks = synthetic_banks(8, 8);
        let zero_planes: Vec<Image> = (0..4).map(|_| Image::zeros(8, 8).unwrap()).collect();
        let zeros = TensorCoeffs::from_planes(zero_planes, 2, 2).unwrap();
        let out = tensor_inverse(&zeros, &banks).unwrap();
        assert!(out.pixels().iter().all(|v| v.abs() == 0.0));

        let c1 = tensor_apply(&lcg_image(8, 8, 1), &banks).unwrap();
        let c2 = tensor_apply(&lcg_image(8, 8, 2), &banks).unwrap();
        let combined = TensorCoeffs::from_planes(
            c1.planes()
                .iter()
                .zip(c2.planes())
                .map(|(a, b)| {
                    Image::new(
                        8,
                        8,
                        a.pixels()
                            .iter()
                            .zip(b.pixels())
                            .map(|(x, y)| 2.0 * x - 0.5 * y)
                            .collect(),
                    )
                    .unwrap()
                })
                .collect(),
            2,
            2,
        )
        .unwrap();
        let lhs = tensor_inverse(&combined, &banks).unwrap();
        let r1 = tensor_inverse(&c1, &banks).unwrap();
        let r2 = tensor_inverse(&c2, &banks).unwrap();
        for ((l, a), b) in lhs.pixels().iter().zip(r1.pixels()).zip(r2.pixels()) {
            assert!((l - (2.0 * a - 0.5 * b)).abs() < 1e-12);
        }
    }

    #[test]
    fn shape_mismatches_are_rejected() {
        let banks = synthetic_banks(8, 8);
        let img = lcg_image(8, 16, 3);
        assert!(tensor_apply(&img, &banks).is_err());
        let coeffs = tensor_apply(&lcg_image(8, 8, 4), &banks).unwrap();
        let other = synthetic_banks(16, 16);
        assert!(tensor_inverse(&coeffs, &other).is_err());
    }
}
