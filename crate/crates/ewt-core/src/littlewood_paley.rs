//! Isotropic annular 2D transform and the shared 2D Fourier-mask machinery.
//!
//! [`FilterBank2D`] stores any set of nonnegative Fourier-domain masks whose
//! squares sum to one (annuli, curvelet wedges, or the outer-product view of
//! a tensor bank) together with `apply`/`synthesize`, which implement every
//! 2D transform of the crate as multiplication in the Fourier domain.
//!
//! Annulus masks are radial: the value at a bin depends only on
//! `|w| = sqrt(w1^2 + w2^2)` of the folded bin frequencies. The outermost
//! ring stays at one for every radius beyond its rising transition, so the
//! corners of the Fourier plane (`|w| > pi`) are kept and the partition of
//! unity holds on the whole discrete grid.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use num_complex::Complex64;

use crate::array::{bin_omega, dft2, idft2, Image};
use crate::boundaries::{self, BoundarySet, DetectConfig, Detection};
use crate::error::EwtError;
use crate::ewt1d::{bandpass_value, lowpass_value};
use crate::pseudopolar::{ppfft, radial_mean_spectrum, PPGrid};
use crate::tensor::TensorBanks;
use crate::Result;

/// Which construction produced a [`FilterBank2D`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BankKind {
    LittlewoodPaley,
    CurveletI,
    CurveletII,
    TensorView,
}

/// Index label of one mask within a bank.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BandLabel {
    /// Radial band `n` (0 is the lowpass).
    Radial(usize),
    /// Curvelet wedge `(scale, angle)`.
    Wedge(usize, usize),
    /// Tensor plane `(row band, column band)`.
    Plane(usize, usize),
}

/// A set of real Fourier-domain masks on a `rows x cols` grid
/// (DC-at-index-0 layout), squares summing to one at every bin.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterBank2D {
    kind: BankKind,
    rows: usize,
    cols: usize,
    masks: Vec<Vec<f64>>,
    labels: Vec<BandLabel>,
    gamma: f64,
    delta_theta: Option<f64>,
}

impl FilterBank2D {
    pub fn from_masks(
        kind: BankKind,
        rows: usize,
        cols: usize,
        masks: Vec<Vec<f64>>,
        labels: Vec<BandLabel>,
        gamma: f64,
        delta_theta: Option<f64>,
    ) -> Result<Self> {
        if masks.is_empty() || masks.len() != labels.len() {
            return Err(EwtError::InvalidArgument(String::from(
                "bank needs matching non-empty mask and label lists",
            )));
        }
        for (i, m) in masks.iter().enumerate() {
            if m.len() != rows * cols {
                return Err(EwtError::InvalidArgument(format!(
                    "mask {i} has {} values, expected {rows}x{cols}",
                    m.len()
                )));
            }
            if m.iter().any(|v| !(*v >= 0.0 && *v <= 1.0)) {
                return Err(EwtError::InvalidArgument(format!(
                    "mask {i} leaves the range [0, 1]"
                )));
            }
        }
        Ok(Self {
            kind,
            rows,
            cols,
            masks,
            labels,
            gamma,
            delta_theta,
        })
    }

    pub fn kind(&self) -> BankKind {
        self.kind
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn n_bands(&self) -> usize {
        self.masks.len()
    }

    pub fn mask(&self, band: usize) -> &[f64] {
        &self.masks[band]
    }

    pub fn label(&self, band: usize) -> BandLabel {
        self.labels[band]
    }

    pub fn labels(&self) -> &[BandLabel] {
        &self.labels
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn delta_theta(&self) -> Option<f64> {
        self.delta_theta
    }

    /// Outer-product view of a tensor bank pair, for frame checking and the
    /// separability property.
    pub fn tensor_view(banks: &TensorBanks) -> Result<Self> {
        let rows = banks.bank_col.len();
        let cols = banks.bank_row.len();
        let mut masks = Vec::new();
        let mut labels = Vec::new();
        for n in 0..banks.n_row_bands() {
            for m in 0..banks.n_col_bands() {
                let row_mask = banks.bank_row.mask(n);
                let col_mask = banks.bank_col.mask(m);
                let mut plane = Vec::with_capacity(rows * cols);
                for r in 0..rows {
                    for c in 0..cols {
                        plane.push(row_mask[c] * col_mask[r]);
                    }
                }
                masks.push(plane);
                labels.push(BandLabel::Plane(n, m));
            }
        }
        Self::from_masks(
            BankKind::TensorView,
            rows,
            cols,
            masks,
            labels,
            banks.bank_row.gamma(),
            None,
        )
    }
}

/// Labeled real subband planes produced by a 2D bank.
#[derive(Debug, Clone, PartialEq)]
pub struct SubbandSet {
    planes: Vec<Image>,
    labels: Vec<BandLabel>,
}

impl SubbandSet {
    pub fn from_parts(planes: Vec<Image>, labels: Vec<BandLabel>) -> Result<Self> {
        if planes.is_empty() || planes.len() != labels.len() {
            return Err(EwtError::InvalidArgument(String::from(
                "subband set needs matching non-empty plane and label lists",
            )));
        }
        Ok(Self { planes, labels })
    }

    pub fn n_bands(&self) -> usize {
        self.planes.len()
    }

    pub fn plane(&self, band: usize) -> &Image {
        &self.planes[band]
    }

    pub fn planes(&self) -> &[Image] {
        &self.planes
    }

    pub fn planes_mut(&mut self) -> &mut [Image] {
        &mut self.planes
    }

    pub fn label(&self, band: usize) -> BandLabel {
        self.labels[band]
    }

    pub fn labels(&self) -> &[BandLabel] {
        &self.labels
    }

    pub fn total_energy(&self) -> f64 {
        self.planes.iter().map(Image::energy).sum()
    }
}

/// Folded frequency radius of bin `(r, c)` on a `rows x cols` grid.
#[inline]
pub(crate) fn bin_radius(r: usize, c: usize, rows: usize, cols: usize) -> f64 {
    let w1 = bin_omega(r, rows);
    let w2 = bin_omega(c, cols);
    libm::sqrt(w1 * w1 + w2 * w2)
}

/// Annular (Littlewood-Paley) bank on the detected radii. A one-band
/// partition yields a single allpass mask.
pub fn lp_bank(omega: &BoundarySet, gamma: f64, rows: usize, cols: usize) -> Result<FilterBank2D> {
    if rows < 4 || cols < 4 {
        return Err(EwtError::InvalidArgument(format!(
            "grid {rows}x{cols} too small for an annular bank"
        )));
    }
    let bounds = omega.as_slice();
    let n_bands = omega.n_bands();
    let mut masks = Vec::with_capacity(n_bands);
    let mut labels = Vec::with_capacity(n_bands);
    if n_bands == 1 {
        masks.push(alloc::vec![1.0; rows * cols]);
        labels.push(BandLabel::Radial(0));
        return FilterBank2D::from_masks(
            BankKind::LittlewoodPaley,
            rows,
            cols,
            masks,
            labels,
            gamma,
            None,
        );
    }
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(EwtError::InvalidArgument(format!(
            "gamma must lie in (0, 1), got {gamma}"
        )));
    }
    for (n, w) in bounds[1..].windows(2).enumerate() {
        if (1.0 + gamma) * w[0] >= (1.0 - gamma) * w[1] {
            return Err(EwtError::InvalidArgument(format!(
                "transition areas around radii {} and {} overlap for gamma {gamma}",
                n + 1,
                n + 2
            )));
        }
    }

    let mut radii = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        for c in 0..cols {
            radii.push(bin_radius(r, c, rows, cols));
        }
    }

    let w1 = bounds[1];
    masks.push(radii.iter().map(|&r| lowpass_value(r, w1, gamma)).collect());
    labels.push(BandLabel::Radial(0));
    for n in 1..n_bands {
        let lo = bounds[n];
        let hi = if n + 1 < n_bands {
            Some(bounds[n + 1])
        } else {
            None // last ring keeps the Fourier-plane corners
        };
        masks.push(
            radii
                .iter()
                .map(|&r| bandpass_value(r, lo, hi, gamma))
                .collect(),
        );
        labels.push(BandLabel::Radial(n));
    }
    FilterBank2D::from_masks(
        BankKind::LittlewoodPaley,
        rows,
        cols,
        masks,
        labels,
        gamma,
        None,
    )
}

/// Forward transform: one plane per mask, `idft2(dft2(f) * mask)`.
pub fn lp_forward(image: &Image, bank: &FilterBank2D) -> Result<SubbandSet> {
    if image.rows() != bank.rows() || image.cols() != bank.cols() {
        return Err(EwtError::InvalidArgument(format!(
            "image {}x{} does not match bank grid {}x{}",
            image.rows(),
            image.cols(),
            bank.rows(),
            bank.cols()
        )));
    }
    let spectrum = dft2(image);
    let scale = image.pixels().iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let mut planes = Vec::with_capacity(bank.n_bands());
    for band in 0..bank.n_bands() {
        let mut masked = spectrum.clone();
        for (v, &m) in masked.values_mut().iter_mut().zip(bank.mask(band)) {
            *v *= m;
        }
        let (plane, residue) = idft2(&masked);
        debug_assert!(
            residue <= 1e-10 * scale,
            "imaginary residue {residue} above tolerance"
        );
        planes.push(plane);
    }
    SubbandSet::from_parts(planes, bank.labels().to_vec())
}

/// Inverse transform: sum of subband spectra re-weighted by the masks.
pub fn lp_inverse(subbands: &SubbandSet, bank: &FilterBank2D) -> Result<Image> {
    if subbands.n_bands() != bank.n_bands() {
        return Err(EwtError::InvalidArgument(format!(
            "subband count {} does not match bank band count {}",
            subbands.n_bands(),
            bank.n_bands()
        )));
    }
    let (rows, cols) = (bank.rows(), bank.cols());
    let mut acc = alloc::vec![Complex64::new(0.0, 0.0); rows * cols];
    let mut scale = 1.0f64;
    for band in 0..bank.n_bands() {
        let plane = subbands.plane(band);
        if plane.rows() != rows || plane.cols() != cols {
            return Err(EwtError::InvalidArgument(format!(
                "subband {band} is {}x{}, expected {rows}x{cols}",
                plane.rows(),
                plane.cols()
            )));
        }
        scale = plane.pixels().iter().fold(scale, |m, v| m.max(v.abs()));
        let spec = dft2(plane);
        for ((a, s), &m) in acc.iter_mut().zip(spec.values()).zip(bank.mask(band)) {
            *a += s * m;
        }
    }
    let plane = crate::array::ComplexPlane::new(rows, cols, acc, crate::array::FreqLayout::DcFirst)?;
    let (image, residue) = idft2(&plane);
    debug_assert!(
        residue <= 1e-10 * scale,
        "imaginary residue {residue} above tolerance"
    );
    Ok(image)
}

/// Detect annulus radii on the angle-averaged pseudo-polar spectrum of the
/// centered even square crop.
pub fn lp_detect(image: &Image, n_bands: usize, cfg: &DetectConfig) -> Result<Detection> {
    let crop = image.center_even_square()?;
    let grid = PPGrid::new(crop.rows())?;
    let spectrum = radial_mean_spectrum(&ppfft(&crop, &grid)?);
    let cfg = DetectConfig { n_bands, ..*cfg };
    boundaries::detect(&spectrum, &cfg).map_err(|e| match e {
        EwtError::Detection(msg) => EwtError::Detection(format!("radial spectrum: {msg}")),
        other => other,
    })
}

/// Full pipeline: detect radii, build the bank, decompose.
pub fn lp_forward_detected(
    image: &Image,
    n_bands: usize,
    cfg: &DetectConfig,
) -> Result<(FilterBank2D, SubbandSet, Detection)> {
    let detection = lp_detect(image, n_bands, cfg)?;
    let gamma = crate::ewt1d::choose_gamma(&detection.boundaries);
    let bank = lp_bank(&detection.boundaries, gamma, image.rows(), image.cols())?;
    let subbands = lp_forward(image, &bank)?;
    Ok((bank, subbands, detection))
}

/// Pointwise sum of squared masks.
pub fn frame_sum(bank: &FilterBank2D) -> Vec<f64> {
    let mut sum = alloc::vec![0.0f64; bank.rows() * bank.cols()];
    for band in 0..bank.n_bands() {
        for (s, &m) in sum.iter_mut().zip(bank.mask(band)) {
            *s += m * m;
        }
    }
    sum
}

/// Largest deviation of the squared-mask sum from one.
pub fn frame_deviation(bank: &FilterBank2D) -> f64 {
    frame_sum(bank)
        .iter()
        .map(|s| (s - 1.0).abs())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ewt1d::choose_gamma;
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

    fn omega3() -> BoundarySet {
        BoundarySet::new(vec![0.0, 1.0, 2.0, PI]).unwrap()
    }

    #[test]
    fn corner_bins_belong_to_the_last_ring_alone() {
        let omega = omega3();
        let gamma = choose_gamma(&omega);
        let bank = lp_bank(&omega, gamma, 8, 8).unwrap();
        // Bin (4, 4) sits at (pi, pi), radius pi*sqrt(2) > (1+gamma)*2.
        let idx = 4 * 8 + 4;
        assert_eq!(bank.mask(2)[idx], 1.0);
        assert_eq!(bank.mask(0)[idx], 0.0);
        assert_eq!(bank.mask(1)[idx], 0.0);
    }

    #[test]
    fn boundary_radius_splits_power_between_adjacent_masks() {
        // Put an exact grid radius on the first boundary: bins (0, c) have
        // radius bin_omega(c, cols); choose omega_1 = pi/2 on a 64 grid.
        let omega = BoundarySet::new(vec![0.0, PI / 2.0, PI]).unwrap();
        let gamma = 0.2;
        let bank = lp_bank(&omega, gamma, 64, 64).unwrap();
        let idx = 16; // row 0, col 16: |w| = pi/2
        let s = core::f64::consts::FRAC_1_SQRT_2;
        assert!((bank.mask(0)[idx] - s).abs() < 1e-15);
        assert!((bank.mask(1)[idx] - s).abs() < 1e-15);
    }

    #[test]
    fn frame_sum_deviation_is_tiny_even_on_rectangular_grids() {
        let omega = omega3();
        let gamma = choose_gamma(&omega);
        for &(rows, cols) in &[(64usize, 64usize), (48, 64)] {
            let bank = lp_bank(&omega, gamma, rows, cols).unwrap();
            assert!(frame_deviation(&bank) < 1e-10, "{rows}x{cols}");
        }
    }

    #[test]
    fn deleting_a_mask_shows_in_the_frame_sum() {
        let omega = omega3();
        let gamma = choose_gamma(&omega);
        let bank = lp_bank(&omega, gamma, 16, 16).unwrap();
        let masks: Vec<Vec<f64>> = (0..bank.n_bands() - 1)
            .map(|b| bank.mask(b).to_vec())
            .collect();
        let labels: Vec<BandLabel> = (0..bank.n_bands() - 1).map(|b| bank.label(b)).collect();
        let dropped_max = bank
            .mask(bank.n_bands() - 1)
            .iter()
            .map(|m| m * m)
            .fold(0.0f64, f64::max);
        let crippled =
            FilterBank2D::from_masks(BankKind::LittlewoodPaley, 16, 16, masks, labels, gamma, None)
                .unwrap();
        assert!((frame_deviation(&crippled) - dropped_max).abs() < 1e-12);
    }

    #[test]
    fn radial_masks_depend_only_on_radius() {
        let omega = omega3();
        let gamma = choose_gamma(&omega);
        let (rows, cols) = (32, 32);
        let bank = lp_bank(&omega, gamma, rows, cols).unwrap();
        // Bins (r, c) and (c, r) share the radius on a square grid.
        for band in 0..bank.n_bands() {
            for r in 0..rows {
                for c in 0..cols {
                    let a = bank.mask(band)[r * cols + c];
                    let b = bank.mask(band)[c * cols + r];
                    assert!((a - b).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn masks_are_symmetric_under_point_reflection() {
        let omega = omega3();
        let gamma = choose_gamma(&omega);
        let (rows, cols) = (12, 20);
        let bank = lp_bank(&omega, gamma, rows, cols).unwrap();
        for band in 0..bank.n_bands() {
            for r in 0..rows {
                for c in 0..cols {
                    let nr = (rows - r) % rows;
                    let nc = (cols - c) % cols;
                    assert_eq!(
                        bank.mask(band)[r * cols + c],
                        bank.mask(band)[nr * cols + nc]
                    );
                }
            }
        }
    }

    #[test]
    fn constant_image_stays_in_the_approximation() {
        let omega = omega3();
        let bank = lp_bank(&omega, choose_gamma(&omega), 16, 16).unwrap();
        let img = Image::from_fn(16, 16, |_, _| 3.0).unwrap();
        let sub = lp_forward(&img, &bank).unwrap();
        assert!((sub.plane(0).energy() - img.energy()).abs() < 1e-9 * img.energy());
        for band in 1..sub.n_bands() {
            assert!(sub.plane(band).energy() < 1e-18 * img.energy());
        }
    }

    #[test]
    fn ring_tone_concentrates_in_its_annulus() {
        let (rows, cols) = (64, 64);
        let omega = BoundarySet::new(vec![0.0, 1.0, 2.2, PI]).unwrap();
        let gamma = choose_gamma(&omega);
        let bank = lp_bank(&omega, gamma, rows, cols).unwrap();
        // |k| = 2*pi*16/64 = pi/2 = 1.57, inside the flat of annulus 1.
        let img = Image::from_fn(rows, cols, |r, c| {
            libm::cos(2.0 * PI * 16.0 * c as f64 / cols as f64 + 0.3 * r as f64 * 0.0)
        })
        .unwrap();
        let sub = lp_forward(&img, &bank).unwrap();
        let detail: f64 = (1..sub.n_bands()).map(|b| sub.plane(b).energy()).sum();
        assert!(sub.plane(1).energy() >= 0.99 * (detail + sub.plane(0).energy()));
    }

    #[test]
    fn parseval_and_round_trip_hold() {
        let omega = omega3();
        let gamma = choose_gamma(&omega);
        let bank = lp_bank(&omega, gamma, 48, 64).unwrap();
        let img = lcg_image(48, 64, 21);
        let sub = lp_forward(&img, &bank).unwrap();
        assert!((sub.total_energy() - img.energy()).abs() <= 1e-8 * img.energy());
        let back = lp_inverse(&sub, &bank).unwrap();
        let sup = img
            .pixels()
            .iter()
            .zip(back.pixels())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        assert!(sup < 1e-9);
    }

    #[test]
    fn tensor_view_matches_tensor_filtering_and_partitions_unity() {
        use crate::tensor::{tensor_apply, TensorBanks};
        let (rows, cols) = (16, 24);
        let omega = BoundarySet::new(vec![0.0, PI / 2.0, PI]).unwrap();
        let gamma = choose_gamma(&omega);
        let banks = TensorBanks {
            bank_row: crate::ewt1d::FilterBank1D::new(&omega, gamma, cols).unwrap(),
            bank_col: crate::ewt1d::FilterBank1D::new(&omega, gamma, rows).unwrap(),
        };
        let view = FilterBank2D::tensor_view(&banks).unwrap();
        assert!(frame_deviation(&view) < 1e-10);

        let img = lcg_image(rows, cols, 77);
        let planes_2d = lp_forward(&img, &view).unwrap();
        let planes_sep = tensor_apply(&img, &banks).unwrap();
        for n in 0..2 {
            for m in 0..2 {
                let a = planes_sep.plane(n, m);
                let b = planes_2d.plane(n * 2 + m);
                let sup = a
                    .pixels()
                    .iter()
                    .zip(b.pixels())
                    .map(|(x, y)| (x - y).abs())
                    .fold(0.0f64, f64::max);
                assert!(sup < 1e-12, "plane ({n},{m}) differs by {sup}");
            }
        }
    }

    #[test]
    fn single_band_partition_gives_an_allpass_bank() {
        let omega = BoundarySet::new(vec![0.0, PI]).unwrap();
        let bank = lp_bank(&omega, 0.5, 8, 8).unwrap();
        assert_eq!(bank.n_bands(), 1);
        assert_eq!(frame_deviation(&bank), 0.0);
    }

    #[test]
    fn overlapping_gamma_is_rejected() {
        let omega = BoundarySet::new(vec![0.0, 1.0, 1.1, PI]).unwrap();
        assert!(lp_bank(&omega, 0.4, 16, 16).is_err());
    }
}
