//! Directional empirical transforms: ridgelet (1D wavelet analysis along
//! pseudo-polar rays) and curvelet (scale x angle polar wedges, with shared
//! or per-scale angle sets).
//!
//! Filters are real, so a frequency bin and its point reflection must carry
//! identical mask values. Angles are therefore computed on a canonical
//! representative of each `{w, -w}` pair (Nyquist rows/columns alias their
//! own reflection on even grids, so plain `atan2` of the folded bin
//! frequencies would disagree between the two bins of a pair); the
//! canonical angle lives in the grid half-turn `[-pi/4, 3pi/4)`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use num_complex::Complex64;

use crate::array::{bin_omega, dft1, idft1_real, Image, Signal1D};
use crate::boundaries::{self, BoundarySet, DetectConfig, DetectWarning, Detection};
use crate::error::EwtError;
use crate::ewt1d::{bandpass_value, beta, choose_gamma, lowpass_value, FilterBank1D, GAMMA_SAFETY};
use crate::littlewood_paley::{
    lp_forward, lp_inverse, BandLabel, BankKind, FilterBank2D, SubbandSet,
};
use crate::pseudopolar::{
    angular_mean_spectrum, ppfft, ppfft_inverse, radial_mean_spectrum, PPArray, PPGrid, PpInverse,
};
use crate::Result;

/// Sorted angular boundaries within a half-turn; the wraparound partner of
/// the last angle is `theta^1 + pi`.
#[derive(Debug, Clone, PartialEq)]
pub struct AngularBoundarySet {
    angles: Vec<f64>,
}

impl AngularBoundarySet {
    pub fn new(angles: Vec<f64>) -> Result<Self> {
        if angles.len() < 2 {
            return Err(EwtError::InvalidArgument(String::from(
                "angular set needs at least 2 boundaries",
            )));
        }
        if angles.windows(2).any(|w| w[0] >= w[1]) {
            return Err(EwtError::InvalidArgument(String::from(
                "angular boundaries must be strictly increasing",
            )));
        }
        let span = angles[angles.len() - 1] - angles[0];
        if span >= PI {
            return Err(EwtError::InvalidArgument(format!(
                "angular boundaries span {span:.4} but must stay below pi"
            )));
        }
        Ok(Self { angles })
    }

    /// Uniform split of the grid half-turn into `n_sectors` wedges.
    pub fn uniform(n_sectors: usize) -> Result<Self> {
        if n_sectors < 2 {
            return Err(EwtError::InvalidArgument(String::from(
                "uniform angular split needs at least 2 sectors",
            )));
        }
        Self::new(
            (0..n_sectors)
                .map(|m| -FRAC_PI_4 + m as f64 * PI / n_sectors as f64)
                .collect(),
        )
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn n_sectors(&self) -> usize {
        self.angles.len()
    }

    /// Sector gaps, including the wraparound gap back to `theta^1 + pi`.
    pub fn gaps(&self) -> Vec<f64> {
        let mut gaps: Vec<f64> = self.angles.windows(2).map(|w| w[1] - w[0]).collect();
        gaps.push(self.angles[0] + PI - self.angles[self.angles.len() - 1]);
        gaps
    }
}

/// Half the smallest sector gap, scaled by the same safety factor as the
/// radial `gamma`, so angular transitions never overlap.
pub fn choose_delta_theta(angles: &AngularBoundarySet) -> f64 {
    let min_gap = angles.gaps().into_iter().fold(f64::INFINITY, f64::min);
    0.5 * GAMMA_SAFETY * min_gap
}

/// Angular window on the unwrapped axis: sin ramp into `lo`, flat, cos ramp
/// out of `hi`.
fn angular_value(theta: f64, lo: f64, hi: f64, dt: f64) -> f64 {
    if theta < lo - dt || theta > hi + dt {
        0.0
    } else if theta <= lo + dt {
        libm::sin(FRAC_PI_2 * beta((theta - lo + dt) / (2.0 * dt)))
    } else if theta < hi - dt {
        1.0
    } else {
        libm::cos(FRAC_PI_2 * beta((theta - hi + dt) / (2.0 * dt)))
    }
}

/// Evaluate wedge `m` of `angles` at bin angle `theta` (canonical
/// half-turn), trying the three unwrapped candidates.
fn wedge_value(theta: f64, angles: &AngularBoundarySet, m: usize, dt: f64) -> f64 {
    let lo = angles.angles()[m];
    let hi = if m + 1 < angles.n_sectors() {
        angles.angles()[m + 1]
    } else {
        angles.angles()[0] + PI
    };
    let mut acc = 0.0;
    for k in [-1.0f64, 0.0, 1.0] {
        acc += angular_value(theta + k * PI, lo, hi, dt);
    }
    acc
}

/// Canonical angle of the `{w, -w}` bin pair in `[-pi/4, 3pi/4)`. The two
/// bins of a pair produce bit-identical results, Nyquist aliases included.
fn canonical_angle(r: usize, c: usize, rows: usize, cols: usize) -> f64 {
    let mut w1 = bin_omega(r, rows);
    let mut w2 = bin_omega(c, cols);
    if w1 == PI {
        w2 = w2.abs();
    }
    if w2 == PI {
        w1 = w1.abs();
    }
    if w1 < 0.0 || (w1 == 0.0 && w2 < 0.0) {
        w1 = -w1;
        w2 = -w2;
    }
    let theta = libm::atan2(w2, w1); // in (-pi/2, pi/2], w1 >= 0
    if theta < -FRAC_PI_4 {
        theta + PI
    } else {
        theta
    }
}

/// Warnings plus the angular set produced by [`detect_angles`].
#[derive(Debug, Clone, PartialEq)]
pub struct AngleDetection {
    pub angles: AngularBoundarySet,
    pub warnings: Vec<DetectWarning>,
}

/// Detect angular boundaries on the band-restricted angular mean spectrum.
/// A profile without modes falls back to the uniform split (flagged). The
/// detected positions on the uniform profile axis are mapped back to polar
/// angles by interpolating the grid's angle sequence.
pub fn detect_angles(
    array: &PPArray,
    n_theta: usize,
    cfg: &DetectConfig,
    radial_band: Option<(f64, f64)>,
) -> Result<AngleDetection> {
    if n_theta < 2 {
        return Err(EwtError::InvalidArgument(String::from(
            "angular detection needs at least 2 sectors",
        )));
    }
    let grid = PPGrid::new(array.grid_n())?;
    let profile = angular_mean_spectrum(array, radial_band)?;
    let cfg = DetectConfig {
        n_bands: n_theta,
        ..*cfg
    };
    let detection = match boundaries::detect(&profile, &cfg) {
        Ok(d) => d,
        Err(EwtError::Detection(_)) => {
            return Ok(AngleDetection {
                angles: AngularBoundarySet::uniform(n_theta)?,
                warnings: alloc::vec![DetectWarning::UniformAngularFallback],
            });
        }
        Err(e) => {
            return Err(match e {
                EwtError::InvalidArgument(msg) => {
                    EwtError::InvalidArgument(format!("angular: {msg}"))
                }
                other => other,
            })
        }
    };

    // Ascending polar angles of the profile bins.
    let n_angles = grid.n_angles();
    let polar: Vec<f64> = (0..n_angles)
        .map(|rev| grid.polar_angle(n_angles - 1 - rev))
        .collect();
    let map_back = |omega_pos: f64| -> f64 {
        let x = omega_pos * (n_angles - 1) as f64 / PI;
        let i0 = (x as usize).min(n_angles - 2);
        let frac = x - i0 as f64;
        polar[i0] + frac * (polar[i0 + 1] - polar[i0])
    };
    let bounds = detection.boundaries.as_slice();
    let mapped: Vec<f64> = bounds[..bounds.len() - 1]
        .iter()
        .map(|&b| map_back(b))
        .collect();
    Ok(AngleDetection {
        angles: AngularBoundarySet::new(mapped)?,
        warnings: detection.warnings,
    })
}

/// Curvelet construction variant: shared angles or per-scale angles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveletOption {
    I,
    II,
}

/// Angular boundaries feeding a curvelet bank: one shared set (option I) or
/// one set per detail scale (option II).
#[derive(Debug, Clone, PartialEq)]
pub enum CurveletAngles {
    Shared(AngularBoundarySet),
    PerScale(Vec<AngularBoundarySet>),
}

impl CurveletAngles {
    fn for_scale(&self, detail_index: usize) -> &AngularBoundarySet {
        match self {
            CurveletAngles::Shared(set) => set,
            CurveletAngles::PerScale(sets) => &sets[detail_index],
        }
    }

    /// Tightest transition half-width valid for every contained set.
    pub fn delta_theta(&self) -> f64 {
        match self {
            CurveletAngles::Shared(set) => choose_delta_theta(set),
            CurveletAngles::PerScale(sets) => sets
                .iter()
                .map(choose_delta_theta)
                .fold(f64::INFINITY, f64::min),
        }
    }
}

fn check_angular_overlap(set: &AngularBoundarySet, dt: f64) -> Result<()> {
    for (m, gap) in set.gaps().into_iter().enumerate() {
        if 2.0 * dt >= gap {
            return Err(EwtError::InvalidArgument(format!(
                "angular transition width {dt:.4} overlaps sector {} (gap {gap:.4})",
                m + 1
            )));
        }
    }
    Ok(())
}

/// Wedge bank: radial windows on the scale partition times angular windows
/// on the (shared or per-scale) angle sets. Scale 0 is the purely radial
/// lowpass; the outermost radial window keeps the Fourier-plane corners.
pub fn curvelet_bank(
    option: CurveletOption,
    omega: &BoundarySet,
    angles: &CurveletAngles,
    gamma: f64,
    delta_theta: f64,
    rows: usize,
    cols: usize,
) -> Result<FilterBank2D> {
    if rows < 4 || cols < 4 {
        return Err(EwtError::InvalidArgument(format!(
            "grid {rows}x{cols} too small for a wedge bank"
        )));
    }
    let n_scales = omega.n_bands();
    let kind = match option {
        CurveletOption::I => BankKind::CurveletI,
        CurveletOption::II => BankKind::CurveletII,
    };
    match (option, angles) {
        (CurveletOption::I, CurveletAngles::Shared(_)) => {}
        (CurveletOption::II, CurveletAngles::PerScale(sets)) => {
            if sets.len() + 1 != n_scales {
                return Err(EwtError::InvalidArgument(format!(
                    "option II needs one angle set per detail scale: got {} for {} scales",
                    sets.len(),
                    n_scales
                )));
            }
        }
        _ => {
            return Err(EwtError::InvalidArgument(String::from(
                "curvelet option does not match the supplied angle sets",
            )));
        }
    }
    if n_scales == 1 {
        return FilterBank2D::from_masks(
            kind,
            rows,
            cols,
            alloc::vec![alloc::vec![1.0; rows * cols]],
            alloc::vec![BandLabel::Radial(0)],
            gamma,
            Some(delta_theta),
        );
    }
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(EwtError::InvalidArgument(format!(
            "gamma must lie in (0, 1), got {gamma}"
        )));
    }
    if !(delta_theta > 0.0) {
        return Err(EwtError::InvalidArgument(String::from(
            "delta_theta must be positive",
        )));
    }
    let bounds = omega.as_slice();
    for (n, w) in bounds[1..].windows(2).enumerate() {
        if (1.0 + gamma) * w[0] >= (1.0 - gamma) * w[1] {
            return Err(EwtError::InvalidArgument(format!(
                "radial transition areas around boundaries {} and {} overlap",
                n + 1,
                n + 2
            )));
        }
    }
    match angles {
        CurveletAngles::Shared(set) => check_angular_overlap(set, delta_theta)?,
        CurveletAngles::PerScale(sets) => {
            for set in sets {
                check_angular_overlap(set, delta_theta)?;
            }
        }
    }

    let mut radii = Vec::with_capacity(rows * cols);
    let mut thetas = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        for c in 0..cols {
            radii.push(crate::littlewood_paley::bin_radius(r, c, rows, cols));
            thetas.push(canonical_angle(r, c, rows, cols));
        }
    }

    let mut masks = Vec::new();
    let mut labels = Vec::new();
    let w1 = bounds[1];
    masks.push(radii.iter().map(|&r| lowpass_value(r, w1, gamma)).collect());
    labels.push(BandLabel::Radial(0));
    for n in 1..n_scales {
        let lo = bounds[n];
        let hi = if n + 1 < n_scales {
            Some(bounds[n + 1])
        } else {
            None
        };
        let set = angles.for_scale(n - 1);
        for m in 0..set.n_sectors() {
            let mask: Vec<f64> = radii
                .iter()
                .zip(&thetas)
                .map(|(&r, &t)| {
                    let w = bandpass_value(r, lo, hi, gamma);
                    if w == 0.0 {
                        0.0
                    } else {
                        w * wedge_value(t, set, m, delta_theta)
                    }
                })
                .collect();
            masks.push(mask);
            labels.push(BandLabel::Wedge(n, m + 1));
        }
    }
    FilterBank2D::from_masks(kind, rows, cols, masks, labels, gamma, Some(delta_theta))
}

/// Forward curvelet transform (the same Fourier-mask scheme as the annular
/// transform, over wedge masks).
pub fn curvelet_forward(image: &Image, bank: &FilterBank2D) -> Result<SubbandSet> {
    lp_forward(image, bank)
}

/// Inverse curvelet transform.
pub fn curvelet_inverse(subbands: &SubbandSet, bank: &FilterBank2D) -> Result<Image> {
    lp_inverse(subbands, bank)
}

/// Everything detected for a curvelet bank.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveletDetection {
    pub scale_detection: Detection,
    pub angles: CurveletAngles,
    pub warnings: Vec<DetectWarning>,
}

/// Detect scales on the radial mean spectrum, then angles on the full-band
/// (option I) or per-scale band-restricted (option II) angular profiles.
/// Detail scales whose radial band holds no grid radius fall back to the
/// uniform angular split.
pub fn curvelet_detect(
    image: &Image,
    n_scales: usize,
    n_theta: usize,
    cfg_scale: &DetectConfig,
    cfg_angle: &DetectConfig,
    option: CurveletOption,
) -> Result<CurveletDetection> {
    if n_scales < 2 || n_theta < 2 {
        return Err(EwtError::InvalidArgument(format!(
            "curvelet detection needs n_scales >= 2 and n_theta >= 2, got {n_scales} and {n_theta}"
        )));
    }
    let crop = image.center_even_square()?;
    let grid = PPGrid::new(crop.rows())?;
    let array = ppfft(&crop, &grid)?;
    let spectrum = radial_mean_spectrum(&array);
    let cfg_scale = DetectConfig {
        n_bands: n_scales,
        ..*cfg_scale
    };
    let scale_detection = boundaries::detect(&spectrum, &cfg_scale).map_err(|e| match e {
        EwtError::Detection(msg) => EwtError::Detection(format!("radial spectrum: {msg}")),
        other => other,
    })?;
    let mut warnings = scale_detection.warnings.clone();

    let angles = match option {
        CurveletOption::I => {
            let det = detect_angles(&array, n_theta, cfg_angle, None)?;
            warnings.extend(det.warnings);
            CurveletAngles::Shared(det.angles)
        }
        CurveletOption::II => {
            let bounds = scale_detection.boundaries.as_slice().to_vec();
            let n = grid.n();
            let mut sets = Vec::with_capacity(bounds.len().saturating_sub(2));
            for w in bounds[1..].windows(2) {
                let band_has_radius = (1..=n).any(|j| {
                    let r = PI * j as f64 / n as f64;
                    r >= w[0] && r <= w[1]
                });
                if band_has_radius {
                    let det = detect_angles(&array, n_theta, cfg_angle, Some((w[0], w[1])))?;
                    warnings.extend(det.warnings);
                    sets.push(det.angles);
                } else {
                    warnings.push(DetectWarning::UniformAngularFallback);
                    sets.push(AngularBoundarySet::uniform(n_theta)?);
                }
            }
            CurveletAngles::PerScale(sets)
        }
    };
    Ok(CurveletDetection {
        scale_detection,
        angles,
        warnings,
    })
}

/// Full pipeline: detect, build the bank, decompose.
pub fn curvelet_forward_detected(
    image: &Image,
    n_scales: usize,
    n_theta: usize,
    cfg_scale: &DetectConfig,
    cfg_angle: &DetectConfig,
    option: CurveletOption,
) -> Result<(FilterBank2D, SubbandSet, CurveletDetection)> {
    let detection = curvelet_detect(image, n_scales, n_theta, cfg_scale, cfg_angle, option)?;
    let gamma = choose_gamma(&detection.scale_detection.boundaries);
    let bank = curvelet_bank(
        option,
        &detection.scale_detection.boundaries,
        &detection.angles,
        gamma,
        detection.angles.delta_theta(),
        image.rows(),
        image.cols(),
    )?;
    let subbands = curvelet_forward(image, &bank)?;
    Ok((bank, subbands, detection))
}

/// Ridgelet coefficients: per band and angle, a real sequence along the ray
/// (length `2N+1`), plus everything needed to invert.
#[derive(Debug, Clone, PartialEq)]
pub struct RidgeletCoeffs {
    data: Vec<f64>,
    n_bands: usize,
    grid_n: usize,
    bank: FilterBank1D,
    omega: BoundarySet,
    gamma: f64,
}

impl RidgeletCoeffs {
    pub fn n_bands(&self) -> usize {
        self.n_bands
    }

    pub fn n_angles(&self) -> usize {
        2 * self.grid_n
    }

    pub fn ray_len(&self) -> usize {
        2 * self.grid_n + 1
    }

    pub fn grid_n(&self) -> usize {
        self.grid_n
    }

    pub fn omega(&self) -> &BoundarySet {
        &self.omega
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn ray(&self, band: usize, angle: usize) -> &[f64] {
        let l = self.ray_len();
        let start = (band * self.n_angles() + angle) * l;
        &self.data[start..start + l]
    }

    pub fn ray_mut(&mut self, band: usize, angle: usize) -> &mut [f64] {
        let l = self.ray_len();
        let start = (band * self.n_angles() + angle) * l;
        &mut self.data[start..start + l]
    }

    /// Rebuild from stored parts (used by the file reader).
    pub fn from_parts(
        data: Vec<f64>,
        n_bands: usize,
        grid_n: usize,
        omega: BoundarySet,
        gamma: f64,
    ) -> Result<Self> {
        let expected = n_bands * 2 * grid_n * (2 * grid_n + 1);
        if data.len() != expected {
            return Err(EwtError::InvalidArgument(format!(
                "ridgelet buffer holds {} values, expected {expected}",
                data.len()
            )));
        }
        let bank = ridgelet_bank(&omega, gamma, grid_n)?;
        if bank.n_bands() != n_bands {
            return Err(EwtError::InvalidArgument(format!(
                "stored band count {n_bands} does not match the partition ({} bands)",
                bank.n_bands()
            )));
        }
        Ok(Self {
            data,
            n_bands,
            grid_n,
            bank,
            omega,
            gamma,
        })
    }

    pub fn band_energy(&self, band: usize) -> f64 {
        let l = self.ray_len() * self.n_angles();
        self.data[band * l..(band + 1) * l]
            .iter()
            .map(|v| v * v)
            .sum()
    }
}

/// 1D bank over the signed-radius axis of a pseudo-polar line.
fn ridgelet_bank(omega: &BoundarySet, gamma: f64, grid_n: usize) -> Result<FilterBank1D> {
    let freqs: Vec<f64> = (0..2 * grid_n + 1)
        .map(|idx| PI * (idx as f64 - grid_n as f64) / grid_n as f64)
        .collect();
    FilterBank1D::from_frequencies(omega, gamma, &freqs)
}

/// DFT position of signed radius index `j` on a length `2N+1` axis.
#[inline]
fn dft_index_of_radius(j: isize, len: usize) -> usize {
    if j >= 0 {
        j as usize
    } else {
        (j + len as isize) as usize
    }
}

/// Ridgelet analysis with an explicit radius partition: multiply each
/// pseudo-polar line by the masks and inverse-transform along the ray.
pub fn ridgelet_transform(image: &Image, omega: &BoundarySet, gamma: f64) -> Result<RidgeletCoeffs> {
    if image.rows() != image.cols() || image.rows() % 2 != 0 {
        return Err(EwtError::InvalidArgument(format!(
            "ridgelet needs a square even-sided image, got {}x{}",
            image.rows(),
            image.cols()
        )));
    }
    let grid = PPGrid::new(image.rows())?;
    let array = ppfft(image, &grid)?;
    ridgelet_analyze(&array, omega, gamma)
}

/// Analysis step shared by [`ridgelet_transform`] and [`ridgelet_forward`].
fn ridgelet_analyze(array: &PPArray, omega: &BoundarySet, gamma: f64) -> Result<RidgeletCoeffs> {
    let n = array.grid_n();
    let bank = ridgelet_bank(omega, gamma, n)?;
    let ray_len = 2 * n + 1;
    let n_bands = bank.n_bands();
    let n_angles = 2 * n;
    let mut data = alloc::vec![0.0f64; n_bands * n_angles * ray_len];
    let scale = array.values().iter().fold(1.0f64, |m, v| m.max(v.norm()));

    let mut masked = alloc::vec![Complex64::new(0.0, 0.0); ray_len];
    for i in 0..n_angles {
        let line = array.line(i);
        for band in 0..n_bands {
            let mask = bank.mask(band);
            for v in masked.iter_mut() {
                *v = Complex64::new(0.0, 0.0);
            }
            for (idx, (&value, &m)) in line.iter().zip(mask).enumerate() {
                let j = idx as isize - n as isize;
                masked[dft_index_of_radius(j, ray_len)] = value * m;
            }
            let (ray, residue) = idft1_real(&masked);
            debug_assert!(
                residue <= 1e-8 * scale,
                "imaginary residue {residue} above tolerance"
            );
            let start = (band * n_angles + i) * ray_len;
            data[start..start + ray_len].copy_from_slice(&ray);
        }
    }
    Ok(RidgeletCoeffs {
        data,
        n_bands,
        grid_n: n,
        bank,
        omega: omega.clone(),
        gamma,
    })
}

/// Detection plus coefficients of a ridgelet decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct RidgeletDecomposition {
    pub coeffs: RidgeletCoeffs,
    pub detection: Detection,
}

/// Detect the radius partition on the angle-averaged spectrum, then analyze.
pub fn ridgelet_forward(
    image: &Image,
    n_bands: usize,
    cfg: &DetectConfig,
) -> Result<RidgeletDecomposition> {
    if image.rows() != image.cols() || image.rows() % 2 != 0 {
        return Err(EwtError::InvalidArgument(format!(
            "ridgelet needs a square even-sided image, got {}x{}",
            image.rows(),
            image.cols()
        )));
    }
    let grid = PPGrid::new(image.rows())?;
    let array = ppfft(image, &grid)?;
    let spectrum = radial_mean_spectrum(&array);
    let cfg = DetectConfig { n_bands, ..*cfg };
    let detection = boundaries::detect(&spectrum, &cfg).map_err(|e| match e {
        EwtError::Detection(msg) => EwtError::Detection(format!("radial spectrum: {msg}")),
        other => other,
    })?;
    let gamma = choose_gamma(&detection.boundaries);
    let coeffs = ridgelet_analyze(&array, &detection.boundaries, gamma)?;
    Ok(RidgeletDecomposition { coeffs, detection })
}

/// Ridgelet synthesis: per-ray re-weighting back to a pseudo-polar array,
/// then least-squares inversion of the pseudo-polar transform.
pub fn ridgelet_inverse(coeffs: &RidgeletCoeffs, tol: f64, maxiter: usize) -> Result<PpInverse> {
    let n = coeffs.grid_n();
    let grid = PPGrid::new(n)?;
    let ray_len = coeffs.ray_len();
    let mut array = PPArray::zeros(&grid);
    for i in 0..coeffs.n_angles() {
        let mut acc = alloc::vec![Complex64::new(0.0, 0.0); ray_len];
        for band in 0..coeffs.n_bands() {
            let spec = dft1(&Signal1D::new(coeffs.ray(band, i).to_vec())?);
            let mask = coeffs.bank.mask(band);
            for (idx, item) in acc.iter_mut().enumerate() {
                let j = idx as isize - n as isize;
                *item += spec[dft_index_of_radius(j, ray_len)] * mask[idx];
            }
        }
        for (idx, &value) in acc.iter().enumerate() {
            let j = idx as isize - n as isize;
            array.set(i, j, value);
        }
    }
    ppfft_inverse(&array, &grid, tol, maxiter)
}
