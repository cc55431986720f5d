//! Partitioning a magnitude spectrum over `[0, pi]` into mode supports.
//!
//! The pipeline is: optional `ln(1+H)` step, optional global-trend removal
//! (power law, polynomial, morphological mean envelope or top-hat), then one
//! of three placement rules:
//!
//! - `middle`: boundaries at midpoints between the selected largest maxima,
//! - `lowestmin`: boundaries at the global minimum of each inter-maxima
//!   segment,
//! - `ftc`: fine-to-coarse merging starting from all local minima; the band
//!   count is an output rather than an input.
//!
//! Local extrema use strict-rise/weak-fall scanning, so plateaus are
//! credited to their leftmost bin, and every tie (equal maxima, equal
//! minima) resolves toward the lower frequency.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use crate::error::EwtError;
use crate::morphology::{self, StructuringWindow};
use crate::Result;

/// Magnitude profile over `[0, pi]`; bin `i` maps to `omega = i*pi/(K-1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum1D {
    values: Vec<f64>,
    recipe: Option<PreprocessRecord>,
}

/// What [`preprocess`] did to a raw spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PreprocessRecord {
    pub log: bool,
    pub trend: Trend,
}

impl Spectrum1D {
    /// Wrap a raw (nonnegative) magnitude profile.
    pub fn from_magnitudes(values: Vec<f64>) -> Result<Self> {
        if values.len() < 3 {
            return Err(EwtError::InvalidArgument(format!(
                "spectrum needs at least 3 bins, got {}",
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite() || *v < 0.0) {
            return Err(EwtError::InvalidArgument(format!(
                "raw spectrum bin {i} is negative or non-finite"
            )));
        }
        Ok(Self {
            values,
            recipe: None,
        })
    }

    fn preprocessed(values: Vec<f64>, recipe: PreprocessRecord) -> Self {
        Self {
            values,
            recipe: Some(recipe),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Frequency of bin `i`.
    pub fn omega(&self, i: usize) -> f64 {
        i as f64 * PI / (self.len() - 1) as f64
    }

    pub fn recipe(&self) -> Option<PreprocessRecord> {
        self.recipe
    }
}

/// Sorted partition points `{0 = w^0 < ... < w^N = pi}`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundarySet {
    boundaries: Vec<f64>,
}

impl BoundarySet {
    pub fn new(boundaries: Vec<f64>) -> Result<Self> {
        if boundaries.len() < 2 {
            return Err(EwtError::InvalidArgument(String::from(
                "boundary set needs the two endpoints at least",
            )));
        }
        if boundaries[0] != 0.0 {
            return Err(EwtError::InvalidArgument(String::from(
                "first boundary must be 0",
            )));
        }
        if *boundaries.last().unwrap() != PI {
            return Err(EwtError::InvalidArgument(String::from(
                "last boundary must be pi",
            )));
        }
        if boundaries.windows(2).any(|w| w[0] >= w[1]) {
            return Err(EwtError::InvalidArgument(String::from(
                "boundaries must be strictly increasing",
            )));
        }
        Ok(Self { boundaries })
    }

    /// Wrap interior boundaries with the fixed endpoints `0` and `pi`.
    pub fn from_interior(interior: &[f64]) -> Result<Self> {
        let mut all = Vec::with_capacity(interior.len() + 2);
        all.push(0.0);
        all.extend_from_slice(interior);
        all.push(PI);
        Self::new(all)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.boundaries
    }

    /// Number of bands `N` (one lowpass plus `N-1` detail bands).
    pub fn n_bands(&self) -> usize {
        self.boundaries.len() - 1
    }

    pub fn interior(&self) -> &[f64] {
        &self.boundaries[1..self.boundaries.len() - 1]
    }
}

/// Global-trend removal method applied before detection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Trend {
    None,
    /// Fit `T(w) = w^{-s}` with the closed-form exponent estimate.
    PowerLaw,
    /// Least-squares polynomial of the given degree.
    Poly(usize),
    /// Mean of morphological opening and closing envelopes.
    Morpho,
    /// Morphological opening (white top-hat residual).
    TopHat,
}

impl fmt::Display for Trend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Trend::None => write!(f, "none"),
            Trend::PowerLaw => write!(f, "plaw"),
            Trend::Poly(d) => write!(f, "poly:{d}"),
            Trend::Morpho => write!(f, "morpho"),
            Trend::TopHat => write!(f, "tophat"),
        }
    }
}

/// Boundary placement rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rule {
    /// Midpoints between consecutive selected maxima.
    Middle,
    /// Global minimum of each inter-maxima segment.
    LowestMin,
    /// Fine-to-coarse merging of all local minima; ignores the band count.
    FineToCoarse,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rule::Middle => write!(f, "middle"),
            Rule::LowestMin => write!(f, "lowestmin"),
            Rule::FineToCoarse => write!(f, "ftc"),
        }
    }
}

/// Full detection configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectConfig {
    pub use_log: bool,
    pub trend: Trend,
    pub rule: Rule,
    /// Requested band count; ignored by [`Rule::FineToCoarse`].
    pub n_bands: usize,
    /// Valley-depth ratio of the fine-to-coarse merge criterion.
    pub rho: f64,
}

impl DetectConfig {
    /// Scale detection defaults: log + morpho envelope + lowest minima.
    pub fn scales(n_bands: usize) -> Self {
        Self {
            use_log: true,
            trend: Trend::Morpho,
            rule: Rule::LowestMin,
            n_bands,
            rho: 0.7,
        }
    }

    /// Angular detection defaults: top-hat trend + midpoint rule, no log.
    pub fn angles(n_bands: usize) -> Self {
        Self {
            use_log: false,
            trend: Trend::TopHat,
            rule: Rule::Middle,
            n_bands,
            rho: 0.7,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Trend::Poly(d) = self.trend {
            if d < 1 {
                return Err(EwtError::InvalidArgument(String::from(
                    "polynomial trend degree must be >= 1",
                )));
            }
        }
        if self.rule != Rule::FineToCoarse && self.n_bands < 2 {
            return Err(EwtError::InvalidArgument(format!(
                "band count must be >= 2, got {}",
                self.n_bands
            )));
        }
        if !(self.rho > 0.0 && self.rho.is_finite()) {
            return Err(EwtError::InvalidArgument(String::from(
                "rho must be positive and finite",
            )));
        }
        Ok(())
    }
}

/// Non-fatal events raised while detecting boundaries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DetectWarning {
    /// Fewer maxima than requested; the achievable partition was returned.
    FewerMaxima { requested: usize, achieved: usize },
    /// A segment had no interior bin; its boundary fell back to the midpoint.
    MidpointFallback { segment: usize },
    /// Angular profile carried no modes; a uniform split was used.
    UniformAngularFallback,
}

impl fmt::Display for DetectWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DetectWarning::FewerMaxima {
                requested,
                achieved,
            } => write!(
                f,
                "fewer maxima than requested: {requested} bands requested, {achieved} achievable"
            ),
            DetectWarning::MidpointFallback { segment } => {
                write!(f, "segment {segment} had no interior bin; midpoint used")
            }
            DetectWarning::UniformAngularFallback => {
                write!(f, "flat angular profile; uniform split used")
            }
        }
    }
}

/// Outcome of a detection run.
#[derive(Debug, Clone, PartialEq)]
pub struct Detection {
    pub boundaries: BoundarySet,
    /// Bins of the selected maxima (empty for the fine-to-coarse rule).
    pub maxima_bins: Vec<usize>,
    pub warnings: Vec<DetectWarning>,
}

/// Interior local maxima: `H[i-1] < H[i] >= H[i+1]` (plateaus at their
/// leftmost bin).
pub fn local_maxima(values: &[f64]) -> Vec<usize> {
    (1..values.len().saturating_sub(1))
        .filter(|&i| values[i - 1] < values[i] && values[i] >= values[i + 1])
        .collect()
}

/// Interior local minima, dual scan of [`local_maxima`].
pub fn local_minima(values: &[f64]) -> Vec<usize> {
    (1..values.len().saturating_sub(1))
        .filter(|&i| values[i - 1] > values[i] && values[i] <= values[i + 1])
        .collect()
}

/// Structuring half-width from the smallest gap between consecutive maxima;
/// falls back to `max(1, K/20)` when fewer than two maxima exist. The result
/// is clamped so the window always fits the signal.
pub fn se_size(values: &[f64]) -> usize {
    let k = values.len();
    let maxima = local_maxima(values);
    let half = if maxima.len() >= 2 {
        let width = maxima.windows(2).map(|w| w[1] - w[0]).min().unwrap();
        width / 2
    } else {
        (k / 20).max(1)
    };
    half.min((k - 1) / 2)
}

/// Closed-form power-law exponent `s` over bins with `omega > 0` and
/// `H > 0`, plus the trend `T(omega) = omega^{-s}` sampled on all bins
/// (`T` copies `H` at the zero-frequency bin, where the model is singular).
pub fn fit_power_law(spectrum: &Spectrum1D) -> Result<(f64, Vec<f64>)> {
    let mut num = 0.0;
    let mut den = 0.0;
    let mut usable = 0usize;
    for i in 1..spectrum.len() {
        let h = spectrum.values()[i];
        if h > 0.0 {
            let lw = libm::log(spectrum.omega(i));
            num += lw * libm::log(h);
            den += lw * lw;
            usable += 1;
        }
    }
    if usable == 0 || den == 0.0 {
        return Err(EwtError::Detection(String::from(
            "power-law fit has no usable bins",
        )));
    }
    let s = -num / den;
    let trend = (0..spectrum.len())
        .map(|i| {
            if i == 0 {
                spectrum.values()[0]
            } else {
                libm::pow(spectrum.omega(i), -s)
            }
        })
        .collect();
    Ok((s, trend))
}

/// Least-squares polynomial trend of degree `d` in the scaled variable
/// `omega/pi`, solved through the normal equations.
pub fn fit_polynomial(spectrum: &Spectrum1D, degree: usize) -> Result<Vec<f64>> {
    let k = spectrum.len();
    if degree >= k {
        return Err(EwtError::InvalidArgument(format!(
            "polynomial degree {degree} must be below the bin count {k}"
        )));
    }
    let m = degree + 1;
    // x in [0, 1] keeps the Vandermonde moments well scaled.
    let xs: Vec<f64> = (0..k).map(|i| i as f64 / (k - 1) as f64).collect();

    let mut gram = vec![0.0f64; m * m];
    let mut rhs = vec![0.0f64; m];
    for (&x, &h) in xs.iter().zip(spectrum.values()) {
        let mut pow_i = 1.0;
        for i in 0..m {
            let mut pow_j = pow_i * pow_i; // x^(2i), then x^(i+j) as j grows
            for j in i..m {
                gram[i * m + j] += pow_j;
                pow_j *= x;
            }
            rhs[i] += pow_i * h;
            pow_i *= x;
        }
    }
    for i in 0..m {
        for j in 0..i {
            gram[i * m + j] = gram[j * m + i];
        }
    }

    let coeffs = solve_spd_like(&mut gram, &mut rhs, m)?;
    Ok(xs
        .iter()
        .map(|&x| {
            let mut acc = 0.0;
            for c in coeffs.iter().rev() {
                acc = acc * x + c;
            }
            acc
        })
        .collect())
}

/// Gaussian elimination with partial pivoting on a small dense system; the
/// pivot-magnitude spread serves as the condition estimate for the error
/// message.
fn solve_spd_like(a: &mut [f64], b: &mut [f64], n: usize) -> Result<Vec<f64>> {
    let mut max_pivot = 0.0f64;
    let mut min_pivot = f64::INFINITY;
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&r1, &r2| a[r1 * n + col].abs().total_cmp(&a[r2 * n + col].abs()))
            .unwrap();
        if pivot_row != col {
            for j in 0..n {
                a.swap(col * n + j, pivot_row * n + j);
            }
            b.swap(col, pivot_row);
        }
        let pivot = a[col * n + col];
        max_pivot = max_pivot.max(pivot.abs());
        min_pivot = min_pivot.min(pivot.abs());
        if pivot == 0.0 || max_pivot / pivot.abs() > 1e14 {
            return Err(EwtError::Detection(format!(
                "normal system ill-conditioned (pivot spread ~{:.2e})",
                if pivot == 0.0 {
                    f64::INFINITY
                } else {
                    max_pivot / min_pivot
                }
            )));
        }
        for row in col + 1..n {
            let factor = a[row * n + col] / pivot;
            if factor != 0.0 {
                for j in col..n {
                    a[row * n + j] -= factor * a[col * n + j];
                }
                b[row] -= factor * b[col];
            }
        }
    }
    let mut x = vec![0.0f64; n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for j in row + 1..n {
            acc -= a[row * n + j] * x[j];
        }
        x[row] = acc / a[row * n + row];
    }
    Ok(x)
}

/// Morphological trend: mean of the opening and closing envelopes.
pub fn trend_morpho(values: &[f64]) -> Result<Vec<f64>> {
    let w = StructuringWindow::new(se_size(values));
    let open = morphology::opening(values, w)?;
    let close = morphology::closing(values, w)?;
    Ok(open
        .iter()
        .zip(close.iter())
        .map(|(o, c)| 0.5 * (o + c))
        .collect())
}

/// Top-hat trend: the opening envelope itself.
pub fn trend_tophat(values: &[f64]) -> Result<Vec<f64>> {
    let w = StructuringWindow::new(se_size(values));
    morphology::opening(values, w)
}

/// Apply the configured log step and trend removal to a raw spectrum.
pub fn preprocess(spectrum: &Spectrum1D, cfg: &DetectConfig) -> Result<Spectrum1D> {
    cfg.validate()?;
    let mut values: Vec<f64> = if cfg.use_log {
        spectrum.values().iter().map(|&v| libm::log1p(v)).collect()
    } else {
        spectrum.values().to_vec()
    };
    let staged = Spectrum1D {
        values: values.clone(),
        recipe: None,
    };
    match cfg.trend {
        Trend::None => {}
        Trend::PowerLaw => {
            let (_, trend) = fit_power_law(&staged)?;
            for (v, t) in values.iter_mut().zip(trend) {
                *v -= t;
            }
        }
        Trend::Poly(d) => {
            let trend = fit_polynomial(&staged, d)?;
            for (v, t) in values.iter_mut().zip(trend) {
                *v -= t;
            }
        }
        Trend::Morpho => {
            let trend = trend_morpho(staged.values())?;
            for (v, t) in values.iter_mut().zip(trend) {
                *v -= t;
            }
        }
        Trend::TopHat => {
            let trend = trend_tophat(staged.values())?;
            for (v, t) in values.iter_mut().zip(trend) {
                *v -= t;
            }
        }
    }
    Ok(Spectrum1D::preprocessed(
        values,
        PreprocessRecord {
            log: cfg.use_log,
            trend: cfg.trend,
        },
    ))
}

/// Keep the `n_keep` largest maxima (ties to the lower bin), re-indexed
/// ascending in position. Returns the kept bins and a fewer-maxima warning
/// when the request could not be met.
fn select_maxima(
    values: &[f64],
    n_bands: usize,
) -> Result<(Vec<usize>, Vec<DetectWarning>)> {
    let maxima = local_maxima(values);
    if maxima.is_empty() {
        return Err(EwtError::Detection(String::from(
            "spectrum has no interior local maxima",
        )));
    }
    let mut warnings = Vec::new();
    let want = n_bands - 1;
    let mut ranked = maxima;
    ranked.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    let mut kept: Vec<usize> = ranked.into_iter().take(want).collect();
    if kept.len() < want {
        warnings.push(DetectWarning::FewerMaxima {
            requested: n_bands,
            achieved: kept.len() + 1,
        });
    }
    kept.sort_unstable();
    Ok((kept, warnings))
}

/// Midpoint rule: boundaries halfway between consecutive selected maxima,
/// with `omega_0 = 0` prepended before the first maximum.
pub fn detect_middle(spectrum: &Spectrum1D, n_bands: usize) -> Result<Detection> {
    if n_bands < 2 {
        return Err(EwtError::InvalidArgument(String::from(
            "midpoint rule needs at least 2 bands",
        )));
    }
    let (kept, warnings) = select_maxima(spectrum.values(), n_bands)?;
    let mut interior = Vec::with_capacity(kept.len());
    let mut prev = 0.0f64;
    for &bin in &kept {
        let pos = spectrum.omega(bin);
        interior.push(0.5 * (prev + pos));
        prev = pos;
    }
    Ok(Detection {
        boundaries: BoundarySet::from_interior(&interior)?,
        maxima_bins: kept,
        warnings,
    })
}

/// Lowest-minima rule: each boundary is the global minimum of the open
/// segment between consecutive selected maxima (the first segment starts at
/// `omega = 0`, exclusive). Segments without an interior bin fall back to
/// the midpoint.
pub fn detect_lowestmin(spectrum: &Spectrum1D, n_bands: usize) -> Result<Detection> {
    if n_bands < 2 {
        return Err(EwtError::InvalidArgument(String::from(
            "lowest-minima rule needs at least 2 bands",
        )));
    }
    let (kept, mut warnings) = select_maxima(spectrum.values(), n_bands)?;
    let values = spectrum.values();
    let mut interior = Vec::with_capacity(kept.len());
    let mut prev_bin = 0usize;
    for (seg, &bin) in kept.iter().enumerate() {
        if bin > prev_bin + 1 {
            let argmin = (prev_bin + 1..bin)
                .min_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)))
                .unwrap();
            interior.push(spectrum.omega(argmin));
        } else {
            interior.push(0.5 * (spectrum.omega(prev_bin) + spectrum.omega(bin)));
            warnings.push(DetectWarning::MidpointFallback { segment: seg });
        }
        prev_bin = bin;
    }
    Ok(Detection {
        boundaries: BoundarySet::from_interior(&interior)?,
        maxima_bins: kept,
        warnings,
    })
}

/// Fine-to-coarse rule: start from every interior local minimum, then
/// repeatedly drop the shallowest separating minimum `m` whose value
/// exceeds `rho * min(left peak, right peak)`, until every remaining valley
/// is deep enough. The band count is whatever survives.
pub fn detect_ftc(spectrum: &Spectrum1D, rho: f64) -> Result<Detection> {
    let k = spectrum.len();
    if k < 5 {
        return Err(EwtError::InvalidArgument(format!(
            "fine-to-coarse needs at least 5 bins, got {k}"
        )));
    }
    let values = spectrum.values();
    let mut cuts = local_minima(values);

    loop {
        let mut best: Option<(usize, f64)> = None;
        for (idx, &m) in cuts.iter().enumerate() {
            let left_start = if idx == 0 { 0 } else { cuts[idx - 1] };
            let right_end = if idx + 1 == cuts.len() {
                k - 1
            } else {
                cuts[idx + 1]
            };
            let peak_left = values[left_start..=m].iter().copied().fold(f64::MIN, f64::max);
            let peak_right = values[m..=right_end].iter().copied().fold(f64::MIN, f64::max);
            if values[m] > rho * peak_left.min(peak_right) {
                let depth = values[m];
                let better = match best {
                    None => true,
                    Some((bidx, bdepth)) => {
                        depth > bdepth || (depth == bdepth && m < cuts[bidx])
                    }
                };
                if better {
                    best = Some((idx, depth));
                }
            }
        }
        match best {
            Some((idx, _)) => {
                cuts.remove(idx);
            }
            None => break,
        }
    }

    let interior: Vec<f64> = cuts.iter().map(|&m| spectrum.omega(m)).collect();
    Ok(Detection {
        boundaries: BoundarySet::from_interior(&interior)?,
        maxima_bins: Vec::new(),
        warnings: Vec::new(),
    })
}

/// Preprocess a raw spectrum and run the configured rule.
pub fn detect(spectrum: &Spectrum1D, cfg: &DetectConfig) -> Result<Detection> {
    let prepared = preprocess(spectrum, cfg)?;
    match cfg.rule {
        Rule::Middle => detect_middle(&prepared, cfg.n_bands),
        Rule::LowestMin => detect_lowestmin(&prepared, cfg.n_bands),
        Rule::FineToCoarse => detect_ftc(&prepared, cfg.rho),
    }
}
