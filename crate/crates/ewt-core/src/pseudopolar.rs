//! Pseudo-polar Fourier transform on a concentric-squares grid, with its
//! adjoint, a conjugate-gradient least-squares inverse, and the averaged
//! spectra consumed by the annular and directional transforms.
//!
//! Grid layout for an `N x N` image (`N` even): angle index `i` first runs
//! the basically-vertical sector with slopes `s = -1 + 2i/N` (nodes
//! `(s*r_j, r_j)`), then the basically-horizontal sector with the same
//! slope set in reverse (nodes `(r_j, s*r_j)`), so the from-vertical angle
//! grows strictly with `i` over an interval of length `pi`. Radii are
//! `r_j = pi*j/N` for signed `j` in `[-N, N]`.
//!
//! The production forward/adjoint paths factor each sector through padded
//! FFTs and chirp-z transforms; [`ppfft_direct`] and
//! [`ppfft_adjoint_direct`] evaluate the defining sums and serve as the
//! correctness reference. The adjoint maps back to a real image (the
//! adjoint with respect to the real inner product), which is what the
//! normal-equations solver needs.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;

use crate::array::Image;
use crate::boundaries::Spectrum1D;
use crate::error::EwtError;
use crate::fft::{cis, czt, fft_forward, fft_inverse};
use crate::Result;

/// Node geometry of the pseudo-polar grid for an even image side `N`.
#[derive(Debug, Clone, PartialEq)]
pub struct PPGrid {
    n: usize,
}

impl PPGrid {
    pub fn new(n: usize) -> Result<Self> {
        if n < 4 || n % 2 != 0 {
            return Err(EwtError::InvalidArgument(format!(
                "pseudo-polar grid needs an even side >= 4, got {n}"
            )));
        }
        Ok(Self { n })
    }

    /// Image side `N`.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of angle indices (`2N`).
    pub fn n_angles(&self) -> usize {
        2 * self.n
    }

    /// Number of signed radii per line (`2N + 1`).
    pub fn n_radii(&self) -> usize {
        2 * self.n + 1
    }

    /// Total node count `2N * (2N + 1)`.
    pub fn node_count(&self) -> usize {
        self.n_angles() * self.n_radii()
    }

    /// Radius `r_j = pi*j/N` of signed index `j`.
    pub fn radius(&self, j: isize) -> f64 {
        PI * j as f64 / self.n as f64
    }

    /// Slope of the line through angle index `i`, within its sector.
    fn slope(&self, i: usize) -> f64 {
        let n = self.n as f64;
        if i < self.n {
            -1.0 + 2.0 * i as f64 / n
        } else {
            1.0 - 2.0 * (i - self.n + 1) as f64 / n
        }
    }

    /// Frequency node `(w1, w2)` at angle index `i`, signed radius `j`.
    pub fn node(&self, i: usize, j: isize) -> (f64, f64) {
        let r = self.radius(j);
        let s = self.slope(i);
        if i < self.n {
            (s * r, r)
        } else {
            (r, s * r)
        }
    }

    /// From-vertical angle of line `i`; strictly increasing with `i` over
    /// `[-pi/4, 3pi/4]`.
    pub fn theta(&self, i: usize) -> f64 {
        let s = self.slope(i);
        if i < self.n {
            libm::atan(s)
        } else {
            libm::atan2(1.0, s)
        }
    }

    /// Polar angle `atan2(w2, w1)` of line `i`, in `[-pi/4, 3pi/4]`;
    /// strictly decreasing with `i` (the mirror of [`Self::theta`]).
    pub fn polar_angle(&self, i: usize) -> f64 {
        let s = self.slope(i);
        if i < self.n {
            libm::atan2(1.0, s)
        } else {
            libm::atan(s)
        }
    }
}

/// Complex samples on a [`PPGrid`], stored angle-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PPArray {
    grid_n: usize,
    values: Vec<Complex64>,
}

impl PPArray {
    pub fn zeros(grid: &PPGrid) -> Self {
        Self {
            grid_n: grid.n(),
            values: vec![Complex64::new(0.0, 0.0); grid.node_count()],
        }
    }

    pub fn from_values(grid: &PPGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.node_count() {
            return Err(EwtError::InvalidArgument(format!(
                "pseudo-polar buffer holds {} values, expected {}",
                values.len(),
                grid.node_count()
            )));
        }
        Ok(Self {
            grid_n: grid.n(),
            values,
        })
    }

    pub fn grid_n(&self) -> usize {
        self.grid_n
    }

    #[inline]
    fn idx(&self, i: usize, j: isize) -> usize {
        i * (2 * self.grid_n + 1) + (j + self.grid_n as isize) as usize
    }

    #[inline]
    pub fn get(&self, i: usize, j: isize) -> Complex64 {
        self.values[self.idx(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: isize, v: Complex64) {
        let idx = self.idx(i, j);
        self.values[idx] = v;
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    /// One full line (all signed radii) at angle index `i`.
    pub fn line(&self, i: usize) -> &[Complex64] {
        let w = 2 * self.grid_n + 1;
        &self.values[i * w..(i + 1) * w]
    }
}

fn check_match(image: &Image, grid: &PPGrid) -> Result<()> {
    if image.rows() != grid.n() || image.cols() != grid.n() {
        return Err(EwtError::InvalidArgument(format!(
            "image {}x{} does not match pseudo-polar grid side {}",
            image.rows(),
            image.cols(),
            grid.n()
        )));
    }
    Ok(())
}

/// Direct evaluation of the defining sums; the correctness reference.
pub fn ppfft_direct(image: &Image, grid: &PPGrid) -> Result<PPArray> {
    check_match(image, grid)?;
    let n = grid.n();
    let mut out = PPArray::zeros(grid);
    for i in 0..grid.n_angles() {
        for j in -(n as isize)..=(n as isize) {
            let (w1, w2) = grid.node(i, j);
            let mut acc = Complex64::new(0.0, 0.0);
            for x1 in 0..n {
                for x2 in 0..n {
                    acc += image.get(x1, x2) * cis(-(x1 as f64 * w1 + x2 as f64 * w2));
                }
            }
            out.set(i, j, acc);
        }
    }
    Ok(out)
}

/// Padded length-`2N` FFT of every row (`axis = 0`) or column (`axis = 1`).
fn half_frequency_transform(image: &Image, axis: usize) -> Vec<Vec<Complex64>> {
    let n = image.rows();
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let mut buf = vec![Complex64::new(0.0, 0.0); 2 * n];
        for t in 0..n {
            let v = if axis == 0 {
                image.get(k, t)
            } else {
                image.get(t, k)
            };
            buf[t] = Complex64::new(v, 0.0);
        }
        fft_forward(&mut buf);
        out.push(buf);
    }
    out
}

/// Fast forward transform; matches [`ppfft_direct`] to rounding error.
pub fn ppfft(image: &Image, grid: &PPGrid) -> Result<PPArray> {
    check_match(image, grid)?;
    let n = grid.n();
    let ni = n as isize;
    let den = (n * n) as u64;
    let mut out = PPArray::zeros(grid);

    // Basically-vertical sector: rows see the radius frequency.
    let rows = half_frequency_transform(image, 0);
    let mut y = vec![Complex64::new(0.0, 0.0); n];
    for j in -ni..=ni {
        let m = j.rem_euclid(2 * ni) as usize;
        for x1 in 0..n {
            y[x1] = rows[x1][m] * cis(PI * j as f64 * x1 as f64 / n as f64);
        }
        let line = czt(&y, n, -(j as i64), den);
        for (i, v) in line.into_iter().enumerate() {
            out.set(i, j, v);
        }
    }

    // Basically-horizontal sector: columns see the radius frequency; the
    // chirp output index k maps to the global angle index 2N-1-k.
    let cols = half_frequency_transform(image, 1);
    for j in -ni..=ni {
        let m = j.rem_euclid(2 * ni) as usize;
        for x2 in 0..n {
            y[x2] = cols[x2][m] * cis(PI * j as f64 * x2 as f64 / n as f64);
        }
        let line = czt(&y, n, -(j as i64), den);
        for (k, v) in line.into_iter().enumerate() {
            out.set(2 * n - 1 - k, j, v);
        }
    }
    Ok(out)
}

/// Direct adjoint (real part of the conjugate-transposed sums).
pub fn ppfft_adjoint_direct(array: &PPArray, grid: &PPGrid) -> Result<Image> {
    if array.grid_n() != grid.n() {
        return Err(EwtError::InvalidArgument(String::from(
            "pseudo-polar array does not match grid",
        )));
    }
    let n = grid.n();
    let mut pixels = vec![0.0f64; n * n];
    for i in 0..grid.n_angles() {
        for j in -(n as isize)..=(n as isize) {
            let (w1, w2) = grid.node(i, j);
            let p = array.get(i, j);
            for x1 in 0..n {
                for x2 in 0..n {
                    pixels[x1 * n + x2] += (p * cis(x1 as f64 * w1 + x2 as f64 * w2)).re;
                }
            }
        }
    }
    Image::new(n, n, pixels)
}

/// Fast adjoint; the exact dual of [`ppfft`] up to rounding.
pub fn ppfft_adjoint(array: &PPArray, grid: &PPGrid) -> Result<Image> {
    if array.grid_n() != grid.n() {
        return Err(EwtError::InvalidArgument(String::from(
            "pseudo-polar array does not match grid",
        )));
    }
    let n = grid.n();
    let ni = n as isize;
    let den = (n * n) as u64;
    let mut acc = vec![Complex64::new(0.0, 0.0); n * n];

    // Per sector: chirp over the angle index, then an exponential sum over
    // the signed radii folded onto a length-2N axis.
    for sector in 0..2 {
        // q[j][x] = sum_i P(i, j) exp(+i x s_i r_j), for this sector's i.
        let mut q = vec![vec![Complex64::new(0.0, 0.0); n]; 2 * n + 1];
        let mut p_line = vec![Complex64::new(0.0, 0.0); n];
        for j in -ni..=ni {
            for k in 0..n {
                let i = if sector == 0 { k } else { 2 * n - 1 - k };
                p_line[k] = array.get(i, j);
            }
            let line = czt(&p_line, n, j as i64, den);
            let qj = &mut q[(j + ni) as usize];
            for (x, v) in line.into_iter().enumerate() {
                qj[x] = v * cis(-PI * j as f64 * x as f64 / n as f64);
            }
        }
        // For each fixed x, sum over j with exp(+2*pi*i*j*t/(2N)).
        let mut buf = vec![Complex64::new(0.0, 0.0); 2 * n];
        for x in 0..n {
            for v in buf.iter_mut() {
                *v = Complex64::new(0.0, 0.0);
            }
            for j in -ni..=ni {
                let m = j.rem_euclid(2 * ni) as usize;
                buf[m] += q[(j + ni) as usize][x];
            }
            fft_inverse(&mut buf);
            let scale = (2 * n) as f64;
            for t in 0..n {
                let contribution = buf[t] * scale;
                if sector == 0 {
                    acc[x * n + t] += contribution;
                } else {
                    acc[t * n + x] += contribution;
                }
            }
        }
    }

    let pixels = acc.iter().map(|v| v.re).collect();
    Image::new(n, n, pixels)
}

/// Result of the least-squares inversion.
#[derive(Debug, Clone, PartialEq)]
pub struct PpInverse {
    pub image: Image,
    pub iterations: usize,
    /// Relative data residual `||ppfft(x) - P|| / ||P||` at exit.
    pub residual: f64,
    pub converged: bool,
}

/// Least-squares inverse via conjugate gradient on the normal equations
/// `(A* A) x = A* P`. Stops when the normal-equations residual drops below
/// `tol` relative to its start, or at `maxiter` (flagged, not an error).
pub fn ppfft_inverse(array: &PPArray, grid: &PPGrid, tol: f64, maxiter: usize) -> Result<PpInverse> {
    if !(tol > 0.0) {
        return Err(EwtError::InvalidArgument(String::from(
            "solver tolerance must be positive",
        )));
    }
    let n = grid.n();
    let apply_normal = |x: &[f64]| -> Result<Vec<f64>> {
        let img = Image::new(n, n, x.to_vec())?;
        let fwd = ppfft(&img, grid)?;
        Ok(ppfft_adjoint(&fwd, grid)?.into_pixels())
    };

    let rhs = ppfft_adjoint(array, grid)?.into_pixels();
    let rhs_norm = libm::sqrt(rhs.iter().map(|v| v * v).sum::<f64>());
    let p_norm = libm::sqrt(array.values().iter().map(|v| v.norm_sqr()).sum::<f64>());

    let mut x = vec![0.0f64; n * n];
    if rhs_norm == 0.0 {
        return Ok(PpInverse {
            image: Image::new(n, n, x)?,
            iterations: 0,
            residual: 0.0,
            converged: true,
        });
    }

    let mut r = rhs.clone();
    let mut p = r.clone();
    let mut rr: f64 = r.iter().map(|v| v * v).sum();
    let mut iterations = 0;
    let mut converged = false;
    while iterations < maxiter {
        if libm::sqrt(rr) <= tol * rhs_norm {
            converged = true;
            break;
        }
        let mp = apply_normal(&p)?;
        let p_mp: f64 = p.iter().zip(&mp).map(|(a, b)| a * b).sum();
        if p_mp <= 0.0 {
            break;
        }
        let alpha = rr / p_mp;
        for (xi, pi) in x.iter_mut().zip(&p) {
            *xi += alpha * pi;
        }
        for (ri, mpi) in r.iter_mut().zip(&mp) {
            *ri -= alpha * mpi;
        }
        let rr_new: f64 = r.iter().map(|v| v * v).sum();
        let beta = rr_new / rr;
        for (pi, ri) in p.iter_mut().zip(&r) {
            *pi = ri + beta * *pi;
        }
        rr = rr_new;
        iterations += 1;
    }
    if libm::sqrt(rr) <= tol * rhs_norm {
        converged = true;
    }

    let image = Image::new(n, n, x)?;
    let fwd = ppfft(&image, grid)?;
    let data_residual = libm::sqrt(
        fwd.values()
            .iter()
            .zip(array.values())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>(),
    );
    let residual = if p_norm == 0.0 {
        0.0
    } else {
        data_residual / p_norm
    };
    Ok(PpInverse {
        image,
        iterations,
        residual,
        converged,
    })
}

/// Mean of `|values|` over all angles, per absolute radius; bins map to
/// `omega = pi*|j|/N`, the `[0, pi]` axis the detectors expect.
pub fn radial_mean_spectrum(array: &PPArray) -> Spectrum1D {
    let n = array.grid_n() as isize;
    let n_angles = 2 * array.grid_n();
    let mut bins = vec![0.0f64; array.grid_n() + 1];
    let mut counts = vec![0usize; array.grid_n() + 1];
    for i in 0..n_angles {
        for j in -n..=n {
            let b = j.unsigned_abs();
            bins[b] += array.get(i, j).norm();
            counts[b] += 1;
        }
    }
    for (b, c) in bins.iter_mut().zip(counts) {
        *b /= c as f64;
    }
    Spectrum1D::from_magnitudes(bins).expect("means of magnitudes are valid")
}

/// Mean of `|values|` over radii inside `band` (inclusive endpoints, the
/// full `(0, pi]` band when absent), per angle, ordered by ascending polar
/// angle so the linear boundary machinery applies unchanged.
pub fn angular_mean_spectrum(array: &PPArray, band: Option<(f64, f64)>) -> Result<Spectrum1D> {
    let n = array.grid_n();
    let ni = n as isize;
    let (lo, hi) = band.unwrap_or((f64::MIN_POSITIVE, PI));
    if !(lo > 0.0 && lo <= hi && hi <= PI + 1e-12) {
        return Err(EwtError::InvalidArgument(format!(
            "radial band [{lo}, {hi}] must sit inside (0, pi]"
        )));
    }
    let radii: Vec<isize> = (1..=ni)
        .filter(|&j| {
            let r = PI * j as f64 / n as f64;
            r >= lo && r <= hi
        })
        .collect();
    if radii.is_empty() {
        return Err(EwtError::InvalidArgument(format!(
            "radial band [{lo:.4}, {hi:.4}] contains no grid radii"
        )));
    }
    let mut bins = Vec::with_capacity(2 * n);
    for rev in 0..2 * n {
        let i = 2 * n - 1 - rev;
        let mut acc = 0.0;
        for &j in &radii {
            acc += array.get(i, j).norm() + array.get(i, -j).norm();
        }
        bins.push(acc / (2 * radii.len()) as f64);
    }
    Spectrum1D::from_magnitudes(bins)
}
