//! Shared oracle helpers: brute-force transforms evaluated straight from
//! their defining sums, plus a tiny deterministic generator for test data.

use ewt_core::pseudopolar::{PPArray, PPGrid};
use ewt_core::{Image, Signal1D};
use num_complex::Complex64;

pub struct Lcg(pub u64);

impl Lcg {
    pub fn next_f64(&mut self) -> f64 {
        self.0 = self
            .0
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        (self.0 >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    }

    pub fn signal(&mut self, len: usize) -> Signal1D {
        Signal1D::new((0..len).map(|_| self.next_f64()).collect()).unwrap()
    }

    pub fn image(&mut self, rows: usize, cols: usize) -> Image {
        Image::new(rows, cols, (0..rows * cols).map(|_| self.next_f64()).collect()).unwrap()
    }

    pub fn complex_vec(&mut self, len: usize) -> Vec<Complex64> {
        (0..len)
            .map(|_| Complex64::new(self.next_f64(), self.next_f64()))
            .collect()
    }
}

fn cis(a: f64) -> Complex64 {
    Complex64::new(a.cos(), a.sin())
}

/// O(K^2) DFT straight from the definition (forward unnormalized).
pub fn direct_dft1(samples: &[f64]) -> Vec<Complex64> {
    let k = samples.len();
    (0..k)
        .map(|bin| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (t, &v) in samples.iter().enumerate() {
                acc += v * cis(-2.0 * std::f64::consts::PI * (bin * t) as f64 / k as f64);
            }
            acc
        })
        .collect()
}

/// O((RC)^2) 2D DFT from the double sum.
pub fn direct_dft2(image: &Image) -> Vec<Complex64> {
    let (rows, cols) = (image.rows(), image.cols());
    let mut out = Vec::with_capacity(rows * cols);
    for k1 in 0..rows {
        for k2 in 0..cols {
            let mut acc = Complex64::new(0.0, 0.0);
            for x1 in 0..rows {
                for x2 in 0..cols {
                    let phase = -2.0 * std::f64::consts::PI
                        * (k1 as f64 * x1 as f64 / rows as f64
                            + k2 as f64 * x2 as f64 / cols as f64);
                    acc += image.get(x1, x2) * cis(phase);
                }
            }
            out.push(acc);
        }
    }
    out
}

/// Pseudo-polar forward straight from the node sums.
pub fn direct_ppfft(image: &Image, grid: &PPGrid) -> PPArray {
    ewt_core::pseudopolar::ppfft_direct(image, grid).unwrap()
}

pub fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

pub fn rel_l2(a: &Image, b: &Image) -> f64 {
    let num: f64 = a
        .pixels()
        .iter()
        .zip(b.pixels())
        .map(|(x, y)| (x - y) * (x - y))
        .sum();
    (num / a.energy()).sqrt()
}
