//! Flat grayscale morphology on 1D sequences.
//!
//! Only flat structuring windows are supported: dilation takes the sup and
//! erosion the inf of the input over a centered window of width `2h+1`,
//! clipped at the domain edges (no padding value, which keeps the
//! erode/dilate duality exact on finite domains).

use alloc::format;
use alloc::vec::Vec;

use crate::error::EwtError;
use crate::Result;

/// Flat structuring window of total width `2*half_width + 1` samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StructuringWindow {
    half_width: usize,
}

impl StructuringWindow {
    pub fn new(half_width: usize) -> Self {
        Self { half_width }
    }

    pub fn half_width(&self) -> usize {
        self.half_width
    }

    fn check_fits(&self, len: usize) -> Result<()> {
        if 2 * self.half_width + 1 > len {
            return Err(EwtError::InvalidArgument(format!(
                "window width {} exceeds signal length {len}",
                2 * self.half_width + 1
            )));
        }
        Ok(())
    }
}

fn scan(f: &[f64], h: usize, pick: impl Fn(f64, f64) -> f64) -> Vec<f64> {
    let len = f.len();
    (0..len)
        .map(|i| {
            let lo = i.saturating_sub(h);
            let hi = (i + h).min(len - 1);
            f[lo..=hi].iter().copied().fold(f[i], &pick)
        })
        .collect()
}

/// Pointwise sup of `f` over the window; never below `f`.
pub fn dilate(f: &[f64], w: StructuringWindow) -> Result<Vec<f64>> {
    w.check_fits(f.len())?;
    Ok(scan(f, w.half_width, f64::max))
}

/// Pointwise inf of `f` over the window; never above `f`.
pub fn erode(f: &[f64], w: StructuringWindow) -> Result<Vec<f64>> {
    w.check_fits(f.len())?;
    Ok(scan(f, w.half_width, f64::min))
}

/// Erosion then dilation; removes spikes narrower than the window.
pub fn opening(f: &[f64], w: StructuringWindow) -> Result<Vec<f64>> {
    let eroded = erode(f, w)?;
    dilate(&eroded, w)
}

/// Dilation then erosion; fills holes narrower than the window.
pub fn closing(f: &[f64], w: StructuringWindow) -> Result<Vec<f64>> {
    let dilated = dilate(f, w)?;
    erode(&dilated, w)
}
