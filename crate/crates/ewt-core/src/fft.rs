//! Internal discrete Fourier engine.
//!
//! Forward transforms are unnormalized, inverses carry the `1/K` factor.
//! Power-of-two lengths go through an iterative radix-2 kernel; every other
//! length is evaluated with a Bluestein chirp-z transform whose convolution
//! runs on a padded radix-2 grid. The chirp-z path doubles as the fast
//! pseudo-polar kernel, so the chirp ratio is passed as an exact rational
//! `2*pi*num/den` and the quadratic phases are reduced modulo the chirp
//! period in integer arithmetic.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;

#[inline]
pub(crate) fn cis(angle: f64) -> Complex64 {
    Complex64::new(libm::cos(angle), libm::sin(angle))
}

/// In-place radix-2 transform. `sign = -1` forward, `+1` inverse (no 1/n).
fn fft_pow2(buf: &mut [Complex64], sign: f64) {
    let n = buf.len();
    debug_assert!(n.is_power_of_two());

    let mut j = 0usize;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            buf.swap(i, j);
        }
    }

    // One table of n/2 twiddles shared by every stage.
    let half_n = n / 2;
    let mut twiddle = Vec::with_capacity(half_n.max(1));
    for i in 0..half_n.max(1) {
        twiddle.push(cis(sign * 2.0 * PI * i as f64 / n as f64));
    }

    let mut len = 2;
    while len <= n {
        let half = len / 2;
        let stride = n / len;
        for start in (0..n).step_by(len) {
            for i in 0..half {
                let w = twiddle[i * stride];
                let u = buf[start + i];
                let v = buf[start + i + half] * w;
                buf[start + i] = u + v;
                buf[start + i + half] = u - v;
            }
        }
        len <<= 1;
    }
}

/// `exp(i*pi*num*t^2/den)` with the square reduced modulo `2*den`.
#[inline]
fn chirp_half(num: i64, den: u64, t: u64) -> Complex64 {
    let q = ((t as u128 * t as u128) % (2 * den as u128)) as i128;
    let a = (num as i128 * q) % (2 * den as i128);
    cis(PI * a as f64 / den as f64)
}

/// Chirp-z transform: `X_k = sum_n x_n exp(2*pi*i*num*n*k/den)` for
/// `k = 0..m`, via Bluestein's factorization `nk = (n^2+k^2-(k-n)^2)/2`.
pub(crate) fn czt(x: &[Complex64], m: usize, num: i64, den: u64) -> Vec<Complex64> {
    let len = x.len();
    if len == 0 || m == 0 {
        return vec![Complex64::new(0.0, 0.0); m];
    }
    let p = (len + m - 1).next_power_of_two();

    let mut a = vec![Complex64::new(0.0, 0.0); p];
    for (n, &v) in x.iter().enumerate() {
        a[n] = v * chirp_half(num, den, n as u64);
    }
    let mut b = vec![Complex64::new(0.0, 0.0); p];
    for t in 0..m {
        b[t] = chirp_half(-num, den, t as u64);
    }
    for t in 1..len {
        b[p - t] = chirp_half(-num, den, t as u64);
    }

    fft_pow2(&mut a, -1.0);
    fft_pow2(&mut b, -1.0);
    for (av, bv) in a.iter_mut().zip(b.iter()) {
        *av *= *bv;
    }
    fft_pow2(&mut a, 1.0);

    let scale = 1.0 / p as f64;
    (0..m)
        .map(|k| a[k] * scale * chirp_half(num, den, k as u64))
        .collect()
}

/// Unnormalized forward DFT of arbitrary length, in place.
pub(crate) fn fft_forward(buf: &mut Vec<Complex64>) {
    let n = buf.len();
    if n <= 1 {
        return;
    }
    if n.is_power_of_two() {
        fft_pow2(buf, -1.0);
    } else {
        *buf = czt(buf, n, -1, n as u64);
    }
}

/// Inverse DFT carrying the `1/n` factor, in place.
pub(crate) fn fft_inverse(buf: &mut Vec<Complex64>) {
    let n = buf.len();
    if n <= 1 {
        return;
    }
    for v in buf.iter_mut() {
        *v = v.conj();
    }
    fft_forward(buf);
    let s = 1.0 / n as f64;
    for v in buf.iter_mut() {
        *v = Complex64::new(v.re * s, -v.im * s);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn direct_dft(x: &[Complex64]) -> Vec<Complex64> {
        let n = x.len();
        (0..n)
            .map(|k| {
                let mut acc = Complex64::new(0.0, 0.0);
                for (t, &v) in x.iter().enumerate() {
                    acc += v * cis(-2.0 * PI * (k * t) as f64 / n as f64);
                }
                acc
            })
            .collect()
    }

    fn lcg_signal(n: usize, seed: u64) -> Vec<Complex64> {
        let mut state = seed;
        (0..n)
            .map(|_| {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let re = (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5;
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let im = (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5;
                Complex64::new(re, im)
            })
            .collect()
    }

    #[test]
    fn matches_direct_dft_on_mixed_lengths() {
        for &n in &[2usize, 3, 5, 8, 12, 16, 17, 31, 127] {
            let x = lcg_signal(n, 7 + n as u64);
            let mut fast = x.clone();
            fft_forward(&mut fast);
            let slow = direct_dft(&x);
            let scale: f64 = slow.iter().map(|v| v.norm()).fold(0.0, f64::max);
            for (a, b) in fast.iter().zip(slow.iter()) {
                assert!((a - b).norm() <= 1e-12 * scale.max(1.0), "len {n}");
            }
        }
    }

    #[test]
    fn round_trip_is_identity() {
        for &n in &[2usize, 7, 48, 127, 256] {
            let x = lcg_signal(n, n as u64);
            let mut buf = x.clone();
            fft_forward(&mut buf);
            fft_inverse(&mut buf);
            for (a, b) in buf.iter().zip(x.iter()) {
                assert!((a - b).norm() < 1e-12, "len {n}");
            }
        }
    }

    #[test]
    fn czt_evaluates_geometric_nodes() {
        // Compare against a direct evaluation of the same sum.
        let x = lcg_signal(9, 3);
        let (num, den) = (-5i64, 81u64);
        let fast = czt(&x, 13, num, den);
        for (k, fv) in fast.iter().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (n, &v) in x.iter().enumerate() {
                acc += v * cis(2.0 * PI * num as f64 * (n * k) as f64 / den as f64);
            }
            assert!((fv - acc).norm() < 1e-12);
        }
    }
}
