//! Minimal in-place radix-2 FFT used by the spectral Burgers path.
//!
//! `rustfft` needs `std` (runtime CPU dispatch), so this crate carries its own
//! iterative Cooley–Tukey transform for the power-of-two grids the solver
//! accepts. Validated against a direct DFT in the tests.

use alloc::vec::Vec;

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Complex {
    pub re: f64,
    pub im: f64,
}

impl Complex {
    pub const ZERO: Complex = Complex { re: 0.0, im: 0.0 };

    #[inline]
    pub fn new(re: f64, im: f64) -> Self {
        Self { re, im }
    }

    #[inline]
    fn mul(self, o: Complex) -> Complex {
        Complex::new(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)
    }

    #[inline]
    fn add(self, o: Complex) -> Complex {
        Complex::new(self.re + o.re, self.im + o.im)
    }

    #[inline]
    fn sub(self, o: Complex) -> Complex {
        Complex::new(self.re - o.re, self.im - o.im)
    }

    #[inline]
    pub fn scale(self, s: f64) -> Complex {
        Complex::new(self.re * s, self.im * s)
    }
}

/// In-place forward DFT (sign convention e^{-i 2π jk/n}). `n` must be a power
/// of two.
pub(crate) fn fft(buf: &mut [Complex]) {
    transform(buf, -1.0);
}

/// In-place inverse DFT including the 1/n normalization.
pub(crate) fn ifft(buf: &mut [Complex]) {
    transform(buf, 1.0);
    let inv = 1.0 / buf.len() as f64;
    for c in buf.iter_mut() {
        *c = c.scale(inv);
    }
}

fn transform(buf: &mut [Complex], sign: f64) {
    let n = buf.len();
    assert!(n.is_power_of_two(), "fft length must be a power of two");
    // bit-reversal permutation
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
    let mut len = 2;
    while len <= n {
        let ang = sign * 2.0 * core::f64::consts::PI / len as f64;
        let wlen = Complex::new(ang.cos(), ang.sin());
        let mut i = 0;
        while i < n {
            let mut w = Complex::new(1.0, 0.0);
            for k in 0..len / 2 {
                let u = buf[i + k];
                let v = buf[i + k + len / 2].mul(w);
                buf[i + k] = u.add(v);
                buf[i + k + len / 2] = u.sub(v);
                w = w.mul(wlen);
            }
            i += len;
        }
        len <<= 1;
    }
}

/// Forward real-to-complex DFT of `xs` (full spectrum, length n).
pub(crate) fn fft_real(xs: &[f64]) -> Vec<Complex> {
    let mut buf: Vec<Complex> = xs.iter().map(|&x| Complex::new(x, 0.0)).collect();
    fft(&mut buf);
    buf
}

/// Inverse DFT returning the real parts.
pub(crate) fn ifft_real(spectrum: &[Complex]) -> Vec<f64> {
    let mut buf = spectrum.to_vec();
    ifft(&mut buf);
    buf.into_iter().map(|c| c.re).collect()
}

/// Signed Fourier wavenumber for bin `k` of an n-point grid on [0, 2π).
#[inline]
pub(crate) fn wavenumber(k: usize, n: usize) -> f64 {
    if k <= n / 2 {
        k as f64
    } else {
        k as f64 - n as f64
    }
}

#[cfg(test)]
mod tests {
    use alloc::vec;
    use super::*;

    fn dft_direct(xs: &[f64]) -> Vec<Complex> {
        let n = xs.len();
        (0..n)
            .map(|k| {
                let mut acc = Complex::ZERO;
                for (j, &x) in xs.iter().enumerate() {
                    let ang = -2.0 * core::f64::consts::PI * (j * k) as f64 / n as f64;
                    acc = acc.add(Complex::new(x * ang.cos(), x * ang.sin()));
                }
                acc
            })
            .collect()
    }

    #[test]
    fn matches_direct_dft() {
        let n = 64;
        let xs: Vec<f64> = (0..n)
            .map(|j| {
                let x = 2.0 * core::f64::consts::PI * j as f64 / n as f64;
                x.sin() + 0.3 * (3.0 * x).cos() + 0.01 * (7.0 * x).sin()
            })
            .collect();
        let fast = fft_real(&xs);
        let slow = dft_direct(&xs);
        for (a, b) in fast.iter().zip(&slow) {
            assert!((a.re - b.re).abs() < 1e-10);
            assert!((a.im - b.im).abs() < 1e-10);
        }
    }

    #[test]
    fn roundtrip_is_identity() {
        let xs: Vec<f64> = (0..128).map(|j| (j as f64 * 0.37).sin()).collect();
        let back = ifft_real(&fft_real(&xs));
        for (a, b) in xs.iter().zip(&back) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn wavenumbers_are_signed() {
        let n = 8;
        let ks: Vec<f64> = (0..n).map(|k| wavenumber(k, n)).collect();
        assert_eq!(ks, vec![0.0, 1.0, 2.0, 3.0, 4.0, -3.0, -2.0, -1.0]);
    }
}
