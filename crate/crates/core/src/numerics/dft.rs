//! Fourier multipliers on the uniform grid `x_j = j/n` of `[0, 1)`, `n` odd.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::DenseMatrix;

const SYMMETRY_TOLERANCE: f64 = 1e-12;

fn half_width(n: usize) -> Result<i64> {
    if n == 0 || n % 2 == 0 {
        return Err(Error::InvalidParameter { name: "n", reason: "must be odd".into() });
    }
    Ok(((n - 1) / 2) as i64)
}

/// Samples the symbol on `0..=m` after checking `s(−k) = conj(s(k))`.
fn sample_symbol(n: usize, symbol: &impl Fn(i64) -> Complex64) -> Result<Vec<Complex64>> {
    let m = half_width(n)?;
    let vals: Vec<Complex64> = (0..=m).map(symbol).collect();
    let scale = vals.iter().fold(0.0f64, |s, z| s.max(z.norm()));
    let tol = SYMMETRY_TOLERANCE * scale.max(f64::MIN_POSITIVE);
    if !(vals[0].im.abs() <= tol) {
        return Err(Error::SymbolNotConjugateSymmetric { frequency: 0 });
    }
    for k in 1..=m {
        let neg = symbol(-k);
        if !((neg - vals[k as usize].conj()).norm() <= tol) {
            return Err(Error::SymbolNotConjugateSymmetric { frequency: k });
        }
    }
    Ok(vals)
}

fn angle(k: i64, d: i64, n: usize) -> f64 {
    let r = (k * d).rem_euclid(n as i64);
    2.0 * PI * r as f64 / n as f64
}

/// Real circulant matrix of the multiplier `f̂(k) ↦ s(k) f̂(k)`.
///
/// Even and odd parts of the convolution kernel are accumulated separately,
/// so purely imaginary symbols give exactly antisymmetric matrices.
pub fn real_dft_multiplier_matrix(n: usize, symbol: impl Fn(i64) -> Complex64) -> Result<DenseMatrix> {
    let vals = sample_symbol(n, &symbol)?;
    let m = vals.len() - 1;
    let nf = n as f64;
    let mut c = vec![0.0; n];
    c[0] = vals.iter().enumerate().map(|(k, z)| if k == 0 { z.re } else { 2.0 * z.re }).sum::<f64>() / nf;
    for d in 1..=m {
        let mut even = vals[0].re;
        let mut odd = 0.0;
        for (k, z) in vals.iter().enumerate().skip(1) {
            let t = angle(k as i64, d as i64, n);
            even += 2.0 * z.re * libm::cos(t);
            odd -= 2.0 * z.im * libm::sin(t);
        }
        even /= nf;
        odd /= nf;
        c[d] = even + odd;
        c[n - d] = even - odd;
    }
    Ok(DenseMatrix::from_fn(n, |i, j| c[(i + n - j) % n]))
}

/// Applies the multiplier `g` to grid values `f` by direct DFT.
pub fn apply_multiplier(f: &[f64], g: impl Fn(i64) -> Complex64) -> Result<Vec<f64>> {
    let n = f.len();
    let m = half_width(n)?;
    let coeffs: Vec<(i64, Complex64)> = (-m..=m)
        .map(|k| {
            let mut s = Complex64::new(0.0, 0.0);
            for (j, &x) in f.iter().enumerate() {
                s += Complex64::from_polar(x, -angle(k, j as i64, n));
            }
            (k, s * g(k))
        })
        .collect();
    Ok((0..n)
        .map(|j| {
            coeffs
                .iter()
                .map(|&(k, c)| (c * Complex64::from_polar(1.0, angle(k, j as i64, n))).re)
                .sum::<f64>()
                / n as f64
        })
        .collect())
}
