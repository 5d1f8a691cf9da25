//! Locating real spectrum by probing the smallest singular value of `μI − A`.

use alloc::vec::Vec;

use super::eigen::{eigenpair_near, EigenPair};
use super::lu::{lu_factor, LuFactors};
use crate::error::{Error, Result};
use crate::lattice::DenseMatrix;

const SIGMA_ITERATIONS: usize = 16;
const RADIUS_RATIO: f64 = 1.25;
const SUBDIVISIONS: usize = 16;
const GOLDEN_ITERATIONS: usize = 80;
const REAL_DIP_DEPTH: f64 = 1e-8;

/// Estimate of `σ_min(M)` from power iteration on `(MᵀM)^{-1}`.
pub fn sigma_min_from_lu(lu: &LuFactors) -> f64 {
    let n = lu.dim();
    let mut x: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * libm::sin(i as f64 + 1.0)).collect();
    let mut growth = 0.0;
    for _ in 0..SIGMA_ITERATIONS {
        let norm = libm::sqrt(x.iter().map(|v| v * v).sum());
        if norm == 0.0 || !norm.is_finite() {
            return 0.0;
        }
        for v in x.iter_mut() {
            *v /= norm;
        }
        let y = lu.solve(&lu.solve_transpose(&x));
        growth = libm::sqrt(y.iter().map(|v| v * v).sum());
        if !growth.is_finite() {
            return 0.0;
        }
        x = y;
    }
    if growth == 0.0 {
        f64::INFINITY
    } else {
        1.0 / libm::sqrt(growth)
    }
}

/// `σ_min(μI − A)`, zero when the factorization reports singularity.
pub fn sigma_min(a: &DenseMatrix, mu: f64) -> f64 {
    match lu_factor(&a.shifted(mu)) {
        Ok(lu) => sigma_min_from_lu(&lu),
        Err(_) => 0.0,
    }
}

/// Gershgorin bounds `(bottom, top)` for the real parts of the spectrum.
pub fn gershgorin_interval(a: &DenseMatrix) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..a.dim() {
        let d = a[(i, i)];
        let off: f64 = a.row(i).iter().enumerate().filter(|&(j, _)| j != i).map(|(_, x)| x.abs()).sum();
        lo = lo.min(d - off);
        hi = hi.max(d + off);
    }
    (lo, hi)
}

/// Minimizes `f` on `[lo, hi]`, preferring the local minimum nearest to `lo`
/// when `from_lo` is set (nearest to `hi` otherwise).
fn refine_dip(f: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, from_lo: bool) -> (f64, f64) {
    for _ in 0..3 {
        let step = (hi - lo) / SUBDIVISIONS as f64;
        let xs: Vec<f64> = (0..=SUBDIVISIONS).map(|k| lo + step * k as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
        let order: Vec<usize> = if from_lo {
            (0..=SUBDIVISIONS).collect()
        } else {
            (0..=SUBDIVISIONS).rev().collect()
        };
        let mut pick = order[0];
        for w in order.windows(2) {
            if ys[w[1]] <= ys[w[0]] {
                pick = w[1];
            } else {
                break;
            }
        }
        if ys[pick] == 0.0 {
            return (xs[pick], 0.0);
        }
        lo = xs[pick.saturating_sub(1)];
        hi = xs[(pick + 1).min(SUBDIVISIONS)];
    }
    let g = 0.5 * (libm::sqrt(5.0) - 1.0);
    let mut c = hi - g * (hi - lo);
    let mut d = lo + g * (hi - lo);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..GOLDEN_ITERATIONS {
        if fc == 0.0 {
            return (c, 0.0);
        }
        if fd == 0.0 {
            return (d, 0.0);
        }
        if hi - lo <= 1e-13 * (1.0 + lo.abs().max(hi.abs())) {
            break;
        }
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - g * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + g * (hi - lo);
            fd = f(d);
        }
    }
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Walks `μ = origin + direction·r` over geometric radii `r ∈ [r_min, r_max]`
/// and returns the first local minimum of `σ_min` that is deep enough to be a
/// real eigenvalue.
/// `σ_min` below `NOISE_FLOOR·ε·‖A‖_∞` is roundoff and cannot locate a dip.
const NOISE_FLOOR: f64 = 1e3;

fn first_real_dip(a: &DenseMatrix, origin: f64, direction: f64, r_min: f64, r_max: f64) -> Option<f64> {
    if !(r_max > r_min) {
        return None;
    }
    let scale = a.inf_norm().max(1.0);
    let f = |mu: f64| sigma_min(a, mu);
    let at = |r: f64| origin + direction * r;
    let mut radii: Vec<f64> = Vec::new();
    let mut r = r_min;
    while r < r_max {
        radii.push(r);
        r *= RADIUS_RATIO;
    }
    radii.push(r_max);
    let mut sig: Vec<f64> = Vec::with_capacity(radii.len());
    for (k, &r) in radii.iter().enumerate() {
        let s = f(at(r));
        sig.push(s);
        if s == 0.0 {
            return Some(at(r));
        }
        let is_last = k + 1 == radii.len();
        let candidate = if k >= 2 && sig[k - 1] < sig[k - 2] && sig[k - 1] <= s {
            Some((k - 2, k))
        } else if is_last && k >= 1 && s < sig[k - 1] {
            Some((k - 1, k))
        } else {
            None
        };
        if let Some((i, j)) = candidate {
            let (mut lo, mut hi) = (at(radii[i]), at(radii[j]));
            if lo > hi {
                core::mem::swap(&mut lo, &mut hi);
            }
            let (mu, s) = refine_dip(&f, lo, hi, direction > 0.0);
            if s <= REAL_DIP_DEPTH * (scale + mu.abs()) {
                return Some(mu);
            }
        }
    }
    None
}

/// Gap estimate together with the nearest real eigenvalues found on each side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapEstimate {
    pub gap: f64,
    pub left: Option<f64>,
    pub right: Option<f64>,
}

pub fn gap_estimate(a: &DenseMatrix, lambda0: f64) -> GapEstimate {
    let (bottom, top) = gershgorin_interval(a);
    let noise = NOISE_FLOOR * f64::EPSILON * a.inf_norm();
    let r_min = (1e-4 * lambda0.abs().max(1.0)).max(noise);
    let right = first_real_dip(a, lambda0, 1.0, r_min, top - lambda0);
    let mut limit = lambda0 - bottom;
    if let Some(r) = right {
        limit = limit.min(r - lambda0);
    }
    let left = first_real_dip(a, lambda0, -1.0, r_min, limit);
    let gap = [left.map(|x| lambda0 - x), right.map(|x| x - lambda0)]
        .into_iter()
        .flatten()
        .fold(f64::INFINITY, f64::min);
    GapEstimate { gap, left, right }
}

/// Distance from `lambda0` to the nearest other real eigenvalue;
/// `f64::INFINITY` when none is found inside the Gershgorin interval.
pub fn spectral_gap(a: &DenseMatrix, lambda0: f64) -> f64 {
    gap_estimate(a, lambda0).gap
}

/// Largest real eigenvalue, located by walking down from the Gershgorin top.
pub fn rightmost_real_eigenvalue(a: &DenseMatrix) -> Result<EigenPair> {
    let (bottom, top) = gershgorin_interval(a);
    let origin = top + 1.0;
    let r_min = 1e-4 * origin.abs().max(1.0);
    let mut mu = first_real_dip(a, origin, -1.0, r_min, origin - bottom + 1.0)
        .ok_or(Error::NoConvergence { iterations: 0 })?;
    let mut pair = eigenpair_near(a, mu)?;
    // The coarse walk may land inside a cluster; climb to its right end.
    for _ in 0..a.dim() {
        mu = pair.value;
        let r_min = 1e-4 * mu.abs().max(1.0);
        match first_real_dip(a, mu, 1.0, r_min, origin - mu) {
            Some(next) if next > mu => {
                let p = eigenpair_near(a, next)?;
                if !(p.value > mu) {
                    break;
                }
                pair = p;
            }
            _ => break,
        }
    }
    Ok(pair)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigma_of_diagonal() {
        let a = DenseMatrix::diagonal(&[0.0, -4.0, 3.0]);
        assert!((sigma_min(&a, 1.0) - 1.0).abs() < 1e-6);
        assert_eq!(sigma_min(&a, 0.0), 0.0);
    }

    #[test]
    fn gap_of_diagonal() {
        let a = DenseMatrix::diagonal(&[0.0, -4.0]);
        let g = gap_estimate(&a, 0.0);
        assert!((g.gap - 4.0).abs() < 1e-6, "{g:?}");
        assert_eq!(g.right, None);
    }

    #[test]
    fn isolated_eigenvalue_has_infinite_gap() {
        let a = DenseMatrix::from_rows(&[[0.0, 0.0, 0.0], [0.0, -1.0, 5.0], [0.0, -5.0, -1.0]]).unwrap();
        assert_eq!(spectral_gap(&a, 0.0), f64::INFINITY);
    }

    #[test]
    fn rightmost_of_diagonal() {
        let a = DenseMatrix::diagonal(&[-3.0, -0.5, -7.0, -0.7]);
        let p = rightmost_real_eigenvalue(&a).unwrap();
        assert!((p.value + 0.5).abs() < 1e-12);
    }
}
