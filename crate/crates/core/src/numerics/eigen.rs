use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::accurate::{dot2, mul_vec2};
use super::lu::{lu_factor, LuFactors};
use crate::error::{Error, Result};
use crate::lattice::{DenseMatrix, OrderedVector};

const MAX_ITERATIONS: usize = 500;
const STEP_TOLERANCE: f64 = 1e-12;
const RESIDUAL_TOLERANCE: f64 = 1e-8;
const STALL_LIMIT: usize = 8;
const STALL_STEP: f64 = 1e-6;
const SIMPLICITY_COSINE: f64 = 0.999;
const START_SEED: u64 = 0x6576_6c61_6200_0001;

/// Right and left eigenvectors of a real eigenvalue.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub value: f64,
    /// Largest-magnitude entry equal to `+1`.
    pub right_vector: OrderedVector,
    /// Scaled so that `⟨left, right⟩ = 1`.
    pub left_vector: OrderedVector,
    /// `‖A·v − λ·v‖_∞ / ‖A‖_∞`
    pub residual: f64,
}

/// Factors `A − σI` for `σ` at or next to `shift`, nudging the shift when it
/// hits the spectrum exactly.
pub(crate) fn factor_near(a: &DenseMatrix, shift: f64) -> Result<(LuFactors, f64)> {
    let shifted = |s: f64| {
        let mut m = a.clone();
        for i in 0..a.dim() {
            m[(i, i)] -= s;
        }
        m
    };
    match lu_factor(&shifted(shift)) {
        Ok(lu) => return Ok((lu, shift)),
        Err(Error::SingularMatrix { .. }) => {}
        Err(e) => return Err(e),
    }
    let scale = shift.abs().max(1.0);
    let mut delta = 1e-8 * scale;
    for _ in 0..9 {
        let s = shift + delta;
        if let Ok(lu) = lu_factor(&shifted(s)) {
            return Ok((lu, s));
        }
        delta *= 10.0;
    }
    Err(Error::NoConvergence { iterations: 0 })
}

fn normalize_signed_max(x: &mut [f64]) -> bool {
    let mut k = 0;
    for i in 1..x.len() {
        if x[i].abs() > x[k].abs() {
            k = i;
        }
    }
    let p = x[k];
    if p == 0.0 || !p.is_finite() {
        return false;
    }
    for v in x.iter_mut() {
        *v /= p;
    }
    true
}

fn iterate(solve: impl Fn(&[f64]) -> Vec<f64>, start: &[f64]) -> Result<Vec<f64>> {
    let mut x = start.to_vec();
    if !normalize_signed_max(&mut x) {
        return Err(Error::NoConvergence { iterations: 0 });
    }
    let mut best = f64::INFINITY;
    let mut stalled = 0;
    for it in 1..=MAX_ITERATIONS {
        let mut y = solve(&x);
        if !normalize_signed_max(&mut y) {
            return Err(Error::NoConvergence { iterations: it });
        }
        let step = x.iter().zip(&y).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        x = y;
        if step <= STEP_TOLERANCE {
            return Ok(x);
        }
        // Rounding noise floor reached; the residual test decides.
        if step < 0.5 * best {
            best = step;
            stalled = 0;
        } else {
            stalled += 1;
            if stalled >= STALL_LIMIT && best <= STALL_STEP {
                return Ok(x);
            }
        }
    }
    Err(Error::NoConvergence { iterations: MAX_ITERATIONS })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Inverse iteration around `shift` for the right and left eigenvectors,
/// with a two-start simplicity check.
pub fn eigenpair_near(a: &DenseMatrix, shift: f64) -> Result<EigenPair> {
    if !shift.is_finite() {
        return Err(Error::InvalidParameter { name: "shift", reason: "not finite".into() });
    }
    let n = a.dim();
    let (lu, _) = factor_near(a, shift)?;
    let mut rng = ChaCha8Rng::seed_from_u64(START_SEED);
    let start: Vec<f64> = (0..n).map(|_| 0.5 + rng.random::<f64>()).collect();
    let mut v = iterate(|x| lu.solve(x), &start)?;

    if n > 1 {
        let mut other: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
        let c = dot(&other, &start) / dot(&start, &start);
        for (o, s) in other.iter_mut().zip(&start) {
            *o -= c * s;
        }
        let w = iterate(|x| lu.solve(x), &other)?;
        let cosine = dot(&v, &w).abs() / libm::sqrt(dot(&v, &v) * dot(&w, &w));
        if cosine < SIMPLICITY_COSINE {
            return Err(Error::DegenerateEigenvalue { shift, cosine });
        }
    }

    let mut psi = iterate(|x| lu.solve_transpose(x), &start)?;
    let av = mul_vec2(a, &v);
    let overlap = dot2(&psi, &v);
    if overlap == 0.0 || !overlap.is_finite() {
        return Err(Error::DegenerateEigenvalue { shift, cosine: 0.0 });
    }
    let value = dot2(&psi, &av) / overlap;
    normalize_signed_max(&mut v);
    let av = a.mul_vec(&v);
    let overlap = dot(&psi, &v);
    for p in psi.iter_mut() {
        *p /= overlap;
    }
    let norm = a.inf_norm().max(f64::MIN_POSITIVE);
    let residual = av
        .iter()
        .zip(&v)
        .fold(0.0f64, |m, (x, y)| m.max((x - value * y).abs()))
        / norm;
    if !(residual <= RESIDUAL_TOLERANCE) {
        return Err(Error::NoConvergence { iterations: MAX_ITERATIONS });
    }
    Ok(EigenPair {
        value,
        right_vector: OrderedVector::new(v)?,
        left_vector: OrderedVector::new(psi)?,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_pair() {
        let a = DenseMatrix::diagonal(&[5.0, 1.0]);
        let p = eigenpair_near(&a, 0.9).unwrap();
        assert!((p.value - 1.0).abs() < 1e-14);
        assert!(p.right_vector[0].abs() < 1e-12);
        assert_eq!(p.right_vector[1], 1.0);
        assert!((p.left_vector[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn exact_shift_is_nudged() {
        let a = DenseMatrix::diagonal(&[0.0, -4.0, -9.0]);
        let p = eigenpair_near(&a, 0.0).unwrap();
        assert!(p.value.abs() < 1e-14);
        assert_eq!(p.right_vector.as_slice()[0], 1.0);
    }

    #[test]
    fn nonsymmetric_left_vector() {
        let a = DenseMatrix::from_rows(&[[-1.0, 1.0], [0.0, -3.0]]).unwrap();
        let p = eigenpair_near(&a, -1.2).unwrap();
        assert!((p.value + 1.0).abs() < 1e-12);
        let lt = a.vec_mul(p.left_vector.as_slice());
        for (x, y) in lt.iter().zip(p.left_vector.as_slice()) {
            assert!((x - p.value * y).abs() < 1e-10);
        }
        assert!((dot(p.left_vector.as_slice(), p.right_vector.as_slice()) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn repeated_eigenvalue_is_degenerate() {
        let a = DenseMatrix::diagonal(&[1.0, 1.0, -2.0]);
        assert!(matches!(eigenpair_near(&a, 0.9), Err(Error::DegenerateEigenvalue { .. })));
    }

    #[test]
    fn rotation_does_not_converge() {
        let a = DenseMatrix::from_rows(&[[0.0, 1.0], [-1.0, 0.0]]).unwrap();
        assert!(matches!(eigenpair_near(&a, 0.0), Err(Error::NoConvergence { .. })));
    }
}
