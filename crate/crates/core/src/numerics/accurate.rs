//! Compensated dot products and a residual-refined resolvent for strongly
//! ill-conditioned shifts.

use alloc::vec::Vec;

use super::lu::shifted_factor;
use crate::error::Result;
use crate::lattice::DenseMatrix;

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let z = s - a;
    (s, (a - (s - z)) + (b - z))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, libm::fma(a, b, -p))
}

/// Accumulator with roughly twice the working precision.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    hi: f64,
    lo: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let (s, e) = two_sum(self.hi, x);
        self.hi = s;
        self.lo += e;
    }

    pub fn add_product(&mut self, a: f64, b: f64) {
        let (p, pe) = two_prod(a, b);
        let (s, se) = two_sum(self.hi, p);
        self.hi = s;
        self.lo += pe + se;
    }

    pub fn value(self) -> f64 {
        self.hi + self.lo
    }
}

pub fn dot2(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = CompensatedSum::default();
    for (x, y) in a.iter().zip(b) {
        acc.add_product(*x, *y);
    }
    acc.value()
}

pub fn mul_vec2(a: &DenseMatrix, x: &[f64]) -> Vec<f64> {
    (0..a.dim()).map(|i| dot2(a.row(i), x)).collect()
}

/// `(μ − A)⁻¹` improved by `sweeps` rounds of refinement with a compensated
/// residual `I − (μ − A)X`.
pub fn refined_resolvent(a: &DenseMatrix, mu: f64, sweeps: usize) -> Result<DenseMatrix> {
    let lu = shifted_factor(a, mu)?;
    let n = a.dim();
    let mut x = lu.inverse();
    for _ in 0..sweeps {
        let xt = x.transpose();
        let residual = DenseMatrix::from_fn(n, |i, j| {
            let mut acc = CompensatedSum::default();
            acc.add(if i == j { 1.0 } else { 0.0 });
            acc.add_product(-mu, x[(i, j)]);
            for (aik, xkj) in a.row(i).iter().zip(xt.row(j)) {
                acc.add_product(*aik, *xkj);
            }
            acc.value()
        });
        x = x.add(&lu.solve_matrix(&residual));
    }
    Ok(x)
}
