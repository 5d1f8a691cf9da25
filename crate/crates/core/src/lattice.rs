//! Finite-dimensional lattice primitives: entrywise order, gauge and AL norms,
//! and rank-1 comparison margins.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use crate::error::{Error, Result};

/// A finite real vector with at least one entry.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderedVector {
    entries: Vec<f64>,
}

impl OrderedVector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidVector("empty vector"));
        }
        if entries.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidVector("non-finite entry"));
        }
        Ok(Self { entries })
    }

    pub fn constant(n: usize, value: f64) -> Result<Self> {
        Self::new(vec![value; n])
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.entries
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.entries
    }

    pub fn is_strictly_positive(&self) -> bool {
        self.entries.iter().all(|&x| x > 0.0)
    }
}

impl Index<usize> for OrderedVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.entries[i]
    }
}

/// The comparison frame `u ⊗ φ` together with the quadrature weights of the
/// discrete duality `⟨φ, f⟩ = Σ w_j φ_j f_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct RankOneFrame {
    u: OrderedVector,
    phi: OrderedVector,
    weights: OrderedVector,
}

impl RankOneFrame {
    pub fn new(u: OrderedVector, phi: OrderedVector, weights: OrderedVector) -> Result<Self> {
        let n = u.len();
        for v in [&phi, &weights] {
            if v.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: v.len() });
            }
        }
        if !u.is_strictly_positive() {
            return Err(Error::InvalidVector("u must be strictly positive"));
        }
        if !phi.is_strictly_positive() {
            return Err(Error::InvalidVector("phi must be strictly positive"));
        }
        if !weights.is_strictly_positive() {
            return Err(Error::InvalidVector("weights must be strictly positive"));
        }
        Ok(Self { u, phi, weights })
    }

    pub fn from_vecs(u: Vec<f64>, phi: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        Self::new(OrderedVector::new(u)?, OrderedVector::new(phi)?, OrderedVector::new(weights)?)
    }

    /// `u = φ = 1` with the given weights.
    pub fn unit(weights: Vec<f64>) -> Result<Self> {
        let n = weights.len();
        Self::from_vecs(vec![1.0; n], vec![1.0; n], weights)
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn u(&self) -> &OrderedVector {
        &self.u
    }

    pub fn phi(&self) -> &OrderedVector {
        &self.phi
    }

    pub fn weights(&self) -> &OrderedVector {
        &self.weights
    }

    /// Denominator `u_i φ_j w_j` of the margin ratios.
    #[inline]
    pub fn scale(&self, i: usize, j: usize) -> f64 {
        self.u[i] * self.phi[j] * self.weights[j]
    }

    /// Frame with `u` scaled by `alpha` and `φ` by `beta`.
    pub fn rescaled(&self, alpha: f64, beta: f64) -> Result<Self> {
        Self::from_vecs(
            self.u.as_slice().iter().map(|x| alpha * x).collect(),
            self.phi.as_slice().iter().map(|x| beta * x).collect(),
            self.weights.as_slice().to_vec(),
        )
    }

    /// `‖u‖_∞ · Σ_j w_j φ_j`, the norm of the embedding `E_u → E^φ`.
    pub fn embedding_constant(&self) -> f64 {
        let umax = self.u.as_slice().iter().fold(0.0f64, |m, &x| m.max(x));
        let mass: f64 = self
            .phi
            .as_slice()
            .iter()
            .zip(self.weights.as_slice())
            .map(|(p, w)| p * w)
            .sum();
        umax * mass
    }
}

/// Square real matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn diagonal(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, &x) in d.iter().enumerate() {
            m[(i, i)] = x;
        }
        m
    }

    pub fn from_row_major(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, found: data.len() });
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidMatrix("non-finite entry"));
        }
        Ok(Self { n, data })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for r in rows {
            let r = r.as_ref();
            if r.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: r.len() });
            }
            data.extend_from_slice(r);
        }
        Self::from_row_major(n, data)
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.n).map(|i| self[(i, j)]).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)])
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        Self { n: self.n, data: self.data.iter().map(|x| alpha * x).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.n, other.n);
        Self {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        debug_assert_eq!(self.n, other.n);
        Self {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    /// `self + alpha * other`
    pub fn axpy(&self, alpha: f64, other: &Self) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + alpha * b).collect(),
        }
    }

    /// `mu * I - self`
    pub fn shifted(&self, mu: f64) -> Self {
        let mut m = self.scaled(-1.0);
        for i in 0..self.n {
            m[(i, i)] += mu;
        }
        m
    }

    pub fn matmul(&self, other: &Self) -> Self {
        let n = self.n;
        debug_assert_eq!(n, other.n);
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            let o = &mut out[i * n..(i + 1) * n];
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == 0.0 {
                    continue;
                }
                let b = &other.data[k * n..(k + 1) * n];
                for (x, y) in o.iter_mut().zip(b) {
                    *x += a * y;
                }
            }
        }
        Self { n, data: out }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(self.n, x.len());
        (0..self.n)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `xᵀ · self`
    pub fn vec_mul(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        for (i, &xi) in x.iter().enumerate() {
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                *o += xi * a;
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::identity(self.n);
        for _ in 0..k {
            out = out.matmul(self);
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, x| m.max(x.abs()))
    }

    /// Maximum absolute row sum, the `ℓ^∞ → ℓ^∞` operator norm.
    pub fn inf_norm(&self) -> f64 {
        (0..self.n)
            .map(|i| self.row(i).iter().map(|x| x.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Maximum absolute column sum.
    pub fn one_norm(&self) -> f64 {
        let mut sums = vec![0.0; self.n];
        for i in 0..self.n {
            for (s, a) in sums.iter_mut().zip(self.row(i)) {
                *s += a.abs();
            }
        }
        sums.into_iter().fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        libm::sqrt(self.data.iter().map(|x| x * x).sum())
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = f64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

/// Extreme entrywise ratios `T_ij / (u_i φ_j w_j)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarginReport {
    pub lower_margin: f64,
    pub upper_margin: f64,
    pub two_sided_constant: f64,
    pub argmin_index: (usize, usize),
    pub argmax_index: (usize, usize),
}

impl MarginReport {
    /// `T ⪰ u⊗φ`
    pub fn dominates_from_below(&self) -> bool {
        self.lower_margin > 0.0
    }

    /// `T ⪯ -u⊗φ`
    pub fn dominated_from_above(&self) -> bool {
        self.upper_margin < 0.0
    }
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

pub fn rank_one_matrix(frame: &RankOneFrame) -> DenseMatrix {
    DenseMatrix::from_fn(frame.len(), |i, j| frame.scale(i, j))
}

pub fn margins(t: &DenseMatrix, frame: &RankOneFrame) -> Result<MarginReport> {
    let n = t.dim();
    check_dim(frame.len(), n)?;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut amin = (0, 0);
    let mut amax = (0, 0);
    for i in 0..n {
        let row = t.row(i);
        for (j, &x) in row.iter().enumerate() {
            let r = x / frame.scale(i, j);
            if r < lo {
                lo = r;
                amin = (i, j);
            }
            if r > hi {
                hi = r;
                amax = (i, j);
            }
        }
    }
    Ok(MarginReport {
        lower_margin: lo,
        upper_margin: hi,
        two_sided_constant: lo.abs().max(hi.abs()),
        argmin_index: amin,
        argmax_index: amax,
    })
}

/// Norm of `T : (ℝⁿ, ‖·‖_φ) → (ℝⁿ, ‖·‖_u)`.
pub fn phi_to_u_norm(t: &DenseMatrix, frame: &RankOneFrame) -> Result<f64> {
    let n = t.dim();
    check_dim(frame.len(), n)?;
    let mut best = 0.0f64;
    for i in 0..n {
        for (j, &x) in t.row(i).iter().enumerate() {
            best = best.max(x.abs() / frame.scale(i, j));
        }
    }
    Ok(best)
}

pub fn gauge_norm(x: &OrderedVector, u: &OrderedVector) -> Result<f64> {
    check_dim(u.len(), x.len())?;
    if !u.is_strictly_positive() {
        return Err(Error::InvalidVector("u must be strictly positive"));
    }
    Ok(x
        .as_slice()
        .iter()
        .zip(u.as_slice())
        .fold(0.0f64, |m, (a, b)| m.max(a.abs() / b)))
}

pub fn al_norm(x: &OrderedVector, frame: &RankOneFrame) -> Result<f64> {
    check_dim(frame.len(), x.len())?;
    Ok(x
        .as_slice()
        .iter()
        .zip(frame.phi().as_slice())
        .zip(frame.weights().as_slice())
        .map(|((a, p), w)| w * p * a.abs())
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ones(n: usize) -> RankOneFrame {
        RankOneFrame::unit(vec![1.0; n]).unwrap()
    }

    #[test]
    fn rank_one_examples() {
        let m = rank_one_matrix(&ones(2));
        assert_eq!(m.as_slice(), &[1.0, 1.0, 1.0, 1.0]);
        let f = RankOneFrame::from_vecs(vec![2.0, 1.0], vec![1.0, 3.0], vec![1.0, 1.0]).unwrap();
        assert_eq!(rank_one_matrix(&f).as_slice(), &[2.0, 6.0, 1.0, 3.0]);
        let f = RankOneFrame::unit(vec![0.5, 0.5]).unwrap();
        assert_eq!(rank_one_matrix(&f).as_slice(), &[0.5; 4]);
    }

    #[test]
    fn rank_one_applies_duality() {
        let f = RankOneFrame::from_vecs(vec![2.0, 1.0, 0.5], vec![1.0, 3.0, 2.0], vec![0.2, 0.3, 0.5])
            .unwrap();
        let x = [1.0, -2.0, 4.0];
        let pairing: f64 = (0..3).map(|j| f.weights()[j] * f.phi()[j] * x[j]).sum();
        let y = rank_one_matrix(&f).mul_vec(&x);
        for i in 0..3 {
            assert!((y[i] - pairing * f.u()[i]).abs() < 1e-14);
        }
    }

    #[test]
    fn margin_examples() {
        let r = margins(&DenseMatrix::identity(2), &ones(2)).unwrap();
        assert_eq!((r.lower_margin, r.upper_margin, r.two_sided_constant), (0.0, 1.0, 1.0));

        let f = RankOneFrame::from_vecs(vec![2.0, 1.0], vec![1.0, 3.0], vec![0.5, 0.25]).unwrap();
        let r = margins(&rank_one_matrix(&f), &f).unwrap();
        assert_eq!((r.lower_margin, r.upper_margin), (1.0, 1.0));

        let t = DenseMatrix::from_rows(&[[-1.0, -2.0], [-3.0, -4.0]]).unwrap();
        let r = margins(&t, &ones(2)).unwrap();
        assert_eq!(r.upper_margin, -1.0);
        assert!(r.dominated_from_above());
        assert_eq!(r.argmax_index, (0, 0));
        assert_eq!(r.argmin_index, (1, 1));
    }

    #[test]
    fn norm_examples() {
        let t = DenseMatrix::from_rows(&[[0.0, 5.0], [0.0, 0.0]]).unwrap();
        assert_eq!(phi_to_u_norm(&t, &ones(2)).unwrap(), 5.0);
        assert_eq!(phi_to_u_norm(&DenseMatrix::zeros(3), &ones(3)).unwrap(), 0.0);

        let u = OrderedVector::new(vec![1.0, 2.0]).unwrap();
        let x = OrderedVector::new(vec![3.0, -1.0]).unwrap();
        assert_eq!(gauge_norm(&x, &u).unwrap(), 3.0);
        assert_eq!(gauge_norm(&u, &u).unwrap(), 1.0);

        let f = RankOneFrame::unit(vec![0.5, 0.5]).unwrap();
        let x = OrderedVector::new(vec![1.0, -2.0]).unwrap();
        assert_eq!(al_norm(&x, &f).unwrap(), 1.5);
        assert_eq!(al_norm(&OrderedVector::constant(2, 1.0).unwrap(), &ones(2)).unwrap(), 2.0);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(OrderedVector::new(vec![]).is_err());
        assert!(OrderedVector::new(vec![f64::NAN]).is_err());
        assert!(RankOneFrame::from_vecs(vec![1.0, 0.0], vec![1.0, 1.0], vec![1.0, 1.0]).is_err());
        assert!(RankOneFrame::from_vecs(vec![1.0], vec![1.0, 1.0], vec![1.0, 1.0]).is_err());
        assert!(matches!(
            margins(&DenseMatrix::identity(3), &ones(2)),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(DenseMatrix::from_rows(&[[1.0, f64::INFINITY], [0.0, 0.0]]).is_err());
    }
}
