use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::lattice::DenseMatrix;

const PIVOT_TOLERANCE: f64 = 1e-13;

/// Partial-pivoting factorization `P·A = L·U` with unit lower `L` stored
/// below the diagonal of `lu`.
#[derive(Debug, Clone)]
pub struct LuFactors {
    lu: DenseMatrix,
    perm: Vec<usize>,
    parity: i8,
}

impl LuFactors {
    pub fn dim(&self) -> usize {
        self.lu.dim()
    }

    /// Row `i` of `P·A` is row `perm[i]` of `A`.
    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }

    pub fn parity(&self) -> i8 {
        self.parity
    }

    pub fn combined(&self) -> &DenseMatrix {
        &self.lu
    }

    pub fn lower(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.dim(), |i, j| match i.cmp(&j) {
            core::cmp::Ordering::Greater => self.lu[(i, j)],
            core::cmp::Ordering::Equal => 1.0,
            core::cmp::Ordering::Less => 0.0,
        })
    }

    pub fn upper(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.dim(), |i, j| if i <= j { self.lu[(i, j)] } else { 0.0 })
    }

    pub fn determinant(&self) -> f64 {
        (0..self.dim()).fold(f64::from(self.parity), |d, i| d * self.lu[(i, i)])
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let row = self.lu.row(i);
            let s: f64 = row[..i].iter().zip(&x[..i]).map(|(a, b)| a * b).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let row = self.lu.row(i);
            let s: f64 = row[i + 1..].iter().zip(&x[i + 1..]).map(|(a, b)| a * b).sum();
            x[i] = (x[i] - s) / row[i];
        }
        x
    }

    /// Solves `Aᵀ x = b`.
    pub fn solve_transpose(&self, b: &[f64]) -> Vec<f64> {
        let n = self.dim();
        // Uᵀ z = b
        let mut z = b.to_vec();
        for i in 0..n {
            z[i] /= self.lu[(i, i)];
            let zi = z[i];
            let row = self.lu.row(i);
            for (zk, a) in z[i + 1..].iter_mut().zip(&row[i + 1..]) {
                *zk -= a * zi;
            }
        }
        // Lᵀ y = z
        for i in (0..n).rev() {
            let yi = z[i];
            let row = self.lu.row(i);
            for (zk, a) in z[..i].iter_mut().zip(&row[..i]) {
                *zk -= a * yi;
            }
        }
        let mut x = vec![0.0; n];
        for (i, &p) in self.perm.iter().enumerate() {
            x[p] = z[i];
        }
        x
    }

    /// Solves `A X = B` for a square right-hand side.
    pub fn solve_matrix(&self, b: &DenseMatrix) -> DenseMatrix {
        let n = self.dim();
        let mut out = DenseMatrix::zeros(n);
        for j in 0..n {
            let x = self.solve(&b.column(j));
            for (i, v) in x.into_iter().enumerate() {
                out[(i, j)] = v;
            }
        }
        out
    }

    pub fn inverse(&self) -> DenseMatrix {
        self.solve_matrix(&DenseMatrix::identity(self.dim()))
    }
}

pub fn lu_factor(a: &DenseMatrix) -> Result<LuFactors> {
    let n = a.dim();
    if n == 0 {
        return Err(Error::InvalidMatrix("empty matrix"));
    }
    let col_scale: Vec<f64> = (0..n)
        .map(|j| (0..n).fold(0.0f64, |m, i| m.max(a[(i, j)].abs())))
        .collect();
    let mut lu = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut parity = 1i8;
    for k in 0..n {
        let mut p = k;
        let mut best = lu[(k, k)].abs();
        for i in k + 1..n {
            let v = lu[(i, k)].abs();
            if v > best {
                best = v;
                p = i;
            }
        }
        if best == 0.0 || best < PIVOT_TOLERANCE * col_scale[k] {
            return Err(Error::SingularMatrix { column: k, pivot: best });
        }
        if p != k {
            for j in 0..n {
                let t = lu[(k, j)];
                lu[(k, j)] = lu[(p, j)];
                lu[(p, j)] = t;
            }
            perm.swap(k, p);
            parity = -parity;
        }
        let pivot = lu[(k, k)];
        let upper = lu.row(k)[k + 1..].to_vec();
        for i in k + 1..n {
            let l = lu[(i, k)] / pivot;
            lu[(i, k)] = l;
            if l != 0.0 {
                let row = &mut lu.row_mut(i)[k + 1..];
                for (x, u) in row.iter_mut().zip(&upper) {
                    *x -= l * u;
                }
            }
        }
    }
    Ok(LuFactors { lu, perm, parity })
}

/// `(μI − A)^{-1}`.
pub fn resolvent(a: &DenseMatrix, mu: f64) -> Result<DenseMatrix> {
    shifted_factor(a, mu).map(|lu| lu.inverse())
}

/// LU factors of `μI − A`, with singularity reported as [`Error::MuInSpectrum`].
pub fn shifted_factor(a: &DenseMatrix, mu: f64) -> Result<LuFactors> {
    if !mu.is_finite() {
        return Err(Error::InvalidParameter { name: "mu", reason: "not finite".into() });
    }
    lu_factor(&a.shifted(mu)).map_err(|e| match e {
        Error::SingularMatrix { .. } => Error::MuInSpectrum { mu },
        other => other,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &DenseMatrix, b: &DenseMatrix, tol: f64) -> bool {
        a.sub(b).max_abs() <= tol
    }

    #[test]
    fn identity_factors_trivially() {
        let f = lu_factor(&DenseMatrix::identity(4)).unwrap();
        assert_eq!(f.lower(), DenseMatrix::identity(4));
        assert_eq!(f.upper(), DenseMatrix::identity(4));
        assert_eq!(f.permutation(), &[0, 1, 2, 3]);
        assert_eq!(f.parity(), 1);
    }

    #[test]
    fn permutation_matrix_swaps_once() {
        let a = DenseMatrix::from_rows(&[[0.0, 1.0], [1.0, 0.0]]).unwrap();
        let f = lu_factor(&a).unwrap();
        assert_eq!(f.parity(), -1);
        assert_eq!(f.permutation(), &[1, 0]);
        assert_eq!(f.determinant(), -1.0);
    }

    #[test]
    fn rank_one_is_singular() {
        let a = DenseMatrix::from_rows(&[[1.0, 1.0], [1.0, 1.0]]).unwrap();
        assert!(matches!(lu_factor(&a), Err(Error::SingularMatrix { .. })));
    }

    #[test]
    fn reconstruction_and_solves() {
        let a = DenseMatrix::from_rows(&[
            [2.0, -1.0, 0.5, 3.0],
            [4.0, 1.0, -2.0, 0.0],
            [-1.0, 3.0, 1.0, 1.0],
            [0.5, 0.0, 2.0, -1.0],
        ])
        .unwrap();
        let f = lu_factor(&a).unwrap();
        let pa = DenseMatrix::from_fn(4, |i, j| a[(f.permutation()[i], j)]);
        assert!(close(&pa, &f.lower().matmul(&f.upper()), 1e-12));
        let b = [1.0, -2.0, 0.5, 3.0];
        let x = f.solve(&b);
        let r = a.mul_vec(&x);
        assert!(r.iter().zip(&b).all(|(p, q)| (p - q).abs() < 1e-12));
        let y = f.solve_transpose(&b);
        let r = a.transpose().mul_vec(&y);
        assert!(r.iter().zip(&b).all(|(p, q)| (p - q).abs() < 1e-12));
        assert!(close(&a.matmul(&f.inverse()), &DenseMatrix::identity(4), 1e-12));
    }

    #[test]
    fn resolvent_examples() {
        let r = resolvent(&DenseMatrix::zeros(3), 2.0).unwrap();
        assert!(close(&r, &DenseMatrix::identity(3).scaled(0.5), 1e-15));
        let r = resolvent(&DenseMatrix::diagonal(&[-1.0, -3.0]), 0.0).unwrap();
        assert!(close(&r, &DenseMatrix::diagonal(&[1.0, 1.0 / 3.0]), 1e-15));
        assert_eq!(
            resolvent(&DenseMatrix::diagonal(&[-1.0, 2.0]), 2.0),
            Err(Error::MuInSpectrum { mu: 2.0 })
        );
    }
}
