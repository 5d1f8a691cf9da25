use super::lu::lu_factor;
use crate::error::{Error, Result};
use crate::lattice::DenseMatrix;

const MAX_NORM: f64 = 1e4;
const THETA_13: f64 = 5.371_920_351_148_152;
const PADE_13: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];

/// `e^{tA}` by scaling and squaring around the degree-13 Padé approximant.
pub fn matrix_exponential(a: &DenseMatrix, t: f64) -> Result<DenseMatrix> {
    if !t.is_finite() {
        return Err(Error::InvalidParameter { name: "t", reason: "not finite".into() });
    }
    let n = a.dim();
    let ta = a.scaled(t);
    let norm = ta.inf_norm();
    if norm > MAX_NORM {
        return Err(Error::NormTooLarge { norm });
    }
    let one = ta.one_norm();
    let s = if one > THETA_13 { libm::ceil(libm::log2(one / THETA_13)) as i32 } else { 0 };
    let x = ta.scaled(libm::exp2(-f64::from(s)));
    let b = &PADE_13;
    let id = DenseMatrix::identity(n);
    let x2 = x.matmul(&x);
    let x4 = x2.matmul(&x2);
    let x6 = x4.matmul(&x2);
    let u_inner = x6.scaled(b[13]).axpy(b[11], &x4).axpy(b[9], &x2);
    let u_outer = x6
        .matmul(&u_inner)
        .axpy(b[7], &x6)
        .axpy(b[5], &x4)
        .axpy(b[3], &x2)
        .axpy(b[1], &id);
    let u = x.matmul(&u_outer);
    let v_inner = x6.scaled(b[12]).axpy(b[10], &x4).axpy(b[8], &x2);
    let v = x6
        .matmul(&v_inner)
        .axpy(b[6], &x6)
        .axpy(b[4], &x4)
        .axpy(b[2], &x2)
        .axpy(b[0], &id);
    let lu = lu_factor(&v.sub(&u))?;
    let mut r = lu.solve_matrix(&v.add(&u));
    for _ in 0..s {
        r = r.matmul(&r);
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::E;

    #[test]
    fn zero_gives_identity() {
        let r = matrix_exponential(&DenseMatrix::zeros(4), 3.0).unwrap();
        assert_eq!(r, DenseMatrix::identity(4));
    }

    #[test]
    fn diagonal() {
        let r = matrix_exponential(&DenseMatrix::diagonal(&[1.0, -1.0]), 1.0).unwrap();
        assert!((r[(0, 0)] - E).abs() < 1e-12);
        assert!((r[(1, 1)] - 1.0 / E).abs() < 1e-12);
        assert_eq!(r[(0, 1)], 0.0);
    }

    #[test]
    fn rotation_is_orthogonal() {
        let a = DenseMatrix::from_rows(&[[0.0, 2.0, -1.0], [-2.0, 0.0, 3.0], [1.0, -3.0, 0.0]]).unwrap();
        let r = matrix_exponential(&a, 7.0).unwrap();
        let d = r.transpose().matmul(&r).sub(&DenseMatrix::identity(3));
        assert!(d.max_abs() < 1e-10);
    }

    #[test]
    fn nilpotent_is_exact_polynomial() {
        let a = DenseMatrix::from_rows(&[[0.0, 1.0], [0.0, 0.0]]).unwrap();
        let r = matrix_exponential(&a, 2.5).unwrap();
        assert!((r[(0, 1)] - 2.5).abs() < 1e-13);
    }

    #[test]
    fn refuses_huge_norm() {
        let a = DenseMatrix::diagonal(&[2e4]);
        assert!(matches!(matrix_exponential(&a, 1.0), Err(Error::NormTooLarge { .. })));
    }
}
