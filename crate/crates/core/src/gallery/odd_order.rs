use alloc::string::ToString;
use alloc::vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use super::{params_of, require, GalleryOperator, GridKind, GridMeta, OperatorSpec, PredictedVerdicts, Verdict};
use crate::error::Result;
use crate::lattice::{OrderedVector, RankOneFrame};
use crate::numerics::real_dft_multiplier_matrix;

/// `k ↦ (2πik)^{2ℓ+1}`
pub fn odd_order_symbol(ell: u32) -> impl Fn(i64) -> Complex64 {
    move |k| {
        let w = libm::pow(2.0 * PI * k as f64, f64::from(2 * ell + 1));
        let sign = if ell % 2 == 0 { 1.0 } else { -1.0 };
        Complex64::new(0.0, sign * w)
    }
}

/// Fourier-spectral `d^{2ℓ+1}/dx^{2ℓ+1}` on the periodic unit interval.
pub fn build_odd_order(ell: u32, n: usize) -> Result<GalleryOperator> {
    require(n % 2 == 1, "n", "must be odd")?;
    require(n >= 2 * (ell as usize + 2) + 1, "n", "too small for this order")?;
    let matrix = real_dft_multiplier_matrix(n, odd_order_symbol(ell))?;
    let h = 1.0 / n as f64;
    let notes = if ell == 0 {
        "Res(mu) >= 1(x)1 for every mu > 0 and Res(mu) <= -1(x)1 for every mu < 0 (shift group)"
    } else {
        "both principles hold near 0 although the generated group is not eventually positive"
    };
    Ok(GalleryOperator {
        name: "odd_order".to_string(),
        spec: OperatorSpec::OddOrder { ell },
        matrix,
        frame: RankOneFrame::unit(vec![h; n])?,
        lambda0: 0.0,
        continuum_m1: 1,
        continuum_m2: 1,
        grid: GridMeta {
            kind: GridKind::Fourier,
            n,
            spacing: vec![h],
            nodes: (0..n).map(|j| j as f64 * h).collect(),
        },
        predicted: PredictedVerdicts::new(
            Verdict::Holds,
            Verdict::Holds,
            notes,
            &["periodic odd-order operators"],
        ),
        params: params_of(&[("ell", f64::from(ell))]),
        declared_eigenvector: Some(OrderedVector::new(vec![1.0; n])?),
        consistency_order: None,
        symmetric: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symbol_signs() {
        let s = odd_order_symbol(0);
        assert!((s(1).im - 2.0 * PI).abs() < 1e-12);
        let s = odd_order_symbol(1);
        assert!((s(1).im + libm::pow(2.0 * PI, 3.0)).abs() < 1e-9);
        assert_eq!(s(-2), s(2).conj());
    }

    #[test]
    fn rejects_even_or_small_n() {
        assert!(build_odd_order(1, 64).is_err());
        assert!(build_odd_order(2, 7).is_err());
        assert!(build_odd_order(2, 9).is_ok());
    }

    #[test]
    fn antisymmetric() {
        for ell in 0..3 {
            let op = build_odd_order(ell, 31).unwrap();
            assert_eq!(op.matrix, op.matrix.transpose().scaled(-1.0));
        }
    }
}
