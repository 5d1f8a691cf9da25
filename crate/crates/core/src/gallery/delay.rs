use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use super::{params_of, require, GalleryOperator, GridKind, GridMeta, OperatorSpec, PredictedVerdicts, Verdict};
use crate::error::Result;
use crate::lattice::{DenseMatrix, OrderedVector, RankOneFrame};

/// `v(s) = 3 + s` on `[−2, −1]`, `1 − s` on `(−1, 0]`.
pub fn delay_left_eigenfunction(s: f64) -> f64 {
    if s <= -1.0 {
        3.0 + s
    } else {
        1.0 - s
    }
}

/// Delay equation on `ℂ × L¹(−2, 0)`: `A(x, f) = (⟨Φ, f⟩, f′)` with `f(0) = x`
/// and `Φ f = c(∫_{−2}^{−1} f − ∫_{−1}^{0} f + f(−2) − f(0))`.
///
/// Unknowns are `f(s_j)`, `s_j = −2 + jh`, `j < n`, followed by the slot
/// `x = f(0)`. Transport rows use upwind differences towards `s = 0`.
pub fn build_delay_operator(c: f64, n: usize) -> Result<GalleryOperator> {
    require(c > 0.0 && c.is_finite(), "c", "must be positive")?;
    require(n >= 16 && n % 2 == 0, "n", "must be even and at least 16")?;
    let h = 2.0 / n as f64;
    let dim = n + 1;
    let mut a = DenseMatrix::zeros(dim);
    let k = 1.0 / (2.0 * h);
    for j in 0..n - 1 {
        a[(j, j)] = -3.0 * k;
        a[(j, j + 1)] = 4.0 * k;
        a[(j, j + 2)] = -k;
    }
    a[(n - 1, n - 1)] = -1.0 / h;
    a[(n - 1, n)] = 1.0 / h;

    let half = n / 2;
    let mut row = vec![0.0; dim];
    row[0] = c * (1.0 + h / 2.0);
    for (j, r) in row.iter_mut().enumerate().take(n).skip(1) {
        *r = match j.cmp(&half) {
            core::cmp::Ordering::Less => c * h,
            core::cmp::Ordering::Equal => 0.0,
            core::cmp::Ordering::Greater => -c * h,
        };
    }
    let total: f64 = row[..n].iter().sum();
    row[n] = -total;
    a.row_mut(n).copy_from_slice(&row);

    let mut phi = vec![c; dim];
    phi[n] = 1.0;
    let mut weights = vec![h; dim];
    weights[0] = h / 2.0;
    weights[n] = 1.0;
    let nodes: Vec<f64> = (0..=n).map(|j| -2.0 + j as f64 * h).collect();
    Ok(GalleryOperator {
        name: "delay".to_string(),
        spec: OperatorSpec::Delay { c },
        matrix: a,
        frame: RankOneFrame::from_vecs(vec![1.0; dim], phi, weights)?,
        lambda0: 0.0,
        continuum_m1: 1,
        continuum_m2: 0,
        grid: GridMeta { kind: GridKind::DelayProduct, n, spacing: vec![h], nodes },
        predicted: PredictedVerdicts::new(
            Verdict::Holds,
            Verdict::Holds,
            "0 is a dominant simple eigenvalue with eigenvector (1, 1) and left eigenvector (1, c v); \
             Res(mu) >= u(x)phi right of 0 and Res(mu) <= -u(x)phi left of 0",
            &["delay differential equation with the kernel c(1[-2,-1] - 1[-1,0] + delta_-2 - delta_0)"],
        ),
        params: params_of(&[("c", c)]),
        declared_eigenvector: Some(OrderedVector::new(vec![1.0; dim])?),
        consistency_order: None,
        symmetric: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn annihilates_constants_exactly() {
        for n in [16, 18, 64, 100] {
            let op = build_delay_operator(core::f64::consts::PI / 16.0, n).unwrap();
            let y = op.matrix.mul_vec(&vec![1.0; n + 1]);
            assert!(y.iter().all(|&v| v == 0.0), "n = {n}: {y:?}");
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(build_delay_operator(0.0, 64).is_err());
        assert!(build_delay_operator(0.1, 15).is_err());
        assert!(build_delay_operator(0.1, 17).is_err());
    }
}
