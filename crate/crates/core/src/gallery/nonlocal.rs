use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use super::{params_of, require, GalleryOperator, GridKind, GridMeta, OperatorSpec, PredictedVerdicts, Verdict};
use crate::error::{Error, Result};
use crate::lattice::{DenseMatrix, OrderedVector, RankOneFrame};
use crate::numerics::rightmost_real_eigenvalue;

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
        if hi - lo <= 4.0 * f64::EPSILON * hi {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Smallest `k > 0` with `(k/2) tan(k/2) = 1`; the symmetric-coupling
/// eigenvalue is `-k²` with eigenfunction `cos(k(x − 1/2))`.
pub fn symmetric_root() -> f64 {
    2.0 * bisect(|t| t * libm::sin(t) - libm::cos(t), 0.0, PI / 2.0)
}

/// Smallest `k > 0` with `k sin(kπ) = β`; the thermostat eigenvalue is `-k²`
/// with eigenfunction `cos(k(π − x))`.
pub fn thermostat_root(beta: f64) -> Result<f64> {
    require(beta > 0.0 && beta < 1.0 / PI, "beta", "must lie in (0, 1/pi)")?;
    Ok(bisect(|k| k * libm::sin(k * PI) - beta, 0.0, 0.5))
}

/// Second differences on `[alpha, beta]` with boundary nodes included and the
/// coupled conditions `∂_ν f = −B (f(alpha), f(beta))ᵀ` imposed through ghost
/// points.
fn nonlocal_matrix(b: [[f64; 2]; 2], alpha: f64, beta: f64, n: usize) -> (DenseMatrix, Vec<f64>, f64) {
    let h = (beta - alpha) / (n - 1) as f64;
    let s = 1.0 / (h * h);
    let t = 2.0 / h;
    let mut a = DenseMatrix::zeros(n);
    for i in 1..n - 1 {
        a[(i, i - 1)] = s;
        a[(i, i)] = -2.0 * s;
        a[(i, i + 1)] = s;
    }
    let last = n - 1;
    a[(0, 0)] = -2.0 * s;
    a[(0, 1)] = 2.0 * s;
    a[(0, 0)] -= t * b[0][0];
    a[(0, last)] -= t * b[0][1];
    a[(last, last)] = -2.0 * s;
    a[(last, last - 1)] = 2.0 * s;
    a[(last, 0)] -= t * b[1][0];
    a[(last, last)] -= t * b[1][1];
    let nodes = (0..n).map(|i| alpha + i as f64 * h).collect();
    (a, nodes, h)
}

fn trapezoid(n: usize, h: f64) -> Vec<f64> {
    let mut w = vec![h; n];
    w[0] = h / 2.0;
    w[n - 1] = h / 2.0;
    w
}

/// General coupled boundary conditions; `λ₀` is located by probing from the
/// top of the Gershgorin interval.
pub fn build_nonlocal_laplacian(b: [[f64; 2]; 2], interval: (f64, f64), n: usize) -> Result<GalleryOperator> {
    require(n >= 8, "n", "need at least 8 grid points")?;
    let (alpha, beta) = interval;
    require(alpha.is_finite() && beta.is_finite() && alpha < beta, "interval", "need alpha < beta")?;
    require(b.iter().flatten().all(|x| x.is_finite()), "B", "entries must be finite")?;
    let (matrix, nodes, h) = nonlocal_matrix(b, alpha, beta, n);
    let lambda0 = if b.iter().flatten().all(|&x| x == 0.0) {
        0.0
    } else {
        rightmost_real_eigenvalue(&matrix)?.value
    };
    Ok(GalleryOperator {
        name: "nonlocal".to_string(),
        spec: OperatorSpec::Nonlocal { b, alpha, beta },
        frame: RankOneFrame::unit(trapezoid(n, h))?,
        symmetric: b[0][1] == b[1][0],
        matrix,
        lambda0,
        continuum_m1: 1,
        continuum_m2: 1,
        grid: GridMeta { kind: GridKind::Interval, n, spacing: vec![h], nodes },
        predicted: PredictedVerdicts::untested(),
        params: params_of(&[
            ("b11", b[0][0]),
            ("b12", b[0][1]),
            ("b21", b[1][0]),
            ("b22", b[1][1]),
            ("alpha", alpha),
            ("beta", beta),
        ]),
        declared_eigenvector: None,
        consistency_order: None,
    })
}

/// `B = [[1,1],[1,1]]` on `(0, 1)`.
pub fn build_nonlocal_symmetric(n: usize) -> Result<GalleryOperator> {
    require(n >= 8, "n", "need at least 8 grid points")?;
    let b = [[1.0, 1.0], [1.0, 1.0]];
    let (matrix, nodes, h) = nonlocal_matrix(b, 0.0, 1.0, n);
    let k = symmetric_root();
    let v: Vec<f64> = nodes.iter().map(|&x| libm::cos(k * (x - 0.5))).collect();
    Ok(GalleryOperator {
        name: "nonlocal_symmetric".to_string(),
        spec: OperatorSpec::NonlocalSymmetric,
        frame: RankOneFrame::unit(trapezoid(n, h))?,
        matrix,
        lambda0: -k * k,
        continuum_m1: 1,
        continuum_m2: 1,
        grid: GridMeta { kind: GridKind::Interval, n, spacing: vec![h], nodes },
        predicted: PredictedVerdicts::new(
            Verdict::Holds,
            Verdict::Holds,
            "spb < 0 is a simple eigenvalue with positive eigenfunction; the form-domain estimate gives \
             -1(x)1 <= Res(mu) <= 1(x)1, so both principles hold near spb",
            &["non-local boundary conditions, symmetric coupling B = [[1,1],[1,1]]"],
        ),
        params: params_of(&[]),
        declared_eigenvector: Some(OrderedVector::new(v)?),
        consistency_order: Some(1),
        symmetric: true,
    })
}

/// Thermostat coupling `B = [[0, β], [0, 0]]` on `(0, π)`, `β ∈ (0, 1/π)`.
pub fn build_thermostat(beta: f64, n: usize) -> Result<GalleryOperator> {
    let k = thermostat_root(beta)?;
    require(n >= 8, "n", "need at least 8 grid points")?;
    let (matrix, nodes, h) = nonlocal_matrix([[0.0, beta], [0.0, 0.0]], 0.0, PI, n);
    let v: Vec<f64> = nodes.iter().map(|&x| libm::cos(k * (PI - x))).collect();
    if v.iter().any(|&x| x <= 0.0) {
        return Err(Error::PreconditionFailed("thermostat eigenfunction is not positive".to_string()));
    }
    Ok(GalleryOperator {
        name: "thermostat".to_string(),
        spec: OperatorSpec::Thermostat { beta },
        frame: RankOneFrame::unit(trapezoid(n, h))?,
        matrix,
        lambda0: -k * k,
        continuum_m1: 1,
        continuum_m2: 1,
        grid: GridMeta { kind: GridKind::Interval, n, spacing: vec![h], nodes },
        predicted: PredictedVerdicts::new(
            Verdict::Holds,
            Verdict::Holds,
            "1(x)1 <= Res(mu) on (spb, 0] and a uniform anti-maximum principle left of spb, for beta < 1/pi",
            &["thermostat boundary conditions, B = [[0,beta],[0,0]]"],
        ),
        params: params_of(&[("beta", beta)]),
        declared_eigenvector: Some(OrderedVector::new(v)?),
        consistency_order: Some(1),
        symmetric: false,
    })
}
