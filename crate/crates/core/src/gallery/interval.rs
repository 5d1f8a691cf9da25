use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use super::{params_of, require, GalleryOperator, GridKind, GridMeta, OperatorSpec, PredictedVerdicts, Verdict};
use crate::error::Result;
use crate::lattice::{DenseMatrix, OrderedVector, RankOneFrame};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryCondition {
    Dirichlet,
    Neumann,
    Periodic,
}

impl BoundaryCondition {
    pub fn as_str(self) -> &'static str {
        match self {
            BoundaryCondition::Dirichlet => "dirichlet",
            BoundaryCondition::Neumann => "neumann",
            BoundaryCondition::Periodic => "periodic",
        }
    }
}

/// Three-point second difference on `(0, 1)`; returns the matrix, the node
/// coordinates and `h`.
pub fn interval_laplacian_matrix(bc: BoundaryCondition, n: usize) -> Result<(DenseMatrix, Vec<f64>, f64)> {
    require(n >= 3, "n", "need at least 3 grid points")?;
    let (h, nodes): (f64, Vec<f64>) = match bc {
        BoundaryCondition::Dirichlet => {
            let h = 1.0 / (n + 1) as f64;
            (h, (1..=n).map(|i| i as f64 * h).collect())
        }
        BoundaryCondition::Neumann => {
            let h = 1.0 / (n - 1) as f64;
            (h, (0..n).map(|i| i as f64 * h).collect())
        }
        BoundaryCondition::Periodic => {
            let h = 1.0 / n as f64;
            (h, (0..n).map(|i| i as f64 * h).collect())
        }
    };
    let s = 1.0 / (h * h);
    let mut a = DenseMatrix::zeros(n);
    for i in 0..n {
        a[(i, i)] = -2.0 * s;
        if i > 0 {
            a[(i, i - 1)] = s;
        }
        if i + 1 < n {
            a[(i, i + 1)] = s;
        }
    }
    match bc {
        BoundaryCondition::Dirichlet => {}
        BoundaryCondition::Neumann => {
            a[(0, 1)] = 2.0 * s;
            a[(n - 1, n - 2)] = 2.0 * s;
        }
        BoundaryCondition::Periodic => {
            a[(0, n - 1)] = s;
            a[(n - 1, 0)] = s;
        }
    }
    Ok((a, nodes, h))
}

pub fn build_interval_laplacian(bc: BoundaryCondition, n: usize) -> Result<GalleryOperator> {
    require(n >= 8, "n", "need at least 8 grid points")?;
    let (matrix, nodes, h) = interval_laplacian_matrix(bc, n)?;
    let (frame, lambda0, v, order, predicted) = match bc {
        BoundaryCondition::Dirichlet => {
            let s: Vec<f64> = nodes.iter().map(|&x| libm::sin(PI * x)).collect();
            let frame = RankOneFrame::from_vecs(s.clone(), s.clone(), vec![h; n])?;
            let predicted = PredictedVerdicts::new(
                Verdict::Holds,
                Verdict::Fails,
                "max holds near the spectral bound -pi^2; no uniform anti-maximum principle because the \
                 Green's function is not dominated by sin(pi x) sin(pi y) at the corners",
                &["interval Laplacian, Dirichlet conditions"],
            );
            (frame, -PI * PI, s, Some(2), predicted)
        }
        BoundaryCondition::Neumann => {
            let mut w = vec![h; n];
            w[0] = h / 2.0;
            w[n - 1] = h / 2.0;
            let predicted = PredictedVerdicts::new(
                Verdict::Holds,
                Verdict::Holds,
                "uniform anti-maximum principle Res(mu) <= -1(x)1 left of 0; the maximum principle holds since \
                 the resolvent is positive right of 0",
                &["interval Laplacian, Neumann conditions"],
            );
            (RankOneFrame::unit(w)?, 0.0, vec![1.0; n], None, predicted)
        }
        BoundaryCondition::Periodic => {
            let predicted = PredictedVerdicts::new(
                Verdict::Holds,
                Verdict::Holds,
                "uniform anti-maximum principle Res(mu) <= -1(x)1 left of 0; the maximum principle holds since \
                 the resolvent is positive right of 0",
                &["interval Laplacian, periodic conditions"],
            );
            (RankOneFrame::unit(vec![h; n])?, 0.0, vec![1.0; n], None, predicted)
        }
    };
    Ok(GalleryOperator {
        name: bc.as_str().to_string(),
        spec: OperatorSpec::Interval(bc),
        matrix,
        frame,
        lambda0,
        continuum_m1: 1,
        continuum_m2: 1,
        grid: GridMeta { kind: GridKind::Interval, n, spacing: vec![h], nodes },
        predicted,
        params: params_of(&[]),
        declared_eigenvector: Some(OrderedVector::new(v)?),
        consistency_order: order,
        symmetric: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dirichlet_three_points() {
        let (a, _, h) = interval_laplacian_matrix(BoundaryCondition::Dirichlet, 3).unwrap();
        assert_eq!(h, 0.25);
        let e = DenseMatrix::from_rows(&[[-2.0, 1.0, 0.0], [1.0, -2.0, 1.0], [0.0, 1.0, -2.0]])
            .unwrap()
            .scaled(16.0);
        assert_eq!(a, e);
    }

    #[test]
    fn small_meshes_rejected() {
        assert!(build_interval_laplacian(BoundaryCondition::Neumann, 7).is_err());
        assert!(interval_laplacian_matrix(BoundaryCondition::Neumann, 2).is_err());
    }

    #[test]
    fn neumann_and_periodic_annihilate_constants() {
        for bc in [BoundaryCondition::Neumann, BoundaryCondition::Periodic] {
            for n in [8, 33, 200] {
                let op = build_interval_laplacian(bc, n).unwrap();
                assert!(op.matrix.mul_vec(&vec![1.0; n]).iter().all(|&x| x == 0.0));
            }
        }
    }
}
