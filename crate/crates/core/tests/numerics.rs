use approx::assert_relative_eq;
use evlab_core::error::Error;
use evlab_core::lattice::DenseMatrix;
use evlab_core::numerics::*;
use num_complex::Complex64;
use proptest::prelude::*;

fn matrix(max_n: usize) -> impl Strategy<Value = DenseMatrix> {
    (1..=max_n).prop_flat_map(|n| {
        proptest::collection::vec(-5.0f64..5.0, n * n).prop_map(move |v| DenseMatrix::from_row_major(n, v).unwrap())
    })
}

proptest! {
    #[test]
    fn lu_reconstructs_permuted_matrix(a in matrix(10)) {
        if let Ok(lu) = lu_factor(&a) {
            let pa = DenseMatrix::from_fn(a.dim(), |i, j| a[(lu.permutation()[i], j)]);
            let prod = lu.lower().matmul(&lu.upper());
            prop_assert!(prod.sub(&pa).max_abs() <= 1e-12 * a.max_abs().max(1.0) * a.dim() as f64);
        }
    }

    #[test]
    fn resolvent_identity_holds(a in matrix(8), mu in 12.0f64..20.0, mu0 in -20.0f64..-12.0) {
        // Gershgorin keeps both shifts off the spectrum.
        let r = resolvent(&a, mu).unwrap();
        let r0 = resolvent(&a, mu0).unwrap();
        let lhs = r.sub(&r0);
        let rhs = r.matmul(&r0).scaled(mu0 - mu);
        prop_assert!(lhs.sub(&rhs).max_abs() <= 1e-12 * (r.max_abs() + r0.max_abs()));
    }

    #[test]
    fn multiplier_matrix_matches_direct_transform(
        k in 1usize..12,
        f in proptest::collection::vec(-1.0f64..1.0, 24),
        a in -2.0f64..2.0,
        b in -2.0f64..2.0,
    ) {
        let n = 2 * k + 1;
        let symbol = move |k: i64| Complex64::new(a * (k * k) as f64, b * k as f64);
        let m = real_dft_multiplier_matrix(n, symbol).unwrap();
        let direct = apply_multiplier(&f[..n], symbol).unwrap();
        let via = m.mul_vec(&f[..n]);
        for (x, y) in direct.iter().zip(&via) {
            prop_assert!((x - y).abs() <= 1e-10 * (1.0 + x.abs()) * (n * n) as f64);
        }
    }

    #[test]
    fn exponential_group_law(a in matrix(6), s in -0.5f64..0.5, t in -0.5f64..0.5) {
        let es = matrix_exponential(&a, s).unwrap();
        let et = matrix_exponential(&a, t).unwrap();
        let est = matrix_exponential(&a, s + t).unwrap();
        prop_assert!(es.matmul(&et).sub(&est).max_abs() <= 1e-10 * est.max_abs().max(1.0));
    }
}

#[test]
fn singular_matrix_is_reported() {
    let a = DenseMatrix::from_rows(&[[1.0, 2.0], [2.0, 4.0]]).unwrap();
    assert!(matches!(lu_factor(&a), Err(Error::SingularMatrix { .. })));
    assert!(matches!(resolvent(&DenseMatrix::diagonal(&[0.0, -1.0]), 0.0), Err(Error::MuInSpectrum { .. })));
}

#[test]
fn inverse_iteration_on_diagonal() {
    let a = DenseMatrix::diagonal(&[0.0, -4.0, -9.0]);
    let p = eigenpair_near(&a, 0.3).unwrap();
    assert!(p.value.abs() < 1e-14);
    assert_relative_eq!(p.right_vector.as_slice()[0], 1.0);
    assert!(p.right_vector.as_slice()[1].abs() < 1e-12);
}

#[test]
fn eigenvalue_of_singular_shift_is_found() {
    // The shift hits the eigenvalue exactly and must be nudged.
    let a = DenseMatrix::from_rows(&[[-1.0, 1.0], [1.0, -1.0]]).unwrap();
    let p = eigenpair_near(&a, 0.0).unwrap();
    assert!(p.value.abs() < 1e-12);
    let v = p.right_vector.as_slice();
    assert_relative_eq!(v[0], v[1], epsilon = 1e-12);
}

#[test]
fn degenerate_eigenvalue_is_detected() {
    let a = DenseMatrix::diagonal(&[1.0, 1.0, -3.0]);
    assert!(matches!(eigenpair_near(&a, 1.2), Err(Error::DegenerateEigenvalue { .. })));
}

#[test]
fn gap_of_second_difference_matrix() {
    let n = 40;
    let a = DenseMatrix::from_fn(n, |i, j| match i.abs_diff(j) {
        0 => -2.0,
        1 => 1.0,
        _ => 0.0,
    });
    let eig = |k: usize| -4.0 * (k as f64 * std::f64::consts::PI / (2.0 * (n + 1) as f64)).sin().powi(2);
    let top = rightmost_real_eigenvalue(&a).unwrap();
    assert_relative_eq!(top.value, eig(1), epsilon = 1e-10);
    let g = gap_estimate(&a, top.value);
    assert_relative_eq!(g.gap, eig(1) - eig(2), max_relative = 1e-6);
}

#[test]
fn sigma_min_of_diagonal() {
    let a = DenseMatrix::diagonal(&[1.0, 2.0, 5.0]);
    assert_relative_eq!(sigma_min(&a, 2.5), 0.5, max_relative = 1e-10);
    assert_eq!(sigma_min(&a, 2.0), 0.0);
}

#[test]
fn exponential_of_nilpotent_and_diagonal() {
    let n = DenseMatrix::from_rows(&[[0.0, 1.0], [0.0, 0.0]]).unwrap();
    let e = matrix_exponential(&n, 3.0).unwrap();
    assert_relative_eq!(e[(0, 1)], 3.0, epsilon = 1e-14);
    let d = matrix_exponential(&DenseMatrix::diagonal(&[1.0, -2.0]), 0.5).unwrap();
    assert_relative_eq!(d[(0, 0)], 0.5f64.exp(), max_relative = 1e-14);
    assert_relative_eq!(d[(1, 1)], (-1.0f64).exp(), max_relative = 1e-14);
    assert!(matches!(
        matrix_exponential(&DenseMatrix::diagonal(&[1e6]), 1.0),
        Err(Error::NormTooLarge { .. })
    ));
}

#[test]
fn shift_generator_exponential() {
    // A = d/dx on n points with the exact symbol: e^{A/n} shifts by one node.
    let n = 9;
    let a = real_dft_multiplier_matrix(n, |k| {
        Complex64::new(0.0, 2.0 * std::f64::consts::PI * k as f64)
    })
    .unwrap();
    let e = matrix_exponential(&a, 1.0 / n as f64).unwrap();
    for j in 0..n {
        let col = e.column(j);
        let target = (j + n - 1) % n;
        for (i, v) in col.iter().enumerate() {
            let want = if i == target { 1.0 } else { 0.0 };
            assert!((v - want).abs() < 1e-10, "column {j} row {i}: {v}");
        }
    }
}

#[test]
fn conjugate_symmetry_is_required() {
    let bad = |k: i64| Complex64::new(0.0, (k * k) as f64);
    assert!(matches!(real_dft_multiplier_matrix(5, bad), Err(Error::SymbolNotConjugateSymmetric { .. })));
}

#[test]
fn symmetric_eigen_matches_known_spectrum() {
    let a = DenseMatrix::from_rows(&[[2.0, 1.0, 0.0], [1.0, 2.0, 1.0], [0.0, 1.0, 2.0]]).unwrap();
    let e = symmetric_eigen(&a).unwrap();
    let mut v = e.values.clone();
    v.sort_by(f64::total_cmp);
    let s = 2f64.sqrt();
    assert_relative_eq!(v[0], 2.0 - s, epsilon = 1e-13);
    assert_relative_eq!(v[1], 2.0, epsilon = 1e-13);
    assert_relative_eq!(v[2], 2.0 + s, epsilon = 1e-13);
}

#[test]
fn refined_resolvent_beats_plain_inverse_on_stiff_shift() {
    let a = DenseMatrix::from_rows(&[[0.0, 1e9, 0.0], [-1e9, 0.0, 0.0], [0.0, 0.0, 0.0]]).unwrap();
    let mu = 1e-4;
    let r = refined_resolvent(&a, mu, 1).unwrap();
    let exact = mu / (mu * mu + 1e18);
    assert_relative_eq!(r[(0, 0)], exact, max_relative = 1e-12);
    assert_relative_eq!(r[(2, 2)], 1.0 / mu, max_relative = 1e-14);
}

#[test]
fn gap_ignores_roundoff_near_a_stiff_kernel() {
    // Only real eigenvalue is 0; the rest sit on the imaginary axis up to ~1e13.
    let op = evlab_core::gallery::build_odd_order(2, 127).unwrap();
    let g = gap_estimate(&op.matrix, 0.0);
    assert!(g.gap.is_infinite(), "{g:?}");
}
