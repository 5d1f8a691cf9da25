use evlab_core::lattice::{margins, phi_to_u_norm, rank_one_matrix, DenseMatrix, RankOneFrame};
use proptest::prelude::*;

fn frame_and_matrix(max_n: usize) -> impl Strategy<Value = (RankOneFrame, DenseMatrix)> {
    (1..=max_n).prop_flat_map(|n| {
        let pos = || proptest::collection::vec(0.05f64..20.0, n);
        (pos(), pos(), pos(), proptest::collection::vec(-50.0f64..50.0, n * n)).prop_map(move |(u, phi, w, t)| {
            (RankOneFrame::from_vecs(u, phi, w).unwrap(), DenseMatrix::from_row_major(n, t).unwrap())
        })
    })
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

proptest! {
    #[test]
    fn norm_equals_two_sided_constant((frame, t) in frame_and_matrix(12)) {
        let m = margins(&t, &frame).unwrap();
        let c = phi_to_u_norm(&t, &frame).unwrap();
        prop_assert!(rel(c, m.two_sided_constant) <= 1e-12);
        prop_assert!(m.lower_margin <= m.upper_margin);
    }

    #[test]
    fn margins_scale_with_frame((frame, t) in frame_and_matrix(8), alpha in 0.1f64..10.0, beta in 0.1f64..10.0) {
        let a = margins(&t, &frame).unwrap();
        let b = margins(&t, &frame.rescaled(alpha, beta).unwrap()).unwrap();
        prop_assert!(rel(b.lower_margin * alpha * beta, a.lower_margin) <= 1e-12);
        prop_assert!(rel(b.upper_margin * alpha * beta, a.upper_margin) <= 1e-12);
        prop_assert_eq!(a.argmin_index, b.argmin_index);
    }

    #[test]
    fn domination_is_entrywise((frame, t) in frame_and_matrix(8)) {
        let m = margins(&t, &frame).unwrap();
        let r = rank_one_matrix(&frame);
        let n = t.dim();
        for i in 0..n {
            for j in 0..n {
                let lo = m.lower_margin * r[(i, j)];
                let hi = m.upper_margin * r[(i, j)];
                prop_assert!(t[(i, j)] >= lo - 1e-12 * lo.abs());
                prop_assert!(t[(i, j)] <= hi + 1e-12 * hi.abs());
            }
        }
    }

    #[test]
    fn composition_bound((frame, t1) in frame_and_matrix(6), seed in 0u64..1000) {
        let n = t1.dim();
        let t2 = DenseMatrix::from_fn(n, |i, j| ((i * 7 + j * 3) as f64 + seed as f64).sin());
        let s = DenseMatrix::from_fn(n, |i, j| ((i + 2 * j) as f64 - seed as f64).cos());
        let c1 = phi_to_u_norm(&t1, &frame).unwrap();
        let c2 = phi_to_u_norm(&t2, &frame).unwrap();
        let c = phi_to_u_norm(&t2.matmul(&s).matmul(&t1), &frame).unwrap();
        let bound = c1 * c2 * s.inf_norm() * frame.embedding_constant();
        prop_assert!(c <= bound * (1.0 + 1e-12));
    }

    #[test]
    fn rank_one_matrix_has_unit_margins((frame, _t) in frame_and_matrix(10)) {
        let m = margins(&rank_one_matrix(&frame), &frame).unwrap();
        prop_assert!((m.lower_margin - 1.0).abs() <= 1e-14);
        prop_assert!((m.upper_margin - 1.0).abs() <= 1e-14);
    }
}
