//! Randomized checks of the linear-algebra kernels against naive dense
//! arithmetic, plus structural properties of the worker-pool partitioning.

use adiwave::linalg::{
    banded_times_dense, dense_times_banded_transpose, frobenius_distance, frobenius_distance_par,
    frobenius_norm, frobenius_norm_par, lu_factor_tridiagonal, solve_batched, DenseMatrix,
    Orientation,
};
use adiwave::operators::{build_cfd_operators, build_mimetic_operators};
use adiwave::parallel::WorkerPool;
use proptest::prelude::*;
use std::sync::Mutex;

fn naive_mul(a: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
    assert_eq!(a.cols(), b.rows());
    DenseMatrix::from_fn(a.rows(), b.cols(), |r, c| {
        (0..a.cols()).map(|k| a.get(r, k) * b.get(k, c)).sum()
    })
}

fn naive_mul_bt(a: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
    // a · bᵀ
    assert_eq!(a.cols(), b.cols());
    DenseMatrix::from_fn(a.rows(), b.rows(), |r, c| {
        (0..a.cols()).map(|k| a.get(r, k) * b.get(c, k)).sum()
    })
}

fn max_abs(m: &DenseMatrix) -> f64 {
    m.as_slice().iter().fold(0.0, |acc, v| acc.max(v.abs()))
}

fn assert_close(got: &DenseMatrix, want: &DenseMatrix, tol: f64, what: &str) {
    assert_eq!(got.shape(), want.shape(), "{what}: shape");
    let scale = max_abs(want).max(1.0);
    for (g, w) in got.as_slice().iter().zip(want.as_slice()) {
        assert!(
            (g - w).abs() <= tol * scale,
            "{what}: {g} vs {w} (scale {scale})"
        );
    }
}

/// Strictly diagonally dominant tridiagonal system of size n together with
/// a dense matrix of unknowns: (lower, main, upper, X).
fn tridiag_system() -> impl Strategy<Value = (Vec<f64>, Vec<f64>, Vec<f64>, DenseMatrix)> {
    (4usize..24, 1usize..7).prop_flat_map(|(n, c)| {
        (
            proptest::collection::vec(-1.0..1.0f64, n - 1),
            proptest::collection::vec(-1.0..1.0f64, n - 1),
            proptest::collection::vec(2.2..5.0f64, n),
            proptest::collection::vec(proptest::bool::ANY, n),
            proptest::collection::vec(-1.0..1.0f64, n * c),
        )
            .prop_map(move |(lo, up, mag, neg, xs)| {
                let main: Vec<f64> = mag
                    .iter()
                    .zip(&neg)
                    .map(|(m, &s)| if s { -m } else { *m })
                    .collect();
                let x = DenseMatrix::from_fn(n, c, |r, cc| xs[r * c + cc]);
                (lo, main, up, x)
            })
    })
}

fn tridiag_dense(lo: &[f64], main: &[f64], up: &[f64]) -> DenseMatrix {
    let n = main.len();
    DenseMatrix::from_fn(n, n, |r, c| {
        if r == c {
            main[r]
        } else if c + 1 == r {
            lo[c]
        } else if c == r + 1 {
            up[r]
        } else {
            0.0
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tridiagonal_solves_recover_the_unknowns((lo, main, up, x) in tridiag_system()) {
        let pool = WorkerPool::new(2);
        let t = tridiag_dense(&lo, &main, &up);
        let f = lu_factor_tridiagonal(&lo, &main, &up).unwrap();

        // Columns orientation: T · X = B.
        let b = naive_mul(&t, &x);
        let got = solve_batched(&f, &b, Orientation::Columns, &pool).unwrap();
        assert_close(&got, &x, 1e-9, "column-oriented solve");

        // Rows orientation: Xᵀ-shaped systems, X · Tᵀ = B.
        let xt = DenseMatrix::from_fn(x.cols(), x.rows(), |r, c| x.get(c, r));
        let b = naive_mul_bt(&xt, &t);
        let got = solve_batched(&f, &b, Orientation::Rows, &pool).unwrap();
        assert_close(&got, &xt, 1e-9, "row-oriented solve");
    }

    #[test]
    fn banded_products_match_naive_dense_products(
        n in 8usize..32,
        c in 1usize..6,
        seed in proptest::num::u64::ANY,
    ) {
        let pool = WorkerPool::new(2);
        let cfd = build_cfd_operators(n).unwrap();
        let mfd = build_mimetic_operators(n).unwrap();
        // Cheap deterministic fill; the values themselves are arbitrary.
        let mut s = seed | 1;
        let mut next = move || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (s >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        for op in [&cfd.rhs_full, &cfd.rhs_reduced, &cfd.lhs_full, &mfd.div, &mfd.grad] {
            let dense = op.to_dense();
            let m = DenseMatrix::from_fn(op.cols(), c, |_, _| next());
            let got = banded_times_dense(op, &m, &pool).unwrap();
            assert_close(&got, &naive_mul(&dense, &m), 1e-12, "banded · dense");

            let m = DenseMatrix::from_fn(c, op.cols(), |_, _| next());
            let got = dense_times_banded_transpose(&m, op, &pool).unwrap();
            assert_close(&got, &naive_mul_bt(&m, &dense), 1e-12, "dense · bandedᵀ");
        }
    }

    #[test]
    fn parallel_norms_are_bitwise_stable(
        rows in 1usize..40,
        cols in 1usize..40,
        seed in proptest::num::u64::ANY,
    ) {
        let mut s = seed | 1;
        let mut next = move || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (s >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let a = DenseMatrix::from_fn(rows, cols, |_, _| next());
        let b = DenseMatrix::from_fn(rows, cols, |_, _| next());
        let norm = frobenius_norm(&a);
        let dist = frobenius_distance(&a, &b);
        for workers in [1, 2, 3, 4] {
            let pool = WorkerPool::new(workers);
            assert_eq!(frobenius_norm_par(&a, &pool), norm);
            assert_eq!(frobenius_distance_par(&a, &b, &pool), dist);
        }
    }

    #[test]
    fn worker_ranges_partition_the_index_space(len in 0usize..200, workers in 1usize..6) {
        let pool = WorkerPool::new(workers);
        let seen = Mutex::new(Vec::new());
        pool.run_ranges(len, |range| seen.lock().unwrap().push(range));
        let mut ranges = seen.into_inner().unwrap();
        ranges.sort_by_key(|r| r.start);
        let mut cursor = 0;
        for r in &ranges {
            assert_eq!(r.start, cursor, "gap or overlap before {r:?}");
            assert!(r.end > r.start, "empty range {r:?}");
            cursor = r.end;
        }
        assert_eq!(cursor, len, "ranges must cover 0..{len}");
        assert!(ranges.len() <= workers.max(1));
    }
}
