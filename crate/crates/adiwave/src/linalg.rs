//! Dense matrices, banded operators with boundary-row overrides, batched
//! tridiagonal solves, and deterministic Frobenius norms.
//!
//! Matrices are row-major `f64`. In field matrices the row index runs along
//! y and the column index along x, so right-multiplying by an operator
//! transpose acts along x (row-wise) and left-multiplying acts along y
//! (column-wise).

use crate::error::Error;
use crate::parallel::{SendPtr, WorkerPool};
use std::ops::{Index, IndexMut, Range};

// ---------------------------------------------------------------------------
// Dense matrices
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    /// Builds a matrix entry by entry; `f` receives (row, col).
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        DenseMatrix { rows, cols, data }
    }

    /// Builds from explicit rows; all rows must have equal length.
    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        assert!(!rows.is_empty(), "from_rows needs at least one row");
        let cols = rows[0].len();
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            assert_eq!(row.len(), cols, "ragged rows");
            data.extend_from_slice(row);
        }
        DenseMatrix {
            rows: rows.len(),
            cols,
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub(crate) fn as_mut_ptr(&mut self) -> *mut f64 {
        self.data.as_mut_ptr()
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, r: usize) -> &mut [f64] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn fill(&mut self, v: f64) {
        self.data.fill(v);
    }

    /// Copies a rectangular region into a new matrix.
    pub fn copy_region(&self, rows: Range<usize>, cols: Range<usize>) -> DenseMatrix {
        assert!(
            rows.end <= self.rows && cols.end <= self.cols,
            "region out of bounds"
        );
        let mut out = DenseMatrix::zeros(rows.len(), cols.len());
        for (i, r) in rows.clone().enumerate() {
            out.row_mut(i)
                .copy_from_slice(&self.row(r)[cols.start..cols.end]);
        }
        out
    }

    /// Writes `src` into this matrix with its (0,0) entry landing at (r0, c0).
    pub fn write_region(&mut self, r0: usize, c0: usize, src: &DenseMatrix) {
        assert!(
            r0 + src.rows <= self.rows && c0 + src.cols <= self.cols,
            "region out of bounds"
        );
        for i in 0..src.rows {
            self.row_mut(r0 + i)[c0..c0 + src.cols].copy_from_slice(src.row(i));
        }
    }

    /// Runs `f(row_index, row_slice)` over the given row range, splitting the
    /// range across the pool's workers. Each row is visited exactly once.
    pub fn par_rows_range_mut<F>(&mut self, range: Range<usize>, pool: &WorkerPool, f: F)
    where
        F: Fn(usize, &mut [f64]) + Sync,
    {
        assert!(range.end <= self.rows);
        let cols = self.cols;
        let base = range.start;
        let ptr = SendPtr(self.as_mut_ptr());
        pool.run_ranges(range.len(), |chunk| {
            for i in chunk {
                let r = base + i;
                // SAFETY: chunks are disjoint, so each row slice has one user.
                let row = unsafe { std::slice::from_raw_parts_mut(ptr.get().add(r * cols), cols) };
                f(r, row);
            }
        });
    }

    pub fn par_rows_mut<F>(&mut self, pool: &WorkerPool, f: F)
    where
        F: Fn(usize, &mut [f64]) + Sync,
    {
        self.par_rows_range_mut(0..self.rows, pool, f);
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = f64;
    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &f64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut f64 {
        &mut self.data[r * self.cols + c]
    }
}

// ---------------------------------------------------------------------------
// Write-through views
// ---------------------------------------------------------------------------

/// Read-only rectangular window into a parent matrix.
pub struct MatrixView<'a> {
    parent: &'a DenseMatrix,
    r0: usize,
    c0: usize,
    rows: usize,
    cols: usize,
}

impl<'a> MatrixView<'a> {
    pub(crate) fn new(parent: &'a DenseMatrix, rows: Range<usize>, cols: Range<usize>) -> Self {
        assert!(rows.end <= parent.rows() && cols.end <= parent.cols());
        MatrixView {
            parent,
            r0: rows.start,
            c0: cols.start,
            rows: rows.len(),
            cols: cols.len(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        assert!(r < self.rows && c < self.cols);
        self.parent.get(self.r0 + r, self.c0 + c)
    }

    pub fn to_dense(&self) -> DenseMatrix {
        self.parent
            .copy_region(self.r0..self.r0 + self.rows, self.c0..self.c0 + self.cols)
    }
}

/// Mutable rectangular window; writes land directly in the parent matrix.
pub struct MatrixViewMut<'a> {
    parent: &'a mut DenseMatrix,
    r0: usize,
    c0: usize,
    rows: usize,
    cols: usize,
}

impl<'a> MatrixViewMut<'a> {
    pub(crate) fn new(parent: &'a mut DenseMatrix, rows: Range<usize>, cols: Range<usize>) -> Self {
        assert!(rows.end <= parent.rows() && cols.end <= parent.cols());
        MatrixViewMut {
            r0: rows.start,
            c0: cols.start,
            rows: rows.len(),
            cols: cols.len(),
            parent,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        assert!(r < self.rows && c < self.cols);
        self.parent.get(self.r0 + r, self.c0 + c)
    }

    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        assert!(r < self.rows && c < self.cols);
        self.parent.set(self.r0 + r, self.c0 + c, v);
    }

    pub fn fill_from(&mut self, src: &DenseMatrix) {
        assert_eq!((self.rows, self.cols), src.shape(), "fill_from shape");
        for r in 0..self.rows {
            for c in 0..self.cols {
                self.set(r, c, src.get(r, c));
            }
        }
    }

    pub fn to_dense(&self) -> DenseMatrix {
        self.parent
            .copy_region(self.r0..self.r0 + self.rows, self.c0..self.c0 + self.cols)
    }
}

// ---------------------------------------------------------------------------
// Tridiagonal LU and batched solves
// ---------------------------------------------------------------------------

/// LU factorization of a tridiagonal matrix, computed without pivoting.
///
/// Stores the elimination multipliers, the diagonal pivots, and the original
/// upper diagonal. Factor once, reuse for every right-hand side.
#[derive(Debug, Clone)]
pub struct TridiagonalFactorization {
    n: usize,
    multipliers: Vec<f64>, // length n-1
    pivots: Vec<f64>,      // length n
    upper: Vec<f64>,       // length n-1
}

/// Breakdown threshold for the no-pivoting elimination, relative to the
/// largest absolute entry of the three diagonals.
const PIVOT_RELATIVE_FLOOR: f64 = 1e-14;

/// Factors the tridiagonal matrix with the given sub-, main and
/// super-diagonals. `lower` and `upper` must have length `main.len() - 1`.
pub fn lu_factor_tridiagonal(
    lower: &[f64],
    main: &[f64],
    upper: &[f64],
) -> Result<TridiagonalFactorization, Error> {
    let n = main.len();
    if n == 0 {
        return Err(Error::TooSmall {
            what: "tridiagonal system",
            minimum: 1,
            got: 0,
        });
    }
    if lower.len() != n - 1 || upper.len() != n - 1 {
        return Err(Error::ShapeMismatch {
            what: "tridiagonal diagonals",
            expected: format!("off-diagonals of length {}", n - 1),
            found: format!("lower {}, upper {}", lower.len(), upper.len()),
        });
    }
    let max_norm = lower
        .iter()
        .chain(main.iter())
        .chain(upper.iter())
        .fold(0.0_f64, |acc, &v| acc.max(v.abs()));
    let floor = PIVOT_RELATIVE_FLOOR * max_norm;

    let mut pivots = vec![0.0; n];
    let mut multipliers = vec![0.0; n - 1];
    pivots[0] = main[0];
    if pivots[0].abs() < floor || pivots[0] == 0.0 {
        return Err(Error::ZeroPivot {
            index: 0,
            value: pivots[0],
        });
    }
    for i in 1..n {
        let m = lower[i - 1] / pivots[i - 1];
        multipliers[i - 1] = m;
        pivots[i] = main[i] - m * upper[i - 1];
        if pivots[i].abs() < floor || pivots[i] == 0.0 {
            return Err(Error::ZeroPivot {
                index: i,
                value: pivots[i],
            });
        }
    }
    Ok(TridiagonalFactorization {
        n,
        multipliers,
        pivots,
        upper: upper.to_vec(),
    })
}

/// Which way the batched solve runs over the right-hand-side matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    /// Each matrix column is an independent right-hand side: solves T X = R.
    Columns,
    /// Each matrix row is an independent right-hand side: solves X Tᵀ = R.
    Rows,
}

impl TridiagonalFactorization {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn pivots(&self) -> &[f64] {
        &self.pivots
    }

    pub fn multipliers(&self) -> &[f64] {
        &self.multipliers
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    /// Solves T x = b in place for a single vector.
    #[inline]
    pub fn solve_slice(&self, x: &mut [f64]) {
        debug_assert_eq!(x.len(), self.n);
        let n = self.n;
        for i in 1..n {
            x[i] -= self.multipliers[i - 1] * x[i - 1];
        }
        x[n - 1] /= self.pivots[n - 1];
        for i in (0..n - 1).rev() {
            x[i] = (x[i] - self.upper[i] * x[i + 1]) / self.pivots[i];
        }
    }

    /// Solves X Tᵀ = R in place: every row of `rhs` is an independent system.
    pub fn solve_rows_in_place(&self, rhs: &mut DenseMatrix, pool: &WorkerPool) {
        assert_eq!(rhs.cols(), self.n, "row-oriented solve needs rhs.cols == n");
        rhs.par_rows_mut(pool, |_, row| self.solve_slice(row));
    }

    /// Solves T X = R in place: every column of `rhs` is an independent
    /// system. Workers take disjoint column ranges and sweep them together
    /// row by row, so memory access stays contiguous.
    pub fn solve_columns_in_place(&self, rhs: &mut DenseMatrix, pool: &WorkerPool) {
        assert_eq!(
            rhs.rows(),
            self.n,
            "column-oriented solve needs rhs.rows == n"
        );
        let n = self.n;
        let cols = rhs.cols();
        if cols == 0 {
            return;
        }
        let ptr = SendPtr(rhs.as_mut_ptr());
        pool.run_ranges(cols, |range| {
            // SAFETY: ranges are disjoint column sets; every element in this
            // sweep belongs to exactly one worker.
            unsafe {
                let m = ptr.get();
                for r in 1..n {
                    let mult = self.multipliers[r - 1];
                    let prev = (r - 1) * cols;
                    let cur = r * cols;
                    for c in range.clone() {
                        *m.add(cur + c) -= mult * *m.add(prev + c);
                    }
                }
                let last = (n - 1) * cols;
                let p_last = self.pivots[n - 1];
                for c in range.clone() {
                    *m.add(last + c) /= p_last;
                }
                for r in (0..n - 1).rev() {
                    let u = self.upper[r];
                    let p = self.pivots[r];
                    let cur = r * cols;
                    let next = (r + 1) * cols;
                    for c in range.clone() {
                        *m.add(cur + c) = (*m.add(cur + c) - u * *m.add(next + c)) / p;
                    }
                }
            }
        });
    }
}

/// Batched tridiagonal solve returning a fresh matrix; see [`Orientation`].
pub fn solve_batched(
    factorization: &TridiagonalFactorization,
    rhs: &DenseMatrix,
    orientation: Orientation,
    pool: &WorkerPool,
) -> Result<DenseMatrix, Error> {
    let ok = match orientation {
        Orientation::Columns => rhs.rows() == factorization.n,
        Orientation::Rows => rhs.cols() == factorization.n,
    };
    if !ok {
        return Err(Error::ShapeMismatch {
            what: "solve_batched",
            expected: format!("{:?} extent {}", orientation, factorization.n),
            found: format!("{}x{}", rhs.rows(), rhs.cols()),
        });
    }
    let mut out = rhs.clone();
    match orientation {
        Orientation::Columns => factorization.solve_columns_in_place(&mut out, pool),
        Orientation::Rows => factorization.solve_rows_in_place(&mut out, pool),
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Banded operators with boundary-row overrides
// ---------------------------------------------------------------------------

/// (lower, main, upper) diagonals of a square tridiagonal operator.
pub type TridiagonalParts = (Vec<f64>, Vec<f64>, Vec<f64>);

/// Sparse row: a contiguous run of coefficients starting at `start`.
#[derive(Debug, Clone)]
struct OverrideRow {
    row: usize,
    start: usize,
    coeffs: Vec<f64>,
}

/// Rectangular operator stored as a repeated interior stencil plus a handful
/// of explicit boundary rows. Interior row `r` holds the stencil over columns
/// `r - lower_bw ..= r + upper_bw`; rows where that range would leave the
/// matrix must be overridden.
#[derive(Debug, Clone)]
pub struct BandedOperator {
    rows: usize,
    cols: usize,
    lower_bw: usize,
    upper_bw: usize,
    stencil: Vec<f64>,
    overrides: Vec<OverrideRow>,
}

impl BandedOperator {
    /// Builds the operator. `interior` has length `lower_bw + 1 + upper_bw`
    /// and is premultiplied by `scale`, as are the override rows, given as
    /// `(row, first_column, coefficients)`.
    pub fn from_parts(
        rows: usize,
        cols: usize,
        lower_bw: usize,
        upper_bw: usize,
        interior: &[f64],
        overrides: Vec<(usize, usize, Vec<f64>)>,
        scale: f64,
    ) -> Result<Self, Error> {
        if interior.len() != lower_bw + 1 + upper_bw {
            return Err(Error::ShapeMismatch {
                what: "banded interior stencil",
                expected: format!("length {}", lower_bw + 1 + upper_bw),
                found: format!("length {}", interior.len()),
            });
        }
        let mut ovs: Vec<OverrideRow> = Vec::with_capacity(overrides.len());
        for (row, start, coeffs) in overrides {
            if row >= rows || start + coeffs.len() > cols {
                return Err(Error::ShapeMismatch {
                    what: "banded override row",
                    expected: format!("row < {rows}, span within {cols} columns"),
                    found: format!("row {row}, span {}..{}", start, start + coeffs.len()),
                });
            }
            if ovs.iter().any(|o| o.row == row) {
                return Err(Error::InvalidConfig(format!(
                    "duplicate override for row {row}"
                )));
            }
            ovs.push(OverrideRow {
                row,
                start,
                coeffs: coeffs.iter().map(|c| c * scale).collect(),
            });
        }
        ovs.sort_by_key(|o| o.row);
        // Every non-overridden row must carry the full stencil in range.
        for r in 0..rows {
            if ovs.iter().any(|o| o.row == r) {
                continue;
            }
            if r < lower_bw || r + upper_bw >= cols {
                return Err(Error::InvalidConfig(format!(
                    "row {r} clips the interior stencil and has no override"
                )));
            }
        }
        Ok(BandedOperator {
            rows,
            cols,
            lower_bw,
            upper_bw,
            stencil: interior.iter().map(|c| c * scale).collect(),
            overrides: ovs,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Interior stencil reach below and above the diagonal.
    pub fn bandwidths(&self) -> (usize, usize) {
        (self.lower_bw, self.upper_bw)
    }

    /// The coefficient run of row `r`: `(first_column, coefficients)`.
    #[inline]
    pub fn row_span(&self, r: usize) -> (usize, &[f64]) {
        for o in &self.overrides {
            if o.row == r {
                return (o.start, &o.coeffs);
            }
        }
        (r - self.lower_bw, &self.stencil)
    }

    /// Materializes one row at full width (test and oracle helper).
    pub fn row_dense(&self, r: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.cols];
        let (start, coeffs) = self.row_span(r);
        out[start..start + coeffs.len()].copy_from_slice(coeffs);
        out
    }

    /// Materializes the whole operator (test and oracle helper).
    pub fn to_dense(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.rows, self.cols, |r, c| {
            let (start, coeffs) = self.row_span(r);
            if c >= start && c < start + coeffs.len() {
                coeffs[c - start]
            } else {
                0.0
            }
        })
    }

    /// Extracts the (lower, main, upper) diagonals of a square tridiagonal
    /// operator, e.g. to factor it. Errors if any row reaches outside the
    /// tridiagonal band.
    pub fn tridiagonal_parts(&self) -> Result<TridiagonalParts, Error> {
        if self.rows != self.cols {
            return Err(Error::ShapeMismatch {
                what: "tridiagonal_parts",
                expected: "square operator".to_string(),
                found: format!("{}x{}", self.rows, self.cols),
            });
        }
        let n = self.rows;
        let mut lower = vec![0.0; n - 1];
        let mut main = vec![0.0; n];
        let mut upper = vec![0.0; n - 1];
        for r in 0..n {
            let (start, coeffs) = self.row_span(r);
            for (k, &v) in coeffs.iter().enumerate() {
                let c = start + k;
                if v == 0.0 {
                    continue;
                }
                if c + 1 == r {
                    lower[c] = v;
                } else if c == r {
                    main[r] = v;
                } else if c == r + 1 {
                    upper[r] = v;
                } else {
                    return Err(Error::ShapeMismatch {
                        what: "tridiagonal_parts",
                        expected: "entries within the tridiagonal band".to_string(),
                        found: format!("nonzero at ({r}, {c})"),
                    });
                }
            }
        }
        Ok((lower, main, upper))
    }
}

/// out = op · m, parallel over output rows.
pub fn banded_times_dense_into(
    op: &BandedOperator,
    m: &DenseMatrix,
    out: &mut DenseMatrix,
    pool: &WorkerPool,
) {
    assert_eq!(op.cols(), m.rows(), "banded_times_dense: inner dimension");
    assert_eq!(
        out.shape(),
        (op.rows(), m.cols()),
        "banded_times_dense: out"
    );
    out.par_rows_mut(pool, |r, row| {
        let (start, coeffs) = op.row_span(r);
        row.fill(0.0);
        for (k, &a) in coeffs.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            let src = m.row(start + k);
            for (o, s) in row.iter_mut().zip(src.iter()) {
                *o += a * s;
            }
        }
    });
}

pub fn banded_times_dense(
    op: &BandedOperator,
    m: &DenseMatrix,
    pool: &WorkerPool,
) -> Result<DenseMatrix, Error> {
    if op.cols() != m.rows() {
        return Err(Error::ShapeMismatch {
            what: "banded_times_dense",
            expected: format!("dense with {} rows", op.cols()),
            found: format!("{}x{}", m.rows(), m.cols()),
        });
    }
    let mut out = DenseMatrix::zeros(op.rows(), m.cols());
    banded_times_dense_into(op, m, &mut out, pool);
    Ok(out)
}

/// out = m · opᵀ, parallel over output rows.
pub fn dense_times_banded_transpose_into(
    m: &DenseMatrix,
    op: &BandedOperator,
    out: &mut DenseMatrix,
    pool: &WorkerPool,
) {
    assert_eq!(
        m.cols(),
        op.cols(),
        "dense_times_banded_transpose: inner dimension"
    );
    assert_eq!(
        out.shape(),
        (m.rows(), op.rows()),
        "dense_times_banded_transpose: out"
    );
    out.par_rows_mut(pool, |r, row| {
        let src = m.row(r);
        for (i, o) in row.iter_mut().enumerate() {
            let (start, coeffs) = op.row_span(i);
            let mut acc = 0.0;
            for (k, &a) in coeffs.iter().enumerate() {
                acc += a * src[start + k];
            }
            *o = acc;
        }
    });
}

pub fn dense_times_banded_transpose(
    m: &DenseMatrix,
    op: &BandedOperator,
    pool: &WorkerPool,
) -> Result<DenseMatrix, Error> {
    if m.cols() != op.cols() {
        return Err(Error::ShapeMismatch {
            what: "dense_times_banded_transpose",
            expected: format!("dense with {} cols", op.cols()),
            found: format!("{}x{}", m.rows(), m.cols()),
        });
    }
    let mut out = DenseMatrix::zeros(m.rows(), op.rows());
    dense_times_banded_transpose_into(m, op, &mut out, pool);
    Ok(out)
}

// ---------------------------------------------------------------------------
// Norms with a fixed reduction order
// ---------------------------------------------------------------------------

#[inline]
fn row_sumsq(row: &[f64]) -> f64 {
    let mut acc = 0.0;
    for &v in row {
        acc += v * v;
    }
    acc
}

#[inline]
fn row_sumsq_diff(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (&x, &y) in a.iter().zip(b.iter()) {
        let d = x - y;
        acc += d * d;
    }
    acc
}

/// Frobenius norm. Each row is summed left to right and the per-row partial
/// sums are combined in row order, so the result never depends on the worker
/// count. Squared sums overflow to +inf for entries beyond ~1e154, which the
/// solvers use as a blow-up signal.
pub fn frobenius_norm(m: &DenseMatrix) -> f64 {
    let mut acc = 0.0;
    for r in 0..m.rows() {
        acc += row_sumsq(m.row(r));
    }
    acc.sqrt()
}

/// Frobenius norm of (a - b) without materializing the difference; same
/// deterministic reduction order as [`frobenius_norm`].
pub fn frobenius_distance(a: &DenseMatrix, b: &DenseMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "frobenius_distance shape");
    let mut acc = 0.0;
    for r in 0..a.rows() {
        acc += row_sumsq_diff(a.row(r), b.row(r));
    }
    acc.sqrt()
}

/// Pool-aware Frobenius norm: workers fill disjoint slots of the per-row
/// partial table, which is then folded sequentially in row order. Bitwise
/// equal to [`frobenius_norm`] for every worker count.
pub fn frobenius_norm_par(m: &DenseMatrix, pool: &WorkerPool) -> f64 {
    if pool.workers() == 1 {
        return frobenius_norm(m);
    }
    let mut partials = vec![0.0; m.rows()];
    let ptr = SendPtr(partials.as_mut_ptr());
    pool.run_ranges(m.rows(), |range| {
        for r in range {
            // SAFETY: disjoint ranges; one writer per slot.
            unsafe { *ptr.get().add(r) = row_sumsq(m.row(r)) };
        }
    });
    partials.iter().sum::<f64>().sqrt()
}

/// Pool-aware variant of [`frobenius_distance`] with the same guarantee.
pub fn frobenius_distance_par(a: &DenseMatrix, b: &DenseMatrix, pool: &WorkerPool) -> f64 {
    assert_eq!(a.shape(), b.shape(), "frobenius_distance shape");
    if pool.workers() == 1 {
        return frobenius_distance(a, b);
    }
    let mut partials = vec![0.0; a.rows()];
    let ptr = SendPtr(partials.as_mut_ptr());
    pool.run_ranges(a.rows(), |range| {
        for r in range {
            // SAFETY: disjoint ranges; one writer per slot.
            unsafe { *ptr.get().add(r) = row_sumsq_diff(a.row(r), b.row(r)) };
        }
    });
    partials.iter().sum::<f64>().sqrt()
}
