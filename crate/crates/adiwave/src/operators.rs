//! Fourth-order spatial derivative operators on [0, 1].
//!
//! Two families share the interval with N uniform cells, h = 1/N:
//!
//! * A nodal compact set. The x-derivative of node data satisfies
//!   `lhs · u' = rhs · u` per grid line, with tridiagonal `lhs`. The full
//!   pair differentiates on all N+1 nodes; the reduced pair produces the
//!   derivative on the N-1 interior nodes only (still reading all nodes),
//!   which is what the implicit solver stages need.
//! * A staggered mimetic set. `div` maps N+1 node samples to the derivative
//!   at the N cell centers; `grad` maps N+2 samples on centers plus the two
//!   boundary points to the derivative at the nodes. Both are explicit
//!   banded operators; no solves are involved.
//!
//! Every closure is exact for polynomials of degree <= 4. Coefficients are
//! defined as exact rationals and converted to f64 once, so row sums of the
//! derivative sides vanish to rounding.

use crate::error::Error;
use crate::linalg::{
    banded_times_dense, dense_times_banded_transpose, lu_factor_tridiagonal, BandedOperator,
    DenseMatrix, TridiagonalFactorization,
};
use crate::parallel::WorkerPool;

/// Exact rational coefficient; numerator over denominator.
#[derive(Debug, Clone, Copy)]
struct Ratio(i64, i64);

impl Ratio {
    #[inline]
    fn f(self) -> f64 {
        self.0 as f64 / self.1 as f64
    }
}

const fn r(n: i64, d: i64) -> Ratio {
    Ratio(n, d)
}

// Interior stencil shared by both staggered operators: the classic 4-point
// half-offset derivative (1, -27, 27, -1)/24.
#[rustfmt::skip]
const STAGGERED_INTERIOR: [Ratio; 4] = [r(1, 24), r(-9, 8), r(9, 8), r(-1, 24)];

// Divergence boundary row: derivative at the first cell center from the six
// leading node values. The last row is this one reversed and negated.
#[rustfmt::skip]
const DIV_FIRST: [Ratio; 6] = [
    r(-4751, 5192), r(909, 1298), r(6091, 15576),
    r(-1165, 5192), r(129, 2596), r(-25, 15576),
];

// Gradient boundary rows: derivative at the boundary node (row 0) and at the
// first interior node (row 1), from the leading center+edge values. The
// bottom two rows are these reversed and negated.
#[rustfmt::skip]
const GRAD_FIRST: [Ratio; 6] = [
    r(-47888, 14245), r(1790, 407), r(-14545, 9768),
    r(8997, 16280), r(-2335, 22792), r(25, 9768),
];
#[rustfmt::skip]
const GRAD_SECOND: [Ratio; 5] = [
    r(16, 105), r(-31, 24), r(29, 24), r(-3, 40), r(1, 168),
];

fn as_f64(coeffs: &[Ratio]) -> Vec<f64> {
    coeffs.iter().map(|c| c.f()).collect()
}

fn reversed_negated(coeffs: &[Ratio]) -> Vec<f64> {
    coeffs.iter().rev().map(|c| -c.f()).collect()
}

/// Nodal compact operator family for one grid size.
#[derive(Debug, Clone)]
pub struct CfdOperatorSet {
    pub n: usize,
    pub h: f64,
    /// Implicit side on all N+1 nodes: interior (1,4,1), first row (6,18),
    /// last row (18,6).
    pub lhs_full: BandedOperator,
    pub lhs_full_lu: TridiagonalFactorization,
    /// Explicit side on all nodes, premultiplied by 1/h: interior (-3,0,3),
    /// first row (-17,9,9,-1), last row (1,-9,-9,17).
    pub rhs_full: BandedOperator,
    /// Implicit side on the N-1 interior nodes: interior (1,4,1), first and
    /// last rows (6,6).
    pub lhs_reduced: BandedOperator,
    pub lhs_reduced_lu: TridiagonalFactorization,
    /// Explicit side mapping all N+1 nodes to the N-1 interior nodes,
    /// premultiplied by 1/h: interior (-3,0,3), first and last rows
    /// (-1,-9,9,1) anchored to their respective ends.
    pub rhs_reduced: BandedOperator,
}

/// Staggered mimetic operator pair for one grid size.
#[derive(Debug, Clone)]
pub struct MimeticOperatorSet {
    pub n: usize,
    pub h: f64,
    /// Divergence, N x (N+1): node samples to cell-center derivatives.
    pub div: BandedOperator,
    /// Gradient, (N+1) x (N+2): center+edge samples to node derivatives.
    pub grad: BandedOperator,
}

/// Minimum number of cells: below this the one-sided closures of opposite
/// boundaries would overlap.
pub const MIN_CELLS: usize = 8;

fn check_size(n: usize) -> Result<f64, Error> {
    if n < MIN_CELLS {
        return Err(Error::TooSmall {
            what: "grid cells",
            minimum: MIN_CELLS,
            got: n,
        });
    }
    Ok(1.0 / n as f64)
}

pub fn build_cfd_operators(n: usize) -> Result<CfdOperatorSet, Error> {
    let h = check_size(n)?;
    let scale = n as f64; // 1/h

    let lhs_full = BandedOperator::from_parts(
        n + 1,
        n + 1,
        1,
        1,
        &[1.0, 4.0, 1.0],
        vec![(0, 0, vec![6.0, 18.0]), (n, n - 1, vec![18.0, 6.0])],
        1.0,
    )?;
    let rhs_full = BandedOperator::from_parts(
        n + 1,
        n + 1,
        1,
        1,
        &[-3.0, 0.0, 3.0],
        vec![
            (0, 0, vec![-17.0, 9.0, 9.0, -1.0]),
            (n, n - 3, vec![1.0, -9.0, -9.0, 17.0]),
        ],
        scale,
    )?;
    let lhs_reduced = BandedOperator::from_parts(
        n - 1,
        n - 1,
        1,
        1,
        &[1.0, 4.0, 1.0],
        vec![(0, 0, vec![6.0, 6.0]), (n - 2, n - 3, vec![6.0, 6.0])],
        1.0,
    )?;
    let rhs_reduced = BandedOperator::from_parts(
        n - 1,
        n + 1,
        0,
        2,
        &[-3.0, 0.0, 3.0],
        vec![
            (0, 0, vec![-1.0, -9.0, 9.0, 1.0]),
            (n - 2, n - 3, vec![-1.0, -9.0, 9.0, 1.0]),
        ],
        scale,
    )?;

    let (lo, main, up) = lhs_full.tridiagonal_parts()?;
    let lhs_full_lu = lu_factor_tridiagonal(&lo, &main, &up)?;
    let (lo, main, up) = lhs_reduced.tridiagonal_parts()?;
    let lhs_reduced_lu = lu_factor_tridiagonal(&lo, &main, &up)?;

    Ok(CfdOperatorSet {
        n,
        h,
        lhs_full,
        lhs_full_lu,
        rhs_full,
        lhs_reduced,
        lhs_reduced_lu,
        rhs_reduced,
    })
}

pub fn build_mimetic_operators(n: usize) -> Result<MimeticOperatorSet, Error> {
    let h = check_size(n)?;
    let scale = n as f64; // 1/h
    let interior = as_f64(&STAGGERED_INTERIOR);

    let div = BandedOperator::from_parts(
        n,
        n + 1,
        1,
        2,
        &interior,
        vec![
            (0, 0, as_f64(&DIV_FIRST)),
            (n - 1, n - 5, reversed_negated(&DIV_FIRST)),
        ],
        scale,
    )?;
    let grad = BandedOperator::from_parts(
        n + 1,
        n + 2,
        1,
        2,
        &interior,
        vec![
            (0, 0, as_f64(&GRAD_FIRST)),
            (1, 0, as_f64(&GRAD_SECOND)),
            (n - 1, n - 3, reversed_negated(&GRAD_SECOND)),
            (n, n - 4, reversed_negated(&GRAD_FIRST)),
        ],
        scale,
    )?;

    Ok(MimeticOperatorSet { n, h, div, grad })
}

// ---------------------------------------------------------------------------
// Compact differentiation: product with the explicit side, then a batched
// tridiagonal solve against the implicit side.
// ---------------------------------------------------------------------------

/// d/dx of nodal data along each row: solves X · lhsᵀ = m · rhsᵀ.
/// Input and output are rows x (N+1).
pub fn cfd_differentiate_rows(
    ops: &CfdOperatorSet,
    m: &DenseMatrix,
    pool: &WorkerPool,
) -> Result<DenseMatrix, Error> {
    let mut out = dense_times_banded_transpose(m, &ops.rhs_full, pool)?;
    ops.lhs_full_lu.solve_rows_in_place(&mut out, pool);
    Ok(out)
}

/// d/dy of nodal data along each column: solves lhs · X = rhs · m.
/// Input and output are (N+1) x cols.
pub fn cfd_differentiate_cols(
    ops: &CfdOperatorSet,
    m: &DenseMatrix,
    pool: &WorkerPool,
) -> Result<DenseMatrix, Error> {
    let mut out = banded_times_dense(&ops.rhs_full, m, pool)?;
    ops.lhs_full_lu.solve_columns_in_place(&mut out, pool);
    Ok(out)
}

/// d/dx on interior nodes only: rows x (N+1) in, rows x (N-1) out.
pub fn cfd_differentiate_rows_reduced(
    ops: &CfdOperatorSet,
    m: &DenseMatrix,
    pool: &WorkerPool,
) -> Result<DenseMatrix, Error> {
    let mut out = dense_times_banded_transpose(m, &ops.rhs_reduced, pool)?;
    ops.lhs_reduced_lu.solve_rows_in_place(&mut out, pool);
    Ok(out)
}

/// d/dy on interior nodes only: (N+1) x cols in, (N-1) x cols out.
pub fn cfd_differentiate_cols_reduced(
    ops: &CfdOperatorSet,
    m: &DenseMatrix,
    pool: &WorkerPool,
) -> Result<DenseMatrix, Error> {
    let mut out = banded_times_dense(&ops.rhs_reduced, m, pool)?;
    ops.lhs_reduced_lu.solve_columns_in_place(&mut out, pool);
    Ok(out)
}
