//! Time stepping for the nodal compact scheme.
//!
//! One step is an alternating-direction split of the trapezoidal rule: a row
//! sweep treats x-derivatives implicitly while the y-derivative of the
//! y-velocity stays frozen at the old time level, then a column sweep treats
//! y-derivatives implicitly while the x-derivative of the pressure stays
//! frozen at the intermediate level. Each sweep resolves the
//! pressure-velocity coupling by fixed-point iteration; every linear system
//! involved is tridiagonal thanks to the compact operators, factored once
//! per grid.
//!
//! Unknowns live at interior nodes only. The pressure ring comes from the
//! Dirichlet trace, and the wall values of each velocity component are
//! boundary data refreshed from the case: the reduced derivative reads them
//! but never updates them. Evolving wall velocities through the one-sided
//! closures instead admits modes growing like exp(sigma t) with sigma > 0
//! at every resolution, so the wall values must stay pinned to data.
//!
//! Sweep right-hand sides are premultiplied by the implicit operator, so one
//! iteration costs two banded products and two batched tridiagonal solves.

use crate::adi::{AdiConfig, AdiStepStats, Coupling, StageStats, StopRule};
use crate::error::Error;
use crate::fields::{GridSpec, MaterialField, Scheme, WaveState};
use crate::linalg::{
    banded_times_dense, banded_times_dense_into, dense_times_banded_transpose,
    dense_times_banded_transpose_into, frobenius_distance_par, frobenius_norm_par, DenseMatrix,
};
use crate::manufactured::{BoundaryTrace, ManufacturedCase};
use crate::operators::{
    cfd_differentiate_cols_reduced, cfd_differentiate_rows_reduced, CfdOperatorSet,
};
use crate::parallel::WorkerPool;

pub(crate) fn expect_shape(
    m: &DenseMatrix,
    rows: usize,
    cols: usize,
    what: &'static str,
) -> Result<(), Error> {
    if m.shape() != (rows, cols) {
        return Err(Error::ShapeMismatch {
            what,
            expected: format!("{rows}x{cols}"),
            found: format!("{}x{}", m.rows(), m.cols()),
        });
    }
    Ok(())
}

pub(crate) fn check_dt(dt: f64) -> Result<(), Error> {
    if !dt.is_finite() || dt <= 0.0 {
        return Err(Error::InvalidConfig(format!(
            "dt must be finite and positive, got {dt}"
        )));
    }
    Ok(())
}

/// Row sweep (x-implicit) of one compact-scheme step.
///
/// `a` and `b` are the iteration-invariant right-hand sides, already
/// premultiplied by the implicit operator, both on the (N-1)^2 interior.
/// `u_init` seeds the pressure iteration; `v_init` is full-width with the
/// x = 0 and x = 1 wall columns holding boundary data at the sweep's time
/// level and the interior columns seeding the velocity iteration. `trace`
/// supplies the pressure ring. Returns the interior pressure, the full-width
/// velocity on interior rows (wall columns unchanged), and sweep statistics.
#[allow(clippy::too_many_arguments)]
pub fn cfd_rows_stage(
    ops: &CfdOperatorSet,
    material: &MaterialField,
    coupling: Coupling,
    half_dt: f64,
    a: &DenseMatrix,
    b: &DenseMatrix,
    u_init: &DenseMatrix,
    v_init: &DenseMatrix,
    trace: &BoundaryTrace,
    rule: &StopRule,
    pool: &WorkerPool,
) -> Result<(DenseMatrix, DenseMatrix, StageStats), Error> {
    let n = ops.n;
    let (nr, np) = (n - 1, n + 1);
    expect_shape(a, nr, nr, "row sweep rhs a")?;
    expect_shape(b, nr, nr, "row sweep rhs b")?;
    expect_shape(u_init, nr, nr, "row sweep u seed")?;
    expect_shape(v_init, nr, np, "row sweep v seed")?;
    expect_shape(&material.kappa_interior, nr, nr, "row sweep kappa")?;
    expect_shape(&material.r_v, nr, np, "row sweep r_v")?;

    let kappa = &material.kappa_interior;
    let r_v = &material.r_v;
    let mut u_cur = u_init.clone();
    let mut v_cur = v_init.copy_region(0..nr, 1..n);
    let mut u_next = DenseMatrix::zeros(nr, nr);
    let mut v_next = DenseMatrix::zeros(nr, nr);
    // Full-width velocity read by the pressure update; wall columns are data.
    let mut v_wide = v_init.clone();
    // Interior pressure rows at full width; edge columns come from the trace.
    let mut u_mid = DenseMatrix::zeros(nr, np);
    for r in 0..nr {
        u_mid[(r, 0)] = trace.left[r + 1];
        u_mid[(r, n)] = trace.right[r + 1];
    }
    u_mid.write_region(0, 1, &u_cur);

    let mut history = Vec::with_capacity(rule.k_max);
    let mut converged = false;
    for k in 1..=rule.k_max {
        // Pressure: U lhs_reducedT = a - (dt/2) K o (V_k rhs_reducedT).
        dense_times_banded_transpose_into(&v_wide, &ops.rhs_reduced, &mut u_next, pool);
        u_next.par_rows_mut(pool, |r, row| {
            let ar = a.row(r);
            let kr = kappa.row(r);
            for i in 0..row.len() {
                row[i] = ar[i] - half_dt * kr[i] * row[i];
            }
        });
        ops.lhs_reduced_lu.solve_rows_in_place(&mut u_next, pool);

        let u_for_v = match coupling {
            Coupling::Seidel => &u_next,
            Coupling::Jacobi => &u_cur,
        };
        u_mid.write_region(0, 1, u_for_v);
        // Velocity: V lhs_reducedT = b - (dt/2) R_v o (U_mid rhs_reducedT)
        // at interior columns.
        dense_times_banded_transpose_into(&u_mid, &ops.rhs_reduced, &mut v_next, pool);
        v_next.par_rows_mut(pool, |r, row| {
            let br = b.row(r);
            let rv = r_v.row(r);
            for i in 0..row.len() {
                row[i] = br[i] - half_dt * rv[i + 1] * row[i];
            }
        });
        ops.lhs_reduced_lu.solve_rows_in_place(&mut v_next, pool);

        let delta = frobenius_distance_par(&u_next, &u_cur, pool)
            + frobenius_distance_par(&v_next, &v_cur, pool);
        history.push(delta);
        std::mem::swap(&mut u_cur, &mut u_next);
        std::mem::swap(&mut v_cur, &mut v_next);
        v_wide.write_region(0, 1, &v_cur);
        if rule.accepts(k, delta) {
            converged = true;
            break;
        }
    }
    Ok((u_cur, v_wide, StageStats::from_history(history, converged)))
}

/// Column sweep (y-implicit) of one compact-scheme step. Mirrors
/// [`cfd_rows_stage`] with the roles of the axes exchanged: `w_init` is
/// full-height with the y = 0 and y = 1 wall rows holding boundary data.
#[allow(clippy::too_many_arguments)]
pub fn cfd_columns_stage(
    ops: &CfdOperatorSet,
    material: &MaterialField,
    coupling: Coupling,
    half_dt: f64,
    c: &DenseMatrix,
    d: &DenseMatrix,
    u_init: &DenseMatrix,
    w_init: &DenseMatrix,
    trace: &BoundaryTrace,
    rule: &StopRule,
    pool: &WorkerPool,
) -> Result<(DenseMatrix, DenseMatrix, StageStats), Error> {
    let n = ops.n;
    let (nr, np) = (n - 1, n + 1);
    expect_shape(c, nr, nr, "column sweep rhs c")?;
    expect_shape(d, nr, nr, "column sweep rhs d")?;
    expect_shape(u_init, nr, nr, "column sweep u seed")?;
    expect_shape(w_init, np, nr, "column sweep w seed")?;
    expect_shape(&material.kappa_interior, nr, nr, "column sweep kappa")?;
    expect_shape(&material.r_w, np, nr, "column sweep r_w")?;

    let kappa = &material.kappa_interior;
    let r_w = &material.r_w;
    let mut u_cur = u_init.clone();
    let mut w_cur = w_init.copy_region(1..n, 0..nr);
    let mut u_next = DenseMatrix::zeros(nr, nr);
    let mut w_next = DenseMatrix::zeros(nr, nr);
    // Full-height velocity read by the pressure update; wall rows are data.
    let mut w_wide = w_init.clone();
    // Interior pressure columns at full height; edge rows come from the trace.
    let mut u_mid = DenseMatrix::zeros(np, nr);
    for c_idx in 0..nr {
        u_mid[(0, c_idx)] = trace.bottom[c_idx + 1];
        u_mid[(n, c_idx)] = trace.top[c_idx + 1];
    }
    u_mid.write_region(1, 0, &u_cur);

    let mut history = Vec::with_capacity(rule.k_max);
    let mut converged = false;
    for k in 1..=rule.k_max {
        // Pressure: lhs_reduced U = c - (dt/2) K o (rhs_reduced W_k).
        banded_times_dense_into(&ops.rhs_reduced, &w_wide, &mut u_next, pool);
        u_next.par_rows_mut(pool, |r, row| {
            let cr = c.row(r);
            let kr = kappa.row(r);
            for i in 0..row.len() {
                row[i] = cr[i] - half_dt * kr[i] * row[i];
            }
        });
        ops.lhs_reduced_lu.solve_columns_in_place(&mut u_next, pool);

        let u_for_w = match coupling {
            Coupling::Seidel => &u_next,
            Coupling::Jacobi => &u_cur,
        };
        u_mid.write_region(1, 0, u_for_w);
        // Velocity: lhs_reduced W = d - (dt/2) R_w o (rhs_reduced U_mid) at
        // interior rows.
        banded_times_dense_into(&ops.rhs_reduced, &u_mid, &mut w_next, pool);
        w_next.par_rows_mut(pool, |r, row| {
            let dr = d.row(r);
            let rw = r_w.row(r + 1);
            for i in 0..row.len() {
                row[i] = dr[i] - half_dt * rw[i] * row[i];
            }
        });
        ops.lhs_reduced_lu.solve_columns_in_place(&mut w_next, pool);

        let delta = frobenius_distance_par(&u_next, &u_cur, pool)
            + frobenius_distance_par(&w_next, &w_cur, pool);
        history.push(delta);
        std::mem::swap(&mut u_cur, &mut u_next);
        std::mem::swap(&mut w_cur, &mut w_next);
        w_wide.write_region(1, 0, &w_cur);
        if rule.accepts(k, delta) {
            converged = true;
            break;
        }
    }
    Ok((u_cur, w_wide, StageStats::from_history(history, converged)))
}

/// Advances a compact-scheme state by one step of size `dt`.
///
/// Boundary data for the pressure ring, the velocity walls, and the source
/// samples come from `case`. Fails with [`Error::NonFinite`] when a field
/// norm leaves the finite range, which is how a run at an unstable Courant
/// number reports itself.
pub fn cfd_time_step(
    state: &WaveState,
    ops: &CfdOperatorSet,
    material: &MaterialField,
    case: &ManufacturedCase,
    cfg: &AdiConfig,
    dt: f64,
    pool: &WorkerPool,
) -> Result<(WaveState, AdiStepStats), Error> {
    cfg.validate()?;
    check_dt(dt)?;
    if state.scheme != Scheme::Compact {
        return Err(Error::InvalidConfig(
            "compact stepper called with a mimetic state".into(),
        ));
    }
    let n = ops.n;
    let np = n + 1;
    expect_shape(&state.u, np, np, "compact step pressure")?;
    expect_shape(&state.v, np, np, "compact step x-velocity")?;
    expect_shape(&state.w, np, np, "compact step y-velocity")?;
    let grid = GridSpec { n, h: ops.h };
    let half_dt = 0.5 * dt;
    let t = state.time;
    let t_half = t + half_dt;
    let t_new = t + dt;
    let nodes = grid.nodes();
    let rule = StopRule::from_config(cfg, frobenius_norm_par(&state.u, pool));

    // ---- row sweep: x implicit, y explicit --------------------------------
    // Interior y-derivative of the old y-velocity; wall rows are data.
    let w_int_cols = state.w.copy_region(0..np, 1..n);
    let mut wy = banded_times_dense(&ops.rhs_reduced, &w_int_cols, pool)?;
    ops.lhs_reduced_lu.solve_columns_in_place(&mut wy, pool);

    let f_old = case.sample_source_interior(&grid, Scheme::Compact, t);
    let u_int = state.u.copy_region(1..n, 1..n);
    let mut a_core = u_int.clone();
    {
        let dst = a_core.as_mut_slice();
        let kk = material.kappa_interior.as_slice();
        let wys = wy.as_slice();
        let ff = f_old.as_slice();
        for i in 0..dst.len() {
            dst[i] -= half_dt * (kk[i] * wys[i] - ff[i]);
        }
    }
    let a = dense_times_banded_transpose(&a_core, &ops.lhs_reduced, pool)?;
    let v_int = state.v.copy_region(1..n, 1..n);
    let b = dense_times_banded_transpose(&v_int, &ops.lhs_reduced, pool)?;
    // Velocity seed at full width; wall columns hold half-time data.
    let mut v_seed = state.v.copy_region(1..n, 0..np);
    for r in 0..n - 1 {
        v_seed[(r, 0)] = case.eval_v(0.0, nodes[r + 1], t_half);
        v_seed[(r, n)] = case.eval_v(1.0, nodes[r + 1], t_half);
    }
    let trace_half = case.boundary_trace(&grid, Scheme::Compact, t_half);
    let (u_star, v_star, rows_stats) = cfd_rows_stage(
        ops,
        material,
        cfg.coupling,
        half_dt,
        &a,
        &b,
        &u_int,
        &v_seed,
        &trace_half,
        &rule,
        pool,
    )?;

    // Explicit half-step for the y-velocity from the old pressure, interior
    // points only.
    let uy_old = cfd_differentiate_cols_reduced(ops, &state.u, pool)?;
    let mut w_star = state.w.copy_region(1..n, 1..n);
    {
        let r_w = &material.r_w;
        w_star.par_rows_mut(pool, |r, row| {
            let rw = r_w.row(r + 1);
            let uyr = uy_old.row(r);
            for i in 0..row.len() {
                row[i] -= half_dt * rw[i] * uyr[i + 1];
            }
        });
    }

    // ---- column sweep: y implicit, x explicit -----------------------------
    // Interior x-derivative of the intermediate x-velocity; wall columns of
    // `v_star` carry the half-time data.
    let mut vx = dense_times_banded_transpose(&v_star, &ops.rhs_reduced, pool)?;
    ops.lhs_reduced_lu.solve_rows_in_place(&mut vx, pool);

    let f_new = case.sample_source_interior(&grid, Scheme::Compact, t_new);
    let mut c_core = u_star.clone();
    {
        let dst = c_core.as_mut_slice();
        let kk = material.kappa_interior.as_slice();
        let vxs = vx.as_slice();
        let ff = f_new.as_slice();
        for i in 0..dst.len() {
            dst[i] -= half_dt * (kk[i] * vxs[i] - ff[i]);
        }
    }
    let c_mat = banded_times_dense(&ops.lhs_reduced, &c_core, pool)?;
    let d_mat = banded_times_dense(&ops.lhs_reduced, &w_star, pool)?;
    // Velocity seed at full height; wall rows hold new-time data.
    let mut w_seed = DenseMatrix::zeros(np, n - 1);
    w_seed.write_region(1, 0, &w_star);
    for c_idx in 0..n - 1 {
        w_seed[(0, c_idx)] = case.eval_w(nodes[c_idx + 1], 0.0, t_new);
        w_seed[(n, c_idx)] = case.eval_w(nodes[c_idx + 1], 1.0, t_new);
    }
    let trace_new = case.boundary_trace(&grid, Scheme::Compact, t_new);
    let (u_new_int, w_wide, cols_stats) = cfd_columns_stage(
        ops,
        material,
        cfg.coupling,
        half_dt,
        &c_mat,
        &d_mat,
        &u_star,
        &w_seed,
        &trace_new,
        &rule,
        pool,
    )?;

    // Explicit half-step for the x-velocity from the intermediate pressure,
    // interior points only; the pressure's edge columns are the half-time
    // trace.
    let mut u_star_mid = DenseMatrix::zeros(n - 1, np);
    for r in 0..n - 1 {
        u_star_mid[(r, 0)] = trace_half.left[r + 1];
        u_star_mid[(r, n)] = trace_half.right[r + 1];
    }
    u_star_mid.write_region(0, 1, &u_star);
    let ux_star = cfd_differentiate_rows_reduced(ops, &u_star_mid, pool)?;
    let mut v_new = DenseMatrix::zeros(np, np);
    {
        let r_v = &material.r_v;
        v_new.par_rows_range_mut(1..n, pool, |r, row| {
            let vs = v_star.row(r - 1);
            let rv = r_v.row(r - 1);
            let uxr = ux_star.row(r - 1);
            for i in 1..n {
                row[i] = vs[i] - half_dt * rv[i] * uxr[i - 1];
            }
        });
    }
    case.fill_v_boundary_rows(&grid, t_new, &mut v_new);
    case.fill_v_boundary_cols(&grid, t_new, &mut v_new);

    // ---- assemble ----------------------------------------------------------
    let mut u_new = DenseMatrix::zeros(np, np);
    trace_new.apply_to(&mut u_new);
    u_new.write_region(1, 1, &u_new_int);

    let mut w_new = DenseMatrix::zeros(np, np);
    w_new.write_region(0, 1, &w_wide);
    case.fill_w_boundary_cols(&grid, t_new, &mut w_new);

    for (what, m) in [
        ("pressure", &u_new),
        ("x-velocity", &v_new),
        ("y-velocity", &w_new),
    ] {
        if !frobenius_norm_par(m, pool).is_finite() {
            return Err(Error::NonFinite { what, time: t_new });
        }
    }

    Ok((
        WaveState {
            scheme: Scheme::Compact,
            u: u_new,
            v: v_new,
            w: w_new,
            time: t_new,
        },
        AdiStepStats {
            rows: rows_stats,
            cols: cols_stats,
        },
    ))
}
