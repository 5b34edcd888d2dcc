//! Time stepping for the staggered mimetic scheme.
//!
//! Same alternating-direction split as the compact solver: a row sweep with
//! implicit x-coupling, then a column sweep with implicit y-coupling, each
//! resolved by fixed-point iteration. The mimetic derivative operators are
//! explicit banded matrices, so an iteration is two banded products and no
//! linear solves.
//!
//! Staggering: pressure lives on cell centers plus the boundary ring, the
//! x-velocity on x-nodes and y-centers, the y-velocity on x-centers and
//! y-nodes. `div` maps node samples to center derivatives; `grad` maps
//! center+edge samples to node derivatives.

use crate::adi::{AdiConfig, AdiStepStats, Coupling, StageStats, StopRule};
use crate::error::Error;
use crate::fields::{GridSpec, MaterialField, Scheme, WaveState};
use crate::linalg::{
    banded_times_dense, banded_times_dense_into, dense_times_banded_transpose,
    dense_times_banded_transpose_into, frobenius_distance_par, frobenius_norm_par, DenseMatrix,
};
use crate::manufactured::{BoundaryTrace, ManufacturedCase};
use crate::operators::MimeticOperatorSet;
use crate::parallel::WorkerPool;
use crate::solver_cfd::{check_dt, expect_shape};

/// Row sweep (x-implicit) of one mimetic-scheme step.
///
/// `a` is the iteration-invariant pressure right-hand side on the N^2 cell
/// centers; `b` the velocity one on the N interior rows at full width.
/// Returns the center pressure, the velocity on interior rows, and the sweep
/// statistics.
#[allow(clippy::too_many_arguments)]
pub fn mfd_rows_stage(
    ops: &MimeticOperatorSet,
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
    expect_shape(a, n, n, "row sweep rhs a")?;
    expect_shape(b, n, n + 1, "row sweep rhs b")?;
    expect_shape(u_init, n, n, "row sweep u seed")?;
    expect_shape(v_init, n, n + 1, "row sweep v seed")?;
    expect_shape(&material.kappa_interior, n, n, "row sweep kappa")?;
    expect_shape(&material.r_v, n, n + 1, "row sweep r_v")?;

    let kappa = &material.kappa_interior;
    let r_v = &material.r_v;
    let mut u_cur = u_init.clone();
    let mut v_cur = v_init.clone();
    let mut u_next = DenseMatrix::zeros(n, n);
    let mut v_next = DenseMatrix::zeros(n, n + 1);
    let mut ux = DenseMatrix::zeros(n + 2, n + 1);
    let mut u_full = DenseMatrix::zeros(n + 2, n + 2);
    trace.apply_to(&mut u_full);
    u_full.write_region(1, 1, &u_cur);

    let mut history = Vec::with_capacity(rule.k_max);
    let mut converged = false;
    for k in 1..=rule.k_max {
        // Pressure: U = a - (dt/2) K o (V_k divT).
        dense_times_banded_transpose_into(&v_cur, &ops.div, &mut u_next, pool);
        u_next.par_rows_mut(pool, |r, row| {
            let ar = a.row(r);
            let kr = kappa.row(r);
            for i in 0..row.len() {
                row[i] = ar[i] - half_dt * kr[i] * row[i];
            }
        });

        let u_for_v = match coupling {
            Coupling::Seidel => &u_next,
            Coupling::Jacobi => &u_cur,
        };
        u_full.write_region(1, 1, u_for_v);
        // Velocity: V = b - (dt/2) R_v o (U_full gradT) on interior rows.
        dense_times_banded_transpose_into(&u_full, &ops.grad, &mut ux, pool);
        v_next.par_rows_mut(pool, |r, row| {
            let br = b.row(r);
            let rv = r_v.row(r);
            let uxr = ux.row(r + 1);
            for i in 0..row.len() {
                row[i] = br[i] - half_dt * rv[i] * uxr[i];
            }
        });

        let delta = frobenius_distance_par(&u_next, &u_cur, pool)
            + frobenius_distance_par(&v_next, &v_cur, pool);
        history.push(delta);
        std::mem::swap(&mut u_cur, &mut u_next);
        std::mem::swap(&mut v_cur, &mut v_next);
        if rule.accepts(k, delta) {
            converged = true;
            break;
        }
    }
    Ok((u_cur, v_cur, StageStats::from_history(history, converged)))
}

/// Column sweep (y-implicit) of one mimetic-scheme step. Mirrors
/// [`mfd_rows_stage`] with the axes exchanged: `d` covers the N interior
/// velocity columns at full height.
#[allow(clippy::too_many_arguments)]
pub fn mfd_columns_stage(
    ops: &MimeticOperatorSet,
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
    expect_shape(c, n, n, "column sweep rhs c")?;
    expect_shape(d, n + 1, n, "column sweep rhs d")?;
    expect_shape(u_init, n, n, "column sweep u seed")?;
    expect_shape(w_init, n + 1, n, "column sweep w seed")?;
    expect_shape(&material.kappa_interior, n, n, "column sweep kappa")?;
    expect_shape(&material.r_w, n + 1, n, "column sweep r_w")?;

    let kappa = &material.kappa_interior;
    let r_w = &material.r_w;
    let mut u_cur = u_init.clone();
    let mut w_cur = w_init.clone();
    let mut u_next = DenseMatrix::zeros(n, n);
    let mut w_next = DenseMatrix::zeros(n + 1, n);
    let mut uy = DenseMatrix::zeros(n + 1, n + 2);
    let mut u_full = DenseMatrix::zeros(n + 2, n + 2);
    trace.apply_to(&mut u_full);
    u_full.write_region(1, 1, &u_cur);

    let mut history = Vec::with_capacity(rule.k_max);
    let mut converged = false;
    for k in 1..=rule.k_max {
        // Pressure: U = c - (dt/2) K o (div W_k).
        banded_times_dense_into(&ops.div, &w_cur, &mut u_next, pool);
        u_next.par_rows_mut(pool, |r, row| {
            let cr = c.row(r);
            let kr = kappa.row(r);
            for i in 0..row.len() {
                row[i] = cr[i] - half_dt * kr[i] * row[i];
            }
        });

        let u_for_w = match coupling {
            Coupling::Seidel => &u_next,
            Coupling::Jacobi => &u_cur,
        };
        u_full.write_region(1, 1, u_for_w);
        // Velocity: W = d - (dt/2) R_w o (grad U_full) on interior columns.
        banded_times_dense_into(&ops.grad, &u_full, &mut uy, pool);
        w_next.par_rows_mut(pool, |r, row| {
            let dr = d.row(r);
            let rw = r_w.row(r);
            let uyr = &uy.row(r)[1..];
            for i in 0..row.len() {
                row[i] = dr[i] - half_dt * rw[i] * uyr[i];
            }
        });

        let delta = frobenius_distance_par(&u_next, &u_cur, pool)
            + frobenius_distance_par(&w_next, &w_cur, pool);
        history.push(delta);
        std::mem::swap(&mut u_cur, &mut u_next);
        std::mem::swap(&mut w_cur, &mut w_next);
        if rule.accepts(k, delta) {
            converged = true;
            break;
        }
    }
    Ok((u_cur, w_cur, StageStats::from_history(history, converged)))
}

/// Advances a mimetic-scheme state by one step of size `dt`. Error behavior
/// matches the compact stepper, including [`Error::NonFinite`] on blow-up.
pub fn mfd_time_step(
    state: &WaveState,
    ops: &MimeticOperatorSet,
    material: &MaterialField,
    case: &ManufacturedCase,
    cfg: &AdiConfig,
    dt: f64,
    pool: &WorkerPool,
) -> Result<(WaveState, AdiStepStats), Error> {
    cfg.validate()?;
    check_dt(dt)?;
    if state.scheme != Scheme::Mimetic {
        return Err(Error::InvalidConfig(
            "mimetic stepper called with a compact state".into(),
        ));
    }
    let n = ops.n;
    expect_shape(&state.u, n + 2, n + 2, "mimetic step pressure")?;
    expect_shape(&state.v, n + 2, n + 1, "mimetic step x-velocity")?;
    expect_shape(&state.w, n + 1, n + 2, "mimetic step y-velocity")?;
    let grid = GridSpec { n, h: ops.h };
    let half_dt = 0.5 * dt;
    let t = state.time;
    let t_half = t + half_dt;
    let t_new = t + dt;
    let rule = StopRule::from_config(cfg, frobenius_norm_par(&state.u, pool));

    // ---- row sweep: x implicit, y explicit --------------------------------
    let w_int_cols = state.w.copy_region(0..n + 1, 1..n + 1);
    let wy = banded_times_dense(&ops.div, &w_int_cols, pool)?;
    let f_old = case.sample_source_interior(&grid, Scheme::Mimetic, t);
    let u_int = state.u.copy_region(1..n + 1, 1..n + 1);
    let mut a = u_int.clone();
    {
        let dst = a.as_mut_slice();
        let kk = material.kappa_interior.as_slice();
        let wys = wy.as_slice();
        let ff = f_old.as_slice();
        for i in 0..dst.len() {
            dst[i] -= half_dt * (kk[i] * wys[i] - ff[i]);
        }
    }
    let v_int = state.v.copy_region(1..n + 1, 0..n + 1);
    let trace_half = case.boundary_trace(&grid, Scheme::Mimetic, t_half);
    let (u_star, v_star, rows_stats) = mfd_rows_stage(
        ops,
        material,
        cfg.coupling,
        half_dt,
        &a,
        &v_int,
        &u_int,
        &v_int,
        &trace_half,
        &rule,
        pool,
    )?;

    // Explicit half-step for the y-velocity from the old pressure.
    let uy_old = banded_times_dense(&ops.grad, &state.u, pool)?;
    let mut w_star_int = state.w.copy_region(0..n + 1, 1..n + 1);
    {
        let r_w = &material.r_w;
        w_star_int.par_rows_mut(pool, |r, row| {
            let rw = r_w.row(r);
            let uyr = &uy_old.row(r)[1..];
            for i in 0..row.len() {
                row[i] -= half_dt * rw[i] * uyr[i];
            }
        });
    }

    // ---- column sweep: y implicit, x explicit -----------------------------
    let mut u_star_full = DenseMatrix::zeros(n + 2, n + 2);
    trace_half.apply_to(&mut u_star_full);
    u_star_full.write_region(1, 1, &u_star);

    let vx = dense_times_banded_transpose(&v_star, &ops.div, pool)?;
    let f_new = case.sample_source_interior(&grid, Scheme::Mimetic, t_new);
    let mut c_mat = u_star.clone();
    {
        let dst = c_mat.as_mut_slice();
        let kk = material.kappa_interior.as_slice();
        let vxs = vx.as_slice();
        let ff = f_new.as_slice();
        for i in 0..dst.len() {
            dst[i] -= half_dt * (kk[i] * vxs[i] - ff[i]);
        }
    }
    let trace_new = case.boundary_trace(&grid, Scheme::Mimetic, t_new);
    let (u_new_int, w_new_int, cols_stats) = mfd_columns_stage(
        ops,
        material,
        cfg.coupling,
        half_dt,
        &c_mat,
        &w_star_int,
        &u_star,
        &w_star_int,
        &trace_new,
        &rule,
        pool,
    )?;

    // Explicit half-step for the x-velocity from the intermediate pressure.
    let ux_star = dense_times_banded_transpose(&u_star_full, &ops.grad, pool)?;
    let mut v_new = DenseMatrix::zeros(n + 2, n + 1);
    {
        let r_v = &material.r_v;
        v_new.par_rows_range_mut(1..n + 1, pool, |r, row| {
            let vs = v_star.row(r - 1);
            let rv = r_v.row(r - 1);
            let uxr = ux_star.row(r);
            for i in 0..row.len() {
                row[i] = vs[i] - half_dt * rv[i] * uxr[i];
            }
        });
    }
    case.fill_v_boundary_rows(&grid, t_new, &mut v_new);

    // ---- assemble ----------------------------------------------------------
    let mut u_new = DenseMatrix::zeros(n + 2, n + 2);
    trace_new.apply_to(&mut u_new);
    u_new.write_region(1, 1, &u_new_int);

    let mut w_new = DenseMatrix::zeros(n + 1, n + 2);
    w_new.write_region(0, 1, &w_new_int);
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
            scheme: Scheme::Mimetic,
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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adi::time_step;
    use crate::operators::build_mimetic_operators;

    fn zero_trace(len: usize) -> BoundaryTrace {
        BoundaryTrace {
            bottom: vec![0.0; len],
            top: vec![0.0; len],
            left: vec![0.0; len],
            right: vec![0.0; len],
        }
    }

    #[test]
    fn zero_data_is_an_exact_fixed_point_of_both_sweeps() {
        let n = 8;
        let ops = build_mimetic_operators(n).unwrap();
        let grid = GridSpec::new(n).unwrap();
        let material = MaterialField::constant(&grid, Scheme::Mimetic, 1.0, 1.0);
        let pool = WorkerPool::new(1);
        let rule = StopRule {
            eps_abs: 0.0,
            k_max: 8,
            min_check: 6,
        };
        let z_cc = DenseMatrix::zeros(n, n);
        let z_cv = DenseMatrix::zeros(n, n + 1);
        let z_wc = DenseMatrix::zeros(n + 1, n);
        let trace = zero_trace(n + 2);
        let (u, v, stats) = mfd_rows_stage(
            &ops,
            &material,
            Coupling::Seidel,
            0.01,
            &z_cc,
            &z_cv,
            &z_cc,
            &z_cv,
            &trace,
            &rule,
            &pool,
        )
        .unwrap();
        assert!(stats.converged);
        assert_eq!(stats.iterations, 6);
        assert!(u.as_slice().iter().all(|&x| x == 0.0));
        assert!(v.as_slice().iter().all(|&x| x == 0.0));

        let (u, w, stats) = mfd_columns_stage(
            &ops,
            &material,
            Coupling::Seidel,
            0.01,
            &z_cc,
            &z_wc,
            &z_cc,
            &z_wc,
            &trace,
            &rule,
            &pool,
        )
        .unwrap();
        assert!(stats.converged);
        assert_eq!(stats.iterations, 6);
        assert!(u.as_slice().iter().all(|&x| x == 0.0));
        assert!(w.as_slice().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn huge_tolerance_stops_at_the_first_checked_iteration() {
        let n = 16;
        let ops = build_mimetic_operators(n).unwrap();
        let grid = GridSpec::new(n).unwrap();
        let case = ManufacturedCase::smooth();
        let material = case.material(&grid, Scheme::Mimetic);
        let cfg = AdiConfig {
            eps: 1e30,
            ..AdiConfig::for_scheme(Scheme::Mimetic)
        };
        let pool = WorkerPool::new(1);
        let state = case.sample_initial_state(Scheme::Mimetic, n).unwrap();
        let dt = time_step(cfg.cfl, n, material.c_max);
        let (next, stats) = mfd_time_step(&state, &ops, &material, &case, &cfg, dt, &pool).unwrap();
        assert_eq!(stats.rows.iterations, cfg.min_iters_before_check);
        assert_eq!(stats.cols.iterations, cfg.min_iters_before_check);
        assert!(stats.converged());
        assert_eq!(next.time, dt);
    }

    #[test]
    fn step_rejects_mismatched_state() {
        let ops = build_mimetic_operators(8).unwrap();
        let case = ManufacturedCase::smooth();
        let grid = GridSpec::new(8).unwrap();
        let material = case.material(&grid, Scheme::Mimetic);
        let cfg = AdiConfig::for_scheme(Scheme::Mimetic);
        let pool = WorkerPool::new(1);
        let state = case.sample_initial_state(Scheme::Compact, 8).unwrap();
        let err = mfd_time_step(&state, &ops, &material, &case, &cfg, 0.01, &pool).unwrap_err();
        assert!(matches!(err, Error::InvalidConfig(_)));
    }
}
