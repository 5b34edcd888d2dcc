//! Full-simulation error measurement, rate estimation, and report assembly.
//!
//! A run integrates the manufactured case over a whole number of temporal
//! periods and measures the Frobenius norm of the pressure error on interior
//! points at the final time. Boundary pressures are imposed data for both
//! schemes, and the outermost velocity rows/columns are refreshed rather
//! than computed, so the interior pressure is the honest error carrier.

use crate::adi::{time_step, AdiConfig, AdiStepStats};
use crate::error::Error;
use crate::fields::{GridSpec, MaterialField, Scheme, WaveState};
use crate::linalg::{frobenius_distance, frobenius_norm};
use crate::manufactured::ManufacturedCase;
use crate::operators::{
    build_cfd_operators, build_mimetic_operators, CfdOperatorSet, MimeticOperatorSet,
};
use crate::parallel::WorkerPool;
use crate::solver_cfd::cfd_time_step;
use crate::solver_mfd::mfd_time_step;
use std::time::Instant;

/// Either scheme's spatial operators, built once per grid and reused by
/// every time step. One instance exists per run, so the variant size
/// imbalance is harmless.
#[allow(clippy::large_enum_variant)]
pub enum SchemeOperators {
    Compact(CfdOperatorSet),
    Mimetic(MimeticOperatorSet),
}

impl SchemeOperators {
    pub fn build(scheme: Scheme, n: usize) -> Result<Self, Error> {
        Ok(match scheme {
            Scheme::Compact => SchemeOperators::Compact(build_cfd_operators(n)?),
            Scheme::Mimetic => SchemeOperators::Mimetic(build_mimetic_operators(n)?),
        })
    }

    #[allow(clippy::too_many_arguments)]
    pub fn step(
        &self,
        state: &WaveState,
        material: &MaterialField,
        case: &ManufacturedCase,
        cfg: &AdiConfig,
        dt: f64,
        pool: &WorkerPool,
    ) -> Result<(WaveState, AdiStepStats), Error> {
        match self {
            SchemeOperators::Compact(ops) => {
                cfd_time_step(state, ops, material, case, cfg, dt, pool)
            }
            SchemeOperators::Mimetic(ops) => {
                mfd_time_step(state, ops, material, case, cfg, dt, pool)
            }
        }
    }
}

/// Outcome of one full simulation at one grid size.
#[derive(Debug, Clone)]
pub struct RunResult {
    pub n: usize,
    pub h: f64,
    /// Nominal step; the final step may be shortened to land on the end time.
    pub dt: f64,
    pub steps: usize,
    /// Frobenius norm of the interior pressure error at the final time.
    pub error_fro: f64,
    /// Mean fixed-point iterations per sweep (two sweeps per step).
    pub avg_inner_iters: f64,
    /// Largest per-sweep iteration count seen.
    pub max_inner_iters: usize,
    /// True when every sweep met its tolerance before the iteration cap. On
    /// coarse grids the cap often lands first; the leftover fixed-point
    /// error sits far below the spatial error, so this is informational.
    pub all_converged: bool,
    pub initial_u_norm: f64,
    pub max_u_norm: f64,
    pub wall_time_s: f64,
    pub final_state: WaveState,
}

/// Integrates the case from t = 0 over `periods` temporal periods with
/// dt = cfl/(N·c_max), shortening the final step to land exactly on the end
/// time, and measures the final-time interior pressure error.
pub fn run_case(
    scheme: Scheme,
    case: &ManufacturedCase,
    n: usize,
    cfg: &AdiConfig,
    periods: f64,
    pool: &WorkerPool,
) -> Result<RunResult, Error> {
    case.validate()?;
    cfg.validate()?;
    if !periods.is_finite() || periods <= 0.0 {
        return Err(Error::InvalidConfig(format!(
            "periods must be finite and positive, got {periods}"
        )));
    }
    let grid = GridSpec::new(n)?;
    let ops = SchemeOperators::build(scheme, n)?;
    let material = case.material(&grid, scheme);
    let dt_nom = time_step(cfg.cfl, n, material.c_max);
    let t_end = periods * case.period;

    let mut state = case.sample_initial_state(scheme, n)?;
    let initial_u_norm = frobenius_norm(&state.u);
    let mut max_u_norm = initial_u_norm;
    let mut steps = 0usize;
    let mut iter_sum = 0usize;
    let mut max_inner = 0usize;
    let mut all_converged = true;

    let clock = Instant::now();
    while state.time < t_end - 1e-12 * t_end {
        let dt = dt_nom.min(t_end - state.time);
        let (next, stats) = ops.step(&state, &material, case, cfg, dt, pool)?;
        state = next;
        steps += 1;
        iter_sum += stats.rows.iterations + stats.cols.iterations;
        max_inner = max_inner.max(stats.max_inner_iterations());
        all_converged &= stats.converged();
        max_u_norm = max_u_norm.max(frobenius_norm(&state.u));
    }
    let wall_time_s = clock.elapsed().as_secs_f64();

    let exact = case.sample_exact_u(&grid, scheme, state.time);
    let hi = match scheme {
        Scheme::Compact => n,
        Scheme::Mimetic => n + 1,
    };
    let error_fro = frobenius_distance(
        &state.u.copy_region(1..hi, 1..hi),
        &exact.copy_region(1..hi, 1..hi),
    );
    Ok(RunResult {
        n,
        h: grid.h,
        dt: dt_nom,
        steps,
        error_fro,
        avg_inner_iters: iter_sum as f64 / (2 * steps).max(1) as f64,
        max_inner_iters: max_inner,
        all_converged,
        initial_u_norm,
        max_u_norm,
        wall_time_s,
        final_state: state,
    })
}

/// Pairwise observed orders: rate_i = ln(e_{i-1}/e_i) / ln(N_i/N_{i-1}).
pub fn estimate_rates(errors: &[f64], ns: &[usize]) -> Result<Vec<f64>, Error> {
    if errors.len() != ns.len() {
        return Err(Error::ShapeMismatch {
            what: "rate estimation",
            expected: format!("{} errors", ns.len()),
            found: format!("{} errors", errors.len()),
        });
    }
    for (index, &value) in errors.iter().enumerate() {
        if !value.is_finite() || value <= 0.0 {
            return Err(Error::NonPositiveError { index, value });
        }
    }
    for w in ns.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::InvalidConfig(format!(
                "grid ladder must be strictly increasing, got {} then {}",
                w[0], w[1]
            )));
        }
    }
    Ok((1..errors.len())
        .map(|i| (errors[i - 1] / errors[i]).ln() / (ns[i] as f64 / ns[i - 1] as f64).ln())
        .collect())
}

/// Arithmetic mean after dropping one maximum and one minimum occurrence.
pub fn trimmed_average(rates: &[f64]) -> Result<f64, Error> {
    if rates.len() < 3 {
        return Err(Error::TooFewRates {
            needed: 3,
            got: rates.len(),
        });
    }
    let mut mx = f64::NEG_INFINITY;
    let mut mn = f64::INFINITY;
    let mut sum = 0.0;
    for &r in rates {
        mx = mx.max(r);
        mn = mn.min(r);
        sum += r;
    }
    Ok((sum - mx - mn) / (rates.len() - 2) as f64)
}

/// A grid ladder's results with pairwise rates and their trimmed average.
#[derive(Debug, Clone)]
pub struct ConvergenceReport {
    pub scheme: Scheme,
    pub case: ManufacturedCase,
    pub results: Vec<RunResult>,
    /// One entry per adjacent ladder pair.
    pub rates: Vec<f64>,
    /// Present once there are at least three rates to trim.
    pub trimmed_avg: Option<f64>,
}

/// Runs the case over every ladder entry in order.
pub fn run_ladder(
    scheme: Scheme,
    case: &ManufacturedCase,
    ns: &[usize],
    cfg: &AdiConfig,
    periods: f64,
    pool: &WorkerPool,
) -> Result<ConvergenceReport, Error> {
    if ns.is_empty() {
        return Err(Error::InvalidConfig("grid ladder is empty".into()));
    }
    let mut results = Vec::with_capacity(ns.len());
    for &n in ns {
        results.push(run_case(scheme, case, n, cfg, periods, pool)?);
    }
    let errors: Vec<f64> = results.iter().map(|r| r.error_fro).collect();
    let rates = if ns.len() >= 2 {
        estimate_rates(&errors, ns)?
    } else {
        Vec::new()
    };
    let trimmed_avg = trimmed_average(&rates).ok();
    Ok(ConvergenceReport {
        scheme,
        case: *case,
        results,
        rates,
        trimmed_avg,
    })
}

/// One row per ladder entry; the rate column is empty on the first row; a
/// trailing AVERAGE row carries the trimmed mean in the rate column.
pub fn report_csv(report: &ConvergenceReport) -> String {
    let mut out =
        String::from("scheme,gamma,k,N,h,dt,steps,error_fro,rate,avg_inner_iters,wall_time_s\n");
    for (i, r) in report.results.iter().enumerate() {
        let rate = if i == 0 {
            String::new()
        } else {
            format!("{:.4}", report.rates[i - 1])
        };
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{:e},{},{:.3},{:.6}\n",
            report.scheme.tag(),
            report.case.gamma,
            report.case.k,
            r.n,
            r.h,
            r.dt,
            r.steps,
            r.error_fro,
            rate,
            r.avg_inner_iters,
            r.wall_time_s,
        ));
    }
    match report.trimmed_avg {
        Some(avg) => out.push_str(&format!("AVERAGE,,,,,,,,{avg:.4},,\n")),
        None => out.push_str("AVERAGE,,,,,,,,,,\n"),
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::allocate_state;

    #[test]
    fn rates_recover_exact_power_laws() {
        let ns = [16usize, 24, 32, 48, 64];
        for p in [1.0, 2.0, 4.0, 2.5] {
            let errors: Vec<f64> = ns.iter().map(|&n| 3.7 * (n as f64).powf(-p)).collect();
            for rate in estimate_rates(&errors, &ns).unwrap() {
                assert!((rate - p).abs() <= 1e-12, "rate {rate} vs exponent {p}");
            }
        }
    }

    #[test]
    fn pinned_rate_examples() {
        let r = estimate_rates(&[1.0, 1.0 / 16.0], &[16, 32]).unwrap();
        assert!((r[0] - 4.0).abs() <= 1e-12);
        let r = estimate_rates(&[1.0, 0.25], &[16, 32]).unwrap();
        assert!((r[0] - 2.0).abs() <= 1e-12);
        // Non-dyadic refinement 16 -> 24.
        let e1 = 1e-2;
        let e2 = 1e-2 * (2.0_f64 / 3.0).powi(2);
        let r = estimate_rates(&[e1, e2], &[16, 24]).unwrap();
        assert!((r[0] - 2.0).abs() <= 1e-12);
    }

    #[test]
    fn rate_preconditions() {
        assert!(matches!(
            estimate_rates(&[1.0, 0.0], &[16, 32]),
            Err(Error::NonPositiveError { index: 1, .. })
        ));
        assert!(matches!(
            estimate_rates(&[1.0, -2.0], &[16, 32]),
            Err(Error::NonPositiveError { .. })
        ));
        assert!(estimate_rates(&[1.0, 0.5], &[32, 32]).is_err());
        assert!(estimate_rates(&[1.0, 0.5, 0.2], &[16, 32]).is_err());
    }

    #[test]
    fn trimmed_average_drops_one_extreme_each() {
        assert_eq!(trimmed_average(&[1.0, 2.0, 3.0]).unwrap(), 2.0);
        // All equal: removing one max and one min occurrence leaves the value.
        assert_eq!(trimmed_average(&[2.0, 2.0, 2.0, 2.0]).unwrap(), 2.0);
        assert!(matches!(
            trimmed_average(&[1.0, 2.0]),
            Err(Error::TooFewRates { needed: 3, got: 2 })
        ));
    }

    #[test]
    fn trimmed_average_reproduces_published_columns() {
        // Smooth-case pairwise rates across the full ladder; published
        // trimmed mean 4.02.
        let smooth = [5.41, 4.78, 5.92, 5.06, 3.64, 0.22, 4.02, 2.52, 2.70];
        assert!((trimmed_average(&smooth).unwrap() - 4.02).abs() <= 0.01);
        // Rough-case (gamma = k = 9) column; published trimmed mean 1.88.
        let rough = [4.04, 1.93, 1.92, 1.94, 1.97, 2.01, 1.96, 1.40, -0.17];
        assert!((trimmed_average(&rough).unwrap() - 1.88).abs() <= 0.01);
    }

    #[test]
    fn trimmed_average_is_permutation_invariant() {
        let rates = [3.1, 0.2, 4.9, 4.0, 2.8];
        let base = trimmed_average(&rates).unwrap();
        let mut rotated = rates;
        for _ in 0..rates.len() {
            rotated.rotate_left(1);
            // Summation order may differ, so allow rounding slack.
            assert!((trimmed_average(&rotated).unwrap() - base).abs() <= 1e-14);
        }
    }

    #[test]
    fn short_run_has_pinned_step_size_and_finite_error() {
        let case = ManufacturedCase::smooth();
        let cfg = AdiConfig::for_scheme(Scheme::Compact);
        let pool = WorkerPool::new(1);
        // A twentieth of a period: a handful of steps, cheap.
        let r = run_case(Scheme::Compact, &case, 16, &cfg, 0.05, &pool).unwrap();
        assert_eq!(r.dt, 0.056875);
        assert_eq!(r.steps, 1); // 0.05 periods is shorter than one step
        assert!(r.error_fro.is_finite() && r.error_fro > 0.0);
        assert!(r.max_inner_iters <= cfg.k_max);
        assert!((r.final_state.time - 0.05 * case.period).abs() <= 1e-12);

        let cfg = AdiConfig::for_scheme(Scheme::Mimetic);
        let r = run_case(Scheme::Mimetic, &case, 16, &cfg, 0.05, &pool).unwrap();
        assert_eq!(r.dt, 0.050625);
        assert!(r.error_fro.is_finite() && r.error_fro > 0.0);
    }

    #[test]
    fn final_step_lands_exactly_on_the_end_time() {
        let case = ManufacturedCase::smooth();
        let cfg = AdiConfig::for_scheme(Scheme::Compact);
        let pool = WorkerPool::new(1);
        let r = run_case(Scheme::Compact, &case, 16, &cfg, 0.5, &pool).unwrap();
        let t_end = 0.5 * case.period;
        assert!((r.final_state.time - t_end).abs() <= 1e-12 * t_end);
        // The nominal step does not divide the horizon: the counted steps
        // must cover it with one shortened step at the end.
        assert_eq!(r.steps, (t_end / r.dt).ceil() as usize);
    }

    #[test]
    fn csv_shape_and_average_row() {
        let case = ManufacturedCase::smooth();
        let mk = |n: usize, e: f64| RunResult {
            n,
            h: 1.0 / n as f64,
            dt: 0.01,
            steps: 10,
            error_fro: e,
            avg_inner_iters: 6.0,
            max_inner_iters: 7,
            all_converged: true,
            initial_u_norm: 1.0,
            max_u_norm: 1.0,
            wall_time_s: 0.25,
            final_state: allocate_state(Scheme::Compact, n).unwrap(),
        };
        let results = vec![mk(16, 1e-2), mk(32, 1e-3), mk(64, 1e-4), mk(128, 1e-5)];
        let ns = [16, 32, 64, 128];
        let errors: Vec<f64> = results.iter().map(|r| r.error_fro).collect();
        let rates = estimate_rates(&errors, &ns).unwrap();
        let trimmed_avg = trimmed_average(&rates).ok();
        let report = ConvergenceReport {
            scheme: Scheme::Compact,
            case,
            results,
            rates,
            trimmed_avg,
        };
        let csv = report_csv(&report);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 1 + 4 + 1);
        assert_eq!(
            lines[0],
            "scheme,gamma,k,N,h,dt,steps,error_fro,rate,avg_inner_iters,wall_time_s"
        );
        for line in &lines {
            assert_eq!(line.matches(',').count(), 10, "11 fields in {line}");
        }
        // First data row has an empty rate field; later rows do not.
        assert!(lines[1].contains(",,6.000,"));
        assert!(lines[2].contains(",3.3219,"));
        assert!(lines[5].starts_with("AVERAGE,,,,,,,,3.3219,,"));
    }
}
