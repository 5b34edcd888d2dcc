//! Fixed-step timing runs and worker-scaling measurements.
//!
//! Benchmarks time the stepping loop only: operator assembly, initial-state
//! sampling, and a single warm-up step are excluded. Every worker count must
//! reproduce the single-worker pressure field to near machine precision —
//! the sweeps split work into contiguous row blocks and reduce norms in a
//! fixed order, so the results are bitwise identical by construction and
//! any drift indicates a broken reduction.

use crate::adi::{time_step, AdiConfig};
use crate::convergence::SchemeOperators;
use crate::error::Error;
use crate::fields::{GridSpec, Scheme, WaveState};
use crate::linalg::{frobenius_distance, frobenius_norm};
use crate::manufactured::ManufacturedCase;
use crate::parallel::WorkerPool;
use std::time::Instant;

/// One timed configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRecord {
    pub scheme: Scheme,
    pub n: usize,
    pub workers: usize,
    pub steps: usize,
    pub wall_time_s: f64,
    /// Single-worker wall time divided by this record's wall time.
    pub speedup: f64,
}

/// Integrates `steps` fixed-size steps and returns the stepping-loop wall
/// time and the final state. One untimed warm-up step precedes the clock.
pub fn time_fixed_steps(
    scheme: Scheme,
    case: &ManufacturedCase,
    n: usize,
    cfg: &AdiConfig,
    steps: usize,
    pool: &WorkerPool,
) -> Result<(f64, WaveState), Error> {
    case.validate()?;
    cfg.validate()?;
    if steps == 0 {
        return Err(Error::InvalidConfig("step count must be positive".into()));
    }
    let grid = GridSpec::new(n)?;
    let ops = SchemeOperators::build(scheme, n)?;
    let material = case.material(&grid, scheme);
    let dt = time_step(cfg.cfl, n, material.c_max);

    let start = case.sample_initial_state(scheme, n)?;
    let (warm, _) = ops.step(&start, &material, case, cfg, dt, pool)?;

    let mut state = warm;
    let clock = Instant::now();
    for _ in 0..steps {
        let (next, _) = ops.step(&state, &material, case, cfg, dt, pool)?;
        state = next;
    }
    // Floor the measurement so speedup ratios stay finite on trivial runs.
    let wall_time_s = clock.elapsed().as_secs_f64().max(1e-9);
    Ok((wall_time_s, state))
}

/// Times the same fixed-step run under each worker count and checks every
/// run against the single-worker pressure field. A single-worker run is
/// prepended when the list lacks one, so the baseline is always measured.
pub fn run_benchmark(
    scheme: Scheme,
    case: &ManufacturedCase,
    n: usize,
    cfg: &AdiConfig,
    workers: &[usize],
    steps: usize,
) -> Result<Vec<BenchRecord>, Error> {
    if workers.is_empty() {
        return Err(Error::InvalidConfig("worker list is empty".into()));
    }
    if let Some(&w) = workers.iter().find(|&&w| w == 0) {
        return Err(Error::InvalidConfig(format!(
            "worker counts must be positive, got {w}"
        )));
    }
    let mut counts: Vec<usize> = Vec::with_capacity(workers.len() + 1);
    if !workers.contains(&1) {
        counts.push(1);
    }
    counts.extend_from_slice(workers);

    let mut records = Vec::with_capacity(counts.len());
    let mut baseline: Option<(f64, WaveState)> = None;
    for &w in &counts {
        let pool = WorkerPool::new(w);
        let (wall, state) = time_fixed_steps(scheme, case, n, cfg, steps, &pool)?;
        let (t1, reference) = match &baseline {
            None => {
                baseline = Some((wall, state.clone()));
                let b = baseline.as_ref().unwrap();
                (b.0, &b.1)
            }
            Some(b) => (b.0, &b.1),
        };
        let ref_norm = frobenius_norm(&reference.u);
        let dev = frobenius_distance(&state.u, &reference.u);
        let rel_dev = if ref_norm > 0.0 { dev / ref_norm } else { dev };
        if rel_dev > 1e-12 {
            return Err(Error::DeterminismViolated {
                workers: w,
                rel_dev,
            });
        }
        records.push(BenchRecord {
            scheme,
            n,
            workers: w,
            steps,
            wall_time_s: wall,
            speedup: t1 / wall,
        });
    }
    Ok(records)
}

/// One row per worker count, single-worker baseline first.
pub fn bench_csv(records: &[BenchRecord]) -> String {
    let mut out = String::from("scheme,N,workers,steps,wall_time_s,speedup\n");
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{:.6},{:.3}\n",
            r.scheme.tag(),
            r.n,
            r.workers,
            r.steps,
            r.wall_time_s,
            r.speedup,
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_step_run_counts_and_validates() {
        let case = ManufacturedCase::smooth();
        let cfg = AdiConfig::for_scheme(Scheme::Compact);
        let pool = WorkerPool::new(1);
        let (wall, state) = time_fixed_steps(Scheme::Compact, &case, 16, &cfg, 3, &pool).unwrap();
        assert!(wall > 0.0);
        // Warm-up plus three timed steps at the pinned step size.
        assert!((state.time - 4.0 * 0.056875).abs() <= 1e-12);
        assert!(time_fixed_steps(Scheme::Compact, &case, 16, &cfg, 0, &pool).is_err());
    }

    #[test]
    fn benchmark_prepends_baseline_and_reports_unit_speedup() {
        let case = ManufacturedCase::smooth();
        let cfg = AdiConfig::for_scheme(Scheme::Mimetic);
        let records = run_benchmark(Scheme::Mimetic, &case, 16, &cfg, &[2], 2).unwrap();
        assert_eq!(records.len(), 2);
        assert_eq!(records[0].workers, 1);
        assert_eq!(records[1].workers, 2);
        assert_eq!(records[0].speedup, 1.0);
        assert!(records[1].speedup > 0.0);
        assert!(run_benchmark(Scheme::Mimetic, &case, 16, &cfg, &[], 2).is_err());
        assert!(run_benchmark(Scheme::Mimetic, &case, 16, &cfg, &[0], 2).is_err());
    }

    #[test]
    fn csv_shape() {
        let records = vec![
            BenchRecord {
                scheme: Scheme::Compact,
                n: 64,
                workers: 1,
                steps: 10,
                wall_time_s: 2.0,
                speedup: 1.0,
            },
            BenchRecord {
                scheme: Scheme::Compact,
                n: 64,
                workers: 4,
                steps: 10,
                wall_time_s: 0.5,
                speedup: 4.0,
            },
        ];
        let csv = bench_csv(&records);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[0], "scheme,N,workers,steps,wall_time_s,speedup");
        assert_eq!(lines[1], "cfd,64,1,10,2.000000,1.000");
        assert_eq!(lines[2], "cfd,64,4,10,0.500000,4.000");
    }
}
