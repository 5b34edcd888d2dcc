//! Shared configuration and bookkeeping for the two ADI solvers.
//!
//! Each time step splits into a row sweep (x-implicit) and a column sweep
//! (y-implicit). Both sweeps resolve the pressure-velocity coupling with a
//! fixed-point iteration whose stopping rule lives here so the two schemes
//! share it verbatim.

use crate::error::Error;
use crate::fields::Scheme;

/// Largest stable Courant number for the compact scheme.
pub const CFL_MAX_COMPACT: f64 = 0.91;
/// Largest stable Courant number for the mimetic scheme.
pub const CFL_MAX_MIMETIC: f64 = 0.81;

/// How a sweep's fixed-point iteration couples the two unknowns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Coupling {
    /// The velocity update sees the pressure iterate just computed.
    #[default]
    Seidel,
    /// Both updates use the previous iterates.
    Jacobi,
}

impl Coupling {
    pub fn tag(self) -> &'static str {
        match self {
            Coupling::Seidel => "seidel",
            Coupling::Jacobi => "jacobi",
        }
    }

    pub fn parse(s: &str) -> Result<Self, Error> {
        match s {
            "seidel" => Ok(Coupling::Seidel),
            "jacobi" => Ok(Coupling::Jacobi),
            other => Err(Error::InvalidConfig(format!(
                "unknown coupling '{other}' (expected seidel or jacobi)"
            ))),
        }
    }
}

impl std::fmt::Display for Coupling {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdiConfig {
    /// Courant number; the step is dt = cfl / (N * c_max). Values beyond the
    /// scheme's ceiling are accepted so instability remains observable.
    pub cfl: f64,
    /// Relative tolerance for the fixed-point iteration, scaled each step by
    /// the Frobenius norm of the current pressure.
    pub eps: f64,
    /// Hard cap on fixed-point sweeps per stage.
    pub k_max: usize,
    /// First iteration at which the stopping test is evaluated.
    pub min_iters_before_check: usize,
    pub coupling: Coupling,
}

impl AdiConfig {
    /// Defaults tuned per scheme; only the Courant ceiling differs.
    pub fn for_scheme(scheme: Scheme) -> Self {
        AdiConfig {
            cfl: match scheme {
                Scheme::Compact => CFL_MAX_COMPACT,
                Scheme::Mimetic => CFL_MAX_MIMETIC,
            },
            eps: 1e-9,
            k_max: 8,
            min_iters_before_check: 6,
            coupling: Coupling::Seidel,
        }
    }

    pub fn validate(&self) -> Result<(), Error> {
        if !self.cfl.is_finite() || self.cfl <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "cfl must be finite and positive, got {}",
                self.cfl
            )));
        }
        if !self.eps.is_finite() || self.eps <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "eps must be finite and positive, got {}",
                self.eps
            )));
        }
        if self.k_max == 0 {
            return Err(Error::InvalidConfig("k_max must be at least 1".into()));
        }
        if self.min_iters_before_check == 0 || self.min_iters_before_check > self.k_max {
            return Err(Error::InvalidConfig(format!(
                "min_iters_before_check must lie in 1..=k_max ({}), got {}",
                self.k_max, self.min_iters_before_check
            )));
        }
        Ok(())
    }
}

/// Time step for a Courant number on an N-cell grid with peak wave speed
/// `c_max`.
pub fn time_step(cfl: f64, n: usize, c_max: f64) -> f64 {
    cfl / (n as f64 * c_max)
}

/// Per-step absolute stopping threshold and iteration bounds.
#[derive(Debug, Clone, Copy)]
pub struct StopRule {
    pub eps_abs: f64,
    pub k_max: usize,
    pub min_check: usize,
}

impl StopRule {
    /// Scales the relative tolerance by a per-step reference norm (the
    /// pressure norm at the step start). A zero reference demands an exactly
    /// stationary iterate, which the zero state satisfies.
    pub fn from_config(cfg: &AdiConfig, reference_norm: f64) -> Self {
        StopRule {
            eps_abs: cfg.eps * reference_norm,
            k_max: cfg.k_max,
            min_check: cfg.min_iters_before_check,
        }
    }

    /// True when iteration `k` (1-based) may stop with increment norm
    /// `delta`. Uses `<=` so a zero threshold accepts an exact fixed point.
    pub fn accepts(&self, k: usize, delta: f64) -> bool {
        k >= self.min_check && delta <= self.eps_abs
    }
}

/// Outcome of one sweep's fixed-point iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct StageStats {
    pub iterations: usize,
    pub final_residual: f64,
    pub converged: bool,
    /// Increment norm after each iteration, in order.
    pub residual_history: Vec<f64>,
}

impl StageStats {
    pub(crate) fn from_history(history: Vec<f64>, converged: bool) -> Self {
        StageStats {
            iterations: history.len(),
            final_residual: history.last().copied().unwrap_or(0.0),
            converged,
            residual_history: history,
        }
    }
}

/// Statistics for one full time step (both sweeps).
#[derive(Debug, Clone, PartialEq)]
pub struct AdiStepStats {
    pub rows: StageStats,
    pub cols: StageStats,
}

impl AdiStepStats {
    pub fn max_inner_iterations(&self) -> usize {
        self.rows.iterations.max(self.cols.iterations)
    }

    pub fn converged(&self) -> bool {
        self.rows.converged && self.cols.converged
    }
}
