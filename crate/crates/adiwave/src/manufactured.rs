//! Closed-form reference solution with a matching source term.
//!
//! The spatial profile combines a separable sine wave with an optional
//! polynomial part whose regularity is controlled by the exponent `k`:
//!
//! ```text
//! S(x, y) = gamma * (x^k - (1-x)^k + y^k - (1-y)^k) + sin(a x) sin(a y),
//! a = 2 pi / lambda
//! ```
//!
//! The fields
//!
//! ```text
//! u =  S(x, y) cos(omega t)
//! v = -S_x(x, y) sin(omega t) / (rho omega)
//! w = -S_y(x, y) sin(omega t) / (rho omega)
//! ```
//!
//! satisfy both velocity equations exactly, and the pressure equation with
//! the source
//!
//! ```text
//! f = -sin(omega t) * (omega S + kappa / (rho omega) * Lap S).
//! ```
//!
//! With `gamma = 0` the solution is smooth; with `gamma > 0` and small `k`
//! the polynomial part has limited regularity at the boundary, which caps
//! the observable convergence order.

use crate::error::Error;
use crate::fields::{allocate_state, GridSpec, MaterialField, Scheme, WaveState};
use crate::linalg::DenseMatrix;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ManufacturedCase {
    /// Amplitude of the polynomial part; 0 disables it.
    pub gamma: f64,
    /// Exponent of the polynomial part.
    pub k: u32,
    /// Wavelength of the sine part.
    pub lambda: f64,
    /// Temporal period.
    pub period: f64,
    /// Bulk modulus (homogeneous).
    pub kappa: f64,
    /// Density (homogeneous).
    pub rho: f64,
}

pub const DEFAULT_LAMBDA: f64 = 0.25;
pub const DEFAULT_PERIOD: f64 = std::f64::consts::FRAC_1_SQRT_2;

impl Default for ManufacturedCase {
    fn default() -> Self {
        ManufacturedCase {
            gamma: 0.0,
            k: 1,
            lambda: DEFAULT_LAMBDA,
            period: DEFAULT_PERIOD,
            kappa: 1.0,
            rho: 1.0,
        }
    }
}

impl ManufacturedCase {
    /// Smooth case: pure sine profile.
    pub fn smooth() -> Self {
        Self::default()
    }

    /// Adds the polynomial part with amplitude `gamma` and exponent `k`.
    pub fn with_polynomial(gamma: f64, k: u32) -> Self {
        ManufacturedCase {
            gamma,
            k,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), Error> {
        for (name, v) in [
            ("lambda", self.lambda),
            ("period", self.period),
            ("kappa", self.kappa),
            ("rho", self.rho),
        ] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::InvalidConfig(format!(
                    "{name} must be finite and positive, got {v}"
                )));
            }
        }
        if !self.gamma.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "gamma must be finite, got {}",
                self.gamma
            )));
        }
        if self.k == 0 {
            return Err(Error::InvalidConfig(
                "polynomial exponent k must be at least 1".into(),
            ));
        }
        Ok(())
    }

    pub fn omega(&self) -> f64 {
        2.0 * PI / self.period
    }

    fn a(&self) -> f64 {
        2.0 * PI / self.lambda
    }

    pub fn wave_speed(&self) -> f64 {
        (self.kappa / self.rho).sqrt()
    }

    pub fn material(&self, grid: &GridSpec, scheme: Scheme) -> MaterialField {
        MaterialField::constant(grid, scheme, self.kappa, self.rho)
    }

    // -- spatial profile and its derivatives --------------------------------

    fn s(&self, x: f64, y: f64) -> f64 {
        let a = self.a();
        let k = self.k as i32;
        let poly = self.gamma * (x.powi(k) - (1.0 - x).powi(k) + y.powi(k) - (1.0 - y).powi(k));
        poly + (a * x).sin() * (a * y).sin()
    }

    fn s_x(&self, x: f64, y: f64) -> f64 {
        let a = self.a();
        let poly = if self.k == 0 {
            0.0
        } else {
            let km1 = (self.k - 1) as i32;
            self.gamma * self.k as f64 * (x.powi(km1) + (1.0 - x).powi(km1))
        };
        poly + a * (a * x).cos() * (a * y).sin()
    }

    fn s_y(&self, x: f64, y: f64) -> f64 {
        self.s_x(y, x)
    }

    fn lap_s(&self, x: f64, y: f64) -> f64 {
        let a = self.a();
        // The k(k-1) prefactor vanishes for k < 2; skip the powers entirely
        // so x^(k-2) never sees a negative exponent at x = 0.
        let poly = if self.k < 2 {
            0.0
        } else {
            let km2 = (self.k - 2) as i32;
            self.gamma
                * (self.k * (self.k - 1)) as f64
                * (x.powi(km2) - (1.0 - x).powi(km2) + y.powi(km2) - (1.0 - y).powi(km2))
        };
        poly - 2.0 * a * a * (a * x).sin() * (a * y).sin()
    }

    // -- fields --------------------------------------------------------------

    pub fn eval_u(&self, x: f64, y: f64, t: f64) -> f64 {
        self.s(x, y) * (self.omega() * t).cos()
    }

    pub fn eval_v(&self, x: f64, y: f64, t: f64) -> f64 {
        let omega = self.omega();
        -self.s_x(x, y) * (omega * t).sin() / (self.rho * omega)
    }

    pub fn eval_w(&self, x: f64, y: f64, t: f64) -> f64 {
        let omega = self.omega();
        -self.s_y(x, y) * (omega * t).sin() / (self.rho * omega)
    }

    /// Source in the pressure equation `u_t = -kappa (v_x + w_y) + f`.
    pub fn eval_f(&self, x: f64, y: f64, t: f64) -> f64 {
        let omega = self.omega();
        -(omega * t).sin()
            * (omega * self.s(x, y) + self.kappa / (self.rho * omega) * self.lap_s(x, y))
    }

    // -- grid sampling --------------------------------------------------------

    fn pressure_axes(&self, grid: &GridSpec, scheme: Scheme) -> Vec<f64> {
        match scheme {
            Scheme::Compact => grid.nodes(),
            Scheme::Mimetic => grid.centers_bounded(),
        }
    }

    /// Exact pressure on the scheme's pressure points.
    pub fn sample_exact_u(&self, grid: &GridSpec, scheme: Scheme, t: f64) -> DenseMatrix {
        let ax = self.pressure_axes(grid, scheme);
        DenseMatrix::from_fn(ax.len(), ax.len(), |r, c| self.eval_u(ax[c], ax[r], t))
    }

    /// Exact x-velocity on the scheme's x-velocity points.
    pub fn sample_exact_v(&self, grid: &GridSpec, scheme: Scheme, t: f64) -> DenseMatrix {
        let xs = grid.nodes();
        let ys = self.pressure_axes(grid, scheme);
        DenseMatrix::from_fn(ys.len(), xs.len(), |r, c| self.eval_v(xs[c], ys[r], t))
    }

    /// Exact y-velocity on the scheme's y-velocity points.
    pub fn sample_exact_w(&self, grid: &GridSpec, scheme: Scheme, t: f64) -> DenseMatrix {
        let xs = self.pressure_axes(grid, scheme);
        let ys = grid.nodes();
        DenseMatrix::from_fn(ys.len(), xs.len(), |r, c| self.eval_w(xs[c], ys[r], t))
    }

    /// Full exact state at time `t`.
    pub fn sample_state(&self, scheme: Scheme, n: usize, t: f64) -> Result<WaveState, Error> {
        let grid = GridSpec::new(n)?;
        let mut state = allocate_state(scheme, n)?;
        state.u = self.sample_exact_u(&grid, scheme, t);
        state.v = self.sample_exact_v(&grid, scheme, t);
        state.w = self.sample_exact_w(&grid, scheme, t);
        state.time = t;
        Ok(state)
    }

    /// Initial data for a simulation (both velocities vanish at t = 0).
    pub fn sample_initial_state(&self, scheme: Scheme, n: usize) -> Result<WaveState, Error> {
        self.sample_state(scheme, n, 0.0)
    }

    /// Source sampled at the pressure update points: interior nodes for the
    /// compact scheme, cell centers for the mimetic one.
    pub fn sample_source_interior(&self, grid: &GridSpec, scheme: Scheme, t: f64) -> DenseMatrix {
        let ax = self.pressure_axes(grid, scheme);
        let inner = &ax[1..ax.len() - 1];
        DenseMatrix::from_fn(inner.len(), inner.len(), |r, c| {
            self.eval_f(inner[c], inner[r], t)
        })
    }

    /// Dirichlet pressure data on the four edges at time `t`.
    pub fn boundary_trace(&self, grid: &GridSpec, scheme: Scheme, t: f64) -> BoundaryTrace {
        let ax = self.pressure_axes(grid, scheme);
        BoundaryTrace {
            bottom: ax.iter().map(|&x| self.eval_u(x, 0.0, t)).collect(),
            top: ax.iter().map(|&x| self.eval_u(x, 1.0, t)).collect(),
            left: ax.iter().map(|&y| self.eval_u(0.0, y, t)).collect(),
            right: ax.iter().map(|&y| self.eval_u(1.0, y, t)).collect(),
        }
    }

    /// Overwrites the first and last rows of the x-velocity matrix (the
    /// y = 0 and y = 1 edges) with exact values. Those rows never enter the
    /// update stencils; keeping them current makes the stored state complete.
    pub fn fill_v_boundary_rows(&self, grid: &GridSpec, t: f64, v: &mut DenseMatrix) {
        let xs = grid.nodes();
        debug_assert_eq!(v.cols(), xs.len());
        let last = v.rows() - 1;
        for (c, &x) in xs.iter().enumerate() {
            v[(0, c)] = self.eval_v(x, 0.0, t);
            v[(last, c)] = self.eval_v(x, 1.0, t);
        }
    }

    /// Overwrites the first and last columns of the y-velocity matrix (the
    /// x = 0 and x = 1 edges) with exact values.
    pub fn fill_w_boundary_cols(&self, grid: &GridSpec, t: f64, w: &mut DenseMatrix) {
        let ys = grid.nodes();
        debug_assert_eq!(w.rows(), ys.len());
        let last = w.cols() - 1;
        for (r, &y) in ys.iter().enumerate() {
            w[(r, 0)] = self.eval_w(0.0, y, t);
            w[(r, last)] = self.eval_w(1.0, y, t);
        }
    }

    /// Overwrites the first and last columns of the x-velocity matrix (the
    /// x = 0 and x = 1 walls) with exact values. The wall-normal velocity is
    /// boundary data for the nodal scheme: it closes the reduced stencils
    /// and is never treated as an unknown.
    pub fn fill_v_boundary_cols(&self, grid: &GridSpec, t: f64, v: &mut DenseMatrix) {
        let ys = grid.nodes();
        debug_assert_eq!(v.rows(), ys.len());
        let last = v.cols() - 1;
        for (r, &y) in ys.iter().enumerate() {
            v[(r, 0)] = self.eval_v(0.0, y, t);
            v[(r, last)] = self.eval_v(1.0, y, t);
        }
    }

    /// Overwrites the first and last rows of the y-velocity matrix (the
    /// y = 0 and y = 1 walls) with exact values; the wall-normal counterpart
    /// of [`Self::fill_v_boundary_cols`].
    pub fn fill_w_boundary_rows(&self, grid: &GridSpec, t: f64, w: &mut DenseMatrix) {
        let xs = grid.nodes();
        debug_assert_eq!(w.cols(), xs.len());
        let last = w.rows() - 1;
        for (c, &x) in xs.iter().enumerate() {
            w[(0, c)] = self.eval_w(x, 0.0, t);
            w[(last, c)] = self.eval_w(x, 1.0, t);
        }
    }
}

/// Pressure values along the four edges of the square, ordered by the
/// pressure matrix's own abscissae.
#[derive(Debug, Clone)]
pub struct BoundaryTrace {
    pub bottom: Vec<f64>,
    pub top: Vec<f64>,
    pub left: Vec<f64>,
    pub right: Vec<f64>,
}

impl BoundaryTrace {
    /// Writes the trace onto the outermost ring of a pressure matrix. The
    /// corners are written twice with identical values.
    pub fn apply_to(&self, u: &mut DenseMatrix) {
        let (rows, cols) = u.shape();
        debug_assert_eq!(self.bottom.len(), cols);
        debug_assert_eq!(self.left.len(), rows);
        u.row_mut(0).copy_from_slice(&self.bottom);
        u.row_mut(rows - 1).copy_from_slice(&self.top);
        for r in 0..rows {
            u[(r, 0)] = self.left[r];
            u[(r, cols - 1)] = self.right[r];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    #[test]
    fn pinned_point_values() {
        // Pure sine, wavelength 1/4: at x = y = 1/16 the phase is pi/2 on
        // both axes, so the profile equals exactly 1.
        let smooth = ManufacturedCase::smooth();
        close(smooth.eval_u(1.0 / 16.0, 1.0 / 16.0, 0.0), 1.0, 1e-12);
        // Polynomial part at the origin: gamma * (0 - 1 + 0 - 1) = -2 gamma,
        // and the sine part vanishes there.
        close(
            ManufacturedCase::with_polynomial(2.0, 2).eval_u(0.0, 0.0, 0.0),
            -4.0,
            0.0,
        );
        close(
            ManufacturedCase::with_polynomial(9.0, 9).eval_u(0.0, 0.0, 0.0),
            -18.0,
            0.0,
        );
    }

    #[test]
    fn velocities_vanish_at_start_and_pressure_is_periodic() {
        let case = ManufacturedCase::with_polynomial(9.0, 9);
        close(case.eval_v(0.3, 0.7, 0.0), 0.0, 0.0);
        close(case.eval_w(0.3, 0.7, 0.0), 0.0, 0.0);
        let (x, y) = (0.3, 0.7);
        let u0 = case.eval_u(x, y, 0.25);
        let u1 = case.eval_u(x, y, 0.25 + case.period);
        close(u0, u1, 1e-9 * u0.abs().max(1.0));
    }

    #[test]
    fn low_exponents_evaluate_finite_on_the_boundary() {
        for k in 1..3 {
            let case = ManufacturedCase::with_polynomial(1.0, k);
            for &(x, y) in &[(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0), (0.5, 0.0)] {
                assert!(case.eval_u(x, y, 0.1).is_finite());
                assert!(case.eval_v(x, y, 0.1).is_finite());
                assert!(case.eval_w(x, y, 0.1).is_finite());
                assert!(case.eval_f(x, y, 0.1).is_finite());
            }
        }
    }

    #[test]
    fn source_closes_the_pressure_equation() {
        // Central finite differences of the exact fields must reproduce the
        // source: f = u_t + kappa (v_x + w_y).
        let case = ManufacturedCase::with_polynomial(2.0, 2);
        let (x, y, t) = (0.37, 0.61, 0.29);
        let d = 1e-6;
        let u_t = (case.eval_u(x, y, t + d) - case.eval_u(x, y, t - d)) / (2.0 * d);
        let v_x = (case.eval_v(x + d, y, t) - case.eval_v(x - d, y, t)) / (2.0 * d);
        let w_y = (case.eval_w(x, y + d, t) - case.eval_w(x, y - d, t)) / (2.0 * d);
        let f = case.eval_f(x, y, t);
        close(u_t + case.kappa * (v_x + w_y), f, 1e-6 * f.abs().max(1.0));
    }

    #[test]
    fn velocity_equations_close_without_source() {
        // rho v_t = -u_x and rho w_t = -u_y.
        let case = ManufacturedCase::with_polynomial(9.0, 9);
        let (x, y, t) = (0.42, 0.13, 0.55);
        let d = 1e-6;
        let v_t = (case.eval_v(x, y, t + d) - case.eval_v(x, y, t - d)) / (2.0 * d);
        let u_x = (case.eval_u(x + d, y, t) - case.eval_u(x - d, y, t)) / (2.0 * d);
        close(case.rho * v_t, -u_x, 1e-5 * u_x.abs().max(1.0));
        let w_t = (case.eval_w(x, y, t + d) - case.eval_w(x, y, t - d)) / (2.0 * d);
        let u_y = (case.eval_u(x, y + d, t) - case.eval_u(x, y - d, t)) / (2.0 * d);
        close(case.rho * w_t, -u_y, 1e-5 * u_y.abs().max(1.0));
    }

    #[test]
    fn sampled_state_shapes_and_trace() {
        let case = ManufacturedCase::smooth();
        let grid = GridSpec::new(8).unwrap();
        let state = case.sample_state(Scheme::Mimetic, 8, 0.2).unwrap();
        assert_eq!(state.u.shape(), (10, 10));
        assert_eq!(state.v.shape(), (10, 9));
        assert_eq!(state.w.shape(), (9, 10));
        assert_eq!(state.time, 0.2);

        // The trace applied to a zero matrix must agree with the sampled
        // exact pressure on the ring.
        let trace = case.boundary_trace(&grid, Scheme::Mimetic, 0.2);
        let mut ring = DenseMatrix::zeros(10, 10);
        trace.apply_to(&mut ring);
        let exact = case.sample_exact_u(&grid, Scheme::Mimetic, 0.2);
        for r in 0..10 {
            for c in 0..10 {
                let on_ring = r == 0 || r == 9 || c == 0 || c == 9;
                let want = if on_ring { exact.get(r, c) } else { 0.0 };
                assert_eq!(ring.get(r, c), want, "at ({r},{c})");
            }
        }
    }

    #[test]
    fn velocity_edge_refresh() {
        let case = ManufacturedCase::with_polynomial(2.0, 2);
        let grid = GridSpec::new(8).unwrap();
        let t = 0.33;
        let mut state = case.sample_initial_state(Scheme::Compact, 8).unwrap();
        case.fill_v_boundary_rows(&grid, t, &mut state.v);
        case.fill_w_boundary_cols(&grid, t, &mut state.w);
        let nodes = grid.nodes();
        for (c, &x) in nodes.iter().enumerate() {
            assert_eq!(state.v.get(0, c), case.eval_v(x, 0.0, t));
            assert_eq!(state.v.get(8, c), case.eval_v(x, 1.0, t));
        }
        for (r, &y) in nodes.iter().enumerate() {
            assert_eq!(state.w.get(r, 0), case.eval_w(0.0, y, t));
            assert_eq!(state.w.get(r, 8), case.eval_w(1.0, y, t));
        }
    }
}
