//! Finite-difference closure gate for the manufactured solution: central
//! differences of the closed-form fields must satisfy the forced pressure
//! equation and both (source-free) velocity equations at randomly drawn
//! space-time points, for the smooth profile and the rough polynomial ones.

use adiwave::manufactured::ManufacturedCase;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const DELTA: f64 = 1e-5;
const REL_TOL: f64 = 1e-7;
const POINTS: usize = 100;

fn central(f: impl Fn(f64) -> f64, x: f64) -> f64 {
    (f(x + DELTA) - f(x - DELTA)) / (2.0 * DELTA)
}

fn check_case(case: &ManufacturedCase, label: &str) {
    // One fixed stream per case keeps the gate reproducible.
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed + case.k as u64);
    let horizon = 5.0 * case.period;
    for i in 0..POINTS {
        // Stay a stencil-width off the walls and the initial time.
        let x = rng.gen_range(0.01..0.99);
        let y = rng.gen_range(0.01..0.99);
        let t = rng.gen_range(0.01..horizon);

        let ut = central(|s| case.eval_u(x, y, s), t);
        let vx = central(|s| case.eval_v(s, y, t), x);
        let wy = central(|s| case.eval_w(x, s, t), y);
        let f = case.eval_f(x, y, t);
        let residual = ut + case.kappa * (vx + wy) - f;
        let scale = 1.0_f64.max(ut.abs() + case.kappa * (vx.abs() + wy.abs()) + f.abs());
        assert!(
            residual.abs() <= REL_TOL * scale,
            "{label} point {i} ({x:.4}, {y:.4}, {t:.4}): \
             pressure residual {residual:e} exceeds {REL_TOL:e} relative"
        );

        let vt = central(|s| case.eval_v(x, y, s), t);
        let ux = central(|s| case.eval_u(s, y, t), x);
        let rv = case.rho * vt + ux;
        let scale = 1.0_f64.max(case.rho * vt.abs() + ux.abs());
        assert!(
            rv.abs() <= REL_TOL * scale,
            "{label} point {i}: x-velocity residual {rv:e}"
        );

        let wt = central(|s| case.eval_w(x, y, s), t);
        let uy = central(|s| case.eval_u(x, s, t), y);
        let rw = case.rho * wt + uy;
        let scale = 1.0_f64.max(case.rho * wt.abs() + uy.abs());
        assert!(
            rw.abs() <= REL_TOL * scale,
            "{label} point {i}: y-velocity residual {rw:e}"
        );
    }
}

#[test]
fn smooth_case_closes() {
    check_case(&ManufacturedCase::smooth(), "smooth");
}

#[test]
fn mild_polynomial_case_closes() {
    check_case(&ManufacturedCase::with_polynomial(2.0, 2), "gamma=k=2");
}

#[test]
fn rough_polynomial_case_closes() {
    check_case(&ManufacturedCase::with_polynomial(9.0, 9), "gamma=k=9");
}
