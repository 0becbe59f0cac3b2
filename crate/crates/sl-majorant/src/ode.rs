//! Adaptive embedded Runge–Kutta integration (Dormand–Prince 5(4)) for
//! small first-order systems, with a list of mandatory output nodes.
//!
//! The integrator never steps across an output node, so the returned states
//! are exact step endpoints rather than interpolants. This matters for the
//! phase flow, whose right-hand side is only piecewise smooth in x: placing
//! every potential breakpoint on the node list keeps each accepted step
//! inside a region where the data is smooth.

use crate::error::{Error, Result};

/// Step-size and accuracy settings for the embedded pair.
#[derive(Debug, Clone, Copy)]
pub struct StepControl {
    pub rtol: f64,
    pub atol: f64,
    /// Hard upper bound on the step size.
    pub h_max: f64,
}

impl Default for StepControl {
    fn default() -> Self {
        StepControl {
            rtol: 1e-10,
            atol: 1e-12,
            h_max: 1.0,
        }
    }
}

// Dormand–Prince coefficients (classic DOPRI5 tableau).
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
/// 5th-order weights (row 7 of A equals B, giving the FSAL property).
const B: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
/// Difference between the 5th- and embedded 4th-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Integrate y' = rhs(x, y) from `grid[0]` to `grid[last]`, returning the state
/// at every grid node (the first entry is `y0` itself).
///
/// The grid must be strictly increasing. Step size adapts freely between
/// nodes but every node is hit exactly.
pub fn integrate_grid<const N: usize, F>(
    rhs: F,
    grid: &[f64],
    y0: [f64; N],
    ctrl: &StepControl,
) -> Result<Vec<[f64; N]>>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    assert!(grid.len() >= 2, "grid needs at least two nodes");
    debug_assert!(grid.windows(2).all(|w| w[1] > w[0]));

    let mut out = Vec::with_capacity(grid.len());
    out.push(y0);

    let mut x = grid[0];
    let mut y = y0;
    let mut k1 = rhs(x, &y);
    let span = grid[grid.len() - 1] - grid[0];
    let mut h = (ctrl.h_max.min(0.05 * span)).max(1e-8);

    for &target in &grid[1..] {
        while x < target {
            let h_try = h.min(target - x).min(ctrl.h_max);
            if h_try < 1e-14 * (1.0 + x.abs()) {
                return Err(Error::IntegrationFailure { x });
            }
            let (y_new, err, k_last) = dopri5_step(&rhs, x, &y, &k1, h_try);
            let err_norm = error_norm(&y, &y_new, &err, ctrl);
            if err_norm <= 1.0 {
                x += h_try;
                y = y_new;
                k1 = k_last; // FSAL
                let grow = 0.9 * err_norm.powf(-0.2);
                h = h_try * grow.clamp(0.2, 5.0);
            } else {
                let shrink = 0.9 * err_norm.powf(-0.2);
                h = h_try * shrink.clamp(0.2, 0.9);
            }
        }
        // Floating-point landing: x is exactly target because h_try was
        // clipped; re-pin to be safe against accumulated representation drift.
        x = target;
        out.push(y);
    }
    Ok(out)
}

fn dopri5_step<const N: usize, F>(
    rhs: &F,
    x: f64,
    y: &[f64; N],
    k1: &[f64; N],
    h: f64,
) -> ([f64; N], [f64; N], [f64; N])
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let mut k = [[0.0; N]; 7];
    k[0] = *k1;
    for stage in 1..6 {
        let mut yi = *y;
        for (j, kj) in k.iter().enumerate().take(stage) {
            let a = A[stage - 1][j];
            if a != 0.0 {
                for n in 0..N {
                    yi[n] += h * a * kj[n];
                }
            }
        }
        k[stage] = rhs(x + C[stage] * h, &yi);
    }
    // 5th-order solution (also the 7th stage argument, FSAL).
    let mut y5 = *y;
    for (j, kj) in k.iter().enumerate().take(6) {
        let a = A[5][j];
        if a != 0.0 {
            for n in 0..N {
                y5[n] += h * a * kj[n];
            }
        }
    }
    k[6] = rhs(x + h, &y5);

    let mut y_out = *y;
    let mut err = [0.0; N];
    for (j, kj) in k.iter().enumerate() {
        for n in 0..N {
            if B[j] != 0.0 {
                y_out[n] += h * B[j] * kj[n];
            }
            if E[j] != 0.0 {
                err[n] += h * E[j] * kj[n];
            }
        }
    }
    (y_out, err, k[6])
}

fn error_norm<const N: usize>(
    y: &[f64; N],
    y_new: &[f64; N],
    err: &[f64; N],
    ctrl: &StepControl,
) -> f64 {
    let mut sum = 0.0;
    for n in 0..N {
        let scale = ctrl.atol + ctrl.rtol * y[n].abs().max(y_new[n].abs());
        let r = err[n] / scale;
        sum += r * r;
    }
    (sum / N as f64).sqrt().max(1e-30)
}
