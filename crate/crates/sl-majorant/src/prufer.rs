//! Scaled Prüfer phase flow and the lowest Dirichlet eigenvalue.
//!
//! Writing (y, y′/√λ) = ϱ·(sin ϑ, cos ϑ) turns −y″ + qy = λy into the
//! first-order pair
//!
//!   ϑ′ = √λ + |q| sin²ϑ / √λ = (λ + σ)/√λ,   σ = |q| sin²ϑ,
//!   (ln ϱ)′ = (q/√λ) sin ϑ cos ϑ,
//!
//! valid for q ⩽ 0 and λ > 0. The Dirichlet conditions y(0) = y(1) = 0
//! become ϑ(0) = 0, ϑ(1) = π at λ = λ₀, and ϑ(1; λ) is strictly increasing
//! in λ, so the ground eigenvalue is found by bisection on the terminal
//! phase. The flow degenerates as λ → 0⁺; potentials whose ground state
//! sits at or below zero are rejected with [`Error::OutOfPruferDomain`]
//! and belong to the finite-difference solver.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::ode::{integrate_grid, StepControl};
use crate::oracle;
use crate::potential::Potential;
use crate::quad::adaptive_simpson;

/// Smallest spectral parameter the phase flow is asked to handle.
const LAMBDA_FLOOR: f64 = 1e-8;

/// Largest per-piece node count of the output grid.
const MAX_PIECE_NODES: usize = 40_000;

/// Accuracy and sampling settings for the phase solver.
#[derive(Debug, Clone, Copy)]
pub struct SolverControl {
    /// Relative tolerance of the adaptive integrator.
    pub rtol: f64,
    /// Absolute tolerance of the adaptive integrator.
    pub atol: f64,
    /// Target number of output nodes across \[0,1\]; pieces with fast phase
    /// rotation are refined beyond this automatically.
    pub n_output: usize,
}

impl Default for SolverControl {
    fn default() -> Self {
        SolverControl {
            rtol: 1e-10,
            atol: 1e-12,
            n_output: 2000,
        }
    }
}

impl SolverControl {
    fn step_control(&self) -> StepControl {
        StepControl {
            rtol: self.rtol,
            atol: self.atol,
            h_max: 1.0,
        }
    }
}

/// Sampled solution of the phase equation at one spectral parameter.
#[derive(Debug, Clone)]
pub struct PhaseTrajectory {
    /// Spectral parameter of the flow (> 0).
    pub lambda: f64,
    /// Increasing abscissae including 0 and 1 and every potential breakpoint.
    pub nodes: Vec<f64>,
    /// Phase ϑ at each node; ϑ(0) = 0 and ϑ is strictly increasing.
    pub theta: Vec<f64>,
    /// ϑ′ at each node (right-continuous in the potential).
    pub theta_prime: Vec<f64>,
}

/// Ground-state solution: eigenvalue, eigenfunction and Prüfer data on a grid.
#[derive(Debug, Clone)]
pub struct EigenSolution {
    /// Lowest Dirichlet eigenvalue (bracket midpoint).
    pub lambda0: f64,
    /// Sample abscissae.
    pub grid: Vec<f64>,
    /// Eigenfunction, normalized to max |y| = 1.
    pub y: Vec<f64>,
    /// Derivative y′ on the same grid.
    pub y_prime: Vec<f64>,
    /// Phase samples; ϑ(0) = 0, ϑ(1) ≈ π.
    pub theta: Vec<f64>,
    /// Amplitude samples ϱ > 0 with y = ϱ sin ϑ, y′ = √λ₀ ϱ cos ϑ.
    pub rho: Vec<f64>,
    /// σ = |q| sin²ϑ at each node (right-continuous in q).
    pub sigma: Vec<f64>,
    /// Width of the final eigenvalue bracket.
    pub solver_tolerance: f64,
    /// The potential this solution belongs to.
    pub potential: Potential,
}

/// Build the output grid: piece boundaries plus per-piece uniform panels.
/// Each piece gets an even interval count so composite rules apply cleanly,
/// sized by both arc length and the expected phase rotation.
fn output_grid(q: &Potential, lambda: f64, n_output: usize) -> Vec<f64> {
    let breaks = q.breakpoints();
    let s = lambda.sqrt();
    let mut grid = Vec::with_capacity(n_output + 2 * breaks.len());
    grid.push(0.0);
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        let len = b - a;
        let m_abs = q.eval_unchecked(0.5 * (a + b)).abs().max(
            q.eval_unchecked(a)
                .abs()
                .max(q.eval_unchecked(b.min(1.0)).abs()),
        );
        let phase_span = (s + m_abs / s) * len;
        let by_length = (len * n_output as f64).ceil() as usize;
        let by_phase = (phase_span / 0.02).ceil() as usize;
        let mut m = by_length.max(by_phase).clamp(2, MAX_PIECE_NODES);
        if m % 2 == 1 {
            m += 1;
        }
        for k in 1..=m {
            grid.push(a + len * k as f64 / m as f64);
        }
        // Land exactly on the breakpoint.
        *grid.last_mut().unwrap() = b;
    }
    grid
}

/// Integrate the pair [ϑ, ln ϱ] across the grid, one smooth piece of the
/// potential at a time. Splitting at the breakpoints keeps every stage
/// evaluation of the adaptive steps on the correct side of each jump:
/// the flow solved is the Carathéodory solution glued from the pieces'
/// own restrictions, independent of the evaluation convention at nodes.
fn flow_on_grid(
    q: &Potential,
    lambda: f64,
    grid: &[f64],
    step: &StepControl,
) -> Result<Vec<[f64; 2]>> {
    let s = lambda.sqrt();
    let pc = q.is_piecewise_constant();
    let breaks = q.breakpoints();
    let mut out: Vec<[f64; 2]> = Vec::with_capacity(grid.len());
    out.push([0.0, 0.0]);
    let mut y = [0.0f64, 0.0];
    let mut idx = 0usize;
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        debug_assert_eq!(grid[idx], a);
        let ib = grid[idx..]
            .iter()
            .position(|&x| x == b)
            .map(|p| idx + p)
            .ok_or_else(|| Error::Domain(format!("breakpoint {b} missing from grid")))?;
        let qv_const = if pc { q.eval_unchecked(0.5 * (a + b)) } else { 0.0 };
        let states = integrate_grid(
            |x, yy: &[f64; 2]| {
                let qv = if pc {
                    qv_const
                } else {
                    q.eval_unchecked(x.clamp(0.0, 1.0))
                };
                let (sn, cs) = yy[0].sin_cos();
                [s + qv.abs() * sn * sn / s, qv * sn * cs / s]
            },
            &grid[idx..=ib],
            y,
            step,
        )?;
        out.extend_from_slice(&states[1..]);
        y = *states.last().unwrap();
        idx = ib;
    }
    Ok(out)
}

/// Integrate the phase equation at spectral parameter `lambda`.
///
/// Mandatory nodes are placed at every potential breakpoint, with uniform
/// refinement in between controlled by `ctrl.n_output`.
pub fn integrate_phase(
    q: &Potential,
    lambda: f64,
    ctrl: &SolverControl,
) -> Result<PhaseTrajectory> {
    q.validate()?;
    if !lambda.is_finite() || lambda <= 0.0 {
        return Err(Error::NonpositiveLambda(lambda));
    }
    let s = lambda.sqrt();
    let grid = output_grid(q, lambda, ctrl.n_output);
    let states = flow_on_grid(q, lambda, &grid, &ctrl.step_control())?;
    let theta: Vec<f64> = states.iter().map(|st| st[0]).collect();
    // Node values of ϑ′ follow the evaluate() convention (right-continuous
    // at interior breakpoints).
    let theta_prime: Vec<f64> = grid
        .iter()
        .zip(&theta)
        .map(|(&x, &th)| {
            let sn = th.sin();
            s + q.eval_unchecked(x).abs() * sn * sn / s
        })
        .collect();
    Ok(PhaseTrajectory {
        lambda,
        nodes: grid,
        theta,
        theta_prime,
    })
}

/// Terminal phase ϑ(1; λ) with default accuracy; strictly increasing in λ.
pub fn terminal_phase(q: &Potential, lambda: f64) -> Result<f64> {
    terminal_phase_with(q, lambda, &SolverControl::default())
}

/// Terminal phase via a breakpoints-only grid (no dense output).
fn terminal_phase_with(q: &Potential, lambda: f64, ctrl: &SolverControl) -> Result<f64> {
    if !lambda.is_finite() || lambda <= 0.0 {
        return Err(Error::NonpositiveLambda(lambda));
    }
    let grid = q.breakpoints();
    let states = flow_on_grid(q, lambda, &grid, &ctrl.step_control())?;
    Ok(states.last().unwrap()[0])
}

/// Bisection bracket for the terminal-phase root ϑ(1; λ) = π.
/// Returns (lambda_mid, bracket_width).
pub(crate) fn bisect_ground_lambda(
    q: &Potential,
    tol: f64,
    ctrl: &SolverControl,
) -> Result<(f64, f64)> {
    if !tol.is_finite() || tol <= 0.0 {
        return Err(Error::Domain(format!(
            "bracket tolerance must be positive, got {tol}"
        )));
    }
    let hi = PI * PI;
    let mut lo = (hi - q.max_abs()).max(LAMBDA_FLOOR).min(hi);

    if lo <= LAMBDA_FLOOR && q.is_piecewise_constant() {
        // Deep potential: decide cheaply whether the ground state is below
        // the floor before asking the phase flow to integrate there.
        if oracle::oscillation_count(q, LAMBDA_FLOOR)? > 0 {
            return Err(Error::OutOfPruferDomain);
        }
    } else if lo <= LAMBDA_FLOOR {
        let phi_lo = terminal_phase_with(q, LAMBDA_FLOOR, ctrl)? - PI;
        if phi_lo >= 0.0 {
            return Err(Error::OutOfPruferDomain);
        }
        lo = LAMBDA_FLOOR;
    }

    if lo < hi {
        let phi_hi = terminal_phase_with(q, hi, ctrl)? - PI;
        if phi_hi < -1e-6 {
            return Err(Error::Domain(format!(
                "terminal phase at λ = π² is {} < π; potential violates q ⩽ 0?",
                phi_hi + PI
            )));
        }
        if phi_hi < 0.0 {
            // q is numerically indistinguishable from zero.
            return Ok((hi, 0.0));
        }
    }

    let mut a = lo;
    let mut b = hi;
    while b - a > tol {
        let mid = 0.5 * (a + b);
        let phi = terminal_phase_with(q, mid, ctrl)? - PI;
        if phi < 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok((0.5 * (a + b), b - a))
}

/// Lowest Dirichlet eigenvalue with the full sampled solution, bracketed to
/// width ⩽ `tol` (default integrator settings).
pub fn eigenvalue_dirichlet(q: &Potential, tol: f64) -> Result<EigenSolution> {
    eigenvalue_dirichlet_with(q, tol, &SolverControl::default())
}

/// As [`eigenvalue_dirichlet`] with explicit solver settings.
pub fn eigenvalue_dirichlet_with(
    q: &Potential,
    tol: f64,
    ctrl: &SolverControl,
) -> Result<EigenSolution> {
    q.validate()?;
    let (lambda0, width) = bisect_ground_lambda(q, tol, ctrl)?;
    let s = lambda0.sqrt();

    let grid = output_grid(q, lambda0, ctrl.n_output);
    // State: [ϑ, ln ϱ]; y and y′ are reconstructed afterwards and the
    // amplitude comes from the exact logarithmic equation, which avoids
    // cancellation near the nodes of y.
    let states = flow_on_grid(q, lambda0, &grid, &ctrl.step_control())?;

    let theta: Vec<f64> = states.iter().map(|st| st[0]).collect();
    let log_rho: Vec<f64> = states.iter().map(|st| st[1]).collect();

    // Post-check: the bracket really contains the phase root. A terminal
    // phase away from π means the ground state escaped below the bracket.
    let phase_err = (theta.last().unwrap() - PI).abs();
    if phase_err > 1e-4 {
        return Err(Error::OutOfPruferDomain);
    }

    let mut y_raw: Vec<f64> = theta
        .iter()
        .zip(&log_rho)
        .map(|(&th, &lr)| lr.exp() * th.sin())
        .collect();
    let y_max = y_raw.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    debug_assert!(y_max > 0.0);
    let scale = 1.0 / y_max;
    for v in &mut y_raw {
        *v *= scale;
    }
    let rho: Vec<f64> = log_rho.iter().map(|&lr| lr.exp() * scale).collect();
    let y_prime: Vec<f64> = theta
        .iter()
        .zip(&rho)
        .map(|(&th, &r)| s * r * th.cos())
        .collect();
    let sigma: Vec<f64> = grid
        .iter()
        .zip(&theta)
        .map(|(&x, &th)| {
            let sn = th.sin();
            q.eval_unchecked(x).abs() * sn * sn
        })
        .collect();

    Ok(EigenSolution {
        lambda0,
        grid,
        y: y_raw,
        y_prime,
        theta,
        rho,
        sigma,
        solver_tolerance: width,
        potential: q.clone(),
    })
}

/// Quadrature value of ∫₀¹ σϑ′/(λ₀+σ) dx.
///
/// Along exact solutions this equals π − √λ₀; the difference against that
/// closed form is a solver-consistency residual.
pub fn phase_defect(e: &EigenSolution) -> f64 {
    let interp = PhaseInterpolant::new(e);
    let s = e.lambda0.sqrt();
    let mut total = 0.0;
    for piece in interp.pieces() {
        total += adaptive_simpson(
            |x| {
                let sg = piece.sigma(&interp, x);
                let tp = s + sg / s;
                sg * tp / (e.lambda0 + sg)
            },
            piece.a,
            piece.b,
            1e-11,
            1e-13,
        );
    }
    total
}

/// One smooth piece of the potential together with its local |q|.
/// Evaluation at the piece endpoints stays one-sided, which is what the
/// composite quadratures and the set-detection code need at breakpoints.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Piece {
    pub a: f64,
    pub b: f64,
    /// |q| on the piece when it is constant there; NaN for linear pieces.
    const_abs: f64,
}

impl Piece {
    /// |q(x)| with the piece's own one-sided convention.
    pub fn q_abs(&self, interp: &PhaseInterpolant<'_>, x: f64) -> f64 {
        if self.const_abs.is_nan() {
            interp.q.eval_unchecked(x.clamp(self.a, self.b))
                .abs()
        } else {
            self.const_abs
        }
    }

    /// σ(x) = |q(x)| sin²ϑ(x) with interpolated phase.
    pub fn sigma(&self, interp: &PhaseInterpolant<'_>, x: f64) -> f64 {
        let sn = interp.theta_at(x).sin();
        self.q_abs(interp, x) * sn * sn
    }
}

/// Monotone cubic-Hermite view of a sampled phase trajectory. The phase is
/// C¹ across breakpoints, so a single global interpolant is valid; the
/// derivative data is taken one-sided inside each grid interval.
pub(crate) struct PhaseInterpolant<'a> {
    pub q: &'a Potential,
    sqrt_lambda: f64,
    nodes: &'a [f64],
    theta: &'a [f64],
}

impl<'a> PhaseInterpolant<'a> {
    pub fn new(e: &'a EigenSolution) -> Self {
        PhaseInterpolant {
            q: &e.potential,
            sqrt_lambda: e.lambda0.sqrt(),
            nodes: &e.grid,
            theta: &e.theta,
        }
    }

    #[cfg(test)]
    pub fn from_trajectory(q: &'a Potential, t: &'a PhaseTrajectory) -> Self {
        PhaseInterpolant {
            q,
            sqrt_lambda: t.lambda.sqrt(),
            nodes: &t.nodes,
            theta: &t.theta,
        }
    }

    /// Smooth pieces of the potential with node-aligned endpoints.
    pub fn pieces(&self) -> Vec<Piece> {
        let pc = self.q.is_piecewise_constant();
        self.q
            .breakpoints()
            .windows(2)
            .map(|w| Piece {
                a: w[0],
                b: w[1],
                const_abs: if pc {
                    self.q.eval_unchecked(0.5 * (w[0] + w[1])).abs()
                } else {
                    f64::NAN
                },
            })
            .collect()
    }

    fn interval_of(&self, x: f64) -> usize {
        let i = self.nodes.partition_point(|&n| n <= x);
        i.saturating_sub(1).min(self.nodes.len() - 2)
    }

    /// Interpolated phase ϑ̂(x); error O(h⁴) on the solver grid.
    pub fn theta_at(&self, x: f64) -> f64 {
        let i = self.interval_of(x);
        let (x0, x1) = (self.nodes[i], self.nodes[i + 1]);
        let (th0, th1) = (self.theta[i], self.theta[i + 1]);
        let h = x1 - x0;
        let t = ((x - x0) / h).clamp(0.0, 1.0);
        if t == 0.0 {
            return th0;
        }
        if t == 1.0 {
            return th1;
        }
        let s = self.sqrt_lambda;
        // One-sided |q| at the interval ends: piecewise-constant potentials
        // use the cell value, continuous ones the endpoint values.
        let (qa, qb) = if self.q.is_piecewise_constant() {
            let m = self.q.eval_unchecked(0.5 * (x0 + x1)).abs();
            (m, m)
        } else {
            (
                self.q.eval_unchecked(x0).abs(),
                self.q.eval_unchecked(x1.min(1.0)).abs(),
            )
        };
        let d0 = s + qa * th0.sin().powi(2) / s;
        let d1 = s + qb * th1.sin().powi(2) / s;
        let t2 = t * t;
        let t3 = t2 * t;
        (2.0 * t3 - 3.0 * t2 + 1.0) * th0
            + (t3 - 2.0 * t2 + t) * h * d0
            + (-2.0 * t3 + 3.0 * t2) * th1
            + (t3 - t2) * h * d1
    }

    pub fn terminal_theta(&self) -> f64 {
        *self.theta.last().unwrap()
    }

    pub fn nodes(&self) -> &[f64] {
        self.nodes
    }
}
