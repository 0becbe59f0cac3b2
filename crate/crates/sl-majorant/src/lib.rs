//! Two-sided numerical study of the eigenvalue majorant
//! M_γ = sup λ₀(q) over nonpositive potentials with ∫₀¹|q|^γ dx = 1.
//!
//! The lowest Dirichlet eigenvalue of −y″ + qy = λy on \[0,1\] never exceeds
//! π² when q ⩽ 0, and for γ ∈ (0, 1/2) the supremum over the constraint
//! surface stays strictly below π². This crate makes that quantitative:
//!
//! - [`prufer`] integrates the √λ-scaled phase flow ϑ′ = (λ+σ)/√λ,
//!   σ = |q| sin²ϑ, and finds λ₀ by bisection on the terminal phase;
//! - [`oracle`] provides two independent eigenvalue routes (finite
//!   differences with Sturm bisection, and closed-form trigonometric
//!   matching for piecewise-constant potentials);
//! - [`chain`] evaluates every inequality of the phase-defect estimate
//!   chain on a concrete (q, γ, ε) and reports signed slacks;
//! - [`bounds`] extracts the explicit upper bound U(γ) < π² implied by the
//!   chain's closed-form constant;
//! - [`search`] produces lower bounds L(γ) by family scans and projected
//!   gradient ascent on the constraint surface.
//!
//! Everything is a pure function of its inputs; values are `Send + Sync`
//! and safe to evaluate in parallel.

pub mod bounds;
pub mod chain;
pub mod error;
pub mod ode;
pub mod oracle;
pub mod potential;
pub mod prufer;
pub mod quad;
pub mod search;

pub use error::{Error, Result};
pub use potential::{GammaExponent, Potential};
