use thiserror::Error;

/// Errors produced by the solver, oracle, certificate and search layers.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A potential failed its structural invariants (ordering, signs, domain).
    #[error("invalid potential: {0}")]
    InvalidPotential(String),

    /// An argument is outside the domain of the requested operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The Prüfer flow is only defined for a positive spectral parameter.
    #[error("spectral parameter must be positive, got {0}")]
    NonpositiveLambda(f64),

    /// The adaptive integrator drove the step size below machine resolution.
    #[error("integration failure: step size underflow at x = {x}")]
    IntegrationFailure { x: f64 },

    /// The ground eigenvalue is at or below zero, where the √λ-scaled phase
    /// flow degenerates. Callers should fall back to the finite-difference
    /// solver for such potentials.
    #[error("ground state outside Prüfer domain (λ₀ ≤ 0); use the finite-difference solver")]
    OutOfPruferDomain,

    /// Normalization is undefined for the zero potential.
    #[error("cannot normalize: potential has zero γ-norm")]
    CannotNormalize,

    /// Closed-form trigonometric matching needs a piecewise-constant potential.
    #[error("transcendental matching requires a piecewise-constant potential")]
    NotPiecewiseConstant,
}

pub type Result<T> = std::result::Result<T, Error>;
