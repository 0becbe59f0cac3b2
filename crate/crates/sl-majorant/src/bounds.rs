//! Explicit upper bounds U(γ) < π² on the eigenvalue majorant
//! M_γ = sup{λ₀(q) : q ⩽ 0, ∫|q|^γ = 1}, extracted from the closed-form
//! constant of the estimate chain, plus the reference classification of the
//! three γ regimes.
//!
//! The logic: whenever the chain applies and its final bound is below 1, no
//! admissible potential can have λ₀ > (π−ε)², so M_γ ⩽ (π−ε)². The largest
//! usable ε is the smallest of the root ε* of final_bound = 1, the root of
//! μ(ε) = π, and π − 2 (minus headroom), the last of which makes λ₀ > 4
//! implied by λ₀ > (π−ε)².

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::chain::mu_value;
use crate::error::{Error, Result};
use crate::potential::GammaExponent;

/// Headroom subtracted from the π − 2 cap so that (π − ε)² > 4 strictly.
const LAMBDA_CAP_HEADROOM: f64 = 1e-6;

/// Log-scale floor below which the closed form for ε* would underflow f64.
const LOG_EPS_UNDERFLOW: f64 = -708.0;

/// (π²+2)/(1−2γ) · ε^{(1−2γ)γ/(1−γ)}; the closed-form final bound of the
/// estimate chain. Accepts ε ⩾ 0 (the exponent is positive, so ε = 0 ↦ 0).
pub fn final_bound_constant(g: GammaExponent, epsilon: f64) -> Result<f64> {
    g.require_chain_range()?;
    if !epsilon.is_finite() || epsilon < 0.0 {
        return Err(Error::Domain(format!(
            "epsilon must be ⩾ 0, got {epsilon}"
        )));
    }
    let gamma = g.value();
    let kappa = (1.0 - 2.0 * gamma) * gamma / (1.0 - gamma);
    Ok((PI * PI + 2.0) / (1.0 - 2.0 * gamma) * epsilon.powf(kappa))
}

/// Root of final_bound_constant(γ, ε) = 1 in closed form:
/// ε* = ((1−2γ)/(π²+2))^{(1−γ)/((1−2γ)γ)}, evaluated as exp of the exact
/// log expression so no intermediate power underflows.
///
/// ε* spans roughly 1e−9 down past 1e−100 across γ; where even the final
/// value falls below f64 range the margin is not machine-representable and
/// a domain error is returned.
pub fn epsilon_star(g: GammaExponent) -> Result<f64> {
    g.require_chain_range()?;
    let gamma = g.value();
    let exponent = (1.0 - gamma) / ((1.0 - 2.0 * gamma) * gamma);
    let log_base = ((1.0 - 2.0 * gamma) / (PI * PI + 2.0)).ln();
    let log_eps = exponent * log_base;
    if log_eps < LOG_EPS_UNDERFLOW {
        return Err(Error::Domain(format!(
            "eps_star = exp({log_eps:.1}) underflows f64 at gamma = {gamma}"
        )));
    }
    Ok(log_eps.exp())
}

/// Bracketing root solver for final_bound_constant(γ, ε) = 1, bisecting on
/// ln ε. Cross-checks the closed form; the two agree to 1e−10 relative.
pub fn epsilon_star_by_bisection(g: GammaExponent) -> Result<f64> {
    g.require_chain_range()?;
    let mut lo = LOG_EPS_UNDERFLOW;
    let mut hi = 0.0f64;
    if final_bound_constant(g, lo.exp())? >= 1.0 {
        return Err(Error::Domain(format!(
            "eps_star not bracketed above exp({LOG_EPS_UNDERFLOW}) at gamma = {}",
            g.value()
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if final_bound_constant(g, mid.exp())? < 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-12 {
            break;
        }
    }
    Ok((0.5 * (lo + hi)).exp())
}

/// Root of μ(ε) = π (monotone in ε); the chain needs μ(ε) < π.
pub fn mu_cap_root(g: GammaExponent) -> Result<f64> {
    g.require_chain_range()?;
    let gamma = g.value();
    let mut lo = 0.0f64;
    let mut hi = PI;
    debug_assert!(mu_value(hi, gamma) > PI);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mu_value(mid, gamma) < PI {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-16 * PI {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Which of the three ε caps determined eps_effective.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActiveCap {
    /// Root of the final bound — the generic case.
    EpsStar,
    /// Root of μ(ε) = π.
    MuCap,
    /// π − 2 − headroom, keeping (π−ε)² > 4.
    LambdaCap,
}

impl std::fmt::Display for ActiveCap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ActiveCap::EpsStar => "eps_star",
            ActiveCap::MuCap => "mu_cap",
            ActiveCap::LambdaCap => "lambda_cap",
        })
    }
}

/// Secondary ε caps beside ε*.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct EpsCaps {
    /// ε with μ(ε) = π.
    pub mu_cap: f64,
    /// π − 2 − headroom.
    pub lambda_cap: f64,
}

/// Explicit upper bound on M_γ for one γ.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundResult {
    pub gamma: f64,
    /// Root of final_bound(γ, ε) = 1.
    pub eps_star: f64,
    pub eps_caps: EpsCaps,
    /// min(ε*, μ-cap, λ-cap); always > 0.
    pub eps_effective: f64,
    /// U(γ) = (π − eps_effective)². For tiny ε* this rounds to π² in f64;
    /// strictness lives in `gap_below_pi2`.
    pub upper: f64,
    /// π² − U(γ) = eps_effective·(2π − eps_effective), computed without
    /// cancellation; positive exactly because eps_effective > 0.
    pub gap_below_pi2: f64,
    pub flags: ActiveCap,
}

/// U(γ) for γ ∈ (0, 1/2): the largest ε usable by the chain, folded into
/// M_γ ⩽ (π − ε)² < π².
pub fn upper_bound(g: GammaExponent) -> Result<BoundResult> {
    g.require_chain_range()?;
    let eps_star = epsilon_star(g)?;
    let mu_cap = mu_cap_root(g)?;
    let lambda_cap = PI - 2.0 - LAMBDA_CAP_HEADROOM;
    let (eps_effective, flags) = [
        (eps_star, ActiveCap::EpsStar),
        (mu_cap, ActiveCap::MuCap),
        (lambda_cap, ActiveCap::LambdaCap),
    ]
    .into_iter()
    .min_by(|a, b| a.0.total_cmp(&b.0))
    .unwrap();
    debug_assert!(eps_effective > 0.0);
    let upper = (PI - eps_effective) * (PI - eps_effective);
    let gap_below_pi2 = eps_effective * (2.0 * PI - eps_effective);
    debug_assert!(upper > 4.0);
    Ok(BoundResult {
        gamma: g.value(),
        eps_star,
        eps_caps: EpsCaps { mu_cap, lambda_cap },
        eps_effective,
        upper,
        gap_below_pi2,
        flags,
    })
}

/// The three γ regimes of the majorant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classification {
    /// γ ⩾ 1/2: M_γ = π² (approached by endpoint-concentrated wells).
    EqualityPi2,
    /// γ < 1/3: M_γ < π², previously established.
    StrictPrior,
    /// 1/3 ⩽ γ < 1/2: M_γ < π² via the phase-defect estimate chain.
    StrictExtended,
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Classification::EqualityPi2 => "EQUALITY_PI2",
            Classification::StrictPrior => "STRICT_PRIOR",
            Classification::StrictExtended => "STRICT_EXTENDED",
        })
    }
}

/// Classification plus a one-line statement of the known fact.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ReferenceFacts {
    pub classification: Classification,
    pub statement: &'static str,
}

pub fn reference_facts(g: GammaExponent) -> ReferenceFacts {
    let gamma = g.value();
    if gamma >= 0.5 {
        ReferenceFacts {
            classification: Classification::EqualityPi2,
            statement:
                "M_gamma = pi^2 for gamma >= 1/2; the supremum is approached by endpoint-concentrated wells",
        }
    } else if gamma < 1.0 / 3.0 {
        ReferenceFacts {
            classification: Classification::StrictPrior,
            statement: "M_gamma < pi^2 for gamma < 1/3 (previously known strict bound)",
        }
    } else {
        ReferenceFacts {
            classification: Classification::StrictExtended,
            statement:
                "M_gamma < pi^2 for 1/3 <= gamma < 1/2 (strict bound from the phase-defect chain)",
        }
    }
}

/// One sweep row; `lower` is absent when no search was run and `upper`/
/// `eps_star` are absent outside (0, 1/2).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundPoint {
    pub gamma: f64,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    pub eps_star: Option<f64>,
    pub flags: String,
}

/// Per-γ records of the two-sided bracket L(γ) ⩽ M_γ ⩽ U(γ).
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct BoundCurve {
    pub points: Vec<BoundPoint>,
}

/// 17-significant-digit formatting used for every float that reaches an
/// output file; fixed width keeps repeated runs byte-identical.
pub fn format_sig17(x: f64) -> String {
    format!("{x:.16e}")
}

impl BoundCurve {
    /// Entries must be sorted by γ with L ⩽ U + 1e−9 wherever both exist.
    pub fn validate(&self) -> Result<()> {
        for w in self.points.windows(2) {
            if w[1].gamma <= w[0].gamma {
                return Err(Error::Domain("bound curve not sorted by gamma".into()));
            }
        }
        for p in &self.points {
            if let (Some(l), Some(u)) = (p.lower, p.upper) {
                if l > u + 1e-9 {
                    return Err(Error::Domain(format!(
                        "lower {l} exceeds upper {u} at gamma {}",
                        p.gamma
                    )));
                }
            }
        }
        Ok(())
    }

    /// CSV with the fixed header `gamma,lower,upper,eps_star,flags`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("gamma,lower,upper,eps_star,flags\n");
        for p in &self.points {
            let opt = |v: Option<f64>| v.map(format_sig17).unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                format_sig17(p.gamma),
                opt(p.lower),
                opt(p.upper),
                opt(p.eps_star),
                p.flags
            ));
        }
        out
    }
}
