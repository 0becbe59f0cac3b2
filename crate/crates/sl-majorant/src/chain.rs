//! Certificate engine: every intermediate quantity and inequality of the
//! phase-defect estimate chain, evaluated on a concrete (q, γ, ε) with
//! explicit slack.
//!
//! The chain bounds the γ-norm of an admissible potential whose ground
//! eigenvalue sits above (π−ε)². Its ingredients, all reported here:
//!
//!   defect          ∫₀¹ σϑ′/(λ₀+σ) dx = π − √λ₀ < ε
//!   E_ε             {x : σ(x) > t},  t = ε^{(1−2γ)/(1−γ)}
//!   μ(ε)            π² ε^{γ/(1−γ)} + ε, a cap on ∫_{E_ε} ϑ′ dx
//!   J_E, J_C        ∫ sin^{−2γ}ϑ · ϑ′ dx over E_ε and its complement
//!   sine caps       2∫₀^{μ/2} sin^{−2γ}x dx and ∫₀^π sin^{−2γ}x dx
//!   AM–GM           2√λ₀ σ^γ ⩽ λ₀ + σ pointwise (λ₀ > 4)
//!   final bound     (π²+2)/(1−2γ) · ε^{(1−2γ)γ/(1−γ)}
//!
//! Reports are floating-point evidence with measured slacks, not interval
//! arithmetic; strict "<" inequalities are verified as "⩽ with slack".

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::bounds::final_bound_constant;
use crate::error::{Error, Result};
use crate::potential::{GammaExponent, Potential};
use crate::prufer::{phase_defect, EigenSolution, PhaseInterpolant, Piece};
use crate::quad::adaptive_simpson;

/// μ(ε) = π² ε^{γ/(1−γ)} + ε.
pub fn mu_value(epsilon: f64, gamma: f64) -> f64 {
    PI * PI * epsilon.powf(gamma / (1.0 - gamma)) + epsilon
}

/// Threshold t = ε^{(1−2γ)/(1−γ)} defining E_ε = {σ > t}.
pub fn sigma_threshold(epsilon: f64, gamma: f64) -> f64 {
    epsilon.powf((1.0 - 2.0 * gamma) / (1.0 - gamma))
}

/// Default ε for a solved potential: 1.01·(π − √λ₀), the smallest value
/// satisfying λ₀ > (π−ε)² with 1% headroom.
pub fn default_epsilon(e: &EigenSolution) -> Result<f64> {
    let v = 1.01 * (PI - e.lambda0.sqrt());
    if v > 0.0 {
        Ok(v)
    } else {
        Err(Error::Domain(
            "λ₀ is at the π² ceiling; supply epsilon explicitly".into(),
        ))
    }
}

/// ∫₀^m sin^{−2γ}x dx for m ∈ [0, π], γ ∈ (0, 1/2); relative error ⩽ 1e−8.
///
/// The integrable endpoint singularity is removed by the substitution
/// u = x^{1−2γ} on an initial subinterval, after which the integrand is the
/// smooth factor (sin x / x)^{−2γ}; the upper half [π/2, π] folds onto the
/// lower half by symmetry.
pub fn incomplete_sine_integral(m: f64, g: GammaExponent) -> Result<f64> {
    g.require_chain_range()?;
    if !(0.0..=PI).contains(&m) || !m.is_finite() {
        return Err(Error::Domain(format!(
            "sine-integral endpoint {m} outside [0, π]"
        )));
    }
    let gamma = g.value();
    if m <= PI / 2.0 {
        Ok(sine_integral_below_half(m, gamma))
    } else {
        let total_half = sine_integral_below_half(PI / 2.0, gamma);
        Ok(2.0 * total_half - sine_integral_below_half(PI - m, gamma))
    }
}

/// ∫₀^m sin^{−2γ}x dx for m ∈ [0, π/2].
fn sine_integral_below_half(m: f64, gamma: f64) -> f64 {
    if m == 0.0 {
        return 0.0;
    }
    let split = m.min(0.25);
    let p = 1.0 / (1.0 - 2.0 * gamma);
    let u_max = split.powf(1.0 - 2.0 * gamma);
    // ∫₀^c sin^{−2γ}x dx = p ∫₀^{c^{1/p}} (sin(u^p)/u^p)^{−2γ} du.
    let head = adaptive_simpson(
        |u| {
            let x = u.powf(p);
            if x == 0.0 {
                p
            } else {
                p * (x.sin() / x).powf(-2.0 * gamma)
            }
        },
        0.0,
        u_max,
        1e-10,
        1e-14,
    );
    let tail = if m > split {
        adaptive_simpson(|x| x.sin().powf(-2.0 * gamma), split, m, 1e-10, 1e-14)
    } else {
        0.0
    };
    head + tail
}

/// Applicability flags of the chain for one report.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Preconditions {
    /// λ₀ > (π − ε)².
    pub lambda0_above_pi_minus_eps_sq: bool,
    /// λ₀ > 4 (needed by the pointwise AM–GM bound).
    pub lambda0_above_four: bool,
    /// μ(ε) < π (needed by the worst-case sine-cap placement).
    pub mu_below_pi: bool,
}

impl Preconditions {
    pub fn all(&self) -> bool {
        self.lambda0_above_pi_minus_eps_sq && self.lambda0_above_four && self.mu_below_pi
    }
}

/// Measured inequality residuals; every entry should be ⩾ −tol whenever the
/// preconditions hold.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Slacks {
    /// ε − defect.
    pub defect_below_epsilon: f64,
    /// μ(ε) − ∫_{E_ε} ϑ′ dx.
    pub phase_measure_below_mu: f64,
    /// sine_cap_E − J_E.
    pub j_e_below_sine_cap: f64,
    /// 2π²/(1−2γ)·ε^{(1−2γ)γ/(1−γ)} − sine_cap_E.
    pub sine_cap_below_eps_power: f64,
    /// sine_cap_total − J_C.
    pub j_c_below_sine_cap_total: f64,
    /// 4/(1−2γ) − sine_cap_total.
    pub sine_cap_total_below_four: f64,
    /// min over grid nodes of λ₀ + σ − 2√λ₀·σ^γ.
    pub am_gm_pointwise_min: f64,
    /// ½·J_E + t^γ/√λ₀·J_C − ∫|q|^γ.
    pub norm_split: f64,
    /// final_bound − ∫|q|^γ.
    pub norm_below_final_bound: f64,
}

impl Slacks {
    /// Stable (name, value) view in chain order, for tables and verdicts.
    pub fn named(&self) -> [(&'static str, f64); 9] {
        [
            ("defect_below_epsilon", self.defect_below_epsilon),
            ("phase_measure_below_mu", self.phase_measure_below_mu),
            ("j_e_below_sine_cap", self.j_e_below_sine_cap),
            ("sine_cap_below_eps_power", self.sine_cap_below_eps_power),
            ("j_c_below_sine_cap_total", self.j_c_below_sine_cap_total),
            ("sine_cap_total_below_four", self.sine_cap_total_below_four),
            ("am_gm_pointwise_min", self.am_gm_pointwise_min),
            ("norm_split", self.norm_split),
            ("norm_below_final_bound", self.norm_below_final_bound),
        ]
    }
}

/// Every intermediate quantity of the estimate chain for one (q, γ, ε).
///
/// Serializes flat, with a `slacks` sub-object and a `preconditions_met`
/// sub-object.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChainReport {
    pub gamma: f64,
    pub epsilon: f64,
    pub lambda0: f64,
    /// t = ε^{(1−2γ)/(1−γ)}.
    pub threshold_t: f64,
    /// μ(ε) = π²ε^{γ/(1−γ)} + ε.
    pub mu: f64,
    /// Lebesgue measure of E_ε = {σ > t}.
    #[serde(rename = "lebesgue_measure_E")]
    pub lebesgue_measure_e: f64,
    /// ∫_{E_ε} ϑ′ dx.
    #[serde(rename = "phase_measure_E")]
    pub phase_measure_e: f64,
    /// ∫_{E_ε} sin^{−2γ}ϑ · ϑ′ dx.
    #[serde(rename = "J_E")]
    pub j_e: f64,
    /// Complement integral ∫_{Ē_ε} sin^{−2γ}ϑ · ϑ′ dx.
    #[serde(rename = "J_C")]
    pub j_c: f64,
    /// 2∫₀^{μ/2} sin^{−2γ}x dx (argument clamped to [0, π]).
    #[serde(rename = "sine_cap_E")]
    pub sine_cap_e: f64,
    /// ∫₀^π sin^{−2γ}x dx.
    pub sine_cap_total: f64,
    /// ∫₀¹ σϑ′/(λ₀+σ) dx; equals π − √λ₀ along exact solutions.
    pub defect: f64,
    /// ∫₀¹ |q|^γ dx by the potential's closed form.
    pub gamma_norm_direct: f64,
    /// √λ₀ · ∫₀¹ σ^γ sin^{−2γ}ϑ/(λ₀+σ) · ϑ′ dx (change of variables).
    pub gamma_norm_via_phase: f64,
    /// (π²+2)/(1−2γ) · ε^{(1−2γ)γ/(1−γ)}.
    pub final_bound: f64,
    pub slacks: Slacks,
    pub preconditions_met: Preconditions,
}

/// Per-inequality verdict from [`verify`].
#[derive(Debug, Clone, Serialize)]
pub struct CheckVerdict {
    pub name: &'static str,
    pub slack: f64,
    pub pass: bool,
}

/// Outcome of verifying a report.
#[derive(Debug, Clone, Serialize)]
pub struct ChainVerdict {
    /// False when any precondition flag is down; no inequality verdicts are
    /// claimed in that case.
    pub applicable: bool,
    pub checks: Vec<CheckVerdict>,
    /// Set when the report claims a unit γ-norm that exceeds its own final
    /// bound: the assumed regime excludes admissible potentials.
    pub contradiction: bool,
}

impl ChainVerdict {
    pub fn all_pass(&self) -> bool {
        self.applicable && self.checks.iter().all(|c| c.pass)
    }
}

/// Evaluate every quantity of the chain on a solved potential.
///
/// Preconditions are recorded, not required; [`verify`] gates on them.
pub fn build_report(
    e: &EigenSolution,
    q: &Potential,
    g: GammaExponent,
    epsilon: f64,
) -> Result<ChainReport> {
    g.require_chain_range()?;
    if !epsilon.is_finite() || epsilon <= 0.0 {
        return Err(Error::Domain(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    if *q != e.potential {
        return Err(Error::Domain(
            "potential does not match the one the solution was computed for".into(),
        ));
    }
    let gamma = g.value();
    let lambda0 = e.lambda0;
    let s = lambda0.sqrt();

    let threshold_t = sigma_threshold(epsilon, gamma);
    let mu = mu_value(epsilon, gamma);
    let preconditions = Preconditions {
        lambda0_above_pi_minus_eps_sq: lambda0 > (PI - epsilon) * (PI - epsilon),
        lambda0_above_four: lambda0 > 4.0,
        mu_below_pi: mu < PI,
    };

    let interp = PhaseInterpolant::new(e);
    let pieces = interp.pieces();

    // E_ε and its phase image.
    let intervals = detect_e_set(&interp, &pieces, threshold_t);
    let mut lebesgue = 0.0;
    let mut phase_measure = 0.0;
    let mut j_e = 0.0;
    let theta_end = interp.terminal_theta().min(PI);
    for &(a, b) in &intervals {
        lebesgue += b - a;
        let (ta, tb) = (
            interp.theta_at(a).clamp(0.0, PI),
            interp.theta_at(b).clamp(0.0, PI),
        );
        phase_measure += tb - ta;
        j_e += incomplete_sine_integral(tb, g)? - incomplete_sine_integral(ta, g)?;
    }
    // Complement integral by the same change of variables: the full
    // trajectory sweeps [0, ϑ(1)].
    let j_c = (incomplete_sine_integral(theta_end, g)? - j_e).max(0.0);

    let sine_cap_e = 2.0 * incomplete_sine_integral((mu / 2.0).clamp(0.0, PI), g)?;
    let sine_cap_total = incomplete_sine_integral(PI, g)?;

    let defect = phase_defect(e);
    let gamma_norm_direct = q.gamma_norm(g);
    let gamma_norm_via_phase = via_phase_norm(&interp, &pieces, gamma, lambda0);

    let final_bound = final_bound_constant(g, epsilon)?;

    // Pointwise AM–GM margin on the stored grid.
    let am_gm_pointwise_min = e
        .sigma
        .iter()
        .map(|&sg| lambda0 + sg - 2.0 * s * sg.powf(gamma))
        .fold(f64::INFINITY, f64::min);

    let kappa = (1.0 - 2.0 * gamma) * gamma / (1.0 - gamma);
    let slacks = Slacks {
        defect_below_epsilon: epsilon - defect,
        phase_measure_below_mu: mu - phase_measure,
        j_e_below_sine_cap: sine_cap_e - j_e,
        sine_cap_below_eps_power: 2.0 * PI * PI / (1.0 - 2.0 * gamma) * epsilon.powf(kappa)
            - sine_cap_e,
        j_c_below_sine_cap_total: sine_cap_total - j_c,
        sine_cap_total_below_four: 4.0 / (1.0 - 2.0 * gamma) - sine_cap_total,
        am_gm_pointwise_min,
        norm_split: 0.5 * j_e + threshold_t.powf(gamma) / s * j_c - gamma_norm_direct,
        norm_below_final_bound: final_bound - gamma_norm_direct,
    };

    Ok(ChainReport {
        gamma,
        epsilon,
        lambda0,
        threshold_t,
        mu,
        lebesgue_measure_e: lebesgue,
        phase_measure_e: phase_measure,
        j_e,
        j_c,
        sine_cap_e,
        sine_cap_total,
        defect,
        gamma_norm_direct,
        gamma_norm_via_phase,
        final_bound,
        slacks,
        preconditions_met: preconditions,
    })
}

/// Per-inequality verdicts at tolerance `tol`. Reports whose preconditions
/// fail come back `applicable: false` with no claims.
pub fn verify(r: &ChainReport, tol: f64) -> ChainVerdict {
    if !r.preconditions_met.all() {
        return ChainVerdict {
            applicable: false,
            checks: Vec::new(),
            contradiction: false,
        };
    }
    let checks = r
        .slacks
        .named()
        .iter()
        .map(|&(name, slack)| CheckVerdict {
            name,
            slack,
            pass: slack >= -tol,
        })
        .collect();
    ChainVerdict {
        applicable: true,
        checks,
        contradiction: r.gamma_norm_direct - r.final_bound > tol,
    }
}

/// √λ₀ · ∫₀¹ σ^γ sin^{−2γ}ϑ/(λ₀+σ) · ϑ′ dx, piece by piece.
///
/// sin^{−2γ}ϑ is evaluated as (sin²ϑ)^{−γ}, which is sign-safe when the
/// terminal phase overshoots π by roundoff; at the exact zeros of sin ϑ the
/// integrand's continuous limit |q|^γ ϑ′/(λ₀+σ) is used.
fn via_phase_norm(
    interp: &PhaseInterpolant<'_>,
    pieces: &[Piece],
    gamma: f64,
    lambda0: f64,
) -> f64 {
    let s = lambda0.sqrt();
    let mut total = 0.0;
    for piece in pieces {
        total += adaptive_simpson(
            |x| {
                let th = interp.theta_at(x);
                let sn2 = th.sin().powi(2);
                let qa = piece.q_abs(interp, x);
                let sg = qa * sn2;
                let tp = s + sg / s;
                if sn2 == 0.0 {
                    return qa.powf(gamma) * tp / (lambda0 + sg);
                }
                sg.powf(gamma) * sn2.powf(-gamma) * tp / (lambda0 + sg)
            },
            piece.a,
            piece.b,
            1e-11,
            1e-13,
        );
    }
    s * total
}

/// Locate E_ε = {σ > t} as a union of closed intervals.
///
/// σ is continuous inside each smooth piece, so crossings are bracketed by
/// probing a refinement of the solver grid and then bisected; points with
/// σ = t are assigned to the complement (the defining inequality is strict).
fn detect_e_set(
    interp: &PhaseInterpolant<'_>,
    pieces: &[Piece],
    t: f64,
) -> Vec<(f64, f64)> {
    let nodes = interp.nodes();
    let mut intervals: Vec<(f64, f64)> = Vec::new();
    for piece in pieces {
        let lo_idx = nodes.partition_point(|&x| x < piece.a);
        let hi_idx = nodes.partition_point(|&x| x <= piece.b);
        let mut crossings: Vec<f64> = Vec::new();
        let mut prev_x = piece.a;
        let mut prev_f = piece.sigma(interp, prev_x) - t;
        for &node in nodes[lo_idx..hi_idx]
            .iter()
            .chain(std::iter::once(&piece.b))
        {
            if node <= prev_x {
                continue;
            }
            // Probe interior points so a local extremum inside one grid
            // interval cannot hide a double crossing.
            let h = (node - prev_x) / 4.0;
            for k in 1..=4 {
                let x = if k == 4 { node } else { prev_x + h * k as f64 };
                let f = piece.sigma(interp, x) - t;
                if (prev_f > 0.0) != (f > 0.0) {
                    crossings.push(bisect_sigma(interp, piece, t, prev_x, x));
                }
                prev_x = x;
                prev_f = f;
            }
        }
        // Elementary segments between crossings; membership from midpoints.
        let mut bounds = vec![piece.a];
        bounds.extend(crossings);
        bounds.push(piece.b);
        for w in bounds.windows(2) {
            if w[1] <= w[0] {
                continue;
            }
            let mid = 0.5 * (w[0] + w[1]);
            if piece.sigma(interp, mid) - t > 0.0 {
                match intervals.last_mut() {
                    Some(last) if (last.1 - w[0]).abs() < 1e-12 => last.1 = w[1],
                    _ => intervals.push((w[0], w[1])),
                }
            }
        }
    }
    intervals
}

fn bisect_sigma(
    interp: &PhaseInterpolant<'_>,
    piece: &Piece,
    t: f64,
    mut a: f64,
    mut b: f64,
) -> f64 {
    let fa = piece.sigma(interp, a) - t;
    for _ in 0..60 {
        let mid = 0.5 * (a + b);
        let fm = piece.sigma(interp, mid) - t;
        if (fm > 0.0) == (fa > 0.0) {
            a = mid;
        } else {
            b = mid;
        }
        if b - a < 1e-15 {
            break;
        }
    }
    0.5 * (a + b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::{constant, edge_wells, single_well};
    use crate::prufer::eigenvalue_dirichlet;

    fn g(v: f64) -> GammaExponent {
        GammaExponent::new(v).unwrap()
    }

    const PI2: f64 = PI * PI;

    #[test]
    fn sine_integral_basics() {
        assert_eq!(incomplete_sine_integral(0.0, g(0.25)).unwrap(), 0.0);
        // γ → 0: the integrand tends to 1.
        let v = incomplete_sine_integral(PI / 2.0, g(1e-9)).unwrap();
        assert!((v - PI / 2.0).abs() < 1e-6);
        // Domain gate.
        assert!(incomplete_sine_integral(-0.1, g(0.25)).is_err());
        assert!(incomplete_sine_integral(PI + 0.1, g(0.25)).is_err());
        assert!(incomplete_sine_integral(1.0, g(0.6)).is_err());
    }

    #[test]
    fn sine_integral_full_matches_gamma_closed_form() {
        // ∫₀^π sin^{−2γ}x dx = √π·Γ((1−2γ)/2)/Γ(1−γ), and stays below
        // 4/(1−2γ).
        for gamma in [0.1, 0.25, 0.4, 0.45] {
            let quad = incomplete_sine_integral(PI, g(gamma)).unwrap();
            let closed = PI.sqrt() * libm::tgamma((1.0 - 2.0 * gamma) / 2.0)
                / libm::tgamma(1.0 - gamma);
            assert!(
                (quad - closed).abs() <= 1e-8 * closed,
                "γ={gamma}: quad {quad} vs closed {closed}"
            );
            assert!(quad < 4.0 / (1.0 - 2.0 * gamma));
        }
    }

    #[test]
    fn sine_integral_monotone_and_symmetric() {
        let gm = g(0.3);
        let mut prev = -1.0;
        for k in 0..=16 {
            let m = PI * k as f64 / 16.0;
            let v = incomplete_sine_integral(m, gm).unwrap();
            assert!(v > prev);
            prev = v;
            // S(π) − S(π−m) = S(m) by symmetry of the integrand.
            let total = incomplete_sine_integral(PI, gm).unwrap();
            let tail = total - incomplete_sine_integral(PI - m, gm).unwrap();
            assert!((tail - v).abs() < 1e-8 * (1.0 + v));
        }
    }

    #[test]
    fn report_constant_potential_identities() {
        // Normalized constant −1 at γ = 0.45 with the default ε.
        let q = constant(-1.0).unwrap();
        let e = eigenvalue_dirichlet(&q, 1e-10).unwrap();
        let eps = default_epsilon(&e).unwrap();
        let r = build_report(&e, &q, g(0.45), eps).unwrap();

        let expected_defect = PI - (PI2 - 1.0f64).sqrt();
        assert!((r.defect - expected_defect).abs() <= 1e-6);
        assert!((r.gamma_norm_direct - 1.0).abs() <= 1e-12);
        assert!((r.gamma_norm_via_phase - 1.0).abs() <= 1e-6);
        assert!((r.gamma_norm_via_phase - r.gamma_norm_direct).abs() <= 1e-5);
        assert!(r.preconditions_met.all());

        let verdict = verify(&r, 1e-6);
        assert!(verdict.applicable);
        assert!(verdict.all_pass(), "checks: {:?}", verdict.checks);
        assert!(!verdict.contradiction);
    }

    #[test]
    fn report_not_applicable_at_small_gamma() {
        // q ≡ −1 at γ = 0.1: μ(ε) ⩾ π, so no verdicts are claimed.
        let q = constant(-1.0).unwrap();
        let e = eigenvalue_dirichlet(&q, 1e-10).unwrap();
        let eps = default_epsilon(&e).unwrap();
        let r = build_report(&e, &q, g(0.1), eps).unwrap();
        assert!(!r.preconditions_met.mu_below_pi);
        let verdict = verify(&r, 1e-6);
        assert!(!verdict.applicable);
        assert!(verdict.checks.is_empty());
    }

    #[test]
    fn scaled_wells_pass_all_checks() {
        // Wells scaled to γ-norm 0.1 keep λ₀ near π², making the chain
        // applicable at its default ε; every slack must be ⩾ −1e−6.
        for gamma in [0.40, 0.45] {
            let gm = g(gamma);
            let members = vec![
                edge_wells(0.05, 1.0).unwrap(),
                single_well(0.5, 0.1, 1.0).unwrap(),
            ];
            for base in members {
                let scale = 0.1f64.powf(1.0 / gamma);
                let q = base.normalize_to_admissible(gm).unwrap().scale(scale);
                assert!((q.gamma_norm(gm) - 0.1).abs() < 1e-12);
                let e = eigenvalue_dirichlet(&q, 1e-10).unwrap();
                let eps = default_epsilon(&e).unwrap();
                let r = build_report(&e, &q, gm, eps).unwrap();
                assert!(r.preconditions_met.all(), "preconditions at γ={gamma}");
                let verdict = verify(&r, 1e-6);
                assert!(
                    verdict.all_pass(),
                    "γ={gamma}, q={q:?}: {:?}",
                    verdict.checks
                );
                assert!(!verdict.contradiction);
            }
        }
    }

    #[test]
    fn contradiction_probe_is_flagged() {
        let q = constant(-1.0).unwrap();
        let e = eigenvalue_dirichlet(&q, 1e-10).unwrap();
        let eps = default_epsilon(&e).unwrap();
        let mut r = build_report(&e, &q, g(0.45), eps).unwrap();
        // Synthetic regime: unit norm claimed against a sub-unit bound.
        r.gamma_norm_direct = 1.0;
        r.final_bound = 0.5;
        r.slacks.norm_below_final_bound = r.final_bound - r.gamma_norm_direct;
        let verdict = verify(&r, 1e-6);
        assert!(verdict.applicable);
        assert!(verdict.contradiction);
        assert!(!verdict.all_pass());
    }

    #[test]
    fn e_set_consistency() {
        let q = single_well(0.5, 0.3, 4.0).unwrap();
        let e = eigenvalue_dirichlet(&q, 1e-10).unwrap();
        let interp = PhaseInterpolant::new(&e);
        let pieces = interp.pieces();
        let t = 0.9;
        let intervals = detect_e_set(&interp, &pieces, t);
        assert!(!intervals.is_empty(), "σ peaks near 4·1 > t inside the well");
        for &(a, b) in &intervals {
            assert!(b > a);
            // Interior: strictly above the threshold.
            for k in 1..8 {
                let x = a + (b - a) * k as f64 / 8.0;
                let piece = pieces
                    .iter()
                    .find(|p| p.a <= x && x <= p.b)
                    .expect("interval inside a piece");
                assert!(piece.sigma(&interp, x) > t);
            }
            // Boundaries: on the threshold unless clipped by a breakpoint.
            for xb in [a, b] {
                let on_break = q.breakpoints().iter().any(|&bp| (bp - xb).abs() < 1e-12);
                if !on_break {
                    let piece = pieces
                        .iter()
                        .find(|p| p.a <= xb && xb <= p.b)
                        .unwrap();
                    assert!((piece.sigma(&interp, xb) - t).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn grid_sampled_report_identities() {
        // Continuous piecewise-linear potential: exercises the non-constant
        // piece handling of the quadratures and the set detection.
        let gm = g(0.42);
        let q = crate::potential::from_grid(
            vec![0.0, 0.3, 0.5, 0.8, 1.0],
            vec![0.0, -2.0, -0.4, -1.5, 0.0],
        )
        .unwrap()
        .normalize_to_admissible(gm)
        .unwrap();
        let e = eigenvalue_dirichlet(&q, 1e-10).unwrap();
        let eps = default_epsilon(&e).unwrap();
        let r = build_report(&e, &q, gm, eps).unwrap();
        assert!((r.defect - (PI - r.lambda0.sqrt())).abs() <= 1e-6);
        assert!((r.gamma_norm_direct - 1.0).abs() <= 1e-10);
        assert!(
            (r.gamma_norm_via_phase - r.gamma_norm_direct).abs() <= 1e-5,
            "via phase {} vs direct {}",
            r.gamma_norm_via_phase,
            r.gamma_norm_direct
        );
    }

    #[test]
    fn report_serialization_field_names() {
        let q = constant(-1.0).unwrap();
        let e = eigenvalue_dirichlet(&q, 1e-10).unwrap();
        let r = build_report(&e, &q, g(0.45), 0.2).unwrap();
        let json = serde_json::to_value(&r).unwrap();
        for key in [
            "gamma",
            "epsilon",
            "lambda0",
            "threshold_t",
            "mu",
            "lebesgue_measure_E",
            "phase_measure_E",
            "J_E",
            "J_C",
            "sine_cap_E",
            "sine_cap_total",
            "defect",
            "gamma_norm_direct",
            "gamma_norm_via_phase",
            "final_bound",
            "slacks",
            "preconditions_met",
        ] {
            assert!(json.get(key).is_some(), "missing key {key}");
        }
        assert!(json["slacks"].get("norm_split").is_some());
    }

    #[test]
    fn build_report_domain_gates() {
        let q = constant(-1.0).unwrap();
        let e = eigenvalue_dirichlet(&q, 1e-10).unwrap();
        assert!(build_report(&e, &q, g(0.45), 0.0).is_err());
        assert!(build_report(&e, &q, g(0.45), -1.0).is_err());
        assert!(GammaExponent::new(0.7)
            .unwrap()
            .require_chain_range()
            .is_err());
        let other = constant(-0.5).unwrap();
        assert!(build_report(&e, &other, g(0.45), 0.1).is_err());
    }
}
