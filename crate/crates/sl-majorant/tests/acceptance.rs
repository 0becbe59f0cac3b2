//! Acceptance suite: one test per criterion, each printing a PASS line with
//! its runtime. Run with `cargo test -p sl-majorant --test acceptance`
//! (add `-- --nocapture` to see the lines for passing tests).

use std::f64::consts::PI;
use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use sl_majorant::bounds::{
    epsilon_star, epsilon_star_by_bisection, final_bound_constant, upper_bound,
};
use sl_majorant::chain::{build_report, default_epsilon, verify};
use sl_majorant::oracle::{fd_ground_eigenvalue, well_eigenvalue_transcendental, FdConfig};
use sl_majorant::potential::{edge_wells, piecewise, single_well, GammaExponent, Potential};
use sl_majorant::prufer::{
    eigenvalue_dirichlet, eigenvalue_dirichlet_with, phase_defect, EigenSolution, SolverControl,
};
use sl_majorant::search::{
    eigen_gradient, family_scan, lower_bound, Family, FamilyGrid,
};

const PI2: f64 = PI * PI;

fn g(v: f64) -> GammaExponent {
    GammaExponent::new(v).unwrap()
}

fn report_pass(criterion: u32, name: &str, started: Instant, budget_s: f64) {
    let elapsed = started.elapsed().as_secs_f64();
    println!("ACCEPTANCE {criterion} ({name}): PASS in {elapsed:.2} s");
    assert!(
        elapsed < budget_s,
        "criterion {criterion} exceeded its {budget_s} s budget: {elapsed:.2} s"
    );
}

/// 50 random 8-cell piecewise potentials normalized to γ-norm 1 at γ = 0.45.
fn random_normalized_suite() -> Vec<Potential> {
    let gm = g(0.45);
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let breaks: Vec<f64> = (0..=8).map(|i| i as f64 / 8.0).collect();
    (0..50)
        .map(|_| {
            let vals: Vec<f64> = (0..8).map(|_| -5.0 * rng.random::<f64>()).collect();
            piecewise(breaks.clone(), vals)
                .unwrap()
                .normalize_to_admissible(gm)
                .unwrap()
        })
        .collect()
}

/// 20 wells scaled to small γ-norm at γ ∈ {0.40, 0.45}: λ₀ stays near π², so
/// the chain's preconditions hold at the default ε.
fn chain_suite() -> Vec<(GammaExponent, Potential)> {
    let mut suite = Vec::new();
    for &gamma in &[0.40, 0.45] {
        let gm = g(gamma);
        let mut bases = vec![
            edge_wells(0.05, 1.0).unwrap(),
            edge_wells(0.10, 1.0).unwrap(),
            edge_wells(0.15, 1.0).unwrap(),
            edge_wells(0.20, 1.0).unwrap(),
            single_well(0.5, 0.10, 1.0).unwrap(),
            single_well(0.5, 0.20, 1.0).unwrap(),
            single_well(0.5, 0.30, 1.0).unwrap(),
        ];
        let extra = vec![
            edge_wells(0.08, 1.0).unwrap(),
            single_well(0.35, 0.15, 1.0).unwrap(),
            single_well(0.65, 0.25, 1.0).unwrap(),
        ];
        bases.extend(extra);
        for (i, base) in bases.into_iter().enumerate() {
            // Alternate the γ-mass between 0.05 and 0.1.
            let mass: f64 = if i % 2 == 0 { 0.1 } else { 0.05 };
            let scale = mass.powf(1.0 / gamma);
            let q = base.normalize_to_admissible(gm).unwrap().scale(scale);
            suite.push((gm, q));
        }
    }
    assert_eq!(suite.len(), 20);
    suite
}

#[test]
fn criterion_01_solver_exactness_closed_forms() {
    let t = Instant::now();
    let e0 = eigenvalue_dirichlet(&Potential::Constant { value: 0.0 }, 1e-10).unwrap();
    assert!(
        (e0.lambda0 - PI2).abs() <= 1e-8,
        "λ₀(0) = {} vs π²",
        e0.lambda0
    );
    report_pass(1, "free case", t, 1.0);

    let t = Instant::now();
    let e1 = eigenvalue_dirichlet(&Potential::Constant { value: -1.0 }, 1e-10).unwrap();
    assert!(
        (e1.lambda0 - (PI2 - 1.0)).abs() <= 1e-8,
        "λ₀(−1) = {} vs π²−1",
        e1.lambda0
    );
    report_pass(1, "constant shift", t, 1.0);
}

#[test]
fn criterion_02_cross_oracle_agreement() {
    let t = Instant::now();
    let members: Vec<Potential> = vec![
        single_well(0.5, 0.5, 8.0).unwrap(),
        single_well(0.3, 0.25, 11.0).unwrap(),
        single_well(0.7, 0.15, 6.0).unwrap(),
        single_well(0.5, 0.2, 10.0).unwrap(),
        single_well(0.4, 0.6, 5.0).unwrap(),
        edge_wells(0.1, 20.0).unwrap(),
        edge_wells(0.05, (0.1f64).powf(-1.0 / 0.4)).unwrap(),
        edge_wells(0.2, 5.0).unwrap(),
        edge_wells(0.15, 10.0).unwrap(),
        edge_wells(0.25, 2.0).unwrap(),
    ];
    assert_eq!(members.len(), 10);
    for q in &members {
        let fd = fd_ground_eigenvalue(
            q,
            &FdConfig {
                n: 20_000,
                extrapolate: true,
            },
        )
        .unwrap();
        assert!(fd > 0.5, "member {q:?} must have λ₀ > 0.5, got {fd}");
        let pr = eigenvalue_dirichlet(q, 1e-10).unwrap().lambda0;
        let tr = well_eigenvalue_transcendental(q, 1e-12).unwrap();
        assert!((fd - pr).abs() <= 1e-5, "fd vs prüfer: {fd} vs {pr}");
        assert!((fd - tr).abs() <= 1e-5, "fd vs matching: {fd} vs {tr}");
        assert!((pr - tr).abs() <= 1e-5, "prüfer vs matching: {pr} vs {tr}");
    }
    report_pass(2, "three-way agreement on 10 wells", t, 30.0);
}

#[test]
fn criterion_03_phase_defect_identity() {
    let t = Instant::now();
    for q in random_normalized_suite() {
        let e = eigenvalue_dirichlet(&q, 1e-10).unwrap();
        let residual = (phase_defect(&e) - (PI - e.lambda0.sqrt())).abs();
        assert!(residual <= 1e-6, "defect residual {residual} for {q:?}");
    }
    report_pass(3, "defect identity on 50 potentials", t, 60.0);
}

#[test]
fn criterion_04_change_of_variables_identity() {
    let t = Instant::now();
    let gm = g(0.45);
    for q in random_normalized_suite() {
        let e = eigenvalue_dirichlet(&q, 1e-10).unwrap();
        let eps = default_epsilon(&e).unwrap();
        let r = build_report(&e, &q, gm, eps).unwrap();
        let diff = (r.gamma_norm_via_phase - r.gamma_norm_direct).abs();
        assert!(diff <= 1e-5, "change-of-variables residual {diff} for {q:?}");
    }
    report_pass(4, "γ-norm via phase on 50 potentials", t, 60.0);
}

#[test]
fn criterion_05_chain_verification() {
    let t = Instant::now();
    for (gm, q) in chain_suite() {
        let e = eigenvalue_dirichlet(&q, 1e-10).unwrap();
        let eps = default_epsilon(&e).unwrap();
        let r = build_report(&e, &q, gm, eps).unwrap();
        assert!(
            r.preconditions_met.all(),
            "preconditions must hold for {q:?} at γ={}",
            r.gamma
        );
        let verdict = verify(&r, 1e-6);
        assert!(verdict.applicable);
        for c in &verdict.checks {
            assert!(
                c.slack >= -1e-6,
                "check {} has slack {} for {q:?} at γ={}",
                c.name,
                c.slack,
                r.gamma
            );
        }
    }
    report_pass(5, "all slacks ⩾ −1e−6 on 20 reports", t, 60.0);
}

#[test]
fn criterion_06_pointwise_am_gm() {
    let t = Instant::now();
    let mut reports = 0;
    for (gm, q) in chain_suite() {
        let e = eigenvalue_dirichlet(&q, 1e-10).unwrap();
        assert!(e.lambda0 > 4.0);
        let eps = default_epsilon(&e).unwrap();
        let r = build_report(&e, &q, gm, eps).unwrap();
        // Zero violations across every grid node.
        let s = e.lambda0.sqrt();
        let violations = e
            .sigma
            .iter()
            .filter(|&&sg| e.lambda0 + sg - 2.0 * s * sg.powf(r.gamma) < 0.0)
            .count();
        assert_eq!(violations, 0, "AM–GM violated for {q:?}");
        assert!(r.slacks.am_gm_pointwise_min >= 0.0);
        reports += 1;
    }
    assert_eq!(reports, 20);
    report_pass(6, "AM–GM pointwise, zero violations", t, 60.0);
}

#[test]
fn criterion_07_bound_extraction() {
    let t = Instant::now();
    for k in 1..=9 {
        let gamma = 0.05 * k as f64;
        let gm = g(gamma);
        let es = epsilon_star(gm).unwrap();
        let fb = final_bound_constant(gm, es).unwrap();
        assert!((fb - 1.0).abs() <= 1e-9, "γ={gamma}: final bound {fb}");
        let es_root = epsilon_star_by_bisection(gm).unwrap();
        assert!(
            (es - es_root).abs() <= 1e-10 * es,
            "γ={gamma}: closed form {es} vs root {es_root}"
        );
        let b = upper_bound(gm).unwrap();
        assert!(b.gap_below_pi2 > 0.0, "γ={gamma}: U(γ) not strictly below π²");
        assert!(b.upper <= PI2);
    }
    report_pass(7, "U(γ) < π² and ε* consistency", t, 1.0);
}

#[test]
fn criterion_08_bracket_consistency() {
    let t = Instant::now();
    let seeds: Vec<u64> = (0..8).collect();
    for &gamma in &[0.35, 0.40, 0.45] {
        let gm = g(gamma);
        let l = lower_bound(gm, 200, &seeds).unwrap();
        let u = upper_bound(gm).unwrap();
        assert!(
            l.lower >= PI2 - 1.0 - 1e-8,
            "γ={gamma}: L = {} below the constant baseline",
            l.lower
        );
        assert!(
            l.lower <= u.upper + 1e-9,
            "γ={gamma}: L = {} exceeds U = {}",
            l.lower,
            u.upper
        );
    }
    report_pass(8, "L(γ) ⩽ U(γ), budget 200 × 8 seeds", t, 600.0);
}

#[test]
fn criterion_09_edge_wells_approach_pi2() {
    let t = Instant::now();
    let grid = FamilyGrid {
        widths: vec![0.1, 0.05, 0.02, 0.01],
        centers: vec![],
    };
    let r = family_scan(g(0.6), Family::EdgeWells, &grid).unwrap();
    let lams: Vec<f64> = r.trace.iter().map(|e| e.objective).collect();
    for w in lams.windows(2) {
        assert!(w[1] > w[0], "λ₀ not strictly increasing: {lams:?}");
    }
    let last = *lams.last().unwrap();
    assert!(PI2 - last < 0.5, "final member {last} not within 0.5 of π²");
    assert!(lams.iter().all(|l| *l < PI2));
    report_pass(9, "γ = 0.6 edge wells approach π²", t, 60.0);
}

#[test]
fn criterion_10_gradient_check() {
    let t = Instant::now();
    let gm = g(0.45);
    let n_cells = 8;
    let bounds: Vec<f64> = (0..=n_cells).map(|i| i as f64 / n_cells as f64).collect();
    let tight = SolverControl {
        rtol: 1e-12,
        atol: 1e-14,
        n_output: 400,
    };
    let solve = |vals: &[f64]| -> f64 {
        let q = piecewise(bounds.clone(), vals.to_vec()).unwrap();
        eigenvalue_dirichlet_with(&q, 1e-12, &tight).unwrap().lambda0
    };
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for point in 0..5 {
        let raw: Vec<f64> = (0..n_cells).map(|_| -(0.2 + 2.0 * rng.random::<f64>())).collect();
        let q = piecewise(bounds.clone(), raw)
            .unwrap()
            .normalize_to_admissible(gm)
            .unwrap();
        let vals = match &q {
            Potential::PiecewiseConstant { values, .. } => values.clone(),
            _ => unreachable!(),
        };
        let e: EigenSolution = eigenvalue_dirichlet(&q, 1e-10).unwrap();
        let grad = eigen_gradient(&e, &bounds).unwrap();
        let h = 1e-4;
        for i in 0..n_cells {
            // Depth coordinates: deepening cell i means values[i] − h.
            let mut vp = vals.clone();
            vp[i] -= h;
            let mut vm = vals.clone();
            vm[i] += h;
            let fd = (solve(&vp) - solve(&vm)) / (2.0 * h);
            let rel = (fd - grad[i]).abs() / grad[i].abs().max(1e-2);
            assert!(
                rel <= 1e-3,
                "point {point} cell {i}: fd {fd} vs analytic {} (rel {rel})",
                grad[i]
            );
        }
    }
    report_pass(10, "eigen-gradient vs central differences", t, 30.0);
}
