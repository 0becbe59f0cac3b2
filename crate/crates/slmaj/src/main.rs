//! `slmaj` — eigenvalue majorant toolkit for −y″ + qy = λy, y(0) = y(1) = 0
//! with nonpositive potentials under the constraint ∫₀¹|q|^γ dx = 1.
//!
//! Subcommands: `eig` (ground eigenvalue of a potential file), `verify-chain`
//! (inequality-chain certificate with per-check slacks), `upper-bound`
//! (explicit U(γ) < π²), `search` (lower bound L(γ) by extremal search) and
//! `sweep` (a γ-grid of the two-sided bracket with CSV/plot/SVG output).
//!
//! Exit codes: 0 success (including a not-applicable certificate);
//! 2 usage, schema or domain errors; 3 solver domain errors (ground state
//! outside the Prüfer domain); 4 a certificate check failed.

mod output;
mod record;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use sl_majorant::bounds::{
    format_sig17, reference_facts, upper_bound, BoundCurve, BoundPoint,
};
use sl_majorant::chain::{build_report, default_epsilon, verify, ChainVerdict};
use sl_majorant::oracle::{fd_ground_eigenvalue, FdConfig};
use sl_majorant::potential::{GammaExponent, Potential};
use sl_majorant::prufer::{eigenvalue_dirichlet, phase_defect};
use sl_majorant::search::lower_bound;
use sl_majorant::Error as SlError;

use record::RunRecord;

#[derive(Parser)]
#[command(
    name = "slmaj",
    version,
    about = "Dirichlet ground-eigenvalue bounds for nonpositive potentials with unit γ-norm"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Oracle {
    /// Scaled Prüfer phase flow (requires λ₀ > 0).
    Prufer,
    /// Finite differences with Richardson extrapolation (any λ₀).
    Fd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compute the lowest Dirichlet eigenvalue of a potential file.
    Eig {
        /// Potential JSON file.
        potential: PathBuf,
        /// Eigenvalue bracket width.
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Which solver to use.
        #[arg(long, value_enum, default_value_t = Oracle::Prufer)]
        oracle: Oracle,
        /// Run-record path (default: `<input>.run.json` beside the input).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate and verify the estimate chain on a potential.
    VerifyChain {
        /// Potential JSON file.
        potential: PathBuf,
        /// Constraint exponent γ ∈ (0, 1/2).
        #[arg(long)]
        gamma: f64,
        /// Chain parameter ε (default: 1.01·(π − √λ₀)).
        #[arg(long)]
        epsilon: Option<f64>,
        /// Rescale the potential to γ-norm 1 before solving.
        #[arg(long)]
        normalize: bool,
        /// Slack tolerance for the verdicts.
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        /// Report path (default: `<input>.chain.json` beside the input).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Explicit upper bound U(γ) < π² for the eigenvalue majorant.
    UpperBound {
        /// Constraint exponent γ ∈ (0, 1/2).
        #[arg(long)]
        gamma: f64,
        /// Run-record path.
        #[arg(long, default_value = "slmaj-upper-bound.run.json")]
        out: PathBuf,
    },
    /// Lower bound L(γ) by family scans and projected ascent.
    Search {
        /// Constraint exponent γ > 0.
        #[arg(long)]
        gamma: f64,
        /// Ascent iterations per start.
        #[arg(long, default_value_t = 200)]
        budget: usize,
        /// Number of multistart seeds (0, 1, …, seeds−1).
        #[arg(long, default_value_t = 8)]
        seeds: u64,
        /// Run-record path.
        #[arg(long, default_value = "slmaj-search.run.json")]
        out: PathBuf,
    },
    /// Tabulate L(γ) and U(γ) over a γ grid; writes CSV, plot data and
    /// records under the --out prefix.
    Sweep {
        #[arg(long)]
        gamma_min: f64,
        #[arg(long)]
        gamma_max: f64,
        /// Number of grid points (endpoints included).
        #[arg(long)]
        steps: usize,
        #[arg(long, default_value_t = 200)]
        budget: usize,
        #[arg(long, default_value_t = 8)]
        seeds: u64,
        /// Output prefix: writes `<out>.csv`, `<out>.plot.dat`,
        /// `<out>.records.json` and optionally `<out>.svg`.
        #[arg(long)]
        out: PathBuf,
        /// Also emit a self-contained SVG chart.
        #[arg(long)]
        svg: bool,
    },
}

struct Failure {
    code: u8,
    message: String,
}

fn fail(code: u8, message: impl Into<String>) -> Failure {
    Failure {
        code,
        message: message.into(),
    }
}

/// Solver domain errors earn exit 3 together with the documented fallback;
/// everything else from the library is a caller/domain problem (exit 2).
fn solver_err(e: SlError) -> Failure {
    match e {
        SlError::OutOfPruferDomain => fail(3, format!("{e}; rerun with --oracle fd")),
        other => fail(2, other.to_string()),
    }
}

fn main() -> ExitCode {
    if let Ok(n) = std::env::var("SL_MAJORANT_THREADS") {
        if let Ok(n) = n.trim().parse::<usize>() {
            if n >= 1 {
                // Ignore failure: the global pool can only be set once.
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global();
            }
        }
    }
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Cmd::Eig {
            potential,
            tol,
            oracle,
            out,
        } => cmd_eig(&potential, tol, oracle, out),
        Cmd::VerifyChain {
            potential,
            gamma,
            epsilon,
            normalize,
            tol,
            out,
        } => cmd_verify_chain(&potential, gamma, epsilon, normalize, tol, out),
        Cmd::UpperBound { gamma, out } => cmd_upper_bound(gamma, &out),
        Cmd::Search {
            gamma,
            budget,
            seeds,
            out,
        } => cmd_search(gamma, budget, seeds, &out),
        Cmd::Sweep {
            gamma_min,
            gamma_max,
            steps,
            budget,
            seeds,
            out,
            svg,
        } => cmd_sweep(gamma_min, gamma_max, steps, budget, seeds, &out, svg),
    }
}

fn load_potential(path: &Path) -> Result<Potential, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| fail(2, format!("cannot read {}: {e}", path.display())))?;
    let q: Potential = serde_json::from_str(&text).map_err(|e| {
        fail(
            2,
            format!(
                "{} does not match the potential schema ({e}); expected an object like \
                 {{\"type\":\"constant\",\"value\":-1.0}} with type one of \
                 constant|piecewise|well|edge_wells|grid",
                path.display()
            ),
        )
    })?;
    q.validate().map_err(|e| fail(2, e.to_string()))?;
    Ok(q)
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    path.with_extension(suffix)
}

fn chain_gamma(gamma: f64) -> Result<GammaExponent, Failure> {
    let g = GammaExponent::new(gamma).map_err(|e| fail(2, e.to_string()))?;
    g.require_chain_range().map_err(|e| fail(2, e.to_string()))?;
    Ok(g)
}

fn write_record(record: &RunRecord, path: &Path) -> Result<(), Failure> {
    record
        .write(path)
        .map_err(|e| fail(2, format!("cannot write {}: {e}", path.display())))?;
    Ok(())
}

fn cmd_eig(
    potential: &Path,
    tol: f64,
    oracle: Oracle,
    out: Option<PathBuf>,
) -> Result<(), Failure> {
    let q = load_potential(potential)?;
    let (lambda0, payload) = match oracle {
        Oracle::Prufer => {
            let e = eigenvalue_dirichlet(&q, tol).map_err(solver_err)?;
            let defect_residual = phase_defect(&e) - (std::f64::consts::PI - e.lambda0.sqrt());
            let payload = json!({
                "solver": "prufer",
                "lambda0": e.lambda0,
                "solver_tolerance": e.solver_tolerance,
                "grid_points": e.grid.len(),
                "defect_residual": defect_residual,
            });
            (e.lambda0, payload)
        }
        Oracle::Fd => {
            let cfg = FdConfig {
                n: 20_000,
                extrapolate: true,
            };
            let v = fd_ground_eigenvalue(&q, &cfg).map_err(solver_err)?;
            (
                v,
                json!({ "solver": "fd", "lambda0": v, "n": cfg.n, "extrapolate": true }),
            )
        }
    };
    println!("lambda0 = {}", format_sig17(lambda0));
    let record = RunRecord::new(
        "eig",
        json!({
            "potential_file": potential.display().to_string(),
            "potential": q,
            "tol": tol,
            "oracle": if oracle == Oracle::Prufer { "prufer" } else { "fd" },
        }),
        payload,
    );
    let out_path = out.unwrap_or_else(|| sibling(potential, "run.json"));
    write_record(&record, &out_path)
}

fn print_verdict_table(verdict: &ChainVerdict) {
    println!("{:<28} {:>24}  verdict", "check", "slack");
    for c in &verdict.checks {
        println!(
            "{:<28} {:>24}  {}",
            c.name,
            format_sig17(c.slack),
            if c.pass { "pass" } else { "FAIL" }
        );
    }
}

fn cmd_verify_chain(
    potential: &Path,
    gamma: f64,
    epsilon: Option<f64>,
    normalize: bool,
    tol: f64,
    out: Option<PathBuf>,
) -> Result<(), Failure> {
    let g = chain_gamma(gamma)?;
    let mut q = load_potential(potential)?;
    if normalize {
        q = q
            .normalize_to_admissible(g)
            .map_err(|e| fail(2, e.to_string()))?;
    }
    let e = eigenvalue_dirichlet(&q, 1e-10).map_err(solver_err)?;
    let eps = match epsilon {
        Some(v) => v,
        None => default_epsilon(&e)
            .map_err(|err| fail(2, format!("{err}; pass --epsilon explicitly")))?,
    };
    let report = build_report(&e, &q, g, eps).map_err(|e| fail(2, e.to_string()))?;
    let verdict = verify(&report, tol);

    println!(
        "gamma = {}  epsilon = {}  lambda0 = {}",
        format_sig17(report.gamma),
        format_sig17(report.epsilon),
        format_sig17(report.lambda0)
    );
    println!(
        "preconditions: lambda0 > (pi-eps)^2: {}; lambda0 > 4: {}; mu < pi: {}",
        report.preconditions_met.lambda0_above_pi_minus_eps_sq,
        report.preconditions_met.lambda0_above_four,
        report.preconditions_met.mu_below_pi
    );

    let out_path = out.unwrap_or_else(|| sibling(potential, "chain.json"));
    let mut text = serde_json::to_string_pretty(&report).expect("report serializes");
    text.push('\n');
    std::fs::write(&out_path, text)
        .map_err(|e| fail(2, format!("cannot write {}: {e}", out_path.display())))?;

    if !verdict.applicable {
        println!("NOT APPLICABLE: preconditions not met; no inequality verdicts claimed");
        return Ok(());
    }
    print_verdict_table(&verdict);
    if verdict.contradiction {
        println!("contradiction: q ∉ A_γ regime (gamma_norm_direct exceeds final_bound)");
    }
    if verdict.checks.iter().any(|c| !c.pass) {
        return Err(fail(4, "at least one chain inequality has negative slack"));
    }
    Ok(())
}

fn cmd_upper_bound(gamma: f64, out: &Path) -> Result<(), Failure> {
    let g = chain_gamma(gamma)?;
    let b = upper_bound(g).map_err(|e| fail(2, e.to_string()))?;
    let facts = reference_facts(g);
    println!("gamma          = {}", format_sig17(b.gamma));
    println!("eps_star       = {}", format_sig17(b.eps_star));
    println!(
        "eps_effective  = {} (active cap: {})",
        format_sig17(b.eps_effective),
        b.flags
    );
    println!("upper U(gamma) = {}", format_sig17(b.upper));
    println!("pi^2 - U       = {}", format_sig17(b.gap_below_pi2));
    println!("classification = {} ({})", facts.classification, facts.statement);
    let record = RunRecord::new(
        "upper-bound",
        json!({ "gamma": gamma }),
        json!({
            "bound": b,
            "classification": facts.classification.to_string(),
        }),
    );
    write_record(&record, out)
}

fn cmd_search(gamma: f64, budget: usize, seeds: u64, out: &Path) -> Result<(), Failure> {
    let g = GammaExponent::new(gamma).map_err(|e| fail(2, e.to_string()))?;
    if budget < 1 {
        return Err(fail(2, "budget must be at least 1"));
    }
    let seed_list: Vec<u64> = (0..seeds).collect();
    let result = lower_bound(g, budget, &seed_list).map_err(solver_err)?;
    println!("lower L(gamma) = {}", format_sig17(result.lower));
    println!("strategy       = {} (seed {})", result.strategy, result.seed);
    let record = RunRecord::new(
        "search",
        json!({ "gamma": gamma, "budget": budget, "seeds": seeds }),
        serde_json::to_value(&result).expect("search result serializes"),
    );
    write_record(&record, out)
}

#[allow(clippy::too_many_arguments)]
fn cmd_sweep(
    gamma_min: f64,
    gamma_max: f64,
    steps: usize,
    budget: usize,
    seeds: u64,
    out: &Path,
    svg: bool,
) -> Result<(), Failure> {
    if !gamma_min.is_finite() || !gamma_max.is_finite() || gamma_min <= 0.0 || gamma_max <= gamma_min {
        return Err(fail(
            2,
            format!("need 0 < gamma-min < gamma-max, got {gamma_min} and {gamma_max}"),
        ));
    }
    if steps < 1 {
        return Err(fail(2, "steps must be at least 1"));
    }
    let gammas: Vec<f64> = if steps == 1 {
        vec![gamma_min]
    } else {
        (0..steps)
            .map(|i| gamma_min + (gamma_max - gamma_min) * i as f64 / (steps - 1) as f64)
            .collect()
    };
    let seed_list: Vec<u64> = (0..seeds).collect();

    use rayon::prelude::*;
    struct Row {
        point: BoundPoint,
        search: Option<sl_majorant::search::SearchResult>,
    }
    let rows: Vec<Result<Row, Failure>> = gammas
        .par_iter()
        .map(|&gamma| {
            let g = GammaExponent::new(gamma).map_err(|e| fail(2, e.to_string()))?;
            let facts = reference_facts(g);
            if gamma >= 0.5 {
                // The chain only covers γ ∈ (0, 1/2); report the known
                // classification with no bound columns.
                return Ok(Row {
                    point: BoundPoint {
                        gamma,
                        lower: None,
                        upper: None,
                        eps_star: None,
                        flags: facts.classification.to_string(),
                    },
                    search: None,
                });
            }
            let b = upper_bound(g).map_err(|e| fail(2, e.to_string()))?;
            let search = if budget >= 1 && seeds >= 1 {
                Some(lower_bound(g, budget, &seed_list).map_err(solver_err)?)
            } else {
                None
            };
            Ok(Row {
                point: BoundPoint {
                    gamma,
                    lower: search.as_ref().map(|s| s.lower),
                    upper: Some(b.upper),
                    eps_star: Some(b.eps_star),
                    flags: format!("{}|{}", facts.classification, b.flags),
                },
                search,
            })
        })
        .collect();

    let mut points = Vec::with_capacity(rows.len());
    let mut searches = Vec::new();
    for row in rows {
        let row = row?;
        points.push(row.point);
        if let Some(s) = row.search {
            searches.push(s);
        }
    }
    let curve = BoundCurve { points };
    curve.validate().map_err(|e| fail(2, e.to_string()))?;

    let write = |path: &Path, text: &str| -> Result<(), Failure> {
        if let Some(parent) = path.parent() {
            if !parent.as_os_str().is_empty() {
                std::fs::create_dir_all(parent)
                    .map_err(|e| fail(2, format!("cannot create {}: {e}", parent.display())))?;
            }
        }
        std::fs::write(path, text)
            .map_err(|e| fail(2, format!("cannot write {}: {e}", path.display())))
    };

    let csv_path = out.with_extension("csv");
    write(&csv_path, &curve.to_csv())?;
    let plot_path = out.with_extension("plot.dat");
    write(&plot_path, &output::plot_data(&curve))?;
    let records_path = out.with_extension("records.json");
    let record = RunRecord::new(
        "sweep",
        json!({
            "gamma_min": gamma_min,
            "gamma_max": gamma_max,
            "steps": steps,
            "budget": budget,
            "seeds": seeds,
        }),
        json!({ "curve": curve, "searches": searches }),
    );
    write_record(&record, &records_path)?;
    println!("wrote {}", csv_path.display());
    println!("wrote {}", plot_path.display());
    println!("wrote {}", records_path.display());
    if svg {
        let svg_path = out.with_extension("svg");
        write(&svg_path, &output::svg_chart(&curve))?;
        println!("wrote {}", svg_path.display());
    }
    for p in &curve.points {
        let fmt_opt = |v: Option<f64>| v.map(format_sig17).unwrap_or_else(|| "-".into());
        println!(
            "gamma {}  L {}  U {}  [{}]",
            format_sig17(p.gamma),
            fmt_opt(p.lower),
            fmt_opt(p.upper),
            p.flags
        );
    }
    Ok(())
}
