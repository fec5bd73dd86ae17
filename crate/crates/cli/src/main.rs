//! `simfix`: check contraction conditions on finite problems, run Picard
//! iterations, and solve Hammerstein integral equations.
//!
//! Exit status is 0 on success, 1 when a checked condition fails or an
//! iteration does not converge (reports are still written), and 2 on
//! malformed input or usage errors.

mod report;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use simfix::functions::{
    check_cg_axioms, check_cg_simulation, check_zeta_axioms, AxiomReport, Beta, CClass, SamplingGrid, Zeta,
};
use simfix::hammerstein::{seeded_perturbation_pairs, HammersteinProblem, HammersteinSpec};
use simfix::metric::validate_metric;
use simfix::picard::{fixed_points, iterate, with_alpha_chain, TraceDiagnostics};
use simfix::problem::Problem;
use simfix::sweep::{run_sweep, SweepConfig};
use simfix::verifier::{check_alpha_admissible, check_uniqueness_hypothesis, find_start_point, verify};
use simfix::Slack;

use report::{csv_writer, decimal, envelope, write_json};

#[derive(Parser)]
#[command(
    name = "simfix",
    version,
    about = "Fixed point checks for simulation-function contractions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a problem file: metric axioms, admissibility, fixed points.
    Validate {
        #[arg(long)]
        problem: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decide one contraction condition over all pairs of a problem.
    Verify {
        #[arg(long)]
        problem: PathBuf,
        /// banach, z-contraction, suzuki, suzuki-z, geraghty, alpha-geraghty
        /// or suzuki-zag-geraghty.
        #[arg(long)]
        kind: String,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides the problem's comparison slack.
        #[arg(long)]
        eta: Option<f64>,
    },
    /// Run the Picard orbit of one point.
    Iterate {
        #[arg(long)]
        problem: PathBuf,
        /// Start label; defaults to the first point with α(x, Tx) ≥ 1, or
        /// the first point.
        #[arg(long)]
        start: Option<String>,
        #[arg(long, default_value_t = 1000)]
        max_iter: usize,
        /// Trace CSV.
        #[arg(long)]
        out: Option<PathBuf>,
        /// JSON summary with the trace diagnostics.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Solve x = f + ∫₀ᵗ K h(s, x) ds by successive approximation.
    SolveHammerstein {
        #[arg(long)]
        spec: PathBuf,
        /// Solution CSV: t, x and the residual on the last row.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Gap CSV; gaps go to stderr when omitted.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// JSON summary with the kernel and h condition checks.
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        max_iter: Option<usize>,
        /// Seed for the perturbation pairs used by the h condition check.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 64)]
        pairs: usize,
    },
    /// Sample the axioms of the built-in functions and any listed in a file.
    CheckFunctions {
        /// JSON with optional "zeta", "G" and "beta" arrays of specs.
        #[arg(long)]
        functions: Option<PathBuf>,
        /// Points per axis of the logarithmic grid over (1e-6, 1e2].
        #[arg(long, default_value_t = 128)]
        grid: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Random instance sweep of the convergence and gating properties.
    Sweep {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        target: usize,
        #[arg(long, default_value_t = 20_000)]
        max_instances: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Whether the checked condition held.
type Outcome = bool;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<Outcome> {
    match command {
        Command::Validate { problem, out } => validate(&problem, out.as_deref()),
        Command::Verify {
            problem,
            kind,
            out,
            eta,
        } => verify_cmd(&problem, &kind, out.as_deref(), eta),
        Command::Iterate {
            problem,
            start,
            max_iter,
            out,
            report,
        } => iterate_cmd(&problem, start.as_deref(), max_iter, out.as_deref(), report.as_deref()),
        Command::SolveHammerstein {
            spec,
            out,
            trace,
            report,
            grid,
            tol,
            max_iter,
            seed,
            pairs,
        } => solve_cmd(
            &spec,
            Overrides { grid, tol, max_iter },
            seed,
            pairs,
            out.as_deref(),
            trace.as_deref(),
            report.as_deref(),
        ),
        Command::CheckFunctions { functions, grid, out } => check_functions(functions.as_deref(), grid, out.as_deref()),
        Command::Sweep {
            seed,
            target,
            max_instances,
            out,
        } => sweep_cmd(seed, target, max_instances, out.as_deref()),
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_problem(path: &Path) -> Result<Problem> {
    Problem::from_json_str(&read(path)?).with_context(|| format!("loading {}", path.display()))
}

fn emit(out: Option<&Path>, report: &serde_json::Value) -> Result<()> {
    match out {
        Some(path) => write_json(path, report),
        None => {
            println!("{}", serde_json::to_string_pretty(report)?);
            Ok(())
        }
    }
}

fn labels(problem: &Problem, indices: &[usize]) -> Vec<String> {
    indices.iter().map(|&i| problem.space.label(i).to_string()).collect()
}

fn validate(path: &Path, out: Option<&Path>) -> Result<Outcome> {
    let problem = load_problem(path)?;
    let metric = validate_metric(&problem.space, problem.slack);
    let fixed = fixed_points(&problem.map);
    let admissibility = problem.alpha.as_ref().map(|a| check_alpha_admissible(&problem.map, a));
    let uniqueness = problem.alpha.as_ref().map(|a| check_uniqueness_hypothesis(a, &fixed));
    let ok = metric.is_valid();
    let report = envelope(
        "validate",
        json!({
            "valid": ok,
            "points": labels(&problem, &(0..problem.space.len()).collect::<Vec<_>>()),
            "map": labels(&problem, problem.map.table()),
            "metric": metric,
            "fixed_points": labels(&problem, &fixed),
            "admissibility": admissibility,
            "uniqueness_hypothesis": uniqueness,
        }),
    )?;
    emit(out, &report)?;
    Ok(ok)
}

fn verify_cmd(path: &Path, kind: &str, out: Option<&Path>, eta: Option<f64>) -> Result<Outcome> {
    let problem = load_problem(path)?;
    let kind = problem.kind(kind)?;
    let slack = match eta {
        Some(eta) if eta.is_finite() && eta >= 0.0 => Slack::new(eta),
        Some(eta) => bail!("--eta must be finite and non-negative, got {eta}"),
        None => problem.slack,
    };
    let result = verify(&problem.space, &problem.map, problem.alpha.as_ref(), &kind, slack)?;
    let holds = result.holds;
    let report = envelope(
        "verify",
        json!({
            "eta": slack.eta,
            "functions": {
                "zeta": problem.zeta.describe(),
                "G": problem.g.describe(),
                "CG": problem.g.cg(),
                "beta": problem.beta.describe(),
                "lambda": problem.lambda,
            },
            "report": result,
        }),
    )?;
    emit(out, &report)?;
    Ok(holds)
}

fn iterate_cmd(
    path: &Path,
    start: Option<&str>,
    max_iter: usize,
    out: Option<&Path>,
    report: Option<&Path>,
) -> Result<Outcome> {
    let problem = load_problem(path)?;
    let start = match start {
        Some(label) => problem.space.index_of(label)?,
        None => problem
            .alpha
            .as_ref()
            .and_then(|a| find_start_point(&problem.map, a))
            .unwrap_or(0),
    };
    let mut trace = iterate(&problem.space, &problem.map, start, max_iter)?;
    if let Some(alpha) = &problem.alpha {
        trace = with_alpha_chain(trace, alpha);
    }
    let space = &problem.space;
    let dist = |a: &usize, b: &usize| space.d(*a, *b);

    if let Some(path) = out {
        let mut w = csv_writer(path)?;
        w.write_record([
            "n",
            "x_n",
            "gap",
            "gaps_monotone_nonincreasing",
            "positive_gaps_strictly_decreasing",
            "trace_diameter",
            "alpha_chain_ok",
        ])?;
        for n in 0..trace.iterates.len() {
            let prefix = &trace.iterates[..=n];
            let gaps = &trace.gaps[..n.min(trace.gaps.len())];
            let d = TraceDiagnostics::compute(prefix, gaps, 0.0, dist);
            let chain = problem
                .alpha
                .as_ref()
                .map(|alpha| (0..=n).all(|i| (i + 1..=n).all(|j| alpha.get(prefix[i], prefix[j]) >= 1.0)));
            let gap = if n < trace.gaps.len() {
                decimal(trace.gaps[n])
            } else {
                String::new()
            };
            w.write_record([
                n.to_string(),
                space.label(trace.iterates[n]).to_string(),
                gap,
                d.gaps_monotone_nonincreasing.to_string(),
                d.positive_gaps_strictly_decreasing.to_string(),
                decimal(d.trace_diameter),
                chain.map(|c| c.to_string()).unwrap_or_default(),
            ])?;
        }
        w.flush()?;
    }

    let converged = trace.fixed_point.is_some();
    let summary = envelope(
        "iterate",
        json!({
            "start": space.label(trace.start),
            "status": trace.status,
            "fixed_point": trace.fixed_point.map(|p| space.label(p)),
            "steps": trace.steps(),
            "iterates": labels(&problem, &trace.iterates),
            "gaps": trace.gaps,
            "diagnostics": trace.diagnostics,
        }),
    )?;
    match report {
        Some(path) => write_json(path, &summary)?,
        None if out.is_none() => emit(None, &summary)?,
        None => println!(
            "status {:?}, fixed point {}",
            trace.status,
            trace.fixed_point.map(|p| space.label(p)).unwrap_or("none")
        ),
    }
    Ok(converged)
}

struct Overrides {
    grid: Option<usize>,
    tol: Option<f64>,
    max_iter: Option<usize>,
}

#[derive(Serialize)]
struct SolveSummary<'a> {
    grid_n: usize,
    tol: f64,
    max_iter: usize,
    status: simfix::picard::TraceStatus,
    iterations: usize,
    /// As a string so that a divergent run's infinite residual survives.
    residual: String,
    m_hat: String,
    gaps: &'a [f64],
    diagnostics: &'a TraceDiagnostics,
    kernel_condition: simfix::hammerstein::KernelConditionReport,
    h_condition: simfix::hammerstein::HConditionReport,
    h_condition_seed: u64,
}

fn solve_cmd(
    spec_path: &Path,
    overrides: Overrides,
    seed: u64,
    pair_count: usize,
    out: Option<&Path>,
    trace_out: Option<&Path>,
    report: Option<&Path>,
) -> Result<Outcome> {
    let mut spec: HammersteinSpec = serde_json::from_str(&read(spec_path)?)
        .with_context(|| format!("malformed Hammerstein spec {}", spec_path.display()))?;
    spec.grid_n = overrides.grid.unwrap_or(spec.grid_n);
    spec.tol = overrides.tol.unwrap_or(spec.tol);
    spec.max_iter = overrides.max_iter.unwrap_or(spec.max_iter);
    let problem = HammersteinProblem::new(spec)?;
    let sol = problem.solve(None)?;

    if let Some(path) = out {
        let mut w = csv_writer(path)?;
        w.write_record(["t", "x", "residual"])?;
        let last = problem.grid_n() - 1;
        for (i, (&t, &x)) in problem.nodes().iter().zip(&sol.solution.values).enumerate() {
            let residual = if i == last {
                decimal(sol.residual)
            } else {
                String::new()
            };
            w.write_record([decimal(t), decimal(x), residual])?;
        }
        w.flush()?;
    }
    match trace_out {
        Some(path) => {
            let mut w = csv_writer(path)?;
            w.write_record(["k", "gap"])?;
            for (k, gap) in sol.trace.gaps.iter().enumerate() {
                w.write_record([(k + 1).to_string(), decimal(*gap)])?;
            }
            w.flush()?;
        }
        None => {
            for (k, gap) in sol.trace.gaps.iter().enumerate() {
                eprintln!("gap {} {}", k + 1, decimal(*gap));
            }
        }
    }

    let slack = Slack::default();
    let m_hat = sol.m_hat();
    let pairs = seeded_perturbation_pairs(&sol.solution, pair_count, 0.5, seed);
    let summary = SolveSummary {
        grid_n: problem.grid_n(),
        tol: problem.tol(),
        max_iter: problem.spec().max_iter,
        status: sol.trace.status,
        iterations: sol.iterations(),
        residual: decimal(sol.residual),
        m_hat: decimal(m_hat),
        gaps: &sol.trace.gaps,
        diagnostics: &sol.trace.diagnostics,
        kernel_condition: problem.check_kernel_condition(m_hat, slack),
        h_condition: problem.check_h_condition(&pairs, slack)?,
        h_condition_seed: seed,
    };
    let converged = sol.converged();
    let summary = envelope("solve-hammerstein", summary)?;
    match report {
        Some(path) => write_json(path, &summary)?,
        None if out.is_none() => emit(None, &summary)?,
        None => println!(
            "status {:?} after {} iterations, residual {}",
            sol.trace.status,
            sol.iterations(),
            decimal(sol.residual)
        ),
    }
    Ok(converged)
}

#[derive(serde::Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct FunctionsFile {
    #[serde(default)]
    zeta: Vec<Zeta>,
    #[serde(default, rename = "G")]
    g: Vec<CClass>,
    #[serde(default)]
    beta: Vec<Beta>,
}

#[derive(Serialize)]
struct BetaRangeReport {
    subject: String,
    samples: usize,
    out_of_range: usize,
    clamped: usize,
}

fn check_functions(path: Option<&Path>, grid_n: usize, out: Option<&Path>) -> Result<Outcome> {
    if grid_n == 0 {
        bail!("--grid must be positive");
    }
    let extra: FunctionsFile = match path {
        Some(p) => {
            serde_json::from_str(&read(p)?).with_context(|| format!("malformed functions file {}", p.display()))?
        }
        None => FunctionsFile::default(),
    };
    let grid = SamplingGrid::logarithmic(1e-6, 1e2, grid_n);
    let slack = Slack::default();
    let zetas: Vec<Zeta> = Zeta::builtins().into_iter().chain(extra.zeta).collect();
    let gs: Vec<CClass> = CClass::builtins().into_iter().chain(extra.g).collect();
    let betas: Vec<Beta> = [Beta::reciprocal(), Beta::constant(0.5)?]
        .into_iter()
        .chain(extra.beta)
        .collect();

    let zeta_reports: Vec<AxiomReport> = zetas.iter().map(|z| check_zeta_axioms(z, &grid, slack)).collect();
    let g_reports: Vec<AxiomReport> = gs.iter().map(|g| check_cg_axioms(g, &grid, slack)).collect();
    let difference = CClass::difference(0.0)?;
    let simulation_reports: Vec<AxiomReport> = zetas
        .iter()
        .map(|z| check_cg_simulation(z, &difference, &grid, slack))
        .collect();
    let beta_reports: Vec<BetaRangeReport> = betas
        .iter()
        .map(|b| {
            let points = std::iter::once(0.0).chain(grid.values().iter().copied());
            let mut r = BetaRangeReport {
                subject: b.describe(),
                samples: 0,
                out_of_range: 0,
                clamped: 0,
            };
            for t in points {
                r.samples += 1;
                match b.eval(t) {
                    Ok(v) => r.clamped += usize::from(v.clamped),
                    Err(_) => r.out_of_range += 1,
                }
            }
            r
        })
        .collect();
    let ok = zeta_reports.iter().all(AxiomReport::passed)
        && g_reports.iter().all(AxiomReport::passed)
        && simulation_reports.iter().all(AxiomReport::passed)
        && beta_reports.iter().all(|r| r.out_of_range == 0);
    let report = envelope(
        "check-functions",
        json!({
            "passed": ok,
            "grid_n": grid_n,
            "zeta": zeta_reports,
            "G": g_reports,
            "zeta_against_difference": simulation_reports,
            "beta": beta_reports,
        }),
    )?;
    emit(out, &report)?;
    Ok(ok)
}

fn sweep_cmd(seed: u64, target: usize, max_instances: usize, out: Option<&Path>) -> Result<Outcome> {
    let config = SweepConfig {
        seed,
        target_qualifying: target,
        max_instances,
    };
    let result = run_sweep(config, Slack::default())?;
    let ok = result.all_properties_hold() && result.counts.qualifying >= target;
    emit(out, &envelope("sweep", &result)?)?;
    Ok(ok)
}
