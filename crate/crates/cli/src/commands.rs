//! Subcommand implementations.
//!
//! Each command returns `Ok(exit_code)` for domain outcomes and
//! `Err(message)` for configuration or I/O failures (exit 1 in `main`).

use std::fs;
use std::path::{Path, PathBuf};

use gippa_core::diagnostics::TerminationReason;
use gippa_core::linalg::Vector;
use gippa_core::operators::{KernelSpec, OperatorSpec};
use gippa_core::pairs::{
    certify_linear_pair, construct_kernel_factored_with, construct_kernel_perturbation,
    construct_kernel_symmetric_with, PairStatus, PairsError,
};
use gippa_core::problems;
use gippa_core::solvers::{
    gippa_run, newton_run, validate_schedules, Schedule, SolverConfig,
};
use gippa_core::IterateTrace;

use crate::config::{ConstructMethod, KernelConfig, ProblemSpec, RunConfig};
use crate::csvio;
use crate::exit_codes;
use crate::fmt_float;
use crate::plot;
use crate::report;

/// Iterate-error threshold used in sweep comparison tables.
const COMPARISON_TOL: f64 = 1e-6;
/// Iteration cap and tolerances for the bundled reproduction targets.
const REPRODUCE_MAX_ITER: usize = 200;
const REPRODUCE_TOL: f64 = 1e-12;

// ── solve ───────────────────────────────────────────────────────────

pub fn cmd_solve(config_path: &Path, out_override: Option<&Path>) -> Result<i32, String> {
    let (cfg, base) = RunConfig::from_file(config_path)?;

    let op = load_problem(&cfg.problem, &base)?;
    let n = op.dimension();

    let kernel = match build_kernel(&cfg.kernel, &base, &op) {
        Ok(k) => k,
        Err(KernelBuildError::Hypothesis { witness, value }) => {
            print_hypothesis_violation(&witness, value);
            return Ok(exit_codes::HYPOTHESIS_VIOLATED);
        }
        Err(KernelBuildError::Other(e)) => return Err(e),
    };
    if kernel.dimension() != n {
        return Err(format!(
            "kernel dimension {} does not match problem dimension {n}",
            kernel.dimension()
        ));
    }
    if cfg.init.x0.len() != n || cfg.init.x1.len() != n {
        return Err(format!("initial points must have dimension {n}"));
    }

    let solver_cfg = SolverConfig {
        gamma: cfg.schedules.gamma.into(),
        alpha: cfg.schedules.alpha.into(),
        tol_step: cfg.tolerances.step,
        tol_residual: cfg.tolerances.residual,
        max_iter: cfg.max_iter,
        x0: Vector::new(cfg.init.x0.clone()),
        x1: Vector::new(cfg.init.x1.clone()),
    };
    let validation = validate_schedules(&solver_cfg);

    let mut trace = match gippa_run(&op, &kernel, &solver_cfg) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("solver error: {e}");
            return Ok(exit_codes::SOLVER_ERROR);
        }
    };
    if let Some(reference) = &cfg.reference {
        if reference.x_star.len() != n {
            return Err(format!("reference point must have dimension {n}"));
        }
        trace = trace.with_reference(Vector::new(reference.x_star.clone()));
    }

    let out_dir = match out_override {
        Some(p) => p.to_path_buf(),
        None => cfg
            .output
            .dir
            .as_ref()
            .map(|d| RunConfig::resolve(&base, d))
            .ok_or("no output directory: pass --out or set output.dir")?,
    };
    fs::create_dir_all(&out_dir)
        .map_err(|e| format!("cannot create {}: {e}", out_dir.display()))?;

    if cfg.output.csv {
        csvio::write_trace(&out_dir.join("trace.csv"), &trace)?;
    }
    if cfg.output.report {
        let text = report::run_report(&trace, &kernel, &validation);
        fs::write(out_dir.join("report.txt"), text)
            .map_err(|e| format!("cannot write report: {e}"))?;
    }
    if cfg.output.plot {
        let series = plot_series(&trace);
        plot::write_log_plot(&out_dir.join("plot.svg"), "solver run", series.0, &[series.1])?;
    }

    println!(
        "termination: {}  iterations: {}  final residual: {}",
        trace.termination,
        trace.iterations(),
        trace.records.last().map(|r| fmt_float(r.residual)).unwrap_or_default()
    );
    if trace.termination == TerminationReason::MaxIterations {
        Ok(exit_codes::MAX_ITER)
    } else {
        Ok(exit_codes::OK)
    }
}

fn plot_series(trace: &IterateTrace) -> (&'static str, (String, Vec<f64>)) {
    match trace.errors_to_reference() {
        Some(errs) => ("error to reference", ("err_to_ref".to_string(), errs)),
        None => ("residual", ("residual".to_string(), trace.residuals())),
    }
}

fn load_problem(spec: &ProblemSpec, base: &Path) -> Result<OperatorSpec, String> {
    match spec {
        ProblemSpec::Affine { a, b } => {
            let a = csvio::read_matrix(&RunConfig::resolve(base, a))?;
            let b = csvio::read_vector(&RunConfig::resolve(base, b))?;
            let op = gippa_core::operators::AffineOperator::new(a, b)
                .map_err(|e| format!("invalid affine operator: {e}"))?;
            Ok(OperatorSpec::Affine(op))
        }
        ProblemSpec::Builtin { name } => problems::builtin_operator(name).ok_or(format!(
            "unknown builtin '{name}' (available: {})",
            problems::builtin_names().join(", ")
        )),
    }
}

enum KernelBuildError {
    Hypothesis { witness: Vector, value: f64 },
    Other(String),
}

impl From<String> for KernelBuildError {
    fn from(s: String) -> Self {
        KernelBuildError::Other(s)
    }
}

fn build_kernel(
    spec: &KernelConfig,
    base: &Path,
    op: &OperatorSpec,
) -> Result<KernelSpec, KernelBuildError> {
    match spec {
        KernelConfig::Matrix { file } => {
            let m = csvio::read_matrix(&RunConfig::resolve(base, file))?;
            KernelSpec::from_user_matrix(m)
                .map_err(|e| KernelBuildError::Other(format!("invalid kernel: {e}")))
        }
        KernelConfig::Identity => Ok(KernelSpec::identity(op.dimension())),
        KernelConfig::Construct { method, a1, replacement } => {
            let a = match op {
                OperatorSpec::Affine(f) => f.matrix().clone(),
                OperatorSpec::Nonlinear(_) => {
                    return Err(KernelBuildError::Other(
                        "kernel construction requires an affine problem".to_string(),
                    ))
                }
            };
            let replacement = replacement.unwrap_or(1.0);
            match method {
                ConstructMethod::Perturbation => {
                    let a1 = a1.as_ref().ok_or_else(|| {
                        KernelBuildError::Other(
                            "kernel.a1 is required for the perturbation method".to_string(),
                        )
                    })?;
                    let a1 = csvio::read_matrix(&RunConfig::resolve(base, a1))?;
                    match construct_kernel_perturbation(&a, &a1) {
                        Ok(k) => Ok(k),
                        Err(PairsError::HypothesisViolated { witness, value }) => {
                            Err(KernelBuildError::Hypothesis { witness, value })
                        }
                        Err(e) => {
                            Err(KernelBuildError::Other(format!("kernel construction failed: {e}")))
                        }
                    }
                }
                ConstructMethod::Symmetric => construct_kernel_symmetric_with(&a, replacement)
                    .map_err(|e| {
                        KernelBuildError::Other(format!("kernel construction failed: {e}"))
                    }),
                ConstructMethod::Factored => construct_kernel_factored_with(&a, replacement)
                    .map_err(|e| {
                        KernelBuildError::Other(format!("kernel construction failed: {e}"))
                    }),
            }
        }
    }
}

fn print_hypothesis_violation(witness: &Vector, value: f64) {
    let coords: Vec<String> = witness.iter().map(|x| fmt_float(*x)).collect();
    eprintln!("hypothesis violated: quadratic form {} at witness {}", fmt_float(value), coords.join(","));
}

// ── kernel ──────────────────────────────────────────────────────────

pub fn cmd_kernel(
    matrix_path: &Path,
    method: ConstructMethod,
    a1_path: Option<&Path>,
    out_path: &Path,
) -> Result<i32, String> {
    let a = csvio::read_matrix(matrix_path)?;
    let constructed = match method {
        ConstructMethod::Perturbation => {
            let a1_path = a1_path.ok_or("--a1 is required for the perturbation method")?;
            let a1 = csvio::read_matrix(a1_path)?;
            match construct_kernel_perturbation(&a, &a1) {
                Ok(k) => k,
                Err(PairsError::HypothesisViolated { witness, value }) => {
                    print_hypothesis_violation(&witness, value);
                    return Ok(exit_codes::HYPOTHESIS_VIOLATED);
                }
                Err(e) => return Err(format!("kernel construction failed: {e}")),
            }
        }
        ConstructMethod::Symmetric => construct_kernel_symmetric_with(&a, 1.0)
            .map_err(|e| format!("kernel construction failed: {e}"))?,
        ConstructMethod::Factored => construct_kernel_factored_with(&a, 1.0)
            .map_err(|e| format!("kernel construction failed: {e}"))?,
    };

    csvio::write_kernel(out_path, &constructed)?;
    let cert = certify_linear_pair(&a, constructed.matrix())
        .map_err(|e| format!("certification failed: {e}"))?;
    print!("{}", report::certificate_lines(&cert));
    Ok(exit_codes::OK)
}

// ── certify ─────────────────────────────────────────────────────────

pub fn cmd_certify(a_path: &Path, b_path: &Path) -> Result<i32, String> {
    let a = csvio::read_matrix(a_path)?;
    let b = csvio::read_matrix(b_path)?;
    let cert = certify_linear_pair(&a, &b).map_err(|e| format!("certification failed: {e}"))?;
    print!("{}", report::certificate_lines(&cert));
    Ok(match cert.status {
        PairStatus::Monotone | PairStatus::StronglyMonotone { .. } => exit_codes::OK,
        PairStatus::NotMonotone { .. } => exit_codes::NOT_MONOTONE,
        PairStatus::Inconclusive => exit_codes::INCONCLUSIVE,
    })
}

// ── rate ────────────────────────────────────────────────────────────

pub fn cmd_rate(trace_path: &Path) -> Result<i32, String> {
    let text = fs::read_to_string(trace_path)
        .map_err(|e| format!("cannot read {}: {e}", trace_path.display()))?;
    let series: Vec<f64> = if text.starts_with(csvio::TRACE_HEADER) {
        let rows = csvio::parse_trace_text(&text)
            .map_err(|e| format!("{}: {e}", trace_path.display()))?;
        if rows.iter().all(|r| r.err_to_ref.is_some()) && !rows.is_empty() {
            rows.iter().map(|r| r.err_to_ref.unwrap()).collect()
        } else {
            rows.iter().map(|r| r.residual).collect()
        }
    } else {
        csvio::read_series(trace_path)?
    };
    let fit = gippa_core::diagnostics::estimate_linear_rate(&series)
        .map_err(|e| format!("rate fit failed: {e}"))?;
    println!("rho_hat: {}", fmt_float(fit.rho_hat));
    println!("r_squared: {}", fmt_float(fit.r_squared));
    println!("window: {}..{}", fit.window.0, fit.window.1);
    Ok(exit_codes::OK)
}

// ── reproduce ───────────────────────────────────────────────────────

/// Bundled configurations: the three single benchmark runs and the four
/// schedule sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReproduceTarget {
    Example1V1,
    Example1V2,
    Example2,
    Figure1a,
    Figure1b,
    Figure3a,
    Figure3b,
}

impl ReproduceTarget {
    pub const ALL: [ReproduceTarget; 7] = [
        ReproduceTarget::Example1V1,
        ReproduceTarget::Example1V2,
        ReproduceTarget::Example2,
        ReproduceTarget::Figure1a,
        ReproduceTarget::Figure1b,
        ReproduceTarget::Figure3a,
        ReproduceTarget::Figure3b,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ReproduceTarget::Example1V1 => "example1-v1",
            ReproduceTarget::Example1V2 => "example1-v2",
            ReproduceTarget::Example2 => "example2",
            ReproduceTarget::Figure1a => "figure1a",
            ReproduceTarget::Figure1b => "figure1b",
            ReproduceTarget::Figure3a => "figure3a",
            ReproduceTarget::Figure3b => "figure3b",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|t| t.name() == s)
    }
}

struct SweepMember {
    id: String,
    gamma: Schedule,
    alpha: Schedule,
}

struct ReproduceProblem {
    op: OperatorSpec,
    kernel: KernelSpec,
    x0: Vector,
    x1: Vector,
    x_ref: Vector,
}

fn example1_problem(v2: bool) -> ReproduceProblem {
    let (x0, x1) = problems::example1_starting_points();
    ReproduceProblem {
        op: OperatorSpec::Affine(problems::example1_operator()),
        kernel: if v2 { problems::example1_kernel_v2() } else { problems::example1_kernel_v1() },
        x0,
        x1,
        x_ref: problems::example1_solution(),
    }
}

/// The nonlinear benchmark with its reference refined to solver precision
/// (the coarse tabulated point would floor every error curve at ~1e-3).
fn example2_problem() -> ReproduceProblem {
    let f = problems::example2_operator();
    let refined = newton_run(&f, &problems::example2_approx_solution(), 1.0, 1e-13, 100)
        .expect("reference refinement converges")
        .final_x()
        .clone();
    let (x0, x1) = problems::example2_starting_points();
    ReproduceProblem {
        op: OperatorSpec::Nonlinear(f),
        kernel: problems::example2_kernel(),
        x0,
        x1,
        x_ref: refined,
    }
}

fn alpha_sweep() -> Vec<(String, Schedule)> {
    let mut members: Vec<(String, Schedule)> = [0.0, 0.1, 0.2, 0.3]
        .iter()
        .map(|&a| (format!("alpha-{a:.1}"), Schedule::Constant(a)))
        .collect();
    members.push(("alpha-ramp".to_string(), problems::reference_alpha_schedule()));
    members.push(("alpha-0.5".to_string(), Schedule::Constant(0.5)));
    members
}

fn sweep_members(target: ReproduceTarget) -> Vec<SweepMember> {
    match target {
        ReproduceTarget::Figure1a => alpha_sweep()
            .into_iter()
            .map(|(id, alpha)| SweepMember {
                id,
                gamma: problems::example1_gamma_schedule(),
                alpha,
            })
            .collect(),
        ReproduceTarget::Figure1b => {
            let mut members: Vec<SweepMember> = [0.05, 0.1, 0.2, 0.5]
                .iter()
                .map(|&g| SweepMember {
                    id: format!("gamma-{g}"),
                    gamma: Schedule::Constant(g),
                    alpha: problems::reference_alpha_schedule(),
                })
                .collect();
            members.push(SweepMember {
                id: "gamma-decaying".to_string(),
                gamma: problems::example1_gamma_schedule(),
                alpha: problems::reference_alpha_schedule(),
            });
            members
        }
        ReproduceTarget::Figure3a => alpha_sweep()
            .into_iter()
            .map(|(id, alpha)| SweepMember {
                id,
                gamma: problems::example2_gamma_schedule(),
                alpha,
            })
            .collect(),
        ReproduceTarget::Figure3b => [0.1, 0.25, 0.5, 0.75, 1.0]
            .iter()
            .map(|&g| SweepMember {
                id: format!("gamma-{g}"),
                gamma: Schedule::Constant(g),
                alpha: problems::reference_alpha_schedule(),
            })
            .collect(),
        _ => Vec::new(),
    }
}

fn reproduce_run(
    problem: &ReproduceProblem,
    gamma: Schedule,
    alpha: Schedule,
) -> Result<IterateTrace, String> {
    let cfg = SolverConfig {
        gamma,
        alpha,
        tol_step: REPRODUCE_TOL,
        tol_residual: REPRODUCE_TOL,
        max_iter: REPRODUCE_MAX_ITER,
        x0: problem.x0.clone(),
        x1: problem.x1.clone(),
    };
    gippa_run(&problem.op, &problem.kernel, &cfg)
        .map(|t| t.with_reference(problem.x_ref.clone()))
        .map_err(|e| e.to_string())
}

pub fn cmd_reproduce(target: ReproduceTarget, out_dir: &Path, want_plot: bool) -> Result<i32, String> {
    fs::create_dir_all(out_dir)
        .map_err(|e| format!("cannot create {}: {e}", out_dir.display()))?;

    match target {
        ReproduceTarget::Example1V1 | ReproduceTarget::Example1V2 | ReproduceTarget::Example2 => {
            let problem = match target {
                ReproduceTarget::Example1V1 => example1_problem(false),
                ReproduceTarget::Example1V2 => example1_problem(true),
                _ => example2_problem(),
            };
            let (gamma, alpha) = match target {
                ReproduceTarget::Example2 => (
                    problems::example2_gamma_schedule(),
                    problems::reference_alpha_schedule(),
                ),
                _ => (
                    problems::example1_gamma_schedule(),
                    problems::reference_alpha_schedule(),
                ),
            };
            let trace = reproduce_run(&problem, gamma, alpha).map_err(|e| {
                format!("{} failed: {e}", target.name())
            })?;
            csvio::write_trace(&out_dir.join("trace.csv"), &trace)?;
            let cfg_for_validation = SolverConfig {
                gamma,
                alpha,
                tol_step: REPRODUCE_TOL,
                tol_residual: REPRODUCE_TOL,
                max_iter: REPRODUCE_MAX_ITER,
                x0: problem.x0.clone(),
                x1: problem.x1.clone(),
            };
            let validation = validate_schedules(&cfg_for_validation);
            let text = report::run_report(&trace, &problem.kernel, &validation);
            fs::write(out_dir.join("report.txt"), text)
                .map_err(|e| format!("cannot write report: {e}"))?;
            if want_plot {
                let series = plot_series(&trace);
                plot::write_log_plot(&out_dir.join("plot.svg"), target.name(), series.0, &[series.1])?;
            }
            println!("{}: {} iterations, termination {}", target.name(), trace.iterations(), trace.termination);
        }
        _ => {
            let problem = match target {
                ReproduceTarget::Figure1a | ReproduceTarget::Figure1b => example1_problem(false),
                _ => example2_problem(),
            };
            let members = sweep_members(target);
            let mut comparison = String::from("config_id,iters_to_1e-6,final_error\n");
            let mut curves: Vec<(String, Vec<f64>)> = Vec::new();
            for member in &members {
                match reproduce_run(&problem, member.gamma, member.alpha) {
                    Ok(trace) => {
                        csvio::write_trace(&out_dir.join(format!("{}.csv", member.id)), &trace)?;
                        let errs = trace.errors_to_reference().expect("reference attached");
                        let iters = trace
                            .iterations_to_error(COMPARISON_TOL)
                            .map(|n| n.to_string())
                            .unwrap_or_default();
                        let final_err =
                            errs.last().map(|e| fmt_float(*e)).unwrap_or_default();
                        comparison.push_str(&format!("{},{},{}\n", member.id, iters, final_err));
                        curves.push((member.id.clone(), errs));
                    }
                    Err(e) => {
                        eprintln!("{}: solver error: {e}", member.id);
                        comparison.push_str(&format!("{},,\n", member.id));
                    }
                }
            }
            fs::write(out_dir.join("comparison.csv"), comparison)
                .map_err(|e| format!("cannot write comparison: {e}"))?;
            if want_plot {
                plot::write_log_plot(
                    &out_dir.join("plot.svg"),
                    target.name(),
                    "error to reference",
                    &curves,
                )?;
            }
            println!("{}: {} configurations", target.name(), members.len());
        }
    }
    Ok(exit_codes::OK)
}

/// Output files a reproduce target writes (without plots), for determinism
/// checks and docs.
pub fn reproduce_artifacts(target: ReproduceTarget) -> Vec<PathBuf> {
    match target {
        ReproduceTarget::Example1V1 | ReproduceTarget::Example1V2 | ReproduceTarget::Example2 => {
            vec![PathBuf::from("trace.csv"), PathBuf::from("report.txt")]
        }
        _ => {
            let mut files: Vec<PathBuf> = sweep_members(target)
                .into_iter()
                .map(|m| PathBuf::from(format!("{}.csv", m.id)))
                .collect();
            files.push(PathBuf::from("comparison.csv"));
            files
        }
    }
}
