//! Subcommand implementations. Each returns the documents it would write;
//! `main` handles files and exit codes.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;

use nashcover_core::exact::{brute_force_opt, brute_force_unsmoothed_opt};
use nashcover_core::reductions::{
    from_goods_allocation, from_max_k_coverage, from_public_decisions, from_vertex_cover, GoodsAllocationInput,
    MaxCoverageInput, PublicDecisionInput, VertexCoverInput,
};
use nashcover_core::solver::{approximation_factor, default_epsilon};
use nashcover_core::{
    coverage_values, solve, suboptimal_agents, validate_solution, Error, Init, Instance, SolverConfig, TraceLevel,
};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::format::{from_json, to_json, InstanceFile, SolutionFile, TraceFile};

pub const EXIT_INVALID: i32 = 2;
pub const EXIT_GUARD: i32 = 3;
pub const EXIT_TOO_LARGE: i32 = 4;
pub const EXIT_VERIFY: i32 = 5;
pub const EXIT_SELFCHECK: i32 = 6;

/// A failure carrying its process exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn new(code: i32, message: impl Into<String>) -> Self {
        CliError {
            code,
            message: message.into(),
        }
    }

    pub fn invalid(message: impl Into<String>) -> Self {
        Self::new(EXIT_INVALID, message)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::IterationGuard { .. } | Error::Internal(_) => EXIT_GUARD,
            Error::SearchSpaceTooLarge { .. } | Error::EnumerationTooLarge { .. } => EXIT_TOO_LARGE,
            _ => EXIT_INVALID,
        };
        CliError::new(code, e.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::invalid(format!("cannot read {}: {e}", path.display())))?;
    from_json(&text).map_err(|e| CliError::invalid(format!("{}: {e}", path.display())))
}

pub fn read_instance(path: &Path) -> CliResult<Instance> {
    let file: InstanceFile = read_json(path)?;
    file.into_instance()
        .map_err(|e| CliError::invalid(format!("{}: {e}", path.display())))
}

/// Writes `text` to `path` through a temporary file in the same directory,
/// so a failed run never leaves a partial file behind.
pub fn write_atomic(path: &Path, text: &str) -> CliResult<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let io_err = |e: std::io::Error| CliError::invalid(format!("cannot write {}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
    tmp.write_all(text.as_bytes()).map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}

pub fn json<T: Serialize>(value: &T) -> CliResult<String> {
    to_json(value).map_err(|e| CliError::new(EXIT_GUARD, format!("serialization failed: {e}")))
}

#[derive(Clone, Debug, Default)]
pub struct SolveOptions {
    pub epsilon: Option<f64>,
    pub beta: Option<f64>,
    pub init: Option<SolutionFile>,
    pub max_iterations: Option<u64>,
    pub trace: TraceLevel,
}

pub fn cmd_solve(instance: &Instance, options: &SolveOptions) -> CliResult<(SolutionFile, TraceFile)> {
    let config = SolverConfig {
        epsilon_override: options.epsilon,
        beta_override: options.beta,
        init: match &options.init {
            Some(file) => Init::Given(file.solution()),
            None => Init::Default,
        },
        max_iterations: options.max_iterations,
        trace_level: options.trace,
    };
    let outcome = solve(instance, &config)?;
    let mut file = SolutionFile::new(&outcome.solution, &outcome.profile);
    file.iterations = Some(outcome.trace.iteration_count);
    let trace = TraceFile::new(instance, &outcome.trace, options.init.is_some());
    Ok((file, trace))
}

pub fn cmd_exact(instance: &Instance, limit: usize, unsmoothed: bool) -> CliResult<SolutionFile> {
    if unsmoothed {
        let r = brute_force_unsmoothed_opt(instance, limit)?;
        let mut file = SolutionFile::new(&r.solution, &r.profile);
        file.nsw_c = Some(r.nsw_c);
        file.explored = Some(r.explored);
        Ok(file)
    } else {
        let r = brute_force_opt(instance, limit)?;
        let mut file = SolutionFile::new(&r.solution, &r.profile);
        file.explored = Some(r.explored);
        Ok(file)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlphaCheck {
    pub alpha: u32,
    pub size: usize,
    pub bound: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub passed: bool,
    pub feasible: bool,
    pub failing_rounds: Vec<usize>,
    pub nsw: Option<f64>,
    pub phi: Option<f64>,
    /// The file's recorded nsw and phi agree with the recomputed values.
    pub recorded_values_match: Option<bool>,
    pub nsw_opt: Option<f64>,
    pub ratio: Option<f64>,
    pub ratio_bound: Option<f64>,
    pub suboptimal: Vec<AlphaCheck>,
    pub messages: Vec<String>,
}

const RECORDED_TOLERANCE: f64 = 1e-9;

/// Checks feasibility and recorded metrics; with a reference optimum, also
/// the approximation ratio and `|S_alpha| <= n / alpha` for `alpha` in `4..=T+1`.
pub fn cmd_verify(
    instance: &Instance,
    solution: &SolutionFile,
    exact: Option<&SolutionFile>,
) -> CliResult<VerifyReport> {
    let mut report = VerifyReport {
        passed: false,
        feasible: false,
        failing_rounds: Vec::new(),
        nsw: None,
        phi: None,
        recorded_values_match: None,
        nsw_opt: None,
        ratio: None,
        ratio_bound: None,
        suboptimal: Vec::new(),
        messages: Vec::new(),
    };
    let sol = solution.solution();
    let feasibility = validate_solution(instance, &sol)?;
    report.feasible = feasibility.is_feasible();
    report.failing_rounds = feasibility.failing_rounds();
    for &t in &report.failing_rounds {
        report.messages.push(format!(
            "round {t}: {:?} is not a member of the {} family",
            sol.set(t),
            instance.families()[t].kind()
        ));
    }
    if !report.feasible {
        return Ok(report);
    }

    let profile = coverage_values(instance, &sol)?;
    let (nsw, phi) = (profile.nsw(), profile.log_welfare());
    report.nsw = Some(nsw);
    report.phi = Some(phi);
    let matches = (solution.nsw - nsw).abs() <= RECORDED_TOLERANCE * nsw.max(1.0)
        && (solution.phi - phi).abs() <= RECORDED_TOLERANCE * phi.abs().max(1.0);
    report.recorded_values_match = Some(matches);
    if !matches {
        report.messages.push(format!(
            "recorded nsw/phi {}/{} differ from recomputed {nsw}/{phi}",
            solution.nsw, solution.phi
        ));
    }
    let mut passed = matches;

    if let Some(exact) = exact {
        let opt_solution = exact.solution();
        let opt_feasible = validate_solution(instance, &opt_solution)?;
        if !opt_feasible.is_feasible() {
            return Err(CliError::invalid(format!(
                "reference solution is infeasible in rounds {:?}",
                opt_feasible.failing_rounds()
            )));
        }
        let opt = coverage_values(instance, &opt_solution)?;
        let (n, rounds) = (instance.agents(), instance.rounds());
        let ratio = nsw / opt.nsw();
        let ratio_bound = 1.0 / approximation_factor(n, rounds);
        report.nsw_opt = Some(opt.nsw());
        report.ratio = Some(ratio);
        report.ratio_bound = Some(ratio_bound);
        if ratio < ratio_bound {
            passed = false;
            report.messages.push(format!("ratio {ratio} is below {ratio_bound}"));
        }
        let epsilon = default_epsilon(instance);
        for alpha in 4..=(rounds as u32 + 1) {
            let s = suboptimal_agents(&profile, &opt, alpha, epsilon)?;
            let ok = s.within_bound();
            if !ok {
                passed = false;
                report
                    .messages
                    .push(format!("|S_{alpha}| = {} exceeds {}", s.members.len(), s.bound));
            }
            report.suboptimal.push(AlphaCheck {
                alpha,
                size: s.members.len(),
                bound: s.bound,
                passed: ok,
            });
        }
    }
    report.passed = passed;
    Ok(report)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReduceKind {
    MaxCoverage,
    PublicDecisions,
    Goods,
    VertexCover,
}

pub fn cmd_reduce(kind: ReduceKind, input: &Path) -> CliResult<InstanceFile> {
    let instance = match kind {
        ReduceKind::MaxCoverage => from_max_k_coverage(&read_json::<MaxCoverageInput>(input)?)?,
        ReduceKind::PublicDecisions => from_public_decisions(&read_json::<PublicDecisionInput>(input)?)?,
        ReduceKind::Goods => from_goods_allocation(&read_json::<GoodsAllocationInput>(input)?)?,
        ReduceKind::VertexCover => from_vertex_cover(&read_json::<VertexCoverInput>(input)?)?,
    };
    Ok(InstanceFile::from_instance(&instance))
}
