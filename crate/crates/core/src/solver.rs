//! Local search on the log social welfare.
//!
//! Starting from any feasible solution, every iteration asks each round's
//! weight oracle for a candidate subset, where agent weights are the
//! marginal change in `ln v_i` from adding (or keeping) the agent in that
//! round. The candidate with the largest gain in log welfare replaces its
//! round's subset, provided the gain clears `epsilon * n / (8T)`. The
//! search stops when no round clears the threshold.
//!
//! With `epsilon = 1/(16nT)` and oracle accuracy `beta = 1/(64nT^2)` the
//! fixpoint is an `18 + 1/(2nT)` approximation of the best Nash social
//! welfare, and the loop runs at most `ceil(128 n T^2 ln(T+1))` times.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::model::{coverage_values, validate_solution, AgentSet, CoverageProfile, Instance, Solution, WeightVector};

/// Slack on the acceptance threshold against representation error.
pub const THRESHOLD_SLACK: f64 = 1e-12;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TraceLevel {
    None,
    #[default]
    Summary,
    Full,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub enum Init {
    /// The default member of every round's family.
    #[default]
    Default,
    Given(Solution),
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SolverConfig {
    pub epsilon_override: Option<f64>,
    pub beta_override: Option<f64>,
    pub init: Init,
    pub max_iterations: Option<u64>,
    pub trace_level: TraceLevel,
}

/// Parameters in effect for one run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResolvedParams {
    pub epsilon: f64,
    pub beta: f64,
    /// Minimum log-welfare gain for an update, `epsilon * n / (8T)`.
    pub threshold: f64,
    pub max_iterations: u64,
    pub epsilon_overridden: bool,
    pub beta_overridden: bool,
}

impl ResolvedParams {
    pub fn resolve(instance: &Instance, config: &SolverConfig) -> Result<Self> {
        let n = instance.agents() as f64;
        let rounds = instance.rounds() as f64;
        let epsilon = config.epsilon_override.unwrap_or(default_epsilon(instance));
        let beta = config.beta_override.unwrap_or(default_beta(instance));
        for (name, value) in [("epsilon", epsilon), ("beta", beta)] {
            if !(value > 0.0 && value < 1.0) {
                return Err(invalid(format!("{name} must lie in (0, 1), got {value}")));
            }
        }
        let max_iterations = config
            .max_iterations
            .unwrap_or_else(|| iteration_bound(instance.agents(), instance.rounds(), epsilon) + 1);
        Ok(ResolvedParams {
            epsilon,
            beta,
            threshold: epsilon * n / (8.0 * rounds),
            max_iterations,
            epsilon_overridden: config.epsilon_override.is_some(),
            beta_overridden: config.beta_override.is_some(),
        })
    }
}

pub fn default_epsilon(instance: &Instance) -> f64 {
    1.0 / (16.0 * instance.agents() as f64 * instance.rounds() as f64)
}

pub fn default_beta(instance: &Instance) -> f64 {
    let rounds = instance.rounds() as f64;
    1.0 / (64.0 * instance.agents() as f64 * rounds * rounds)
}

/// Approximation factor guaranteed at the default parameters, `18 + 1/(2nT)`.
pub fn approximation_factor(n: usize, rounds: usize) -> f64 {
    18.0 + 1.0 / (2.0 * n as f64 * rounds as f64)
}

/// Upper bound on accepted updates: log welfare lies in `[0, n ln(T+1)]`
/// and every update adds at least `epsilon * n / (8T)`.
pub fn iteration_bound(_n: usize, rounds: usize, epsilon: f64) -> u64 {
    let rounds = rounds as f64;
    (8.0 * rounds * (rounds + 1.0).ln() / epsilon).ceil() as u64
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: u64,
    pub tau: usize,
    /// The subset that replaced round `tau`'s selection.
    pub chosen: AgentSet,
    pub delta_phi: f64,
    pub phi_before: f64,
    pub phi_after: f64,
    /// Oracle weight of each round's candidate (full traces only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub candidate_weights: Option<Vec<f64>>,
    /// Log-welfare gain of each round's candidate (full traces only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub candidate_deltas: Option<Vec<f64>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Terminal {
    Converged,
    IterationGuardHit,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveTrace {
    pub params: ResolvedParams,
    pub level: TraceLevel,
    /// Starting solution; absent when tracing is off.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<Solution>,
    pub iteration_count: u64,
    pub iterations: Vec<IterationRecord>,
    pub terminal: Terminal,
}

impl SolveTrace {
    /// Replays recorded updates, yielding every solution the search held.
    pub fn snapshots(&self) -> Option<Vec<Solution>> {
        let mut current = self.initial.clone()?;
        let mut out = vec![current.clone()];
        for record in &self.iterations {
            current = current.replace(record.tau, record.chosen.clone()).ok()?;
            out.push(current.clone());
        }
        Some(out)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveOutcome {
    pub solution: Solution,
    pub profile: CoverageProfile,
    pub trace: SolveTrace,
}

/// Round-`t` weights: `ln v_i - ln(v_i - 1)` for agents in `F_t`,
/// `ln(v_i + 1) - ln v_i` for the rest.
pub fn compute_weights(profile: &CoverageProfile, f_t: &AgentSet, t: usize) -> Result<WeightVector> {
    let mut weights: Vec<f64> = profile
        .values()
        .iter()
        .map(|&v| (f64::from(v) + 1.0).ln() - f64::from(v).ln())
        .collect();
    for i in f_t.iter() {
        let v = *profile.values().get(i).ok_or(Error::AgentOutOfRange {
            index: i,
            n: profile.len(),
        })?;
        if v < 2 {
            return Err(Error::Internal(format!(
                "agent {i} is selected in round {t} but has coverage value {v}"
            )));
        }
        weights[i] = f64::from(v).ln() - (f64::from(v) - 1.0).ln();
    }
    Ok(WeightVector::new(t, weights))
}

/// `phi(X, F_{-t}) - phi(F)`, both sides recomputed from coverage counts.
pub fn phi_delta(instance: &Instance, solution: &Solution, t: usize, x: &AgentSet) -> Result<f64> {
    let before = coverage_values(instance, solution)?;
    let after = coverage_values(instance, &solution.replace(t, x.clone())?)?;
    Ok(after.log_welfare() - before.log_welfare())
}

fn initial_solution(instance: &Instance, init: &Init) -> Result<Solution> {
    match init {
        Init::Default => instance
            .families()
            .iter()
            .map(|f| f.some_member())
            .collect::<Result<Vec<_>>>()
            .map(Solution::new),
        Init::Given(start) => {
            let verdict = validate_solution(instance, start)?;
            if !verdict.is_feasible() {
                return Err(invalid(format!(
                    "initial solution is infeasible in rounds {:?}",
                    verdict.failing_rounds()
                )));
            }
            Ok(start.clone())
        }
    }
}

struct Candidate {
    round: usize,
    subset: AgentSet,
    delta: f64,
}

pub fn solve(instance: &Instance, config: &SolverConfig) -> Result<SolveOutcome> {
    let params = ResolvedParams::resolve(instance, config)?;
    let level = config.trace_level;
    let mut current = initial_solution(instance, &config.init)?;
    let mut trace = SolveTrace {
        params: params.clone(),
        level,
        initial: (level != TraceLevel::None).then(|| current.clone()),
        iteration_count: 0,
        iterations: Vec::new(),
        terminal: Terminal::Converged,
    };

    loop {
        let profile = coverage_values(instance, &current)?;
        let phi = profile.log_welfare();

        let mut best: Option<Candidate> = None;
        let mut weights_seen = Vec::with_capacity(instance.rounds());
        let mut deltas_seen = Vec::with_capacity(instance.rounds());
        for (t, family) in instance.families().iter().enumerate() {
            let weights = compute_weights(&profile, current.set(t), t)?;
            let candidate = family.approx_max_weight(&weights, params.beta)?;
            let delta = phi_delta(instance, &current, t, &candidate.subset)?;
            weights_seen.push(candidate.weight);
            deltas_seen.push(delta);
            let clears = delta >= params.threshold - THRESHOLD_SLACK;
            if clears && best.as_ref().is_none_or(|b| delta > b.delta) {
                best = Some(Candidate {
                    round: t,
                    subset: candidate.subset,
                    delta,
                });
            }
        }

        let Some(update) = best else {
            return Ok(SolveOutcome {
                solution: current,
                profile,
                trace,
            });
        };
        if trace.iteration_count >= params.max_iterations {
            trace.terminal = Terminal::IterationGuardHit;
            return Err(Error::IterationGuard {
                limit: params.max_iterations,
                trace: Box::new(trace),
            });
        }

        current = current.replace(update.round, update.subset.clone())?;
        let phi_after = coverage_values(instance, &current)?.log_welfare();
        trace.iteration_count += 1;
        if level != TraceLevel::None {
            let full = level == TraceLevel::Full;
            trace.iterations.push(IterationRecord {
                iteration: trace.iteration_count,
                tau: update.round,
                chosen: update.subset,
                delta_phi: update.delta,
                phi_before: phi,
                phi_after,
                candidate_weights: full.then_some(weights_seen),
                candidate_deltas: full.then_some(deltas_seen),
            });
        }
    }
}
