//! Constructions that embed other problems as fair coverage instances.
//!
//! * maximum k-coverage with uniform set size, every round drawing from the
//!   same set family; perfect covers give Nash welfare exactly 2 while
//!   instances leaving many elements uncovered stay below 1.83;
//! * public decision making with binary utilities, one round per issue;
//! * goods allocation with binary additive valuations, one round per good;
//! * vertex cover, one agent per edge and one round per cover vertex, where
//!   the unsmoothed welfare is either 0 or at least 1.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::exact::{brute_force_opt, brute_force_unsmoothed_opt};
use crate::families::ConstraintFamily;
use crate::model::{coverage_values, validate_solution, AgentSet, Instance, Solution};

/// Tolerance on the exact welfare value 2 of a perfect cover.
pub const PERFECT_COVER_TOLERANCE: f64 = 1e-12;
/// Tolerance on the no-instance welfare bounds.
pub const GAP_BOUND_TOLERANCE: f64 = 1e-9;
/// Welfare ceiling for instances leaving at least `n/e` agents uncovered.
pub const NO_CASE_CEILING: f64 = 1.83;

/// Largest graph handled by the brute-force vertex cover check.
pub const MAX_COVER_VERTICES: usize = 20;

fn dedup_keep_order(sets: impl IntoIterator<Item = AgentSet>) -> Vec<AgentSet> {
    let mut out: Vec<AgentSet> = Vec::new();
    for set in sets {
        if !out.contains(&set) {
            out.push(set);
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaxCoverageInput {
    pub universe_size: usize,
    pub sets: Vec<AgentSet>,
    pub k: usize,
    pub uniform_size: usize,
}

impl MaxCoverageInput {
    pub fn validate(&self) -> Result<()> {
        if self.sets.is_empty() {
            return Err(invalid("max-coverage input has no sets"));
        }
        if self.uniform_size == 0 || self.k == 0 {
            return Err(invalid("set size and k must be positive"));
        }
        if self.k * self.uniform_size != self.universe_size {
            return Err(invalid(format!(
                "k = {} is not n / size = {} / {}",
                self.k, self.universe_size, self.uniform_size
            )));
        }
        for (j, set) in self.sets.iter().enumerate() {
            set.check_range(self.universe_size)?;
            if set.len() != self.uniform_size {
                return Err(invalid(format!(
                    "set {j} has size {}, expected {}",
                    set.len(),
                    self.uniform_size
                )));
            }
        }
        Ok(())
    }
}

/// `T = k` rounds, each drawing from the full set family.
pub fn from_max_k_coverage(input: &MaxCoverageInput) -> Result<Instance> {
    input.validate()?;
    let family = ConstraintFamily::explicit(dedup_keep_order(input.sets.iter().cloned()))?;
    Instance::new(input.universe_size, vec![family; input.k])
}

#[derive(Clone, Debug, PartialEq)]
pub enum GapCheck {
    /// A claimed perfect cover.
    YesCertificate(Solution),
    /// Brute-force check of the no-instance welfare bound.
    NoBound,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapVerdict {
    pub passed: bool,
    pub nsw: f64,
    /// Agents left uncovered by the examined solution.
    pub uncovered: usize,
    /// `((2 - x)/(1 - x))^(1 - x)` at `x = uncovered / n`, for the no-bound check.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<f64>,
    pub detail: String,
}

/// Upper bound on the welfare of a solution leaving fraction `x` of agents
/// uncovered, when every round covers exactly `n / T` agents.
pub fn no_case_bound(x: f64) -> f64 {
    if x >= 1.0 {
        return 1.0;
    }
    ((2.0 - x) / (1.0 - x)).powf(1.0 - x)
}

// Recovers the uniform set size of an instance built by `from_max_k_coverage`.
fn uniform_size(instance: &Instance) -> Result<usize> {
    let mut size = None;
    for family in instance.families() {
        let ConstraintFamily::Explicit { sets } = family else {
            return Err(invalid("gap checks need explicit families"));
        };
        for set in sets {
            match size {
                None => size = Some(set.len()),
                Some(s) if s != set.len() => return Err(invalid("family sets differ in size")),
                Some(_) => {}
            }
        }
    }
    let size = size.unwrap_or(0);
    if size * instance.rounds() != instance.agents() {
        return Err(invalid("rounds times set size does not equal the agent count"));
    }
    Ok(size)
}

pub fn verify_gap(instance: &Instance, check: &GapCheck, limit: usize) -> Result<GapVerdict> {
    uniform_size(instance)?;
    match check {
        GapCheck::YesCertificate(certificate) => {
            let feasibility = validate_solution(instance, certificate)?;
            if !feasibility.is_feasible() {
                return Err(invalid(format!(
                    "certificate is infeasible in rounds {:?}",
                    feasibility.failing_rounds()
                )));
            }
            let profile = coverage_values(instance, certificate)?;
            let nsw = profile.nsw();
            let exact_once = profile.values().iter().all(|&v| v == 2);
            let passed = exact_once && (nsw - 2.0).abs() <= PERFECT_COVER_TOLERANCE;
            let detail = if exact_once {
                format!("perfect cover, NSW = {nsw}")
            } else {
                let bad: Vec<usize> = (0..profile.len()).filter(|&i| profile.get(i) != 2).collect();
                format!("agents {bad:?} are not covered exactly once")
            };
            Ok(GapVerdict {
                passed,
                nsw,
                uncovered: profile.uncovered(),
                bound: None,
                detail,
            })
        }
        GapCheck::NoBound => {
            let opt = brute_force_opt(instance, limit)?;
            let n = instance.agents();
            let uncovered = opt.profile.uncovered();
            let x = uncovered as f64 / n as f64;
            let bound = no_case_bound(x);
            let within = opt.nsw <= bound + GAP_BOUND_TOLERANCE;
            let many_uncovered = x >= (-1f64).exp();
            let under_ceiling = !many_uncovered || opt.nsw <= NO_CASE_CEILING + GAP_BOUND_TOLERANCE;
            Ok(GapVerdict {
                passed: within && under_ceiling,
                nsw: opt.nsw,
                uncovered,
                bound: Some(bound),
                detail: format!(
                    "optimum leaves {uncovered} of {n} uncovered; NSW* = {} vs bound {bound}{}",
                    opt.nsw,
                    if many_uncovered { " (ceiling 1.83 applies)" } else { "" }
                ),
            })
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PublicDecisionInput {
    pub n: usize,
    /// `issues[t][a][i]` is agent `i`'s utility (0 or 1) for alternative `a` of issue `t`.
    pub issues: Vec<Vec<Vec<u8>>>,
}

/// One round per issue; alternative `a` contributes the set of agents that like it.
pub fn from_public_decisions(input: &PublicDecisionInput) -> Result<Instance> {
    let mut families = Vec::with_capacity(input.issues.len());
    for (t, alternatives) in input.issues.iter().enumerate() {
        if alternatives.is_empty() {
            return Err(Error::UnsatisfiableFamily(format!("issue {t} has no alternatives")));
        }
        let mut sets = Vec::with_capacity(alternatives.len());
        for (a, utilities) in alternatives.iter().enumerate() {
            if utilities.len() != input.n {
                return Err(invalid(format!(
                    "issue {t}, alternative {a}: {} utilities for {} agents",
                    utilities.len(),
                    input.n
                )));
            }
            if let Some(bad) = utilities.iter().find(|&&u| u > 1) {
                return Err(invalid(format!(
                    "issue {t}, alternative {a}: utility {bad} is not binary"
                )));
            }
            sets.push(
                utilities
                    .iter()
                    .enumerate()
                    .filter(|(_, &u)| u == 1)
                    .map(|(i, _)| i)
                    .collect(),
            );
        }
        families.push(ConstraintFamily::explicit(dedup_keep_order(sets))?);
    }
    Instance::new(input.n, families)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GoodsAllocationInput {
    pub n: usize,
    pub m: usize,
    /// `valued[i]` lists the goods agent `i` likes.
    pub valued: Vec<Vec<usize>>,
}

/// One round per good, offering it to each agent who values it.
pub fn from_goods_allocation(input: &GoodsAllocationInput) -> Result<Instance> {
    if input.valued.len() != input.n {
        return Err(invalid(format!(
            "{} valuation lists for {} agents",
            input.valued.len(),
            input.n
        )));
    }
    let mut admirers = vec![Vec::new(); input.m];
    for (agent, goods) in input.valued.iter().enumerate() {
        for &g in goods {
            if g >= input.m {
                return Err(invalid(format!("agent {agent} values good {g}, only {} goods", input.m)));
            }
            if !admirers[g].contains(&agent) {
                admirers[g].push(agent);
            }
        }
    }
    let families = admirers
        .into_iter()
        .enumerate()
        .map(|(g, mut agents)| {
            if agents.is_empty() {
                return Err(Error::UnsatisfiableFamily(format!("good {g} is valued by no agent")));
            }
            agents.sort_unstable();
            ConstraintFamily::explicit(agents.into_iter().map(AgentSet::singleton).collect())
        })
        .collect::<Result<Vec<_>>>()?;
    Instance::new(input.n, families)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VertexCoverInput {
    pub vertices: usize,
    pub edges: Vec<(usize, usize)>,
    pub k: usize,
}

impl VertexCoverInput {
    /// Edges with endpoints ordered, sorted and deduplicated; agent `e` is
    /// the `e`-th edge of this list.
    pub fn canonical_edges(&self) -> Result<Vec<(usize, usize)>> {
        let mut edges = Vec::with_capacity(self.edges.len());
        for &(a, b) in &self.edges {
            if a == b {
                return Err(invalid(format!("self-loop at vertex {a}")));
            }
            if a.max(b) >= self.vertices {
                return Err(invalid(format!(
                    "edge ({a}, {b}) leaves the {} vertices",
                    self.vertices
                )));
            }
            edges.push((a.min(b), a.max(b)));
        }
        edges.sort_unstable();
        edges.dedup();
        Ok(edges)
    }

    /// Size of a smallest vertex cover, by exhaustive search.
    pub fn min_cover_size(&self) -> Result<usize> {
        if self.vertices > MAX_COVER_VERTICES {
            return Err(invalid(format!(
                "vertex cover brute force supports at most {MAX_COVER_VERTICES} vertices"
            )));
        }
        let edges = self.canonical_edges()?;
        let best = (0u32..1 << self.vertices)
            .filter(|mask| edges.iter().all(|&(a, b)| mask >> a & 1 == 1 || mask >> b & 1 == 1))
            .map(|mask| mask.count_ones() as usize)
            .min()
            .unwrap_or(0);
        Ok(best)
    }
}

/// One agent per edge and `k` rounds, each choosing some vertex's incident edges.
pub fn from_vertex_cover(input: &VertexCoverInput) -> Result<Instance> {
    if input.k < 1 {
        return Err(invalid("vertex cover threshold k must be at least 1"));
    }
    let edges = input.canonical_edges()?;
    if edges.is_empty() {
        return Err(invalid("graph has no edges, so the instance would have no agents"));
    }
    let incidence = (0..input.vertices).map(|v| {
        edges
            .iter()
            .enumerate()
            .filter(|(_, &(a, b))| a == v || b == v)
            .map(|(e, _)| e)
            .collect::<AgentSet>()
    });
    let family = ConstraintFamily::explicit(dedup_keep_order(incidence))?;
    Instance::new(edges.len(), vec![family; input.k])
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DichotomyVerdict {
    pub cover_exists: bool,
    pub min_cover: usize,
    pub nsw_c: f64,
    /// Cover of size at most k exists iff the unsmoothed optimum is at least 1, else it is 0.
    pub holds: bool,
}

pub fn verify_unsmoothed_dichotomy(input: &VertexCoverInput, limit: usize) -> Result<DichotomyVerdict> {
    let instance = from_vertex_cover(input)?;
    let min_cover = input.min_cover_size()?;
    let cover_exists = min_cover <= input.k;
    let nsw_c = brute_force_unsmoothed_opt(&instance, limit)?.nsw_c;
    let holds = if cover_exists {
        nsw_c >= 1.0
    } else {
        nsw_c == 0.0
    };
    Ok(DichotomyVerdict {
        cover_exists,
        min_cover,
        nsw_c,
        holds,
    })
}
