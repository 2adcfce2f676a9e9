//! Instances, solutions and the welfare metrics defined over them.
//!
//! Agents are indexed `0..n` everywhere. A solution picks one agent subset
//! per round; an agent's coverage value is one plus the number of rounds
//! whose subset contains it.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::families::ConstraintFamily;

/// A canonical agent subset: strictly increasing indices.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(from = "Vec<usize>", into = "Vec<usize>")]
pub struct AgentSet(Vec<usize>);

impl AgentSet {
    pub fn empty() -> Self {
        AgentSet(Vec::new())
    }

    pub fn singleton(agent: usize) -> Self {
        AgentSet(vec![agent])
    }

    /// Builds a set from a bitmask over agents `0..64`.
    pub fn from_mask(mask: u64) -> Self {
        AgentSet((0..64).filter(|i| mask >> i & 1 == 1).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, agent: usize) -> bool {
        self.0.binary_search(&agent).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    /// Largest index, if any.
    pub fn max_agent(&self) -> Option<usize> {
        self.0.last().copied()
    }

    pub fn check_range(&self, n: usize) -> Result<()> {
        match self.max_agent() {
            Some(index) if index >= n => Err(Error::AgentOutOfRange { index, n }),
            _ => Ok(()),
        }
    }

    /// Agents in exactly one of the two sets.
    pub fn symmetric_difference(&self, other: &AgentSet) -> AgentSet {
        let mut out = Vec::new();
        let (mut a, mut b) = (self.0.iter().peekable(), other.0.iter().peekable());
        loop {
            match (a.peek(), b.peek()) {
                (Some(&&x), Some(&&y)) if x == y => {
                    a.next();
                    b.next();
                }
                (Some(&&x), Some(&&y)) if x < y => {
                    out.push(x);
                    a.next();
                }
                (Some(_), Some(&&y)) => {
                    out.push(y);
                    b.next();
                }
                (Some(&&x), None) => {
                    out.push(x);
                    a.next();
                }
                (None, Some(&&y)) => {
                    out.push(y);
                    b.next();
                }
                (None, None) => break,
            }
        }
        AgentSet(out)
    }
}

impl From<Vec<usize>> for AgentSet {
    fn from(mut agents: Vec<usize>) -> Self {
        agents.sort_unstable();
        agents.dedup();
        AgentSet(agents)
    }
}

impl<const N: usize> From<[usize; N]> for AgentSet {
    fn from(agents: [usize; N]) -> Self {
        AgentSet::from(agents.to_vec())
    }
}

impl FromIterator<usize> for AgentSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        AgentSet::from(iter.into_iter().collect::<Vec<_>>())
    }
}

impl From<AgentSet> for Vec<usize> {
    fn from(set: AgentSet) -> Self {
        set.0
    }
}

impl fmt::Debug for AgentSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.0.iter()).finish()
    }
}

/// A fair coverage instance: `n` agents and one constraint family per round.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    n: usize,
    families: Vec<ConstraintFamily>,
}

impl Instance {
    pub fn new(n: usize, families: Vec<ConstraintFamily>) -> Result<Self> {
        if n == 0 {
            return Err(invalid("instance needs at least one agent"));
        }
        if families.is_empty() {
            return Err(invalid("instance needs at least one round"));
        }
        for (round, family) in families.iter().enumerate() {
            family
                .validate(n)
                .map_err(|e| invalid(format!("round {round}: {e}")))?;
        }
        Ok(Instance { n, families })
    }

    pub fn agents(&self) -> usize {
        self.n
    }

    pub fn rounds(&self) -> usize {
        self.families.len()
    }

    pub fn families(&self) -> &[ConstraintFamily] {
        &self.families
    }

    pub fn family(&self, round: usize) -> Result<&ConstraintFamily> {
        self.families.get(round).ok_or(Error::RoundOutOfRange {
            round,
            rounds: self.rounds(),
        })
    }
}

/// One agent subset per round.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Solution {
    sets: Vec<AgentSet>,
}

impl Solution {
    pub fn new(sets: Vec<AgentSet>) -> Self {
        Solution { sets }
    }

    pub fn rounds(&self) -> usize {
        self.sets.len()
    }

    pub fn sets(&self) -> &[AgentSet] {
        &self.sets
    }

    pub fn set(&self, round: usize) -> &AgentSet {
        &self.sets[round]
    }

    pub fn into_sets(self) -> Vec<AgentSet> {
        self.sets
    }

    /// The solution with round `t`'s subset swapped for `x`.
    pub fn replace(&self, t: usize, x: AgentSet) -> Result<Solution> {
        if t >= self.sets.len() {
            return Err(Error::RoundOutOfRange {
                round: t,
                rounds: self.sets.len(),
            });
        }
        let mut sets = self.sets.clone();
        sets[t] = x;
        Ok(Solution { sets })
    }

    pub(crate) fn check_shape(&self, n: usize, rounds: usize) -> Result<()> {
        if self.sets.len() != rounds {
            return Err(invalid(format!(
                "solution has {} subsets, instance has {rounds} rounds",
                self.sets.len()
            )));
        }
        self.sets.iter().try_for_each(|set| set.check_range(n))
    }
}

/// Per-agent coverage values `v_i`, each in `1..=T+1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CoverageProfile {
    values: Vec<u32>,
}

impl CoverageProfile {
    /// Counts coverage from raw subsets over agents `0..n`.
    pub fn from_sets(n: usize, sets: &[AgentSet]) -> Result<Self> {
        let mut values = vec![1u32; n];
        for set in sets {
            set.check_range(n)?;
            for i in set.iter() {
                values[i] += 1;
            }
        }
        Ok(CoverageProfile { values })
    }

    pub fn from_values(values: Vec<u32>) -> Result<Self> {
        if values.is_empty() {
            return Err(invalid("coverage profile over zero agents"));
        }
        if values.contains(&0) {
            return Err(invalid("coverage values are smoothed and must be at least 1"));
        }
        Ok(CoverageProfile { values })
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    pub fn get(&self, agent: usize) -> u32 {
        self.values[agent]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Nash social welfare: the geometric mean of the coverage values.
    pub fn nsw(&self) -> f64 {
        (self.log_welfare() / self.values.len() as f64).exp()
    }

    /// Log social welfare `Σ ln v_i`, in nats.
    pub fn log_welfare(&self) -> f64 {
        self.values.iter().map(|&v| f64::from(v).ln()).sum()
    }

    /// Agents covered by no selected subset.
    pub fn uncovered(&self) -> usize {
        self.values.iter().filter(|&&v| v == 1).count()
    }
}

/// Coverage values of `solution` in `instance`. Feasibility is not required.
pub fn coverage_values(instance: &Instance, solution: &Solution) -> Result<CoverageProfile> {
    solution.check_shape(instance.agents(), instance.rounds())?;
    CoverageProfile::from_sets(instance.agents(), solution.sets())
}

pub fn nsw(profile: &CoverageProfile) -> f64 {
    profile.nsw()
}

pub fn log_welfare(profile: &CoverageProfile) -> f64 {
    profile.log_welfare()
}

/// Per-round agent weights, in nats.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightVector {
    pub round: usize,
    pub weights: Vec<f64>,
}

impl WeightVector {
    pub fn new(round: usize, weights: Vec<f64>) -> Self {
        WeightVector { round, weights }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Total weight of `set`.
    pub fn weight_of(&self, set: &AgentSet) -> f64 {
        set.iter().map(|i| self.weights[i]).sum()
    }
}

/// The alpha-suboptimal agents of a profile relative to an optimal one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuboptimalReport {
    pub alpha: u32,
    pub members: AgentSet,
    /// `n / alpha`, the size bound that holds at a local-search fixpoint.
    pub bound: f64,
}

impl SuboptimalReport {
    pub fn within_bound(&self) -> bool {
        self.members.len() as f64 <= self.bound
    }
}

/// Agents with `v_i < v*_i / (alpha * (2.25 + epsilon))`.
pub fn suboptimal_agents(
    profile: &CoverageProfile,
    optimal: &CoverageProfile,
    alpha: u32,
    epsilon: f64,
) -> Result<SuboptimalReport> {
    if profile.len() != optimal.len() {
        return Err(invalid(format!(
            "profile lengths differ: {} vs {}",
            profile.len(),
            optimal.len()
        )));
    }
    if alpha == 0 {
        return Err(invalid("alpha must be at least 1"));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(invalid(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    let scale = f64::from(alpha) * (2.25 + epsilon);
    let members = profile
        .values()
        .iter()
        .zip(optimal.values())
        .enumerate()
        .filter(|(_, (&v, &opt))| f64::from(v) < f64::from(opt) / scale)
        .map(|(i, _)| i)
        .collect();
    Ok(SuboptimalReport {
        alpha,
        members,
        bound: profile.len() as f64 / f64::from(alpha),
    })
}

/// Per-round membership verdict for a solution.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Feasibility {
    pub rounds: Vec<bool>,
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        self.rounds.iter().all(|&ok| ok)
    }

    pub fn failing_rounds(&self) -> Vec<usize> {
        self.rounds
            .iter()
            .enumerate()
            .filter(|(_, &ok)| !ok)
            .map(|(t, _)| t)
            .collect()
    }
}

pub fn validate_solution(instance: &Instance, solution: &Solution) -> Result<Feasibility> {
    solution.check_shape(instance.agents(), instance.rounds())?;
    let rounds = instance
        .families()
        .iter()
        .zip(solution.sets())
        .map(|(family, set)| family.contains(set))
        .collect();
    Ok(Feasibility { rounds })
}
