//! Constraint families and approximate weight maximization over them.
//!
//! Each round of an instance restricts its subset to a family `I_t` of agent
//! subsets. The local search only needs two things from a family: a
//! membership test and an oracle returning a member whose total weight is
//! within a `(1 - beta)` factor of the best member. Explicit lists,
//! uniform and partition matroids, and bipartite matchings are maximized
//! exactly; knapsack families go through a profit-scaling FPTAS.

mod knapsack;
mod matching;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::model::{AgentSet, WeightVector};

pub use knapsack::fptas as knapsack_fptas;
pub use matching::{max_weight_matchable, saturates};

/// Largest universe the subset scan in [`ConstraintFamily::enumerate_members`] accepts.
pub const MAX_SCAN_AGENTS: usize = 24;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ConstraintFamily {
    /// A listed family of subsets.
    Explicit { sets: Vec<AgentSet> },
    /// Subsets whose total demand fits in the capacity.
    Knapsack { demands: Vec<u64>, capacity: u64 },
    /// All subsets of size at most `k`.
    Cardinality { k: usize },
    /// Subsets of the union of `parts` taking at most `limits[j]` agents from part `j`.
    Partition {
        parts: Vec<AgentSet>,
        limits: Vec<usize>,
    },
    /// Subsets that can be matched into distinct slots, each agent to one of its `prefs`.
    Matching {
        slots: usize,
        prefs: Vec<Vec<usize>>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Exactness {
    Exact,
    Fptas,
}

/// A family member returned by the weight oracle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub subset: AgentSet,
    pub weight: f64,
    pub exactness: Exactness,
}

/// Sorts agents by weight, heaviest first, dropping zero weights. Ties go
/// to the lower index.
fn greedy_order(candidates: impl Iterator<Item = usize>, weights: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = candidates.filter(|&i| weights[i] > 0.0).collect();
    order.sort_by(|&a, &b| weights[b].total_cmp(&weights[a]).then(a.cmp(&b)));
    order
}

impl ConstraintFamily {
    pub fn explicit(sets: Vec<AgentSet>) -> Result<Self> {
        if sets.is_empty() {
            return Err(Error::UnsatisfiableFamily(
                "explicit family lists no subsets".into(),
            ));
        }
        Ok(ConstraintFamily::Explicit { sets })
    }

    pub fn knapsack(demands: Vec<u64>, capacity: u64) -> Self {
        ConstraintFamily::Knapsack { demands, capacity }
    }

    pub fn cardinality(k: usize) -> Self {
        ConstraintFamily::Cardinality { k }
    }

    pub fn partition(parts: Vec<AgentSet>, limits: Vec<usize>) -> Result<Self> {
        let family = ConstraintFamily::Partition { parts, limits };
        family.check_structure()?;
        Ok(family)
    }

    pub fn matching(slots: usize, prefs: Vec<Vec<usize>>) -> Result<Self> {
        let family = ConstraintFamily::Matching { slots, prefs };
        family.check_structure()?;
        Ok(family)
    }

    pub fn kind(&self) -> &'static str {
        match self {
            ConstraintFamily::Explicit { .. } => "explicit",
            ConstraintFamily::Knapsack { .. } => "knapsack",
            ConstraintFamily::Cardinality { .. } => "cardinality",
            ConstraintFamily::Partition { .. } => "partition",
            ConstraintFamily::Matching { .. } => "matching",
        }
    }

    /// True for kinds whose oracle returns an exact maximizer.
    pub fn is_exact(&self) -> bool {
        !matches!(self, ConstraintFamily::Knapsack { .. })
    }

    // Checks that do not depend on the agent count.
    fn check_structure(&self) -> Result<()> {
        match self {
            ConstraintFamily::Explicit { sets } if sets.is_empty() => Err(
                Error::UnsatisfiableFamily("explicit family lists no subsets".into()),
            ),
            ConstraintFamily::Partition { parts, limits } => {
                if parts.len() != limits.len() {
                    return Err(invalid(format!(
                        "partition has {} parts but {} limits",
                        parts.len(),
                        limits.len()
                    )));
                }
                let mut seen: Vec<usize> = parts.iter().flat_map(|p| p.iter()).collect();
                let total = seen.len();
                seen.sort_unstable();
                seen.dedup();
                if seen.len() != total {
                    return Err(invalid("partition parts overlap"));
                }
                Ok(())
            }
            ConstraintFamily::Matching { slots, prefs } => {
                if *slots == 0 {
                    return Err(invalid("matching family needs at least one slot"));
                }
                for (agent, list) in prefs.iter().enumerate() {
                    if let Some(&bad) = list.iter().find(|&&s| s >= *slots) {
                        return Err(invalid(format!(
                            "agent {agent} prefers slot {bad}, only {slots} slots exist"
                        )));
                    }
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Checks the family against an instance with `n` agents.
    pub fn validate(&self, n: usize) -> Result<()> {
        self.check_structure()?;
        match self {
            ConstraintFamily::Explicit { sets } => {
                sets.iter().try_for_each(|s| s.check_range(n))
            }
            ConstraintFamily::Knapsack { demands, .. } if demands.len() != n => Err(invalid(
                format!("knapsack lists {} demands for {n} agents", demands.len()),
            )),
            ConstraintFamily::Knapsack { .. } => Ok(()),
            ConstraintFamily::Cardinality { k } if *k > n => {
                Err(invalid(format!("cardinality bound {k} exceeds n = {n}")))
            }
            ConstraintFamily::Cardinality { .. } => Ok(()),
            ConstraintFamily::Partition { parts, .. } => {
                parts.iter().try_for_each(|p| p.check_range(n))
            }
            ConstraintFamily::Matching { prefs, .. } if prefs.len() != n => Err(invalid(
                format!("matching lists preferences for {} of {n} agents", prefs.len()),
            )),
            ConstraintFamily::Matching { .. } => Ok(()),
        }
    }

    /// Membership test.
    pub fn contains(&self, x: &AgentSet) -> bool {
        match self {
            ConstraintFamily::Explicit { sets } => sets.iter().any(|s| s == x),
            ConstraintFamily::Knapsack { demands, capacity } => {
                let mut total: u64 = 0;
                for i in x.iter() {
                    let Some(&d) = demands.get(i) else {
                        return false;
                    };
                    total = match total.checked_add(d) {
                        Some(t) => t,
                        None => return false,
                    };
                }
                total <= *capacity
            }
            ConstraintFamily::Cardinality { k } => x.len() <= *k,
            ConstraintFamily::Partition { parts, limits } => {
                let mut used = vec![0usize; parts.len()];
                for i in x.iter() {
                    match parts.iter().position(|p| p.contains(i)) {
                        Some(j) => used[j] += 1,
                        None => return false,
                    }
                }
                used.iter().zip(limits).all(|(u, l)| u <= l)
            }
            ConstraintFamily::Matching { slots, prefs } => {
                x.max_agent().is_none_or(|m| m < prefs.len()) && saturates(x, prefs, *slots)
            }
        }
    }

    // Agents that can appear in some member, used for singleton fallbacks.
    fn candidate_agents(&self) -> Vec<usize> {
        match self {
            ConstraintFamily::Explicit { sets } => {
                sets.iter().flat_map(|s| s.iter()).collect::<AgentSet>().into()
            }
            ConstraintFamily::Knapsack { demands, .. } => (0..demands.len()).collect(),
            ConstraintFamily::Cardinality { .. } => vec![0],
            ConstraintFamily::Partition { parts, .. } => {
                parts.iter().flat_map(|p| p.iter()).collect::<AgentSet>().into()
            }
            ConstraintFamily::Matching { prefs, .. } => (0..prefs.len()).collect(),
        }
    }

    /// A deterministic member: the first listed set for explicit families,
    /// otherwise the empty set when feasible, else the lowest-index
    /// feasible singleton.
    pub fn some_member(&self) -> Result<AgentSet> {
        if let ConstraintFamily::Explicit { sets } = self {
            return sets.first().cloned().ok_or_else(|| {
                Error::UnsatisfiableFamily("explicit family lists no subsets".into())
            });
        }
        let empty = AgentSet::empty();
        if self.contains(&empty) {
            return Ok(empty);
        }
        self.candidate_agents()
            .into_iter()
            .map(AgentSet::singleton)
            .find(|s| self.contains(s))
            .ok_or_else(|| Error::UnsatisfiableFamily(format!("{} family has no member", self.kind())))
    }

    /// Returns a member whose weight is at least `(1 - beta)` times the
    /// maximum member weight.
    pub fn approx_max_weight(&self, w: &WeightVector, beta: f64) -> Result<OracleResult> {
        if !(beta > 0.0 && beta < 1.0) {
            return Err(Error::BetaOutOfRange(beta));
        }
        if let Some(bad) = w.weights.iter().find(|x| !(x.is_finite() && **x >= 0.0)) {
            return Err(invalid(format!("weights must be finite and non-negative, got {bad}")));
        }
        let weights = &w.weights;
        let n = weights.len();
        let subset = match self {
            ConstraintFamily::Explicit { sets } => {
                sets.iter().try_for_each(|s| s.check_range(n))?;
                let mut best: Option<(f64, &AgentSet)> = None;
                for set in sets {
                    let weight = w.weight_of(set);
                    let better = match best {
                        None => true,
                        Some((bw, bs)) => weight > bw || (weight == bw && set < bs),
                    };
                    if better {
                        best = Some((weight, set));
                    }
                }
                best.map(|(_, s)| s.clone()).ok_or_else(|| {
                    Error::UnsatisfiableFamily("explicit family lists no subsets".into())
                })?
            }
            ConstraintFamily::Knapsack { demands, capacity } => {
                self.expect_len(demands.len(), n)?;
                knapsack_fptas(demands, *capacity, weights, beta)
            }
            ConstraintFamily::Cardinality { k } => {
                greedy_order(0..n, weights).into_iter().take(*k).collect()
            }
            ConstraintFamily::Partition { parts, limits } => {
                parts.iter().try_for_each(|p| p.check_range(n))?;
                parts
                    .iter()
                    .zip(limits)
                    .flat_map(|(part, &limit)| {
                        greedy_order(part.iter(), weights).into_iter().take(limit)
                    })
                    .collect()
            }
            ConstraintFamily::Matching { slots, prefs } => {
                self.expect_len(prefs.len(), n)?;
                max_weight_matchable(prefs, *slots, weights)
            }
        };
        let weight = w.weight_of(&subset);
        let exactness = if self.is_exact() {
            Exactness::Exact
        } else {
            Exactness::Fptas
        };
        Ok(OracleResult {
            subset,
            weight,
            exactness,
        })
    }

    fn expect_len(&self, expected: usize, got: usize) -> Result<()> {
        if expected != got {
            return Err(invalid(format!(
                "{} family covers {expected} agents, weight vector has {got}",
                self.kind()
            )));
        }
        Ok(())
    }

    /// All members over agents `0..n`, deduplicated and in lexicographic
    /// order. Fails when there are more than `limit` of them.
    pub fn enumerate_members(&self, n: usize, limit: usize) -> Result<Vec<AgentSet>> {
        let too_large = |count: u128| Error::EnumerationTooLarge {
            count,
            limit: limit as u128,
        };
        let mut members = match self {
            ConstraintFamily::Explicit { sets } => {
                let mut all = sets.clone();
                all.sort();
                all.dedup();
                all
            }
            _ => {
                if n > MAX_SCAN_AGENTS {
                    return Err(too_large(1u128 << n.min(127)));
                }
                let mut found = Vec::new();
                for mask in 0u64..(1u64 << n) {
                    let set = AgentSet::from_mask(mask);
                    if self.contains(&set) {
                        if found.len() == limit {
                            return Err(too_large(limit as u128 + 1));
                        }
                        found.push(set);
                    }
                }
                found.sort();
                found
            }
        };
        if members.len() > limit {
            return Err(too_large(members.len() as u128));
        }
        members.shrink_to_fit();
        Ok(members)
    }
}
