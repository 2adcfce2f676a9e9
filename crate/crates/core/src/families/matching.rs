//! Agent-to-slot bipartite matching.
//!
//! Sets of agents that can be matched into distinct acceptable slots are
//! the independent sets of a transversal matroid, so the heaviest such set
//! is found greedily: take agents in decreasing weight and keep each one
//! for which an augmenting path exists.

use crate::model::AgentSet;

struct Matcher<'a> {
    prefs: &'a [Vec<usize>],
    slot_owner: Vec<Option<usize>>,
    visited: Vec<bool>,
}

impl<'a> Matcher<'a> {
    fn new(prefs: &'a [Vec<usize>], slots: usize) -> Self {
        Matcher {
            prefs,
            slot_owner: vec![None; slots],
            visited: vec![false; slots],
        }
    }

    /// Tries to match `agent`, rerouting already matched agents if needed.
    fn insert(&mut self, agent: usize) -> bool {
        self.visited.iter_mut().for_each(|v| *v = false);
        self.augment(agent)
    }

    fn augment(&mut self, agent: usize) -> bool {
        for &slot in &self.prefs[agent] {
            if self.visited[slot] {
                continue;
            }
            self.visited[slot] = true;
            let free = match self.slot_owner[slot] {
                None => true,
                Some(other) => self.augment(other),
            };
            if free {
                self.slot_owner[slot] = Some(agent);
                return true;
            }
        }
        false
    }
}

/// True iff every agent in `x` can be given a distinct acceptable slot.
pub fn saturates(x: &AgentSet, prefs: &[Vec<usize>], slots: usize) -> bool {
    if x.len() > slots {
        return false;
    }
    let mut matcher = Matcher::new(prefs, slots);
    x.iter().all(|agent| matcher.insert(agent))
}

/// The maximum-weight set of agents that admits a saturating matching.
/// Zero-weight agents are left out; equal weights go to the lower index.
pub fn max_weight_matchable(prefs: &[Vec<usize>], slots: usize, weights: &[f64]) -> AgentSet {
    let order = super::greedy_order(0..prefs.len(), weights);
    let mut matcher = Matcher::new(prefs, slots);
    order.into_iter().filter(|&a| matcher.insert(a)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn saturation() {
        let prefs = vec![vec![0, 1], vec![0], vec![1]];
        assert!(saturates(&AgentSet::from([0, 1]), &prefs, 2));
        assert!(saturates(&AgentSet::from([0, 2]), &prefs, 2));
        assert!(!saturates(&AgentSet::from([0, 1, 2]), &prefs, 2));
        assert!(saturates(&AgentSet::empty(), &prefs, 2));
        assert!(!saturates(&AgentSet::from([1, 2]), &[vec![], vec![], vec![]], 2));
    }

    #[test]
    fn greedy_reroutes() {
        // Agent 1 grabs slot 0 first; agent 0 only fits after agent 1 moves to slot 1.
        let prefs = vec![vec![0], vec![0, 1]];
        let set = max_weight_matchable(&prefs, 2, &[0.4, 0.5]);
        assert_eq!(set.as_slice(), &[0, 1]);
    }

    #[test]
    fn agents_without_prefs_are_skipped() {
        let prefs = vec![vec![], vec![0]];
        let set = max_weight_matchable(&prefs, 1, &[0.9, 0.1]);
        assert_eq!(set.as_slice(), &[1]);
    }
}
