//! Profit-scaling FPTAS for 0/1 knapsack.
//!
//! Profits are scaled by `mu = beta * P / n`, where `P` is the largest
//! profit among items that fit on their own and `n` is the item count, and
//! rounded down. A dynamic program over scaled profit keeps, for
//! every reachable scaled profit, the smallest demand achieving it. The
//! table is stored sparsely: only reachable profits are kept and states
//! that are beaten on both profit and demand are pruned, which leaves the
//! best reachable scaled profit unchanged.
//!
//! Rounding loses less than `mu` per item, so the result is within
//! `n * mu = beta * P <= beta * OPT` of the optimum.

use crate::model::AgentSet;

#[derive(Clone, Copy)]
struct State {
    profit: u64,
    demand: u64,
    // Index into the node arena for the last item taken, if any.
    node: Option<usize>,
}

struct Node {
    item: usize,
    parent: Option<usize>,
}

/// Returns a subset with total weight at least `(1 - beta)` times the best
/// subset whose demands fit in `capacity`. Items with zero weight are never
/// taken.
pub fn fptas(demands: &[u64], capacity: u64, weights: &[f64], beta: f64) -> AgentSet {
    debug_assert_eq!(demands.len(), weights.len());
    let items: Vec<usize> = (0..weights.len())
        .filter(|&i| weights[i] > 0.0 && demands[i] <= capacity)
        .collect();
    let Some(top) = items.iter().map(|&i| weights[i]).reduce(f64::max) else {
        return AgentSet::empty();
    };
    let mu = beta * top / weights.len() as f64;

    let mut arena: Vec<Node> = Vec::new();
    // Sorted by strictly increasing profit and strictly increasing demand.
    let mut frontier = vec![State {
        profit: 0,
        demand: 0,
        node: None,
    }];
    for &item in &items {
        let scaled = (weights[item] / mu).floor() as u64;
        let demand = demands[item];
        let mut extended = Vec::with_capacity(frontier.len());
        for state in &frontier {
            let Some(total) = state.demand.checked_add(demand) else {
                continue;
            };
            if total > capacity {
                continue;
            }
            arena.push(Node {
                item,
                parent: state.node,
            });
            extended.push(State {
                profit: state.profit + scaled,
                demand: total,
                node: Some(arena.len() - 1),
            });
        }
        frontier = merge_pareto(&frontier, &extended);
    }

    let best = frontier.last().expect("frontier always holds the empty state");
    let mut chosen = Vec::new();
    let mut cursor = best.node;
    while let Some(idx) = cursor {
        chosen.push(arena[idx].item);
        cursor = arena[idx].parent;
    }
    AgentSet::from(chosen)
}

// Merges two profit-sorted state lists and drops every state whose demand
// is not strictly below that of all states with higher or equal profit.
// On exact (profit, demand) ties the state from `kept` wins.
fn merge_pareto(kept: &[State], extended: &[State]) -> Vec<State> {
    let mut all: Vec<(State, u8)> = kept
        .iter()
        .map(|&s| (s, 0))
        .chain(extended.iter().map(|&s| (s, 1)))
        .collect();
    // Highest profit first; among equal profit, lowest demand, then `kept`.
    all.sort_by(|(a, ta), (b, tb)| {
        b.profit
            .cmp(&a.profit)
            .then(a.demand.cmp(&b.demand))
            .then(ta.cmp(tb))
    });
    let mut out: Vec<State> = Vec::with_capacity(all.len());
    let mut best_demand = u64::MAX;
    for (state, _) in all {
        if state.demand < best_demand {
            best_demand = state.demand;
            out.push(state);
        }
    }
    out.reverse();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(demands: &[u64], capacity: u64, weights: &[f64]) -> f64 {
        let n = demands.len();
        (0u64..1 << n)
            .filter(|mask| {
                (0..n)
                    .filter(|i| mask >> i & 1 == 1)
                    .map(|i| demands[i])
                    .sum::<u64>()
                    <= capacity
            })
            .map(|mask| (0..n).filter(|i| mask >> i & 1 == 1).map(|i| weights[i]).sum())
            .fold(0.0, f64::max)
    }

    #[test]
    fn small_example() {
        let s = fptas(&[3, 4, 5], 7, &[0.6, 0.7, 0.8], 1e-4);
        assert_eq!(s.as_slice(), &[0, 1]);
    }

    #[test]
    fn nothing_fits() {
        assert!(fptas(&[1, 1], 0, &[0.5, 0.5], 0.1).is_empty());
        assert!(fptas(&[5], 4, &[0.5], 0.1).is_empty());
        assert!(fptas(&[1, 1], 2, &[0.0, 0.0], 0.1).is_empty());
    }

    #[test]
    fn oversized_item_does_not_set_scale() {
        // Item 2 cannot fit; if it set the scale, items 0 and 1 would round to zero.
        let s = fptas(&[1, 1, 10], 2, &[0.01, 0.02, 1000.0], 0.5);
        assert_eq!(s.as_slice(), &[0, 1]);
    }

    #[test]
    fn coarse_beta_still_within_bound() {
        let demands = [4, 3, 3, 2, 5, 1];
        let weights = [0.5, 0.41, 0.4, 0.22, 0.69, 0.05];
        for &beta in &[0.9, 0.5, 0.25, 0.1, 0.01] {
            let s = fptas(&demands, 7, &weights, beta);
            let total: u64 = s.iter().map(|i| demands[i]).sum();
            assert!(total <= 7);
            let w: f64 = s.iter().map(|i| weights[i]).sum();
            assert!(w >= (1.0 - beta) * brute(&demands, 7, &weights) - 1e-12);
        }
    }

    #[test]
    fn merge_keeps_pareto_front() {
        let st = |profit, demand| State {
            profit,
            demand,
            node: None,
        };
        let out = merge_pareto(&[st(0, 0), st(5, 4)], &[st(3, 2), st(5, 3), st(6, 9)]);
        let pairs: Vec<_> = out.iter().map(|s| (s.profit, s.demand)).collect();
        assert_eq!(pairs, vec![(0, 0), (3, 2), (5, 3), (6, 9)]);
    }
}
