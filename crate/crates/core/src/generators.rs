//! Seeded random instances.
//!
//! All randomness comes from SplitMix64 (Steele, Lea and Flood), so a
//! generator spec reproduces the same instance in any language:
//!
//! ```text
//! state += 0x9E3779B97F4A7C15
//! z = state
//! z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//! z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//! return z ^ (z >> 31)                      (all arithmetic mod 2^64)
//! ```
//!
//! A uniform integer below `b` rejects raw outputs smaller than
//! `2^64 mod b` and returns the rest modulo `b`. A uniform real in `[0, 1)`
//! is `(x >> 11) * 2^-53`. Random subsets of size `s` over `0..n` run the
//! first `s` steps of a Fisher-Yates shuffle of `0..n`, swapping position
//! `i` with `i + below(n - i)`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::families::ConstraintFamily;
use crate::model::{AgentSet, Instance};

#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in `0..bound`; `bound` must be positive.
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "empty range");
        let reject = bound.wrapping_neg() % bound;
        loop {
            let x = self.next_u64();
            if x >= reject {
                return x % bound;
            }
        }
    }

    /// Uniform in `lo..=hi`.
    pub fn range(&mut self, lo: u64, hi: u64) -> u64 {
        debug_assert!(lo <= hi);
        match (hi - lo).checked_add(1) {
            Some(span) => lo + self.below(span),
            None => self.next_u64(),
        }
    }

    pub fn range_usize(&mut self, lo: usize, hi: usize) -> usize {
        self.range(lo as u64, hi as u64) as usize
    }

    /// Uniform in `[0, 1)`.
    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// A uniformly random `size`-subset of `0..n`.
    pub fn subset(&mut self, n: usize, size: usize) -> AgentSet {
        let mut pool: Vec<usize> = (0..n).collect();
        for i in 0..size.min(n) {
            let j = i + self.below((n - i) as u64) as usize;
            pool.swap(i, j);
        }
        pool.truncate(size.min(n));
        AgentSet::from(pool)
    }
}

/// Family recipe for generated rounds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GenKind {
    /// `sets_per_round` random sets with sizes uniform in `min_size..=max_size`.
    Explicit {
        sets_per_round: usize,
        min_size: usize,
        max_size: usize,
    },
    /// Per-agent demands uniform in `demand_min..=demand_max`, drawn once per
    /// instance; each round's capacity is uniform between the largest demand
    /// and the total demand.
    Knapsack { demand_min: u64, demand_max: u64 },
    /// Cardinality bound uniform in `k_min..=k_max`.
    Cardinality { k_min: usize, k_max: usize },
    /// Every agent lands in a uniformly random part; limits uniform in
    /// `limit_min..=limit_max`.
    Partition {
        parts: usize,
        limit_min: usize,
        limit_max: usize,
    },
    /// Slot count uniform in `slots_min..=slots_max`; each agent accepts each
    /// slot with probability `density`.
    Matching {
        slots_min: usize,
        slots_max: usize,
        density: f64,
    },
}

impl GenKind {
    /// The load-shedding preset: demands between 1 and 10.
    pub fn load_shedding() -> Self {
        GenKind::Knapsack {
            demand_min: 1,
            demand_max: 10,
        }
    }

    fn validate(&self, n: usize) -> Result<()> {
        let ok = match *self {
            GenKind::Explicit {
                sets_per_round,
                min_size,
                max_size,
            } => {
                if max_size > n {
                    return Err(invalid(format!("explicit set size {max_size} exceeds n = {n}")));
                }
                sets_per_round >= 1 && min_size <= max_size
            }
            GenKind::Knapsack {
                demand_min,
                demand_max,
            } => demand_min <= demand_max,
            GenKind::Cardinality { k_min, k_max } => k_min <= k_max && k_max <= n,
            GenKind::Partition {
                parts,
                limit_min,
                limit_max,
            } => parts >= 1 && limit_min <= limit_max,
            GenKind::Matching {
                slots_min,
                slots_max,
                density,
            } => slots_min >= 1 && slots_min <= slots_max && (0.0..=1.0).contains(&density),
        };
        if ok {
            Ok(())
        } else {
            Err(invalid(format!("impossible generator parameters: {self:?}")))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    pub seed: u64,
    pub n: usize,
    #[serde(rename = "T")]
    pub rounds: usize,
    /// Each round uses one of these recipes, picked uniformly at random.
    pub kinds: Vec<GenKind>,
}

impl GenSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.rounds == 0 {
            return Err(invalid("generator needs n >= 1 and T >= 1"));
        }
        if self.kinds.is_empty() {
            return Err(invalid("generator needs at least one family kind"));
        }
        self.kinds.iter().try_for_each(|k| k.validate(self.n))
    }
}

pub fn generate(spec: &GenSpec) -> Result<Instance> {
    spec.validate()?;
    let mut rng = SplitMix64::new(spec.seed);
    let n = spec.n;
    let mut demands: Option<Vec<u64>> = None;
    let mut families = Vec::with_capacity(spec.rounds);
    for _ in 0..spec.rounds {
        let kind = if spec.kinds.len() == 1 {
            &spec.kinds[0]
        } else {
            &spec.kinds[rng.below(spec.kinds.len() as u64) as usize]
        };
        let family = match *kind {
            GenKind::Explicit {
                sets_per_round,
                min_size,
                max_size,
            } => {
                let mut sets: Vec<AgentSet> = Vec::with_capacity(sets_per_round);
                for _ in 0..sets_per_round {
                    let size = rng.range_usize(min_size, max_size);
                    let set = rng.subset(n, size);
                    if !sets.contains(&set) {
                        sets.push(set);
                    }
                }
                ConstraintFamily::explicit(sets)?
            }
            GenKind::Knapsack {
                demand_min,
                demand_max,
            } => {
                let demands = demands
                    .get_or_insert_with(|| (0..n).map(|_| rng.range(demand_min, demand_max)).collect())
                    .clone();
                let largest = demands.iter().copied().max().unwrap_or(0);
                let total = demands.iter().sum();
                let capacity = rng.range(largest, total);
                ConstraintFamily::knapsack(demands, capacity)
            }
            GenKind::Cardinality { k_min, k_max } => {
                ConstraintFamily::cardinality(rng.range_usize(k_min, k_max))
            }
            GenKind::Partition {
                parts,
                limit_min,
                limit_max,
            } => {
                let mut members = vec![Vec::new(); parts];
                for agent in 0..n {
                    members[rng.below(parts as u64) as usize].push(agent);
                }
                let limits = (0..parts).map(|_| rng.range_usize(limit_min, limit_max)).collect();
                ConstraintFamily::partition(members.into_iter().map(AgentSet::from).collect(), limits)?
            }
            GenKind::Matching {
                slots_min,
                slots_max,
                density,
            } => {
                let slots = rng.range_usize(slots_min, slots_max);
                let prefs = (0..n)
                    .map(|_| (0..slots).filter(|_| rng.unit() < density).collect())
                    .collect();
                ConstraintFamily::matching(slots, prefs)?
            }
        };
        families.push(family);
    }
    Instance::new(n, families)
}

/// Desk-scale recipes, one per family kind, for agent count `n`.
pub fn small_kinds(n: usize) -> [GenKind; 5] {
    [
        GenKind::Explicit {
            sets_per_round: 6,
            min_size: 1,
            max_size: n,
        },
        GenKind::load_shedding(),
        GenKind::Cardinality {
            k_min: 1,
            k_max: 2.min(n),
        },
        GenKind::Partition {
            parts: 2,
            limit_min: 1,
            limit_max: 2,
        },
        GenKind::Matching {
            slots_min: 1,
            slots_max: 3,
            density: 0.5,
        },
    ]
}

/// Product of the member counts of all rounds, or `None` past `cap`.
fn search_space(instance: &Instance, cap: usize) -> Option<u128> {
    let mut size: u128 = 1;
    for family in instance.families() {
        let count = family.enumerate_members(instance.agents(), cap).ok()?.len() as u128;
        size = size.saturating_mul(count);
        if size > cap as u128 {
            return None;
        }
    }
    Some(size)
}

/// The benchmark suite: `count` instances with `n <= 8`, `T <= 5`, at most
/// six members per explicit family, cycling through the five family kinds
/// and a mixed recipe. Rounds are trimmed until the brute-force search
/// space has at most `space_cap` points.
pub fn default_suite(count: usize, seed: u64, space_cap: usize) -> Vec<GenSpec> {
    let mut rng = SplitMix64::new(seed);
    let mut specs = Vec::with_capacity(count);
    for idx in 0..count {
        let n = rng.range_usize(2, 8);
        let mut rounds = rng.range_usize(1, 5);
        let kinds = small_kinds(n);
        let kinds = match idx % 6 {
            5 => kinds.to_vec(),
            k => vec![kinds[k].clone()],
        };
        let instance_seed = rng.next_u64();
        loop {
            let spec = GenSpec {
                seed: instance_seed,
                n,
                rounds,
                kinds: kinds.clone(),
            };
            let fits = generate(&spec)
                .map(|inst| search_space(&inst, space_cap).is_some())
                .unwrap_or(false);
            if fits || rounds == 1 {
                specs.push(spec);
                break;
            }
            rounds -= 1;
        }
    }
    specs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{validate_solution, Solution};

    #[test]
    fn splitmix_reference_values() {
        // First outputs for seed 1234567 from the reference C implementation.
        let mut rng = SplitMix64::new(1234567);
        assert_eq!(rng.next_u64(), 6457827717110365317);
        assert_eq!(rng.next_u64(), 3203168211198807973);
        assert_eq!(rng.next_u64(), 9817491932198370423);
    }

    #[test]
    fn bounded_draws_stay_in_range() {
        let mut rng = SplitMix64::new(7);
        for _ in 0..1000 {
            assert!(rng.below(3) < 3);
            let x = rng.range(5, 9);
            assert!((5..=9).contains(&x));
            let u = rng.unit();
            assert!((0.0..1.0).contains(&u));
        }
        assert_eq!(rng.range(4, 4), 4);
        let s = rng.subset(5, 3);
        assert_eq!(s.len(), 3);
        assert!(s.max_agent().unwrap() < 5);
    }

    #[test]
    fn same_spec_same_instance() {
        let spec = GenSpec {
            seed: 99,
            n: 6,
            rounds: 4,
            kinds: small_kinds(6).to_vec(),
        };
        assert_eq!(generate(&spec).unwrap(), generate(&spec).unwrap());
    }

    #[test]
    fn explicit_families_have_requested_sets() {
        let spec = GenSpec {
            seed: 3,
            n: 5,
            rounds: 3,
            kinds: vec![GenKind::Explicit {
                sets_per_round: 3,
                min_size: 1,
                max_size: 5,
            }],
        };
        let inst = generate(&spec).unwrap();
        for f in inst.families() {
            let ConstraintFamily::Explicit { sets } = f else { panic!() };
            assert!((1..=3).contains(&sets.len()));
            assert!(sets.iter().all(|s| (1..=5).contains(&s.len())));
        }
    }

    #[test]
    fn knapsack_instances_are_valid() {
        for seed in 0..1000 {
            let spec = GenSpec {
                seed,
                n: 1 + (seed as usize % 8),
                rounds: 1 + (seed as usize % 5),
                kinds: vec![GenKind::load_shedding()],
            };
            let inst = generate(&spec).unwrap();
            let empty = Solution::new(vec![AgentSet::empty(); inst.rounds()]);
            assert!(validate_solution(&inst, &empty).unwrap().is_feasible());
            for f in inst.families() {
                let ConstraintFamily::Knapsack { demands, capacity } = f else { panic!() };
                let largest = *demands.iter().max().unwrap();
                assert!(largest <= *capacity && *capacity <= demands.iter().sum());
                assert!(demands.iter().all(|d| (1..=10).contains(d)));
            }
        }
    }

    #[test]
    fn rejects_impossible_parameters() {
        let spec = GenSpec {
            seed: 1,
            n: 3,
            rounds: 1,
            kinds: vec![GenKind::Explicit {
                sets_per_round: 2,
                min_size: 1,
                max_size: 4,
            }],
        };
        assert!(generate(&spec).is_err());
        let spec = GenSpec {
            kinds: vec![],
            ..spec
        };
        assert!(generate(&spec).is_err());
    }

    #[test]
    fn default_suite_fits_caps() {
        let specs = default_suite(30, 1, 200_000);
        assert_eq!(specs.len(), 30);
        for spec in &specs {
            assert!(spec.n <= 8 && spec.rounds <= 5);
            let inst = generate(spec).unwrap();
            assert!(search_space(&inst, 200_000).is_some());
        }
    }
}
