use nashcover_core::exact::{brute_force_max_weight, brute_force_opt, DEFAULT_LIMIT};
use nashcover_core::families::{max_weight_matchable, saturates};
use nashcover_core::generators::{generate, small_kinds, GenKind, GenSpec, SplitMix64};
use nashcover_core::solver::{compute_weights, phi_delta, ResolvedParams, THRESHOLD_SLACK};
use nashcover_core::{
    coverage_values, solve, suboptimal_agents, validate_solution, AgentSet, ConstraintFamily, CoverageProfile,
    Exactness, Instance, Solution, SolverConfig, TraceLevel, WeightVector,
};
use proptest::prelude::*;

fn instance(seed: u64, n: usize, rounds: usize) -> Instance {
    generate(&GenSpec {
        seed,
        n,
        rounds,
        kinds: small_kinds(n).to_vec(),
    })
    .unwrap()
}

/// A uniformly random member of every round, drawn from the enumeration.
fn random_solution(inst: &Instance, rng: &mut SplitMix64) -> Solution {
    let sets = inst
        .families()
        .iter()
        .map(|f| {
            let members = f.enumerate_members(inst.agents(), DEFAULT_LIMIT).unwrap();
            members[rng.below(members.len() as u64) as usize].clone()
        })
        .collect();
    Solution::new(sets)
}

fn random_subset(n: usize, rng: &mut SplitMix64) -> AgentSet {
    AgentSet::from_mask(rng.below(1 << n))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn coverage_values_are_bounded(seed in any::<u64>(), n in 1usize..9, rounds in 1usize..6) {
        let inst = instance(seed, n, rounds);
        let sol = random_solution(&inst, &mut SplitMix64::new(seed ^ 1));
        let profile = coverage_values(&inst, &sol).unwrap();
        prop_assert!(profile.values().iter().all(|&v| v >= 1 && v as usize <= rounds + 1));
        let excess: usize = profile.values().iter().map(|&v| v as usize - 1).sum();
        let sizes: usize = sol.sets().iter().map(AgentSet::len).sum();
        prop_assert_eq!(excess, sizes);
        let direct = (profile.log_welfare() / n as f64).exp();
        prop_assert!((profile.nsw() - direct).abs() <= 1e-12 * direct);
    }

    #[test]
    fn welfare_ignores_round_order(seed in any::<u64>(), n in 1usize..9, rounds in 1usize..6) {
        let inst = instance(seed, n, rounds);
        let sol = random_solution(&inst, &mut SplitMix64::new(seed));
        let mut reversed = sol.sets().to_vec();
        reversed.reverse();
        let a = CoverageProfile::from_sets(n, sol.sets()).unwrap();
        let b = CoverageProfile::from_sets(n, &reversed).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn replacement_touches_only_symmetric_difference(seed in any::<u64>(), n in 1usize..9, rounds in 1usize..6) {
        let inst = instance(seed, n, rounds);
        let mut rng = SplitMix64::new(seed);
        let sol = random_solution(&inst, &mut rng);
        let t = rng.below(rounds as u64) as usize;
        let x = random_subset(n, &mut rng);
        let before = CoverageProfile::from_sets(n, sol.sets()).unwrap();
        let after = CoverageProfile::from_sets(n, sol.replace(t, x.clone()).unwrap().sets()).unwrap();
        let changed = sol.set(t).symmetric_difference(&x);
        for i in 0..n {
            prop_assert_eq!(before.get(i) != after.get(i), changed.contains(i));
        }
    }

    #[test]
    fn suboptimal_sets_shrink_with_alpha(values in prop::collection::vec(1u32..7, 1..10), seed in any::<u64>()) {
        let mut rng = SplitMix64::new(seed);
        let opt: Vec<u32> = values.iter().map(|_| rng.range(1, 30) as u32).collect();
        let p = CoverageProfile::from_values(values).unwrap();
        let o = CoverageProfile::from_values(opt).unwrap();
        for alpha in 1..8 {
            let small = suboptimal_agents(&p, &o, alpha, 0.01).unwrap();
            let large = suboptimal_agents(&p, &o, alpha + 1, 0.01).unwrap();
            prop_assert!(large.members.iter().all(|i| small.members.contains(i)));
        }
    }

    #[test]
    fn weights_predict_phi_change(seed in any::<u64>(), n in 1usize..9, rounds in 1usize..6) {
        let inst = instance(seed, n, rounds);
        let mut rng = SplitMix64::new(seed);
        let sol = random_solution(&inst, &mut rng);
        let profile = coverage_values(&inst, &sol).unwrap();
        let t = rng.below(rounds as u64) as usize;
        let x = random_subset(n, &mut rng);
        let w = compute_weights(&profile, sol.set(t), t).unwrap();
        let delta = phi_delta(&inst, &sol, t, &x).unwrap();
        prop_assert!((w.weight_of(&x) - w.weight_of(sol.set(t)) - delta).abs() < 1e-9);

        let gain: f64 = x.iter().map(|i| 1.0 / (f64::from(profile.get(i)) + 1.0)).sum();
        let loss: f64 = sol.set(t).iter().map(|j| 1.0 / (f64::from(profile.get(j)) - 1.0)).sum();
        prop_assert!(delta >= gain - loss - 1e-9);
    }

    #[test]
    fn solver_stops_at_a_feasible_fixpoint(seed in any::<u64>(), n in 1usize..8, rounds in 1usize..5) {
        let inst = instance(seed, n, rounds);
        let config = SolverConfig { trace_level: TraceLevel::Full, ..SolverConfig::default() };
        let out = solve(&inst, &config).unwrap();
        prop_assert!(validate_solution(&inst, &out.solution).unwrap().is_feasible());
        let params = ResolvedParams::resolve(&inst, &config).unwrap();
        for t in 0..rounds {
            let w = compute_weights(&out.profile, out.solution.set(t), t).unwrap();
            let cand = inst.families()[t].approx_max_weight(&w, params.beta).unwrap();
            let delta = phi_delta(&inst, &out.solution, t, &cand.subset).unwrap();
            prop_assert!(delta < params.threshold - THRESHOLD_SLACK);
        }
        let mut last = f64::NEG_INFINITY;
        for record in &out.trace.iterations {
            prop_assert!(record.delta_phi >= params.threshold - THRESHOLD_SLACK);
            prop_assert!(record.phi_after > last);
            last = record.phi_after;
        }
        let snapshots = out.trace.snapshots().unwrap();
        prop_assert_eq!(snapshots.last().unwrap(), &out.solution);
        prop_assert_eq!(solve(&inst, &config).unwrap(), out);
    }

    #[test]
    fn oracle_meets_its_guarantee(seed in any::<u64>(), n in 1usize..11, kind in 0usize..5) {
        let mut rng = SplitMix64::new(seed);
        let spec = GenSpec { seed, n, rounds: 1, kinds: vec![small_kinds(n)[kind].clone()] };
        let family = generate(&spec).unwrap().families()[0].clone();
        let weights: Vec<f64> = (0..n).map(|_| rng.unit()).collect();
        let w = WeightVector::new(0, weights);
        let beta = 1.0 / 64.0;
        let got = family.approx_max_weight(&w, beta).unwrap();
        let best = brute_force_max_weight(&family, &w, n, 1 << 12).unwrap();
        prop_assert!(family.contains(&got.subset));
        match got.exactness {
            Exactness::Exact => prop_assert!((got.weight - best.weight).abs() < 1e-9),
            Exactness::Fptas => prop_assert!(got.weight >= (1.0 - beta) * best.weight - 1e-12),
        }
    }

    #[test]
    fn matchable_sets_form_a_matroid(seed in any::<u64>(), n in 1usize..8, slots in 1usize..5) {
        let mut rng = SplitMix64::new(seed);
        let prefs: Vec<Vec<usize>> = (0..n)
            .map(|_| (0..slots).filter(|_| rng.unit() < 0.5).collect())
            .collect();
        let independent: Vec<AgentSet> = (0..1u64 << n)
            .map(AgentSet::from_mask)
            .filter(|s| saturates(s, &prefs, slots))
            .collect();
        for a in &independent {
            for b in &independent {
                if a.len() > b.len() {
                    let grows = a.iter().filter(|&i| !b.contains(i)).any(|i| {
                        let mut bigger: Vec<usize> = b.as_slice().to_vec();
                        bigger.push(i);
                        saturates(&AgentSet::from(bigger), &prefs, slots)
                    });
                    prop_assert!(grows);
                }
            }
        }
        let weights: Vec<f64> = (0..n).map(|_| rng.unit()).collect();
        prop_assert_eq!(
            max_weight_matchable(&prefs, slots, &weights),
            max_weight_matchable(&prefs, slots, &weights)
        );
    }
}

#[test]
fn local_optimum_is_near_global_on_small_instances() {
    for seed in 0..40 {
        let inst = instance(seed, 4, 3);
        let out = solve(&inst, &SolverConfig::default()).unwrap();
        let opt = brute_force_opt(&inst, DEFAULT_LIMIT).unwrap();
        assert!(out.profile.nsw() <= opt.nsw + 1e-12);
        assert!(out.profile.nsw() * (18.0 + 1.0 / 24.0) >= opt.nsw);
    }
}

#[test]
fn distinct_seeds_give_distinct_instances() {
    let kinds = vec![GenKind::Explicit {
        sets_per_round: 3,
        min_size: 1,
        max_size: 6,
    }];
    let mut distinct = 0;
    for seed in 0..1000u64 {
        let spec = |seed| GenSpec {
            seed,
            n: 6,
            rounds: 3,
            kinds: kinds.clone(),
        };
        if generate(&spec(2 * seed)).unwrap() != generate(&spec(2 * seed + 1)).unwrap() {
            distinct += 1;
        }
    }
    assert!(distinct >= 990, "only {distinct} of 1000 pairs differ");
}

#[test]
fn knapsack_json_form() {
    let f = ConstraintFamily::knapsack(vec![3, 4], 7);
    let json = serde_json::to_string(&f).unwrap();
    assert_eq!(json, r#"{"kind":"knapsack","demands":[3,4],"capacity":7}"#);
}
