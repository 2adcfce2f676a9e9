//! Exhaustive reference solvers for small instances.
//!
//! The product space `I_1 x ... x I_T` is walked with an odometer over the
//! lexicographically sorted member lists of each round, so the first
//! maximizer found is also the lexicographically smallest tuple. Welfare is
//! compared through the exact integer product of coverage values rather
//! than floating-point logs.

use std::cmp::Ordering;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::{ConstraintFamily, Exactness, OracleResult};
use crate::model::{AgentSet, CoverageProfile, Instance, Solution, WeightVector};

pub const DEFAULT_LIMIT: usize = 1_000_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExactResult {
    pub solution: Solution,
    pub nsw: f64,
    pub profile: CoverageProfile,
    /// Number of product-space points evaluated.
    pub explored: u64,
}

/// Optimum of the Nash welfare without the `+1` smoothing.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnsmoothedResult {
    pub solution: Solution,
    /// `(prod c_i)^(1/n)` with `c_i = v_i - 1`; zero if some agent is uncovered.
    pub nsw_c: f64,
    pub profile: CoverageProfile,
    pub explored: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Product {
    Small(u128),
    Big(BigUint),
}

impl Product {
    fn of(values: impl Iterator<Item = u32>) -> Product {
        let values: Vec<u32> = values.collect();
        let mut acc: u128 = 1;
        for &v in &values {
            match acc.checked_mul(u128::from(v)) {
                Some(next) => acc = next,
                None => {
                    let big = values.iter().fold(BigUint::from(1u32), |a, &v| a * v);
                    return Product::Big(big);
                }
            }
        }
        Product::Small(acc)
    }

    fn to_big(&self) -> BigUint {
        match self {
            Product::Small(v) => BigUint::from(*v),
            Product::Big(v) => v.clone(),
        }
    }
}

impl Ord for Product {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Product::Small(a), Product::Small(b)) => a.cmp(b),
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl PartialOrd for Product {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn member_lists(instance: &Instance, limit: usize) -> Result<Vec<Vec<AgentSet>>> {
    let lists = instance
        .families()
        .iter()
        .map(|f| f.enumerate_members(instance.agents(), limit))
        .collect::<Result<Vec<_>>>()?;
    let size = lists
        .iter()
        .fold(1u128, |acc, l| acc.saturating_mul(l.len() as u128));
    if size > limit as u128 {
        return Err(Error::SearchSpaceTooLarge {
            size,
            limit: limit as u128,
        });
    }
    Ok(lists)
}

/// Walks every point of the product space and keeps the first one with
/// the largest score.
fn search<S, F>(instance: &Instance, limit: usize, mut score: F) -> Result<(Solution, CoverageProfile, u64)>
where
    S: Ord,
    F: FnMut(&CoverageProfile) -> S,
{
    let lists = member_lists(instance, limit)?;
    let n = instance.agents();
    let mut digits = vec![0usize; lists.len()];
    let mut best: Option<(S, Vec<usize>, CoverageProfile)> = None;
    let mut explored = 0u64;
    loop {
        let sets: Vec<AgentSet> = digits.iter().zip(&lists).map(|(&d, l)| l[d].clone()).collect();
        let profile = CoverageProfile::from_sets(n, &sets)?;
        let s = score(&profile);
        explored += 1;
        if best.as_ref().is_none_or(|(b, _, _)| s > *b) {
            best = Some((s, digits.clone(), profile));
        }

        // Odometer step, last round fastest.
        let mut pos = lists.len();
        loop {
            if pos == 0 {
                let (_, digits, profile) = best.expect("product space is non-empty");
                let sets = digits.iter().zip(&lists).map(|(&d, l)| l[d].clone()).collect();
                return Ok((Solution::new(sets), profile, explored));
            }
            pos -= 1;
            digits[pos] += 1;
            if digits[pos] < lists[pos].len() {
                break;
            }
            digits[pos] = 0;
        }
    }
}

/// A Nash-welfare-maximizing solution, found by exhaustive search.
pub fn brute_force_opt(instance: &Instance, limit: usize) -> Result<ExactResult> {
    let (solution, profile, explored) =
        search(instance, limit, |p| Product::of(p.values().iter().copied()))?;
    Ok(ExactResult {
        solution,
        nsw: profile.nsw(),
        profile,
        explored,
    })
}

/// Maximizer of the unsmoothed welfare `prod (v_i - 1)`.
pub fn brute_force_unsmoothed_opt(instance: &Instance, limit: usize) -> Result<UnsmoothedResult> {
    let (solution, profile, explored) =
        search(instance, limit, |p| Product::of(p.values().iter().map(|v| v - 1)))?;
    Ok(UnsmoothedResult {
        solution,
        nsw_c: unsmoothed_nsw(&profile),
        profile,
        explored,
    })
}

/// Geometric mean of `v_i - 1`.
pub fn unsmoothed_nsw(profile: &CoverageProfile) -> f64 {
    if profile.uncovered() > 0 {
        return 0.0;
    }
    let logs: f64 = profile.values().iter().map(|&v| f64::from(v - 1).ln()).sum();
    (logs / profile.len() as f64).exp()
}

/// The heaviest member of `family`, scanning every member. Ties go to the
/// lexicographically smallest subset.
pub fn brute_force_max_weight(
    family: &ConstraintFamily,
    w: &WeightVector,
    n: usize,
    limit: usize,
) -> Result<OracleResult> {
    let members = family.enumerate_members(n, limit)?;
    let mut best: Option<(f64, AgentSet)> = None;
    for member in members {
        member.check_range(w.len())?;
        let weight = w.weight_of(&member);
        if best.as_ref().is_none_or(|(bw, _)| weight > *bw) {
            best = Some((weight, member));
        }
    }
    let (weight, subset) =
        best.ok_or_else(|| Error::UnsatisfiableFamily(format!("{} family has no member", family.kind())))?;
    Ok(OracleResult {
        subset,
        weight,
        exactness: Exactness::Exact,
    })
}
