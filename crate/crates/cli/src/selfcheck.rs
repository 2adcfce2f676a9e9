//! Numeric checks of the standalone inequalities behind the analysis.

use nashcover_core::reductions::{no_case_bound, NO_CASE_CEILING};
use serde::{Deserialize, Serialize};

/// Relative slack for the epsilon inequality, which is tight at `alpha = 4, v = 1`.
pub const EPSILON_INEQ_SLACK: f64 = 1e-12;
/// Required distance of the ell = 64 product from 1/2.
pub const PRODUCT_LIMIT_TOLERANCE: f64 = 1e-6;
pub const DECREASING_GRID_POINTS: usize = 10_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelfCheckReport {
    pub passed: bool,
    pub checks: Vec<Check>,
    /// The ell = 64 product, expected near 1/2.
    pub product_at_64: f64,
    /// `f(1/e)`.
    pub f_at_inv_e: f64,
}

/// `(alpha (2.25 + eps) v - 1) / (v + 1) >= (1 + eps/2) alpha` for integer
/// `alpha` in 4..=64, `v` in 1..=64 and `eps` in 0.001..=0.999.
pub fn epsilon_inequality() -> Check {
    let mut worst = f64::INFINITY;
    let mut worst_at = (0, 0, 0.0);
    let mut failures = 0usize;
    for alpha in 4..=64u32 {
        let a = f64::from(alpha);
        for v in 1..=64u32 {
            let v = f64::from(v);
            for k in 1..=999u32 {
                let eps = f64::from(k) / 1000.0;
                let lhs = (a * (2.25 + eps) * v - 1.0) / (v + 1.0);
                let rhs = (1.0 + eps / 2.0) * a;
                let margin = (lhs - rhs) / rhs;
                if margin < -EPSILON_INEQ_SLACK {
                    failures += 1;
                }
                if margin < worst {
                    worst = margin;
                    worst_at = (alpha, v as u32, eps);
                }
            }
        }
    }
    Check {
        name: "epsilon_inequality".into(),
        passed: failures == 0,
        detail: format!(
            "{failures} failures; smallest relative margin {worst:.3e} at alpha = {}, v = {}, eps = {}",
            worst_at.0, worst_at.1, worst_at.2
        ),
    }
}

/// `prod_{d=2}^{ell} (1/2^(d-1))^(1/2^d)` in floating point.
pub fn halving_product(ell: u32) -> f64 {
    let exponent: f64 = (2..=ell).map(|d| f64::from(d - 1) / 2f64.powi(d as i32)).sum();
    2f64.powf(-exponent)
}

/// The product is at least 1/2 for ell in 2..=64 and tends to 1/2.
///
/// The bound is `sum_{d=2}^{ell} (d-1)/2^d <= 1`; it is checked exactly as
/// `sum (d-1) 2^(ell-d) <= 2^ell` in integers, alongside the float product.
pub fn halving_product_check() -> (Check, f64) {
    let mut failures = Vec::new();
    let mut previous = f64::INFINITY;
    for ell in 2..=64u32 {
        let scaled: u128 = (2..=ell).map(|d| u128::from(d - 1) << (ell - d)).sum();
        let exact_ok = scaled <= 1u128 << ell;
        let p = halving_product(ell);
        if !exact_ok || p < 0.5 || p > previous {
            failures.push(ell);
        }
        previous = p;
    }
    let at_64 = halving_product(64);
    let converged = (at_64 - 0.5).abs() < PRODUCT_LIMIT_TOLERANCE;
    let check = Check {
        name: "halving_product".into(),
        passed: failures.is_empty() && converged,
        detail: format!(
            "failing ell: {failures:?}; product at ell = 2 is {:.6}, at ell = 64 is {at_64:.17}",
            halving_product(2)
        ),
    };
    (check, at_64)
}

/// `f(x) = ((2 - x)/(1 - x))^(1 - x)` strictly decreases over a grid on `[1/e, 0.999]`.
pub fn decreasing_check() -> Check {
    let lo = (-1f64).exp();
    let hi = 0.999;
    let step = (hi - lo) / (DECREASING_GRID_POINTS - 1) as f64;
    let mut violations = Vec::new();
    let mut previous = no_case_bound(lo);
    for k in 1..DECREASING_GRID_POINTS {
        let x = if k == DECREASING_GRID_POINTS - 1 { hi } else { lo + k as f64 * step };
        let f = no_case_bound(x);
        if f >= previous {
            violations.push(x);
        }
        previous = f;
    }
    Check {
        name: "f_decreasing".into(),
        passed: violations.is_empty(),
        detail: format!(
            "{} non-decreasing steps over {DECREASING_GRID_POINTS} points; f(0.999) = {previous:.6}",
            violations.len()
        ),
    }
}

pub fn threshold_check() -> (Check, f64) {
    let f = no_case_bound((-1f64).exp());
    let check = Check {
        name: "f_at_inv_e".into(),
        passed: f <= NO_CASE_CEILING,
        detail: format!("f(1/e) = {f:.10} against ceiling {NO_CASE_CEILING}"),
    };
    (check, f)
}

pub fn run() -> SelfCheckReport {
    let (product, product_at_64) = halving_product_check();
    let (threshold, f_at_inv_e) = threshold_check();
    let checks = vec![epsilon_inequality(), product, decreasing_check(), threshold];
    SelfCheckReport {
        passed: checks.iter().all(|c| c.passed),
        checks,
        product_at_64,
        f_at_inv_e,
    }
}
