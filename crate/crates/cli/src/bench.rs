//! Generate, solve and (optionally) brute-force a suite of instances.

use std::time::Instant;

use nashcover_core::exact::{brute_force_opt, DEFAULT_LIMIT};
use nashcover_core::generators::{default_suite, generate, GenSpec};
use nashcover_core::solver::{approximation_factor, default_epsilon, iteration_bound};
use nashcover_core::{solve, SolverConfig, TraceLevel};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::format::{ReportFile, ReportRow, ReportSummary, FORMAT_VERSION};

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "NASHCOVER_THREADS";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchSuite {
    pub instances: Vec<GenSpec>,
    /// Also brute-force the optimum and report ratios.
    #[serde(default = "yes")]
    pub exact: bool,
    #[serde(default = "default_limit")]
    pub limit: usize,
}

fn yes() -> bool {
    true
}

fn default_limit() -> usize {
    DEFAULT_LIMIT
}

impl BenchSuite {
    /// The desk-scale suite from [`default_suite`].
    pub fn standard(count: usize, seed: u64) -> Self {
        BenchSuite {
            instances: default_suite(count, seed, 200_000),
            exact: true,
            limit: DEFAULT_LIMIT,
        }
    }
}

fn run_one(id: usize, spec: &GenSpec, exact: bool, limit: usize) -> ReportRow {
    let start = Instant::now();
    let ratio_bound = 1.0 / approximation_factor(spec.n.max(1), spec.rounds.max(1));
    let mut row = ReportRow {
        id,
        seed: spec.seed,
        n: spec.n,
        rounds: spec.rounds,
        nsw_alg: None,
        nsw_opt: None,
        ratio: None,
        ratio_bound,
        iterations: None,
        bound: 0,
        wallclock_ms: 0.0,
        error: None,
    };
    let result = (|| -> nashcover_core::Result<()> {
        let instance = generate(spec)?;
        row.bound = iteration_bound(instance.agents(), instance.rounds(), default_epsilon(&instance));
        let config = SolverConfig {
            trace_level: TraceLevel::None,
            ..SolverConfig::default()
        };
        let outcome = solve(&instance, &config)?;
        let nsw = outcome.profile.nsw();
        row.nsw_alg = Some(nsw);
        row.iterations = Some(outcome.trace.iteration_count);
        if exact {
            let opt = brute_force_opt(&instance, limit)?;
            row.nsw_opt = Some(opt.nsw);
            row.ratio = Some(nsw / opt.nsw);
        }
        Ok(())
    })();
    if let Err(e) = result {
        row.error = Some(e.to_string());
    }
    row.wallclock_ms = start.elapsed().as_secs_f64() * 1e3;
    row
}

fn summarize(rows: &[ReportRow]) -> ReportSummary {
    let mut ratios: Vec<f64> = rows.iter().filter_map(|r| r.ratio).collect();
    ratios.sort_by(f64::total_cmp);
    let median_ratio = match ratios.len() {
        0 => None,
        len if len % 2 == 1 => Some(ratios[len / 2]),
        len => Some((ratios[len / 2 - 1] + ratios[len / 2]) / 2.0),
    };
    ReportSummary {
        instances: rows.len(),
        errors: rows.iter().filter(|r| r.error.is_some()).count(),
        min_ratio: ratios.first().copied(),
        median_ratio,
        ratio_violations: rows
            .iter()
            .filter(|r| r.ratio.is_some_and(|x| x < r.ratio_bound))
            .count(),
        iteration_violations: rows
            .iter()
            .filter(|r| r.iterations.is_some_and(|i| i > r.bound))
            .count(),
        max_iterations: rows.iter().filter_map(|r| r.iterations).max(),
        total_wallclock_ms: rows.iter().map(|r| r.wallclock_ms).sum(),
    }
}

fn thread_cap() -> Option<usize> {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
}

/// Runs every instance; per-instance failures are recorded in the row.
/// Rows come back in suite order regardless of scheduling.
pub fn run(suite: &BenchSuite) -> ReportFile {
    let work = || -> Vec<ReportRow> {
        suite
            .instances
            .par_iter()
            .enumerate()
            .map(|(id, spec)| run_one(id, spec, suite.exact, suite.limit))
            .collect()
    };
    let rows = match thread_cap().and_then(|n| rayon::ThreadPoolBuilder::new().num_threads(n).build().ok()) {
        Some(pool) => pool.install(work),
        None => work(),
    };
    ReportFile {
        format_version: FORMAT_VERSION,
        summary: summarize(&rows),
        rows,
    }
}

/// The report rows as CSV, header first.
pub fn to_csv(report: &ReportFile) -> csv::Result<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for row in &report.rows {
        writer.serialize(row)?;
    }
    if report.rows.is_empty() {
        writer.write_record([
            "id",
            "seed",
            "n",
            "T",
            "nsw_alg",
            "nsw_opt",
            "ratio",
            "ratio_bound",
            "iterations",
            "bound",
            "wallclock_ms",
            "error",
        ])?;
    }
    let bytes = writer.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}
