//! Nash social welfare maximization for fair coverage over rounds.
//!
//! An instance has `n` agents and `T` rounds; each round picks one subset of
//! agents from a constraint family. Agent `i` collects coverage value
//! `v_i = 1 + #{t : i in F_t}` and the goal is to maximize the geometric
//! mean of the `v_i`. Agents are indexed from 0.
//!
//! [`solver::solve`] runs the weighted local search with an
//! `18 + 1/(2nT)` approximation guarantee; [`exact`] holds brute-force
//! references for small instances.

pub mod error;
pub mod exact;
pub mod families;
pub mod generators;
pub mod model;
pub mod reductions;
pub mod solver;

pub use error::{Error, Result};
pub use families::{ConstraintFamily, Exactness, OracleResult};
pub use model::{
    coverage_values, log_welfare, nsw, suboptimal_agents, validate_solution, AgentSet, CoverageProfile, Feasibility,
    Instance, Solution, SuboptimalReport, WeightVector,
};
pub use solver::{solve, Init, SolveOutcome, SolveTrace, SolverConfig, TraceLevel};
