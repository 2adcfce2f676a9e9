//! JSON interchange files.
//!
//! Every file is emitted with a fixed key order and floats printed with
//! 17 significant digits (`{:.16e}`), so identical inputs give
//! byte-identical files on every platform. Agent indices are 0-based.

use std::io;

use nashcover_core::solver::{IterationRecord, ResolvedParams, Terminal};
use nashcover_core::{
    AgentSet, ConstraintFamily, CoverageProfile, Instance, Solution, SolveTrace, TraceLevel,
};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub format_version: u32,
    pub n: usize,
    #[serde(rename = "T")]
    pub rounds: usize,
    pub families: Vec<ConstraintFamily>,
}

impl InstanceFile {
    pub fn from_instance(instance: &Instance) -> Self {
        InstanceFile {
            format_version: FORMAT_VERSION,
            n: instance.agents(),
            rounds: instance.rounds(),
            families: instance.families().to_vec(),
        }
    }

    pub fn into_instance(self) -> nashcover_core::Result<Instance> {
        use nashcover_core::Error::InvalidInput;
        if self.format_version != FORMAT_VERSION {
            return Err(InvalidInput(format!(
                "unsupported format_version {} (expected {FORMAT_VERSION})",
                self.format_version
            )));
        }
        if self.rounds != self.families.len() {
            return Err(InvalidInput(format!(
                "T = {} but {} families are listed",
                self.rounds,
                self.families.len()
            )));
        }
        Instance::new(self.n, self.families)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolutionFile {
    pub sets: Vec<AgentSet>,
    pub nsw: f64,
    pub phi: f64,
    /// Unsmoothed welfare, written by `exact --unsmoothed`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nsw_c: Option<f64>,
    /// Points evaluated by brute force.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub explored: Option<u64>,
    /// Accepted local-search updates.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iterations: Option<u64>,
}

impl SolutionFile {
    pub fn new(solution: &Solution, profile: &CoverageProfile) -> Self {
        SolutionFile {
            sets: solution.sets().to_vec(),
            nsw: profile.nsw(),
            phi: profile.log_welfare(),
            nsw_c: None,
            explored: None,
            iterations: None,
        }
    }

    pub fn solution(&self) -> Solution {
        Solution::new(self.sets.clone())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceFile {
    pub format_version: u32,
    pub n: usize,
    #[serde(rename = "T")]
    pub rounds: usize,
    pub params: ResolvedParams,
    pub trace_level: TraceLevel,
    /// `default` or `given`.
    pub init: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<Solution>,
    pub iteration_count: u64,
    pub terminal: Terminal,
    pub iterations: Vec<IterationRecord>,
}

impl TraceFile {
    pub fn new(instance: &Instance, trace: &SolveTrace, given_init: bool) -> Self {
        TraceFile {
            format_version: FORMAT_VERSION,
            n: instance.agents(),
            rounds: instance.rounds(),
            params: trace.params.clone(),
            trace_level: trace.level,
            init: if given_init { "given" } else { "default" }.into(),
            initial: trace.initial.clone(),
            iteration_count: trace.iteration_count,
            terminal: trace.terminal,
            iterations: trace.iterations.clone(),
        }
    }
}

/// One benchmark instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub id: usize,
    pub seed: u64,
    pub n: usize,
    #[serde(rename = "T")]
    pub rounds: usize,
    pub nsw_alg: Option<f64>,
    pub nsw_opt: Option<f64>,
    pub ratio: Option<f64>,
    /// `1 / (18 + 1/(2nT))`.
    pub ratio_bound: f64,
    pub iterations: Option<u64>,
    pub bound: u64,
    pub wallclock_ms: f64,
    pub error: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ReportSummary {
    pub instances: usize,
    pub errors: usize,
    pub min_ratio: Option<f64>,
    pub median_ratio: Option<f64>,
    /// Rows whose ratio falls below their guarantee.
    pub ratio_violations: usize,
    /// Rows whose iteration count exceeds the bound.
    pub iteration_violations: usize,
    pub max_iterations: Option<u64>,
    pub total_wallclock_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub format_version: u32,
    pub summary: ReportSummary,
    pub rows: Vec<ReportRow>,
}

/// Pretty printing with fixed-width scientific floats.
struct F17(PrettyFormatter<'static>);

impl Formatter for F17 {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }
    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }
    fn begin_array<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_array(writer)
    }
    fn end_array<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_array(writer)
    }
    fn begin_array_value<W: ?Sized + io::Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(writer, first)
    }
    fn end_array_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_array_value(writer)
    }
    fn begin_object<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_object(writer)
    }
    fn end_object<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_object(writer)
    }
    fn begin_object_key<W: ?Sized + io::Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(writer, first)
    }
    fn begin_object_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_object_value(writer)
    }
    fn end_object_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_object_value(writer)
    }
}

/// Serializes `value` in the canonical file layout, newline-terminated.
pub fn to_json<T: Serialize>(value: &T) -> serde_json::Result<String> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, F17(PrettyFormatter::new()));
    value.serialize(&mut ser)?;
    out.push(b'\n');
    Ok(String::from_utf8(out).expect("serde_json emits UTF-8"))
}

pub fn from_json<T: DeserializeOwned>(text: &str) -> serde_json::Result<T> {
    serde_json::from_str(text)
}
