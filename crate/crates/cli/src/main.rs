use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use nashcover_cli::bench::{self, BenchSuite};
use nashcover_cli::commands::{
    cmd_exact, cmd_reduce, cmd_solve, cmd_verify, json, read_instance, read_json, write_atomic, CliError, CliResult,
    ReduceKind, SolveOptions, EXIT_SELFCHECK, EXIT_VERIFY,
};
use nashcover_cli::format::{InstanceFile, SolutionFile};
use nashcover_cli::selfcheck;
use nashcover_core::exact::DEFAULT_LIMIT;
use nashcover_core::generators::{generate, small_kinds, GenSpec};
use nashcover_core::TraceLevel;

/// Nash social welfare for fair coverage: solve, verify and benchmark.
///
/// All files are JSON; agents are numbered from 0.
#[derive(Parser)]
#[command(name = "nashcover", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Trace {
    None,
    Summary,
    Full,
}

#[derive(Clone, Copy, ValueEnum)]
enum GenKindArg {
    Explicit,
    Knapsack,
    Cardinality,
    Partition,
    Matching,
    Mixed,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReduceArg {
    MaxCoverage,
    PublicDecisions,
    Goods,
    VertexCover,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random instance.
    Gen {
        /// Generator spec file; other generator flags are ignored when given.
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 5)]
        n: usize,
        #[arg(long = "rounds", visible_alias = "T", default_value_t = 3)]
        rounds: usize,
        #[arg(long, value_enum, default_value_t = GenKindArg::Mixed)]
        kind: GenKindArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the local-search approximation algorithm.
    Solve {
        instance: PathBuf,
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        beta: Option<f64>,
        /// Starting solution file.
        #[arg(long)]
        init: Option<PathBuf>,
        #[arg(long)]
        max_iterations: Option<u64>,
        #[arg(long, value_enum, default_value_t = Trace::Summary)]
        trace: Trace,
        /// Where to write the trace file.
        #[arg(long)]
        trace_out: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Brute-force the optimum of a small instance.
    Exact {
        instance: PathBuf,
        #[arg(long, default_value_t = DEFAULT_LIMIT)]
        limit: usize,
        /// Maximize the product of v_i - 1 instead.
        #[arg(long)]
        unsmoothed: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a solution, and its ratio against a reference optimum.
    Verify {
        instance: PathBuf,
        solution: PathBuf,
        /// Reference optimum, e.g. from `exact`.
        #[arg(long)]
        exact: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build an instance from a reduction input.
    Reduce {
        #[arg(value_enum)]
        kind: ReduceArg,
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve (and brute-force) a suite; writes `<out>.json` and `<out>.csv`.
    Bench {
        /// Suite file; otherwise the standard suite is generated.
        #[arg(long)]
        suite: Option<PathBuf>,
        #[arg(long, default_value_t = 200)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_LIMIT)]
        limit: usize,
        /// Skip brute force.
        #[arg(long)]
        no_exact: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Numerically check the analysis inequalities.
    Selfcheck {
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => write_atomic(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn with_extension(prefix: &Path, ext: &str) -> PathBuf {
    let mut name = prefix.as_os_str().to_owned();
    name.push(".");
    name.push(ext);
    PathBuf::from(name)
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Gen {
            spec,
            seed,
            n,
            rounds,
            kind,
            out,
        } => {
            let spec = match spec {
                Some(path) => read_json::<GenSpec>(&path)?,
                None => {
                    let presets = small_kinds(n);
                    let kinds = match kind {
                        GenKindArg::Mixed => presets.to_vec(),
                        k => vec![presets[k as usize].clone()],
                    };
                    GenSpec { seed, n, rounds, kinds }
                }
            };
            let instance = generate(&spec)?;
            emit(out.as_deref(), &json(&InstanceFile::from_instance(&instance))?)
        }
        Command::Solve {
            instance,
            epsilon,
            beta,
            init,
            max_iterations,
            trace,
            trace_out,
            out,
        } => {
            let instance = read_instance(&instance)?;
            let options = SolveOptions {
                epsilon,
                beta,
                init: init.map(|p| read_json::<SolutionFile>(&p)).transpose()?,
                max_iterations,
                trace: match trace {
                    Trace::None => TraceLevel::None,
                    Trace::Summary => TraceLevel::Summary,
                    Trace::Full => TraceLevel::Full,
                },
            };
            let (solution, trace) = cmd_solve(&instance, &options)?;
            let solution_text = json(&solution)?;
            let trace_text = json(&trace)?;
            if let Some(path) = trace_out {
                write_atomic(&path, &trace_text)?;
            }
            emit(out.as_deref(), &solution_text)
        }
        Command::Exact {
            instance,
            limit,
            unsmoothed,
            out,
        } => {
            let instance = read_instance(&instance)?;
            emit(out.as_deref(), &json(&cmd_exact(&instance, limit, unsmoothed)?)?)
        }
        Command::Verify {
            instance,
            solution,
            exact,
            out,
        } => {
            let instance = read_instance(&instance)?;
            let solution: SolutionFile = read_json(&solution)?;
            let exact: Option<SolutionFile> = exact.map(|p| read_json(&p)).transpose()?;
            let report = cmd_verify(&instance, &solution, exact.as_ref())?;
            emit(out.as_deref(), &json(&report)?)?;
            if report.passed {
                Ok(())
            } else {
                Err(CliError::new(EXIT_VERIFY, report.messages.join("; ")))
            }
        }
        Command::Reduce { kind, input, out } => {
            let kind = match kind {
                ReduceArg::MaxCoverage => ReduceKind::MaxCoverage,
                ReduceArg::PublicDecisions => ReduceKind::PublicDecisions,
                ReduceArg::Goods => ReduceKind::Goods,
                ReduceArg::VertexCover => ReduceKind::VertexCover,
            };
            emit(out.as_deref(), &json(&cmd_reduce(kind, &input)?)?)
        }
        Command::Bench {
            suite,
            count,
            seed,
            limit,
            no_exact,
            out,
        } => {
            let mut suite = match suite {
                Some(path) => read_json::<BenchSuite>(&path)?,
                None => BenchSuite::standard(count, seed),
            };
            if no_exact {
                suite.exact = false;
            }
            if suite.limit == DEFAULT_LIMIT {
                suite.limit = limit;
            }
            let report = bench::run(&suite);
            let text = json(&report)?;
            match out {
                Some(prefix) => {
                    let csv = bench::to_csv(&report)
                        .map_err(|e| CliError::invalid(format!("csv output failed: {e}")))?;
                    write_atomic(&with_extension(&prefix, "json"), &text)?;
                    write_atomic(&with_extension(&prefix, "csv"), &csv)
                }
                None => emit(None, &text),
            }
        }
        Command::Selfcheck { out } => {
            let report = selfcheck::run();
            emit(out.as_deref(), &json(&report)?)?;
            if report.passed {
                Ok(())
            } else {
                Err(CliError::new(EXIT_SELFCHECK, "self-check failed"))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("nashcover: {e}");
            ExitCode::from(e.code as u8)
        }
    }
}
