use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use nashcover_cli::commands::{cmd_exact, cmd_solve, cmd_verify, SolveOptions};
use nashcover_cli::format::{from_json, to_json, InstanceFile, ReportFile, SolutionFile, TraceFile};
use nashcover_core::generators::{generate, small_kinds, GenSpec};
use nashcover_core::{AgentSet, TraceLevel};
use proptest::prelude::*;
use tempfile::TempDir;

const WORKED_EXAMPLE: &str = r#"{
  "format_version": 1,
  "n": 3,
  "T": 2,
  "families": [
    {"kind": "explicit", "sets": [[0, 1], [2]]},
    {"kind": "explicit", "sets": [[0], [1, 2]]}
  ]
}"#;

fn nashcover(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nashcover"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("spawn nashcover")
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path
}

fn read<T: serde::de::DeserializeOwned>(dir: &TempDir, name: &str) -> T {
    from_json(&fs::read_to_string(dir.path().join(name)).unwrap()).unwrap()
}

#[test]
fn solve_worked_example() {
    let dir = TempDir::new().unwrap();
    write(&dir, "i.json", WORKED_EXAMPLE);
    let out = nashcover(
        dir.path(),
        &["solve", "i.json", "--trace", "full", "--trace-out", "t.json", "--out", "s.json"],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let sol: SolutionFile = read(&dir, "s.json");
    assert!((sol.nsw - 12f64.cbrt()).abs() < 1e-12);
    assert_eq!(sol.sets, vec![AgentSet::from([0, 1]), AgentSet::from([1, 2])]);
    let trace: TraceFile = read(&dir, "t.json");
    for record in &trace.iterations {
        assert!(record.delta_phi >= trace.params.threshold - 1e-12);
        assert!(record.candidate_weights.is_some());
    }
}

#[test]
fn given_start_reproduces_hand_simulation() {
    let dir = TempDir::new().unwrap();
    write(&dir, "i.json", WORKED_EXAMPLE);
    write(&dir, "start.json", r#"{"sets": [[2], [0]], "nsw": 0, "phi": 0}"#);
    let out = nashcover(
        dir.path(),
        &["solve", "i.json", "--init", "start.json", "--trace-out", "t.json", "--out", "s.json"],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let trace: TraceFile = read(&dir, "t.json");
    assert_eq!(trace.init, "given");
    assert_eq!(trace.iteration_count, 2);
    let sol: SolutionFile = read(&dir, "s.json");
    assert!((sol.nsw - 12f64.cbrt()).abs() < 1e-12);
}

#[test]
fn malformed_json_exits_2() {
    let dir = TempDir::new().unwrap();
    write(&dir, "bad.json", "{\"format_version\": 1,\n \"n\": }");
    let out = nashcover(dir.path(), &["solve", "bad.json", "--out", "s.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
    assert!(!dir.path().join("s.json").exists());

    write(&dir, "invalid.json", r#"{"format_version":1,"n":2,"T":1,"families":[{"kind":"explicit","sets":[[5]]}]}"#);
    assert_eq!(nashcover(dir.path(), &["solve", "invalid.json"]).status.code(), Some(2));
}

#[test]
fn guard_violation_exits_3_without_output() {
    let dir = TempDir::new().unwrap();
    write(&dir, "i.json", WORKED_EXAMPLE);
    write(&dir, "start.json", r#"{"sets": [[2], [0]], "nsw": 0, "phi": 0}"#);
    let out = nashcover(
        dir.path(),
        &[
            "solve", "i.json", "--init", "start.json", "--max-iterations", "1", "--trace-out", "t.json", "--out",
            "s.json",
        ],
    );
    assert_eq!(out.status.code(), Some(3));
    assert!(!dir.path().join("s.json").exists());
    assert!(!dir.path().join("t.json").exists());
}

#[test]
fn exact_limits_and_unsmoothed() {
    let dir = TempDir::new().unwrap();
    write(&dir, "i.json", WORKED_EXAMPLE);
    let out = nashcover(dir.path(), &["exact", "i.json", "--out", "e.json"]);
    assert!(out.status.success());
    let exact: SolutionFile = read(&dir, "e.json");
    assert_eq!(exact.explored, Some(4));
    assert!((exact.nsw - 12f64.cbrt()).abs() < 1e-12);

    assert_eq!(nashcover(dir.path(), &["exact", "i.json", "--limit", "3"]).status.code(), Some(4));

    write(&dir, "tri.json", r#"{"vertices": 3, "edges": [[0, 1], [1, 2], [0, 2]], "k": 1}"#);
    assert!(nashcover(dir.path(), &["reduce", "vertex-cover", "tri.json", "--out", "tri_i.json"]).status.success());
    assert!(nashcover(dir.path(), &["exact", "tri_i.json", "--unsmoothed", "--out", "u.json"]).status.success());
    let u: SolutionFile = read(&dir, "u.json");
    assert_eq!(u.nsw_c, Some(0.0));
}

#[test]
fn verify_detects_corruption() {
    let dir = TempDir::new().unwrap();
    write(&dir, "i.json", WORKED_EXAMPLE);
    assert!(nashcover(dir.path(), &["solve", "i.json", "--out", "s.json"]).status.success());
    assert!(nashcover(dir.path(), &["exact", "i.json", "--out", "e.json"]).status.success());
    let ok = nashcover(dir.path(), &["verify", "i.json", "s.json", "--exact", "e.json"]);
    assert!(ok.status.success(), "{}", String::from_utf8_lossy(&ok.stdout));

    write(&dir, "bad.json", r#"{"sets": [[0, 1, 2], [1, 2]], "nsw": 2.5, "phi": 2.7}"#);
    let out = nashcover(dir.path(), &["verify", "i.json", "bad.json"]);
    assert_eq!(out.status.code(), Some(5));
    assert!(String::from_utf8_lossy(&out.stdout).contains("round 0"));
}

#[test]
fn reduce_kinds() {
    let dir = TempDir::new().unwrap();
    let inputs = [
        ("max-coverage", r#"{"universe_size": 4, "sets": [[0, 1], [2, 3], [0, 2]], "k": 2, "uniform_size": 2}"#, 4, 2),
        ("public-decisions", r#"{"n": 2, "issues": [[[1, 0], [0, 1]], [[1, 1], [0, 0]]]}"#, 2, 2),
        ("goods", r#"{"n": 2, "m": 3, "valued": [[0, 1], [1, 2]]}"#, 2, 3),
        ("vertex-cover", r#"{"vertices": 3, "edges": [[0, 1], [1, 2]], "k": 2}"#, 2, 2),
    ];
    for (kind, input, n, rounds) in inputs {
        write(&dir, "in.json", input);
        let out = nashcover(dir.path(), &["reduce", kind, "in.json", "--out", "r.json"]);
        assert!(out.status.success(), "{kind}: {}", String::from_utf8_lossy(&out.stderr));
        let file: InstanceFile = read(&dir, "r.json");
        assert_eq!((file.n, file.rounds), (n, rounds), "{kind}");
        file.into_instance().unwrap();
    }
    write(&dir, "orphan.json", r#"{"n": 2, "m": 2, "valued": [[0], [0]]}"#);
    assert_eq!(nashcover(dir.path(), &["reduce", "goods", "orphan.json"]).status.code(), Some(2));
}

#[test]
fn bench_writes_csv_and_json() {
    let dir = TempDir::new().unwrap();
    let out = nashcover(dir.path(), &["bench", "--count", "6", "--seed", "3", "--out", "rep"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: ReportFile = read(&dir, "rep.json");
    assert_eq!(report.rows.len(), 6);
    for row in &report.rows {
        assert!(row.ratio.unwrap() >= row.ratio_bound);
        assert!(row.iterations.unwrap() <= row.bound);
    }
    let csv = fs::read_to_string(dir.path().join("rep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 7);

    write(&dir, "empty.json", r#"{"instances": []}"#);
    let out = nashcover(dir.path(), &["bench", "--suite", "empty.json", "--out", "none"]);
    assert!(out.status.success());
    let report: ReportFile = read(&dir, "none.json");
    assert!(report.rows.is_empty());
}

#[test]
fn bench_respects_thread_cap() {
    let dir = TempDir::new().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_nashcover"))
        .current_dir(dir.path())
        .env("NASHCOVER_THREADS", "1")
        .args(["bench", "--count", "3", "--no-exact"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let report: ReportFile = from_json(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert!(report.rows.iter().all(|r| r.ratio.is_none() && r.nsw_alg.is_some()));
}

#[test]
fn gen_from_spec_file_matches_library() {
    let dir = TempDir::new().unwrap();
    let spec = GenSpec {
        seed: 11,
        n: 6,
        rounds: 3,
        kinds: small_kinds(6).to_vec(),
    };
    write(&dir, "spec.json", &serde_json::to_string(&spec).unwrap());
    assert!(nashcover(dir.path(), &["gen", "--spec", "spec.json", "--out", "i.json"]).status.success());
    let file: InstanceFile = read(&dir, "i.json");
    assert_eq!(file.into_instance().unwrap(), generate(&spec).unwrap());
}

#[test]
fn selfcheck_passes() {
    let dir = TempDir::new().unwrap();
    assert!(nashcover(dir.path(), &["selfcheck"]).status.success());
}

#[test]
fn library_commands_agree_with_ratio_bound() {
    for seed in 0..20 {
        let spec = GenSpec {
            seed,
            n: 5,
            rounds: 3,
            kinds: small_kinds(5).to_vec(),
        };
        let inst = generate(&spec).unwrap();
        let options = SolveOptions {
            trace: TraceLevel::None,
            ..SolveOptions::default()
        };
        let (sol, _) = cmd_solve(&inst, &options).unwrap();
        let exact = cmd_exact(&inst, 1_000_000, false).unwrap();
        let report = cmd_verify(&inst, &sol, Some(&exact)).unwrap();
        assert!(report.passed, "{report:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn files_round_trip(seed in any::<u64>(), n in 1usize..9, rounds in 1usize..6) {
        let spec = GenSpec { seed, n, rounds, kinds: small_kinds(n).to_vec() };
        let inst = generate(&spec).unwrap();
        let text = to_json(&InstanceFile::from_instance(&inst)).unwrap();
        let parsed: InstanceFile = from_json(&text).unwrap();
        prop_assert_eq!(to_json(&parsed).unwrap(), text.clone());
        prop_assert_eq!(parsed.into_instance().unwrap(), inst.clone());

        let options = SolveOptions { trace: TraceLevel::Full, ..SolveOptions::default() };
        let (sol, trace) = cmd_solve(&inst, &options).unwrap();
        let sol_text = to_json(&sol).unwrap();
        let sol_back: SolutionFile = from_json(&sol_text).unwrap();
        prop_assert_eq!(&sol_back, &sol);
        let trace_text = to_json(&trace).unwrap();
        let trace_back: TraceFile = from_json(&trace_text).unwrap();
        prop_assert_eq!(&trace_back, &trace);
        prop_assert_eq!(to_json(&trace_back).unwrap(), trace_text);
    }
}
