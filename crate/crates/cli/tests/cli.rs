use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tbn_cli::report::{CommandResult, Report, RunStatus, CSV_HEADER, SCHEMA_VERSION};
use tbn_core::fixtures;

fn tbn(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tbn"))
        .args(args)
        .current_dir(dir)
        .env_remove("TBN_TIMEOUT")
        .env_remove("TBN_MAX_NODES")
        .output()
        .unwrap()
}

fn json(dir: &Path, args: &[&str]) -> (i32, Report) {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let out = tbn(dir, &all);
    let report = serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stderr)));
    (out.status.code().unwrap(), report)
}

fn workspace() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    for (name, text) in [
        ("fig1.tbn", fixtures::FIG1),
        ("stable.cfg", fixtures::FIG1_STABLE),
        ("unstable.cfg", fixtures::FIG1_UNSTABLE),
        ("singletons.cfg", fixtures::FIG1_SINGLETONS),
        ("grid.tbn", fixtures::GRID),
        ("translator.tbn", fixtures::TRANSLATOR),
        ("infinite.tbn", fixtures::INFINITE),
    ] {
        fs::write(dir.path().join(name), text).unwrap();
    }
    dir
}

#[test]
fn missing_and_malformed_inputs_exit_2() {
    let dir = workspace();
    let out = tbn(dir.path(), &["stable", "nonexistent.tbn"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));

    fs::write(dir.path().join("bad.tbn"), "a b c, -1\n").unwrap();
    assert_eq!(
        tbn(dir.path(), &["stable", "bad.tbn"]).status.code(),
        Some(2)
    );
    assert_eq!(
        tbn(dir.path(), &["stable", "fig1.tbn", "--timeout", "-1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(tbn(dir.path(), &["frobnicate"]).status.code(), Some(2));
}

#[test]
fn budget_overrun_exits_3_with_a_partial_report() {
    let dir = workspace();
    let (code, report) = json(
        dir.path(),
        &["stable", "--all", "translator.tbn", "--max-nodes", "1"],
    );
    assert_eq!(code, 3);
    assert_eq!(report.status, RunStatus::BudgetExceeded);
    let CommandResult::Stable(r) = report.result else {
        panic!("wrong kind")
    };
    assert!(!r.complete);
    assert_eq!(report.budget.max_nodes, 1);
}

#[test]
fn environment_sets_the_budget() {
    let dir = workspace();
    let out = Command::new(env!("CARGO_BIN_EXE_tbn"))
        .args(["stable", "fig1.tbn", "--format", "json"])
        .current_dir(dir.path())
        .env("TBN_MAX_NODES", "77")
        .env("TBN_TIMEOUT", "5")
        .output()
        .unwrap();
    let report: Report = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report.budget.max_nodes, 77);
    assert_eq!(report.budget.timeout_ms, 5000);
    // flags win over the environment
    let out = Command::new(env!("CARGO_BIN_EXE_tbn"))
        .args([
            "stable",
            "fig1.tbn",
            "--format",
            "json",
            "--max-nodes",
            "88",
        ])
        .current_dir(dir.path())
        .env("TBN_MAX_NODES", "77")
        .output()
        .unwrap();
    let report: Report = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report.budget.max_nodes, 88);
}

#[test]
fn reports_round_trip_through_json() {
    let dir = workspace();
    let runs: [&[&str]; 4] = [
        &["stable", "--all", "infinite.tbn"],
        &["basis", "grid.tbn"],
        &["verify", "fig1.tbn", "unstable.cfg"],
        &["bench", "--n-range", "1..2"],
    ];
    for args in runs {
        let (code, report) = json(dir.path(), args);
        assert_eq!(code, 0, "{args:?}");
        assert_eq!(report.schema_version, SCHEMA_VERSION);
        assert_eq!(report.command, args[0]);
        let text = serde_json::to_string(&report).unwrap();
        assert_eq!(serde_json::from_str::<Report>(&text).unwrap(), report);
    }
}

#[test]
fn verify_verdicts() {
    let dir = workspace();
    let verdict = |cfg: &str| {
        let (code, report) = json(dir.path(), &["verify", "fig1.tbn", cfg]);
        assert_eq!(code, 0);
        let CommandResult::Verify(v) = report.result else {
            panic!("wrong kind")
        };
        v
    };
    let v = verdict("stable.cfg");
    assert_eq!(
        (v.saturated, v.locally_stable, v.stable),
        (Some(true), Some(true), Some(true))
    );
    let v = verdict("unstable.cfg");
    assert_eq!(
        (v.saturated, v.locally_stable, v.stable),
        (Some(true), Some(true), Some(false))
    );
    let v = verdict("singletons.cfg");
    assert_eq!((v.saturated, v.stable), (Some(false), Some(false)));
    assert_eq!(v.locally_stable, None);
}

#[test]
fn bench_writes_csv_and_reports_timeouts() {
    let dir = workspace();
    let out = tbn(
        dir.path(),
        &[
            "bench",
            "--n-range",
            "1..2",
            "--variant",
            "both",
            "--csv",
            "rows.csv",
        ],
    );
    assert_eq!(out.status.code(), Some(0));
    let csv = fs::read_to_string(dir.path().join("rows.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], CSV_HEADER);
    assert_eq!(lines.len(), 1 + 2 * 2 * 2);
    assert!(lines[1..].iter().all(|l| l.contains(",optimal,")));

    let (code, report) = json(
        dir.path(),
        &["bench", "--n-range", "1..2", "--timeout", "0"],
    );
    assert_eq!(code, 0);
    let CommandResult::Bench(b) = report.result else {
        panic!("wrong kind")
    };
    assert!(b
        .rows
        .iter()
        .all(|r| r.status == "timeout" && r.optimum.is_none()));
}

#[test]
fn basis_documents_write_and_check() {
    let dir = workspace();
    let (code, _) = json(dir.path(), &["basis", "grid.tbn", "--out", "grid.json"]);
    assert_eq!(code, 0);
    let (code, report) = json(dir.path(), &["basis", "grid.tbn", "--check", "grid.json"]);
    assert_eq!(code, 0);
    let CommandResult::Basis(b) = report.result else {
        panic!("wrong kind")
    };
    let check = b.check.unwrap();
    assert_eq!(
        (check.problems.len(), check.missing, check.extra),
        (0, 0, 0)
    );

    // drop one element
    let mut doc: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("grid.json")).unwrap()).unwrap();
    doc["elements"].as_array_mut().unwrap().pop();
    fs::write(dir.path().join("short.json"), doc.to_string()).unwrap();
    let (code, report) = json(dir.path(), &["basis", "grid.tbn", "--check", "short.json"]);
    assert_eq!(code, 2);
    assert_eq!(report.status, RunStatus::Rejected);
    let CommandResult::Basis(b) = report.result else {
        panic!("wrong kind")
    };
    assert_eq!(b.check.unwrap().missing, 1);
}

#[test]
fn exported_programs_check_solutions() {
    let dir = workspace();
    let (code, report) = json(dir.path(), &["export-lp", "fig1.tbn", "-o", "fig1.lp"]);
    assert_eq!(code, 0);
    let CommandResult::ExportLp(e) = report.result else {
        panic!("wrong kind")
    };
    assert_eq!((e.bound, e.variables), (1, 5));
    let lp = fs::read_to_string(dir.path().join("fig1.lp")).unwrap();
    assert!(lp.contains("Subject To") || lp.to_lowercase().contains("subject to"));

    // the optimum: m1 and m2 together in the one slot
    let t = fixtures::tbn(fixtures::FIG1);
    let var = |label: &str| format!("C_m{}_p1", t.index_of_label(label).unwrap() + 1);
    let good = format!(
        "{} 1\n{} 1\n{} 0\n{} 0\nE_p1 1\n",
        var("m1"),
        var("m2"),
        var("m3"),
        var("m4")
    );
    fs::write(dir.path().join("good.sol"), good).unwrap();
    let (code, report) = json(
        dir.path(),
        &["check-solution", "fig1.tbn", "good.sol", "--lp", "fig1.lp"],
    );
    assert_eq!(code, 0);
    let CommandResult::CheckSolution(c) = report.result else {
        panic!("wrong kind")
    };
    assert!(c.feasible);
    assert_eq!(c.objective, 1);

    // an empty polymer leaves the starred sites exposed
    let bad = format!(
        "{} 0\n{} 0\n{} 0\n{} 0\nE_p1 0\n",
        var("m1"),
        var("m2"),
        var("m3"),
        var("m4")
    );
    fs::write(dir.path().join("bad.sol"), bad).unwrap();
    let (code, report) = json(dir.path(), &["check-solution", "fig1.tbn", "bad.sol"]);
    assert_eq!(code, 2);
    assert_eq!(report.status, RunStatus::Rejected);
    let CommandResult::CheckSolution(c) = report.result else {
        panic!("wrong kind")
    };
    assert!(!c.feasible && c.violation.is_some());

    // a program from different options does not match
    let (code, _) = json(
        dir.path(),
        &["export-lp", "fig1.tbn", "--bound", "2", "-o", "two.lp"],
    );
    assert_eq!(code, 0);
    let out = tbn(
        dir.path(),
        &["check-solution", "fig1.tbn", "good.sol", "--lp", "two.lp"],
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn text_output_lists_configurations() {
    let dir = workspace();
    let out = tbn(dir.path(), &["stable", "--all", "infinite.tbn"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("2 + ∞"), "{text}");
}
