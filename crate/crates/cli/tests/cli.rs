use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use cmcf_core::json::{read_instance, SolutionDoc};
use cmcf_core::model::check_feasible;
use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn cmcf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cmcf")).args(args).env_remove("CMCF_LP_BACKEND").output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn prepare(name: &str, cost: &str, dir: &Path) -> PathBuf {
    let out = cmcf(&["prepare", "--in", s(&fixture(&format!("{name}.txt"))), "--cost", cost, "--out", s(dir)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    dir.join(format!("{name}.json"))
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn prepare_is_deterministic_and_sets_the_pole() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let pa = prepare("pdh", "kleinrock", a.path());
    let pb = prepare("pdh", "kleinrock", b.path());
    assert_eq!(std::fs::read(&pa).unwrap(), std::fs::read(&pb).unwrap());
    assert_eq!(
        std::fs::read(a.path().join("pdh.report.json")).unwrap(),
        std::fs::read(b.path().join("pdh.report.json")).unwrap()
    );
    let doc = read_json(&pa);
    let arcs = doc["arcs"].as_array().unwrap();
    assert_eq!(arcs.len(), 68);
    for arc in arcs {
        let cap = arc["capacity"].as_f64().unwrap();
        assert_eq!(arc["cost"]["kind"], "kleinrock");
        let d = arc["cost"]["d"].as_f64().unwrap();
        assert!((d - 1.01 * cap).abs() <= 1e-9 * d);
    }
    let report = read_json(&a.path().join("pdh.report.json"));
    assert_eq!(report["summary"]["commodities"], 24);
    assert_eq!(report["scaling"]["below"]["feasible"], false);
}

#[test]
fn input_and_pipeline_errors_have_distinct_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = cmcf(&["prepare", "--in", s(&fixture("disconnected.txt")), "--cost", "linear", "--out", s(dir.path())]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("capacity factor"));

    let missing = dir.path().join("missing.txt");
    let out = cmcf(&["prepare", "--in", s(&missing), "--cost", "linear", "--out", s(dir.path())]);
    assert_eq!(code(&out), 2);

    let garbage = dir.path().join("garbage.json");
    std::fs::write(&garbage, "{\"nodes\": 3").unwrap();
    let out = cmcf(&["solve", "--instance", s(&garbage), "--solver", "inner", "--out", s(dir.path())]);
    assert_eq!(code(&out), 2);

    let inst = prepare("three_node", "quadratic", dir.path());
    for gap in ["0", "1.5"] {
        let out = cmcf(&["solve", "--instance", s(&inst), "--solver", "greedy", "--gap", gap, "--out", s(dir.path())]);
        assert_eq!(code(&out), 2, "gap {gap}");
    }
    let out = cmcf(&["solve", "--instance", s(&inst), "--solver", "simplex", "--out", s(dir.path())]);
    assert_eq!(code(&out), 2);

    let out = Command::new(env!("CARGO_BIN_EXE_cmcf"))
        .args(["solve", "--instance", s(&inst), "--solver", "inner", "--out", s(dir.path())])
        .env("CMCF_LP_BACKEND", "external")
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("external"));
}

#[test]
fn inner_on_the_three_node_fixture_matches_hand_value() {
    let dir = tempfile::tempdir().unwrap();
    let inst_path = prepare("three_node", "quadratic", dir.path());
    let out = cmcf(&["solve", "--instance", s(&inst_path), "--solver", "inner", "--out", s(dir.path())]);
    assert_eq!(code(&out), 0);

    // One A→C route through B; reverse arcs stay empty and cost nothing.
    let doc = read_json(&inst_path);
    let b = doc["commodities"][0]["bandwidth"].as_f64().unwrap();
    let names: Vec<&str> = doc["nodes"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
    let idx = |n: &str| names.iter().position(|m| *m == n).unwrap() as u64;
    let mut expect = 0.0;
    for arc in doc["arcs"].as_array().unwrap() {
        let (t, h) = (arc["tail"].as_u64().unwrap(), arc["head"].as_u64().unwrap());
        if (t, h) == (idx("A"), idx("B")) || (t, h) == (idx("B"), idx("C")) {
            expect += arc["cost"]["f"].as_f64().unwrap() * b * b;
        }
    }
    let sol = read_json(&dir.path().join("three_node.inner.json"));
    let got = sol["objective"].as_f64().unwrap();
    assert!((got - expect).abs() <= 1e-6 * expect, "{got} vs {expect}");
    assert!((sol["bound"].as_f64().unwrap() - expect).abs() <= 1e-6 * expect);
}

#[test]
fn solutions_are_deterministic_and_feasible_on_reload() {
    let dir = tempfile::tempdir().unwrap();
    let inst_path = prepare("pdh", "kleinrock", dir.path());
    let inst = read_instance(&std::fs::read_to_string(&inst_path).unwrap()).unwrap();
    for solver in ["greedy", "inner", "tight-inner", "bnp-tight"] {
        let mut bytes = Vec::new();
        for run in 0..2 {
            let out_dir = dir.path().join(format!("{solver}-{run}"));
            let out = cmcf(&["solve", "--instance", s(&inst_path), "--solver", solver, "--seed", "7", "--out", s(&out_dir)]);
            assert_eq!(code(&out), 0, "{solver}: {}", String::from_utf8_lossy(&out.stderr));
            bytes.push(std::fs::read(out_dir.join(format!("pdh.{solver}.json"))).unwrap());
        }
        assert_eq!(bytes[0], bytes[1], "{solver}");
        let doc: SolutionDoc = serde_json::from_slice(&bytes[0]).unwrap();
        assert!(check_feasible(&inst, &doc.flow(), 1e-6).is_feasible(), "{solver}");
    }
}

#[test]
fn full_gap_target_stops_at_the_root() {
    let dir = tempfile::tempdir().unwrap();
    let inst_path = prepare("pdh", "kleinrock", dir.path());
    let out = cmcf(&["solve", "--instance", s(&inst_path), "--solver", "bnp-pattern", "--gap", "1.0", "--out", s(dir.path())]);
    assert_eq!(code(&out), 0);
    let sol = read_json(&dir.path().join("pdh.bnp-pattern.json"));
    assert_eq!(sol["stats"]["nodes"], 1);
    assert_eq!(sol["status"], "solved");
}

#[test]
fn limits_exit_with_four_and_keep_partial_results() {
    let dir = tempfile::tempdir().unwrap();
    let inst_path = prepare("pdh", "kleinrock", dir.path());
    let out = cmcf(&["solve", "--instance", s(&inst_path), "--solver", "flowdev", "--fw-iterations", "2", "--out", s(dir.path())]);
    assert_eq!(code(&out), 4);
    let sol = read_json(&dir.path().join("pdh.flowdev.json"));
    assert_eq!(sol["status"], "iteration_limit");
    assert_eq!(sol["stats"]["iterations"], 2);

    let out = cmcf(&["solve", "--instance", s(&inst_path), "--solver", "inner", "--max-iterations", "2", "--out", s(dir.path())]);
    assert_eq!(code(&out), 4);
    let sol = read_json(&dir.path().join("pdh.inner.json"));
    assert_eq!(sol["status"], "iteration_limit");
}

fn csv_rows(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect();
    (header, rows)
}

#[test]
fn bench_writes_one_row_per_pair() {
    let dir = tempfile::tempdir().unwrap();
    let inst_dir = dir.path().join("instances");
    prepare("pdh", "quadratic", &inst_dir);
    prepare("three_node", "kleinrock", &inst_dir);
    std::fs::remove_file(inst_dir.join("pdh.report.json")).unwrap();
    std::fs::remove_file(inst_dir.join("three_node.report.json")).unwrap();
    std::fs::write(inst_dir.join("zz_broken.json"), "not json").unwrap();

    let glob = format!("{}/*.json", inst_dir.display());
    let mut tables = Vec::new();
    for jobs in ["1", "3"] {
        let out_dir = dir.path().join(format!("bench{jobs}"));
        let out = cmcf(&["bench", "--instances", &glob, "--solvers", "bnp-pattern,greedy", "--jobs", jobs, "--out", s(&out_dir)]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        tables.push(csv_rows(&out_dir.join("bench.csv")));

        let (pheader, prows) = csv_rows(&out_dir.join("profile.csv"));
        assert_eq!(pheader, ["solver", "time_s", "fraction_solved"]);
        for pair in prows.windows(2).filter(|w| w[0][0] == w[1][0]) {
            let (t0, t1): (f64, f64) = (pair[0][1].parse().unwrap(), pair[1][1].parse().unwrap());
            let (f0, f1): (f64, f64) = (pair[0][2].parse().unwrap(), pair[1][2].parse().unwrap());
            assert!(t1 >= t0 && f1 >= f0);
        }
    }

    let (header, rows) = &tables[0];
    assert_eq!(
        header,
        &["instance", "nodes", "arcs", "commodities", "solver", "bound", "incumbent", "gap_rel", "time_s", "bnb_nodes", "columns", "status"]
    );
    assert_eq!(rows.len(), 6);
    let broken: Vec<_> = rows.iter().filter(|r| r[0] == "zz_broken").collect();
    assert_eq!(broken.len(), 2);
    assert!(broken.iter().all(|r| r[11] == "error"));
    assert!(rows.iter().filter(|r| r[0] != "zz_broken").all(|r| r[11] != "error"));
    for r in rows.iter().filter(|r| r[4] == "bnp-pattern" && r[11] == "solved") {
        let (bound, inc, gap): (f64, f64, f64) = (r[5].parse().unwrap(), r[6].parse().unwrap(), r[7].parse().unwrap());
        let expect = if bound >= inc { 0.0 } else { (inc - bound) / inc };
        assert!((gap - expect).abs() <= 1e-9);
    }

    // Same rows regardless of concurrency, apart from timings.
    let strip = |rows: &Vec<Vec<String>>| -> Vec<Vec<String>> {
        rows.iter().map(|r| r.iter().enumerate().filter(|(i, _)| *i != 8).map(|(_, v)| v.clone()).collect()).collect()
    };
    assert_eq!(strip(&tables[0].1), strip(&tables[1].1));
}
