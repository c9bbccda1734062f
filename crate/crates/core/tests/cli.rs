mod common;

use std::path::Path;
use std::process::{Command, Output};

use common::*;
use serde_json::Value;
use tsrm_core::io::{read_instance, write_instance};
use tsrm_core::instances::gen_line_counterexample;

fn tsrm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tsrm")).args(args).output().unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn json_out(out: &Output) -> Value {
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn gen_line_then_solve() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("line.json");
    let out = tsrm(&["gen", "line", "--m", "3", "--eps", "0.1", "--out", p(&file)]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("r1=3 r2=1 d=4 scenarios=explicit(1)"));
    let inst = read_instance(&file).unwrap();
    assert_eq!((inst.n_r1(), inst.n_d()), (3, 4));

    let greedy = json_out(&tsrm(&["solve", "--solver", "greedy", "--instance", p(&file)]));
    assert!((greedy["total"].as_f64().unwrap() - 7.6).abs() < TOL);
    assert_eq!(greedy["decision"]["drivers"], serde_json::json!([1, 2, 3]));
    let single = json_out(&tsrm(&["solve", "--solver", "single", "--instance", p(&file)]));
    assert!((single["total"].as_f64().unwrap() - 2.0).abs() < TOL);
    assert!(single["wall_time_secs"].as_f64().is_some());

    let oracle = json_out(&tsrm(&["oracle", "--instance", p(&file)]));
    assert_eq!((oracle["opt1"].as_f64(), oracle["opt2"].as_f64()), (Some(1.0), Some(1.0)));
}

#[test]
fn gen_is_deterministic_and_canonical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    tsrm(&["gen", "random", "--seed", "7", "--out", p(&a)]);
    tsrm(&["gen", "random", "--seed", "7", "--out", p(&b)]);
    let text = std::fs::read(&a).unwrap();
    assert_eq!(text, std::fs::read(&b).unwrap());
    let c = dir.path().join("c.json");
    write_instance(&c, &read_instance(&a).unwrap()).unwrap();
    assert_eq!(text, std::fs::read(&c).unwrap());
}

#[test]
fn three_dm_oracle() {
    let dir = tempfile::tempdir().unwrap();
    for (planted, want) in [("yes", 2.0), ("no", 4.0)] {
        let file = dir.path().join(format!("{planted}.json"));
        assert_eq!(tsrm(&["gen", "3dm", "--planted", planted, "--n", "3", "--out", p(&file)]).status.code(), Some(0));
        let oracle = json_out(&tsrm(&["oracle", "--instance", p(&file)]));
        assert_eq!(oracle["total"].as_f64(), Some(want));
    }
}

#[test]
fn eval_reads_a_solve_report() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("line.json");
    let report = dir.path().join("report.json");
    write_instance(&file, &gen_line_counterexample(3, 0.1).unwrap()).unwrap();
    assert_eq!(tsrm(&["solve", "--solver", "greedy", "--instance", p(&file), "--out", p(&report)]).status.code(), Some(0));
    let a = json_out(&tsrm(&["eval", "--instance", p(&file), "--decision", p(&report)]));
    let b = json_out(&tsrm(&["eval", "--instance", p(&file), "--drivers", "1,2,3"]));
    assert_eq!(a, b);
    let csv = tsrm(&["eval", "--instance", p(&file), "--drivers", "0,1,2", "--format", "csv"]);
    let text = String::from_utf8(csv.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("solver,cost1,worst_cost2,total,drivers"));
    assert!(text.lines().nth(1).unwrap().starts_with("fixed,1,1,2,"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let chains = dir.path().join("chains.json");
    assert_eq!(tsrm(&["gen", "surplus", "--m", "3", "--out", p(&chains)]).status.code(), Some(0));

    let out = tsrm(&["solve", "--solver", "nosurplus", "--instance", p(&chains)]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("SurplusNotZero"));

    assert_eq!(tsrm(&["solve", "--solver", "magic", "--instance", p(&chains)]).status.code(), Some(2));
    assert_eq!(tsrm(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(tsrm(&["gen", "line", "--m", "0"]).status.code(), Some(2));
    assert_eq!(tsrm(&["oracle", "--instance", p(&chains), "--enum-limit", "3"]).status.code(), Some(4));
    assert_eq!(tsrm(&["solve", "--solver", "greedy", "--instance", "/nonexistent/x.json"]).status.code(), Some(5));
}

#[test]
fn bench_directory_mode() {
    let dir = tempfile::tempdir().unwrap();
    write_instance(&dir.path().join("line.json"), &gen_line_counterexample(3, 0.1).unwrap()).unwrap();
    let out = tsrm(&["bench", "--dir", p(dir.path())]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("window,d,r1,s_star,greedy_over_opt,alg_over_opt,insample_ratio,bottleneck_ratio,total_weight_ratio")
    );
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row[0], "line");
    assert!((row[4].parse::<f64>().unwrap() - 3.8).abs() < TOL);
}

#[test]
fn bench_trips_averages_and_respects_threads() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("trips.csv");
    std::fs::write(&log, planted_trip_log(5)).unwrap();
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_tsrm"))
            .env("TSRM_THREADS", threads)
            .args(["bench", "--trips", p(&log), "--window", PLANTED_WINDOW, "--window", "2013-10-22 09:00:00"])
            .args(["--repeats", "4", "--seed", "1", "--format", "json"])
            .output()
            .unwrap()
    };
    let one = run("1");
    let four = run("4");
    assert_eq!(one.stdout, four.stdout);
    // The second batch is empty and is skipped with a warning.
    assert!(String::from_utf8_lossy(&one.stderr).contains("EmptyWindow"));
    let rows = json_out(&one);
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0]["alg_over_opt"].as_f64(), Some(1.0));
    assert_eq!(rows[0]["window"], PLANTED_WINDOW);
    assert_eq!(run("zero").status.code(), Some(2));
}
