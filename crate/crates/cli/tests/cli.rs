use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn hypop(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hypop"))
        .current_dir(dir)
        .args(args)
        .env_remove("HYPOP_THREADS")
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = hypop(dir, args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn records(text: &str) -> Vec<Value> {
    text.lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

fn without_timings(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("timings");
    v
}

#[test]
fn solve_writes_a_verifiable_record() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(
        d,
        &[
            "gen",
            "regular",
            "--n",
            "60",
            "--d",
            "3",
            "--seed",
            "2",
            "--out",
            "reg_d3.txt",
        ],
    );
    let args = [
        "solve",
        "--problem",
        "mis",
        "--input",
        "reg_d3.txt",
        "--solver",
        "hypop",
        "--seed",
        "7",
        "--epochs",
        "300",
        "--lr",
        "0.01",
        "--out",
        "runs.jsonl",
    ];
    ok(d, &args);
    ok(d, &args);
    let recs = records(&fs::read_to_string(d.join("runs.jsonl")).unwrap());
    assert_eq!(recs.len(), 2);
    assert_eq!(recs[0]["feasible"], Value::Bool(true));
    assert_eq!(recs[0]["N"], 60);
    assert_eq!(recs[0]["K"], 90);
    assert_eq!(
        without_timings(recs[0].clone()),
        without_timings(recs[1].clone())
    );

    let sidecar: Value = serde_json::from_str(
        &fs::read_to_string(d.join(recs[0]["assignment"].as_str().unwrap())).unwrap(),
    )
    .unwrap();
    assert_eq!(sidecar["id"], recs[0]["id"]);
    assert_eq!(sidecar["x"].as_array().unwrap().len(), 60);

    let out = ok(d, &["verify", "--records", "runs.jsonl"]);
    assert_eq!(out.lines().filter(|l| l.starts_with("ok ")).count(), 2);

    // a tampered assignment no longer matches its record
    let path = d.join(recs[0]["assignment"].as_str().unwrap());
    let mut x: Vec<i64> = serde_json::from_value(sidecar["x"].clone()).unwrap();
    x.iter_mut().for_each(|v| *v = 1);
    fs::write(
        path,
        serde_json::json!({"id": sidecar["id"], "x": x}).to_string(),
    )
    .unwrap();
    let out = hypop(d, &["verify", "--records", "runs.jsonl"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn config_file_sits_between_flags_and_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(
        d,
        &[
            "gen",
            "hypergraph",
            "--n",
            "40",
            "--k",
            "50",
            "--max-degree",
            "8",
            "--seed",
            "1",
            "--out",
            "h.txt",
        ],
    );
    fs::write(
        d.join("run.toml"),
        "problem = \"hypergraph-maxcut\"\nepochs = 40\nlr = 0.02\nsweeps = 11\n",
    )
    .unwrap();
    let out = ok(
        d,
        &[
            "solve",
            "--input",
            "h.txt",
            "--config",
            "run.toml",
            "--epochs",
            "25",
            "--early-stop",
            "false",
        ],
    );
    let rec = &records(&out)[0];
    assert_eq!(rec["config"]["epochs"], 25);
    assert_eq!(rec["config"]["lr"], 0.02);
    assert_eq!(rec["config"]["sweeps"], 11);
    assert_eq!(rec["config"]["restarts"], 3);
    assert_eq!(rec["epochs_run"], 25);
    assert_eq!(rec["problem"], "hypergraph-maxcut");

    fs::write(d.join("bad.toml"), "epoch = 4\n").unwrap();
    let out = hypop(d, &["solve", "--input", "h.txt", "--config", "bad.toml"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(d.join("g.txt"), "1 2\n2 3\n").unwrap();
    fs::write(d.join("broken.cnf"), "p cnf 3 1\n1 x 0\n").unwrap();
    let code = |args: &[&str]| hypop(d, args).status.code();
    assert_eq!(
        code(&["solve", "--input", "g.txt"]),
        Some(2),
        "missing --problem"
    );
    assert_eq!(
        code(&["solve", "--input", "g.txt", "--problem", "nope"]),
        Some(2)
    );
    assert_eq!(
        code(&["solve", "--input", "missing.txt", "--problem", "mis"]),
        Some(3)
    );
    assert_eq!(
        code(&["solve", "--input", "broken.cnf", "--problem", "sat3"]),
        Some(3)
    );
    assert_eq!(
        code(&["solve", "--input", "g.txt", "--problem", "sat3"]),
        Some(2)
    );
    assert_eq!(
        code(&[
            "solve",
            "--input",
            "g.txt",
            "--problem",
            "mis",
            "--restarts",
            "0"
        ]),
        Some(2)
    );
    assert_eq!(
        code(&["distributed", "--input", "g.txt", "--problem", "mis"]),
        Some(2)
    );
    // infeasible assignments are still a completed run
    assert_eq!(
        code(&[
            "solve",
            "--input",
            "g.txt",
            "--problem",
            "mis",
            "--solver",
            "sa",
            "--sweeps",
            "1",
            "--beta",
            "0.5"
        ]),
        Some(0)
    );
}

#[test]
fn gen_respects_the_degree_cap() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let text = ok(
        d,
        &[
            "gen",
            "hypergraph",
            "--n",
            "100",
            "--k",
            "150",
            "--max-degree",
            "10",
            "--seed",
            "5",
        ],
    );
    let mut degree = [0usize; 101];
    let mut edges = 0;
    for line in text.lines() {
        edges += 1;
        for id in line.split_whitespace() {
            degree[id.parse::<usize>().unwrap()] += 1;
        }
    }
    assert_eq!(edges, 150);
    assert!(degree.iter().all(|&k| k <= 10));

    let out = hypop(
        d,
        &[
            "gen",
            "hypergraph",
            "--n",
            "10",
            "--k",
            "100",
            "--max-degree",
            "2",
            "--min-size",
            "3",
            "--max-size",
            "3",
        ],
    );
    assert_ne!(out.status.code(), Some(0));

    let cnf = ok(
        d,
        &[
            "gen",
            "ksat",
            "--vars",
            "20",
            "--clauses",
            "91",
            "--satisfiable",
            "--seed",
            "3",
        ],
    );
    assert!(cnf.starts_with("p cnf 20 91"));
    let er = ok(
        d,
        &["gen", "er", "--n", "50", "--p", "0.1", "--format", "gset"],
    );
    assert!(er.starts_with("50 "));
}

#[test]
fn sat_and_gset_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(
        d,
        &[
            "gen",
            "ksat",
            "--vars",
            "20",
            "--clauses",
            "91",
            "--satisfiable",
            "--seed",
            "11",
            "--out",
            "uf20-01.cnf",
        ],
    );
    let rec = &records(&ok(
        d,
        &[
            "solve",
            "--problem",
            "sat3",
            "--input",
            "uf20-01.cnf",
            "--epochs",
            "300",
            "--lr",
            "0.01",
        ],
    ))[0];
    assert_eq!(rec["score_name"], "unsatisfied");
    assert_eq!(rec["objective"], 0.0);

    ok(
        d,
        &[
            "gen", "gnm", "--n", "80", "--m", "200", "--format", "gset", "--out", "G99",
        ],
    );
    let rec = &records(&ok(
        d,
        &[
            "solve",
            "--problem",
            "graph-maxcut",
            "--input",
            "G99",
            "--solver",
            "sa",
        ],
    ))[0];
    assert_eq!(rec["K"], 200);
    assert!(rec["objective"].as_f64().unwrap() >= 140.0);
}

#[test]
fn distributed_and_parallel_runs() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(
        d,
        &[
            "gen",
            "hypergraph",
            "--n",
            "80",
            "--k",
            "120",
            "--max-degree",
            "8",
            "--seed",
            "3",
            "--out",
            "h.txt",
        ],
    );
    for mode in ["parallel", "distributed"] {
        let out = ok(
            d,
            &[
                "distributed",
                "--problem",
                "hypergraph-maxcut",
                "--input",
                "h.txt",
                "--workers",
                "4",
                "--dist-mode",
                mode,
                "--epochs",
                "50",
                "--lr",
                "0.01",
            ],
        );
        let rec = &records(&out)[0];
        assert_eq!(rec["config"]["workers"], 4);
        assert_eq!(rec["config"]["dist-mode"], mode);
        assert!(rec["epochs_run"].as_u64().unwrap() <= 50);
    }
    let out = hypop(
        d,
        &[
            "solve",
            "--problem",
            "hypergraph-maxcut",
            "--input",
            "h.txt",
            "--workers",
            "2",
            "--solver",
            "sa",
        ],
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn transfer_pretrain_then_apply() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(
        d,
        &[
            "gen", "regular", "--n", "60", "--d", "3", "--seed", "4", "--out", "g.txt",
        ],
    );
    ok(
        d,
        &[
            "gen",
            "regular",
            "--n",
            "40",
            "--d",
            "3",
            "--seed",
            "4",
            "--out",
            "small.txt",
        ],
    );
    let common = ["--epochs", "200", "--lr", "0.01"];
    let mut pre = vec![
        "transfer",
        "pretrain",
        "--checkpoint",
        "m.ckpt",
        "--problem",
        "graph-maxcut",
        "--input",
        "g.txt",
    ];
    pre.extend(common);
    ok(d, &pre);
    assert!(d.join("m.ckpt").exists());
    let mut apply = vec![
        "transfer",
        "apply",
        "--checkpoint",
        "m.ckpt",
        "--problem",
        "mis",
        "--input",
        "g.txt",
    ];
    apply.extend(common);
    let rec = &records(&ok(d, &apply))[0];
    assert_eq!(rec["problem"], "mis");
    assert_eq!(rec["feasible"], true);

    let out = hypop(
        d,
        &[
            "transfer",
            "apply",
            "--checkpoint",
            "m.ckpt",
            "--problem",
            "mis",
            "--input",
            "small.txt",
        ],
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("shape mismatch"));
}

#[test]
fn bench_suites() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(d.join("empty.toml"), "seeds = [1]\n").unwrap();
    let table = ok(
        d,
        &["bench", "--manifest", "empty.toml", "--out", "empty.jsonl"],
    );
    assert_eq!(table.lines().count(), 1);
    assert!(table.starts_with("input,problem,solver,N,runs"));

    ok(
        d,
        &[
            "gen",
            "hypergraph",
            "--n",
            "50",
            "--k",
            "60",
            "--max-degree",
            "6",
            "--seed",
            "1",
            "--out",
            "a.txt",
        ],
    );
    ok(
        d,
        &[
            "gen",
            "hypergraph",
            "--n",
            "100",
            "--k",
            "120",
            "--max-degree",
            "6",
            "--seed",
            "1",
            "--out",
            "b.txt",
        ],
    );
    fs::write(
        d.join("suite.toml"),
        "seeds = [1, 2, 3]\nsolvers = [\"hypop\", \"sa\"]\n[defaults]\nproblem = \"hypergraph-maxcut\"\nepochs = 30\nlr = 0.01\n\
         [[instance]]\ninput = \"a.txt\"\n[[instance]]\ninput = \"b.txt\"\n",
    )
    .unwrap();
    let out = hypop(
        d,
        &[
            "--threads",
            "2",
            "bench",
            "--manifest",
            "suite.toml",
            "--out",
            "bench.jsonl",
            "--table",
            "table.csv",
        ],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(String::from_utf8_lossy(&out.stderr).contains("runtime exponent hypergraph-maxcut sa"));
    let recs = records(&fs::read_to_string(d.join("bench.jsonl")).unwrap());
    assert_eq!(recs.len(), 12);
    let table = fs::read_to_string(d.join("table.csv")).unwrap();
    assert_eq!(table.lines().count(), 1 + 4);
    assert!(table
        .lines()
        .nth(1)
        .unwrap()
        .contains(",hypergraph-maxcut,hypop,50,3,cut,"));
    ok(d, &["verify", "--records", "bench.jsonl"]);
}

#[test]
fn analyze_phase_emits_jsonl_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out = ok(
        d,
        &[
            "analyze",
            "phase",
            "--ns",
            "30",
            "--ps",
            "0.05,0.3",
            "--lrs",
            "0.01",
            "--seeds",
            "1",
            "--epochs",
            "20",
            "--sweeps",
            "5",
            "--csv",
            "phase.csv",
        ],
    );
    let recs = records(&out);
    assert_eq!(recs.len(), 4);
    for key in [
        "family",
        "N",
        "p",
        "d",
        "lr",
        "seed",
        "solver",
        "ratio",
        "runtime_s",
    ] {
        assert!(recs[0].get(key).is_some(), "{key}");
    }
    let csv = fs::read_to_string(d.join("phase.csv")).unwrap();
    assert_eq!(csv.lines().count(), 5);

    let trace = ok(
        d,
        &[
            "analyze",
            "oversmoothing",
            "--n",
            "40",
            "--p",
            "0.2",
            "--epochs",
            "10",
        ],
    );
    let v: Value = serde_json::from_str(trace.trim()).unwrap();
    assert!(v["after"]["agg2"].as_f64().unwrap() >= 0.0);

    let out = ok(
        d,
        &[
            "analyze",
            "sparsify",
            "--n",
            "40",
            "--p",
            "0.3",
            "--drop",
            "0,0.8",
            "--epochs",
            "10",
            "--gnn-only",
        ],
    );
    assert_eq!(records(&out).len(), 2);
}
