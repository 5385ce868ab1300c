use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bspgraph"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json(o: &Output) -> Value {
    assert!(o.status.success(), "failed: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).expect("json on stdout")
}

fn h_total(v: &Value) -> u64 {
    v["H"]
        .as_array()
        .unwrap()
        .iter()
        .flat_map(|row| row.as_array().unwrap().iter().map(|x| x.as_u64().unwrap()))
        .sum()
}

struct Fixture {
    dir: TempDir,
}

impl Fixture {
    fn new() -> Self {
        let dir = TempDir::new().unwrap();
        std::fs::write(dir.path().join("p4.txt"), "0 1\n1 2\n2 3\n").unwrap();
        std::fs::write(dir.path().join("p4.parts"), "0\n0\n1\n1\n").unwrap();
        Fixture { dir }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn p(&self, name: &str) -> String {
        self.path(name).to_string_lossy().into_owned()
    }
}

#[test]
fn bfs_p4_two_partitions() {
    let f = Fixture::new();
    let parts = format!("file:{}", f.p("p4.parts"));
    let results = f.p("labels.txt");
    let o = run(&[
        "run", "--primitive", "bfs", "--graph", &f.p("p4.txt"), "--parts", "2", "--partitioner", &parts,
        "--source", "0", "--repeat", "1", "--results", &results,
    ]);
    let v = json(&o);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["S"], 4);
    assert_eq!(h_total(&v), 2);
    assert_eq!(std::fs::read_to_string(&results).unwrap(), "0 0\n1 1\n2 2\n3 3\n");
}

#[test]
fn one_partition_sends_nothing() {
    let f = Fixture::new();
    for prim in ["bfs", "dobfs", "sssp", "cc", "bc", "pr"] {
        let v = json(&run(&["run", "--primitive", prim, "--graph", &f.p("p4.txt"), "--parts", "1", "--repeat", "1"]));
        assert_eq!(h_total(&v), 0, "{prim}");
    }
}

#[test]
fn pagerank_single_iteration() {
    let v = json(&run(&["run", "--primitive", "pr", "--rmat", "8,8", "--parts", "3", "--max-iter", "1", "--repeat", "1"]));
    assert_eq!(v["S"], 1);
}

#[test]
fn multiple_sources_give_one_report_each() {
    let o = run(&["run", "--primitive", "bc", "--rmat", "7,4", "--parts", "2", "--sources", "3", "--repeat", "1"]);
    let v = json(&o);
    assert_eq!(v.as_array().unwrap().len(), 3);
}

#[test]
fn validate_passes_on_rmat() {
    let o = run(&["validate", "--primitive", "bfs", "--rmat", "12,16", "--parts", "4"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).ends_with("pass\n"));
    let o = run(&["validate", "--primitive", "bc", "--rmat", "10,16", "--parts", "3", "--source", "3"]);
    assert!(o.status.success(), "{}", stdout(&o));
}

#[test]
fn validate_every_primitive() {
    for prim in ["dobfs", "sssp", "cc", "pr"] {
        let o = run(&["validate", "--primitive", prim, "--rmat", "9,8", "--parts", "3", "--partitioner", "biased:0.5"]);
        assert!(o.status.success(), "{prim}: {}", stdout(&o));
    }
}

#[test]
fn injected_fault_is_reported() {
    let f = Fixture::new();
    let parts = format!("file:{}", f.p("p4.parts"));
    let o = run(&[
        "validate", "--primitive", "bfs", "--graph", &f.p("p4.txt"), "--parts", "2", "--partitioner", &parts,
        "--inject-fault",
    ]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    assert!(text.contains("vertex 2: got inf, expected 2"), "{text}");
}

fn csv_rows(text: &str) -> Vec<csv::StringRecord> {
    csv::Reader::from_reader(text.as_bytes()).records().map(Result::unwrap).collect()
}

#[test]
fn bench_scaling_sweep() {
    let o = run(&["bench", "--rmat", "10,8", "--primitives", "pr", "--parts", "1,2,4", "--repeat", "1"]);
    assert!(o.status.success());
    assert_eq!(csv_rows(&stdout(&o)).len(), 3);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("speedup n=4 vs n=1"), "{err}");
}

#[test]
fn bench_memory_sweep() {
    let o = run(&[
        "bench", "--rmat", "10,8", "--primitives", "bfs", "--parts", "2", "--alloc", "just,fixed,max,fused", "--repeat",
        "1",
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let headers = rdr.headers().unwrap().clone();
    let col = |name: &str| headers.iter().position(|h| h == name).unwrap();
    let rows: Vec<_> = rdr.records().map(Result::unwrap).collect();
    let peak = |policy: &str| -> u64 {
        rows.iter().find(|r| &r[col("policy")] == policy).unwrap()[col("peak_bytes")].parse().unwrap()
    };
    assert!(peak("just") <= peak("max"));
    for r in &rows {
        if &r[col("policy")] == "fixed" || &r[col("policy")] == "fused" {
            assert_eq!(&r[col("reallocs")], "0");
        }
    }
}

#[test]
fn bench_partitioner_sweep() {
    let f = Fixture::new();
    let a = f.p("rmat.parts");
    let o = run(&["partition", "--rmat", "10,8", "--parts", "4", "--out", &a]);
    assert!(o.status.success());
    let spec = format!("random,biased:1.0,file:{a}");
    let o = run(&["bench", "--rmat", "10,8", "--primitives", "bfs", "--parts", "4", "--partitioner", &spec, "--repeat", "1"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(csv_rows(&stdout(&o)).len(), 3);
}

fn model(args: &[&str]) -> Output {
    let mut all = vec!["model", "--repeat", "1", "--microbench", "10,20,40"];
    all.extend_from_slice(args);
    run(&all)
}

#[test]
fn model_has_no_violations_on_fixtures() {
    for prim in ["bfs", "dobfs", "pr", "bc"] {
        let o = model(&["--primitive", prim, "--rmat", "9,8", "--parts", "3"]);
        let v = json(&o);
        assert_eq!(v["violations"].as_array().unwrap().len(), 0, "{prim}");
        assert!(v["g"].as_f64().unwrap() >= 0.0);
    }
}

#[test]
fn model_flags_tampered_stats() {
    let f = Fixture::new();
    let parts = format!("file:{}", f.p("p4.parts"));
    let stats = f.path("stats.json");
    let common = ["--graph", &f.p("p4.txt"), "--parts", "2", "--partitioner", &parts];
    let mut args = vec!["run", "--primitive", "bfs", "--repeat", "1", "--out", stats.to_str().unwrap()];
    args.extend_from_slice(&common);
    assert!(run(&args).status.success());

    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(&stats).unwrap()).unwrap();
    let clean = f.path("clean.json");
    std::fs::write(&clean, v.to_string()).unwrap();
    v["H"][0][1] = Value::from(50);
    let bad = f.path("bad.json");
    std::fs::write(&bad, v.to_string()).unwrap();

    let check = |file: &Path| {
        let mut a = vec!["--primitive", "bfs", "--from-stats", file.to_str().unwrap()];
        a.extend_from_slice(&common);
        model(&a)
    };
    assert!(check(&clean).status.success());
    let o = check(&bad);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("violation"));
}

#[test]
fn sizing_factors_round_trip() {
    let f = Fixture::new();
    let sizing = f.p("sizing.json");
    let base = ["run", "--primitive", "bfs", "--rmat", "10,8", "--parts", "3", "--repeat", "1"];
    let mut a = base.to_vec();
    a.extend_from_slice(&["--emit-sizing", &sizing]);
    let first = json(&run(&a));
    assert!(first["reallocs"].as_u64().unwrap() > 0);
    let mut b = base.to_vec();
    b.extend_from_slice(&["--prealloc-from", &sizing]);
    let second = json(&run(&b));
    assert_eq!(second["reallocs"], 0);
    assert_eq!(second["policy"], "fixed");
}

#[test]
fn generate_is_deterministic() {
    let a = run(&["generate", "--rmat", "6,4", "--seed", "3"]);
    let b = run(&["generate", "--rmat", "6,4", "--seed", "3"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let c = run(&["generate", "--rmat", "6,4", "--seed", "4"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn partition_reports_borders() {
    let f = Fixture::new();
    let parts = format!("file:{}", f.p("p4.parts"));
    let v = json(&run(&["partition", "--graph", &f.p("p4.txt"), "--parts", "2", "--partitioner", &parts]));
    assert_eq!(v["border"], serde_json::json!([1, 1]));
    assert_eq!(v["edge_cut"], 1);
}

#[test]
fn bad_input_is_an_error() {
    let f = Fixture::new();
    let o = run(&["run", "--primitive", "cc", "--graph", &f.p("p4.txt"), "--comm", "selective", "--repeat", "1"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["run", "--primitive", "bfs", "--graph", &f.p("p4.txt"), "--source", "9", "--repeat", "1"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["run", "--primitive", "tc", "--graph", &f.p("p4.txt")]);
    assert!(!o.status.success());
    let o = run(&["run", "--primitive", "cc", "--graph", &f.p("missing.txt"), "--repeat", "1"]);
    assert_eq!(o.status.code(), Some(2));
}
