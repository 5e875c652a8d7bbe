use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use lcflow::gen;
use lcflow::json::{render, to_rat, witness_bundle, WitnessBundle};
use lcflow_core::demand::NodeWeighting;
use lcflow_core::graph::Graph;
use lcflow_core::num::int;
use serde_json::Value;

const TWO_PATH: &str = "p lcf 4 4 edge\na 1 2 1 1\na 2 4 1 1\na 1 3 1 1\na 3 4 1 1\n";
const PATH3: &str = "p lcf 3 2 vertex\nv 1 1 1\nv 2 1 1\nv 3 1 1\na 1 2\na 2 3\n";

fn lcflow(args: &[&str], seed: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_lcflow"));
    cmd.args(args).env_remove("LCFLOW_SEED");
    if let Some(s) = seed {
        cmd.env("LCFLOW_SEED", s);
    }
    cmd.output().expect("binary runs")
}

fn json_out(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("bad JSON ({e}): {}", String::from_utf8_lossy(&o.stdout)))
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn empty_corpus_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let o = lcflow(&["suite", "--corpus", dir.path().to_str().unwrap(), "--command", "lcmaxflow"], None);
    assert_eq!(o.status.code(), Some(0));
    let v = json_out(&o);
    assert_eq!(v["instances"], Value::Array(vec![]));
    assert_eq!(v["summary"]["failed"], 0);
}

#[test]
fn suite_passes_skips_and_fails() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    for name in ["b_good", "a_nosidecar", "c_corrupt"] {
        write(d, &format!("{name}.lcf"), TWO_PATH);
        write(d, &format!("{name}.pairs"), "d 1 1 4 inf\n");
    }
    write(d, "b_good.expect.json", r#"{"opt": "2/1"}"#);
    let args = ["suite", "--corpus", d.to_str().unwrap(), "--command", "lcmaxflow", "--h", "2", "--eps", "1/4"];
    let o = lcflow(&args, None);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stderr).contains("a_nosidecar"));
    let v = json_out(&o);
    let names: Vec<&str> = v["instances"].as_array().unwrap().iter().map(|r| r["name"].as_str().unwrap()).collect();
    assert_eq!(names, ["a_nosidecar", "b_good", "c_corrupt"]);
    assert_eq!(v["instances"][0]["status"], "skipped");
    assert_eq!(v["instances"][1]["status"], "pass");
    assert_eq!(v["instances"][2]["status"], "skipped");

    write(d, "c_corrupt.expect.json", r#"{"opt": "3/1"}"#);
    let o = lcflow(&args, None);
    assert_ne!(o.status.code(), Some(0));
    let v = json_out(&o);
    assert_eq!(v["instances"][2]["status"], "fail");
    assert_eq!(v["summary"]["failed"], 1);
}

#[test]
fn parse_errors_cite_lines() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "g.lcf", "p lcf 1 0 vertex\nv 1 0 5\n");
    let o = lcflow(&["cover", "--graph", &g, "--h-cov", "1"], None);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 2") && err.contains("positive"), "{err}");
}

#[test]
fn cover_seed_from_env_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let text = "p lcf 6 6 vertex\n".to_string()
        + &(1..=6).map(|v| format!("v {v} 1 1\n")).collect::<String>()
        + "a 1 2\na 2 3\na 3 4\na 4 5\na 5 6\na 6 1\n";
    let g = write(dir.path(), "ring.lcf", &text);
    let args = ["cover", "--graph", &g, "--h-cov", "2", "--beta", "4", "--seed", "5"];
    let a = lcflow(&args, Some("17"));
    let b = lcflow(&args, Some("17"));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json_out(&a)["seed"], 17);
    let c = lcflow(&args, None);
    assert_eq!(json_out(&c)["seed"], 5);
    let d = lcflow(&args[..7], None);
    assert_eq!(json_out(&d)["seed"], 0);
    assert_eq!(json_out(&d)["valid"], true);
}

#[test]
fn solver_subcommands_emit_rational_json() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let g = write(p, "g.lcf", TWO_PATH);
    let pairs = write(p, "g.pairs", "d 1 1 4 inf\n");
    let dem = write(p, "g.dem", "d 1 1 4 2\n");
    let v = json_out(&lcflow(&["lcmaxflow", "--graph", &g, "--pairs", &pairs, "--h", "2", "--eps", "1/4"], None));
    assert_eq!(v["certificate"]["met"], true);
    assert!(v["stats"]["value"].as_str().unwrap().contains('/'));
    let v = json_out(&lcflow(&["oracle", "lcmaxflow", "--graph", &g, "--pairs", &pairs, "--h", "2"], None));
    assert_eq!(v["opt"], "2/1");
    let v = json_out(&lcflow(&["lowstep", "--graph", &g, "--demand", &dem, "--t", "2", "--tau", "full", "--eps", "1/2"], None));
    assert_eq!(v["stats"]["value"], "7/4");
    assert!(!v["buckets"].as_array().unwrap().is_empty());
    let v = json_out(&lcflow(&["oracle", "lowstep", "--graph", &g, "--demand", &dem, "--t", "2"], None));
    assert_eq!(v["totlen"], "4/1");

    let vg = write(p, "p3.lcf", PATH3);
    let vd = write(p, "p3.dem", "d 1 1 3 1\n");
    let vp = write(p, "p3.pairs", "d 1 1 3 inf\n");
    let v = json_out(&lcflow(&["mtl", "--graph", &vg, "--demand", &vd, "--tau", "one", "--eps", "1/2"], None));
    assert_eq!(v["stats"]["value"], "1/1");
    let v = json_out(&lcflow(&["mincost-concurrent", "--graph", &vg, "--demand", &vd, "--eps", "1/12"], None));
    assert!(to_rat(&v["stats"]["congestion"]).unwrap() <= int(1));
    assert!(to_rat(&v["lambda"]).unwrap() > int(0));
    let o = json_out(&lcflow(&["oracle", "mincost-concurrent", "--graph", &vg, "--demand", &vd], None));
    assert_eq!(o["lambda"], "1/1");
    let v = json_out(&lcflow(&["mincost-nonconcurrent", "--graph", &vg, "--pairs", &vp, "--budget", "3"], None));
    assert!(v["lambda"].is_string() && v["cost"].is_string());
    let o = json_out(&lcflow(&["oracle", "mincost-nonconcurrent", "--graph", &vg, "--pairs", &vp, "--budget", "3"], None));
    assert_eq!(o["lambda"], "1/1");
}

#[test]
fn verify_union_exit_codes() {
    // Two K4 blocks joined by the edge 4-5.
    let mut edges = Vec::new();
    for base in [0, 4] {
        for u in 0..4 {
            for v in u + 1..4 {
                edges.push((base + u, base + v));
            }
        }
    }
    edges.push((3, 4));
    let g = Graph::vertex_weighted(vec![1; 8], vec![1; 8], &edges).unwrap();
    let a = NodeWeighting::uniform(8, int(1));
    let mut r = gen::rng(0);
    let w = (0..200).find_map(|_| gen::cut_witness(&mut r, &g, &a, 4, 3, 2)).expect("some draw separates");
    let bundle = WitnessBundle { h: 4, s: 3, node_weighting: a, witness: w };
    let dir = tempfile::tempdir().unwrap();
    let text = lcflow::format::write_graph(&lcflow::format::GraphFile { graph: g, costs: vec![1; 8] });
    let gp = write(dir.path(), "g.lcf", &text);
    let wp = write(dir.path(), "w.json", &render(&witness_bundle(&bundle)));
    let o = lcflow(&["cuts", "verify-union", "--graph", &gp, "--witness", &wp], None);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    assert_eq!(json_out(&o)["all_passed"], true);

    let mut bad = witness_bundle(&bundle);
    bad["demands"][0] = serde_json::json!([[1, 8, "5/1"]]);
    let wp = write(dir.path(), "bad.json", &render(&bad));
    let o = lcflow(&["cuts", "verify-union", "--graph", &gp, "--witness", &wp], None);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(json_out(&o)["all_passed"], false);
}
