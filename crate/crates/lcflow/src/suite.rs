//! Corpus runner: solves every instance of a directory with one command and
//! checks the result against an expected-value sidecar.
//!
//! An instance `NAME` consists of `NAME.lcf` (graph), an input for the
//! command (`NAME.pairs`, `NAME.dem` or `NAME.witness.json`) and the sidecar
//! `NAME.expect.json`. Instances without a sidecar are skipped with a warning.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use serde_json::{json, Value};

use lcflow_core::boosting::MincostKind;
use lcflow_core::graph::Mode;
use lcflow_core::lowstep::Tau;
use lcflow_core::num::Rational;

use crate::commands;
use crate::format::{parse_demand, parse_graph, parse_pairs, GraphFile};
use crate::json::{parse_witness_bundle, to_rat};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SuiteCommand {
    LcMaxflow,
    LowStep,
    MincostConcurrent,
    MincostNonConcurrent,
    Cover,
    VerifyUnion,
}

impl SuiteCommand {
    pub fn name(self) -> &'static str {
        match self {
            SuiteCommand::LcMaxflow => "lcmaxflow",
            SuiteCommand::LowStep => "lowstep",
            SuiteCommand::MincostConcurrent => "mincost-concurrent",
            SuiteCommand::MincostNonConcurrent => "mincost-nonconcurrent",
            SuiteCommand::Cover => "cover",
            SuiteCommand::VerifyUnion => "verify-union",
        }
    }
}

#[derive(Clone, Debug)]
pub struct SuiteOptions {
    pub command: SuiteCommand,
    pub h: u64,
    pub eps: Rational,
    pub t: usize,
    pub tau: Tau,
    pub budget: Option<Rational>,
    pub h_cov: u64,
    pub beta: Rational,
    pub seed: u64,
    pub c: u32,
}

#[derive(Clone, Debug)]
pub struct SuiteOutcome {
    pub report: Value,
    pub failed: usize,
    pub warnings: Vec<String>,
}

enum Status {
    Pass(String),
    Fail(String),
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn with_ext(dir: &Path, name: &str, ext: &str) -> PathBuf {
    dir.join(format!("{name}.{ext}"))
}

fn expected(sidecar: &Value, key: &str) -> Result<Rational> {
    to_rat(sidecar.get(key).ok_or_else(|| anyhow!("sidecar lacks `{key}`"))?)
}

fn field(v: &Value, path: &[&str]) -> Result<Rational> {
    let mut cur = v;
    for k in path {
        cur = cur.get(*k).ok_or_else(|| anyhow!("report lacks `{}`", path.join(".")))?;
    }
    to_rat(cur)
}

fn one() -> Rational {
    Rational::from_integer(1.into())
}

fn pow(x: &Rational, e: u32) -> Rational {
    (0..e).fold(one(), |a, _| a * x)
}

fn verdict(ok: bool, detail: String) -> Status {
    if ok {
        Status::Pass(detail)
    } else {
        Status::Fail(detail)
    }
}

fn run_one(dir: &Path, name: &str, gf: &GraphFile, sidecar: &Value, o: &SuiteOptions) -> Result<Status> {
    let g = &gf.graph;
    let n = g.n();
    let eps = &o.eps;
    Ok(match o.command {
        SuiteCommand::LcMaxflow => {
            let pairs = parse_pairs(&read(&with_ext(dir, name, "pairs"))?, n)?;
            let opt = expected(sidecar, "opt")?;
            let r = commands::lcmaxflow(g, &pairs, o.h, eps)?;
            let value = field(&r, &["stats", "value"])?;
            let dual = field(&r, &["certificate", "w_best"])?;
            let ok = &opt / (one() + eps) <= value && value <= opt && dual <= (one() + eps) * &value;
            verdict(ok, format!("value {value}, opt {opt}, w_best {dual}"))
        }
        SuiteCommand::LowStep => {
            let d = parse_demand(&read(&with_ext(dir, name, "dem"))?, n)?;
            let opt = expected(sidecar, "opt_totlen")?;
            let r = commands::lowstep(g, &d, o.t, o.tau, eps)?;
            let value = field(&r, &["stats", "value"])?;
            let totlen = field(&r, &["stats", "totlen"])?;
            let tau = commands::tau_value(o.tau, &d)?;
            let (want, power) = match g.mode() {
                Mode::EdgeDirected => (tau - Rational::new(1.into(), (n as i64).into()), 4),
                Mode::VertexUndirected => (tau, 5),
            };
            let ok = value == want && totlen <= pow(&(one() + eps), power) * &opt;
            verdict(ok, format!("value {value} (want {want}), totlen {totlen}, opt {opt}"))
        }
        SuiteCommand::MincostConcurrent | SuiteCommand::MincostNonConcurrent => {
            let kind = if o.command == SuiteCommand::MincostConcurrent {
                MincostKind::Concurrent(parse_demand(&read(&with_ext(dir, name, "dem"))?, n)?)
            } else {
                let pairs = parse_pairs(&read(&with_ext(dir, name, "pairs"))?, n)?;
                MincostKind::NonConcurrent(commands::single_pairs(&pairs)?)
            };
            let star = expected(sidecar, "lambda")?;
            let r = commands::mincost(gf, kind, o.budget.clone(), eps)?;
            let lam = field(&r, &["lambda"])?;
            let cost = field(&r, &["cost"])?;
            let cong = field(&r, &["stats", "congestion"])?;
            let lo = (one() - Rational::from_integer(10.into()) * eps) / (one() + eps / Rational::from_integer(100.into())) * &star;
            let within_budget = o.budget.as_ref().map_or(true, |b| cost <= *b);
            let ok = lam >= lo && lam <= star && cong <= one() && within_budget;
            verdict(ok, format!("lambda {lam}, lambda* {star}, cost {cost}, congestion {cong}"))
        }
        SuiteCommand::Cover => {
            let want = sidecar.get("valid").and_then(Value::as_bool).ok_or_else(|| anyhow!("sidecar lacks boolean `valid`"))?;
            let (_, valid) = commands::cover(g, o.h_cov, &o.beta, o.seed)?;
            verdict(valid == want, format!("valid {valid}, expected {want}"))
        }
        SuiteCommand::VerifyUnion => {
            let want = sidecar
                .get("all_passed")
                .and_then(Value::as_bool)
                .ok_or_else(|| anyhow!("sidecar lacks boolean `all_passed`"))?;
            let text = read(&with_ext(dir, name, "witness.json"))?;
            let bundle = parse_witness_bundle(&serde_json::from_str(&text)?, n)?;
            let (_, passed) = commands::verify_union(g, &bundle, o.c)?;
            verdict(passed == want, format!("all_passed {passed}, expected {want}"))
        }
    })
}

/// Instance names (graph files without the `.lcf` suffix), sorted.
pub fn instance_names(dir: &Path) -> Result<Vec<String>> {
    let mut names = Vec::new();
    for entry in fs::read_dir(dir).with_context(|| format!("cannot list {}", dir.display()))? {
        let p = entry?.path();
        if p.extension().and_then(|e| e.to_str()) == Some("lcf") {
            if let Some(stem) = p.file_stem().and_then(|s| s.to_str()) {
                names.push(stem.to_string());
            }
        }
    }
    names.sort();
    Ok(names)
}

pub fn run_suite(dir: &Path, o: &SuiteOptions) -> Result<SuiteOutcome> {
    if !dir.is_dir() {
        bail!("corpus {} is not a directory", dir.display());
    }
    let mut rows = Vec::new();
    let mut warnings = Vec::new();
    let (mut passed, mut failed, mut skipped) = (0usize, 0usize, 0usize);
    for name in instance_names(dir)? {
        let sidecar_path = with_ext(dir, &name, "expect.json");
        if !sidecar_path.exists() {
            warnings.push(format!("warning: {name}: no sidecar {}, skipped", sidecar_path.display()));
            skipped += 1;
            rows.push(json!({"name": name, "status": "skipped", "detail": "missing sidecar"}));
            continue;
        }
        let result = (|| -> Result<Status> {
            let sidecar: Value = serde_json::from_str(&read(&sidecar_path)?).context("sidecar is not valid JSON")?;
            let gf = parse_graph(&read(&with_ext(dir, &name, "lcf"))?)?;
            run_one(dir, &name, &gf, &sidecar, o)
        })();
        let (status, detail) = match result {
            Ok(Status::Pass(d)) => {
                passed += 1;
                ("pass", d)
            }
            Ok(Status::Fail(d)) => {
                failed += 1;
                ("fail", d)
            }
            Err(e) => {
                failed += 1;
                ("fail", format!("error: {e:#}"))
            }
        };
        rows.push(json!({"name": name, "status": status, "detail": detail}));
    }
    let report = json!({
        "command": "suite",
        "suite_command": o.command.name(),
        "instances": rows,
        "summary": {"passed": passed, "failed": failed, "skipped": skipped},
    });
    Ok(SuiteOutcome { report, failed, warnings })
}
