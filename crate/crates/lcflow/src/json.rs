//! JSON encodings of flows, reports, covers and witness bundles.
//!
//! Rationals are always strings of the form `p/q` (integers as `p/1`).
//! Vertex ids are 1-based, matching the text formats. Objects are built with
//! `serde_json::Value`, whose maps are key-sorted, so the output is
//! byte-for-byte deterministic.

use std::collections::BTreeMap;

use anyhow::{anyhow, bail, Context, Result};
use num_traits::ToPrimitive;
use serde_json::{json, Map, Value};

use lcflow_core::cover::NeighborhoodCover;
use lcflow_core::cuts::{Assertion, CutSequenceWitness, MovingCut, UnionReport, Witness, WitnessCheck};
use lcflow_core::demand::{NodeWeighting, PairDemand};
use lcflow_core::flow::{EdgeFlow, FlowStats, PathFlow};
use lcflow_core::maxflow::mwu::Certificate;
use lcflow_core::num::{parse_rat, Rational};

pub fn rat(r: &Rational) -> Value {
    Value::String(format!("{}/{}", r.numer(), r.denom()))
}

pub fn rats(rs: &[Rational]) -> Value {
    Value::Array(rs.iter().map(rat).collect())
}

pub fn to_rat(v: &Value) -> Result<Rational> {
    match v {
        Value::String(s) => parse_rat(s).ok_or_else(|| anyhow!("not a rational: {s:?}")),
        Value::Number(n) if n.is_i64() => Ok(Rational::from_integer(n.as_i64().unwrap().into())),
        other => bail!("expected a `p/q` string, got {other}"),
    }
}

fn to_u64(v: &Value, what: &str) -> Result<u64> {
    v.as_u64().ok_or_else(|| anyhow!("{what} must be a nonnegative integer, got {v}"))
}

fn to_vertex(v: &Value, n: usize) -> Result<usize> {
    let x = to_u64(v, "vertex id")? as usize;
    if x == 0 || x > n {
        bail!("vertex id {x} outside 1..={n}");
    }
    Ok(x - 1)
}

fn field<'a>(obj: &'a Value, key: &str) -> Result<&'a Value> {
    obj.get(key).ok_or_else(|| anyhow!("missing field `{key}`"))
}

fn ids(vs: &[usize]) -> Value {
    Value::Array(vs.iter().map(|v| json!(v + 1)).collect())
}

pub fn path_flow(f: &PathFlow) -> Value {
    let paths: Vec<Value> = f
        .paths
        .iter()
        .map(|p| json!({"commodity": p.commodity + 1, "vertices": ids(&p.vertices), "value": rat(&p.value)}))
        .collect();
    json!({"k": f.k, "paths": paths})
}

pub fn edge_flow(f: &EdgeFlow) -> Value {
    let comms: Vec<Value> = f
        .commodities
        .iter()
        .map(|m| {
            Value::Array(
                m.iter().map(|(&(u, v), x)| json!({"arc": [u + 1, v + 1], "value": rat(x)})).collect(),
            )
        })
        .collect();
    json!({"k": f.k(), "commodities": comms})
}

pub fn stats(s: &FlowStats) -> Value {
    json!({
        "value": rat(&s.value),
        "congestion": rat(&s.congestion),
        "length": s.length,
        "step": s.step,
        "totlen": rat(&s.totlen),
    })
}

pub fn certificate(c: &Certificate) -> Value {
    json!({
        "value": rat(&c.value),
        "w_best": rat(&c.dual),
        "gap_ratio": c.ratio.as_ref().map(rat),
        "iterations": c.iterations,
        "phases": c.phases,
        "eps_internal": rat(&c.eps_internal),
        "met": c.met,
    })
}

pub fn cover(c: &NeighborhoodCover, beta: &Rational, seed: u64) -> Value {
    let cl: Vec<Value> =
        c.clusterings.iter().map(|cs| Value::Array(cs.iter().map(|x| ids(x)).collect())).collect();
    json!({
        "h_cov": c.h_cov,
        "h_diam": rat(&c.h_diam),
        "beta": rat(beta),
        "seed": seed,
        "width": c.width(),
        "clusterings": cl,
    })
}

pub fn parse_cover(v: &Value, n: usize) -> Result<NeighborhoodCover> {
    let h_cov = to_u64(field(v, "h_cov")?, "h_cov")?;
    let h_diam = to_rat(field(v, "h_diam")?)?;
    let mut clusterings = Vec::new();
    for cs in field(v, "clusterings")?.as_array().context("clusterings must be a list")? {
        let mut out = Vec::new();
        for cluster in cs.as_array().context("a clustering must be a list of clusters")? {
            let mut ids: Vec<usize> = cluster
                .as_array()
                .context("a cluster must be a list of vertex ids")?
                .iter()
                .map(|x| to_vertex(x, n))
                .collect::<Result<_>>()?;
            ids.sort_unstable();
            out.push(ids);
        }
        clusterings.push(out);
    }
    Ok(NeighborhoodCover { h_cov, h_diam, clusterings })
}

fn cut_json(c: &MovingCut) -> Value {
    let h = Rational::from_integer(c.h().into());
    let vals: Vec<Value> = c
        .values()
        .iter()
        .map(|(v, x)| json!([v + 1, (x * &h).to_integer().to_u64().expect("cut numerators fit in u64")]))
        .collect();
    json!({"h": c.h(), "values": vals})
}

fn parse_cut_json(v: &Value, n: usize) -> Result<MovingCut> {
    let h = to_u64(field(v, "h")?, "cut h")?;
    let mut nums = Vec::new();
    for e in field(v, "values")?.as_array().context("cut values must be a list")? {
        let pair = e.as_array().filter(|p| p.len() == 2).context("cut entry must be [vertex, numerator]")?;
        nums.push((to_vertex(&pair[0], n)?, to_u64(&pair[1], "cut numerator")?));
    }
    MovingCut::from_numerators(h, &nums).map_err(|e| anyhow!("{e}"))
}

pub fn pair_demand(d: &PairDemand) -> Value {
    Value::Array(d.iter().map(|(&(u, v), x)| json!([u + 1, v + 1, rat(x)])).collect())
}

fn parse_pair_demand(v: &Value, n: usize) -> Result<PairDemand> {
    let mut d = BTreeMap::new();
    for e in v.as_array().context("a demand must be a list of [u, v, value]")? {
        let t = e.as_array().filter(|t| t.len() == 3).context("demand entry must be [u, v, value]")?;
        let key = (to_vertex(&t[0], n)?, to_vertex(&t[1], n)?);
        if d.insert(key, to_rat(&t[2])?).is_some() {
            bail!("pair ({}, {}) listed twice", key.0 + 1, key.1 + 1);
        }
    }
    Ok(d)
}

/// Witness bundle together with the parameters it was built for.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessBundle {
    pub h: u64,
    pub s: u64,
    pub node_weighting: NodeWeighting,
    pub witness: CutSequenceWitness,
}

pub fn witness_bundle(b: &WitnessBundle) -> Value {
    json!({
        "h": b.h,
        "s": b.s,
        "node_weighting": rats(&b.node_weighting.0),
        "cuts": b.witness.cuts.iter().map(cut_json).collect::<Vec<_>>(),
        "demands": b.witness.demands.iter().map(pair_demand).collect::<Vec<_>>(),
        "sparsities": rats(&b.witness.sparsities),
    })
}

pub fn parse_witness_bundle(v: &Value, n: usize) -> Result<WitnessBundle> {
    let h = to_u64(field(v, "h")?, "h")?;
    let s = to_u64(field(v, "s")?, "s")?;
    let a: Vec<Rational> = field(v, "node_weighting")?
        .as_array()
        .context("node_weighting must be a list")?
        .iter()
        .map(to_rat)
        .collect::<Result<_>>()?;
    if a.len() != n {
        bail!("node_weighting has {} entries for {n} vertices", a.len());
    }
    let node_weighting = NodeWeighting::new(a).map_err(|e| anyhow!("{e}"))?;
    let list = |key: &str| -> Result<&Vec<Value>> { field(v, key)?.as_array().with_context(|| format!("{key} must be a list")) };
    let cuts = list("cuts")?.iter().map(|c| parse_cut_json(c, n)).collect::<Result<_>>()?;
    let demands = list("demands")?.iter().map(|d| parse_pair_demand(d, n)).collect::<Result<_>>()?;
    let sparsities = list("sparsities")?.iter().map(to_rat).collect::<Result<_>>()?;
    Ok(WitnessBundle { h, s, node_weighting, witness: CutSequenceWitness { cuts, demands, sparsities } })
}

fn witness(w: &Option<Witness>) -> Value {
    match w {
        None => Value::Null,
        Some(Witness::Pair { u, v, distance }) => json!({"pair": [u + 1, v + 1], "distance": distance}),
        Some(Witness::Vertex { v, out, inn, weight }) => {
            json!({"vertex": v + 1, "out": rat(out), "in": rat(inn), "weight": rat(weight)})
        }
    }
}

fn assertion(a: &Assertion) -> Value {
    json!({"passed": a.passed, "witness": witness(&a.witness)})
}

fn precondition(c: &WitnessCheck) -> Value {
    json!({
        "index": c.index + 1,
        "a_respecting": c.a_respecting,
        "too_long": witness(&c.too_long),
        "not_separated": witness(&c.not_separated),
        "cut_size": rat(&c.cut_size),
        "demand_size": rat(&c.demand_size),
        "sparsity_ok": c.sparsity_ok,
    })
}

/// f64 fields are emitted with a fixed 12-digit mantissa so that the text
/// does not depend on shortest-representation formatting.
fn float(x: f64) -> Value {
    Value::String(format!("{x:.12e}"))
}

pub fn union_report(r: &UnionReport) -> Value {
    let spg = json!({
        "ok": r.spg.ok,
        "violation": r.spg.violation.as_ref().map(|v| json!({
            "batch": v.batch + 1,
            "edge": [v.edge.0 + 1, v.edge.1 + 1],
            "distance": v.distance,
        })),
    });
    let mut m = Map::new();
    m.insert("all_passed".into(), json!(r.all_passed()));
    m.insert("preconditions".into(), Value::Array(r.preconditions.iter().map(precondition).collect()));
    m.insert("alpha".into(), json!(r.alpha));
    m.insert("union_cut".into(), cut_json(&r.union_cut));
    m.insert("union_cut_size".into(), rat(&r.union_cut_size));
    m.insert("md".into(), pair_demand(&r.md));
    m.insert("md_size".into(), rat(&r.md_size));
    m.insert("md_size_lemma".into(), json!(r.md_size_lemma));
    m.insert("spg".into(), spg);
    m.insert("two_h_length".into(), assertion(&r.two_h_length));
    m.insert("a_respecting".into(), assertion(&r.a_respecting));
    m.insert("separated".into(), assertion(&r.separated));
    m.insert(
        "size_bound".into(),
        json!({
            "passed": r.size_bound.passed,
            "measured": r.size_bound.measured.as_ref().map(rat),
            "bound": float(r.size_bound.bound),
            "ratio": float(r.size_bound.ratio),
        }),
    );
    Value::Object(m)
}

/// Pretty JSON with a trailing newline.
pub fn render(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values always serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use lcflow_core::num::ratio;

    #[test]
    fn rationals_are_p_over_q() {
        assert_eq!(rat(&ratio(6, 4)), json!("3/2"));
        assert_eq!(rat(&ratio(5, 1)), json!("5/1"));
        assert_eq!(to_rat(&json!("3/2")).unwrap(), ratio(3, 2));
        assert_eq!(to_rat(&json!(7)).unwrap(), ratio(7, 1));
        assert!(to_rat(&json!(0.5)).is_err());
    }

    #[test]
    fn witness_round_trip() {
        let cut = MovingCut::from_numerators(6, &[(1, 3)]).unwrap();
        let mut d = PairDemand::new();
        d.insert((0, 2), ratio(1, 1));
        let b = WitnessBundle {
            h: 2,
            s: 3,
            node_weighting: NodeWeighting::uniform(3, ratio(1, 1)),
            witness: CutSequenceWitness { cuts: vec![cut], demands: vec![d], sparsities: vec![ratio(1, 2)] },
        };
        let v = witness_bundle(&b);
        assert_eq!(parse_witness_bundle(&v, 3).unwrap(), b);
        assert!(parse_witness_bundle(&v, 2).is_err());
    }
}
