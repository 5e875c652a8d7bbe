//! Solver dispatch for every subcommand. Each function takes parsed inputs
//! and returns the JSON report; the binary only handles files and exit codes.

use anyhow::{anyhow, bail, Context, Result};
use serde_json::{json, Value};

use lcflow_core::boosting::{solve_mincost, GuessOutcome, MincostConfig, MincostKind, MincostProblem};
use lcflow_core::cover::{build_cover, validate_cover, CoverViolation};
use lcflow_core::cuts::{verify_union_witness, UnionConfig};
use lcflow_core::demand::{Demand, SourceSinkPair};
use lcflow_core::flow::{flow_stats, MultiFlow};
use lcflow_core::graph::{Graph, Mode};
use lcflow_core::lowstep::{approx_mtl_flow, lowstep_directed, lowstep_undirected, LowStepConfig, Tau};
use lcflow_core::maxflow::mwu::{lc_mc_maxflow, MwuConfig};
use lcflow_core::num::{parse_rat, Rational};
use lcflow_core::oracle::{exact_concurrent_lambda, exact_lc_maxflow, exact_mincost, exact_nonconcurrent_value};

use crate::format::GraphFile;
use crate::json::{self, rat, WitnessBundle};

/// Seed used when neither `--seed` nor `LCFLOW_SEED` is given.
pub const DEFAULT_SEED: u64 = 0;

/// `LCFLOW_SEED` wins over the flag; the flag wins over the default.
pub fn resolve_seed(flag: Option<u64>, env: Option<&str>) -> Result<u64> {
    match env {
        Some(s) => s.trim().parse().with_context(|| format!("LCFLOW_SEED is not an unsigned integer: {s:?}")),
        None => Ok(flag.unwrap_or(DEFAULT_SEED)),
    }
}

pub fn parse_rational_arg(s: &str) -> Result<Rational> {
    parse_rat(s).ok_or_else(|| anyhow!("not a rational number: {s:?}"))
}

/// `inf` (or `none`) means no budget.
pub fn parse_budget(s: Option<&str>) -> Result<Option<Rational>> {
    match s {
        None | Some("inf") | Some("none") => Ok(None),
        Some(x) => parse_rational_arg(x).map(Some),
    }
}

fn core_err(e: lcflow_core::Error) -> anyhow::Error {
    anyhow!("{e}")
}

pub fn tau_value(tau: Tau, d: &Demand) -> Result<Rational> {
    match tau {
        Tau::One => Ok(Rational::from_integer(1.into())),
        Tau::Full => d.size().ok_or_else(|| anyhow!("tau=full needs a finite demand")),
    }
}

pub fn lcmaxflow(g: &Graph, pairs: &[SourceSinkPair], h: u64, eps: &Rational) -> Result<Value> {
    let r = lc_mc_maxflow(g, pairs, h, eps, &MwuConfig::default()).map_err(core_err)?;
    let stats = flow_stats(g, &MultiFlow::Path(r.flow.clone()));
    let phases: Vec<Value> = r
        .phases
        .iter()
        .map(|p| json!({"lambda": rat(&p.lambda), "lightest": rat(&p.lightest), "iterations": p.iterations, "over_budget": p.over_budget}))
        .collect();
    Ok(json!({
        "command": "lcmaxflow",
        "h": h,
        "eps": rat(eps),
        "flow": json::path_flow(&r.flow),
        "stats": json::stats(&stats),
        "cut": json::rats(&r.cut),
        "certificate": json::certificate(&r.certificate),
        "phases": phases,
    }))
}

pub fn lowstep(g: &Graph, d: &Demand, t: usize, tau: Tau, eps: &Rational) -> Result<Value> {
    let cfg = LowStepConfig::new(t, tau, eps.clone());
    let r = match g.mode() {
        Mode::EdgeDirected => lowstep_directed(g, d, &cfg),
        Mode::VertexUndirected => lowstep_undirected(g, d, &cfg),
    }
    .map_err(core_err)?;
    let stats = flow_stats(g, &MultiFlow::Path(r.flow.clone()));
    let buckets: Vec<Value> = r
        .buckets
        .iter()
        .map(|b| {
            json!({
                "p": b.p,
                "h_p": rat(&b.h_p),
                "rounds": b.rounds,
                "value_gained": rat(&b.value_gained),
                "totlen_gained": rat(&b.totlen_gained),
            })
        })
        .collect();
    Ok(json!({
        "command": "lowstep",
        "t": t,
        "tau": tau_name(tau),
        "eps": rat(eps),
        "flow": json::path_flow(&r.flow),
        "stats": json::stats(&stats),
        "buckets": buckets,
        "mu": r.mu,
        "maxflow_calls": r.maxflow_calls,
    }))
}

pub fn tau_name(t: Tau) -> &'static str {
    match t {
        Tau::One => "one",
        Tau::Full => "full",
    }
}

pub fn mtl(g: &Graph, d: &Demand, tau: Tau, eps: &Rational) -> Result<Value> {
    let f = approx_mtl_flow(g, d, tau, eps, 1).map_err(core_err)?;
    let stats = flow_stats(g, &MultiFlow::Edge(f.clone()));
    Ok(json!({
        "command": "mtl",
        "tau": tau_name(tau),
        "eps": rat(eps),
        "flow": json::edge_flow(&f),
        "stats": json::stats(&stats),
    }))
}

/// Source/sink pairs of single-vertex commodities, as needed by the
/// non-concurrent problem.
pub fn single_pairs(pairs: &[SourceSinkPair]) -> Result<Vec<(usize, usize)>> {
    pairs
        .iter()
        .enumerate()
        .map(|(i, p)| match (p.sources.as_slice(), p.sinks.as_slice()) {
            ([s], [t]) => Ok((*s, *t)),
            _ => bail!("commodity {} must have exactly one source and one sink", i + 1),
        })
        .collect()
}

pub fn mincost(gf: &GraphFile, kind: MincostKind, budget: Option<Rational>, eps: &Rational) -> Result<Value> {
    let name = match kind {
        MincostKind::Concurrent(_) => "mincost-concurrent",
        MincostKind::NonConcurrent(_) => "mincost-nonconcurrent",
    };
    let problem = MincostProblem { graph: gf.graph.clone(), costs: gf.costs.clone(), budget: budget.clone(), kind };
    let sol = solve_mincost(&problem, &MincostConfig::new(eps.clone())).map_err(core_err)?;
    let stats = flow_stats(&gf.graph, &MultiFlow::Edge(sol.flow.clone()));
    let mut iterations = 0;
    let guesses: Vec<Value> = sol
        .guesses
        .iter()
        .map(|g| {
            let outcome = match &g.outcome {
                GuessOutcome::Pruned => json!({"status": "pruned"}),
                GuessOutcome::PremiseFailed => json!({"status": "premise-failed"}),
                GuessOutcome::Finished { lambda, iterations: it, oracle_calls, capped } => {
                    iterations += it;
                    json!({"status": "finished", "lambda": rat(lambda), "iterations": it, "oracle_calls": oracle_calls, "capped": capped})
                }
            };
            json!({"exponent": g.exponent, "outcome": outcome})
        })
        .collect();
    Ok(json!({
        "command": name,
        "eps": rat(eps),
        "budget": budget.as_ref().map(rat),
        "lambda": rat(&sol.lambda),
        "cost": rat(&sol.cost),
        "flow": json::edge_flow(&sol.flow),
        "stats": json::stats(&stats),
        "iterations": iterations,
        "oracle_calls": sol.oracle_calls,
        "eps_oracle": rat(&sol.eps_oracle),
        "best_exponent": sol.best_exponent,
        "guesses": guesses,
    }))
}

fn violation(v: &CoverViolation) -> Value {
    match v {
        CoverViolation::Overlap { clustering, vertex } => {
            json!({"kind": "overlap", "clustering": clustering + 1, "vertex": vertex + 1})
        }
        CoverViolation::Diameter { clustering, cluster, u, v, distance } => json!({
            "kind": "diameter", "clustering": clustering + 1, "cluster": cluster + 1,
            "pair": [u + 1, v + 1], "distance": distance,
        }),
        CoverViolation::Uncovered { vertex } => json!({"kind": "uncovered", "vertex": vertex + 1}),
    }
}

/// Builds and validates a cover; the report carries the validation result.
pub fn cover(g: &Graph, h_cov: u64, beta: &Rational, seed: u64) -> Result<(Value, bool)> {
    let c = build_cover(g, h_cov, beta, seed).map_err(core_err)?;
    let check = validate_cover(g, &c);
    let mut v = json::cover(&c, beta, seed);
    v["command"] = json!("cover");
    v["valid"] = json!(check.is_ok());
    v["violation"] = check.as_ref().err().map(violation).unwrap_or(Value::Null);
    Ok((v, check.is_ok()))
}

pub fn verify_union(g: &Graph, b: &WitnessBundle, c: u32) -> Result<(Value, bool)> {
    let r = verify_union_witness(g, &b.node_weighting, &b.witness, b.h, b.s, UnionConfig { c }).map_err(core_err)?;
    let mut v = json::union_report(&r);
    v["command"] = json!("cuts verify-union");
    v["h"] = json!(b.h);
    v["s"] = json!(b.s);
    v["c"] = json!(c);
    Ok((v, r.all_passed()))
}

pub fn oracle_lcmaxflow(g: &Graph, pairs: &[SourceSinkPair], h: Option<u64>) -> Result<Value> {
    let (opt, f) = exact_lc_maxflow(g, pairs, h).map_err(core_err)?;
    Ok(json!({"command": "oracle lcmaxflow", "h": h, "opt": rat(&opt), "flow": json::path_flow(&f)}))
}

/// Exact minimum total length of a value-`tau` flow with at most `t` steps.
pub fn oracle_mincost(g: &Graph, d: &Demand, tau: Tau, t: Option<usize>) -> Result<Value> {
    let target = tau_value(tau, d)?;
    let r = exact_mincost(g, d, &target, t).map_err(core_err)?;
    Ok(match r {
        Some((opt, f)) => json!({
            "command": "oracle mincost", "tau": tau_name(tau), "t": t, "feasible": true,
            "totlen": rat(&opt), "flow": json::path_flow(&f),
        }),
        None => json!({"command": "oracle mincost", "tau": tau_name(tau), "t": t, "feasible": false}),
    })
}

pub fn oracle_concurrent(gf: &GraphFile, d: &Demand, budget: Option<&Rational>) -> Result<Value> {
    let lam = exact_concurrent_lambda(&gf.graph, &gf.costs, d, budget).map_err(core_err)?;
    Ok(json!({"command": "oracle mincost-concurrent", "budget": budget.map(rat), "lambda": rat(&lam)}))
}

pub fn oracle_nonconcurrent(gf: &GraphFile, pairs: &[(usize, usize)], budget: Option<&Rational>) -> Result<Value> {
    let val = exact_nonconcurrent_value(&gf.graph, &gf.costs, pairs, budget).map_err(core_err)?;
    Ok(json!({"command": "oracle mincost-nonconcurrent", "budget": budget.map(rat), "lambda": rat(&val)}))
}
