//! Exponential-time reference solvers for small instances.

pub mod lp;

use alloc::vec;
use alloc::vec::Vec;
use num_traits::{One, Signed, Zero};

use crate::demand::{Demand, SourceSinkPair};
use crate::error::{Error, Result};
use crate::flow::PathFlow;
use crate::graph::Graph;
use crate::num::{uint, Rational};
use lp::{maximize, Lp, LpOutcome, Sense};

pub const ENUMERATION_GATE: usize = 14;

/// All simple paths from a source to a sink within the length and step
/// bounds, in DFS order.
pub fn enumerate_paths(
    g: &Graph,
    sources: &[usize],
    sinks: &[usize],
    max_len: Option<u64>,
    max_step: Option<usize>,
) -> Result<Vec<Vec<usize>>> {
    if g.n() > ENUMERATION_GATE {
        return Err(Error::OracleBoundExceeded { size: g.n(), limit: ENUMERATION_GATE });
    }
    let mut is_sink = vec![false; g.n()];
    for &t in sinks {
        is_sink[t] = true;
    }
    let mut out = Vec::new();
    let mut srcs = sources.to_vec();
    srcs.sort_unstable();
    srcs.dedup();
    for s in srcs {
        let mut on = vec![false; g.n()];
        let mut path = vec![s];
        on[s] = true;
        dfs(g, &is_sink, max_len, max_step, g.start_len(s), &mut path, &mut on, &mut out);
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn dfs(
    g: &Graph,
    is_sink: &[bool],
    max_len: Option<u64>,
    max_step: Option<usize>,
    len: u64,
    path: &mut Vec<usize>,
    on: &mut [bool],
    out: &mut Vec<Vec<usize>>,
) {
    if max_len.map_or(false, |h| len > h) {
        return;
    }
    let v = *path.last().unwrap();
    if path.len() > 1 && is_sink[v] {
        out.push(path.clone());
    }
    if max_step.map_or(false, |t| path.len() > t) {
        return;
    }
    for &a in g.out_arcs(v) {
        let w = g.arcs()[a].head;
        if on[w] {
            continue;
        }
        on[w] = true;
        path.push(w);
        dfs(g, is_sink, max_len, max_step, len + g.arc_len(a), path, on, out);
        path.pop();
        on[w] = false;
    }
}

struct PathVars {
    commodity: Vec<usize>,
    paths: Vec<Vec<usize>>,
    resources: Vec<Vec<usize>>,
}

fn collect(g: &Graph, pairs: &[SourceSinkPair], max_len: Option<u64>, max_step: Option<usize>) -> Result<PathVars> {
    let mut pv = PathVars { commodity: Vec::new(), paths: Vec::new(), resources: Vec::new() };
    for (i, p) in pairs.iter().enumerate() {
        for path in enumerate_paths(g, &p.sources, &p.sinks, max_len, max_step)? {
            pv.resources.push(g.path_resources(&path).expect("enumerated path"));
            pv.paths.push(path);
            pv.commodity.push(i);
        }
    }
    Ok(pv)
}

fn capacity_rows(g: &Graph, lp: &mut Lp, pv: &PathVars) {
    let mut per_res: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); g.resource_count()];
    for (j, rs) in pv.resources.iter().enumerate() {
        for &r in rs {
            per_res[r].push((j, Rational::one()));
        }
    }
    for (r, coeffs) in per_res.into_iter().enumerate() {
        if !coeffs.is_empty() {
            lp.add_row(coeffs, Sense::Le, uint(g.resource_cap(r)));
        }
    }
}

fn to_flow(k: usize, pv: &PathVars, x: &[Rational]) -> PathFlow {
    let mut f = PathFlow::empty(k);
    for (j, v) in x.iter().enumerate().take(pv.paths.len()) {
        if v.is_positive() {
            f.push(pv.commodity[j], pv.paths[j].clone(), v.clone());
        }
    }
    f
}

/// Maximum h-length multi-commodity flow.
pub fn exact_lc_maxflow(g: &Graph, pairs: &[SourceSinkPair], h: Option<u64>) -> Result<(Rational, PathFlow)> {
    let pv = collect(g, pairs, h, None)?;
    let mut lp = Lp::new(pv.paths.len());
    lp.objective = vec![Rational::one(); pv.paths.len()];
    capacity_rows(g, &mut lp, &pv);
    match maximize(&lp) {
        LpOutcome::Optimal { value, x } => Ok((value, to_flow(pairs.len(), &pv, &x))),
        _ => Err(Error::Infeasible),
    }
}

/// Minimum total length of a feasible flow of value `tau` partially routing
/// `d` over paths of at most `max_step` edges. `None` if no such flow exists.
pub fn exact_mincost(
    g: &Graph,
    d: &Demand,
    tau: &Rational,
    max_step: Option<usize>,
) -> Result<Option<(Rational, PathFlow)>> {
    let pv = collect(g, &d.source_sink_pairs(), None, max_step)?;
    let np = pv.paths.len();
    let mut lp = Lp::new(np);
    for j in 0..np {
        let len = pv.resources[j].iter().map(|&r| g.resource_len(r)).sum::<u64>();
        lp.objective[j] = -uint(len);
    }
    capacity_rows(g, &mut lp, &pv);
    for i in 0..d.k() {
        if let Some(v) = d.value(i) {
            let coeffs: Vec<_> = (0..np).filter(|&j| pv.commodity[j] == i).map(|j| (j, Rational::one())).collect();
            lp.add_row(coeffs, Sense::Le, v.clone());
        }
    }
    lp.add_row((0..np).map(|j| (j, Rational::one())).collect(), Sense::Eq, tau.clone());
    match maximize(&lp) {
        LpOutcome::Optimal { value, x } => Ok(Some((-value, to_flow(d.k(), &pv, &x)))),
        LpOutcome::Infeasible => Ok(None),
        LpOutcome::Unbounded => Err(Error::Infeasible),
    }
}

fn path_cost(pv: &PathVars, j: usize, costs: &[u64]) -> Rational {
    uint(pv.resources[j].iter().map(|&r| costs[r]).sum())
}

/// Largest `lambda` such that `lambda * d` is routable within capacities and
/// with total cost at most `budget`.
pub fn exact_concurrent_lambda(g: &Graph, costs: &[u64], d: &Demand, budget: Option<&Rational>) -> Result<Rational> {
    let pv = collect(g, &d.source_sink_pairs(), None, None)?;
    let np = pv.paths.len();
    let lam = np;
    let mut lp = Lp::new(np + 1);
    lp.objective[lam] = Rational::one();
    capacity_rows(g, &mut lp, &pv);
    if let Some(b) = budget {
        lp.add_row((0..np).map(|j| (j, path_cost(&pv, j, costs))).collect(), Sense::Le, b.clone());
    }
    for i in 0..d.k() {
        let v = d.value(i).ok_or_else(|| Error::InvalidDemand("concurrent demand must be finite".into()))?;
        let mut coeffs: Vec<_> = (0..np).filter(|&j| pv.commodity[j] == i).map(|j| (j, Rational::one())).collect();
        coeffs.push((lam, -v.clone()));
        lp.add_row(coeffs, Sense::Eq, Rational::zero());
    }
    match maximize(&lp) {
        LpOutcome::Optimal { value, .. } => Ok(value),
        _ => Err(Error::Infeasible),
    }
}

/// Largest total value routable between the given pairs within capacities
/// and budget.
pub fn exact_nonconcurrent_value(
    g: &Graph,
    costs: &[u64],
    pairs: &[(usize, usize)],
    budget: Option<&Rational>,
) -> Result<Rational> {
    let sp: Vec<_> = pairs.iter().map(|&(s, t)| SourceSinkPair::single(s, t)).collect();
    let pv = collect(g, &sp, None, None)?;
    let np = pv.paths.len();
    let mut lp = Lp::new(np);
    lp.objective = vec![Rational::one(); np];
    capacity_rows(g, &mut lp, &pv);
    if let Some(b) = budget {
        lp.add_row((0..np).map(|j| (j, path_cost(&pv, j, costs))).collect(), Sense::Le, b.clone());
    }
    match maximize(&lp) {
        LpOutcome::Optimal { value, .. } => Ok(value),
        _ => Err(Error::Infeasible),
    }
}

/// Number of `h`-length walks-that-are-paths counted independently by a
/// memoized search over (vertex, visited set, length); used to cross-check
/// the enumerator.
pub fn count_paths_dp(g: &Graph, s: usize, t: usize, max_len: Option<u64>) -> u64 {
    fn go(g: &Graph, v: usize, t: usize, seen: u32, len: u64, max_len: Option<u64>) -> u64 {
        if max_len.map_or(false, |h| len > h) {
            return 0;
        }
        let mut c = u64::from(v == t);
        for &a in g.out_arcs(v) {
            let w = g.arcs()[a].head;
            if seen & (1 << w) == 0 {
                c += go(g, w, t, seen | (1 << w), len + g.arc_len(a), max_len);
            }
        }
        c
    }
    if s == t {
        return 0;
    }
    go(g, s, t, 1 << s, g.start_len(s), max_len)
}

pub fn is_zero_flow(f: &PathFlow) -> bool {
    f.value().is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Edge;
    use crate::num::int;

    pub fn two_path() -> Graph {
        let e = |t, h| Edge { tail: t, head: h, len: 1, cap: 1 };
        Graph::edge_weighted(4, vec![e(0, 1), e(1, 3), e(0, 2), e(2, 3)]).unwrap()
    }

    #[test]
    fn two_path_enumeration() {
        let g = two_path();
        assert_eq!(enumerate_paths(&g, &[0], &[3], Some(2), None).unwrap().len(), 2);
        assert_eq!(enumerate_paths(&g, &[0], &[3], Some(1), None).unwrap().len(), 0);
    }

    #[test]
    fn two_path_maxflow() {
        let g = two_path();
        let (v, f) = exact_lc_maxflow(&g, &[SourceSinkPair::single(0, 3)], Some(2)).unwrap();
        assert_eq!(v, int(2));
        assert_eq!(f.value(), int(2));
    }

    #[test]
    fn shared_bottleneck() {
        let e = |t, h| Edge { tail: t, head: h, len: 1, cap: 1 };
        let g = Graph::edge_weighted(4, vec![e(0, 2), e(1, 2), e(2, 3)]).unwrap();
        let pairs = [SourceSinkPair { sources: vec![0, 1], sinks: vec![3] }];
        assert_eq!(exact_lc_maxflow(&g, &pairs, None).unwrap().0, int(1));
    }

    #[test]
    fn cost_split_mincost_is_five() {
        let g = Graph::edge_weighted(
            3,
            vec![
                Edge { tail: 0, head: 2, len: 3, cap: 1 },
                Edge { tail: 0, head: 1, len: 1, cap: 1 },
                Edge { tail: 1, head: 2, len: 1, cap: 1 },
            ],
        )
        .unwrap();
        let d = Demand::finite(&[(0, 2, int(2))]).unwrap();
        let (cost, f) = exact_mincost(&g, &d, &int(2), Some(2)).unwrap().unwrap();
        assert_eq!(cost, int(5));
        assert_eq!(f.value(), int(2));
        assert_eq!(exact_mincost(&g, &d, &int(1), Some(1)).unwrap().unwrap().0, int(3));
        assert_eq!(exact_mincost(&g, &d, &int(3), Some(2)).unwrap(), None);
    }

    #[test]
    fn budget_binding_lambda() {
        // Cheap path capacity 1 (cost 1), expensive path capacity 1 (cost 5),
        // budget 3: route 1 cheap + 2/5 expensive = 7/5.
        let g = Graph::vertex_weighted(vec![1; 4], vec![10, 1, 1, 10], &[(0, 1), (1, 3), (0, 2), (2, 3)]).unwrap();
        let costs = [0, 1, 5, 0];
        let v = exact_nonconcurrent_value(&g, &costs, &[(0, 3)], Some(&int(3))).unwrap();
        assert_eq!(v, crate::num::ratio(7, 5));
        let d = Demand::finite(&[(0, 3, int(1))]).unwrap();
        assert_eq!(exact_concurrent_lambda(&g, &costs, &d, Some(&int(3))).unwrap(), crate::num::ratio(7, 5));
        assert_eq!(exact_concurrent_lambda(&g, &costs, &d, None).unwrap(), int(2));
    }

    #[test]
    fn gate_enforced() {
        let g = Graph::vertex_weighted(vec![1; 15], vec![1; 15], &[]).unwrap();
        assert!(matches!(
            enumerate_paths(&g, &[0], &[1], None, None),
            Err(Error::OracleBoundExceeded { .. })
        ));
    }
}
