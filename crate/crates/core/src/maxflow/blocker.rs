//! Lightest-path blockers: blocking flows in the expanded DAG projected back
//! to the original graph.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use num_traits::{One, Zero};

use crate::demand::SourceSinkPair;
use crate::error::{Error, Result};
use crate::flow::PathFlow;
use crate::graph::Graph;
use crate::num::{ceil_int, ratio, uint, Rational};

use super::blocking::blocking_flow;
use super::dag::{build_expanded_dag, x_budget, LayeredDag};

#[derive(Clone, Debug)]
pub struct Blocker {
    pub flow: PathFlow,
    /// Copy count of the expanded DAG.
    pub kappa: u64,
    /// Divisor actually applied to the DAG flow (a power of two, at most
    /// the smallest power of two not below `kappa`).
    pub divisor: u64,
    pub dag_nodes: usize,
    pub dag_edges: usize,
    pub blocking_iterations: usize,
}

/// Drops every cycle from a vertex walk.
pub fn remove_cycles(walk: &[usize]) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::with_capacity(walk.len());
    for &v in walk {
        if let Some(p) = out.iter().position(|&x| x == v) {
            out.truncate(p + 1);
        } else {
            out.push(v);
        }
    }
    out
}

/// Splits one commodity of a DAG flow (edge -> units) into source-to-sink
/// node paths.
fn decompose_units(dag: &LayeredDag, i: usize, flow: &BTreeMap<usize, u128>) -> Result<Vec<(Vec<usize>, u128)>> {
    let mut rest: BTreeMap<usize, u128> = flow.iter().filter(|(_, &x)| x > 0).map(|(&e, &x)| (e, x)).collect();
    let mut out_edges: Vec<Vec<usize>> = vec![Vec::new(); dag.n];
    for &e in rest.keys() {
        out_edges[dag.edges[e].tail].push(e);
    }
    let stuck = || Error::ContractViolation("blocking flow is not conserved".into());
    let mut out = Vec::new();
    for &s in &dag.commodities[i].sources {
        loop {
            let first = match out_edges[s].iter().find(|e| rest.get(e).copied().unwrap_or(0) > 0) {
                Some(&e) => e,
                None => break,
            };
            let mut edges = vec![first];
            let mut v = dag.edges[first].head;
            while !dag.is_sink(i, v) {
                let e = *out_edges[v].iter().find(|e| rest.get(e).copied().unwrap_or(0) > 0).ok_or_else(stuck)?;
                edges.push(e);
                v = dag.edges[e].head;
            }
            let x = edges.iter().map(|e| rest[e]).min().expect("non-empty path");
            for e in &edges {
                *rest.get_mut(e).unwrap() -= x;
            }
            let mut nodes = vec![s];
            nodes.extend(edges.iter().map(|&e| dag.edges[e].head));
            out.push((nodes, x));
        }
    }
    if rest.values().any(|&x| x > 0) {
        return Err(stuck());
    }
    Ok(out)
}

/// Path blocker for weights already expressed in units of `eps * lambda / h`
/// (`units[e]`), with weight budget `x_max` units.
pub fn path_blocker_units(
    g: &Graph,
    units: &[u64],
    h: u64,
    x_max: u64,
    pairs: &[SourceSinkPair],
) -> Result<Blocker> {
    let ex = build_expanded_dag(g, units, h, x_max, pairs)?;
    let k = pairs.len();
    let bf = blocking_flow(&ex.dag, &ratio(1, 2));
    // Everything below stays in integer units of 1/(2 mu) until the end.
    let mut merged: BTreeMap<(usize, Vec<usize>), u128> = BTreeMap::new();
    for (i, m) in bf.units.iter().enumerate() {
        for (nodes, x) in decompose_units(&ex.dag, i, m)? {
            let walk: Vec<usize> = nodes.iter().map(|&c| ex.copies[c].vertex).collect();
            *merged.entry((i, remove_cycles(&walk))).or_insert(0) += x;
        }
    }
    let mut loads = vec![0u128; g.resource_count()];
    for ((_, path), x) in &merged {
        for r in g.path_resources(path).ok_or_else(|| Error::ContractViolation("projected walk leaves the graph".into()))? {
            loads[r] += x;
        }
    }
    let two_mu = 2 * bf.mu as u128;
    let mut divisor = 1u64;
    for (r, &x) in loads.iter().enumerate() {
        let cap = g.resource_cap(r) as u128 * two_mu;
        while x > cap * divisor as u128 {
            divisor *= 2;
        }
    }
    let den = uint(bf.mu) * uint(2 * divisor);
    let mut flow = PathFlow::empty(k);
    for ((i, path), x) in merged {
        flow.push(i, path, Rational::from_integer(x.into()) / &den);
    }
    Ok(Blocker {
        flow,
        kappa: ex.kappa,
        divisor,
        dag_nodes: ex.dag.n,
        dag_edges: ex.dag.edges.len(),
        blocking_iterations: bf.iterations,
    })
}

/// `(1+eps)`-lightest `h`-length path blocker for rational weights `w`.
/// Requires `0 < lambda <= min_i d_w^(h)(S_i, T_i)`.
pub fn path_blocker(
    g: &Graph,
    w: &[Rational],
    h: u64,
    lambda: &Rational,
    eps: &Rational,
    pairs: &[SourceSinkPair],
) -> Result<Blocker> {
    if *lambda <= Rational::zero() {
        return Err(Error::InvalidParameter("lambda must be positive".into()));
    }
    if *eps <= Rational::zero() || *eps >= Rational::one() {
        return Err(Error::InvalidParameter("eps must lie in (0, 1)".into()));
    }
    if w.len() != g.m() {
        return Err(Error::InvalidParameter("one weight per edge is required".into()));
    }
    let x_max = x_budget(h, eps);
    let q = eps * lambda / uint(h);
    let units: Vec<u64> = w
        .iter()
        .map(|x| {
            let u = ceil_int(&(x / &q));
            u64::try_from(u).map(|u| u.min(x_max + 1)).unwrap_or(x_max + 1)
        })
        .collect();
    path_blocker_units(g, &units, h, x_max, pairs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Edge;
    use crate::oracle::enumerate_paths;
    use alloc::vec;

    fn two_path() -> Graph {
        let e = |t, h| Edge { tail: t, head: h, len: 1, cap: 1 };
        Graph::edge_weighted(4, vec![e(0, 1), e(1, 3), e(0, 2), e(2, 3)]).unwrap()
    }

    #[test]
    fn cycles_removed() {
        assert_eq!(remove_cycles(&[0, 1, 2, 1, 3]), vec![0, 1, 3]);
        assert_eq!(remove_cycles(&[0, 1, 0, 2]), vec![0, 2]);
    }

    #[test]
    fn no_short_path_gives_empty_flow() {
        let g = two_path();
        let b = path_blocker(&g, &vec![ratio(1, 2); 4], 1, &int1(), &ratio(1, 2), &[SourceSinkPair::single(0, 3)]).unwrap();
        assert!(b.flow.paths.is_empty());
    }

    fn int1() -> Rational {
        Rational::one()
    }

    #[test]
    fn two_path_both_blocked() {
        let g = two_path();
        let eps = ratio(1, 2);
        let lam = int1();
        let b = path_blocker(&g, &vec![ratio(1, 2); 4], 2, &lam, &eps, &[SourceSinkPair::single(0, 3)]).unwrap();
        let loads = b.flow.resource_loads(&g);
        let alpha = Rational::one() / uint(2 * b.kappa);
        for p in enumerate_paths(&g, &[0], &[3], Some(2), None).unwrap() {
            let res = g.path_resources(&p).unwrap();
            assert!(res.iter().any(|&e| loads[e] >= &alpha * uint(g.resource_cap(e))));
        }
        assert!(b.flow.congestion(&g) <= int1());
        assert!(b.divisor <= b.kappa.next_power_of_two());
    }

    #[test]
    fn emitted_paths_within_weight_bound() {
        let g = two_path();
        let eps = ratio(1, 2);
        let lam = int1();
        // Upper path weight 1 + 1.5 eps = 7/4, lower path 1.
        let w = [ratio(7, 8), ratio(7, 8), ratio(1, 2), ratio(1, 2)];
        let b = path_blocker(&g, &w, 2, &lam, &eps, &[SourceSinkPair::single(0, 3)]).unwrap();
        let bound = (int1() + ratio(2, 1) * &eps) * &lam;
        for p in &b.flow.paths {
            let res = g.path_resources(&p.vertices).unwrap();
            let wp: Rational = res.iter().map(|&e| w[e].clone()).sum();
            assert!(wp <= bound);
            assert!(g.path_length(&p.vertices).unwrap() <= 2);
        }
    }
}
