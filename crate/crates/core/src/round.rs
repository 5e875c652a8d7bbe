//! Rounding fractional flows to `1/mu`-fractional flows by cancelling
//! cycles of fractional arcs.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use num_traits::{Signed, Zero};

use crate::demand::SourceSinkPair;
use crate::error::{Error, Result};
use crate::flow::EdgeFlow;
use crate::graph::Graph;
use crate::num::{ceil_int, floor_int, from_big, is_integral, is_pow2, uint, Rational};

/// Default slack for the cost contract: `1/n^3`.
pub fn default_eps_round(n: usize) -> Rational {
    let n = (n.max(2)) as i64;
    crate::num::ratio(1, n * n * n)
}

struct Arc {
    tail: usize,
    head: usize,
    x: Rational,
    cost: Rational,
}

/// Rounds every commodity of `f` independently. With `use_costs`, arc
/// lengths of `g` act as costs and no cancellation step raises the cost.
pub fn round_flow(
    g: &Graph,
    f: &EdgeFlow,
    terminals: &[SourceSinkPair],
    mu: u64,
    use_costs: bool,
) -> Result<EdgeFlow> {
    if !is_pow2(mu) {
        return Err(Error::MuNotPowerOfTwo(mu));
    }
    if terminals.len() != f.k() {
        return Err(Error::InvalidFlow("one terminal pair per commodity is required".into()));
    }
    f.check_arcs(g)?;
    let mut out = EdgeFlow::zero(f.k());
    for (i, term) in terminals.iter().enumerate() {
        out.commodities[i] = round_commodity(g, &f.commodities[i], term, mu, use_costs)?;
    }
    Ok(out)
}

fn round_commodity(
    g: &Graph,
    flow: &BTreeMap<(usize, usize), Rational>,
    term: &SourceSinkPair,
    mu: u64,
    use_costs: bool,
) -> Result<BTreeMap<(usize, usize), Rational>> {
    let n = g.n();
    let (ss, tt) = (n, n + 1);
    let scale = uint(mu);
    let mut net = vec![Rational::zero(); n];
    let mut arcs = Vec::new();
    for (&(u, v), x) in flow {
        if x.is_zero() {
            continue;
        }
        net[u] += x;
        net[v] -= x;
        let a = g.arc_between(u, v).expect("checked arcs");
        arcs.push(Arc { tail: u, head: v, x: x * &scale, cost: uint(g.arc_len(a)) });
    }
    let mut total = Rational::zero();
    for (v, x) in net.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        let is_source = term.sources.contains(&v);
        let is_sink = term.sinks.contains(&v);
        if x.is_positive() && is_source {
            total += x;
            arcs.push(Arc { tail: ss, head: v, x: x * &scale, cost: uint(g.start_len(v)) });
        } else if x.is_negative() && is_sink {
            arcs.push(Arc { tail: v, head: tt, x: -x * &scale, cost: Rational::zero() });
        } else {
            return Err(Error::Conservation { vertex: v });
        }
    }
    let ret = arcs.len();
    arcs.push(Arc { tail: tt, head: ss, x: total * &scale, cost: Rational::zero() });

    let nodes = n + 2;
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); nodes];
    for (id, a) in arcs.iter().enumerate() {
        if !is_integral(&a.x) {
            adj[a.tail].push(id);
            adj[a.head].push(id);
        }
    }
    let mut first_frac = 0usize;
    loop {
        while first_frac < arcs.len() && is_integral(&arcs[first_frac].x) {
            first_frac += 1;
        }
        if first_frac == arcs.len() {
            break;
        }
        let cycle = find_cycle(&arcs, &mut adj, first_frac)?;
        cancel(&mut arcs, &cycle, ret, use_costs);
    }

    let mut out = BTreeMap::new();
    for a in &arcs[..ret] {
        if a.tail < n && a.head < n && !a.x.is_zero() {
            out.insert((a.tail, a.head), &a.x / &scale);
        }
    }
    Ok(out)
}

/// Walks fractional arcs from `start` until a vertex repeats; returns the
/// closed part as (arc id, traversed forward) pairs.
fn find_cycle(arcs: &[Arc], adj: &mut [Vec<usize>], start: usize) -> Result<Vec<(usize, bool)>> {
    let mut pos: BTreeMap<usize, usize> = BTreeMap::new();
    let mut walk: Vec<(usize, bool)> = Vec::new();
    let mut u = arcs[start].tail;
    let mut prev = usize::MAX;
    pos.insert(u, 0);
    loop {
        adj[u].retain(|&id| !is_integral(&arcs[id].x));
        let next = adj[u]
            .iter()
            .copied()
            .find(|&id| id != prev)
            .ok_or(Error::Conservation { vertex: u })?;
        let forward = arcs[next].tail == u;
        let w = if forward { arcs[next].head } else { arcs[next].tail };
        walk.push((next, forward));
        prev = next;
        if let Some(&p) = pos.get(&w) {
            return Ok(walk.split_off(p));
        }
        pos.insert(w, walk.len());
        u = w;
    }
}

fn cancel(arcs: &mut [Arc], cycle: &[(usize, bool)], ret: usize, use_costs: bool) {
    let up = |x: &Rational| from_big(ceil_int(x)) - x;
    let down = |x: &Rational| x - from_big(floor_int(x));
    let mut theta_f: Option<Rational> = None;
    let mut theta_b: Option<Rational> = None;
    let mut cost_f = Rational::zero();
    let mut ret_dir = None;
    for &(id, fwd) in cycle {
        let x = &arcs[id].x;
        let (f, b) = if fwd { (up(x), down(x)) } else { (down(x), up(x)) };
        theta_f = Some(theta_f.map_or(f.clone(), |t| if f < t { f } else { t }));
        theta_b = Some(theta_b.map_or(b.clone(), |t| if b < t { b } else { t }));
        if fwd {
            cost_f += &arcs[id].cost;
        } else {
            cost_f -= &arcs[id].cost;
        }
        if id == ret {
            ret_dir = Some(fwd);
        }
    }
    let forward = if use_costs && cost_f.is_negative() {
        true
    } else if use_costs && cost_f.is_positive() {
        false
    } else {
        ret_dir.unwrap_or(true)
    };
    let theta = if forward { theta_f } else { theta_b }.expect("cycle is non-empty");
    for &(id, fwd) in cycle {
        if fwd == forward {
            arcs[id].x += &theta;
        } else {
            arcs[id].x -= &theta;
        }
    }
}

/// Checks the per-arc floor/ceil bracket between `before` and `after` at
/// scale `mu`; returns the first violating arc.
pub fn bracket_violation(
    before: &BTreeMap<(usize, usize), Rational>,
    after: &BTreeMap<(usize, usize), Rational>,
    mu: u64,
) -> Option<(usize, usize)> {
    let zero = Rational::zero();
    let scale = uint(mu);
    let keys = before.keys().chain(after.keys());
    for k in keys {
        let b = before.get(k).unwrap_or(&zero) * &scale;
        let a = after.get(k).unwrap_or(&zero) * &scale;
        if !is_integral(&a) || a < from_big(floor_int(&b)) || a > from_big(ceil_int(&b)) {
            return Some(*k);
        }
    }
    None
}

pub fn describe_arc(arc: (usize, usize)) -> alloc::string::String {
    format!("({},{})", arc.0, arc.1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Edge;
    use crate::num::{int, ratio};

    fn e(t: usize, h: usize, len: u64) -> Edge {
        Edge { tail: t, head: h, len, cap: 4 }
    }

    #[test]
    fn integral_input_is_fixed_point() {
        let g = Graph::edge_weighted(3, vec![e(0, 1, 1), e(1, 2, 1)]).unwrap();
        let mut f = EdgeFlow::zero(1);
        f.add(0, (0, 1), &int(2));
        f.add(0, (1, 2), &int(2));
        let out = round_flow(&g, &f, &[SourceSinkPair::single(0, 2)], 4, true).unwrap();
        assert_eq!(out, f);
    }

    #[test]
    fn single_edge_third() {
        let g = Graph::edge_weighted(2, vec![e(0, 1, 1)]).unwrap();
        let mut f = EdgeFlow::zero(1);
        f.add(0, (0, 1), &ratio(1, 3));
        let out = round_flow(&g, &f, &[SourceSinkPair::single(0, 1)], 2, false).unwrap();
        let v = out.commodities[0].get(&(0, 1)).cloned().unwrap_or_default();
        assert!(v == int(0) || v == ratio(1, 2));
        assert_eq!(v, ratio(1, 2), "value mode rounds the total up");
    }

    #[test]
    fn rejects_non_power_of_two() {
        let g = Graph::edge_weighted(2, vec![e(0, 1, 1)]).unwrap();
        let f = EdgeFlow::zero(1);
        assert_eq!(
            round_flow(&g, &f, &[SourceSinkPair::single(0, 1)], 3, false),
            Err(Error::MuNotPowerOfTwo(3))
        );
    }

    #[test]
    fn rejects_unbalanced_flow() {
        let g = Graph::edge_weighted(3, vec![e(0, 1, 1), e(1, 2, 1)]).unwrap();
        let mut f = EdgeFlow::zero(1);
        f.add(0, (0, 1), &int(1));
        assert_eq!(
            round_flow(&g, &f, &[SourceSinkPair::single(0, 2)], 2, false),
            Err(Error::Conservation { vertex: 1 })
        );
    }

    #[test]
    fn two_cycle_residue_moves_to_cheaper_side() {
        // Two parallel routes 0->1->3 (cost 2) and 0->2->3 (cost 10), each
        // carrying 1/2 + 1/6 and 1/3 - 1/6 of a unit. At mu = 1 the
        // residue must end on the cheap route.
        let g = Graph::edge_weighted(4, vec![e(0, 1, 1), e(1, 3, 1), e(0, 2, 5), e(2, 3, 5)]).unwrap();
        let mut f = EdgeFlow::zero(1);
        for arc in [(0, 1), (1, 3)] {
            f.add(0, arc, &ratio(2, 3));
        }
        for arc in [(0, 2), (2, 3)] {
            f.add(0, arc, &ratio(1, 3));
        }
        let out = round_flow(&g, &f, &[SourceSinkPair::single(0, 3)], 1, true).unwrap();
        assert_eq!(out.commodities[0].get(&(0, 1)), Some(&int(1)));
        assert_eq!(out.commodities[0].get(&(0, 2)), None);
        assert!(out.totlen(&g) <= f.totlen(&g));
    }
}
