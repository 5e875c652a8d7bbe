//! Multi-commodity blocking flows in layered DAGs via rounded path-count
//! flows.
//!
//! Capacities and flows are kept as integers in units of `1/(2 mu)`.
//! Path counts are big integers carrying a uniform factor `(2 mu)^depth`,
//! so every division in the dynamic programs is exact.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::flow::EdgeFlow;
use crate::num::{pow2_at_least, uint, Rational};

use super::dag::LayeredDag;

#[derive(Clone, Debug)]
pub struct BlockingFlow {
    /// Per commodity, DAG edge to flow in units of `1/(2 mu)`.
    pub units: Vec<BTreeMap<usize, u128>>,
    pub mu: u64,
    pub iterations: usize,
}

impl BlockingFlow {
    pub fn edge_total(&self, e: usize) -> u128 {
        self.units.iter().map(|m| m.get(&e).copied().unwrap_or(0)).sum()
    }

    /// Flow as rationals keyed by DAG node pairs.
    pub fn to_edge_flow(&self, dag: &LayeredDag) -> EdgeFlow {
        let mut f = EdgeFlow::zero(self.units.len());
        let den = uint(2 * self.mu);
        for (i, m) in self.units.iter().enumerate() {
            for (&e, &u) in m {
                let x = Rational::from_integer(u.into()) / &den;
                f.add(i, (dag.edges[e].tail, dag.edges[e].head), &x);
            }
        }
        f
    }

    pub fn value_of(&self, e: usize) -> Rational {
        Rational::new(self.edge_total(e).into(), (2 * self.mu as u128).into())
    }
}

/// `mu`: smallest power of two with `mu >= 4k / (1 - alpha)`.
pub fn fractionality_mu(k: usize, alpha: &Rational) -> u64 {
    let bound = uint(4 * k.max(1) as u64) / (Rational::one() - alpha);
    pow2_at_least(&bound).to_u64().expect("mu fits in u64")
}

/// Computes an `alpha`-blocking flow: every source-to-sink path of every
/// commodity crosses an edge carrying at least `alpha` times its capacity.
///
/// An edge is retired once its residual drops to `(1 - alpha)` of its
/// original capacity.
pub fn blocking_flow(dag: &LayeredDag, alpha: &Rational) -> BlockingFlow {
    let k = dag.commodities.len();
    let mu = fractionality_mu(k, alpha);
    let two_mu = 2 * mu as u128;
    let orig: Vec<u128> = dag.edges.iter().map(|e| e.cap as u128 * two_mu).collect();
    let mut res = orig.clone();
    let an: u128 = alpha.numer().try_into().expect("alpha numerator");
    let ad: u128 = alpha.denom().try_into().expect("alpha denominator");
    let mut units = vec![BTreeMap::new(); k];
    let depth = dag.depth() as u32;
    let scale = num_traits::pow(BigUint::from(two_mu), depth as usize);
    let two_mu_big = BigUint::from(two_mu);
    let mut iterations = 0;
    loop {
        let counts: Vec<Vec<BigUint>> =
            (0..k).map(|i| edge_counts(dag, i, &res, &scale, &two_mu_big)).collect();
        let mut cmax = BigUint::zero();
        for e in 0..dag.edges.len() {
            let mut t = BigUint::zero();
            for c in &counts {
                t += &c[e];
            }
            if t > cmax {
                cmax = t;
            }
        }
        if cmax.is_zero() {
            break;
        }
        iterations += 1;
        // mu * F~_i(e) = res(e) * c_i(e) / (2 c_max).
        let den = &cmax << 1u32;
        let mut step = vec![0u128; dag.edges.len()];
        for (i, c) in counts.iter().enumerate() {
            let nums: Vec<BigUint> =
                c.iter().zip(&res).map(|(ci, &r)| if ci.is_zero() { BigUint::zero() } else { ci * r }).collect();
            let rounded = round_dag_commodity(dag, i, &nums, &den);
            for (e, q) in rounded {
                if q > 0 {
                    step[e] += q;
                    *units[i].entry(e).or_insert(0) += q;
                }
            }
        }
        for e in 0..dag.edges.len() {
            if step[e] == 0 {
                continue;
            }
            assert!(step[e] <= res[e], "rounded path-count flow exceeds residual capacity");
            res[e] -= step[e];
            // Retire when res <= (1 - alpha) * orig.
            if res[e] * ad <= (ad - an) * orig[e] {
                res[e] = 0;
            }
        }
    }
    BlockingFlow { units, mu, iterations }
}

/// `c-(u) * c+(v)` for every edge usable by commodity `i`, scaled by
/// `scale^2`.
fn edge_counts(dag: &LayeredDag, i: usize, res: &[u128], scale: &BigUint, two_mu: &BigUint) -> Vec<BigUint> {
    let mut cm = vec![BigUint::zero(); dag.n];
    for &v in &dag.order {
        if dag.is_source(i, v) {
            cm[v] += scale;
        }
        if dag.is_sink(i, v) || cm[v].is_zero() {
            continue;
        }
        for &e in &dag.out[v] {
            if res[e] > 0 {
                let (q, r) = (&cm[v] * BigUint::from(res[e])).div_rem(two_mu);
                debug_assert!(r.is_zero());
                cm[dag.edges[e].head] += q;
            }
        }
    }
    let mut cp = vec![BigUint::zero(); dag.n];
    for &v in dag.order.iter().rev() {
        if dag.is_sink(i, v) {
            cp[v] = scale.clone();
            continue;
        }
        let mut acc = BigUint::zero();
        for &e in &dag.out[v] {
            let w = dag.edges[e].head;
            if res[e] > 0 && !cp[w].is_zero() {
                acc += &cp[w] * BigUint::from(res[e]);
            }
        }
        if !acc.is_zero() {
            let (q, r) = acc.div_rem(two_mu);
            debug_assert!(r.is_zero());
            cp[v] = q;
        }
    }
    dag.edges
        .iter()
        .enumerate()
        .map(|(e, edge)| {
            if res[e] == 0 || !dag.usable(i, e) || cm[edge.tail].is_zero() || cp[edge.head].is_zero() {
                BigUint::zero()
            } else {
                &cm[edge.tail] * &cp[edge.head]
            }
        })
        .collect()
}

/// Rounds `nums / den` on every DAG edge of commodity `i` to an adjacent
/// integer while keeping conservation, by cancelling cycles of fractional
/// arcs in the graph closed with a super source, super sink and return arc.
fn round_dag_commodity(dag: &LayeredDag, i: usize, nums: &[BigUint], den: &BigUint) -> Vec<(usize, u128)> {
    let n = dag.n;
    let (ss, tt) = (n, n + 1);
    let mut tail = Vec::new();
    let mut head = Vec::new();
    let mut val: Vec<BigUint> = Vec::new();
    let mut dag_edge = Vec::new();
    let mut outv = vec![BigUint::zero(); n];
    let mut inv = vec![BigUint::zero(); n];
    for (e, x) in nums.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        let ed = &dag.edges[e];
        tail.push(ed.tail);
        head.push(ed.head);
        val.push(x.clone());
        dag_edge.push(Some(e));
        outv[ed.tail] += x;
        inv[ed.head] += x;
    }
    if val.is_empty() {
        return Vec::new();
    }
    let mut total = BigUint::zero();
    for v in 0..n {
        if dag.is_source(i, v) && outv[v] > inv[v] {
            let x = &outv[v] - &inv[v];
            total += &x;
            tail.push(ss);
            head.push(v);
            val.push(x);
            dag_edge.push(None);
        } else if dag.is_sink(i, v) && inv[v] > outv[v] {
            tail.push(v);
            head.push(tt);
            val.push(&inv[v] - &outv[v]);
            dag_edge.push(None);
        }
    }
    let ret = val.len();
    tail.push(tt);
    head.push(ss);
    val.push(total);
    dag_edge.push(None);

    let frac = |x: &BigUint| !(x % den).is_zero();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n + 2];
    for a in 0..val.len() {
        if frac(&val[a]) {
            adj[tail[a]].push(a);
            adj[head[a]].push(a);
        }
    }
    let mut pos = vec![usize::MAX; n + 2];
    let mut first = 0;
    loop {
        while first < val.len() && !frac(&val[first]) {
            first += 1;
        }
        if first == val.len() {
            break;
        }
        // Walk fractional arcs until a node repeats.
        let mut walk: Vec<(usize, bool)> = Vec::new();
        let mut visited: Vec<usize> = Vec::new();
        let mut u = tail[first];
        let mut prev = usize::MAX;
        pos[u] = 0;
        visited.push(u);
        let cycle = loop {
            adj[u].retain(|&a| frac(&val[a]));
            let next = *adj[u].iter().find(|&&a| a != prev).expect("fractional arcs pair up at every node");
            let fwd = tail[next] == u;
            let w = if fwd { head[next] } else { tail[next] };
            walk.push((next, fwd));
            prev = next;
            if pos[w] != usize::MAX {
                break walk.split_off(pos[w]);
            }
            pos[w] = walk.len();
            visited.push(w);
            u = w;
        };
        for v in visited {
            pos[v] = usize::MAX;
        }
        let dir = cycle.iter().find(|c| c.0 == ret).map_or(true, |c| c.1);
        let mut theta: Option<BigUint> = None;
        for &(a, fwd) in &cycle {
            let r = &val[a] % den;
            let room = if fwd == dir { den - &r } else { r };
            if theta.as_ref().map_or(true, |t| room < *t) {
                theta = Some(room);
            }
        }
        let theta = theta.expect("non-empty cycle");
        for &(a, fwd) in &cycle {
            if fwd == dir {
                val[a] += &theta;
            } else {
                val[a] -= &theta;
            }
        }
    }
    let mut out = Vec::new();
    for a in 0..val.len() {
        if let Some(e) = dag_edge[a] {
            let q = (&val[a] / den).to_u128().expect("rounded flow fits");
            out.push((e, q));
        }
    }
    out
}
