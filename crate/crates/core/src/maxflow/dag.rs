//! Layered DAGs and the length-weight expanded DAG.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::demand::SourceSinkPair;
use crate::error::{Error, Result};
use crate::graph::{Graph, Mode};
use crate::num::{ceil_int, from_big, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DagEdge {
    pub tail: usize,
    pub head: usize,
    pub cap: u64,
}

/// Sources and sinks of one commodity. Sinks absorb: flow paths end at
/// the first sink they reach.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DagCommodity {
    pub sources: Vec<usize>,
    pub sinks: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct LayeredDag {
    pub n: usize,
    pub edges: Vec<DagEdge>,
    pub out: Vec<Vec<usize>>,
    pub inc: Vec<Vec<usize>>,
    pub order: Vec<usize>,
    pub commodities: Vec<DagCommodity>,
    sink_mask: Vec<Vec<bool>>,
    source_mask: Vec<Vec<bool>>,
}

impl LayeredDag {
    pub fn new(n: usize, edges: Vec<DagEdge>, commodities: Vec<DagCommodity>) -> Result<Self> {
        let mut out = vec![Vec::new(); n];
        let mut inc = vec![Vec::new(); n];
        for (i, e) in edges.iter().enumerate() {
            if e.tail >= n || e.head >= n {
                return Err(Error::InvalidGraph("dag edge out of range".into()));
            }
            out[e.tail].push(i);
            inc[e.head].push(i);
        }
        let mut indeg: Vec<usize> = inc.iter().map(|v| v.len()).collect();
        let mut order: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
        let mut i = 0;
        while i < order.len() {
            let v = order[i];
            i += 1;
            for &e in &out[v] {
                let w = edges[e].head;
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    order.push(w);
                }
            }
        }
        if order.len() != n {
            return Err(Error::CycleDetected);
        }
        let mut sink_mask = Vec::new();
        let mut source_mask = Vec::new();
        for c in &commodities {
            let mut sm = vec![false; n];
            let mut so = vec![false; n];
            for &t in &c.sinks {
                sm[t] = true;
            }
            for &s in &c.sources {
                so[s] = true;
            }
            sink_mask.push(sm);
            source_mask.push(so);
        }
        Ok(LayeredDag { n, edges, out, inc, order, commodities, sink_mask, source_mask })
    }

    pub fn is_sink(&self, i: usize, v: usize) -> bool {
        self.sink_mask[i][v]
    }

    pub fn is_source(&self, i: usize, v: usize) -> bool {
        self.source_mask[i][v]
    }

    /// Whether edge `e` may carry commodity `i` (its tail is not an
    /// absorbing sink of that commodity).
    pub fn usable(&self, i: usize, e: usize) -> bool {
        !self.sink_mask[i][self.edges[e].tail]
    }

    /// Maximum number of edges on any path.
    pub fn depth(&self) -> usize {
        let mut d = vec![0usize; self.n];
        let mut best = 0;
        for &v in &self.order {
            for &e in &self.out[v] {
                let w = self.edges[e].head;
                if d[v] + 1 > d[w] {
                    d[w] = d[v] + 1;
                    best = best.max(d[w]);
                }
            }
        }
        best
    }

    /// All source-to-sink paths of commodity `i` as edge lists (exponential).
    pub fn enumerate_paths(&self, i: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut stack = Vec::new();
        for &s in &self.commodities[i].sources {
            self.walk(i, s, &mut stack, &mut out);
        }
        out
    }

    fn walk(&self, i: usize, v: usize, stack: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if !stack.is_empty() && self.is_sink(i, v) {
            out.push(stack.clone());
            return;
        }
        if self.is_sink(i, v) {
            return;
        }
        for &e in &self.out[v] {
            stack.push(e);
            self.walk(i, self.edges[e].head, stack, out);
            stack.pop();
        }
    }
}

/// Commodity-`i` path-count flows w.r.t. fractional capacities `caps`
/// (edges with zero capacity are ignored). Edge `e = (u, v)` gets
/// `caps(e) * c-(u) * c+(v) / c_max`, where `c-(u)` sums capacity products
/// over source-to-`u` paths, `c+(v)` over `v`-to-sink paths, and `c_max` is
/// the largest total of `c-(u) * c+(v)` over commodities.
pub fn path_count_flow(dag: &LayeredDag, caps: &[Rational]) -> Vec<BTreeMap<usize, Rational>> {
    let k = dag.commodities.len();
    let mut per: Vec<Vec<Rational>> = Vec::with_capacity(k);
    let mut total = vec![Rational::zero(); dag.edges.len()];
    for i in 0..k {
        let mut cm = vec![Rational::zero(); dag.n];
        for &v in &dag.order {
            if dag.is_source(i, v) {
                cm[v] += Rational::one();
            }
            if dag.is_sink(i, v) {
                continue;
            }
            for &e in &dag.out[v] {
                if !caps[e].is_zero() {
                    let add = &cm[v] * &caps[e];
                    cm[dag.edges[e].head] += add;
                }
            }
        }
        let mut cp = vec![Rational::zero(); dag.n];
        for &v in dag.order.iter().rev() {
            if dag.is_sink(i, v) {
                cp[v] = Rational::one();
                continue;
            }
            for &e in &dag.out[v] {
                if !caps[e].is_zero() {
                    let add = &caps[e] * &cp[dag.edges[e].head];
                    cp[v] += add;
                }
            }
        }
        let mut c = vec![Rational::zero(); dag.edges.len()];
        for (e, edge) in dag.edges.iter().enumerate() {
            if !caps[e].is_zero() && dag.usable(i, e) {
                c[e] = &cm[edge.tail] * &cp[edge.head];
                total[e] += &c[e];
            }
        }
        per.push(c);
    }
    let cmax = total.iter().max().cloned().unwrap_or_else(Rational::zero);
    per.into_iter()
        .map(|c| {
            let mut m = BTreeMap::new();
            if !cmax.is_zero() {
                for (e, x) in c.into_iter().enumerate() {
                    if !x.is_zero() {
                        m.insert(e, &caps[e] * x / &cmax);
                    }
                }
            }
            m
        })
        .collect()
}

/// `w_hat(e) = q * ceil(w(e) / q)` with `q = eps * lambda / h`.
pub fn discretize_weights(w: &[Rational], lambda: &Rational, h: u64, eps: &Rational) -> Result<Vec<Rational>> {
    if *lambda <= Rational::zero() {
        return Err(Error::InvalidParameter("lambda must be positive".into()));
    }
    let q = eps * lambda / Rational::from_integer(h.into());
    Ok(w.iter().map(|x| &q * from_big(ceil_int(&(x / &q)))).collect())
}

/// Number of copies of each vertex: `(h + 1) * (floor((1 + 2 eps) h / eps) + 1)`.
pub fn copy_count(h: u64, eps: &Rational) -> u64 {
    (h + 1) * (x_budget(h, eps) + 1)
}

/// Largest weight coordinate, in units of `eps * lambda / h`.
pub fn x_budget(h: u64, eps: &Rational) -> u64 {
    let two = Rational::from_integer(2.into());
    let b = (Rational::one() + two * eps) * Rational::from_integer(h.into()) / eps;
    let f = b.numer().div_floor(b.denom());
    u64::try_from(f).unwrap_or(u64::MAX)
}

/// Copy `v(x, h')` of an original vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Copy {
    pub vertex: usize,
    pub x: u64,
    pub len: u64,
}

#[derive(Clone, Debug)]
pub struct ExpandedDag {
    pub dag: LayeredDag,
    pub copies: Vec<Copy>,
    /// Original edge of every DAG edge.
    pub origin: Vec<usize>,
    pub h: u64,
    pub x_max: u64,
    pub kappa: u64,
}

impl ExpandedDag {
    /// Original vertex sequence of a DAG edge path.
    pub fn project(&self, edge_path: &[usize]) -> Vec<usize> {
        let mut vs = Vec::with_capacity(edge_path.len() + 1);
        if let Some(&e0) = edge_path.first() {
            vs.push(self.copies[self.dag.edges[e0].tail].vertex);
        }
        for &e in edge_path {
            vs.push(self.copies[self.dag.edges[e].head].vertex);
        }
        vs
    }
}

/// Integer weight units `ceil(w(e) / q)` for weights given as numerators
/// over a shared denominator, with `q = eps * lambda / h`. Units above
/// `cap` are clamped to `cap + 1`.
pub fn weight_units(w: &[BigUint], lambda: &BigUint, h: u64, eps: &Rational, cap: u64) -> Vec<u64> {
    let en: BigUint = eps.numer().try_into().expect("positive eps");
    let ed: BigUint = eps.denom().try_into().expect("positive eps");
    let den = lambda * &en;
    let limit = BigUint::from(cap + 1);
    w.iter()
        .map(|x| {
            let num = x * BigUint::from(h) * &ed;
            let (q, r) = num.div_rem(&den);
            let u = if r.is_zero() { q } else { q + 1u32 };
            if u > limit {
                cap + 1
            } else {
                u64::try_from(u).unwrap_or(cap + 1)
            }
        })
        .collect()
}

/// Builds the expanded DAG restricted to copies that lie on some
/// source-to-sink path of some commodity. `units` are the discretized
/// weights of the edges of `g`, `x_max` the weight budget in units.
pub fn build_expanded_dag(
    g: &Graph,
    units: &[u64],
    h: u64,
    x_max: u64,
    pairs: &[SourceSinkPair],
) -> Result<ExpandedDag> {
    if g.mode() != Mode::EdgeDirected {
        return Err(Error::InvalidGraph("expanded DAG needs a directed edge-weighted graph".into()));
    }
    let n = g.n();
    let w1 = (x_max + 1) as usize;
    let h1 = (h + 1) as usize;
    let slots = n
        .checked_mul(w1)
        .and_then(|s| s.checked_mul(h1))
        .filter(|&s| s <= 1 << 26)
        .ok_or_else(|| Error::InvalidParameter("expanded DAG too large".into()))?;
    let idx = |v: usize, x: u64, l: u64| (v * w1 + x as usize) * h1 + l as usize;
    let step = |a: usize, x: u64, l: u64| -> Option<(usize, u64, u64)> {
        let arc = &g.arcs()[a];
        let e = &g.edges()[arc.edge];
        let nx = x + units[arc.edge];
        let nl = l + e.len;
        if nx <= x_max && nl <= h {
            Some((arc.head, nx, nl))
        } else {
            None
        }
    };
    const FWD: u8 = 1;
    const BWD: u8 = 2;
    let mut mark = vec![0u8; slots];
    let mut kept: Vec<usize> = Vec::new();
    for p in pairs {
        let mut is_sink = vec![false; n];
        for &t in &p.sinks {
            is_sink[t] = true;
        }
        // Forward reachability from v(0,0), v in S, never leaving a sink.
        let mut reached: Vec<(usize, u64, u64)> = Vec::new();
        for &s in &p.sources {
            let i = idx(s, 0, 0);
            if mark[i] & FWD == 0 {
                mark[i] |= FWD;
                reached.push((s, 0, 0));
            }
        }
        let mut head = 0;
        while head < reached.len() {
            let (v, x, l) = reached[head];
            head += 1;
            if is_sink[v] {
                continue;
            }
            for &a in g.out_arcs(v) {
                if let Some((w, nx, nl)) = step(a, x, l) {
                    let i = idx(w, nx, nl);
                    if mark[i] & FWD == 0 {
                        mark[i] |= FWD;
                        reached.push((w, nx, nl));
                    }
                }
            }
        }
        // Co-reachability to sink copies, processed in decreasing (len, x).
        reached.sort_unstable_by(|a, b| (b.2, b.1).cmp(&(a.2, a.1)));
        for &(v, x, l) in &reached {
            let i = idx(v, x, l);
            if is_sink[v] {
                mark[i] |= BWD;
                continue;
            }
            for &a in g.out_arcs(v) {
                if let Some((w, nx, nl)) = step(a, x, l) {
                    if mark[idx(w, nx, nl)] & BWD != 0 {
                        mark[i] |= BWD;
                        break;
                    }
                }
            }
        }
        for &(v, x, l) in &reached {
            let i = idx(v, x, l);
            if mark[i] & BWD != 0 {
                kept.push(i);
            }
            mark[i] = 0;
        }
    }
    kept.sort_unstable();
    kept.dedup();
    let copies: Vec<Copy> = kept
        .iter()
        .map(|&i| {
            let l = (i % h1) as u64;
            let x = ((i / h1) % w1) as u64;
            Copy { vertex: i / (h1 * w1), x, len: l }
        })
        .collect();
    let id = |i: usize| kept.binary_search(&i).ok();
    let mut edges = Vec::new();
    let mut origin = Vec::new();
    for (c, cp) in copies.iter().enumerate() {
        for &a in g.out_arcs(cp.vertex) {
            if let Some((w, nx, nl)) = step(a, cp.x, cp.len) {
                if let Some(t) = id(idx(w, nx, nl)) {
                    edges.push(DagEdge { tail: c, head: t, cap: g.edges()[g.arcs()[a].edge].cap });
                    origin.push(g.arcs()[a].edge);
                }
            }
        }
    }
    let mut commodities = Vec::new();
    for p in pairs {
        let sources = p.sources.iter().filter_map(|&s| id(idx(s, 0, 0))).collect();
        let mut sinks = Vec::new();
        for (c, cp) in copies.iter().enumerate() {
            if p.sinks.contains(&cp.vertex) {
                sinks.push(c);
            }
        }
        commodities.push(DagCommodity { sources, sinks });
    }
    let dag = LayeredDag::new(copies.len(), edges, commodities)?;
    Ok(ExpandedDag { dag, copies, origin, h, x_max, kappa: (h + 1) * (x_max + 1) })
}
