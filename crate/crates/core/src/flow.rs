//! Multi-commodity flows in path and edge representation.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::graph::{Graph, Mode};
use crate::num::{uint, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlowPath {
    pub commodity: usize,
    pub vertices: Vec<usize>,
    pub value: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct PathFlow {
    pub k: usize,
    pub paths: Vec<FlowPath>,
}

/// Per commodity, arc `(tail, head)` to flow value.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct EdgeFlow {
    pub commodities: Vec<BTreeMap<(usize, usize), Rational>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MultiFlow {
    Path(PathFlow),
    Edge(EdgeFlow),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlowStats {
    pub value: Rational,
    pub congestion: Rational,
    pub length: Option<u64>,
    pub step: Option<usize>,
    pub totlen: Rational,
}

impl PathFlow {
    pub fn empty(k: usize) -> Self {
        PathFlow { k, paths: Vec::new() }
    }

    pub fn push(&mut self, commodity: usize, vertices: Vec<usize>, value: Rational) {
        if value.is_positive() {
            self.paths.push(FlowPath { commodity, vertices, value });
        }
    }

    pub fn validate(&self, g: &Graph) -> Result<()> {
        for (i, p) in self.paths.iter().enumerate() {
            if p.commodity >= self.k {
                return Err(Error::InvalidFlow(format!("path {i} has commodity out of range")));
            }
            if !p.value.is_positive() {
                return Err(Error::InvalidFlow(format!("path {i} has non-positive value")));
            }
            if g.path_resources(&p.vertices).is_none() || p.vertices.len() < 2 {
                return Err(Error::InvalidFlow(format!("path {i} is not a path of the graph")));
            }
            let distinct: BTreeSet<_> = p.vertices.iter().collect();
            if distinct.len() != p.vertices.len() {
                return Err(Error::InvalidFlow(format!("path {i} is not simple")));
            }
        }
        Ok(())
    }

    pub fn value(&self) -> Rational {
        self.paths.iter().fold(Rational::zero(), |a, p| a + &p.value)
    }

    pub fn commodity_values(&self) -> Vec<Rational> {
        let mut v = vec![Rational::zero(); self.k];
        for p in &self.paths {
            v[p.commodity] += &p.value;
        }
        v
    }

    /// Routed demand per ordered endpoint pair.
    pub fn routed_pairs(&self) -> BTreeMap<(usize, usize), Rational> {
        let mut m = BTreeMap::new();
        for p in &self.paths {
            let key = (p.vertices[0], *p.vertices.last().unwrap());
            *m.entry(key).or_insert_with(Rational::zero) += &p.value;
        }
        m
    }

    pub fn resource_loads(&self, g: &Graph) -> Vec<Rational> {
        let mut loads = vec![Rational::zero(); g.resource_count()];
        for p in &self.paths {
            if let Some(rs) = g.path_resources(&p.vertices) {
                for r in rs {
                    loads[r] += &p.value;
                }
            }
        }
        loads
    }

    pub fn congestion(&self, g: &Graph) -> Rational {
        congestion_of(g, &self.resource_loads(g))
    }

    pub fn length(&self, g: &Graph) -> u64 {
        self.paths.iter().filter_map(|p| g.path_length(&p.vertices)).max().unwrap_or(0)
    }

    pub fn step(&self) -> usize {
        self.paths.iter().map(|p| p.vertices.len().saturating_sub(1)).max().unwrap_or(0)
    }

    pub fn totlen(&self, g: &Graph) -> Rational {
        let mut t = Rational::zero();
        for p in &self.paths {
            if let Some(l) = g.path_length(&p.vertices) {
                t += &p.value * uint(l);
            }
        }
        t
    }

    pub fn scale(&mut self, factor: &Rational) {
        for p in &mut self.paths {
            p.value *= factor;
        }
        self.paths.retain(|p| p.value.is_positive());
    }

    /// Adds `factor * other` to this flow.
    pub fn add_scaled(&mut self, other: &PathFlow, factor: &Rational) {
        self.k = self.k.max(other.k);
        for p in &other.paths {
            self.push(p.commodity, p.vertices.clone(), &p.value * factor);
        }
    }

    /// Merges identical paths; output is sorted by (commodity, vertices).
    pub fn normalized(&self) -> PathFlow {
        let mut m: BTreeMap<(usize, Vec<usize>), Rational> = BTreeMap::new();
        for p in &self.paths {
            *m.entry((p.commodity, p.vertices.clone())).or_insert_with(Rational::zero) += &p.value;
        }
        let paths = m
            .into_iter()
            .filter(|(_, v)| v.is_positive())
            .map(|((commodity, vertices), value)| FlowPath { commodity, vertices, value })
            .collect();
        PathFlow { k: self.k, paths }
    }
}

impl EdgeFlow {
    pub fn zero(k: usize) -> Self {
        EdgeFlow { commodities: vec![BTreeMap::new(); k] }
    }

    pub fn k(&self) -> usize {
        self.commodities.len()
    }

    pub fn add(&mut self, commodity: usize, arc: (usize, usize), value: &Rational) {
        let e = self.commodities[commodity].entry(arc).or_insert_with(Rational::zero);
        *e += value;
        if e.is_zero() {
            self.commodities[commodity].remove(&arc);
        }
    }

    /// Out-flow minus in-flow of commodity `i` at every vertex.
    pub fn net_out(&self, i: usize, n: usize) -> Vec<Rational> {
        let mut net = vec![Rational::zero(); n];
        for (&(u, v), x) in &self.commodities[i] {
            net[u] += x;
            net[v] -= x;
        }
        net
    }

    pub fn commodity_value(&self, i: usize, n: usize) -> Rational {
        self.net_out(i, n).into_iter().filter(|x| x.is_positive()).fold(Rational::zero(), |a, b| a + b)
    }

    pub fn value(&self, n: usize) -> Rational {
        (0..self.k()).fold(Rational::zero(), |a, i| a + self.commodity_value(i, n))
    }

    /// Load on each capacitated element. In vertex mode a vertex carries
    /// `max(in, out)` of every commodity.
    pub fn resource_loads(&self, g: &Graph) -> Vec<Rational> {
        let mut loads = vec![Rational::zero(); g.resource_count()];
        match g.mode() {
            Mode::EdgeDirected => {
                for c in &self.commodities {
                    for (&(u, v), x) in c {
                        if let Some(a) = g.arc_between(u, v) {
                            loads[g.arcs()[a].edge] += x;
                        }
                    }
                }
            }
            Mode::VertexUndirected => {
                for c in &self.commodities {
                    let mut ins = vec![Rational::zero(); g.n()];
                    let mut outs = vec![Rational::zero(); g.n()];
                    for (&(u, v), x) in c {
                        outs[u] += x;
                        ins[v] += x;
                    }
                    for v in 0..g.n() {
                        loads[v] += core::cmp::max(&ins[v], &outs[v]);
                    }
                }
            }
        }
        loads
    }

    pub fn totlen(&self, g: &Graph) -> Rational {
        let loads = self.resource_loads(g);
        loads
            .iter()
            .enumerate()
            .fold(Rational::zero(), |a, (r, x)| a + x * uint(g.resource_len(r)))
    }

    /// Least common denominator of all entries.
    pub fn fractionality(&self) -> num_bigint::BigInt {
        let mut l = num_bigint::BigInt::one();
        for c in &self.commodities {
            for x in c.values() {
                l = num_integer::Integer::lcm(&l, x.denom());
            }
        }
        l
    }

    pub fn check_arcs(&self, g: &Graph) -> Result<()> {
        for c in &self.commodities {
            for (&(u, v), x) in c {
                if g.arc_between(u, v).is_none() {
                    return Err(Error::InvalidFlow(format!("({u},{v}) is not an arc")));
                }
                if x.is_negative() {
                    return Err(Error::InvalidFlow(format!("negative flow on ({u},{v})")));
                }
            }
        }
        Ok(())
    }
}

pub fn congestion_of(g: &Graph, loads: &[Rational]) -> Rational {
    let mut c = Rational::zero();
    for (r, x) in loads.iter().enumerate() {
        let q = x / uint(g.resource_cap(r));
        if q > c {
            c = q;
        }
    }
    c
}

pub fn to_edge_representation(pf: &PathFlow) -> EdgeFlow {
    let mut ef = EdgeFlow::zero(pf.k);
    for p in &pf.paths {
        for w in p.vertices.windows(2) {
            ef.add(p.commodity, (w[0], w[1]), &p.value);
        }
    }
    ef
}

pub fn flow_stats(g: &Graph, f: &MultiFlow) -> FlowStats {
    match f {
        MultiFlow::Path(pf) => FlowStats {
            value: pf.value(),
            congestion: pf.congestion(g),
            length: Some(pf.length(g)),
            step: Some(pf.step()),
            totlen: pf.totlen(g),
        },
        MultiFlow::Edge(ef) => FlowStats {
            value: ef.value(g.n()),
            congestion: congestion_of(g, &ef.resource_loads(g)),
            length: None,
            step: None,
            totlen: ef.totlen(g),
        },
    }
}

/// Maximum path length and step; only defined for path form.
pub fn length_and_step(g: &Graph, f: &MultiFlow) -> Result<(u64, usize)> {
    match f {
        MultiFlow::Path(pf) => Ok((pf.length(g), pf.step())),
        MultiFlow::Edge(_) => Err(Error::PathFormRequired),
    }
}
