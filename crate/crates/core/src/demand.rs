use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::vec::Vec;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::num::{is_integral, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DemandValue {
    Finite(Rational),
    Infinite,
}

/// Demand of a single commodity between two vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DemandPair {
    pub source: usize,
    pub sink: usize,
    pub value: DemandValue,
}

/// A k-commodity demand. Commodity `i` asks for `value` units from
/// `source` to `sink`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Demand {
    pairs: Vec<DemandPair>,
}

/// Aggregated single-commodity view `(u, v) -> D(u, v)`.
pub type PairDemand = BTreeMap<(usize, usize), Rational>;

/// Source and sink vertex sets of one commodity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SourceSinkPair {
    pub sources: Vec<usize>,
    pub sinks: Vec<usize>,
}

impl SourceSinkPair {
    pub fn single(s: usize, t: usize) -> Self {
        SourceSinkPair { sources: alloc::vec![s], sinks: alloc::vec![t] }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        let s: BTreeSet<_> = self.sources.iter().collect();
        if self.sources.is_empty() || self.sinks.is_empty() {
            return Err(Error::InvalidDemand("empty source or sink set".into()));
        }
        for v in self.sources.iter().chain(&self.sinks) {
            if *v >= n {
                return Err(Error::InvalidDemand(format!("vertex {v} out of range")));
            }
        }
        if self.sinks.iter().any(|t| s.contains(t)) {
            return Err(Error::InvalidDemand("source and sink sets overlap".into()));
        }
        Ok(())
    }
}

impl Demand {
    pub fn new(pairs: Vec<DemandPair>) -> Result<Self> {
        for p in &pairs {
            if p.source == p.sink {
                return Err(Error::InvalidDemand(format!("D({0},{0}) must be zero", p.source)));
            }
            if let DemandValue::Finite(v) = &p.value {
                if v.is_negative() {
                    return Err(Error::InvalidDemand("negative demand".into()));
                }
            }
        }
        Ok(Demand { pairs })
    }

    pub fn finite(pairs: &[(usize, usize, Rational)]) -> Result<Self> {
        Self::new(
            pairs
                .iter()
                .map(|(s, t, v)| DemandPair { source: *s, sink: *t, value: DemandValue::Finite(v.clone()) })
                .collect(),
        )
    }

    pub fn k(&self) -> usize {
        self.pairs.len()
    }

    pub fn pairs(&self) -> &[DemandPair] {
        &self.pairs
    }

    pub fn check_vertices(&self, n: usize) -> Result<()> {
        for p in &self.pairs {
            if p.source >= n || p.sink >= n {
                return Err(Error::InvalidDemand(format!("pair ({},{}) out of range", p.source, p.sink)));
            }
        }
        Ok(())
    }

    /// Finite value of commodity `i`.
    pub fn value(&self, i: usize) -> Option<&Rational> {
        match &self.pairs[i].value {
            DemandValue::Finite(v) => Some(v),
            DemandValue::Infinite => None,
        }
    }

    /// `|D|`, or `None` if some commodity is unbounded.
    pub fn size(&self) -> Option<Rational> {
        let mut s = Rational::zero();
        for i in 0..self.k() {
            s += self.value(i)?;
        }
        Some(s)
    }

    pub fn is_integral(&self) -> bool {
        (0..self.k()).all(|i| self.value(i).map_or(false, is_integral))
    }

    pub fn aggregate(&self) -> Result<PairDemand> {
        let mut out = PairDemand::new();
        for (i, p) in self.pairs.iter().enumerate() {
            let v = self
                .value(i)
                .ok_or_else(|| Error::InvalidDemand("unbounded demand cannot be aggregated".into()))?;
            if !v.is_zero() {
                *out.entry((p.source, p.sink)).or_insert_with(Rational::zero) += v;
            }
        }
        Ok(out)
    }

    pub fn source_sink_pairs(&self) -> Vec<SourceSinkPair> {
        self.pairs.iter().map(|p| SourceSinkPair::single(p.source, p.sink)).collect()
    }
}

pub fn pair_demand_size(d: &PairDemand) -> Rational {
    d.values().fold(Rational::zero(), |a, b| a + b)
}

/// Node-weighting `A: V -> Q>=0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodeWeighting(pub Vec<Rational>);

impl NodeWeighting {
    pub fn new(values: Vec<Rational>) -> Result<Self> {
        if values.iter().any(|v| v.is_negative()) {
            return Err(Error::InvalidParameter("node weights must be nonnegative".into()));
        }
        Ok(NodeWeighting(values))
    }

    pub fn uniform(n: usize, v: Rational) -> Self {
        NodeWeighting(alloc::vec![v; n])
    }

    pub fn size(&self) -> Rational {
        self.0.iter().fold(Rational::zero(), |a, b| a + b)
    }

    pub fn get(&self, v: usize) -> &Rational {
        &self.0[v]
    }

    /// Checks `D(v, .) <= A(v)` and `D(., v) <= A(v)`; returns the first
    /// offending vertex.
    pub fn first_violation(&self, d: &PairDemand) -> Option<usize> {
        let (outs, ins) = endpoint_loads(d, self.0.len());
        (0..self.0.len()).find(|&v| outs[v] > self.0[v] || ins[v] > self.0[v])
    }

    pub fn respects(&self, d: &PairDemand) -> bool {
        self.first_violation(d).is_none()
    }
}

/// Per-vertex outgoing and incoming demand totals.
pub fn endpoint_loads(d: &PairDemand, n: usize) -> (Vec<Rational>, Vec<Rational>) {
    let mut outs = alloc::vec![Rational::zero(); n];
    let mut ins = alloc::vec![Rational::zero(); n];
    for (&(u, v), x) in d {
        outs[u] += x;
        ins[v] += x;
    }
    (outs, ins)
}
