//! Moving cuts, length separation and cut sparsity.
//!
//! A moving cut assigns each capacitated element (vertex in vertex mode,
//! edge in edge mode) a value that is a multiple of `1/h`. Applying it adds
//! `h * C(r)` to the length of element `r`.

mod matching;
mod union;

pub use matching::{
    build_demand_matching_graph, check_spg, greedy_forest_cover, matching_dispersed_demand,
    tree_matching_demand, DemandMatchingGraph, ForestCover, SpgReport, SpgViolation,
};
pub use union::{
    verify_union_witness, Assertion, CutSequenceWitness, SizeBound, UnionConfig, UnionReport,
    WitnessCheck, Witness,
};

use alloc::collections::BTreeMap;
use alloc::collections::VecDeque;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::demand::{pair_demand_size, NodeWeighting, PairDemand};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::num::{is_integral, uint, Rational};

/// Default vertex-count gate for the exact sparsity computation.
pub const SPARSITY_LIMIT: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MovingCut {
    h: u64,
    values: BTreeMap<usize, Rational>,
}

impl MovingCut {
    /// Builds a cut; every value must be a nonnegative multiple of `1/h`.
    /// Zero entries are dropped.
    pub fn new(h: u64, values: impl IntoIterator<Item = (usize, Rational)>) -> Result<Self> {
        if h == 0 {
            return Err(Error::InvalidParameter("cut length parameter must be positive".into()));
        }
        let mut map = BTreeMap::new();
        for (r, x) in values {
            if x.is_negative() || !is_integral(&(&x * uint(h))) {
                return Err(Error::NonIntegralIncrease { vertex: r });
            }
            if !x.is_zero() {
                *map.entry(r).or_insert_with(Rational::zero) += x;
            }
        }
        Ok(MovingCut { h, values: map })
    }

    /// Cut with value `num/h` on each listed element.
    pub fn from_numerators(h: u64, nums: &[(usize, u64)]) -> Result<Self> {
        Self::new(h, nums.iter().map(|&(r, k)| (r, Rational::new(BigInt::from(k), BigInt::from(h)))))
    }

    pub fn zero(h: u64) -> Self {
        MovingCut { h: h.max(1), values: BTreeMap::new() }
    }

    pub fn h(&self) -> u64 {
        self.h
    }

    pub fn values(&self) -> &BTreeMap<usize, Rational> {
        &self.values
    }

    pub fn get(&self, r: usize) -> Rational {
        self.values.get(&r).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    /// `|C| = sum_r U(r) C(r)`.
    pub fn size(&self, g: &Graph) -> Rational {
        self.values
            .iter()
            .filter(|(&r, _)| r < g.resource_count())
            .fold(Rational::zero(), |acc, (&r, x)| acc + uint(g.resource_cap(r)) * x)
    }

    /// Integral length increase `h * C(r)`.
    pub fn increase(&self, r: usize) -> u64 {
        match self.values.get(&r) {
            None => 0,
            Some(x) => (x * uint(self.h)).to_integer().to_u64().unwrap_or(u64::MAX),
        }
    }

    /// Same values, each multiplied by `k`.
    pub fn scaled(&self, k: u64) -> MovingCut {
        let values = self.values.iter().map(|(&r, x)| (r, x * uint(k))).filter(|(_, x)| !x.is_zero()).collect();
        MovingCut { h: self.h, values }
    }

    /// Same values under a different length parameter. Fails if some value
    /// is not a multiple of `1/h`.
    pub fn with_h(&self, h: u64) -> Result<MovingCut> {
        MovingCut::new(h, self.values.iter().map(|(&r, x)| (r, x.clone())))
    }

    /// Pointwise sum; all cuts must share one length parameter.
    pub fn sum<'a>(cuts: impl IntoIterator<Item = &'a MovingCut>) -> Result<MovingCut> {
        let mut h = None;
        let mut values: BTreeMap<usize, Rational> = BTreeMap::new();
        for c in cuts {
            match h {
                None => h = Some(c.h),
                Some(h0) if h0 != c.h => {
                    return Err(Error::InvalidParameter(format!(
                        "cuts with length parameters {h0} and {} cannot be summed",
                        c.h
                    )))
                }
                _ => {}
            }
            for (&r, x) in &c.values {
                *values.entry(r).or_insert_with(Rational::zero) += x;
            }
        }
        Ok(MovingCut { h: h.unwrap_or(1), values })
    }

    fn check_domain(&self, g: &Graph) -> Result<()> {
        match self.values.keys().next_back() {
            Some(&r) if r >= g.resource_count() => Err(Error::InvalidParameter(format!(
                "cut element {r} out of range (graph has {})",
                g.resource_count()
            ))),
            _ => Ok(()),
        }
    }
}

/// `G - C`: lengths grow by `h_C * C(r)`, capacities unchanged.
pub fn apply_cut(g: &Graph, c: &MovingCut) -> Result<Graph> {
    c.check_domain(g)?;
    if c.is_zero() {
        return Ok(g.clone());
    }
    let mut lens: Vec<u64> = (0..g.resource_count()).map(|r| g.resource_len(r)).collect();
    for (&r, x) in &c.values {
        let inc = x * uint(c.h);
        debug_assert!(is_integral(&inc));
        let inc = inc.to_integer().to_u64().ok_or(Error::NonIntegralIncrease { vertex: r })?;
        lens[r] = lens[r].checked_add(inc).ok_or_else(|| Error::InvalidParameter("length overflow".into()))?;
    }
    g.with_resource_lengths(&lens)
}

fn check_demand_vertices(g: &Graph, d: &PairDemand) -> Result<()> {
    for (&(u, v), x) in d {
        if u >= g.n() || v >= g.n() || u == v || x.is_negative() {
            return Err(Error::InvalidDemand(format!("bad demand entry ({u}, {v})")));
        }
    }
    Ok(())
}

/// `sep_h(C, D)`: total demand between pairs at distance more than `h` in `G - C`.
pub fn separated_demand(g: &Graph, c: &MovingCut, d: &PairDemand, h: u64) -> Result<Rational> {
    check_demand_vertices(g, d)?;
    let gc = apply_cut(g, c)?;
    let mut cache: BTreeMap<usize, Vec<Option<u64>>> = BTreeMap::new();
    let mut total = Rational::zero();
    for (&(u, v), x) in d {
        let dist = cache.entry(u).or_insert_with(|| gc.distances_from(u));
        if dist[v].map_or(true, |l| l > h) {
            total += x;
        }
    }
    Ok(total)
}

/// Exact sparsity together with a demand attaining it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sparsity {
    pub value: Rational,
    pub cut_size: Rational,
    pub separated: Rational,
    pub demand: PairDemand,
}

/// `spars_{(h,s)}(C, A)` with the default vertex gate.
pub fn cut_sparsity(g: &Graph, c: &MovingCut, a: &NodeWeighting, h: u64, s: u64) -> Result<Sparsity> {
    cut_sparsity_with_limit(g, c, a, h, h.saturating_mul(s), SPARSITY_LIMIT)
}

/// Sparsity of `C` against `A`-respecting demands whose pairs are within
/// distance `h` in `G` and beyond `threshold` in `G - C`.
///
/// The best demand puts weight only on such pairs, so the maximum is a
/// transportation problem: each vertex supplies at most `A(v)` as a source
/// and absorbs at most `A(v)` as a sink.
pub fn cut_sparsity_with_limit(
    g: &Graph,
    c: &MovingCut,
    a: &NodeWeighting,
    h: u64,
    threshold: u64,
    limit: usize,
) -> Result<Sparsity> {
    let n = g.n();
    if n > limit {
        return Err(Error::OracleBoundExceeded { size: n, limit });
    }
    if a.0.len() != n {
        return Err(Error::InvalidParameter("node-weighting size differs from graph".into()));
    }
    let pairs = eligible_pairs(g, c, h, threshold)?;
    let (value, demand) = max_transport(n, &a.0, &pairs);
    if value.is_zero() {
        return Err(Error::NoSeparatedDemand);
    }
    let cut_size = c.size(g);
    Ok(Sparsity { value: &cut_size / &value, cut_size, separated: value, demand })
}

/// Ordered pairs `(u, v)` with `dist_G <= h` and `dist_{G-C} > threshold`.
pub fn eligible_pairs(g: &Graph, c: &MovingCut, h: u64, threshold: u64) -> Result<Vec<(usize, usize)>> {
    let gc = apply_cut(g, c)?;
    let before = g.all_pairs_distances();
    let after = gc.all_pairs_distances();
    let mut out = Vec::new();
    for u in 0..g.n() {
        for v in 0..g.n() {
            if u != v
                && before[u][v].map_or(false, |l| l <= h)
                && after[u][v].map_or(true, |l| l > threshold)
            {
                out.push((u, v));
            }
        }
    }
    Ok(out)
}

/// Exact bipartite maxflow `source -> u_left -> v_right -> sink` with
/// left and right capacities `a` and uncapacitated middle arcs.
fn max_transport(n: usize, a: &[Rational], pairs: &[(usize, usize)]) -> (Rational, PairDemand) {
    // Nodes: 0 source, 1 sink, 2+u left, 2+n+v right.
    let nodes = 2 + 2 * n;
    let big = a.iter().fold(uint(1), |acc, x| acc + x);
    let mut cap: Vec<Rational> = Vec::new();
    let mut to: Vec<usize> = Vec::new();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); nodes];
    let mut add = |u: usize, v: usize, c: Rational, cap: &mut Vec<Rational>, to: &mut Vec<usize>| {
        adj[u].push(to.len());
        to.push(v);
        cap.push(c);
        adj[v].push(to.len());
        to.push(u);
        cap.push(Rational::zero());
    };
    for u in 0..n {
        add(0, 2 + u, a[u].clone(), &mut cap, &mut to);
        add(2 + n + u, 1, a[u].clone(), &mut cap, &mut to);
    }
    let mid_start = to.len();
    for &(u, v) in pairs {
        add(2 + u, 2 + n + v, big.clone(), &mut cap, &mut to);
    }
    let mut total = Rational::zero();
    loop {
        let mut prev: Vec<Option<usize>> = vec![None; nodes];
        let mut seen = vec![false; nodes];
        seen[0] = true;
        let mut queue = VecDeque::from([0usize]);
        while let Some(x) = queue.pop_front() {
            for &e in &adj[x] {
                let y = to[e];
                if !seen[y] && cap[e].is_positive() {
                    seen[y] = true;
                    prev[y] = Some(e);
                    queue.push_back(y);
                }
            }
        }
        if !seen[1] {
            break;
        }
        let mut bottleneck: Option<Rational> = None;
        let mut x = 1;
        while let Some(e) = prev[x] {
            bottleneck = Some(match bottleneck {
                None => cap[e].clone(),
                Some(b) => if cap[e] < b { cap[e].clone() } else { b },
            });
            x = to[e ^ 1];
        }
        let b = bottleneck.unwrap_or_else(Rational::zero);
        let mut x = 1;
        while let Some(e) = prev[x] {
            cap[e] -= &b;
            cap[e ^ 1] += &b;
            x = to[e ^ 1];
        }
        total += b;
    }
    let mut demand = PairDemand::new();
    for (i, &(u, v)) in pairs.iter().enumerate() {
        let routed = cap[mid_start + 2 * i + 1].clone();
        if routed.is_positive() {
            demand.insert((u, v), routed);
        }
    }
    debug_assert_eq!(pair_demand_size(&demand), total);
    (total, demand)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{int, ratio};
    use crate::oracle::lp::{maximize, Lp, LpOutcome, Sense};

    fn path3() -> Graph {
        Graph::vertex_weighted(vec![1, 1, 1], vec![1, 1, 1], &[(0, 1), (1, 2)]).unwrap()
    }

    #[test]
    fn zero_cut_is_identity() {
        let g = path3();
        assert_eq!(apply_cut(&g, &MovingCut::zero(3)).unwrap(), g);
    }

    #[test]
    fn full_cut_on_middle_vertex() {
        let g = path3();
        let c = MovingCut::from_numerators(3, &[(1, 3)]).unwrap();
        let gc = apply_cut(&g, &c).unwrap();
        assert_eq!(gc.vertex_len(1), 4);
        assert_eq!(gc.distances_from(0)[2], Some(6));
    }

    #[test]
    fn third_cut_adds_one() {
        let g = path3();
        let c = MovingCut::new(3, [(1, ratio(1, 3))]).unwrap();
        assert_eq!(apply_cut(&g, &c).unwrap().vertex_len(1), 2);
    }

    #[test]
    fn rejects_off_grid_values() {
        assert_eq!(MovingCut::new(3, [(0, ratio(1, 2))]), Err(Error::NonIntegralIncrease { vertex: 0 }));
        assert!(MovingCut::new(3, [(0, int(-1))]).is_err());
    }

    #[test]
    fn separation_examples() {
        let g = path3();
        let d: PairDemand = [((0, 2), int(2))].into_iter().collect();
        assert_eq!(separated_demand(&g, &MovingCut::zero(3), &d, 3).unwrap(), int(0));
        let c = MovingCut::from_numerators(3, &[(1, 3)]).unwrap();
        assert_eq!(separated_demand(&g, &c, &d, 3).unwrap(), int(2));
    }

    #[test]
    fn sparsity_single_pair() {
        // Two adjacent vertices; only vertex 0 carries weight as a source and
        // vertex 1 as a sink is impossible with a uniform A, so use A = (1, 0)
        // on an edge graph where only (0, 1) can be served once.
        let g = Graph::vertex_weighted(vec![1, 1, 1], vec![1, 1, 1], &[(0, 1), (1, 2)]).unwrap();
        let a = NodeWeighting(vec![int(1), int(0), int(1)]);
        // Cut vertex 1 fully with h_C = 6: distance 0 -> 2 becomes 9 > 6.
        let c = MovingCut::from_numerators(6, &[(1, 6)]).unwrap();
        let sp = cut_sparsity(&g, &c, &a, 3, 2).unwrap();
        // Pairs (0,2) and (2,0) are each served once: separated demand 2.
        assert_eq!(sp.separated, int(2));
        assert_eq!(sp.value, ratio(1, 2));
        let single = NodeWeighting(vec![int(1), int(0), int(0)]);
        assert_eq!(cut_sparsity(&g, &c, &single, 3, 2), Err(Error::NoSeparatedDemand));
    }

    #[test]
    fn sparsity_one_for_unit_pair() {
        // Directed edge graph: a single edge 0 -> 1 with capacity 1.
        use crate::graph::Edge;
        let g = Graph::edge_weighted(2, vec![Edge { tail: 0, head: 1, len: 1, cap: 1 }]).unwrap();
        let a = NodeWeighting(vec![int(1), int(1)]);
        let c = MovingCut::from_numerators(2, &[(0, 2)]).unwrap();
        let sp = cut_sparsity(&g, &c, &a, 1, 2).unwrap();
        assert_eq!(sp.cut_size, int(1));
        assert_eq!(sp.value, int(1));
    }

    #[test]
    fn no_separated_demand_without_cut() {
        let g = path3();
        let a = NodeWeighting::uniform(3, int(1));
        assert_eq!(cut_sparsity(&g, &MovingCut::zero(6), &a, 3, 2), Err(Error::NoSeparatedDemand));
    }

    #[test]
    fn gate_is_enforced() {
        let n = 17;
        let edges: Vec<(usize, usize)> = (0..n - 1).map(|i| (i, i + 1)).collect();
        let g = Graph::vertex_weighted(vec![1; n], vec![1; n], &edges).unwrap();
        let a = NodeWeighting::uniform(n, int(1));
        assert_eq!(
            cut_sparsity(&g, &MovingCut::zero(2), &a, 2, 2),
            Err(Error::OracleBoundExceeded { size: 17, limit: 16 })
        );
    }

    /// Independent LP formulation: one variable per eligible ordered pair.
    fn lp_max(n: usize, a: &[Rational], pairs: &[(usize, usize)]) -> Rational {
        let mut lp = Lp::new(pairs.len());
        lp.objective = vec![int(1); pairs.len()];
        for v in 0..n {
            let outs: Vec<(usize, Rational)> =
                pairs.iter().enumerate().filter(|(_, p)| p.0 == v).map(|(i, _)| (i, int(1))).collect();
            let ins: Vec<(usize, Rational)> =
                pairs.iter().enumerate().filter(|(_, p)| p.1 == v).map(|(i, _)| (i, int(1))).collect();
            lp.add_row(outs, Sense::Le, a[v].clone());
            lp.add_row(ins, Sense::Le, a[v].clone());
        }
        match maximize(&lp) {
            LpOutcome::Optimal { value, .. } => value,
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn transport_matches_lp_on_five_vertices() {
        let g = Graph::vertex_weighted(
            vec![1, 2, 1, 1, 2],
            vec![1, 1, 2, 1, 1],
            &[(0, 1), (1, 2), (2, 3), (3, 4), (0, 4), (1, 3)],
        )
        .unwrap();
        let a = NodeWeighting(vec![int(2), ratio(1, 2), int(1), ratio(3, 2), int(1)]);
        let c = MovingCut::new(8, [(1, ratio(1, 2)), (3, ratio(3, 4))]).unwrap();
        let pairs = eligible_pairs(&g, &c, 4, 8).unwrap();
        let sp = cut_sparsity_with_limit(&g, &c, &a, 4, 8, 16).unwrap();
        assert_eq!(sp.separated, lp_max(5, &a.0, &pairs));
        assert!(a.respects(&sp.demand));
    }
}
