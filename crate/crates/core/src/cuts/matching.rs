//! Demand matching graphs, parallel-greedy checks, forest covers and the
//! matching-dispersed demand.

use alloc::collections::{BTreeMap, VecDeque};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use num_traits::{ToPrimitive, Zero};

use crate::demand::{NodeWeighting, PairDemand};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::num::{is_integral, uint, Rational};

/// Multigraph over vertex copies with one matching per input demand.
///
/// Copies of original vertex `v` are the ids `offsets[v]..offsets[v + 1]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DemandMatchingGraph {
    pub offsets: Vec<usize>,
    pub owner: Vec<usize>,
    pub matchings: Vec<Vec<(usize, usize)>>,
}

impl DemandMatchingGraph {
    pub fn copy_count(&self) -> usize {
        self.owner.len()
    }

    pub fn copies_of(&self, v: usize) -> core::ops::Range<usize> {
        self.offsets[v]..self.offsets[v + 1]
    }

    /// All edges, tagged with the matching they came from.
    pub fn edges(&self) -> Vec<(usize, (usize, usize))> {
        self.matchings
            .iter()
            .enumerate()
            .flat_map(|(i, m)| m.iter().map(move |&e| (i, e)))
            .collect()
    }

    pub fn degree(&self, copy: usize) -> usize {
        self.matchings.iter().flatten().filter(|&&(x, y)| x == copy || y == copy).count()
    }
}

fn to_count(x: &Rational, what: &str) -> Result<usize> {
    if !is_integral(x) {
        return Err(Error::InvalidParameter(format!("{what} must be integral")));
    }
    x.to_integer()
        .to_usize()
        .ok_or_else(|| Error::InvalidParameter(format!("{what} out of range")))
}

/// Builds `G(D)`: `2A(v)` copies per vertex and, for each demand, a
/// matching with exactly `D_i(u, v)` edges from copies of `u` to copies of
/// `v`. Each unit takes the lowest unused copy on both sides.
pub fn build_demand_matching_graph(a: &NodeWeighting, ds: &[PairDemand]) -> Result<DemandMatchingGraph> {
    let n = a.0.len();
    let mut offsets = Vec::with_capacity(n + 1);
    let mut owner = Vec::new();
    offsets.push(0);
    for v in 0..n {
        let copies = 2 * to_count(a.get(v), "node weight")?;
        owner.extend(core::iter::repeat(v).take(copies));
        offsets.push(owner.len());
    }
    let mut matchings = Vec::with_capacity(ds.len());
    for d in ds {
        for (&(u, v), x) in d {
            if u >= n || v >= n || u == v {
                return Err(Error::InvalidDemand(format!("bad demand pair ({u}, {v})")));
            }
            to_count(x, "demand value")?;
        }
        if let Some(v) = a.first_violation(d) {
            return Err(Error::NotARespecting { vertex: v });
        }
        let mut next: Vec<usize> = offsets[..n].to_vec();
        let mut m = Vec::new();
        for (&(u, v), x) in d {
            for _ in 0..to_count(x, "demand value")? {
                let (cu, cv) = (next[u], next[v]);
                if cu >= offsets[u + 1] {
                    return Err(Error::NotARespecting { vertex: u });
                }
                if cv >= offsets[v + 1] {
                    return Err(Error::NotARespecting { vertex: v });
                }
                next[u] += 1;
                next[v] += 1;
                m.push((cu, cv));
            }
        }
        matchings.push(m);
    }
    Ok(DemandMatchingGraph { offsets, owner, matchings })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpgViolation {
    pub batch: usize,
    pub edge: (usize, usize),
    /// Hop distance in the union of earlier batches.
    pub distance: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpgReport {
    pub ok: bool,
    pub violation: Option<SpgViolation>,
}

/// Checks the `s`-parallel-greedy condition: every batch is a matching and
/// every edge of batch `i` joins vertices more than `s` hops apart in the
/// union of batches `0..i`.
pub fn check_spg(n: usize, batches: &[Vec<(usize, usize)>], s: usize) -> Result<SpgReport> {
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, batch) in batches.iter().enumerate() {
        let mut used = vec![false; n];
        for &(u, v) in batch {
            if u >= n || v >= n || u == v || used[u] || used[v] {
                return Err(Error::InvalidParameter(format!("batch {i} is not a matching")));
            }
            used[u] = true;
            used[v] = true;
        }
        for &(u, v) in batch {
            if let Some(d) = hop_distance_within(&adj, u, v, s) {
                return Ok(SpgReport {
                    ok: false,
                    violation: Some(SpgViolation { batch: i, edge: (u, v), distance: d }),
                });
            }
        }
        for &(u, v) in batch {
            adj[u].push(v);
            adj[v].push(u);
        }
    }
    Ok(SpgReport { ok: true, violation: None })
}

fn hop_distance_within(adj: &[Vec<usize>], u: usize, v: usize, limit: usize) -> Option<usize> {
    let mut dist = vec![usize::MAX; adj.len()];
    dist[u] = 0;
    let mut queue = VecDeque::from([u]);
    while let Some(x) = queue.pop_front() {
        if x == v {
            return Some(dist[x]);
        }
        if dist[x] == limit {
            continue;
        }
        for &y in &adj[x] {
            if dist[y] == usize::MAX {
                dist[y] = dist[x] + 1;
                queue.push_back(y);
            }
        }
    }
    None
}

/// Forests over the copies of a demand matching graph; each forest is a
/// list of edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ForestCover {
    pub forests: Vec<Vec<(usize, usize)>>,
}

impl ForestCover {
    pub fn alpha(&self) -> usize {
        self.forests.len()
    }
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Repeatedly peels a maximal spanning forest off the remaining edges.
pub fn greedy_forest_cover(g: &DemandMatchingGraph) -> ForestCover {
    let mut remaining: Vec<(usize, usize)> = g.matchings.iter().flatten().copied().collect();
    let mut forests = Vec::new();
    while !remaining.is_empty() {
        let mut parent: Vec<usize> = (0..g.copy_count()).collect();
        let mut forest = Vec::new();
        let mut rest = Vec::new();
        for (u, v) in remaining {
            let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
            if ru != rv {
                parent[ru] = rv;
                forest.push((u, v));
            } else {
                rest.push((u, v));
            }
        }
        forests.push(forest);
        remaining = rest;
    }
    ForestCover { forests }
}

/// Tree matching demand of a tree given by its edges.
///
/// The tree is rooted at its smallest label. At each internal vertex the
/// children (plus the vertex itself when the child count is odd) are sorted
/// and paired consecutively; every matched pair gets demand 1 in both
/// directions.
pub fn tree_matching_demand(edges: &[(usize, usize)]) -> Result<PairDemand> {
    let mut adj: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &(u, v) in edges {
        if u == v {
            return Err(Error::InvalidParameter("tree edge is a self-loop".into()));
        }
        adj.entry(u).or_default().push(v);
        adj.entry(v).or_default().push(u);
    }
    let mut demand = PairDemand::new();
    let root = match adj.keys().next() {
        None => return Ok(demand),
        Some(&r) => r,
    };
    if edges.len() + 1 != adj.len() {
        return Err(Error::InvalidParameter("edge set is not a tree".into()));
    }
    let mut parent: BTreeMap<usize, usize> = BTreeMap::new();
    let mut order = vec![root];
    parent.insert(root, root);
    let mut head = 0;
    while head < order.len() {
        let x = order[head];
        head += 1;
        for &y in &adj[&x] {
            if !parent.contains_key(&y) {
                parent.insert(y, x);
                order.push(y);
            }
        }
    }
    if order.len() != adj.len() {
        return Err(Error::InvalidParameter("edge set is not a tree".into()));
    }
    for &v in &order {
        let mut group: Vec<usize> = adj[&v].iter().copied().filter(|&c| v == root || c != parent[&v]).collect();
        if group.is_empty() {
            continue;
        }
        if group.len() % 2 == 1 {
            group.push(v);
        }
        group.sort_unstable();
        for pair in group.chunks(2) {
            *demand.entry((pair[0], pair[1])).or_insert_with(Rational::zero) += uint(1);
            *demand.entry((pair[1], pair[0])).or_insert_with(Rational::zero) += uint(1);
        }
    }
    Ok(demand)
}

fn components(edges: &[(usize, usize)]) -> Vec<Vec<(usize, usize)>> {
    let mut labels: BTreeMap<usize, usize> = BTreeMap::new();
    for &(u, v) in edges {
        let k = labels.len();
        labels.entry(u).or_insert(k);
        let k = labels.len();
        labels.entry(v).or_insert(k);
    }
    let mut parent: Vec<usize> = (0..labels.len()).collect();
    for &(u, v) in edges {
        let (ru, rv) = (find(&mut parent, labels[&u]), find(&mut parent, labels[&v]));
        if ru != rv {
            parent[ru] = rv;
        }
    }
    let mut groups: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
    for &(u, v) in edges {
        let r = find(&mut parent, labels[&u]);
        groups.entry(r).or_default().push((u, v));
    }
    groups.into_values().collect()
}

fn unordered(e: (usize, usize)) -> (usize, usize) {
    (e.0.min(e.1), e.0.max(e.1))
}

/// `MD(u, v) = (1/(4 alpha)) * sum over trees T of the cover, summed over
/// copies u' of u and v' of v, of D_T(u', v')`.
///
/// Pairs of copies with the same owner contribute nothing, since a demand
/// has no diagonal.
pub fn matching_dispersed_demand(
    g: &Graph,
    a: &NodeWeighting,
    ds: &[PairDemand],
    cover: &ForestCover,
) -> Result<PairDemand> {
    if a.0.len() != g.n() {
        return Err(Error::InvalidParameter("node-weighting size differs from graph".into()));
    }
    let dmg = build_demand_matching_graph(a, ds)?;
    dispersed_from_graph(&dmg, cover)
}

pub(crate) fn dispersed_from_graph(dmg: &DemandMatchingGraph, cover: &ForestCover) -> Result<PairDemand> {
    let mut want: Vec<(usize, usize)> = dmg.matchings.iter().flatten().map(|&e| unordered(e)).collect();
    let mut have: Vec<(usize, usize)> = cover.forests.iter().flatten().map(|&e| unordered(e)).collect();
    want.sort_unstable();
    have.sort_unstable();
    if want != have {
        return Err(Error::CoverIncomplete);
    }
    let mut md = PairDemand::new();
    if cover.alpha() == 0 {
        return Ok(md);
    }
    for forest in &cover.forests {
        for tree in components(forest) {
            for ((x, y), val) in tree_matching_demand(&tree)? {
                let (u, v) = (dmg.owner[x], dmg.owner[y]);
                if u != v {
                    *md.entry((u, v)).or_insert_with(Rational::zero) += val;
                }
            }
        }
    }
    let scale = Rational::new(1.into(), (4 * cover.alpha()).into());
    for x in md.values_mut() {
        *x *= &scale;
    }
    md.retain(|_, x| !x.is_zero());
    Ok(md)
}
