//! Graph model shared by every algorithm.
//!
//! Two modes exist. In vertex mode the graph is undirected and lengths and
//! capacities sit on vertices; a path's length counts every vertex on it,
//! endpoints included. In edge mode the graph is directed and lengths and
//! capacities sit on edges.
//!
//! Both modes expose *arcs* (directed adjacencies) and *resources* (the
//! capacitated elements: vertices in vertex mode, edges in edge mode).

use alloc::collections::{BTreeMap, BinaryHeap};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Reverse;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Mode {
    VertexUndirected,
    EdgeDirected,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub tail: usize,
    pub head: usize,
    pub len: u64,
    pub cap: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Arc {
    pub tail: usize,
    pub head: usize,
    pub edge: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    mode: Mode,
    n: usize,
    vlen: Vec<u64>,
    vcap: Vec<u64>,
    edges: Vec<Edge>,
    arcs: Vec<Arc>,
    out: Vec<Vec<usize>>,
    inc: Vec<Vec<usize>>,
    arc_of: BTreeMap<(usize, usize), usize>,
}

impl Graph {
    /// Undirected graph with vertex lengths and capacities.
    pub fn vertex_weighted(lens: Vec<u64>, caps: Vec<u64>, edges: &[(usize, usize)]) -> Result<Self> {
        if lens.len() != caps.len() {
            return Err(Error::InvalidGraph("length and capacity lists differ in size".into()));
        }
        let n = lens.len();
        for v in 0..n {
            if lens[v] == 0 || caps[v] == 0 {
                return Err(Error::InvalidGraph(format!(
                    "vertex {v} needs positive length and capacity"
                )));
            }
        }
        let mut es = Vec::with_capacity(edges.len());
        for &(u, v) in edges {
            es.push(Edge { tail: u, head: v, len: 0, cap: 0 });
        }
        Self::assemble(Mode::VertexUndirected, n, lens, caps, es)
    }

    /// Directed graph with positive edge lengths and capacities.
    pub fn edge_weighted(n: usize, edges: Vec<Edge>) -> Result<Self> {
        for (i, e) in edges.iter().enumerate() {
            if e.len == 0 {
                return Err(Error::InvalidGraph(format!("edge {i} has zero length")));
            }
        }
        Self::edge_weighted_with_connectors(n, edges)
    }

    /// Directed graph that may contain zero-length connector edges, as
    /// produced by vertex splitting. Capacities must still be positive.
    pub fn edge_weighted_with_connectors(n: usize, edges: Vec<Edge>) -> Result<Self> {
        for (i, e) in edges.iter().enumerate() {
            if e.cap == 0 {
                return Err(Error::InvalidGraph(format!("edge {i} has zero capacity")));
            }
        }
        Self::assemble(Mode::EdgeDirected, n, Vec::new(), Vec::new(), edges)
    }

    fn assemble(mode: Mode, n: usize, vlen: Vec<u64>, vcap: Vec<u64>, edges: Vec<Edge>) -> Result<Self> {
        let mut arcs = Vec::new();
        let mut arc_of = BTreeMap::new();
        for (i, e) in edges.iter().enumerate() {
            if e.tail >= n || e.head >= n {
                return Err(Error::InvalidGraph(format!("edge {i} has an endpoint out of range")));
            }
            if e.tail == e.head {
                return Err(Error::InvalidGraph(format!("edge {i} is a self-loop")));
            }
            let dirs: &[(usize, usize)] = match mode {
                Mode::EdgeDirected => &[(e.tail, e.head)],
                Mode::VertexUndirected => &[(e.tail, e.head), (e.head, e.tail)],
            };
            for &(t, h) in dirs {
                if arc_of.insert((t, h), arcs.len()).is_some() {
                    return Err(Error::InvalidGraph(format!("duplicate edge {}-{}", e.tail, e.head)));
                }
                arcs.push(Arc { tail: t, head: h, edge: i });
            }
        }
        let mut out = vec![Vec::new(); n];
        let mut inc = vec![Vec::new(); n];
        for (a, arc) in arcs.iter().enumerate() {
            out[arc.tail].push(a);
            inc[arc.head].push(a);
        }
        Ok(Graph { mode, n, vlen, vcap, edges, arcs, out, inc, arc_of })
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn arc_between(&self, u: usize, v: usize) -> Option<usize> {
        self.arc_of.get(&(u, v)).copied()
    }

    pub fn out_arcs(&self, v: usize) -> &[usize] {
        &self.out[v]
    }

    pub fn in_arcs(&self, v: usize) -> &[usize] {
        &self.inc[v]
    }

    pub fn vertex_len(&self, v: usize) -> u64 {
        self.vlen[v]
    }

    pub fn vertex_cap(&self, v: usize) -> u64 {
        self.vcap[v]
    }

    pub fn vertex_lens(&self) -> &[u64] {
        &self.vlen
    }

    pub fn vertex_caps(&self) -> &[u64] {
        &self.vcap
    }

    /// Number of capacitated elements.
    pub fn resource_count(&self) -> usize {
        match self.mode {
            Mode::VertexUndirected => self.n,
            Mode::EdgeDirected => self.edges.len(),
        }
    }

    pub fn resource_cap(&self, r: usize) -> u64 {
        match self.mode {
            Mode::VertexUndirected => self.vcap[r],
            Mode::EdgeDirected => self.edges[r].cap,
        }
    }

    pub fn resource_len(&self, r: usize) -> u64 {
        match self.mode {
            Mode::VertexUndirected => self.vlen[r],
            Mode::EdgeDirected => self.edges[r].len,
        }
    }

    /// Resources used by a vertex sequence, or `None` if it is not a walk.
    pub fn path_resources(&self, path: &[usize]) -> Option<Vec<usize>> {
        if path.is_empty() || path.iter().any(|&v| v >= self.n) {
            return None;
        }
        match self.mode {
            Mode::VertexUndirected => {
                for w in path.windows(2) {
                    self.arc_between(w[0], w[1])?;
                }
                Some(path.to_vec())
            }
            Mode::EdgeDirected => path
                .windows(2)
                .map(|w| self.arc_between(w[0], w[1]).map(|a| self.arcs[a].edge))
                .collect(),
        }
    }

    pub fn path_length(&self, path: &[usize]) -> Option<u64> {
        self.path_resources(path)
            .map(|rs| rs.iter().map(|&r| self.resource_len(r)).sum())
    }

    /// Length contributed by traversing arc `a` (its head vertex in vertex mode).
    pub fn arc_len(&self, a: usize) -> u64 {
        let arc = &self.arcs[a];
        match self.mode {
            Mode::VertexUndirected => self.vlen[arc.head],
            Mode::EdgeDirected => self.edges[arc.edge].len,
        }
    }

    /// Length charged for starting a path at `v`.
    pub fn start_len(&self, v: usize) -> u64 {
        match self.mode {
            Mode::VertexUndirected => self.vlen[v],
            Mode::EdgeDirected => 0,
        }
    }

    /// Shortest path lengths from `s`, `None` where unreachable.
    pub fn distances_from(&self, s: usize) -> Vec<Option<u64>> {
        let mut dist: Vec<Option<u64>> = vec![None; self.n];
        let mut heap = BinaryHeap::new();
        dist[s] = Some(self.start_len(s));
        heap.push(Reverse((self.start_len(s), s)));
        while let Some(Reverse((d, v))) = heap.pop() {
            if dist[v] != Some(d) {
                continue;
            }
            for &a in &self.out[v] {
                let w = self.arcs[a].head;
                let nd = d + self.arc_len(a);
                if dist[w].map_or(true, |old| nd < old) {
                    dist[w] = Some(nd);
                    heap.push(Reverse((nd, w)));
                }
            }
        }
        dist
    }

    pub fn all_pairs_distances(&self) -> Vec<Vec<Option<u64>>> {
        (0..self.n).map(|s| self.distances_from(s)).collect()
    }

    /// Same topology with new vertex lengths (vertex mode only).
    pub fn with_vertex_lengths(&self, lens: Vec<u64>) -> Result<Self> {
        if self.mode != Mode::VertexUndirected || lens.len() != self.n {
            return Err(Error::InvalidGraph("vertex lengths need a vertex-mode graph of equal size".into()));
        }
        let mut g = self.clone();
        if lens.iter().any(|&l| l == 0) {
            return Err(Error::InvalidGraph("vertex lengths must be positive".into()));
        }
        g.vlen = lens;
        Ok(g)
    }

    /// Same topology with new lengths on every resource. Zero is accepted
    /// only where the original length was already zero (split connectors).
    pub fn with_resource_lengths(&self, lens: &[u64]) -> Result<Self> {
        if lens.len() != self.resource_count() {
            return Err(Error::InvalidGraph("one length per resource expected".into()));
        }
        if (0..lens.len()).any(|r| lens[r] == 0 && self.resource_len(r) != 0) {
            return Err(Error::InvalidGraph("lengths must be positive".into()));
        }
        let mut g = self.clone();
        match self.mode {
            Mode::VertexUndirected => g.vlen = lens.to_vec(),
            Mode::EdgeDirected => {
                for (e, &l) in g.edges.iter_mut().zip(lens) {
                    e.len = l;
                }
            }
        }
        Ok(g)
    }

    /// Same topology with new capacities on every resource.
    pub fn with_resource_caps(&self, caps: &[u64]) -> Result<Self> {
        if caps.len() != self.resource_count() || caps.iter().any(|&c| c == 0) {
            return Err(Error::InvalidGraph("capacities must be positive, one per resource".into()));
        }
        let mut g = self.clone();
        match self.mode {
            Mode::VertexUndirected => g.vcap = caps.to_vec(),
            Mode::EdgeDirected => {
                for (e, &c) in g.edges.iter_mut().zip(caps) {
                    e.cap = c;
                }
            }
        }
        Ok(g)
    }

    /// Largest length or capacity in the graph (at least 1).
    pub fn value_bound(&self) -> u64 {
        let mut nb = 1;
        for &x in self.vlen.iter().chain(self.vcap.iter()) {
            nb = nb.max(x);
        }
        if self.mode == Mode::EdgeDirected {
            for e in &self.edges {
                nb = nb.max(e.len).max(e.cap);
            }
        }
        nb
    }
}

/// Directed image of a vertex-mode graph: vertex `v` becomes `2v` (in) and
/// `2v + 1` (out) joined by an edge carrying its length and capacity.
#[derive(Clone, Debug)]
pub struct SplitGraph {
    pub graph: Graph,
    pub original_n: usize,
    /// Edge id of `v_in -> v_out` for each original vertex.
    pub vertex_edge: Vec<usize>,
    pub connector_cap: u64,
}

impl SplitGraph {
    pub fn v_in(v: usize) -> usize {
        2 * v
    }

    pub fn v_out(v: usize) -> usize {
        2 * v + 1
    }

    pub fn original(x: usize) -> usize {
        x / 2
    }

    /// Maps a split-graph walk to the original vertex sequence.
    pub fn project_path(&self, path: &[usize]) -> Vec<usize> {
        let mut out: Vec<usize> = Vec::new();
        for &x in path {
            if x >= 2 * self.original_n {
                continue;
            }
            let v = Self::original(x);
            if out.last() != Some(&v) {
                out.push(v);
            }
        }
        out
    }

    /// Maps an original vertex path to the split graph (`u_in ... v_out`).
    pub fn lift_path(&self, path: &[usize]) -> Vec<usize> {
        let mut out = Vec::with_capacity(2 * path.len());
        for &v in path {
            out.push(Self::v_in(v));
            out.push(Self::v_out(v));
        }
        out
    }
}

pub fn split_vertices(g: &Graph) -> Result<SplitGraph> {
    if g.mode() != Mode::VertexUndirected {
        return Err(Error::InvalidGraph("vertex splitting needs a vertex-mode graph".into()));
    }
    let n = g.n();
    let conn = g.vertex_caps().iter().sum::<u64>().max(1);
    let mut edges = Vec::with_capacity(n + 2 * g.m());
    let mut vertex_edge = Vec::with_capacity(n);
    for v in 0..n {
        vertex_edge.push(edges.len());
        edges.push(Edge {
            tail: SplitGraph::v_in(v),
            head: SplitGraph::v_out(v),
            len: g.vertex_len(v),
            cap: g.vertex_cap(v),
        });
    }
    for e in g.edges() {
        let (u, v) = (e.tail, e.head);
        edges.push(Edge { tail: SplitGraph::v_out(u), head: SplitGraph::v_in(v), len: 0, cap: conn });
        edges.push(Edge { tail: SplitGraph::v_out(v), head: SplitGraph::v_in(u), len: 0, cap: conn });
    }
    let graph = Graph::edge_weighted_with_connectors(2 * n, edges)?;
    Ok(SplitGraph { graph, original_n: n, vertex_edge, connector_cap: conn })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path_abc(lb: u64) -> Graph {
        Graph::vertex_weighted(vec![1, lb, 1], vec![1, 1, 1], &[(0, 1), (1, 2)]).unwrap()
    }

    #[test]
    fn triangle_split_counts() {
        let g = Graph::vertex_weighted(vec![1; 3], vec![1; 3], &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let s = split_vertices(&g).unwrap();
        assert_eq!(s.graph.n(), 6);
        let vertex_edges = s.graph.edges().iter().filter(|e| e.len > 0).count();
        assert_eq!(vertex_edges, 3);
        assert_eq!(s.graph.m() - vertex_edges, 6);
    }

    #[test]
    fn single_vertex_split() {
        let g = Graph::vertex_weighted(vec![2], vec![3], &[]).unwrap();
        let s = split_vertices(&g).unwrap();
        assert_eq!((s.graph.n(), s.graph.m()), (2, 1));
    }

    #[test]
    fn split_preserves_path_length() {
        let g = path_abc(5);
        let s = split_vertices(&g).unwrap();
        let lifted = s.lift_path(&[0, 1, 2]);
        assert_eq!(s.graph.path_length(&lifted), Some(7));
        assert_eq!(g.path_length(&[0, 1, 2]), Some(7));
        assert_eq!(s.project_path(&lifted), vec![0, 1, 2]);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(Graph::vertex_weighted(vec![0], vec![1], &[]).is_err());
        assert!(Graph::vertex_weighted(vec![1, 1], vec![1, 1], &[(0, 0)]).is_err());
        assert!(Graph::vertex_weighted(vec![1, 1], vec![1, 1], &[(0, 1), (1, 0)]).is_err());
        let e = Edge { tail: 0, head: 1, len: 0, cap: 1 };
        assert!(Graph::edge_weighted(2, vec![e]).is_err());
        let g = Graph::edge_weighted(2, vec![Edge { tail: 0, head: 1, len: 1, cap: 1 }]).unwrap();
        assert!(split_vertices(&g).is_err());
    }

    #[test]
    fn vertex_distances_count_endpoints() {
        let g = path_abc(1);
        let d = g.distances_from(0);
        assert_eq!(d, vec![Some(1), Some(2), Some(3)]);
    }
}
