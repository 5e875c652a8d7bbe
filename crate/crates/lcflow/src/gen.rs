//! Seeded random instance generators shared by the tests and the acceptance
//! harness.

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use lcflow_core::cuts::{CutSequenceWitness, MovingCut};
use lcflow_core::demand::{Demand, NodeWeighting, SourceSinkPair};
use lcflow_core::graph::{Edge, Graph};
use lcflow_core::maxflow::dag::{DagCommodity, DagEdge, LayeredDag};
use lcflow_core::num::Rational;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `m` distinct ordered (or unordered) vertex pairs, at most all of them.
fn distinct_pairs(r: &mut ChaCha8Rng, n: usize, m: usize, directed: bool) -> Vec<(usize, usize)> {
    let mut all: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (0..n).map(move |v| (u, v)))
        .filter(|&(u, v)| if directed { u != v } else { u < v })
        .collect();
    all.shuffle(r);
    all.truncate(m);
    all.sort_unstable();
    all
}

/// Directed edge-weighted graph with lengths in `1..=max_len` and
/// capacities in `1..=max_cap`.
pub fn edge_graph(r: &mut ChaCha8Rng, n: usize, m: usize, max_len: u64, max_cap: u64) -> Graph {
    let edges = distinct_pairs(r, n, m, true)
        .into_iter()
        .map(|(u, v)| Edge { tail: u, head: v, len: r.gen_range(1..=max_len), cap: r.gen_range(1..=max_cap) })
        .collect();
    Graph::edge_weighted(n, edges).expect("generated graph is valid")
}

/// Undirected vertex-weighted graph.
pub fn vertex_graph(r: &mut ChaCha8Rng, n: usize, m: usize, max_len: u64, max_cap: u64) -> Graph {
    let edges = distinct_pairs(r, n, m, false);
    let lens = (0..n).map(|_| r.gen_range(1..=max_len)).collect();
    let caps = (0..n).map(|_| r.gen_range(1..=max_cap)).collect();
    Graph::vertex_weighted(lens, caps, &edges).expect("generated graph is valid")
}

/// `k` single-vertex commodities with distinct endpoints.
pub fn single_pairs(r: &mut ChaCha8Rng, n: usize, k: usize) -> Vec<(usize, usize)> {
    (0..k)
        .map(|_| {
            let s = r.gen_range(0..n);
            let mut t = r.gen_range(0..n - 1);
            if t >= s {
                t += 1;
            }
            (s, t)
        })
        .collect()
}

pub fn source_sink_pairs(r: &mut ChaCha8Rng, n: usize, k: usize) -> Vec<SourceSinkPair> {
    single_pairs(r, n, k).into_iter().map(|(s, t)| SourceSinkPair::single(s, t)).collect()
}

/// Integral demand with values in `1..=max_val`.
pub fn integral_demand(r: &mut ChaCha8Rng, n: usize, k: usize, max_val: u64) -> Demand {
    let triples: Vec<(usize, usize, Rational)> = single_pairs(r, n, k)
        .into_iter()
        .map(|(s, t)| (s, t, Rational::from_integer(r.gen_range(1..=max_val).into())))
        .collect();
    Demand::finite(&triples).expect("generated demand is valid")
}

/// Layered DAG with `layers` layers of `width` nodes; every node gets one
/// to three random edges into the next layer. Commodities draw sources
/// from the first layer and sinks from the last.
pub fn layered_dag(r: &mut ChaCha8Rng, layers: usize, width: usize, k: usize, max_cap: u64) -> LayeredDag {
    let n = layers * width;
    let node = |l: usize, i: usize| l * width + i;
    let mut edges = Vec::new();
    for l in 0..layers - 1 {
        for i in 0..width {
            let mut heads: Vec<usize> = (0..width).collect();
            heads.shuffle(r);
            for &j in heads.iter().take(r.gen_range(1..=3.min(width))) {
                edges.push(DagEdge { tail: node(l, i), head: node(l + 1, j), cap: r.gen_range(1..=max_cap) });
            }
        }
    }
    let commodities = (0..k)
        .map(|_| {
            let mut src: Vec<usize> = (0..width).filter(|_| r.gen_bool(0.5)).map(|i| node(0, i)).collect();
            let mut snk: Vec<usize> = (0..width).filter(|_| r.gen_bool(0.5)).map(|i| node(layers - 1, i)).collect();
            if src.is_empty() {
                src.push(node(0, r.gen_range(0..width)));
            }
            if snk.is_empty() {
                snk.push(node(layers - 1, r.gen_range(0..width)));
            }
            DagCommodity { sources: src, sinks: snk }
        })
        .collect();
    LayeredDag::new(n, edges, commodities).expect("layers give an acyclic graph")
}

/// A cut-sequence witness: random multi-vertex cuts on the `hs` grid,
/// keeping only cuts that separate some demand in the current graph.
/// Returns `None` when no cut of the draw separates anything.
pub fn cut_witness(
    r: &mut ChaCha8Rng,
    g: &Graph,
    a: &NodeWeighting,
    h: u64,
    s: u64,
    max_cuts: usize,
) -> Option<CutSequenceWitness> {
    let n = g.n();
    let hs = h * s;
    let mut current = g.clone();
    let mut cuts = Vec::new();
    for _ in 0..max_cuts {
        let size = r.gen_range(1..=2.min(n));
        let mut vs: Vec<usize> = (0..n).collect();
        vs.shuffle(r);
        let nums: Vec<(usize, u64)> = vs[..size].iter().map(|&v| (v, r.gen_range(hs / 2..=2 * hs))).collect();
        let cut = MovingCut::from_numerators(hs, &nums).ok()?;
        let sep = lcflow_core::cuts::cut_sparsity_with_limit(&current, &cut, a, h, hs, usize::MAX);
        if sep.is_ok() {
            current = lcflow_core::cuts::apply_cut(&current, &cut).ok()?;
            cuts.push(cut);
        }
    }
    if cuts.is_empty() {
        return None;
    }
    CutSequenceWitness::from_cuts(g, a, cuts, h, s).ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_are_seeded() {
        let a = edge_graph(&mut rng(3), 6, 10, 3, 2);
        let b = edge_graph(&mut rng(3), 6, 10, 3, 2);
        assert_eq!(a, b);
        assert_eq!(a.m(), 10);
        let d = layered_dag(&mut rng(1), 4, 3, 2, 3);
        assert_eq!(d.depth(), 3);
    }
}
