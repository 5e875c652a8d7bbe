//! Neighborhood covers by seeded sequential ball carving.

use alloc::vec;
use alloc::vec::Vec;
use num_traits::{Signed, ToPrimitive};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{Graph, Mode};
use crate::num::{floor_int, uint, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NeighborhoodCover {
    pub h_cov: u64,
    pub h_diam: Rational,
    /// Each clustering is a list of disjoint clusters; each cluster is a
    /// sorted list of vertex ids.
    pub clusterings: Vec<Vec<Vec<usize>>>,
}

impl NeighborhoodCover {
    pub fn width(&self) -> usize {
        self.clusterings.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoverViolation {
    Overlap { clustering: usize, vertex: usize },
    Diameter { clustering: usize, cluster: usize, u: usize, v: usize, distance: Option<u64> },
    Uncovered { vertex: usize },
}

/// Vertices within distance `r` of `v` (endpoint lengths included).
pub fn ball(dist_row: &[Option<u64>], r: u64) -> Vec<usize> {
    (0..dist_row.len()).filter(|&u| dist_row[u].map_or(false, |d| d <= r)).collect()
}

/// Builds a cover with `h_diam = beta * h_cov`.
///
/// Each round shuffles the vertices (those whose ball is still uncovered
/// first) and carves `Ball(c, R)` out of the unassigned vertices around each
/// unassigned center `c`, where `R = min(h_cov + X, beta * h_cov / 2)` and
/// `X` is exponential. Rounds repeat until every `h_cov`-ball lies inside
/// one cluster. The first center of a round always covers its own ball, so
/// the loop terminates after at most `n` rounds.
pub fn build_cover(g: &Graph, h_cov: u64, beta: &Rational, seed: u64) -> Result<NeighborhoodCover> {
    if g.mode() != Mode::VertexUndirected {
        return Err(Error::InvalidGraph("covers need a vertex-weighted graph".into()));
    }
    if *beta < uint(2) || !beta.is_positive() {
        return Err(Error::InvalidParameter("beta must be at least 2".into()));
    }
    if h_cov == 0 {
        return Err(Error::InvalidParameter("covering radius must be positive".into()));
    }
    let n = g.n();
    let dist = g.all_pairs_distances();
    let r_max = floor_int(&(beta * uint(h_cov) / uint(2))).to_u64().unwrap_or(u64::MAX).max(h_cov);
    let mean = (r_max - h_cov) as f64 / libm::log(n.max(2) as f64 + 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let balls: Vec<Vec<usize>> = (0..n).map(|v| ball(&dist[v], h_cov)).collect();

    let mut covered = vec![false; n];
    let mut clusterings = Vec::new();
    while covered.iter().any(|&c| !c) {
        let mut first: Vec<usize> = (0..n).filter(|&v| !covered[v]).collect();
        let mut rest: Vec<usize> = (0..n).filter(|&v| covered[v]).collect();
        first.shuffle(&mut rng);
        rest.shuffle(&mut rng);
        let mut cluster_of = vec![usize::MAX; n];
        let mut clusters: Vec<Vec<usize>> = Vec::new();
        for c in first.into_iter().chain(rest) {
            if cluster_of[c] != usize::MAX {
                continue;
            }
            let u: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
            let x = -libm::log(u) * mean;
            let r = if x >= (r_max - h_cov) as f64 { r_max } else { h_cov + x as u64 };
            let members: Vec<usize> =
                ball(&dist[c], r).into_iter().filter(|&w| cluster_of[w] == usize::MAX).collect();
            for &w in &members {
                cluster_of[w] = clusters.len();
            }
            clusters.push(members);
        }
        for v in 0..n {
            if !covered[v] && balls[v].iter().all(|&w| cluster_of[w] == cluster_of[v]) {
                covered[v] = true;
            }
        }
        clusterings.push(clusters);
    }
    Ok(NeighborhoodCover { h_cov, h_diam: beta * uint(h_cov), clusterings })
}

/// Exhaustive validity check of the three cover invariants.
pub fn validate_cover(g: &Graph, cover: &NeighborhoodCover) -> core::result::Result<(), CoverViolation> {
    let n = g.n();
    let dist = g.all_pairs_distances();
    for (i, clustering) in cover.clusterings.iter().enumerate() {
        let mut seen = vec![false; n];
        for (j, cluster) in clustering.iter().enumerate() {
            for &v in cluster {
                if v >= n || seen[v] {
                    return Err(CoverViolation::Overlap { clustering: i, vertex: v });
                }
                seen[v] = true;
            }
            for &u in cluster {
                for &v in cluster {
                    let ok = dist[u][v].map_or(false, |d| uint(d) <= cover.h_diam);
                    if !ok {
                        return Err(CoverViolation::Diameter { clustering: i, cluster: j, u, v, distance: dist[u][v] });
                    }
                }
            }
        }
    }
    for v in 0..n {
        let b = ball(&dist[v], cover.h_cov);
        let inside = cover
            .clusterings
            .iter()
            .flatten()
            .any(|cluster| b.iter().all(|w| cluster.binary_search(w).is_ok()));
        if !inside {
            return Err(CoverViolation::Uncovered { vertex: v });
        }
    }
    Ok(())
}
