//! Path decomposition of edge-form flows.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use num_traits::{Signed, Zero};

use crate::demand::SourceSinkPair;
use crate::error::{Error, Result};
use crate::flow::{EdgeFlow, PathFlow};
use crate::num::Rational;

/// Decomposes an acyclic flow. A directed cycle of positive flow is an error.
pub fn decompose_dag_flow(f: &EdgeFlow, terminals: &[SourceSinkPair], n: usize) -> Result<PathFlow> {
    decompose(f, terminals, n, false)
}

/// Decomposes a flow, discarding any circulations it contains.
pub fn decompose_flow(f: &EdgeFlow, terminals: &[SourceSinkPair], n: usize) -> Result<PathFlow> {
    decompose(f, terminals, n, true)
}

fn decompose(f: &EdgeFlow, terminals: &[SourceSinkPair], n: usize, drop_cycles: bool) -> Result<PathFlow> {
    if terminals.len() != f.k() {
        return Err(Error::InvalidFlow("one terminal pair per commodity is required".into()));
    }
    let mut out = PathFlow::empty(f.k());
    for (i, term) in terminals.iter().enumerate() {
        for (p, v) in decompose_commodity(&f.commodities[i], term, n, drop_cycles)? {
            out.push(i, p, v);
        }
    }
    Ok(out)
}

fn decompose_commodity(
    flow: &BTreeMap<(usize, usize), Rational>,
    term: &SourceSinkPair,
    n: usize,
    drop_cycles: bool,
) -> Result<Vec<(Vec<usize>, Rational)>> {
    let mut out_arcs: Vec<BTreeMap<usize, Rational>> = vec![BTreeMap::new(); n];
    let mut net = vec![Rational::zero(); n];
    for (&(u, v), x) in flow {
        if x.is_negative() {
            return Err(Error::InvalidFlow("negative arc flow".into()));
        }
        if x.is_zero() {
            continue;
        }
        out_arcs[u].insert(v, x.clone());
        net[u] += x;
        net[v] -= x;
    }
    for v in 0..n {
        let ok = net[v].is_zero()
            || (net[v].is_positive() && term.sources.contains(&v))
            || (net[v].is_negative() && term.sinks.contains(&v));
        if !ok {
            return Err(Error::Conservation { vertex: v });
        }
    }
    let mut paths = Vec::new();
    loop {
        let s = match (0..n).find(|&v| net[v].is_positive()) {
            Some(s) => s,
            None => break,
        };
        let mut path = vec![s];
        loop {
            let v = *path.last().unwrap();
            if v != s && net[v].is_negative() {
                break;
            }
            let (&w, _) = out_arcs[v].iter().next().ok_or(Error::Conservation { vertex: v })?;
            if let Some(pos) = path.iter().position(|&x| x == w) {
                if !drop_cycles {
                    return Err(Error::CycleDetected);
                }
                let mut cyc: Vec<usize> = path[pos..].to_vec();
                cyc.push(w);
                let theta = bottleneck(&out_arcs, &cyc);
                subtract(&mut out_arcs, &cyc, &theta);
                path.truncate(pos + 1);
                continue;
            }
            path.push(w);
        }
        let t = *path.last().unwrap();
        let mut theta = bottleneck(&out_arcs, &path);
        if net[s] < theta {
            theta = net[s].clone();
        }
        if -&net[t] < theta {
            theta = -&net[t];
        }
        subtract(&mut out_arcs, &path, &theta);
        net[s] -= &theta;
        net[t] += &theta;
        paths.push((path, theta));
    }
    if !drop_cycles && out_arcs.iter().any(|m| !m.is_empty()) {
        return Err(Error::CycleDetected);
    }
    Ok(paths)
}

fn bottleneck(out_arcs: &[BTreeMap<usize, Rational>], path: &[usize]) -> Rational {
    let mut theta: Option<Rational> = None;
    for w in path.windows(2) {
        let x = &out_arcs[w[0]][&w[1]];
        if theta.as_ref().map_or(true, |t| x < t) {
            theta = Some(x.clone());
        }
    }
    theta.unwrap_or_else(Rational::zero)
}

fn subtract(out_arcs: &mut [BTreeMap<usize, Rational>], path: &[usize], theta: &Rational) {
    for w in path.windows(2) {
        let x = out_arcs[w[0]].get_mut(&w[1]).unwrap();
        *x -= theta;
        if x.is_zero() {
            out_arcs[w[0]].remove(&w[1]);
        }
    }
}
