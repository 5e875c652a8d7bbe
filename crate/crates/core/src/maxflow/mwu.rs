//! Multiplicative-weights driver for `(1+eps)`-approximate `h`-length
//! multi-commodity maxflow with a moving-cut dual.
//!
//! Weights are kept as big-integer numerators over a common power-of-two
//! denominator `2^S` and are always rounded up, so every weight is at least
//! its exact counterpart. The threshold `lambda` lives on the same grid and
//! is rounded down. The run stops as soon as the primal/dual certificate
//! closes to the requested `1 + eps`, or when `lambda` reaches 1.

use alloc::collections::{BTreeMap, BinaryHeap};
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Reverse;
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::demand::SourceSinkPair;
use crate::error::{Error, Result};
use crate::flow::PathFlow;
use crate::graph::{Graph, Mode};
use crate::num::{ceil_int, ln_upper, ratio, uint, Rational};

use super::blocker::path_blocker_units;
use super::dag::{weight_units, x_budget};

#[derive(Clone, Debug)]
pub struct MwuConfig {
    /// Hidden constant of the per-phase iteration budget `C h^3 ln m / eps^3`.
    pub inner_constant: u64,
    /// Internal precisions tried in order: `eps / d` for each `d`.
    pub eps_divisors: Vec<u64>,
    /// Hard cap on blocker calls per internal precision (`None`: unlimited).
    pub max_iterations: Option<usize>,
}

impl Default for MwuConfig {
    fn default() -> Self {
        MwuConfig { inner_constant: 4, eps_divisors: vec![4, 16, 100], max_iterations: None }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhaseRecord {
    pub lambda: Rational,
    /// Exact `min_i d_w^(h)(S_i, T_i)` when the phase ended.
    pub lightest: Rational,
    pub iterations: usize,
    /// Whether the phase ran past its nominal iteration budget.
    pub over_budget: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub value: Rational,
    /// `|w_best| = sum_e w_best(e) U(e)`, an upper bound on the optimum.
    pub dual: Rational,
    /// `dual / value`, or `None` when the value is zero.
    pub ratio: Option<Rational>,
    pub iterations: usize,
    pub phases: usize,
    pub eps_internal: Rational,
    pub met: bool,
}

#[derive(Clone, Debug)]
pub struct LcMaxflow {
    pub flow: PathFlow,
    /// Moving cut: `w_best(e)` per edge, scaled so every `h`-length
    /// source-sink path has weight at least 1.
    pub cut: Vec<Rational>,
    pub certificate: Certificate,
    pub phases: Vec<PhaseRecord>,
}

/// Exact `min_i d^(h)_w(S_i, T_i)` for integer weights; `None` when no
/// pair has an `h`-length path. Zero-length edges are relaxed inside each
/// length layer.
pub fn lightest_h_path(g: &Graph, w: &[BigUint], h: u64, pairs: &[SourceSinkPair]) -> Option<BigUint> {
    let mut best: Option<BigUint> = None;
    for p in pairs {
        if let Some(d) = lightest_pair(g, w, h, p) {
            if best.as_ref().map_or(true, |b| d < *b) {
                best = Some(d);
            }
        }
    }
    best
}

fn lightest_pair(g: &Graph, w: &[BigUint], h: u64, p: &SourceSinkPair) -> Option<BigUint> {
    let n = g.n();
    let h = h as usize;
    let mut dist: Vec<Vec<Option<BigUint>>> = vec![vec![None; n]; h + 1];
    for &s in &p.sources {
        dist[0][s] = Some(BigUint::zero());
    }
    for l in 0..=h {
        for v in 0..n {
            for &a in g.in_arcs(v) {
                let arc = &g.arcs()[a];
                let e = &g.edges()[arc.edge];
                let len = e.len as usize;
                if len == 0 || len > l {
                    continue;
                }
                if let Some(du) = &dist[l - len][arc.tail] {
                    let cand = du + &w[arc.edge];
                    if dist[l][v].as_ref().map_or(true, |x| cand < *x) {
                        dist[l][v] = Some(cand);
                    }
                }
            }
        }
        relax_zero_layer(g, w, &mut dist[l]);
    }
    let mut best: Option<BigUint> = None;
    for layer in &dist {
        for &t in &p.sinks {
            if let Some(x) = &layer[t] {
                if best.as_ref().map_or(true, |b| x < b) {
                    best = Some(x.clone());
                }
            }
        }
    }
    best
}

fn relax_zero_layer(g: &Graph, w: &[BigUint], layer: &mut [Option<BigUint>]) {
    let mut heap: BinaryHeap<Reverse<(BigUint, usize)>> = BinaryHeap::new();
    for (v, d) in layer.iter().enumerate() {
        if let Some(d) = d {
            heap.push(Reverse((d.clone(), v)));
        }
    }
    while let Some(Reverse((d, v))) = heap.pop() {
        if layer[v].as_ref().map_or(false, |x| *x < d) {
            continue;
        }
        for &a in g.out_arcs(v) {
            let arc = &g.arcs()[a];
            if g.edges()[arc.edge].len != 0 {
                continue;
            }
            let cand = &d + &w[arc.edge];
            if layer[arc.head].as_ref().map_or(true, |x| cand < *x) {
                layer[arc.head] = Some(cand.clone());
                heap.push(Reverse((cand, arc.head)));
            }
        }
    }
}

fn big_of(r: &BigInt) -> BigUint {
    r.to_biguint().expect("non-negative")
}

struct Run {
    flow: PathFlow,
    cut: Vec<Rational>,
    cert: Certificate,
    phases: Vec<PhaseRecord>,
}

/// Primal/dual bookkeeping shared by the iterations of one run.
struct Ledger {
    paths: BTreeMap<(usize, Vec<usize>), Rational>,
    loads: Vec<Rational>,
    /// Running maximum of `loads[e] / U(e)`; loads only grow.
    congestion: Rational,
    value: Rational,
    best_w: Option<(Vec<BigUint>, BigUint)>,
    /// `|w_best|` as an unreduced fraction `(sum_e w(e) U(e), d)`.
    best_dual: Option<(BigUint, BigUint)>,
}

impl Ledger {
    fn add_load(&mut self, g: &Graph, e: usize, x: &Rational) {
        self.loads[e] += x;
        let r = &self.loads[e] / uint(g.edges()[e].cap);
        if r > self.congestion {
            self.congestion = r;
        }
    }

    fn primal(&self) -> Rational {
        if self.congestion.is_zero() {
            Rational::zero()
        } else {
            &self.value / &self.congestion
        }
    }

    fn offer_dual(&mut self, g: &Graph, w: &[BigUint], d: &BigUint) {
        let mut total = BigUint::zero();
        for (x, e) in w.iter().zip(g.edges()) {
            total += x * BigUint::from(e.cap);
        }
        let better = match &self.best_dual {
            None => true,
            Some((bt, bd)) => &total * bd < bt * d,
        };
        if better {
            self.best_dual = Some((total, d.clone()));
            self.best_w = Some((w.to_vec(), d.clone()));
        }
    }

    /// Whether `|w_best| <= target * p`.
    fn dual_within(&self, target: &Rational, p: &Rational) -> bool {
        match &self.best_dual {
            None => false,
            Some((t, d)) => {
                let bound = target * p;
                BigInt::from(t.clone()) * bound.denom() <= bound.numer() * BigInt::from(d.clone())
            }
        }
    }
}

fn run(g: &Graph, pairs: &[SourceSinkPair], h: u64, eps: &Rational, eps_int: &Rational, cfg: &MwuConfig) -> Result<Run> {
    let m = g.m();
    let k = pairs.len();
    let caps: Vec<u64> = g.edges().iter().map(|e| e.cap).collect();
    let umax = caps.iter().copied().max().unwrap_or(1);
    let zeta = ceil_int(&(Rational::one() / eps_int)).to_u32().expect("zeta");
    let m_big = BigUint::from(m.max(2) as u64);
    let mz = num_traits::pow(m_big, zeta as usize);
    let shift = (&mz * BigUint::from(umax)).bits() + 64;
    let one = BigUint::one() << shift;
    let mut w: Vec<BigUint> = caps
        .iter()
        .map(|&u| {
            let den = &mz * BigUint::from(u);
            let (q, r) = one.div_rem(&den);
            if r.is_zero() {
                q
            } else {
                q + 1u32
            }
        })
        .collect();
    let en: BigUint = big_of(eps_int.numer());
    let ed: BigUint = big_of(eps_int.denom());
    let x_max = x_budget(h, eps_int);
    let budget = {
        let ln = ln_upper(m.max(2) as u64);
        let b = uint(cfg.inner_constant) * uint(h * h * h) * ln / (eps_int * eps_int * eps_int);
        ceil_int(&b).to_usize().unwrap_or(usize::MAX)
    };
    let active_ids: Vec<usize> = (0..k).filter(|&i| lightest_pair(g, &w, h, &pairs[i]).is_some()).collect();
    let active: Vec<SourceSinkPair> = active_ids.iter().map(|&i| pairs[i].clone()).collect();
    let mut ledger = Ledger {
        paths: BTreeMap::new(),
        loads: vec![Rational::zero(); m],
        congestion: Rational::zero(),
        value: Rational::zero(),
        best_w: None,
        best_dual: None,
    };
    let mut phases = Vec::new();
    let mut iterations = 0usize;
    let mut met = false;
    let target = Rational::one() + eps;
    if !active.is_empty() {
        let d0 = lightest_h_path(g, &w, h, &active).expect("active pairs have paths");
        let mut lambda = (&one / &mz).min(d0);
        let grow = |l: &BigUint| l * (&ed + &en) / &ed;
        let mut phase_iters = 0usize;
        'outer: while lambda < one {
            let d = lightest_h_path(g, &w, h, &active).expect("active pairs have paths");
            ledger.offer_dual(g, &w, &d);
            if ledger.best_dual.is_some() {
                let p = ledger.primal();
                if !p.is_zero() && ledger.dual_within(&target, &p) {
                    met = true;
                    break;
                }
            }
            // Advance lambda while every pair is (1+eps)-heavy.
            if &d * &ed >= &lambda * (&ed + &en) {
                phases.push(PhaseRecord {
                    lambda: Rational::new(lambda.clone().into(), one.clone().into()),
                    lightest: Rational::new(d.clone().into(), one.clone().into()),
                    iterations: phase_iters,
                    over_budget: phase_iters > budget,
                });
                phase_iters = 0;
                while &d * &ed >= &lambda * (&ed + &en) && lambda < one {
                    lambda = grow(&lambda);
                }
                if lambda > d {
                    lambda = d.clone();
                }
                continue;
            }
            if cfg.max_iterations.map_or(false, |c| iterations >= c) {
                break 'outer;
            }
            let units = weight_units(&w, &lambda, h, eps_int, x_max);
            let b = path_blocker_units(g, &units, h, x_max, &active)?;
            if b.flow.paths.is_empty() {
                return Err(Error::ContractViolation("blocker returned no flow below the lambda threshold".into()));
            }
            iterations += 1;
            phase_iters += 1;
            let loads = b.flow.resource_loads(g);
            for p in b.flow.paths {
                ledger.value += &p.value;
                *ledger.paths.entry((active_ids[p.commodity], p.vertices)).or_insert_with(Rational::zero) += p.value;
            }
            for e in 0..m {
                if loads[e].is_zero() {
                    continue;
                }
                ledger.add_load(g, e, &loads[e]);
                // w <- ceil(w (1 + eps F(e) / U(e))).
                let num = &w[e] * &en * big_of(loads[e].numer());
                let den = &ed * big_of(loads[e].denom()) * BigUint::from(caps[e]);
                let (q, r) = num.div_rem(&den);
                w[e] += if r.is_zero() { q } else { q + 1u32 };
            }
        }
        if !met {
            if let Some(d) = lightest_h_path(g, &w, h, &active) {
                ledger.offer_dual(g, &w, &d);
            }
        }
    } else {
        met = true;
    }
    let primal = ledger.primal();
    let mut flow = PathFlow::empty(k);
    if !primal.is_zero() {
        let scale = &primal / &ledger.value;
        for ((i, p), v) in &ledger.paths {
            flow.push(*i, p.clone(), v * &scale);
        }
    }
    let (cut, dual) = match &ledger.best_w {
        Some((bw, d)) => {
            let cut: Vec<Rational> = bw.iter().map(|x| Rational::new(x.clone().into(), d.clone().into())).collect();
            let (t, d) = ledger.best_dual.clone().unwrap();
            (cut, Rational::new(t.into(), d.into()))
        }
        None => (vec![Rational::zero(); m], Rational::zero()),
    };
    let value = flow.value();
    let ratio = if value.is_zero() { None } else { Some(&dual / &value) };
    if !met {
        met = match &ratio {
            Some(r) => *r <= target,
            None => dual.is_zero(),
        };
    }
    let cert = Certificate {
        value,
        dual,
        ratio,
        iterations,
        phases: phases.len(),
        eps_internal: eps_int.clone(),
        met,
    };
    Ok(Run { flow, cut, cert, phases })
}

/// `(1+eps)`-approximate `h`-length multi-commodity maxflow together with
/// a moving cut certifying the approximation.
pub fn lc_mc_maxflow(
    g: &Graph,
    pairs: &[SourceSinkPair],
    h: u64,
    eps: &Rational,
    cfg: &MwuConfig,
) -> Result<LcMaxflow> {
    if g.mode() != Mode::EdgeDirected {
        return Err(Error::InvalidGraph("maxflow needs a directed edge-weighted graph".into()));
    }
    if *eps <= Rational::zero() || *eps >= Rational::one() {
        return Err(Error::InvalidParameter("eps must lie in (0, 1)".into()));
    }
    if h == 0 {
        return Err(Error::InvalidParameter("h must be at least 1".into()));
    }
    for p in pairs {
        p.validate(g.n())?;
    }
    if cfg.eps_divisors.is_empty() {
        return Err(Error::InvalidParameter("at least one internal precision is required".into()));
    }
    let mut best: Option<Run> = None;
    for &div in &cfg.eps_divisors {
        let eps_int = eps / uint(div.max(1));
        let r = run(g, pairs, h, eps, &eps_int, cfg)?;
        let done = r.cert.met;
        let better = match &best {
            None => true,
            Some(b) => r.cert.met || closer(&r.cert, &b.cert),
        };
        if better {
            best = Some(r);
        }
        if done {
            break;
        }
    }
    let r = best.expect("at least one run");
    Ok(LcMaxflow { flow: r.flow, cut: r.cut, certificate: r.cert, phases: r.phases })
}

/// Achieved gap; `None` stands for an unbounded gap.
fn gap(c: &Certificate) -> Option<Rational> {
    match &c.ratio {
        Some(r) => Some(r.clone()),
        None if c.dual.is_zero() => Some(Rational::one()),
        None => None,
    }
}

fn closer(a: &Certificate, b: &Certificate) -> bool {
    match (gap(a), gap(b)) {
        (Some(x), Some(y)) => x < y,
        (Some(_), None) => true,
        _ => false,
    }
}

/// Single-commodity `h`-length maxflow within a factor 2, run at `eps = 1/3`.
pub fn lc_st_maxflow(g: &Graph, s: usize, t: usize, h: u64) -> Result<LcMaxflow> {
    lc_mc_maxflow(g, &[SourceSinkPair::single(s, t)], h, &ratio(1, 3), &MwuConfig::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Edge;
    use crate::num::int;
    use crate::oracle::{enumerate_paths, exact_lc_maxflow};

    fn two_path() -> Graph {
        let e = |t, h| Edge { tail: t, head: h, len: 1, cap: 1 };
        Graph::edge_weighted(4, vec![e(0, 1), e(1, 3), e(0, 2), e(2, 3)]).unwrap()
    }

    fn dual_feasible(g: &Graph, r: &LcMaxflow, pairs: &[SourceSinkPair], h: u64) -> bool {
        pairs.iter().all(|p| {
            enumerate_paths(g, &p.sources, &p.sinks, Some(h), None).unwrap().iter().all(|path| {
                let res = g.path_resources(path).unwrap();
                res.iter().map(|&e| r.cut[e].clone()).sum::<Rational>() >= int(1)
            })
        })
    }

    #[test]
    fn lightest_path_dp() {
        let g = two_path();
        let w: Vec<BigUint> = [3u32, 4, 1, 1].iter().map(|&x| BigUint::from(x)).collect();
        assert_eq!(lightest_h_path(&g, &w, 2, &[SourceSinkPair::single(0, 3)]), Some(BigUint::from(2u32)));
        assert_eq!(lightest_h_path(&g, &w, 1, &[SourceSinkPair::single(0, 3)]), None);
    }

    #[test]
    fn zero_length_edges_relaxed() {
        let e = |t, h, len| Edge { tail: t, head: h, len, cap: 1 };
        let g = Graph::edge_weighted_with_connectors(3, vec![e(0, 1, 0), e(1, 2, 1)]).unwrap();
        let w: Vec<BigUint> = [5u32, 2].iter().map(|&x| BigUint::from(x)).collect();
        assert_eq!(lightest_h_path(&g, &w, 1, &[SourceSinkPair::single(0, 2)]), Some(BigUint::from(7u32)));
    }

    #[test]
    fn two_path_value_and_dual() {
        let g = two_path();
        let pairs = [SourceSinkPair::single(0, 3)];
        let eps = ratio(1, 5);
        let r = lc_mc_maxflow(&g, &pairs, 2, &eps, &MwuConfig::default()).unwrap();
        let v = r.flow.value();
        assert!(v <= int(2) && v >= int(2) / (int(1) + &eps), "value {v}");
        assert!(r.certificate.met);
        assert!(r.certificate.dual <= (int(1) + &eps) * &v);
        assert!(r.flow.congestion(&g) <= int(1));
        assert!(dual_feasible(&g, &r, &pairs, 2));
        for ph in &r.phases {
            assert!(ph.lightest >= ph.lambda);
        }
        let (opt, _) = exact_lc_maxflow(&g, &pairs, Some(2)).unwrap();
        assert!(v <= opt && opt <= r.certificate.dual);
    }

    #[test]
    fn too_short_h_gives_zero() {
        let g = two_path();
        let r = lc_mc_maxflow(&g, &[SourceSinkPair::single(0, 3)], 1, &ratio(1, 5), &MwuConfig::default()).unwrap();
        assert!(r.flow.paths.is_empty());
        assert!(r.certificate.met);
        assert_eq!(r.certificate.dual, int(0));
    }

    #[test]
    fn unreachable_pair_keeps_commodity_ids() {
        let g = two_path();
        let pairs = [SourceSinkPair::single(3, 0), SourceSinkPair::single(0, 3)];
        let r = lc_mc_maxflow(&g, &pairs, 2, &ratio(1, 4), &MwuConfig::default()).unwrap();
        assert!(!r.flow.paths.is_empty());
        assert!(r.flow.paths.iter().all(|p| p.commodity == 1 && p.vertices[0] == 0));
    }

    #[test]
    fn empty_pairs() {
        let g = two_path();
        let r = lc_mc_maxflow(&g, &[], 2, &ratio(1, 5), &MwuConfig::default()).unwrap();
        assert!(r.flow.paths.is_empty());
        assert!(r.cut.iter().all(|x| x.is_zero()));
    }

    #[test]
    fn st_wrapper() {
        let g = two_path();
        assert!(lc_st_maxflow(&g, 0, 3, 2).unwrap().flow.value() >= int(1));
        let e = Edge { tail: 0, head: 1, len: 1, cap: 1 };
        let single = Graph::edge_weighted(2, vec![e.clone()]).unwrap();
        assert!(lc_st_maxflow(&single, 0, 1, 1).unwrap().flow.value() >= ratio(1, 2));
        let disc = Graph::edge_weighted(3, vec![e]).unwrap();
        assert!(lc_st_maxflow(&disc, 0, 2, 3).unwrap().flow.value().is_zero());
    }
}
