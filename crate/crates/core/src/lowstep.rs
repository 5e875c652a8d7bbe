//! Greedy length-bucketed low-step min-total-length flows.
//!
//! Buckets `h_p = (1+eps)^p` are processed in increasing order. Inside a
//! bucket, lengths are coarsened to `ceil(l(e) t / (eps h_p))` and a
//! constant-factor length-constrained maxflow is repeatedly routed,
//! rounded to a `1/mu` grid and subtracted from the residual demand.

use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::decompose::decompose_flow;
use crate::demand::{Demand, DemandValue, SourceSinkPair};
use crate::error::{Error, Result};
use crate::flow::{EdgeFlow, PathFlow};
use crate::graph::{split_vertices, Edge, Graph, Mode, SplitGraph};
use crate::maxflow::mwu::{lc_mc_maxflow, MwuConfig};
use crate::num::{floor_int, fmt_rat, is_integral, log_ceil, pow2_at_least, ratio, uint, Rational};
use crate::round::round_flow;

/// Target value: 1 or the full demand size.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Tau {
    One,
    Full,
}

#[derive(Clone, Debug)]
pub struct LowStepConfig {
    pub t: usize,
    pub tau: Tau,
    pub eps: Rational,
    pub mwu: MwuConfig,
    /// Inner rounds per bucket; default `2 * ceil(log2(n^2 N))`.
    pub inner_rounds: Option<usize>,
}

impl LowStepConfig {
    pub fn new(t: usize, tau: Tau, eps: Rational) -> Self {
        LowStepConfig { t, tau, eps, mwu: MwuConfig::default(), inner_rounds: None }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BucketRecord {
    pub p: u32,
    pub h_p: Rational,
    pub rounds: usize,
    pub value_gained: Rational,
    pub totlen_gained: Rational,
}

#[derive(Clone, Debug)]
pub struct LowStepResult {
    pub flow: PathFlow,
    pub buckets: Vec<BucketRecord>,
    pub mu: u64,
    pub maxflow_calls: usize,
}

/// A shortcut provider maps a graph to an augmented graph plus the step
/// bound that suffices in it. Only the identity provider is implemented.
pub trait ShortcutProvider {
    fn step_bound(&self, g: &Graph) -> usize;
}

#[derive(Clone, Copy, Debug, Default)]
pub struct IdentityShortcut;

impl ShortcutProvider for IdentityShortcut {
    fn step_bound(&self, g: &Graph) -> usize {
        g.n().saturating_sub(1).max(1)
    }
}

fn check_eps(eps: &Rational, n: usize) -> Result<()> {
    let lo = ratio(1, n.max(2) as i64);
    if *eps < lo || *eps >= Rational::one() {
        return Err(Error::InvalidParameter(alloc::format!(
            "eps must lie in [1/n, 1) = [{}, 1)",
            fmt_rat(&lo)
        )));
    }
    Ok(())
}

fn integral_values(d: &Demand) -> Result<Vec<Rational>> {
    let mut out = Vec::with_capacity(d.k());
    for p in d.pairs() {
        match &p.value {
            DemandValue::Finite(v) if is_integral(v) => out.push(v.clone()),
            _ => return Err(Error::InvalidDemand("an integral finite demand is required".into())),
        }
    }
    Ok(out)
}

/// Directed low-step flow with `value(F) = tau - 1/n` and `Dem(F) <= D`.
pub fn lowstep_directed(g: &Graph, d: &Demand, cfg: &LowStepConfig) -> Result<LowStepResult> {
    if g.mode() != Mode::EdgeDirected {
        return Err(Error::InvalidGraph("directed low-step flows need an edge-weighted graph".into()));
    }
    if cfg.t == 0 {
        return Err(Error::InvalidParameter("step bound must be at least 1".into()));
    }
    let n = g.n();
    check_eps(&cfg.eps, n)?;
    d.check_vertices(n)?;
    let dv = integral_values(d)?;
    let size: Rational = dv.iter().sum();
    let tau = match cfg.tau {
        Tau::One => Rational::one(),
        Tau::Full => size.clone(),
    };
    if tau > size || tau < Rational::one() {
        return Err(Error::InvalidParameter("tau must lie in [1, |D|]".into()));
    }
    let eps = &cfg.eps;
    let k = d.k();
    let n_big = uint(n as u64);
    let target = &tau - Rational::one() / &n_big;
    let nb = g.value_bound();
    let mu = pow2_at_least(&(&n_big * &n_big * &n_big * &n_big)).to_u64().expect("mu fits");
    let p_max = log_ceil(&(Rational::one() + eps), &(&n_big * uint(nb)));
    let rounds = cfg.inner_rounds.unwrap_or_else(|| {
        let x = uint((n * n) as u64) * uint(nb);
        2 * log_ceil(&uint(2), &x).max(1) as usize
    });
    let t = uint(cfg.t as u64);
    let budget_len = floor_int(&(&t / eps + &t)).to_u64().expect("length budget fits");
    let terms: Vec<SourceSinkPair> = d.source_sink_pairs();

    let mut flow = PathFlow::empty(k);
    let mut residual = dv.clone();
    let mut buckets = Vec::new();
    let mut calls = 0usize;
    // (1 + eps)^p = (ea + eb)^p / eb^p is already in lowest terms, so the
    // powers are assembled from integers without any gcd reduction.
    let (ea, eb) = (eps.numer().clone(), eps.denom().clone());
    let ebase = &ea + &eb;
    let tb = BigInt::from(cfg.t as u64);
    let coarse = |p: u32| -> (Rational, Vec<u64>) {
        let num = num_traits::pow(ebase.clone(), p as usize);
        let den = num_traits::pow(eb.clone(), p as usize);
        // unit = eps * h_p / t = ea * num / (eb * den * t)
        let un = &ea * &num;
        let ud = &eb * &den * &tb;
        let lens = g
            .edges()
            .iter()
            .map(|e| {
                let x: BigInt = (BigInt::from(e.len) * &ud + &un - 1u32) / &un;
                x.to_u64().unwrap_or(u64::MAX)
            })
            .collect();
        (Rational::new_raw(num, den), lens)
    };
    let reachable = |lens: &[u64], residual: &[Rational]| {
        (0..k).any(|i| residual[i].is_positive() && coarse_distance(g, lens, &d.pairs()[i]) <= budget_len)
    };
    let mut p = 0u32;
    'buckets: while p <= p_max {
        let (mut h_p, mut lens) = coarse(p);
        // Buckets in which no live pair is coarse-reachable would only
        // produce empty maxflows. Coarse lengths shrink as p grows, so the
        // next useful bucket is found by bisection.
        if residual.iter().any(|r| r.is_positive()) && !reachable(&lens, &residual) {
            let (mut lo, mut hi) = (p, p_max + 1);
            while hi - lo > 1 {
                let mid = lo + (hi - lo) / 2;
                if reachable(&coarse(mid).1, &residual) {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            if hi > p_max {
                break;
            }
            p = hi;
            (h_p, lens) = coarse(p);
        }
        let mut rec = BucketRecord {
            p,
            h_p: h_p.clone(),
            rounds: 0,
            value_gained: Rational::zero(),
            totlen_gained: Rational::zero(),
        };
        for _ in 0..rounds {
            let active: Vec<usize> = (0..k).filter(|&i| residual[i].is_positive()).collect();
            if active.is_empty() {
                break;
            }
            calls += 1;
            rec.rounds += 1;
            let approx = coarse_maxflow(g, d, &lens, budget_len, &active, &residual, mu, &cfg.mwu)?;
            // Scaled-length sandwich on every emitted path.
            for fp in &approx.paths {
                let coarse: u64 = g.path_resources(&fp.vertices).unwrap().iter().map(|&e| lens[e]).sum();
                let real = uint(g.path_length(&fp.vertices).unwrap());
                if coarse > budget_len || real > (Rational::one() + eps) * &h_p {
                    return Err(Error::ContractViolation("coarsened length bound violated".into()));
                }
            }
            if approx.value() <= Rational::one() / (uint(2) * &n_big) {
                break;
            }
            let mut ef = EdgeFlow::zero(k);
            for fp in &approx.paths {
                for w in fp.vertices.windows(2) {
                    ef.add(fp.commodity, (w[0], w[1]), &fp.value);
                }
            }
            let rounded = round_flow(g, &ef, &terms, mu, true)?;
            let hat = decompose_flow(&rounded, &terms, n)?;
            let hv = hat.value();
            let room = &target - flow.value();
            let lambda = if hv.is_zero() || hv <= room { Rational::one() } else { &room / &hv };
            if lambda.is_negative() {
                return Err(Error::ContractViolation("value overshoot".into()));
            }
            rec.value_gained += &hv * &lambda;
            rec.totlen_gained += hat.totlen(g) * &lambda;
            flow.add_scaled(&hat, &lambda);
            if lambda < Rational::one() {
                buckets.push(rec);
                break 'buckets;
            }
            let dem = hat.commodity_values();
            for i in 0..k {
                residual[i] -= &dem[i];
                if residual[i].is_negative() {
                    return Err(Error::ContractViolation("residual demand became negative".into()));
                }
            }
        }
        buckets.push(rec);
        p += 1;
    }
    let flow = flow.normalized();
    if flow.value() != target {
        return Err(Error::PremiseViolated { achieved: fmt_rat(&flow.value()) });
    }
    Ok(LowStepResult { flow, buckets, mu, maxflow_calls: calls })
}

fn coarse_distance(g: &Graph, lens: &[u64], pair: &crate::demand::DemandPair) -> u64 {
    use alloc::collections::BinaryHeap;
    use core::cmp::Reverse;
    let mut dist = vec![u64::MAX; g.n()];
    let mut heap = BinaryHeap::new();
    dist[pair.source] = 0;
    heap.push(Reverse((0u64, pair.source)));
    while let Some(Reverse((dv, v))) = heap.pop() {
        if dv > dist[v] {
            continue;
        }
        for &a in g.out_arcs(v) {
            let arc = &g.arcs()[a];
            let nd = dv.saturating_add(lens[arc.edge]);
            if nd < dist[arc.head] {
                dist[arc.head] = nd;
                heap.push(Reverse((nd, arc.head)));
            }
        }
    }
    dist[pair.sink]
}

/// Constant-factor `budget`-length maxflow under coarse lengths with
/// `Dem <= residual`, realised by gadget edges `s_i -> u_i`, `v_i -> t_i`
/// of capacity `residual_i` and with all capacities scaled by `mu`.
#[allow(clippy::too_many_arguments)]
fn coarse_maxflow(
    g: &Graph,
    d: &Demand,
    lens: &[u64],
    budget: u64,
    active: &[usize],
    residual: &[Rational],
    mu: u64,
    mwu: &MwuConfig,
) -> Result<PathFlow> {
    let n = g.n();
    let scale = uint(mu);
    let mut edges = Vec::new();
    for (e, edge) in g.edges().iter().enumerate() {
        if lens[e] <= budget {
            edges.push(Edge { tail: edge.tail, head: edge.head, len: lens[e], cap: edge.cap * mu });
        }
    }
    let mut pairs = Vec::with_capacity(active.len());
    for (a, &i) in active.iter().enumerate() {
        let (s, t) = (n + 2 * a, n + 2 * a + 1);
        let c = &residual[i] * &scale;
        let c = c.to_integer().to_u64().ok_or_else(|| Error::ContractViolation("residual off the 1/mu grid".into()))?;
        let dp = &d.pairs()[i];
        edges.push(Edge { tail: s, head: dp.source, len: 1, cap: c });
        edges.push(Edge { tail: dp.sink, head: t, len: 1, cap: c });
        pairs.push(SourceSinkPair::single(s, t));
    }
    let gg = Graph::edge_weighted_with_connectors(n + 2 * active.len(), edges)?;
    let r = lc_mc_maxflow(&gg, &pairs, budget + 2, &ratio(1, 3), mwu)?;
    let mut out = PathFlow::empty(d.k());
    for fp in r.flow.paths {
        let inner = fp.vertices[1..fp.vertices.len() - 1].to_vec();
        out.push(active[fp.commodity], inner, fp.value / &scale);
    }
    Ok(out)
}

/// Undirected vertex-capacitated low-step flow with `value(F) = tau`.
pub fn lowstep_undirected(g: &Graph, d: &Demand, cfg: &LowStepConfig) -> Result<LowStepResult> {
    if g.mode() != Mode::VertexUndirected {
        return Err(Error::InvalidGraph("undirected low-step flows need a vertex-weighted graph".into()));
    }
    d.check_vertices(g.n())?;
    let sg = split_vertices(g)?;
    let mut lifted = Vec::with_capacity(d.k());
    for p in d.pairs() {
        lifted.push((SplitGraph::v_in(p.source), SplitGraph::v_out(p.sink), match &p.value {
            DemandValue::Finite(v) => v.clone(),
            DemandValue::Infinite => return Err(Error::InvalidDemand("finite demand required".into())),
        }));
    }
    let dd = Demand::finite(&lifted)?;
    let mut inner = cfg.clone();
    // A t-step path of g becomes a (2t+1)-step path after splitting.
    inner.t = 2 * cfg.t + 1;
    let r = lowstep_directed(&sg.graph, &dd, &inner)?;
    let mut flow = PathFlow::empty(d.k());
    for fp in &r.flow.paths {
        flow.push(fp.commodity, sg.project_path(&fp.vertices), fp.value.clone());
    }
    let values = flow.commodity_values();
    let factors: Vec<Rational> = match cfg.tau {
        Tau::One => {
            let total = flow.value();
            vec![Rational::one() / total; d.k()]
        }
        Tau::Full => {
            let mut f = Vec::with_capacity(d.k());
            for (i, p) in d.pairs().iter().enumerate() {
                let want = match &p.value {
                    DemandValue::Finite(v) => v.clone(),
                    DemandValue::Infinite => unreachable!(),
                };
                if values[i].is_zero() {
                    return Err(Error::PremiseViolated { achieved: "0".to_string() });
                }
                f.push(want / &values[i]);
            }
            f
        }
    };
    for p in &mut flow.paths {
        p.value *= &factors[p.commodity];
    }
    let buckets = r
        .buckets
        .into_iter()
        .map(|b| BucketRecord { totlen_gained: b.totlen_gained, ..b })
        .collect();
    Ok(LowStepResult { flow: flow.normalized(), buckets, mu: r.mu, maxflow_calls: r.maxflow_calls })
}

/// `(1+eps)`-approximate min-total-length flow of value `tau`, through the
/// identity shortcut with step bound `n - 1` and internal precision
/// `eps / eps_divisor`.
pub fn approx_mtl_flow(g: &Graph, d: &Demand, tau: Tau, eps: &Rational, eps_divisor: u64) -> Result<EdgeFlow> {
    approx_mtl_flow_with(g, d, tau, eps, eps_divisor, &IdentityShortcut, &MwuConfig::default())
}

pub fn approx_mtl_flow_with(
    g: &Graph,
    d: &Demand,
    tau: Tau,
    eps: &Rational,
    eps_divisor: u64,
    shortcut: &dyn ShortcutProvider,
    mwu: &MwuConfig,
) -> Result<EdgeFlow> {
    let eps_inner = eps / uint(eps_divisor.max(1));
    let mut cfg = LowStepConfig::new(shortcut.step_bound(g), tau, eps_inner);
    cfg.mwu = mwu.clone();
    let r = lowstep_undirected(g, d, &cfg)?;
    Ok(to_edge_flow(&r.flow))
}

fn to_edge_flow(f: &PathFlow) -> EdgeFlow {
    crate::flow::to_edge_representation(f)
}
