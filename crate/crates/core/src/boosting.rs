//! Flow boosting over vertex duals and the concurrent / non-concurrent
//! mincost drivers built on it.
//!
//! Each iteration turns the current duals `y + phi b` into integral vertex
//! lengths, asks an oracle for a flow in its convex set, and multiplies the
//! duals along that flow. The oracle's measured congestion `kappa_i` is used
//! as the per-iteration congestion slack, so the accumulated coefficients
//! `z_i / kappa_i` stay capacity-respecting after division by
//! `log_{1+eps}(1/delta)`.

use alloc::vec;
use alloc::vec::Vec;
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::demand::{Demand, DemandPair, DemandValue};
use crate::error::{Error, Result};
use crate::flow::EdgeFlow;
use crate::graph::{Graph, Mode};
use crate::lowstep::{approx_mtl_flow_with, IdentityShortcut, Tau};
use crate::maxflow::mwu::MwuConfig;
use crate::num::{ceil_int, fmt_rat, is_integral, ln_upper, uint, Rational};

/// Source of flows for the boosting loop. `g` carries the capacities of the
/// current scale guess; `lens` are strictly positive vertex lengths.
pub trait FlowOracle {
    fn route(&mut self, g: &Graph, lens: &[u64]) -> Result<EdgeFlow>;
}

#[derive(Clone, Debug)]
pub struct BoostConfig {
    pub eps: Rational,
    /// Declared congestion slack; a flow above it aborts the run.
    pub kappa: Rational,
    /// Iteration cap (default `8 * ceil(L)` with `L >= log_{1+eps}(1/delta)`).
    pub max_iterations: Option<usize>,
}

impl BoostConfig {
    pub fn new(eps: Rational, kappa: Rational) -> Self {
        BoostConfig { eps, kappa, max_iterations: None }
    }
}

#[derive(Clone, Debug)]
pub struct BoostResult {
    /// Convex combination of the oracle flows.
    pub flow: EdgeFlow,
    pub lambda: Rational,
    /// Raw coefficients `z_i / kappa_i` of the kept flows.
    pub coefficients: Vec<Rational>,
    pub flows: Vec<EdgeFlow>,
    pub iterations: usize,
    pub oracle_calls: usize,
    /// `D(y, phi)` before each iteration and after the last one.
    pub dual_trace: Vec<Rational>,
    /// Rational upper bound on `log_{1+eps}(1/delta)` used as divisor.
    pub log_bound: Rational,
    pub capped: bool,
}

/// `delta = n^{-ceil(1/eps)}`.
pub fn boost_delta(n: usize, eps: &Rational) -> Rational {
    let q = ceil_int(&(Rational::one() / eps)).to_u32().unwrap_or(u32::MAX);
    Rational::new(BigInt::one(), num_traits::pow(BigInt::from(n.max(2)), q as usize))
}

/// Upper bound `ceil(1/eps) ln n / (eps - eps^2/2)` on `log_{1+eps}(1/delta)`.
pub fn log_bound(n: usize, eps: &Rational) -> Rational {
    let q = ceil_int(&(Rational::one() / eps));
    Rational::from_integer(q) * ln_upper(n.max(2) as u64) / (eps - eps * eps / uint(2))
}

fn round_up_grid(x: &Rational, shift: usize) -> Rational {
    let den = BigInt::one() << shift;
    Rational::new(ceil_int(&(x * Rational::from_integer(den.clone()))), den)
}

pub fn flow_cost(loads: &[Rational], costs: &[u64]) -> Rational {
    loads.iter().zip(costs).fold(Rational::zero(), |a, (x, &b)| a + x * uint(b))
}

/// Runs the boosting loop on a vertex-weighted graph whose vertex
/// capacities are `U`; `costs[v] = b(v)` and `budget = B` (`None` for no
/// cost constraint).
pub fn boost(
    g: &Graph,
    costs: &[u64],
    budget: Option<&Rational>,
    oracle: &mut dyn FlowOracle,
    cfg: &BoostConfig,
) -> Result<BoostResult> {
    if g.mode() != Mode::VertexUndirected {
        return Err(Error::InvalidGraph("boosting works on vertex-weighted graphs".into()));
    }
    if costs.len() != g.n() {
        return Err(Error::InvalidParameter("one cost per vertex is required".into()));
    }
    let eps = &cfg.eps;
    if !eps.is_positive() || *eps >= Rational::one() {
        return Err(Error::InvalidParameter("eps must lie in (0, 1)".into()));
    }
    if let Some(b) = budget {
        if !b.is_positive() {
            return Err(Error::InvalidParameter("budget must be positive".into()));
        }
    }
    let n = g.n();
    let caps: Vec<Rational> = g.vertex_caps().iter().map(|&u| uint(u)).collect();
    let nb = g.value_bound();
    let delta = boost_delta(n, eps);
    let scale = ceil_int(&(uint(nb) / (&delta * eps)));
    let scale = Rational::from_integer(scale);
    let shift = (uint(nb) / &delta).to_integer().bits() as usize + 64;
    let l_up = log_bound(n, eps);
    let cap_iters = cfg
        .max_iterations
        .unwrap_or_else(|| 8 * ceil_int(&l_up).to_usize().unwrap_or(usize::MAX / 8));

    let mut y: Vec<Rational> = caps.iter().map(|u| round_up_grid(&(&delta / u), shift)).collect();
    let mut phi = budget.map(|b| round_up_grid(&(&delta / b), shift));
    let dual = |y: &[Rational], phi: &Option<Rational>| -> Rational {
        let mut d = y.iter().zip(&caps).fold(Rational::zero(), |a, (y, u)| a + y * u);
        if let (Some(p), Some(b)) = (phi, budget) {
            d += p * b;
        }
        d
    };

    let mut flows = Vec::new();
    let mut coefficients = Vec::new();
    let mut trace = Vec::new();
    let mut calls = 0usize;
    let mut capped = false;
    loop {
        let d_now = dual(&y, &phi);
        trace.push(d_now.clone());
        if d_now >= Rational::one() {
            break;
        }
        if calls >= cap_iters {
            capped = true;
            break;
        }
        let mut lens = Vec::with_capacity(n);
        for v in 0..n {
            let mut l = y[v].clone();
            if let Some(p) = &phi {
                l += p * uint(costs[v]);
            }
            let x = ceil_int(&(l * &scale))
                .to_u64()
                .ok_or_else(|| Error::ContractViolation("oracle length exceeds u64".into()))?;
            lens.push(x.max(1));
        }
        calls += 1;
        let f = oracle.route(g, &lens)?;
        f.check_arcs(g)?;
        let loads = f.resource_loads(g);
        let mut kappa_i = Rational::one();
        for (x, u) in loads.iter().zip(&caps) {
            let r = x / u;
            if r > kappa_i {
                kappa_i = r;
            }
        }
        if kappa_i > cfg.kappa {
            return Err(Error::ContractViolation(alloc::format!(
                "oracle congestion {} exceeds kappa {}",
                fmt_rat(&kappa_i),
                fmt_rat(&cfg.kappa)
            )));
        }
        let cost = flow_cost(&loads, costs);
        let z = match budget {
            Some(b) if cost > *b => b / &cost,
            _ => Rational::one(),
        };
        let c = &z / &kappa_i;
        for v in 0..n {
            if loads[v].is_zero() {
                continue;
            }
            let grown = &y[v] * (Rational::one() + eps * &c * &loads[v] / &caps[v]);
            y[v] = round_up_grid(&grown, shift);
        }
        if let (Some(p), Some(b)) = (&mut phi, budget) {
            if !cost.is_zero() {
                let grown = &*p * (Rational::one() + eps * &c * &cost / b);
                *p = round_up_grid(&grown, shift);
            }
        }
        if dual(&y, &phi) >= Rational::one() {
            trace.push(dual(&y, &phi));
            break;
        }
        flows.push(f);
        coefficients.push(c);
    }

    let total: Rational = coefficients.iter().sum();
    let k = flows.first().map_or(0, |f: &EdgeFlow| f.k());
    let mut flow = EdgeFlow::zero(k);
    if total.is_positive() {
        for (f, c) in flows.iter().zip(&coefficients) {
            let w = c / &total;
            for (i, com) in f.commodities.iter().enumerate() {
                for (&arc, x) in com {
                    flow.add(i, arc, &(x * &w));
                }
            }
        }
    }
    let lambda = &total / &l_up;
    let iterations = flows.len();
    Ok(BoostResult {
        flow,
        lambda,
        coefficients,
        flows,
        iterations,
        oracle_calls: calls,
        dual_trace: trace,
        log_bound: l_up,
        capped,
    })
}

/// Multiplies every entry of an edge flow.
pub fn scale_edge_flow(f: &EdgeFlow, factor: &Rational) -> EdgeFlow {
    let mut out = EdgeFlow::zero(f.k());
    for (i, com) in f.commodities.iter().enumerate() {
        for (&arc, x) in com {
            out.add(i, arc, &(x * factor));
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MincostKind {
    /// Route `lambda * D` for maximum `lambda`.
    Concurrent(Demand),
    /// Maximise the total value routed between the listed pairs.
    NonConcurrent(Vec<(usize, usize)>),
}

#[derive(Clone, Debug)]
pub struct MincostProblem {
    /// Vertex-weighted graph; its vertex lengths are ignored.
    pub graph: Graph,
    pub costs: Vec<u64>,
    pub budget: Option<Rational>,
    pub kind: MincostKind,
}

#[derive(Clone, Debug)]
pub struct MincostConfig {
    pub eps: Rational,
    /// Precision handed to the min-total-length oracle is
    /// `max(eps / oracle_divisor, 1/(2n))`.
    pub oracle_divisor: u64,
    /// Congestion slack the oracle is held to.
    pub kappa: Option<Rational>,
    pub mwu: MwuConfig,
    pub max_iterations: Option<usize>,
}

impl MincostConfig {
    pub fn new(eps: Rational) -> Self {
        MincostConfig {
            eps,
            oracle_divisor: 100,
            kappa: None,
            mwu: MwuConfig { eps_divisors: vec![1, 4, 16, 100], ..MwuConfig::default() },
            max_iterations: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct GuessRecord {
    /// Capacities and budget scaled by `2^j` for `j >= 0`, demand by `2^-j`
    /// for `j < 0`.
    pub exponent: i32,
    pub outcome: GuessOutcome,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GuessOutcome {
    Pruned,
    PremiseFailed,
    Finished { lambda: Rational, iterations: usize, oracle_calls: usize, capped: bool },
}

#[derive(Clone, Debug)]
pub struct MincostSolution {
    /// Capacity-respecting, within budget: `lambda * F_bar` of the best guess.
    pub flow: EdgeFlow,
    /// Concurrent: the routed multiple of `D`. Non-concurrent: routed value.
    pub lambda: Rational,
    pub cost: Rational,
    pub best_exponent: Option<i32>,
    pub guesses: Vec<GuessRecord>,
    pub oracle_calls: usize,
    pub eps_oracle: Rational,
}

/// Oracle computing `(1+eps')`-approximate min-total-length flows through
/// the low-step pipeline.
pub struct MtlOracle {
    pub demand: Demand,
    pub tau: Tau,
    pub eps: Rational,
    pub mwu: MwuConfig,
}

impl FlowOracle for MtlOracle {
    fn route(&mut self, g: &Graph, lens: &[u64]) -> Result<EdgeFlow> {
        let gl = g.with_vertex_lengths(lens.to_vec())?;
        approx_mtl_flow_with(&gl, &self.demand, self.tau, &self.eps, 1, &IdentityShortcut, &self.mwu)
    }
}

fn bits_ceil(x: u64) -> i32 {
    (64 - x.max(1).saturating_sub(1).leading_zeros()) as i32
}

/// Integral maximum flow from `sources` to `sinks` in a vertex-capacitated
/// undirected graph (augmenting paths on the split graph).
pub fn vertex_maxflow(g: &Graph, sources: &[usize], sinks: &[usize]) -> u64 {
    let n = g.n();
    // Nodes: v_in = 2v, v_out = 2v + 1, super source 2n, super sink 2n + 1.
    let (ss, tt) = (2 * n, 2 * n + 1);
    let big = g.vertex_caps().iter().sum::<u64>().max(1);
    let mut to: Vec<usize> = Vec::new();
    let mut cap: Vec<u64> = Vec::new();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); 2 * n + 2];
    let mut add = |u: usize, v: usize, c: u64, to: &mut Vec<usize>, cap: &mut Vec<u64>| {
        adj[u].push(to.len());
        to.push(v);
        cap.push(c);
        adj[v].push(to.len());
        to.push(u);
        cap.push(0);
    };
    for v in 0..n {
        add(2 * v, 2 * v + 1, g.vertex_cap(v), &mut to, &mut cap);
    }
    for e in g.edges() {
        add(2 * e.tail + 1, 2 * e.head, big, &mut to, &mut cap);
        add(2 * e.head + 1, 2 * e.tail, big, &mut to, &mut cap);
    }
    for &s in sources {
        add(ss, 2 * s, big, &mut to, &mut cap);
    }
    for &t in sinks {
        add(2 * t + 1, tt, big, &mut to, &mut cap);
    }
    let mut total = 0u64;
    loop {
        let mut prev: Vec<Option<usize>> = vec![None; 2 * n + 2];
        let mut queue = alloc::collections::VecDeque::from([ss]);
        let mut seen = vec![false; 2 * n + 2];
        seen[ss] = true;
        while let Some(u) = queue.pop_front() {
            for &e in &adj[u] {
                if cap[e] > 0 && !seen[to[e]] {
                    seen[to[e]] = true;
                    prev[to[e]] = Some(e);
                    queue.push_back(to[e]);
                }
            }
        }
        if !seen[tt] {
            return total;
        }
        let mut push = u64::MAX;
        let mut v = tt;
        while let Some(e) = prev[v] {
            push = push.min(cap[e]);
            v = to[e ^ 1];
        }
        let mut v = tt;
        while let Some(e) = prev[v] {
            cap[e] -= push;
            cap[e ^ 1] += push;
            v = to[e ^ 1];
        }
        total += push;
    }
}

/// Upper bound on the optimum from single-commodity maxflows: commodity `i`
/// alone cannot route more than its own maxflow, and all pairs together
/// cannot exceed the maxflow between the union of sources and sinks.
fn maxflow_bound(g: &Graph, kind: &MincostKind, factor: &Rational) -> Rational {
    match kind {
        MincostKind::Concurrent(d) => {
            let mut best: Option<Rational> = None;
            for p in d.pairs() {
                if let DemandValue::Finite(v) = &p.value {
                    if v.is_positive() {
                        let r = uint(vertex_maxflow(g, &[p.source], &[p.sink])) / (v * factor);
                        best = Some(match best {
                            Some(b) if b < r => b,
                            _ => r,
                        });
                    }
                }
            }
            best.unwrap_or_else(Rational::zero)
        }
        MincostKind::NonConcurrent(pairs) => {
            let srcs: Vec<usize> = pairs.iter().map(|p| p.0).collect();
            let snks: Vec<usize> = pairs.iter().map(|p| p.1).collect();
            uint(vertex_maxflow(g, &srcs, &snks))
        }
    }
}

/// `(1+eps)`-approximate concurrent or non-concurrent mincost flow via
/// boosting the min-total-length oracle over power-of-two scale guesses.
pub fn solve_mincost(problem: &MincostProblem, cfg: &MincostConfig) -> Result<MincostSolution> {
    let g = &problem.graph;
    if g.mode() != Mode::VertexUndirected {
        return Err(Error::InvalidGraph("mincost flows are solved on vertex-weighted graphs".into()));
    }
    let n = g.n();
    if problem.costs.len() != n {
        return Err(Error::InvalidParameter("one cost per vertex is required".into()));
    }
    let (demand, tau) = match &problem.kind {
        MincostKind::Concurrent(d) => {
            d.check_vertices(n)?;
            for p in d.pairs() {
                match &p.value {
                    DemandValue::Finite(v) if is_integral(v) && v.is_positive() => {}
                    _ => return Err(Error::InvalidDemand("concurrent demand must be positive integers".into())),
                }
            }
            (d.clone(), Tau::Full)
        }
        MincostKind::NonConcurrent(pairs) => {
            let d = Demand::new(
                pairs
                    .iter()
                    .map(|&(s, t)| DemandPair { source: s, sink: t, value: DemandValue::Finite(Rational::one()) })
                    .collect(),
            )?;
            d.check_vertices(n)?;
            (d, Tau::One)
        }
    };
    let lo = Rational::new(BigInt::one(), BigInt::from(2 * n.max(2)));
    let eps_oracle = {
        let e = &cfg.eps / uint(cfg.oracle_divisor.max(1));
        if e < lo {
            lo
        } else {
            e
        }
    };
    let kappa = cfg.kappa.clone().unwrap_or_else(|| {
        let lg = uint(bits_ceil(n as u64).max(1) as u64);
        uint(8) * &lg * &lg / &eps_oracle
    });
    let mut nbig = g.value_bound().max(problem.costs.iter().copied().max().unwrap_or(1));
    if let MincostKind::Concurrent(d) = &problem.kind {
        for p in d.pairs() {
            if let DemandValue::Finite(v) = &p.value {
                nbig = nbig.max(v.to_integer().to_u64().unwrap_or(u64::MAX));
            }
        }
    }
    let span = bits_ceil(nbig).max(1);
    let j_lo = match problem.kind {
        MincostKind::Concurrent(_) => -span,
        MincostKind::NonConcurrent(_) => 0,
    };

    if demand.k() == 0 {
        return Ok(MincostSolution {
            flow: EdgeFlow::zero(0),
            lambda: Rational::zero(),
            cost: Rational::zero(),
            best_exponent: None,
            guesses: Vec::new(),
            oracle_calls: 0,
            eps_oracle,
        });
    }

    let mut guesses = Vec::new();
    let mut best: Option<(Rational, EdgeFlow, i32)> = None;
    let mut calls = 0usize;
    for j in j_lo..=span {
        let (gj, dj, budget_j, undo) = if j >= 0 {
            let f = 1u64 << j;
            let caps: Vec<u64> = g.vertex_caps().iter().map(|&u| u * f).collect();
            let b = problem.budget.as_ref().map(|b| b * uint(f));
            (g.with_resource_caps(&caps)?, demand.clone(), b, Rational::one() / uint(f))
        } else {
            let f = 1u64 << (-j);
            let pairs: Vec<DemandPair> = demand
                .pairs()
                .iter()
                .map(|p| DemandPair {
                    source: p.source,
                    sink: p.sink,
                    value: match &p.value {
                        DemandValue::Finite(v) => DemandValue::Finite(v * uint(f)),
                        DemandValue::Infinite => DemandValue::Infinite,
                    },
                })
                .collect();
            (g.clone(), Demand::new(pairs)?, problem.budget.clone(), uint(f))
        };
        let factor = if j >= 0 { Rational::one() } else { uint(1u64 << (-j)) };
        let kind_j = match &problem.kind {
            MincostKind::Concurrent(_) => MincostKind::Concurrent(demand.clone()),
            k => k.clone(),
        };
        if maxflow_bound(&gj, &kind_j, &factor) < Rational::one() {
            guesses.push(GuessRecord { exponent: j, outcome: GuessOutcome::Pruned });
            continue;
        }
        let mut oracle = MtlOracle { demand: dj, tau, eps: eps_oracle.clone(), mwu: cfg.mwu.clone() };
        let bc = BoostConfig { eps: cfg.eps.clone(), kappa: kappa.clone(), max_iterations: cfg.max_iterations };
        let r = match boost(&gj, &problem.costs, budget_j.as_ref(), &mut oracle, &bc) {
            Ok(r) => r,
            Err(Error::PremiseViolated { .. }) => {
                guesses.push(GuessRecord { exponent: j, outcome: GuessOutcome::PremiseFailed });
                continue;
            }
            Err(e) => return Err(e),
        };
        calls += r.oracle_calls;
        let lam = &r.lambda * &undo;
        guesses.push(GuessRecord {
            exponent: j,
            outcome: GuessOutcome::Finished {
                lambda: lam.clone(),
                iterations: r.iterations,
                oracle_calls: r.oracle_calls,
                capped: r.capped,
            },
        });
        // The routed flow in original units: lambda_j * F_bar scaled back.
        let routed = scale_edge_flow(&r.flow, &(&r.lambda * if j >= 0 { undo.clone() } else { Rational::one() }));
        if best.as_ref().map_or(true, |(b, _, _)| lam > *b) {
            best = Some((lam, routed, j));
        }
        // A finished run with lambda >= 1 in scaled units certifies
        // beta >= 1, which is all the approximation bound needs; a capped
        // run means larger guesses would be capped as well.
        if r.capped || r.lambda >= Rational::one() {
            break;
        }
    }
    let (lambda, flow, ex) = match best {
        Some((l, f, j)) => (l, f, Some(j)),
        None => (Rational::zero(), EdgeFlow::zero(demand.k()), None),
    };
    let loads = flow.resource_loads(g);
    for (v, x) in loads.iter().enumerate() {
        if *x > uint(g.vertex_cap(v)) {
            return Err(Error::ContractViolation(alloc::format!("capacity exceeded at vertex {v}")));
        }
    }
    let cost = flow_cost(&loads, &problem.costs);
    if let Some(b) = &problem.budget {
        if cost > *b {
            return Err(Error::ContractViolation("budget exceeded".into()));
        }
    }
    Ok(MincostSolution { flow, lambda, cost, best_exponent: ex, guesses, oracle_calls: calls, eps_oracle })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{int, ratio};
    use crate::oracle::{exact_concurrent_lambda, exact_nonconcurrent_value};

    /// Always returns the same fixed flow.
    struct Fixed(EdgeFlow);

    impl FlowOracle for Fixed {
        fn route(&mut self, _g: &Graph, _lens: &[u64]) -> Result<EdgeFlow> {
            Ok(self.0.clone())
        }
    }

    fn unit_path(path: &[usize], value: Rational) -> EdgeFlow {
        let mut f = EdgeFlow::zero(1);
        for w in path.windows(2) {
            f.add(0, (w[0], w[1]), &value);
        }
        f
    }

    #[test]
    fn single_edge_lambda() {
        // s - t with capacities 3, demand 1: lambda* = 3.
        let g = Graph::vertex_weighted(vec![1, 1], vec![3, 3], &[(0, 1)]).unwrap();
        let eps = ratio(1, 8);
        let mut o = Fixed(unit_path(&[0, 1], int(1)));
        let r = boost(&g, &[0, 0], None, &mut o, &BoostConfig::new(eps.clone(), int(1))).unwrap();
        assert!(!r.capped);
        assert!(r.lambda <= int(3));
        assert!(r.lambda >= (int(1) - int(10) * &eps) * int(3) * ratio(1, 1));
        let total: Rational = r.coefficients.iter().sum();
        assert_eq!(&total / &r.log_bound, r.lambda);
        for w in r.dual_trace.windows(2) {
            assert!(w[0] <= w[1]);
        }
    }

    #[test]
    fn split_maxflow_counts_vertex_caps() {
        // Diamond 0-{1,2}-3 with middle capacities 2 and 1.
        let g = Graph::vertex_weighted(vec![1; 4], vec![5, 2, 1, 5], &[(0, 1), (1, 3), (0, 2), (2, 3)]).unwrap();
        assert_eq!(vertex_maxflow(&g, &[0], &[3]), 3);
        assert_eq!(vertex_maxflow(&g, &[1], &[2]), 1);
        let g2 = Graph::vertex_weighted(vec![1; 3], vec![4, 4, 4], &[(0, 1)]).unwrap();
        assert_eq!(vertex_maxflow(&g2, &[0], &[2]), 0);
    }

    #[test]
    fn kappa_violation_aborts() {
        let g = Graph::vertex_weighted(vec![1, 1], vec![1, 1], &[(0, 1)]).unwrap();
        let mut o = Fixed(unit_path(&[0, 1], int(5)));
        let err = boost(&g, &[0, 0], None, &mut o, &BoostConfig::new(ratio(1, 4), int(2))).unwrap_err();
        assert!(matches!(err, Error::ContractViolation(_)));
    }

    #[test]
    fn convex_combination_reconstructs() {
        let g = Graph::vertex_weighted(vec![1, 1, 1, 1], vec![1, 1, 1, 1], &[(0, 1), (1, 3), (0, 2), (2, 3)]).unwrap();
        struct Alternate(usize);
        impl FlowOracle for Alternate {
            fn route(&mut self, _g: &Graph, lens: &[u64]) -> Result<EdgeFlow> {
                self.0 += 1;
                let mid = if lens[1] <= lens[2] { 1 } else { 2 };
                Ok(unit_path(&[0, mid, 3], int(1)))
            }
        }
        let mut o = Alternate(0);
        let r = boost(&g, &[0; 4], None, &mut o, &BoostConfig::new(ratio(1, 4), int(1))).unwrap();
        let total: Rational = r.coefficients.iter().sum();
        let mut rebuilt = EdgeFlow::zero(1);
        for (f, c) in r.flows.iter().zip(&r.coefficients) {
            for (&a, x) in &f.commodities[0] {
                rebuilt.add(0, a, &(x * c / &total));
            }
        }
        assert_eq!(rebuilt, r.flow);
        let scaled = scale_edge_flow(&r.flow, &r.lambda);
        for (v, x) in scaled.resource_loads(&g).iter().enumerate() {
            assert!(*x <= uint(g.vertex_cap(v)));
        }
        // Endpoints cap the optimum at 1.
        assert!(r.lambda <= int(1));
        assert!(r.lambda >= ratio(1, 2));
    }

    #[test]
    fn budget_respected() {
        // Two routes: 0-1-3 free, 0-2-3 cost 10 at vertex 2; budget 5.
        let g = Graph::vertex_weighted(vec![1; 4], vec![2, 1, 1, 2], &[(0, 1), (1, 3), (0, 2), (2, 3)]).unwrap();
        let costs = [0, 0, 10, 0];
        let problem = MincostProblem {
            graph: g.clone(),
            costs: costs.to_vec(),
            budget: Some(int(5)),
            kind: MincostKind::Concurrent(Demand::finite(&[(0, 3, int(1))]).unwrap()),
        };
        let mut cfg = MincostConfig::new(ratio(1, 4));
        cfg.oracle_divisor = 1;
        let s = solve_mincost(&problem, &cfg).unwrap();
        assert!(s.cost <= int(5));
        let opt = exact_concurrent_lambda(&g, &costs, &Demand::finite(&[(0, 3, int(1))]).unwrap(), Some(&int(5))).unwrap();
        assert_eq!(opt, ratio(3, 2));
        assert!(s.lambda <= opt);
        assert!(s.lambda.is_positive());
    }

    #[test]
    fn nonconcurrent_disconnected_pair() {
        let g = Graph::vertex_weighted(vec![1; 4], vec![1; 4], &[(0, 1)]).unwrap();
        let problem = MincostProblem {
            graph: g.clone(),
            costs: vec![0; 4],
            budget: None,
            kind: MincostKind::NonConcurrent(vec![(0, 1), (2, 3)]),
        };
        let mut cfg = MincostConfig::new(ratio(1, 4));
        cfg.oracle_divisor = 1;
        let s = solve_mincost(&problem, &cfg).unwrap();
        let opt = exact_nonconcurrent_value(&g, &[0; 4], &[(0, 1), (2, 3)], None).unwrap();
        assert_eq!(opt, int(1));
        assert!(s.flow.commodities[1].is_empty());
        assert!(s.lambda <= opt && s.lambda.is_positive());
    }
}
