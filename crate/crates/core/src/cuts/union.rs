//! Verifier for the sparsity of a union of sequential moving cuts.
//!
//! Given cuts `C_1..C_k` with witnessing demands `D_1..D_k`, the verifier
//! builds the summed cut and the matching-dispersed demand `MD`, then checks
//! four assertions: `MD` is `2h`-length in `G`, `MD` is `A`-respecting, the
//! summed cut separates `MD` beyond `h(s-2)`, and the sparsity measured on
//! `MD` stays under the size bound.
//!
//! Semantic properties of the input witness (respecting, length, separation,
//! claimed sparsity) are recorded per cut rather than rejected, so that a
//! corrupted witness surfaces as a failed assertion with a concrete pair.

use alloc::format;
use alloc::vec::Vec;
use num_traits::{Signed, Zero};

use super::matching::{build_demand_matching_graph, check_spg, dispersed_from_graph, greedy_forest_cover, SpgReport};
use super::{apply_cut, cut_sparsity_with_limit, separated_demand, MovingCut};
use crate::demand::{endpoint_loads, pair_demand_size, NodeWeighting, PairDemand};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::num::{ceil_int, from_big, is_integral, max_rat, to_f64, uint, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CutSequenceWitness {
    pub cuts: Vec<MovingCut>,
    pub demands: Vec<PairDemand>,
    pub sparsities: Vec<Rational>,
}

impl CutSequenceWitness {
    /// Builds the witness for a cut sequence: `D_i` is a maximum
    /// `A`-respecting demand that is `h`-length in `G - sum_{j<i} C_j` and
    /// `hs`-separated once `C_i` is applied, and `phi_i = |C_i| / |D_i|`.
    /// With integral `A` the demands are integral.
    pub fn from_cuts(g: &Graph, a: &NodeWeighting, cuts: Vec<MovingCut>, h: u64, s: u64) -> Result<Self> {
        let mut current = g.clone();
        let mut demands = Vec::with_capacity(cuts.len());
        let mut sparsities = Vec::with_capacity(cuts.len());
        for c in &cuts {
            let sp = cut_sparsity_with_limit(&current, c, a, h, h.saturating_mul(s), usize::MAX)?;
            sparsities.push(c.size(g) / &sp.separated);
            demands.push(sp.demand);
            current = apply_cut(&current, c)?;
        }
        Ok(CutSequenceWitness { cuts, demands, sparsities })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct UnionConfig {
    /// Constant `c` in the `n^{c/s}` factor of the size bound.
    pub c: u32,
}

impl Default for UnionConfig {
    fn default() -> Self {
        UnionConfig { c: 4 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    Pair { u: usize, v: usize, distance: Option<u64> },
    Vertex { v: usize, out: Rational, inn: Rational, weight: Rational },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Assertion {
    pub passed: bool,
    pub witness: Option<Witness>,
}

impl Assertion {
    fn from_violation(w: Option<Witness>) -> Self {
        Assertion { passed: w.is_none(), witness: w }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SizeBound {
    pub passed: bool,
    /// `|C_hat| / sep(C_hat, MD)`; `None` when nothing is separated.
    pub measured: Option<Rational>,
    pub bound: f64,
    pub ratio: f64,
}

/// Per-cut record of the witness preconditions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessCheck {
    pub index: usize,
    pub a_respecting: bool,
    /// A pair farther than `h` in `G - sum_{j<i} C_j`.
    pub too_long: Option<Witness>,
    /// A pair at distance at most `hs` in `G - sum_{j<=i} C_j`.
    pub not_separated: Option<Witness>,
    pub cut_size: Rational,
    pub demand_size: Rational,
    pub sparsity_ok: bool,
}

impl WitnessCheck {
    pub fn ok(&self) -> bool {
        self.a_respecting && self.too_long.is_none() && self.not_separated.is_none() && self.sparsity_ok
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct UnionReport {
    pub preconditions: Vec<WitnessCheck>,
    pub alpha: usize,
    pub union_cut: MovingCut,
    pub union_cut_size: Rational,
    pub md: PairDemand,
    pub md_size: Rational,
    /// `|MD| >= sum |D_i| / (4 alpha)`.
    pub md_size_lemma: bool,
    /// Reversed matching batches checked for the parallel-greedy property.
    pub spg: SpgReport,
    pub two_h_length: Assertion,
    pub a_respecting: Assertion,
    pub separated: Assertion,
    pub size_bound: SizeBound,
}

impl UnionReport {
    pub fn all_passed(&self) -> bool {
        self.two_h_length.passed && self.a_respecting.passed && self.separated.passed && self.size_bound.passed
    }
}

fn check_structure(g: &Graph, a: &NodeWeighting, w: &CutSequenceWitness, s: u64) -> Result<()> {
    let bad = |m: alloc::string::String| Err(Error::InconsistentWitness(m));
    let k = w.cuts.len();
    if k == 0 {
        return bad("empty cut sequence".into());
    }
    if w.demands.len() != k || w.sparsities.len() != k {
        return bad(format!(
            "{} cuts, {} demands, {} sparsities",
            k,
            w.demands.len(),
            w.sparsities.len()
        ));
    }
    if s < 2 {
        return bad(format!("length slack {s} below 2"));
    }
    if a.0.len() != g.n() || a.0.iter().any(|x| !is_integral(x)) {
        return bad("node-weighting must be integral with one entry per vertex".into());
    }
    let h0 = w.cuts[0].h();
    for (i, c) in w.cuts.iter().enumerate() {
        if c.h() != h0 {
            return bad(format!("cut {i} has length parameter {} but cut 0 has {h0}", c.h()));
        }
        if c.values().keys().any(|&r| r >= g.resource_count()) {
            return bad(format!("cut {i} names an element outside the graph"));
        }
    }
    for (i, d) in w.demands.iter().enumerate() {
        for (&(u, v), x) in d {
            if u >= g.n() || v >= g.n() || u == v || !x.is_positive() || !is_integral(x) {
                return bad(format!("demand {i} has bad entry ({u}, {v})"));
            }
        }
    }
    if w.sparsities.iter().any(|p| !p.is_positive()) {
        return bad("sparsities must be positive".into());
    }
    Ok(())
}

fn first_pair(d: &PairDemand, g: &Graph, bad: impl Fn(Option<u64>) -> bool) -> Option<Witness> {
    let mut rows: alloc::collections::BTreeMap<usize, Vec<Option<u64>>> = Default::default();
    for &(u, v) in d.keys() {
        let dist = rows.entry(u).or_insert_with(|| g.distances_from(u))[v];
        if bad(dist) {
            return Some(Witness::Pair { u, v, distance: dist });
        }
    }
    None
}

/// Runs all checks. Errors only on structurally inconsistent input.
pub fn verify_union_witness(
    g: &Graph,
    a: &NodeWeighting,
    w: &CutSequenceWitness,
    h: u64,
    s: u64,
    cfg: UnionConfig,
) -> Result<UnionReport> {
    check_structure(g, a, w, s)?;
    let n = g.n();
    let hs = h.saturating_mul(s);

    let mut preconditions = Vec::with_capacity(w.cuts.len());
    let mut current = g.clone();
    for (i, (c, d)) in w.cuts.iter().zip(&w.demands).enumerate() {
        let too_long = first_pair(d, &current, |l| l.map_or(true, |l| l > h));
        let after = apply_cut(&current, c)?;
        let not_separated = first_pair(d, &after, |l| l.map_or(false, |l| l <= hs));
        let cut_size = c.size(g);
        let demand_size = pair_demand_size(d);
        preconditions.push(WitnessCheck {
            index: i,
            a_respecting: a.respects(d),
            too_long,
            not_separated,
            sparsity_ok: cut_size <= &w.sparsities[i] * &demand_size,
            cut_size,
            demand_size,
        });
        current = after;
    }

    // Copies are sized for the demands actually given, so that a demand
    // violating A still yields an MD that assertion (2) can inspect.
    let mut copies = a.clone();
    for d in &w.demands {
        let (outs, ins) = endpoint_loads(d, n);
        for v in 0..n {
            let need = from_big(ceil_int(max_rat(&outs[v], &ins[v])));
            copies.0[v] = max_rat(&copies.0[v], &need).clone();
        }
    }
    let dmg = build_demand_matching_graph(&copies, &w.demands)?;
    let cover = greedy_forest_cover(&dmg);
    let alpha = cover.alpha();
    let md = dispersed_from_graph(&dmg, &cover)?;
    let md_size = pair_demand_size(&md);
    let total_d = w.demands.iter().fold(Rational::zero(), |acc, d| acc + pair_demand_size(d));
    let md_size_lemma = alpha == 0 || &md_size * uint(4 * alpha as u64) >= total_d;
    let reversed: Vec<Vec<(usize, usize)>> = dmg.matchings.iter().rev().cloned().collect();
    let spg = check_spg(dmg.copy_count(), &reversed, s as usize)?;

    let two_h = h.saturating_mul(2);
    let two_h_length = Assertion::from_violation(first_pair(&md, g, |l| l.map_or(true, |l| l > two_h)));

    let (outs, ins) = endpoint_loads(&md, n);
    let a_violation = (0..n).find(|&v| outs[v] > a.0[v] || ins[v] > a.0[v]).map(|v| Witness::Vertex {
        v,
        out: outs[v].clone(),
        inn: ins[v].clone(),
        weight: a.0[v].clone(),
    });
    let a_respecting = Assertion::from_violation(a_violation);

    let union_cut = MovingCut::sum(&w.cuts)?;
    let union_cut_size = union_cut.size(g);
    let threshold = h.saturating_mul(s - 2);
    let cut_graph = apply_cut(g, &union_cut)?;
    let separated = Assertion::from_violation(first_pair(&md, &cut_graph, |l| l.map_or(false, |l| l <= threshold)));

    let sep = separated_demand(g, &union_cut, &md, threshold)?;
    let measured = if sep.is_positive() { Some(&union_cut_size / &sep) } else { None };
    let sum_c = w.cuts.iter().fold(Rational::zero(), |acc, c| acc + c.size(g));
    let sum_ratio = w
        .cuts
        .iter()
        .zip(&w.sparsities)
        .fold(Rational::zero(), |acc, (c, p)| acc + c.size(g) / p);
    let log_n = libm::log2(n.max(2) as f64).max(1.0);
    let sf = s as f64;
    let factor = sf * sf * sf * log_n * log_n * log_n * libm::pow(n.max(1) as f64, cfg.c as f64 / sf);
    let bound = if sum_ratio.is_zero() {
        if sum_c.is_zero() { 0.0 } else { f64::INFINITY }
    } else {
        factor * to_f64(&(&sum_c / &sum_ratio))
    };
    let (passed, ratio) = match &measured {
        None => (false, f64::INFINITY),
        Some(m) => {
            let mf = to_f64(m);
            let ratio = if bound > 0.0 { mf / bound } else if mf == 0.0 { 0.0 } else { f64::INFINITY };
            (mf <= bound * (1.0 + 1e-12), ratio)
        }
    };
    let size_bound = SizeBound { passed, measured, bound, ratio };

    Ok(UnionReport {
        preconditions,
        alpha,
        union_cut,
        union_cut_size,
        md,
        md_size,
        md_size_lemma,
        spg,
        two_h_length,
        a_respecting,
        separated,
        size_bound,
    })
}
