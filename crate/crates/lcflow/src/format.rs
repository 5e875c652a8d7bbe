//! Text formats for graphs, demands, pair lists and moving cuts.
//!
//! Graph files:
//!
//! ```text
//! c free-form comment
//! p lcf <n> <m> <vertex|edge>
//! v <id> <length> <capacity>      (vertex mode, one per vertex)
//! b <id> <cost>                   (vertex mode, optional vertex cost)
//! a <u> <v> [<length> <capacity>] (lengths and capacities in edge mode only)
//! ```
//!
//! Demand and pair files hold `d <commodity> <u> <v> <value|inf>` lines, and
//! cut files hold `c <vertex> <numerator>/<h>` lines after an optional
//! `h <h>` header. All ids are 1-based on disk and 0-based in memory. Lines
//! starting with `#` are comments in every format.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};

use lcflow_core::cuts::MovingCut;
use lcflow_core::demand::{Demand, DemandPair, DemandValue, SourceSinkPair};
use lcflow_core::graph::{Edge, Graph, Mode};
use lcflow_core::num::{parse_rat, Rational};

/// A parse failure tied to a 1-based line number (0 for whole-file issues).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line == 0 {
            write!(f, "{}", self.message)
        } else {
            write!(f, "line {}: {}", self.line, self.message)
        }
    }
}

impl std::error::Error for ParseError {}

pub type ParseResult<T> = Result<T, ParseError>;

fn err<T>(line: usize, message: impl Into<String>) -> ParseResult<T> {
    Err(ParseError { line, message: message.into() })
}

/// Graph plus the optional per-vertex cost column.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphFile {
    pub graph: Graph,
    /// Vertex costs for mincost problems; vertices without a `b` line
    /// cost their length. Empty in edge mode.
    pub costs: Vec<u64>,
}

fn data_lines(text: &str, comment_c: bool) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(move |(i, l)| {
        let toks: Vec<&str> = l.split_whitespace().collect();
        match toks.first() {
            None => None,
            Some(t) if t.starts_with('#') => None,
            Some(&"c") if comment_c => None,
            Some(_) => Some((i + 1, toks)),
        }
    })
}

fn positive(tok: &str, line: usize, what: &str) -> ParseResult<u64> {
    match tok.parse::<u64>() {
        Ok(0) => err(line, format!("{what} must be a positive integer, got 0")),
        Ok(x) => Ok(x),
        Err(_) if tok.starts_with('-') => err(line, format!("{what} must be a positive integer, got {tok}")),
        Err(_) => err(line, format!("{what} is not an integer: {tok}")),
    }
}

fn vertex_id(tok: &str, line: usize, n: usize) -> ParseResult<usize> {
    match tok.parse::<usize>() {
        Ok(v) if v >= 1 && v <= n => Ok(v - 1),
        Ok(v) => err(line, format!("vertex id {v} outside 1..={n}")),
        Err(_) => err(line, format!("vertex id is not an integer: {tok}")),
    }
}

pub fn parse_graph(text: &str) -> ParseResult<GraphFile> {
    let mut header: Option<(usize, usize, Mode)> = None;
    let mut lens: Vec<Option<u64>> = Vec::new();
    let mut caps: Vec<u64> = Vec::new();
    let mut costs: Vec<Option<u64>> = Vec::new();
    let mut edges: Vec<Edge> = Vec::new();
    let mut seen: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for (ln, t) in data_lines(text, true) {
        match t[0] {
            "p" => {
                if header.is_some() {
                    return err(ln, "second problem line");
                }
                if t.len() != 5 || t[1] != "lcf" {
                    return err(ln, "malformed problem line, expected `p lcf <n> <m> <vertex|edge>`");
                }
                let n: usize = t[2].parse().or_else(|_| err(ln, format!("bad vertex count {}", t[2])))?;
                let m: usize = t[3].parse().or_else(|_| err(ln, format!("bad edge count {}", t[3])))?;
                let mode = match t[4] {
                    "vertex" => Mode::VertexUndirected,
                    "edge" => Mode::EdgeDirected,
                    other => return err(ln, format!("unknown mode {other}, expected vertex or edge")),
                };
                lens = vec![None; n];
                caps = vec![0; n];
                costs = vec![None; n];
                header = Some((n, m, mode));
            }
            "v" => {
                let Some((n, _, mode)) = header else { return err(ln, "vertex line before problem line") };
                if mode != Mode::VertexUndirected {
                    return err(ln, "vertex lines are only allowed in vertex mode");
                }
                if t.len() != 4 {
                    return err(ln, "malformed vertex line, expected `v <id> <length> <capacity>`");
                }
                let v = vertex_id(t[1], ln, n)?;
                let len = positive(t[2], ln, "vertex length")?;
                let cap = positive(t[3], ln, "vertex capacity")?;
                if lens[v].is_some() {
                    return err(ln, format!("duplicate vertex id {}", v + 1));
                }
                lens[v] = Some(len);
                caps[v] = cap;
            }
            "b" => {
                let Some((n, _, mode)) = header else { return err(ln, "cost line before problem line") };
                if mode != Mode::VertexUndirected {
                    return err(ln, "cost lines are only allowed in vertex mode");
                }
                if t.len() != 3 {
                    return err(ln, "malformed cost line, expected `b <id> <cost>`");
                }
                let v = vertex_id(t[1], ln, n)?;
                let c: u64 = t[2].parse().or_else(|_| err(ln, format!("cost is not a nonnegative integer: {}", t[2])))?;
                if costs[v].replace(c).is_some() {
                    return err(ln, format!("duplicate cost for vertex {}", v + 1));
                }
            }
            "a" => {
                let Some((n, _, mode)) = header else { return err(ln, "edge line before problem line") };
                let (len, cap) = match (mode, t.len()) {
                    (Mode::VertexUndirected, 3) => (0, 0),
                    (Mode::VertexUndirected, _) => {
                        return err(ln, "malformed edge line, vertex mode expects `a <u> <v>`");
                    }
                    (Mode::EdgeDirected, 5) => {
                        (positive(t[3], ln, "edge length")?, positive(t[4], ln, "edge capacity")?)
                    }
                    (Mode::EdgeDirected, _) => {
                        return err(ln, "malformed edge line, edge mode expects `a <u> <v> <length> <capacity>`");
                    }
                };
                let u = vertex_id(t[1], ln, n)?;
                let v = vertex_id(t[2], ln, n)?;
                if u == v {
                    return err(ln, format!("self-loop at vertex {}", u + 1));
                }
                let key = if mode == Mode::VertexUndirected { (u.min(v), u.max(v)) } else { (u, v) };
                if let Some(first) = seen.insert(key, ln) {
                    return err(ln, format!("duplicate edge {}-{} (first on line {first})", u + 1, v + 1));
                }
                edges.push(Edge { tail: u, head: v, len, cap });
            }
            other => return err(ln, format!("unknown line type `{other}`")),
        }
    }
    let Some((n, m, mode)) = header else { return err(0, "missing problem line `p lcf <n> <m> <mode>`") };
    if edges.len() != m {
        return err(0, format!("problem line declares {m} edges but {} were given", edges.len()));
    }
    match mode {
        Mode::VertexUndirected => {
            if let Some(v) = lens.iter().position(Option::is_none) {
                return err(0, format!("vertex {} has no `v` line", v + 1));
            }
            let lens: Vec<u64> = lens.into_iter().map(Option::unwrap).collect();
            let costs = costs.iter().zip(&lens).map(|(c, l)| c.unwrap_or(*l)).collect();
            let pairs: Vec<(usize, usize)> = edges.iter().map(|e| (e.tail, e.head)).collect();
            let graph = Graph::vertex_weighted(lens, caps, &pairs).map_err(|e| ParseError { line: 0, message: e.to_string() })?;
            Ok(GraphFile { graph, costs })
        }
        Mode::EdgeDirected => {
            let graph = Graph::edge_weighted(n, edges).map_err(|e| ParseError { line: 0, message: e.to_string() })?;
            Ok(GraphFile { graph, costs: Vec::new() })
        }
    }
}

struct DemandLine {
    line: usize,
    commodity: usize,
    u: usize,
    v: usize,
    value: DemandValue,
}

fn demand_lines(text: &str, n: usize) -> ParseResult<Vec<DemandLine>> {
    let mut out = Vec::new();
    for (ln, t) in data_lines(text, true) {
        if t[0] != "d" {
            return err(ln, format!("unknown line type `{}`", t[0]));
        }
        if t.len() != 5 {
            return err(ln, "malformed demand line, expected `d <commodity> <u> <v> <value|inf>`");
        }
        let commodity = match t[1].parse::<usize>() {
            Ok(c) if c >= 1 => c - 1,
            _ => return err(ln, format!("commodity must be a positive integer: {}", t[1])),
        };
        let u = vertex_id(t[2], ln, n)?;
        let v = vertex_id(t[3], ln, n)?;
        let value = if t[4] == "inf" {
            DemandValue::Infinite
        } else {
            match parse_rat(t[4]) {
                Some(r) if r >= Rational::from_integer(0.into()) => DemandValue::Finite(r),
                Some(_) => return err(ln, format!("demand value must be nonnegative: {}", t[4])),
                None => return err(ln, format!("demand value is not a rational or `inf`: {}", t[4])),
            }
        };
        if u == v {
            let zero = matches!(&value, DemandValue::Finite(r) if *r == Rational::from_integer(0.into()));
            if !zero {
                return err(ln, format!("D(u,u) > 0 at vertex {}", u + 1));
            }
        }
        out.push(DemandLine { line: ln, commodity, u, v, value });
    }
    Ok(out)
}

fn check_contiguous(commodities: &BTreeSet<usize>) -> ParseResult<()> {
    if let Some((i, _)) = commodities.iter().enumerate().find(|(i, c)| *i != **c) {
        return err(0, format!("commodity ids must be 1..=k without gaps; commodity {} is missing", i + 1));
    }
    Ok(())
}

/// Demand file: exactly one line per commodity.
pub fn parse_demand(text: &str, n: usize) -> ParseResult<Demand> {
    let mut by_c: BTreeMap<usize, DemandPair> = BTreeMap::new();
    for l in demand_lines(text, n)? {
        if l.u == l.v {
            continue;
        }
        let p = DemandPair { source: l.u, sink: l.v, value: l.value };
        if by_c.insert(l.commodity, p).is_some() {
            return err(l.line, format!("commodity {} listed twice in a demand file", l.commodity + 1));
        }
    }
    check_contiguous(&by_c.keys().copied().collect())?;
    Demand::new(by_c.into_values().collect()).map_err(|e| ParseError { line: 0, message: e.to_string() })
}

/// Pair file: every line adds its endpoints to the source and sink sets of
/// its commodity; values are ignored.
pub fn parse_pairs(text: &str, n: usize) -> ParseResult<Vec<SourceSinkPair>> {
    let mut by_c: BTreeMap<usize, (BTreeSet<usize>, BTreeSet<usize>)> = BTreeMap::new();
    for l in demand_lines(text, n)? {
        if l.u == l.v {
            return err(l.line, format!("source equals sink at vertex {}", l.u + 1));
        }
        let e = by_c.entry(l.commodity).or_default();
        e.0.insert(l.u);
        e.1.insert(l.v);
    }
    check_contiguous(&by_c.keys().copied().collect())?;
    let pairs: Vec<SourceSinkPair> = by_c
        .into_values()
        .map(|(s, t)| SourceSinkPair { sources: s.into_iter().collect(), sinks: t.into_iter().collect() })
        .collect();
    for (i, p) in pairs.iter().enumerate() {
        p.validate(n).map_err(|e| ParseError { line: 0, message: format!("commodity {}: {e}", i + 1) })?;
    }
    Ok(pairs)
}

/// Cut file; every line must use the same `h`. An optional `h <h>` line
/// fixes the parameter for cuts without entries (default 1).
pub fn parse_cut(text: &str, n: usize) -> ParseResult<MovingCut> {
    let mut h: Option<u64> = None;
    let mut vals: BTreeMap<usize, u64> = BTreeMap::new();
    for (ln, t) in data_lines(text, false) {
        if t[0] == "h" && t.len() == 2 {
            let den = positive(t[1], ln, "cut length parameter h")?;
            if h.is_some_and(|h0| h0 != den) {
                return err(ln, format!("header declares h = {den} but earlier lines use {}", h.unwrap()));
            }
            h = Some(den);
            continue;
        }
        if t[0] != "c" || t.len() != 3 {
            return err(ln, "malformed cut line, expected `c <vertex-id> <numerator>/<h>`");
        }
        let v = vertex_id(t[1], ln, n)?;
        let Some((num, den)) = t[2].split_once('/') else {
            return err(ln, format!("cut value must be written `<numerator>/<h>`: {}", t[2]));
        };
        let num: u64 = num.parse().or_else(|_| err(ln, format!("bad numerator {num}")))?;
        let den = positive(den, ln, "cut length parameter h")?;
        match h {
            None => h = Some(den),
            Some(h0) if h0 != den => return err(ln, format!("cut uses h = {den} but earlier lines use {h0}")),
            _ => {}
        }
        if vals.insert(v, num).is_some() {
            return err(ln, format!("vertex {} listed twice", v + 1));
        }
    }
    let h = h.unwrap_or(1);
    let pairs: Vec<(usize, u64)> = vals.into_iter().collect();
    MovingCut::from_numerators(h, &pairs).map_err(|e| ParseError { line: 0, message: e.to_string() })
}

pub fn write_graph(gf: &GraphFile) -> String {
    let g = &gf.graph;
    let mut s = String::new();
    match g.mode() {
        Mode::VertexUndirected => {
            writeln!(s, "p lcf {} {} vertex", g.n(), g.m()).unwrap();
            for v in 0..g.n() {
                writeln!(s, "v {} {} {}", v + 1, g.vertex_len(v), g.vertex_cap(v)).unwrap();
            }
            for (v, c) in gf.costs.iter().enumerate() {
                if *c != g.vertex_len(v) {
                    writeln!(s, "b {} {}", v + 1, c).unwrap();
                }
            }
            for e in g.edges() {
                writeln!(s, "a {} {}", e.tail + 1, e.head + 1).unwrap();
            }
        }
        Mode::EdgeDirected => {
            writeln!(s, "p lcf {} {} edge", g.n(), g.m()).unwrap();
            for e in g.edges() {
                writeln!(s, "a {} {} {} {}", e.tail + 1, e.head + 1, e.len, e.cap).unwrap();
            }
        }
    }
    s
}

fn rat_token(r: &Rational) -> String {
    lcflow_core::num::fmt_rat(r)
}

pub fn write_demand(d: &Demand) -> String {
    let mut s = String::new();
    for (i, p) in d.pairs().iter().enumerate() {
        let v = match &p.value {
            DemandValue::Finite(r) => rat_token(r),
            DemandValue::Infinite => "inf".to_string(),
        };
        writeln!(s, "d {} {} {} {}", i + 1, p.source + 1, p.sink + 1, v).unwrap();
    }
    s
}

/// Writes `max(|S|, |T|)` lines per commodity, pairing sources and sinks
/// cyclically so that every vertex of both sets appears.
pub fn write_pairs(pairs: &[SourceSinkPair]) -> String {
    let mut s = String::new();
    for (i, p) in pairs.iter().enumerate() {
        for j in 0..p.sources.len().max(p.sinks.len()) {
            let u = p.sources[j % p.sources.len()];
            let v = p.sinks[j % p.sinks.len()];
            writeln!(s, "d {} {} {} inf", i + 1, u + 1, v + 1).unwrap();
        }
    }
    s
}

pub fn write_cut(c: &MovingCut) -> String {
    let mut s = format!("h {}\n", c.h());
    let h = Rational::from_integer(c.h().into());
    for (v, x) in c.values() {
        let num = x * &h;
        writeln!(s, "c {} {}/{}", v + 1, num.to_integer(), c.h()).unwrap();
    }
    s
}
