use lcflow::format::{
    parse_cut, parse_demand, parse_graph, parse_pairs, write_cut, write_demand, write_graph, write_pairs, GraphFile,
};
use lcflow::gen;
use lcflow_core::cuts::MovingCut;
use lcflow_core::demand::{Demand, DemandPair, DemandValue, SourceSinkPair};
use lcflow_core::num::ratio;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn edge_graph_round_trip(seed in any::<u64>(), n in 2usize..9, m in 0usize..20) {
        let g = gen::edge_graph(&mut gen::rng(seed), n, m, 9, 9);
        let gf = GraphFile { graph: g, costs: vec![] };
        prop_assert_eq!(parse_graph(&write_graph(&gf)).unwrap(), gf);
    }

    #[test]
    fn vertex_graph_round_trip(seed in any::<u64>(), n in 1usize..9, m in 0usize..20, costs in proptest::collection::vec(0u64..5, 9)) {
        let g = gen::vertex_graph(&mut gen::rng(seed), n, m, 4, 4);
        let gf = GraphFile { graph: g, costs: costs[..n].to_vec() };
        prop_assert_eq!(parse_graph(&write_graph(&gf)).unwrap(), gf);
    }

    #[test]
    fn demand_round_trip(
        entries in proptest::collection::vec((0usize..6, 1usize..6, 0i64..20, 1i64..7, any::<bool>()), 0..6),
    ) {
        let pairs: Vec<DemandPair> = entries
            .iter()
            .map(|&(s, off, p, q, inf)| DemandPair {
                source: s,
                sink: (s + off) % 6,
                value: if inf { DemandValue::Infinite } else { DemandValue::Finite(ratio(p, q)) },
            })
            .collect();
        let d = Demand::new(pairs).unwrap();
        prop_assert_eq!(parse_demand(&write_demand(&d), 6).unwrap(), d);
    }

    #[test]
    fn pairs_round_trip(sets in proptest::collection::vec((proptest::collection::btree_set(0usize..4, 1..4), proptest::collection::btree_set(4usize..8, 1..4)), 1..4)) {
        let pairs: Vec<SourceSinkPair> = sets
            .into_iter()
            .map(|(s, t)| SourceSinkPair { sources: s.into_iter().collect(), sinks: t.into_iter().collect() })
            .collect();
        prop_assert_eq!(parse_pairs(&write_pairs(&pairs), 8).unwrap(), pairs);
    }

    #[test]
    fn cut_round_trip(h in 1u64..12, nums in proptest::collection::btree_map(0usize..7, 0u64..30, 0..7)) {
        let list: Vec<(usize, u64)> = nums.into_iter().collect();
        let c = MovingCut::from_numerators(h, &list).unwrap();
        prop_assert_eq!(parse_cut(&write_cut(&c), 7).unwrap(), c);
    }
}

#[test]
fn error_lines_are_reported() {
    let cases = [
        ("p lcf 2 1 vertex\nv 1 1 1\nv 2 1 1\na 1 2 9 9\n", 4, "malformed"),
        ("p lcf 2 1 vertex\nv 1 1 1\nv 2 1 0\na 1 2\n", 3, "positive"),
        ("p lcf 3 2 edge\na 1 2 1 1\na 1 2 2 2\n", 3, "duplicate edge"),
        ("p lcf 3 1 edge\nx 1 2\n", 2, "unknown line type"),
        ("p lcf 3 1 edge\na 1 4 1 1\n", 2, "outside"),
        ("p lcf 3 1 edge\na 2 2 1 1\n", 2, "self-loop"),
        ("p lcf 2 1 edge\np lcf 2 1 edge\n", 2, "second problem line"),
    ];
    for (text, line, needle) in cases {
        let e = parse_graph(text).unwrap_err();
        assert_eq!(e.line, line, "{text:?}: {e}");
        assert!(e.to_string().contains(needle), "{text:?}: {e}");
        assert!(e.to_string().starts_with(&format!("line {line}:")));
    }
    let e = parse_graph("p lcf 2 2 edge\na 1 2 1 1\n").unwrap_err();
    assert!(e.message.contains("declares 2 edges"));
    let e = parse_demand("d 1 1 2 1\nd 2 3 3 1/2\n", 3).unwrap_err();
    assert_eq!((e.line, e.message.contains("D(u,u) > 0")), (2, true));
    let e = parse_demand("d 1 1 2 -1\n", 3).unwrap_err();
    assert!(e.message.contains("nonnegative"));
    let e = parse_demand("d 1 1 2 1\nd 1 2 3 1\n", 3).unwrap_err();
    assert_eq!(e.line, 2);
    let e = parse_cut("c 1 1\n", 3).unwrap_err();
    assert_eq!(e.line, 1);
}

#[test]
fn vertex_costs_default_to_lengths() {
    let gf = parse_graph("p lcf 3 2 vertex\nv 1 2 1\nv 2 3 1\nv 3 1 1\nb 2 7\na 1 2\na 2 3\n").unwrap();
    assert_eq!(gf.costs, vec![2, 7, 1]);
    assert!(parse_graph("p lcf 1 0 vertex\nv 1 1 1\nb 1 2\nb 1 3\n").is_err());
    assert!(parse_graph("p lcf 2 0 edge\nb 1 2\n").is_err());
}
