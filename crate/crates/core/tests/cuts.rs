use lcflow_core::cuts::*;
use lcflow_core::demand::{pair_demand_size, NodeWeighting, PairDemand};
use lcflow_core::graph::Graph;
use lcflow_core::num::{int, ratio, uint};
use lcflow_core::Error;
use proptest::prelude::*;

const PAIRS6: [(usize, usize); 15] = [
    (0, 1), (0, 2), (0, 3), (0, 4), (0, 5), (1, 2), (1, 3), (1, 4), (1, 5), (2, 3), (2, 4), (2, 5), (3, 4), (3, 5), (4, 5),
];

fn graph_from(n: usize, mask: &[bool], lens: &[u64], caps: &[u64]) -> Graph {
    let edges: Vec<(usize, usize)> = PAIRS6
        .iter()
        .zip(mask)
        .filter(|&(&(u, v), &on)| on && u < n && v < n)
        .map(|(&e, _)| e)
        .collect();
    Graph::vertex_weighted(lens[..n].to_vec(), caps[..n].to_vec(), &edges).unwrap()
}

/// Floyd-Warshall with vertex lengths; `dist(u, u) = len(u)`.
fn floyd(n: usize, edges: &[(usize, usize)], lens: &[u64]) -> Vec<Vec<Option<u64>>> {
    // Work with "path weight excluding the start vertex".
    let mut d = vec![vec![None; n]; n];
    for v in 0..n {
        d[v][v] = Some(0u64);
    }
    for &(u, v) in edges {
        d[u][v] = Some(d[u][v].map_or(lens[v], |x: u64| x.min(lens[v])));
        d[v][u] = Some(d[v][u].map_or(lens[u], |x: u64| x.min(lens[u])));
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if let (Some(a), Some(b)) = (d[i][k], d[k][j]) {
                    if d[i][j].map_or(true, |x| a + b < x) {
                        d[i][j] = Some(a + b);
                    }
                }
            }
        }
    }
    (0..n).map(|i| (0..n).map(|j| d[i][j].map(|x| x + lens[i])).collect()).collect()
}

fn graph_strategy(n: usize) -> impl Strategy<Value = (Vec<bool>, Vec<u64>, Vec<u64>)> {
    (
        proptest::collection::vec(any::<bool>(), 15),
        proptest::collection::vec(1u64..4, 6),
        proptest::collection::vec(1u64..4, 6),
    )
        .prop_map(move |(m, l, c)| (m, l[..n].to_vec(), c[..n].to_vec()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn separation_matches_floyd_warshall(
        (mask, lens, caps) in graph_strategy(6),
        hc in 1u64..6,
        nums in proptest::collection::vec(0u64..7, 6),
        dvals in proptest::collection::vec((0usize..6, 0usize..6, 1i64..4), 0..8),
        h in 1u64..12,
    ) {
        let g = graph_from(6, &mask, &lens, &caps);
        let cut_nums: Vec<(usize, u64)> = nums.iter().enumerate().map(|(v, &k)| (v, k % (hc + 1))).collect();
        let c = MovingCut::from_numerators(hc, &cut_nums).unwrap();
        let mut d = PairDemand::new();
        for &(u, v, x) in &dvals {
            if u != v {
                *d.entry((u, v)).or_insert_with(|| int(0)) += int(x);
            }
        }
        let new_lens: Vec<u64> = (0..6).map(|v| lens[v] + c.increase(v)).collect();
        let edges: Vec<(usize, usize)> = g.edges().iter().map(|e| (e.tail, e.head)).collect();
        let dist = floyd(6, &edges, &new_lens);
        let expect = d.iter().filter(|(&(u, v), _)| dist[u][v].map_or(true, |l| l > h)).fold(int(0), |a, (_, x)| a + x);
        prop_assert_eq!(separated_demand(&g, &c, &d, h).unwrap(), expect);
    }

    #[test]
    fn scaling_lengths_and_thresholds_preserves_sep_and_sparsity(
        (mask, lens, caps) in graph_strategy(5),
        nums in proptest::collection::vec(0u64..5, 5),
        weights in proptest::collection::vec(0i64..3, 5),
        k in 2u64..4,
        h in 1u64..5,
        s in 2u64..4,
    ) {
        let g = graph_from(5, &mask, &lens, &caps);
        let hs = h * s;
        let cut_nums: Vec<(usize, u64)> = nums.iter().enumerate().map(|(v, &x)| (v, x % (hs + 1))).collect();
        let c = MovingCut::from_numerators(hs, &cut_nums).unwrap();
        let a = NodeWeighting(weights.iter().map(|&x| int(x)).collect());
        let scaled_lens: Vec<u64> = lens.iter().map(|&l| l * k).collect();
        let gk = g.with_vertex_lengths(scaled_lens).unwrap();
        let ck = c.with_h(hs * k).unwrap();
        let d: PairDemand = (0..5).flat_map(|u| (0..5).filter(move |&v| v != u).map(move |v| ((u, v), int(1)))).collect();
        prop_assert_eq!(separated_demand(&g, &c, &d, hs).unwrap(), separated_demand(&gk, &ck, &d, hs * k).unwrap());
        prop_assert_eq!(cut_sparsity(&g, &c, &a, h, s).map(|x| x.value), cut_sparsity(&gk, &ck, &a, h * k, s).map(|x| x.value));
    }

    #[test]
    fn sparsity_matches_brute_force_b_matching(
        (mask, lens, caps) in graph_strategy(5),
        nums in proptest::collection::vec(0u64..7, 5),
        weights in proptest::collection::vec(0i64..3, 5),
        h in 2u64..5,
    ) {
        let g = graph_from(5, &mask, &lens, &caps);
        let s = 2;
        let c = MovingCut::from_numerators(h * s, &nums.iter().enumerate().map(|(v, &x)| (v, x % (h * s + 1))).collect::<Vec<_>>()).unwrap();
        let a: Vec<i64> = weights.clone();
        let pairs = eligible_pairs(&g, &c, h, h * s).unwrap();
        let best = brute_force(&pairs, &mut a.clone(), &mut a.clone(), 0);
        let got = cut_sparsity(&g, &c, &NodeWeighting(a.iter().map(|&x| int(x)).collect()), h, s);
        if best == 0 {
            prop_assert_eq!(got, Err(Error::NoSeparatedDemand));
        } else {
            let sp = got.unwrap();
            prop_assert_eq!(sp.separated.clone(), int(best));
            prop_assert_eq!(sp.value, c.size(&g) / int(best));
        }
    }

    #[test]
    fn matching_graph_counts_and_degrees(
        weights in proptest::collection::vec(0i64..3, 5),
        raw in proptest::collection::vec(proptest::collection::vec((0usize..5, 0usize..5), 0..6), 1..4),
    ) {
        let a = NodeWeighting(weights.iter().map(|&x| int(x)).collect());
        let ds: Vec<PairDemand> = raw.iter().map(|pairs| respecting_demand(&weights, pairs)).collect();
        let g = build_demand_matching_graph(&a, &ds).unwrap();
        for (i, d) in ds.iter().enumerate() {
            let mut count = std::collections::BTreeMap::new();
            for &(x, y) in &g.matchings[i] {
                *count.entry((g.owner[x], g.owner[y])).or_insert(0i64) += 1;
            }
            let expect: std::collections::BTreeMap<(usize, usize), i64> =
                d.iter().map(|(&k, v)| (k, v.to_integer().try_into().unwrap())).collect();
            prop_assert_eq!(count, expect);
            let mut seen = std::collections::BTreeSet::new();
            for &(x, y) in &g.matchings[i] {
                prop_assert!(seen.insert(x) && seen.insert(y));
            }
        }
        for copy in 0..g.copy_count() {
            prop_assert!(g.degree(copy) <= ds.len());
        }
    }

    #[test]
    fn dispersed_demand_is_respecting_and_large(
        weights in proptest::collection::vec(0i64..3, 5),
        raw in proptest::collection::vec(proptest::collection::vec((0usize..5, 0usize..5), 0..6), 1..5),
    ) {
        let a = NodeWeighting(weights.iter().map(|&x| int(x)).collect());
        let ds: Vec<PairDemand> = raw.iter().map(|pairs| respecting_demand(&weights, pairs)).collect();
        let g = Graph::vertex_weighted(vec![1; 5], vec![1; 5], &[]).unwrap();
        let cover = greedy_forest_cover(&build_demand_matching_graph(&a, &ds).unwrap());
        let md = matching_dispersed_demand(&g, &a, &ds, &cover).unwrap();
        prop_assert!(a.respects(&md));
        let total = ds.iter().fold(int(0), |acc, d| acc + pair_demand_size(d));
        // Diagonal copy pairs are dropped, so the size lemma can only be
        // checked on the copy level.
        let dmg = build_demand_matching_graph(&a, &ds).unwrap();
        let mut tree_total = int(0);
        for forest in &cover.forests {
            for comp in split_components(forest) {
                tree_total += pair_demand_size(&tree_matching_demand(&comp).unwrap());
            }
        }
        prop_assert!(tree_total >= total);
        prop_assert_eq!(dmg.matchings.iter().map(|m| m.len()).sum::<usize>() as i64, total.to_integer().try_into().unwrap());
    }

    #[test]
    fn tree_matching_covers_edge_count(parents in proptest::collection::vec(0usize..100, 1..12)) {
        let edges: Vec<(usize, usize)> = parents.iter().enumerate().map(|(i, &p)| (p % (i + 1), i + 1)).collect();
        let d = tree_matching_demand(&edges).unwrap();
        prop_assert!(pair_demand_size(&d) >= int(edges.len() as i64));
    }

    #[test]
    fn monotonicity_holds_for_unit_length_factor(
        (mask, lens, caps) in graph_strategy(5),
        nums in proptest::collection::vec(0u64..13, 5),
        weights in proptest::collection::vec(0i64..2, 5),
        h in 1u64..4,
        s in 2u64..5,
    ) {
        let g = graph_from(5, &mask, &lens, &caps);
        let hs = h * s;
        let c = MovingCut::from_numerators(hs, &nums.iter().enumerate().map(|(v, &x)| (v, x % (hs + 1))).collect::<Vec<_>>()).unwrap();
        let a = NodeWeighting(weights.iter().map(|&x| int(x)).collect());
        if let Ok(sp) = cut_sparsity(&g, &c, &a, h, s) {
            for s2 in 2..=s {
                // 2C as an (h, s2)-length cut needs values on the 1/(h s2) grid.
                if (2 * s2) % s != 0 {
                    continue;
                }
                let c2 = c.scaled(2).with_h(h * s2).unwrap();
                let sp2 = cut_sparsity(&g, &c2, &a, h, s2).unwrap();
                prop_assert!(sp2.value <= &sp.value * int(2));
            }
        }
    }

    #[test]
    fn generated_witnesses_pass_verifier(
        (mask, lens, caps) in graph_strategy(6),
        weights in proptest::collection::vec(0i64..3, 6),
        picks in proptest::collection::vec(proptest::collection::vec((0usize..6, 2u64..9), 1..4), 2..6),
        h in 2u64..5,
    ) {
        let g = graph_from(6, &mask, &lens, &caps);
        let s = 4;
        let a = NodeWeighting(weights.iter().map(|&x| int(x)).collect());
        let mut cuts = Vec::new();
        let mut current = g.clone();
        for pick in &picks {
            // Value q/4 on each picked vertex, h_C = hs.
            let c = MovingCut::new(h * s, pick.iter().map(|&(v, q)| (v, ratio(q as i64, 4)))).unwrap();
            if cut_sparsity_with_limit(&current, &c, &a, h, h * s, 16).is_ok() {
                current = apply_cut(&current, &c).unwrap();
                cuts.push(c);
            }
        }
        prop_assume!(!cuts.is_empty());
        let w = CutSequenceWitness::from_cuts(&g, &a, cuts, h, s).unwrap();
        let r = verify_union_witness(&g, &a, &w, h, s, UnionConfig::default()).unwrap();
        prop_assert!(r.preconditions.iter().all(|p| p.ok()));
        prop_assert!(r.spg.ok, "{:?}", r.spg);
        prop_assert!(r.md_size_lemma);
        prop_assert!(r.all_passed(), "{:?}", r);
    }
}

fn split_components(edges: &[(usize, usize)]) -> Vec<Vec<(usize, usize)>> {
    let mut comps: Vec<Vec<(usize, usize)>> = Vec::new();
    let mut verts: Vec<std::collections::BTreeSet<usize>> = Vec::new();
    for &(u, v) in edges {
        let hits: Vec<usize> = (0..verts.len()).filter(|&i| verts[i].contains(&u) || verts[i].contains(&v)).collect();
        let mut es = vec![(u, v)];
        let mut vs: std::collections::BTreeSet<usize> = [u, v].into_iter().collect();
        for &i in hits.iter().rev() {
            es.extend(comps.remove(i));
            vs.extend(verts.remove(i));
        }
        comps.push(es);
        verts.push(vs);
    }
    comps
}

/// Greedy integral demand over the listed pairs that respects `weights`
/// in both directions.
fn respecting_demand(weights: &[i64], pairs: &[(usize, usize)]) -> PairDemand {
    let mut out = weights.to_vec();
    let mut inn = weights.to_vec();
    let mut d = PairDemand::new();
    for &(u, v) in pairs {
        if u != v && out[u] > 0 && inn[v] > 0 {
            out[u] -= 1;
            inn[v] -= 1;
            *d.entry((u, v)).or_insert_with(|| int(0)) += int(1);
        }
    }
    d
}

/// Exhaustive integral b-matching over ordered pairs.
fn brute_force(pairs: &[(usize, usize)], out: &mut [i64], inn: &mut [i64], i: usize) -> i64 {
    if i == pairs.len() {
        return 0;
    }
    let (u, v) = pairs[i];
    let mut best = 0;
    for x in 0..=out[u].min(inn[v]) {
        out[u] -= x;
        inn[v] -= x;
        best = best.max(x + brute_force(pairs, out, inn, i + 1));
        out[u] += x;
        inn[v] += x;
    }
    best
}

#[test]
fn monotonicity_fails_for_larger_length_factor() {
    // u=0, x=1, v=2, y=3: short route through x, long detour through y.
    let g = Graph::vertex_weighted(vec![1, 1, 1, 8], vec![1; 4], &[(0, 1), (1, 2), (0, 3), (3, 2)]).unwrap();
    let a = NodeWeighting(vec![int(1), int(0), int(1), int(0)]);
    let (h, s) = (3, 3);
    let c = MovingCut::new(h * s, [(1, ratio(7, 9))]).unwrap();
    let sp = cut_sparsity(&g, &c, &a, h, s).unwrap();
    assert_eq!(sp.value, ratio(7, 18));
    // c = 2, s' = s: the detour of length 10 is not beyond 2h * s = 18.
    let c2 = c.scaled(2).with_h(2 * h * s).unwrap();
    assert_eq!(cut_sparsity(&g, &c2, &a, 2 * h, s), Err(Error::NoSeparatedDemand));
}

/// Two K4 blocks joined by the edge 3-4.
fn path_of_cliques() -> Graph {
    let mut edges = Vec::new();
    for base in [0, 4] {
        for i in 0..4 {
            for j in i + 1..4 {
                edges.push((base + i, base + j));
            }
        }
    }
    edges.push((3, 4));
    Graph::vertex_weighted(vec![1; 8], vec![1; 8], &edges).unwrap()
}

#[test]
fn two_sequential_cuts_on_path_of_cliques() {
    let g = path_of_cliques();
    let a = NodeWeighting::uniform(8, int(1));
    let (h, s) = (4, 3);
    let cuts = vec![
        MovingCut::from_numerators(h * s, &[(3, h * s)]).unwrap(),
        MovingCut::from_numerators(h * s, &[(4, h * s)]).unwrap(),
    ];
    let w = CutSequenceWitness::from_cuts(&g, &a, cuts, h, s).unwrap();
    // The first cut separates every pair that routes through vertex 3.
    assert!(w.demands[0].keys().all(|&(u, v)| u == 3 || v == 3 || (u < 4) != (v < 4)));
    // After it, the second cut only sees pairs inside the right block.
    assert!(w.demands[1].keys().all(|&(u, v)| u >= 4 && v >= 4 && (u == 4 || v == 4)));
    let r = verify_union_witness(&g, &a, &w, h, s, UnionConfig::default()).unwrap();
    assert!(r.all_passed(), "{r:?}");
    assert!(r.spg.ok);
    let total = pair_demand_size(&w.demands[0]) + pair_demand_size(&w.demands[1]);
    assert!(&r.md_size * uint(4 * r.alpha as u64) >= total);
}

#[test]
fn single_cut_witness_is_its_own_union() {
    let g = path_of_cliques();
    let a = NodeWeighting::uniform(8, int(1));
    let c = MovingCut::from_numerators(12, &[(3, 12)]).unwrap();
    let w = CutSequenceWitness::from_cuts(&g, &a, vec![c.clone()], 4, 3).unwrap();
    let r = verify_union_witness(&g, &a, &w, 4, 3, UnionConfig::default()).unwrap();
    assert!(r.all_passed());
    assert_eq!(r.union_cut, c);
}

#[test]
fn corrupted_second_demand_fails_separation() {
    let g = path_of_cliques();
    let a = NodeWeighting::uniform(8, int(1));
    let (h, s) = (4, 3);
    let cuts = vec![
        MovingCut::from_numerators(h * s, &[(3, h * s)]).unwrap(),
        MovingCut::from_numerators(h * s, &[(4, h * s)]).unwrap(),
    ];
    let mut w = CutSequenceWitness::from_cuts(&g, &a, cuts, h, s).unwrap();
    // (5, 6) is never separated: both cuts avoid the right block's interior.
    w.demands[1] = [((5, 6), int(1))].into_iter().collect();
    let r = verify_union_witness(&g, &a, &w, h, s, UnionConfig::default()).unwrap();
    assert!(r.preconditions[1].not_separated.is_some());
    assert!(!r.separated.passed);
    match r.separated.witness {
        Some(Witness::Pair { u, v, .. }) => assert!([5, 6, 7].contains(&u) && [5, 6, 7].contains(&v)),
        other => panic!("unexpected witness {other:?}"),
    }
}

#[test]
fn far_pair_fails_two_h_length() {
    let g = Graph::vertex_weighted(vec![1; 6], vec![1; 6], &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5)]).unwrap();
    let a = NodeWeighting::uniform(6, int(1));
    let w = CutSequenceWitness {
        cuts: vec![MovingCut::from_numerators(8, &[(0, 8)]).unwrap()],
        demands: vec![[((0, 5), int(1))].into_iter().collect()],
        sparsities: vec![int(1)],
    };
    let r = verify_union_witness(&g, &a, &w, 2, 4, UnionConfig::default()).unwrap();
    assert!(r.preconditions[0].too_long.is_some());
    assert!(!r.two_h_length.passed);
    assert_eq!(r.two_h_length.witness, Some(Witness::Pair { u: 0, v: 5, distance: Some(6) }));
    assert!(r.a_respecting.passed && r.separated.passed);
}

#[test]
fn overloaded_demand_fails_respecting() {
    let g = Graph::vertex_weighted(vec![1, 1], vec![1, 1], &[(0, 1)]).unwrap();
    let a = NodeWeighting::uniform(2, int(1));
    let w = CutSequenceWitness {
        cuts: vec![MovingCut::from_numerators(8, &[(0, 8)]).unwrap()],
        demands: vec![[((0, 1), int(5))].into_iter().collect()],
        sparsities: vec![ratio(1, 5)],
    };
    let r = verify_union_witness(&g, &a, &w, 2, 4, UnionConfig::default()).unwrap();
    assert!(!r.preconditions[0].a_respecting);
    assert!(!r.a_respecting.passed);
    assert!(matches!(r.a_respecting.witness, Some(Witness::Vertex { v: 0, .. })));
    assert!(r.two_h_length.passed && r.separated.passed);
}

#[test]
fn repeated_pair_inflates_arboricity_past_bound() {
    // Re-using one pair 65 times breaks the sequential length premise; the
    // 65 parallel copy edges force 65 forests and the bound trips.
    let g = Graph::vertex_weighted(vec![1, 1], vec![1, 1], &[(0, 1)]).unwrap();
    let a = NodeWeighting::uniform(2, int(1));
    let k = 65;
    let w = CutSequenceWitness {
        cuts: vec![MovingCut::from_numerators(8, &[(0, 1)]).unwrap(); k],
        demands: vec![[((0, 1), int(1))].into_iter().collect(); k],
        sparsities: vec![ratio(1, 8); k],
    };
    let r = verify_union_witness(&g, &a, &w, 2, 4, UnionConfig::default()).unwrap();
    assert_eq!(r.alpha, k);
    assert!(r.two_h_length.passed && r.a_respecting.passed && r.separated.passed);
    assert!(!r.size_bound.passed);
    assert_eq!(r.size_bound.measured, Some(ratio(65, 4)));
    assert_eq!(r.size_bound.bound, 16.0);
}
