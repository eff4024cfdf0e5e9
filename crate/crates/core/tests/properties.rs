use proptest::prelude::*;

use tarjan_core::checker::{replay, write_trace};
use tarjan_core::io::{emit_condensation, parse_edge_list, write_edge_list};
use tarjan_core::{
    generate, run_checked, scc_oracle, sufficient_fuel, tarjan, tarjan_fast, tarjan_fueled,
    CheckConfig, ChoiceOrder, Graph, GraphSpec, Model, SccPartition, VertexId,
};

fn arb_graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (0..=max_n).prop_flat_map(|n| {
        let edge = (0..n.max(1) as u32, 0..n.max(1) as u32);
        proptest::collection::vec(edge, 0..=(n * n).min(64)).prop_map(move |edges| {
            Graph::from_edges(n, if n == 0 { Vec::new() } else { edges }).unwrap()
        })
    })
}

/// Transitive closure by repeated boolean matrix squaring, independent of
/// the BFS used by the oracle.
fn closure(g: &Graph) -> Vec<Vec<bool>> {
    let n = g.vertex_count();
    let mut m = vec![vec![false; n]; n];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = true;
    }
    for (u, v) in g.edges() {
        m[u.index()][v.index()] = true;
    }
    let mut span = 1;
    while span < n {
        let mut next = m.clone();
        for i in 0..n {
            for (k, &hop) in m[i].iter().enumerate() {
                if hop {
                    for j in 0..n {
                        next[i][j] |= m[k][j];
                    }
                }
            }
        }
        m = next;
        span *= 2;
    }
    m
}

fn partition_from_closure(g: &Graph) -> SccPartition {
    let m = closure(g);
    let n = g.vertex_count();
    let mut seen = vec![false; n];
    let mut comps = Vec::new();
    for i in 0..n {
        if seen[i] {
            continue;
        }
        let comp: Vec<VertexId> = (0..n)
            .filter(|&j| m[i][j] && m[j][i])
            .map(|j| VertexId(j as u32))
            .collect();
        for v in &comp {
            seen[v.index()] = true;
        }
        comps.push(comp);
    }
    SccPartition::from_components(comps)
}

/// Topological order of the condensation text exists.
fn condensation_is_acyclic(text: &str) -> bool {
    let nodes: Vec<&str> = text
        .lines()
        .filter_map(|l| l.split_once(':').map(|(c, _)| c))
        .collect();
    let arcs: Vec<(usize, usize)> = text
        .lines()
        .filter_map(|l| l.split_once(" -> "))
        .map(|(a, b)| {
            (
                nodes.iter().position(|&c| c == a).unwrap(),
                nodes.iter().position(|&c| c == b).unwrap(),
            )
        })
        .collect();
    let mut indeg = vec![0; nodes.len()];
    for &(_, b) in &arcs {
        indeg[b] += 1;
    }
    let mut ready: Vec<usize> = (0..nodes.len()).filter(|&c| indeg[c] == 0).collect();
    let mut seen = 0;
    while let Some(c) = ready.pop() {
        seen += 1;
        for &(a, b) in &arcs {
            if a == c {
                indeg[b] -= 1;
                if indeg[b] == 0 {
                    ready.push(b);
                }
            }
        }
    }
    seen == nodes.len()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn implementations_agree(g in arb_graph(12)) {
        let expected = partition_from_closure(&g);
        prop_assert_eq!(&scc_oracle(&g), &expected);
        prop_assert_eq!(&tarjan(&g, ChoiceOrder::Smallest), &expected);
        prop_assert_eq!(&tarjan_fast(&g), &expected);
        prop_assert_eq!(tarjan_fueled(&g, sufficient_fuel(g.vertex_count()), ChoiceOrder::Smallest), Some(expected));
    }

    #[test]
    fn choice_order_is_irrelevant(g in arb_graph(10), seed in any::<u64>()) {
        prop_assert_eq!(tarjan(&g, ChoiceOrder::Seeded(seed)), tarjan(&g, ChoiceOrder::Smallest));
    }

    #[test]
    fn partition_is_valid(g in arb_graph(12)) {
        let p = tarjan_fast(&g);
        prop_assert!(p.validate(&g).is_ok());
        let firsts: Vec<VertexId> = p.components().iter().map(|c| c[0]).collect();
        prop_assert!(firsts.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(p.components().iter().all(|c| c.windows(2).all(|w| w[0] < w[1])));
    }

    #[test]
    fn condensation_is_a_dag(g in arb_graph(12)) {
        let text = emit_condensation(&g, &scc_oracle(&g)).unwrap();
        prop_assert!(condensation_is_acyclic(&text));
        let nodes = text.lines().filter(|l| !l.contains("->")).count();
        prop_assert_eq!(nodes, scc_oracle(&g).len());
    }

    #[test]
    fn edge_list_round_trip(g in arb_graph(12)) {
        prop_assert_eq!(parse_edge_list(&write_edge_list(&g)).unwrap(), g);
    }

    #[test]
    fn generation_is_deterministic(n in 0usize..60, p in 0.0f64..=1.0, seed in any::<u64>()) {
        let spec = GraphSpec::gnp(n, p, seed);
        prop_assert_eq!(generate(&spec).unwrap(), generate(&spec).unwrap());
        let reparsed: GraphSpec = spec.to_string().parse().unwrap();
        prop_assert_eq!(generate(&reparsed).unwrap(), generate(&spec).unwrap());
    }

    #[test]
    fn dag_sccs_are_singletons(n in 0usize..40, p in 0.0f64..=1.0, seed in any::<u64>()) {
        let g = generate(&GraphSpec::dag(n, p, seed)).unwrap();
        prop_assert!(g.edges().all(|(u, v)| u < v));
        prop_assert_eq!(tarjan(&g, ChoiceOrder::Smallest).len(), n);
        prop_assert_eq!(tarjan_fast(&g).len(), n);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn checked_runs_pass_and_replay(g in arb_graph(9), seed in any::<u64>()) {
        let run = run_checked(&g, &CheckConfig::all(), ChoiceOrder::Seeded(seed)).unwrap();
        prop_assert!(run.passed(), "{:?}", run.summary.first_failure);
        let summary = replay(&g, &write_trace(&run.events)).unwrap();
        prop_assert!(summary.passed(), "{:?}", summary.failures);
    }
}

#[test]
fn cycle_chain_components() {
    for (n, k) in [(6, 3), (10, 4), (7, 7), (100, 1)] {
        let g = generate(&GraphSpec::new(n, Model::CycleChain { k }, 0)).unwrap();
        let p = tarjan_fast(&g);
        assert_eq!(p.len(), k);
        assert_eq!(p, tarjan(&g, ChoiceOrder::Smallest));
    }
}

#[test]
fn complete_graph_is_one_component() {
    let g = generate(&GraphSpec::new(12, Model::Complete, 0)).unwrap();
    assert_eq!(tarjan(&g, ChoiceOrder::Smallest).len(), 1);
}

#[test]
fn functional_tarjan_handles_deep_paths() {
    let n = 20_000u32;
    let g = Graph::from_edges(n as usize, (0..n - 1).map(|i| (i, i + 1))).unwrap();
    assert_eq!(tarjan(&g, ChoiceOrder::Smallest).len(), n as usize);
    let ring = Graph::from_edges(n as usize, (0..n).map(|i| (i, (i + 1) % n))).unwrap();
    assert_eq!(tarjan(&ring, ChoiceOrder::Smallest).len(), 1);
}
