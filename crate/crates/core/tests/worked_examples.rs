use tarjan_core::algorithm::dfs;
use tarjan_core::environment::{add_black, add_stack_incr, init_env, wf_env};
use tarjan_core::oracle::is_scc;
use tarjan_core::{scc_oracle, sufficient_fuel, ChoiceOrder, Graph, NumMark, VertexId, VertexSet};

#[test]
fn initial_environment() {
    let g = Graph::empty(3).unwrap();
    let e = init_env(&g);
    assert!(e.black.is_empty() && e.gray.is_empty() && e.stack.is_empty() && e.sccs.is_empty());
    assert_eq!(e.sn, 0);
    assert_eq!(e.num, vec![NumMark::Unvisited; 3]);
}

#[test]
fn push_then_blacken() {
    let g = Graph::empty(3).unwrap();
    let e = add_stack_incr(VertexId(1), init_env(&g));
    assert_eq!(e.stack.to_vec(), vec![VertexId(1)]);
    assert_eq!(e.gray, VertexSet::from([VertexId(1)]));
    assert_eq!(e.num(VertexId(1)), NumMark::Serial(0));
    assert_eq!(e.sn, 1);
    assert!(wf_env(&g, &e).iter().all(|r| r.holds));

    let e = add_black(VertexId(1), e);
    assert!(e.gray.is_empty());
    assert!(e.black.contains(&VertexId(1)));
}

#[test]
fn dfs_on_no_roots_is_identity() {
    let g = Graph::from_edges(2, [(0, 1)]).unwrap();
    let e = init_env(&g);
    let r = dfs(&g, VertexSet::new(), e.clone(), ChoiceOrder::Smallest);
    assert_eq!(r.value, NumMark::Infinity);
    assert_eq!(r.env, e);
}

#[test]
fn fuel_for_ten_vertices() {
    assert_eq!(sufficient_fuel(10), 120);
    assert_eq!(sufficient_fuel(0), 0);
}

#[test]
fn empty_set_is_not_an_scc() {
    let g = Graph::from_edges(2, [(0, 1), (1, 0)]).unwrap();
    assert!(!is_scc(&g, &VertexSet::new()));
    assert!(!is_scc(&g, &VertexSet::from([VertexId(0)])));
    assert!(is_scc(&g, &VertexSet::from([VertexId(0), VertexId(1)])));
}

#[test]
fn two_cycle_with_tail() {
    let g = Graph::from_edges(3, [(0, 1), (1, 0), (1, 2)]).unwrap();
    assert_eq!(scc_oracle(&g).to_string(), "0 1\n2\n");
}
