//! Contract clauses of `dfs1` and `dfs`: pre- and post-conditions, the
//! seven in-body assertions and the white-set form of the `dfs` contract.

use std::cmp::Ordering;

use thiserror::Error;

use crate::algorithm::Branch;
use crate::environment::{fmt_set, subenv, wf_env_with, CheckReport, Env, NumMark};
use crate::graph::{VertexId, VertexSet};
use crate::oracle::Oracle;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PredicateError {
    #[error("the second sequence is not a suffix of the first")]
    NotSuffix,
}

/// Some stack vertex `y` has `num(y) = n` and is reachable from `x`.
pub fn num_of_reachable(oracle: &Oracle<'_>, n: NumMark, x: VertexId, e: &Env) -> bool {
    e.stack
        .iter()
        .any(|y| e.num(y) == n && oracle.reachable(x, y))
}

/// `y` lies in `s3` and some vertex of the prefix `s2` (where
/// `s1 = s2 ++ s3`, both top first) has an edge to it.
pub fn xedge_to(
    oracle: &Oracle<'_>,
    s1: &[VertexId],
    s3: &[VertexId],
    y: VertexId,
) -> Result<bool, PredicateError> {
    let prefix = s1.strip_suffix(s3).ok_or(PredicateError::NotSuffix)?;
    let g = oracle.graph();
    Ok(s3.contains(&y)
        && prefix
            .iter()
            .any(|&p| g.contains(p) && g.edge(p, y).unwrap_or(false)))
}

/// `x` occurs in `s` (top first) and `y` sits at the first occurrence of
/// `x` or below it.
pub fn precedes(x: VertexId, y: VertexId, s: &[VertexId]) -> bool {
    s.iter()
        .position(|&v| v == x)
        .is_some_and(|at| s[at..].contains(&y))
}

pub fn is_last(x: VertexId, s: &[VertexId]) -> bool {
    s.last() == Some(&x)
}

/// Folds a list of clause reports into one.
pub(crate) fn conjunction(name: &str, reports: &[CheckReport]) -> CheckReport {
    let failed: Vec<String> = reports
        .iter()
        .filter(|r| !r.holds)
        .map(|r| format!("{}: {}", r.clause, r.witness.as_deref().unwrap_or("")))
        .collect();
    if failed.is_empty() {
        CheckReport::pass(name)
    } else {
        CheckReport::fail(name, failed.join(", "))
    }
}

pub fn dfs1_preconditions(oracle: &Oracle<'_>, x: VertexId, e: &Env) -> Vec<CheckReport> {
    let wf = wf_env_with(oracle, e);
    dfs1_preconditions_given(oracle, x, e, &wf)
}

pub(crate) fn dfs1_preconditions_given(
    oracle: &Oracle<'_>,
    x: VertexId,
    e: &Env,
    wf: &[CheckReport],
) -> Vec<CheckReport> {
    let g = oracle.graph();
    let in_graph = g.contains(x);
    vec![
        CheckReport::from_witness(
            "dfs1.pre.x_vertex",
            (!in_graph).then(|| format!("{x} is not a vertex")),
        ),
        CheckReport::from_witness(
            "dfs1.pre.gray_reaches_x",
            e.gray
                .iter()
                .find(|&&y| !(in_graph && g.contains(y) && oracle.reachable(y, x)))
                .map(|y| format!("gray {y} does not reach {x}")),
        ),
        CheckReport::from_witness(
            "dfs1.pre.x_white",
            (e.black.contains(&x) || e.gray.contains(&x))
                .then(|| format!("{x} is already colored")),
        ),
        conjunction("dfs1.pre.wf_env", wf),
    ]
}

pub fn dfs_preconditions(oracle: &Oracle<'_>, roots: &VertexSet, e: &Env) -> Vec<CheckReport> {
    let wf = wf_env_with(oracle, e);
    dfs_preconditions_given(oracle, roots, e, &wf)
}

pub(crate) fn dfs_preconditions_given(
    oracle: &Oracle<'_>,
    roots: &VertexSet,
    e: &Env,
    wf: &[CheckReport],
) -> Vec<CheckReport> {
    let g = oracle.graph();
    let access = e.gray.iter().find_map(|&y| {
        roots
            .iter()
            .find(|&&r| !(g.contains(y) && g.contains(r) && oracle.reachable(y, r)))
            .map(|r| format!("gray {y} does not reach root {r}"))
    });
    vec![
        CheckReport::from_witness(
            "dfs.pre.roots_vertices",
            roots
                .iter()
                .find(|r| !g.contains(**r))
                .map(|r| format!("root {r} is not a vertex")),
        ),
        CheckReport::from_witness("dfs.pre.access_to", access),
        conjunction("dfs.pre.wf_env", wf),
    ]
}

/// The return clauses of `dfs1(x, e) = (n, e2)`. The first clause is split
/// into its `wf_env` and `subenv` halves.
pub fn dfs1_postconditions(
    oracle: &Oracle<'_>,
    x: VertexId,
    e: &Env,
    n: NumMark,
    e2: &Env,
) -> Vec<CheckReport> {
    let wf = wf_env_with(oracle, e2);
    dfs1_postconditions_given(oracle, x, e, n, e2, &wf)
}

pub(crate) fn dfs1_postconditions_given(
    oracle: &Oracle<'_>,
    x: VertexId,
    e: &Env,
    n: NumMark,
    e2: &Env,
    wf: &[CheckReport],
) -> Vec<CheckReport> {
    let mut sub = subenv(e, e2);
    sub.clause = "dfs1.post.subenv".into();

    let xedge = {
        let s1 = e2.stack.to_vec();
        let s3 = e.stack.to_vec();
        match s1.strip_suffix(s3.as_slice()) {
            None => Some("old stack is not a suffix of the new one".to_owned()),
            Some(_) => s3.iter().find_map(|&y| {
                let bounded = n <= e2.num(y);
                (xedge_to(oracle, &s1, &s3, y) == Ok(true) && !bounded)
                    .then(|| format!("cross edge into {y} with num {} below {n}", e2.num(y)))
            }),
        }
    };

    vec![
        conjunction("dfs1.post.wf_env", wf),
        sub,
        CheckReport::from_witness(
            "dfs1.post.x_black",
            (!e2.black.contains(&x)).then(|| format!("{x} is not black")),
        ),
        CheckReport::from_witness(
            "dfs1.post.n_le_num_x",
            (!matches!(
                n.partial_cmp(&e2.num(x)),
                Some(Ordering::Less | Ordering::Equal)
            ))
            .then(|| format!("{n} exceeds num({x}) = {}", e2.num(x))),
        ),
        CheckReport::from_witness(
            "dfs1.post.num_of_reachable",
            (n != NumMark::Infinity && !num_of_reachable(oracle, n, x, e2))
                .then(|| format!("no stack vertex numbered {n} is reachable from {x}")),
        ),
        CheckReport::from_witness("dfs1.post.xedge_bound", xedge),
    ]
}

pub fn dfs_postconditions(oracle: &Oracle<'_>, e: &Env, e2: &Env) -> Vec<CheckReport> {
    let wf = wf_env_with(oracle, e2);
    dfs_postconditions_given(e, e2, &wf)
}

pub(crate) fn dfs_postconditions_given(e: &Env, e2: &Env, wf: &[CheckReport]) -> Vec<CheckReport> {
    let mut sub = subenv(e, e2);
    sub.clause = "dfs.post.subenv".into();
    vec![conjunction("dfs.post.wf_env", wf), sub]
}

/// Variables in scope at an assertion point of `dfs1`.
#[derive(Debug)]
pub struct Dfs1Bindings<'a> {
    pub x: VertexId,
    /// Environment at entry to `dfs1`.
    pub e: &'a Env,
    pub n0: usize,
    pub n1: NumMark,
    pub branch: &'a Branch<'a>,
}

/// A1 and A2 on the lowered branch, A3 to A7 on the root branch.
pub fn check_assertions_dfs1(oracle: &Oracle<'_>, b: &Dfs1Bindings<'_>) -> Vec<CheckReport> {
    let x = b.x;
    match *b.branch {
        Branch::Lowered { e1 } => {
            let stack = e1.stack.to_vec();
            let a1 = stack
                .iter()
                .any(|&y| y != x && precedes(x, y, &stack) && oracle.reachable(x, y));
            let a2 = e1.gray.iter().any(|&y| {
                y != x
                    && oracle.graph().contains(y)
                    && e1.num(y) < e1.num(x)
                    && oracle.in_same_scc(x, y)
            });
            vec![
                CheckReport::from_witness(
                    "assert.A1",
                    (!a1).then(|| format!("{x} reaches nothing below it on the stack")),
                ),
                CheckReport::from_witness(
                    "assert.A2",
                    (!a2).then(|| format!("no lower gray vertex shares the scc of {x}")),
                ),
            ]
        }
        Branch::Root { e1_black, s2, s3 } => {
            let elements: VertexSet = s2.iter().copied().collect();
            let a3 = if !is_last(x, s2) {
                Some(format!("{x} is not the last popped vertex"))
            } else if *s3 != b.e.stack {
                Some("remaining stack differs from the entry stack".to_owned())
            } else {
                elements
                    .iter()
                    .find(|&&y| y != x && !e1_black.contains(&y))
                    .map(|y| format!("popped {y} is not black"))
            };
            let a5 = oracle
                .scc_of(x)
                .iter()
                .find(|y| !elements.contains(y))
                .map(|y| format!("{y} shares the scc of {x} but was not popped"));
            vec![
                CheckReport::from_witness("assert.A3", a3),
                CheckReport::from_witness(
                    "assert.A4",
                    (!oracle.is_subscc(&elements))
                        .then(|| format!("{} is not strongly connected", fmt_set(&elements))),
                ),
                CheckReport::from_witness("assert.A5", a5),
                CheckReport::from_witness(
                    "assert.A6",
                    (!oracle.is_scc(&elements))
                        .then(|| format!("{} is not an scc", fmt_set(&elements))),
                ),
                CheckReport::from_witness(
                    "assert.A7",
                    b.e.gray
                        .intersection(&elements)
                        .next()
                        .map(|y| format!("entry gray {y} was popped")),
                ),
            ]
        }
    }
}

/// The `post_dfs` record: invariants, `subenv`, the white-set equation and
/// the returned value as a minimum over the white-reachable cones.
pub fn check_post_dfs(
    oracle: &Oracle<'_>,
    roots: &VertexSet,
    e: &Env,
    e2: &Env,
    m: NumMark,
) -> Vec<CheckReport> {
    let wf = wf_env_with(oracle, e2);
    post_dfs_given(oracle, roots, e, e2, m, &wf)
}

pub(crate) fn post_dfs_given(
    oracle: &Oracle<'_>,
    roots: &VertexSet,
    e: &Env,
    e2: &Env,
    m: NumMark,
    wf: &[CheckReport],
) -> Vec<CheckReport> {
    let g = oracle.graph();
    let white = e.white(g);
    let mut cone = VertexSet::new();
    for &r in roots.iter().filter(|r| g.contains(**r)) {
        cone.extend(g.white_reachable(&white, r).expect("root checked in range"));
    }

    let expected_white: VertexSet = white.difference(&cone).copied().collect();
    let whites = e2.white(g);
    let whites_clause = (whites != expected_white).then(|| {
        format!(
            "white set {} but expected {}",
            fmt_set(&whites),
            fmt_set(&expected_white)
        )
    });

    let num_clause = match cone.iter().find(|&&y| !e2.num(y).is_visited()) {
        Some(y) => Some(format!("{y} in the cone is unvisited")),
        None => {
            let expected = cone
                .iter()
                .fold(NumMark::Infinity, |acc, &y| acc.min(e2.num(y)));
            (expected != m).then(|| format!("returned {m} but the cone minimum is {expected}"))
        }
    };

    let mut sub = subenv(e, e2);
    sub.clause = "post_dfs.subenv".into();
    vec![
        conjunction("post_dfs.invariants", wf),
        sub,
        CheckReport::from_witness("post_dfs.whites", whites_clause),
        CheckReport::from_witness("post_dfs.num", num_clause),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::environment::{add_stack_incr, init_env, Stack};
    use crate::graph::Graph;

    fn v(i: u32) -> VertexId {
        VertexId(i)
    }

    fn vs(ids: &[u32]) -> Vec<VertexId> {
        ids.iter().copied().map(VertexId).collect()
    }

    #[test]
    fn num_of_reachable_cases() {
        let g = Graph::empty(1).unwrap();
        let o = Oracle::new(&g);
        let e = add_stack_incr(v(0), init_env(&g));
        assert!(num_of_reachable(&o, NumMark::Serial(0), v(0), &e));
        assert!(!num_of_reachable(
            &o,
            NumMark::Serial(0),
            v(0),
            &init_env(&g)
        ));
    }

    #[test]
    fn xedge_to_cases() {
        let g = Graph::from_edges(2, [(0, 1)]).unwrap();
        let o = Oracle::new(&g);
        let (a, b) = (v(0), v(1));
        assert_eq!(xedge_to(&o, &[a, b], &[b], b), Ok(true));
        assert_eq!(xedge_to(&o, &[a, b], &[a, b], b), Ok(false));
        assert_eq!(xedge_to(&o, &[a, b], &[b], a), Ok(false));
        assert_eq!(
            xedge_to(&o, &[a, b], &[a], a),
            Err(PredicateError::NotSuffix)
        );
    }

    #[test]
    fn precedes_cases() {
        let (a, b, x) = (v(0), v(1), v(2));
        assert!(precedes(x, x, &[x]));
        assert!(precedes(a, b, &[a, b]));
        assert!(!precedes(b, a, &[a, b]));
        assert!(!precedes(x, a, &[a, b]));
        assert!(is_last(b, &[a, b]) && !is_last(a, &[a, b]) && !is_last(a, &[]));
    }

    #[test]
    fn post_dfs_on_empty_roots() {
        let g = Graph::from_edges(2, [(0, 1)]).unwrap();
        let o = Oracle::new(&g);
        let e = init_env(&g);
        let reports = check_post_dfs(&o, &VertexSet::new(), &e, &e, NumMark::Infinity);
        assert!(reports.iter().all(|r| r.holds), "{reports:?}");
        let bad = check_post_dfs(&o, &VertexSet::new(), &e, &e, NumMark::Serial(0));
        assert!(!bad[3].holds);
    }

    #[test]
    fn assertion_a3_compares_with_entry_stack() {
        let g = Graph::empty(2).unwrap();
        let o = Oracle::new(&g);
        let e = add_stack_incr(v(0), init_env(&g));
        let black = VertexSet::new();
        let s2 = vs(&[1]);
        let wrong = Stack::new();
        let branch = Branch::Root {
            e1_black: &black,
            s2: &s2,
            s3: &wrong,
        };
        let b = Dfs1Bindings {
            x: v(1),
            e: &e,
            n0: 1,
            n1: NumMark::Infinity,
            branch: &branch,
        };
        let reports = check_assertions_dfs1(&o, &b);
        assert_eq!(reports[0].clause, "assert.A3");
        assert!(!reports[0].holds);
        assert!(reports[1..].iter().all(|r| r.holds));
    }
}
