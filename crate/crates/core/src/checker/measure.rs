//! Termination measures: the Why3 lexicographic variants and the Isabelle
//! triple, plus the `colored_num` side condition.

use crate::environment::{CheckReport, Env};
use crate::graph::{Graph, VertexId, VertexSet};

/// Measure of one call, in both encodings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Measure {
    pub white: VertexSet,
    /// `(|white|, 0)` for `dfs1`, `(|white|, 1, |roots|)` for `dfs`.
    pub why3: Vec<usize>,
    /// `{x}` for `dfs1`, the root set for `dfs`.
    pub roots: VertexSet,
    /// 1 for `dfs1`, 2 for `dfs`.
    pub tag: u8,
}

impl Measure {
    pub fn dfs1(g: &Graph, x: VertexId, e: &Env) -> Self {
        let white = e.white(g);
        Measure {
            why3: vec![white.len(), 0],
            white,
            roots: VertexSet::from([x]),
            tag: 1,
        }
    }

    pub fn dfs(g: &Graph, roots: &VertexSet, e: &Env) -> Self {
        let white = e.white(g);
        Measure {
            why3: vec![white.len(), 1, roots.len()],
            white,
            roots: roots.clone(),
            tag: 2,
        }
    }

    /// Lexicographic on naturals.
    pub fn why3_below(&self, caller: &Measure) -> bool {
        self.why3 < caller.why3
    }

    /// Lexicographic on (strict subset, strict subset, `<`).
    pub fn isabelle_below(&self, caller: &Measure) -> bool {
        let strict = |a: &VertexSet, b: &VertexSet| a.len() < b.len() && a.is_subset(b);
        strict(&self.white, &caller.white)
            || (self.white == caller.white
                && (strict(&self.roots, &caller.roots)
                    || (self.roots == caller.roots && self.tag < caller.tag)))
    }
}

/// Reports that the callee measure is strictly below the caller measure.
pub fn check_measures(caller: &Measure, callee: &Measure) -> Vec<CheckReport> {
    vec![
        CheckReport::from_witness(
            "measure.why3",
            (!callee.why3_below(caller))
                .then(|| format!("{:?} is not below {:?}", callee.why3, caller.why3)),
        ),
        CheckReport::from_witness(
            "measure.isabelle",
            (!callee.isabelle_below(caller)).then(|| {
                format!(
                    "(|white|={}, |roots|={}, {}) is not below (|white|={}, |roots|={}, {})",
                    callee.white.len(),
                    callee.roots.len(),
                    callee.tag,
                    caller.white.len(),
                    caller.roots.len(),
                    caller.tag
                )
            }),
        ),
    ]
}

/// Every colored vertex is a vertex with a visited num.
pub fn colored_num(g: &Graph, e: &Env) -> CheckReport {
    let bad = e
        .black
        .iter()
        .chain(&e.gray)
        .find(|&&v| !g.contains(v) || !e.num(v).is_visited());
    CheckReport::from_witness(
        "colored_num",
        bad.map(|v| format!("colored {v} is unnumbered")),
    )
}

/// `fuel >= |white| * (|V| + 1) + |roots|`.
pub fn fuel_bound(g: &Graph, e: &Env, roots: &VertexSet, fuel: u64) -> CheckReport {
    let n = g.vertex_count() as u64;
    let need = (e.white(g).len() as u64)
        .saturating_mul(n + 1)
        .saturating_add(roots.len() as u64);
    CheckReport::from_witness(
        "fuel.bound",
        (fuel < need).then(|| format!("fuel {fuel} below required {need}")),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::environment::{add_stack_incr, init_env};

    #[test]
    fn dfs1_to_successors_decreases() {
        let g = Graph::from_edges(3, [(0, 1), (0, 2)]).unwrap();
        let e = init_env(&g);
        let caller = Measure::dfs1(&g, VertexId(0), &e);
        let e1 = add_stack_incr(VertexId(0), e);
        let callee = Measure::dfs(&g, &[VertexId(1), VertexId(2)].into(), &e1);
        assert_eq!(caller.why3, vec![3, 0]);
        assert_eq!(callee.why3, vec![2, 1, 2]);
        assert!(check_measures(&caller, &callee).iter().all(|r| r.holds));
    }

    #[test]
    fn dfs_to_rest_decreases_on_roots() {
        let g = Graph::empty(3).unwrap();
        let e = add_stack_incr(VertexId(0), init_env(&g));
        let caller = Measure::dfs(&g, &[VertexId(0), VertexId(1)].into(), &e);
        let callee = Measure::dfs(&g, &[VertexId(1)].into(), &e);
        assert!(check_measures(&caller, &callee).iter().all(|r| r.holds));
        // dfs on {x} calling dfs1 x: same white set and roots, tag 1 < 2.
        let single = Measure::dfs(&g, &[VertexId(1)].into(), &e);
        let one = Measure::dfs1(&g, VertexId(1), &e);
        assert!(one.isabelle_below(&single) && one.why3_below(&single));
        // A call with an unchanged measure is flagged.
        assert!(check_measures(&caller, &caller).iter().all(|r| !r.holds));
    }

    #[test]
    fn colored_num_and_fuel() {
        let g = Graph::empty(2).unwrap();
        let mut e = add_stack_incr(VertexId(0), init_env(&g));
        assert!(colored_num(&g, &e).holds);
        e.black.insert(VertexId(1));
        assert!(!colored_num(&g, &e).holds);

        let e = init_env(&g);
        let roots = g.vertex_set();
        assert!(fuel_bound(&g, &e, &roots, 8).holds);
        assert!(!fuel_bound(&g, &e, &roots, 7).holds);
    }
}
