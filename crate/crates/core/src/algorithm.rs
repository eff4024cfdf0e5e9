//! Tarjan's algorithm as two mutually recursive functions over an immutable
//! environment: `dfs1` visits one fresh vertex, `dfs` folds over a root set.
//!
//! The same search body serves three callers: plain [`tarjan`], the
//! fuel-bounded [`tarjan_fueled`], and the checker, which plugs in an
//! [`Observer`] to see every call, branch and return.

use thiserror::Error;

use crate::environment::{
    add_black, add_stack_incr, init_env, set_infty, Env, EnvError, NumMark, Stack,
};
use crate::graph::{Graph, VertexId, VertexSet};
use crate::oracle::SccPartition;

/// Minimum headroom before the recursion switches to a fresh stack segment.
const RED_ZONE: usize = 128 * 1024;
const STACK_SEGMENT: usize = 4 * 1024 * 1024;

/// Rule for picking a vertex out of a non-empty root set.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ChoiceOrder {
    /// Smallest vertex id.
    #[default]
    Smallest,
    /// Smallest rank in a pseudorandom permutation derived from the seed.
    Seeded(u64),
}

impl ChoiceOrder {
    pub fn choose(&self, set: &VertexSet) -> Option<VertexId> {
        match *self {
            ChoiceOrder::Smallest => set.first().copied(),
            ChoiceOrder::Seeded(seed) => set.iter().copied().min_by_key(|v| (rank(seed, *v), *v)),
        }
    }
}

// SplitMix64 finalizer over (seed, vertex).
fn rank(seed: u64, v: VertexId) -> u64 {
    let mut z = seed ^ (u64::from(v.0).wrapping_add(1)).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Value and environment returned by `dfs1` and `dfs`. The value is never
/// `Unvisited`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DfsResult {
    pub value: NumMark,
    pub env: Env,
}

/// Deliberate faults, used to confirm that the checker catches them.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mutation {
    /// Popped vertices keep their serial numbers.
    SkipSetInfty,
    /// The component is popped without its base vertex.
    SplitOneShort,
    /// The lowered branch returns without blackening `x`.
    ForgetAddBlack,
    /// `dfs` combines with max instead of min.
    WrongMin,
    /// `add_stack_incr` does not make `x` gray.
    SkipGrayAdd,
    /// The root test uses `n1 <= n0` instead of `n1 < n0`.
    LeqInsteadOfLt,
}

impl Mutation {
    pub const ALL: [Mutation; 6] = [
        Mutation::SkipSetInfty,
        Mutation::SplitOneShort,
        Mutation::ForgetAddBlack,
        Mutation::WrongMin,
        Mutation::SkipGrayAdd,
        Mutation::LeqInsteadOfLt,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Mutation::SkipSetInfty => "skip_set_infty",
            Mutation::SplitOneShort => "split_one_short",
            Mutation::ForgetAddBlack => "forget_add_black",
            Mutation::WrongMin => "wrong_min",
            Mutation::SkipGrayAdd => "skip_gray_add",
            Mutation::LeqInsteadOfLt => "leq_instead_of_lt",
        }
    }
}

impl std::fmt::Display for Mutation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Mutation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Mutation::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| format!("unknown mutation `{s}`"))
    }
}

/// Raised by an observer to stop the search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Halt;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("fuel exhausted")]
    FuelExhausted,
    #[error("search halted by observer")]
    Halted,
    #[error(transparent)]
    Env(#[from] EnvError),
}

impl From<Halt> for SearchError {
    fn from(_: Halt) -> Self {
        SearchError::Halted
    }
}

/// Variables in scope at the branch point of `dfs1`, after the recursive
/// call on the successors has returned.
#[derive(Debug)]
pub struct BranchPoint<'a> {
    pub x: VertexId,
    /// `e.sn` at entry, which is also the serial number given to `x`.
    pub n0: usize,
    pub n1: NumMark,
    pub branch: Branch<'a>,
}

#[derive(Debug)]
pub enum Branch<'a> {
    /// `n1 < n0`: `x` is not the base of its component.
    Lowered { e1: &'a Env },
    /// `x` is the base. `s2` (top first, ending at `x`) is popped and `s3`
    /// remains; `e1_black` is the black set returned by the inner call.
    Root {
        e1_black: &'a VertexSet,
        s2: &'a [VertexId],
        s3: &'a Stack,
    },
}

/// Hooks into the search. Every method defaults to doing nothing.
pub trait Observer {
    fn enter_dfs1(&mut self, _x: VertexId, _e: &Env) -> Result<(), Halt> {
        Ok(())
    }
    /// `fuel` is the remaining recursion budget, if bounded.
    fn enter_dfs(&mut self, _roots: &VertexSet, _e: &Env, _fuel: Option<u64>) -> Result<(), Halt> {
        Ok(())
    }
    fn branch(&mut self, _at: &BranchPoint<'_>) -> Result<(), Halt> {
        Ok(())
    }
    fn exit_dfs1(&mut self, _x: VertexId, _result: &DfsResult) -> Result<(), Halt> {
        Ok(())
    }
    fn exit_dfs(&mut self, _result: &DfsResult) -> Result<(), Halt> {
        Ok(())
    }
}

/// Observer that ignores everything.
#[derive(Clone, Copy, Debug, Default)]
pub struct Silent;

impl Observer for Silent {}

/// One configured run of the search.
#[derive(Clone, Copy, Debug)]
pub struct Search<'g> {
    graph: &'g Graph,
    order: ChoiceOrder,
    fuel: Option<u64>,
    mutation: Option<Mutation>,
}

impl<'g> Search<'g> {
    pub fn new(graph: &'g Graph) -> Self {
        Search {
            graph,
            order: ChoiceOrder::default(),
            fuel: None,
            mutation: None,
        }
    }

    pub fn order(mut self, order: ChoiceOrder) -> Self {
        self.order = order;
        self
    }

    pub fn fuel(mut self, fuel: Option<u64>) -> Self {
        self.fuel = fuel;
        self
    }

    pub fn mutation(mut self, mutation: Option<Mutation>) -> Self {
        self.mutation = mutation;
        self
    }

    /// `dfs` over all vertices from the initial environment.
    pub fn run<O: Observer>(&self, observer: &mut O) -> Result<DfsResult, SearchError> {
        let mut run = Run {
            search: self,
            observer,
        };
        run.dfs(self.graph.vertex_set(), init_env(self.graph), self.fuel)
    }

    /// A single `dfs1` call from a caller-supplied environment.
    pub fn run_dfs1<O: Observer>(
        &self,
        x: VertexId,
        e: Env,
        observer: &mut O,
    ) -> Result<DfsResult, SearchError> {
        let mut run = Run {
            search: self,
            observer,
        };
        run.dfs1(x, e, self.fuel)
    }

    /// A single `dfs` call from a caller-supplied environment.
    pub fn run_dfs<O: Observer>(
        &self,
        roots: VertexSet,
        e: Env,
        observer: &mut O,
    ) -> Result<DfsResult, SearchError> {
        let mut run = Run {
            search: self,
            observer,
        };
        run.dfs(roots, e, self.fuel)
    }
}

struct Run<'s, 'g, O> {
    search: &'s Search<'g>,
    observer: &'s mut O,
}

impl<O: Observer> Run<'_, '_, O> {
    fn mutated(&self, m: Mutation) -> bool {
        self.search.mutation == Some(m)
    }

    fn dfs1(&mut self, x: VertexId, e: Env, fuel: Option<u64>) -> Result<DfsResult, SearchError> {
        stacker::maybe_grow(RED_ZONE, STACK_SEGMENT, || self.dfs1_body(x, e, fuel))
    }

    fn dfs1_body(
        &mut self,
        x: VertexId,
        e: Env,
        fuel: Option<u64>,
    ) -> Result<DfsResult, SearchError> {
        self.observer.enter_dfs1(x, &e)?;
        let n0 = e.sn;
        let successors: VertexSet = self.search.graph.succ(x).iter().copied().collect();
        let pushed = if self.mutated(Mutation::SkipGrayAdd) {
            let mut e = add_stack_incr(x, e);
            e.gray.remove(&x);
            e
        } else {
            add_stack_incr(x, e)
        };
        let DfsResult { value: n1, env: e1 } = self.dfs(successors, pushed, fuel)?;

        let lowered = if self.mutated(Mutation::LeqInsteadOfLt) {
            n1 <= NumMark::Serial(n0)
        } else {
            n1 < NumMark::Serial(n0)
        };
        let result = if lowered {
            self.observer.branch(&BranchPoint {
                x,
                n0,
                n1,
                branch: Branch::Lowered { e1: &e1 },
            })?;
            let env = if self.mutated(Mutation::ForgetAddBlack) {
                e1
            } else {
                add_black(x, e1)
            };
            DfsResult { value: n1, env }
        } else {
            let Env {
                mut black,
                mut gray,
                stack,
                mut sccs,
                sn,
                num,
            } = e1;
            let (mut s2, mut s3) = stack.split(x)?;
            if self.mutated(Mutation::SplitOneShort) {
                if let Some(base) = s2.pop() {
                    s3.push(base);
                }
            }
            let root = Branch::Root {
                e1_black: &black,
                s2: &s2,
                s3: &s3,
            };
            self.observer.branch(&BranchPoint {
                x,
                n0,
                n1,
                branch: root,
            })?;
            black.insert(x);
            // Stands for the entry gray set: the inner call leaves gray
            // unchanged and add_stack_incr added exactly `x`.
            gray.remove(&x);
            sccs.insert(s2.iter().copied().collect());
            let num = if self.mutated(Mutation::SkipSetInfty) {
                num
            } else {
                set_infty(&s2, num)
            };
            DfsResult {
                value: NumMark::Infinity,
                env: Env {
                    black,
                    gray,
                    stack: s3,
                    sccs,
                    sn,
                    num,
                },
            }
        };
        self.observer.exit_dfs1(x, &result)?;
        Ok(result)
    }

    fn dfs(
        &mut self,
        roots: VertexSet,
        e: Env,
        fuel: Option<u64>,
    ) -> Result<DfsResult, SearchError> {
        stacker::maybe_grow(RED_ZONE, STACK_SEGMENT, || self.dfs_body(roots, e, fuel))
    }

    fn dfs_body(
        &mut self,
        mut roots: VertexSet,
        e: Env,
        fuel: Option<u64>,
    ) -> Result<DfsResult, SearchError> {
        self.observer.enter_dfs(&roots, &e, fuel)?;
        let result = match self.search.order.choose(&roots) {
            None => DfsResult {
                value: NumMark::Infinity,
                env: e,
            },
            Some(x) => {
                // tarjan_rec 0 answers (infty, e) for any roots; with roots
                // left to visit that answer is the dummy.
                let inner = match fuel {
                    Some(0) => return Err(SearchError::FuelExhausted),
                    f => f.map(|f| f - 1),
                };
                roots.remove(&x);
                let DfsResult { value: n1, env: e1 } = match e.num(x) {
                    NumMark::Unvisited => self.dfs1(x, e, inner)?,
                    visited => DfsResult {
                        value: visited,
                        env: e,
                    },
                };
                let DfsResult { value: n2, env: e2 } = self.dfs(roots, e1, inner)?;
                let value = if self.mutated(Mutation::WrongMin) {
                    n1.max(n2)
                } else {
                    n1.min(n2)
                };
                DfsResult { value, env: e2 }
            }
        };
        self.observer.exit_dfs(&result)?;
        Ok(result)
    }
}

/// Recursion budget that always suffices: `|V|·(|V|+1) + |V|`.
pub fn sufficient_fuel(vertex_count: usize) -> u64 {
    let n = vertex_count as u64;
    n.saturating_mul(n.saturating_add(1)).saturating_add(n)
}

pub fn dfs1(g: &Graph, x: VertexId, e: Env, order: ChoiceOrder) -> DfsResult {
    Search::new(g)
        .order(order)
        .run_dfs1(x, e, &mut Silent)
        .expect("unbounded search without observer cannot fail")
}

pub fn dfs(g: &Graph, roots: VertexSet, e: Env, order: ChoiceOrder) -> DfsResult {
    Search::new(g)
        .order(order)
        .run_dfs(roots, e, &mut Silent)
        .expect("unbounded search without observer cannot fail")
}

/// Strongly connected components of `g`.
pub fn tarjan(g: &Graph, order: ChoiceOrder) -> SccPartition {
    let result = Search::new(g)
        .order(order)
        .run(&mut Silent)
        .expect("unbounded search without observer cannot fail");
    SccPartition::from(&result.env.sccs)
}

/// Like [`tarjan`] but with an explicit recursion budget; `None` when the
/// budget runs out. [`sufficient_fuel`] never runs out.
pub fn tarjan_fueled(g: &Graph, fuel: u64, order: ChoiceOrder) -> Option<SccPartition> {
    match Search::new(g)
        .order(order)
        .fuel(Some(fuel))
        .run(&mut Silent)
    {
        Ok(result) => Some(SccPartition::from(&result.env.sccs)),
        Err(SearchError::FuelExhausted) => None,
        Err(e) => unreachable!("search without observer or mutation failed: {e}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::scc_oracle;

    fn v(i: u32) -> VertexId {
        VertexId(i)
    }

    fn part(cs: &[&[u32]]) -> SccPartition {
        SccPartition::from_components(cs.iter().map(|c| c.iter().copied().map(VertexId)))
    }

    #[test]
    fn dfs1_isolated_vertex() {
        let g = Graph::empty(1).unwrap();
        let r = dfs1(&g, v(0), init_env(&g), ChoiceOrder::Smallest);
        assert_eq!(r.value, NumMark::Infinity);
        assert_eq!(SccPartition::from(&r.env.sccs), part(&[&[0]]));
        assert!(r.env.stack.is_empty());
        assert_eq!(r.env.num(v(0)), NumMark::Infinity);
        assert_eq!(r.env.black, VertexSet::from([v(0)]));
    }

    #[test]
    fn dfs1_self_loop() {
        let g = Graph::from_edges(1, [(0, 0)]).unwrap();
        let r = dfs1(&g, v(0), init_env(&g), ChoiceOrder::Smallest);
        assert_eq!(r.value, NumMark::Infinity);
        assert_eq!(SccPartition::from(&r.env.sccs), part(&[&[0]]));
    }

    #[test]
    fn dfs1_two_cycle_takes_lowered_branch_inside() {
        #[derive(Default)]
        struct Branches(Vec<(VertexId, bool)>);
        impl Observer for Branches {
            fn branch(&mut self, at: &BranchPoint<'_>) -> Result<(), Halt> {
                self.0
                    .push((at.x, matches!(at.branch, Branch::Lowered { .. })));
                if at.x == VertexId(1) {
                    assert_eq!((at.n1, at.n0), (NumMark::Serial(0), 1));
                }
                Ok(())
            }
        }
        let g = Graph::from_edges(2, [(0, 1), (1, 0)]).unwrap();
        let mut seen = Branches::default();
        let r = Search::new(&g)
            .run_dfs1(v(0), init_env(&g), &mut seen)
            .unwrap();
        assert_eq!(r.value, NumMark::Infinity);
        assert_eq!(SccPartition::from(&r.env.sccs), part(&[&[0, 1]]));
        assert_eq!(seen.0, vec![(v(1), true), (v(0), false)]);
    }

    #[test]
    fn dfs_on_roots() {
        let g = Graph::from_edges(3, [(0, 1), (1, 0)]).unwrap();
        let e = init_env(&g);
        let r = dfs(&g, VertexSet::new(), e.clone(), ChoiceOrder::Smallest);
        assert_eq!(
            r,
            DfsResult {
                value: NumMark::Infinity,
                env: e.clone()
            }
        );

        let visited = add_stack_incr(v(2), add_stack_incr(v(1), e.clone()));
        let r = dfs(
            &g,
            VertexSet::from([v(2)]),
            visited.clone(),
            ChoiceOrder::Smallest,
        );
        assert_eq!(r.value, NumMark::Serial(1));
        assert_eq!(r.env, visited);

        let r = dfs(&g, g.vertex_set(), e, ChoiceOrder::Smallest);
        assert_eq!(SccPartition::from(&r.env.sccs), part(&[&[0, 1], &[2]]));
    }

    #[test]
    fn tarjan_small_graphs() {
        assert!(tarjan(&Graph::empty(0).unwrap(), ChoiceOrder::Smallest).is_empty());
        let chain = Graph::from_edges(2, [(0, 1)]).unwrap();
        assert_eq!(tarjan(&chain, ChoiceOrder::Smallest), part(&[&[0], &[1]]));
        let cycle = Graph::from_edges(3, [(0, 1), (1, 2), (2, 0)]).unwrap();
        assert_eq!(tarjan(&cycle, ChoiceOrder::Seeded(3)), part(&[&[0, 1, 2]]));
    }

    #[test]
    fn fuel() {
        assert_eq!(sufficient_fuel(10), 120);
        assert_eq!(sufficient_fuel(0), 0);
        let g = Graph::from_edges(3, [(0, 1), (1, 2), (2, 0)]).unwrap();
        assert_eq!(tarjan_fueled(&g, 0, ChoiceOrder::Smallest), None);
        assert_eq!(
            tarjan_fueled(&Graph::empty(1).unwrap(), 0, ChoiceOrder::Smallest),
            None
        );
        assert_eq!(
            tarjan_fueled(&g, sufficient_fuel(3), ChoiceOrder::Smallest),
            Some(scc_oracle(&g))
        );
        // The empty graph needs no fuel at all.
        assert_eq!(
            tarjan_fueled(&Graph::empty(0).unwrap(), 0, ChoiceOrder::Smallest),
            Some(SccPartition::default())
        );
    }

    #[test]
    fn seeded_choice_picks_members() {
        let set: VertexSet = [3, 7, 11].into_iter().map(VertexId).collect();
        for seed in 0..50 {
            assert!(set.contains(&ChoiceOrder::Seeded(seed).choose(&set).unwrap()));
        }
        let picks: VertexSet = (0..50)
            .map(|s| ChoiceOrder::Seeded(s).choose(&set).unwrap())
            .collect();
        assert!(picks.len() > 1, "seeded orders should not all agree");
        assert_eq!(ChoiceOrder::Smallest.choose(&VertexSet::new()), None);
    }

    #[test]
    fn deep_chain_does_not_overflow() {
        let n = 50_000u32;
        let g = Graph::from_edges(n as usize, (0..n).map(|u| (u, (u + 1) % n))).unwrap();
        let p = std::thread::Builder::new()
            .stack_size(256 * 1024)
            .spawn(move || tarjan(&g, ChoiceOrder::Smallest))
            .unwrap()
            .join()
            .unwrap();
        assert_eq!(p.len(), 1);
    }
}
