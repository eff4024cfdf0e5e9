//! Finite directed graphs over dense vertex ids, plus the reachability
//! predicates shared by the algorithm, the oracle and the checker.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use thiserror::Error;

/// A vertex of a [`Graph`]. Ids are dense: a graph with `n` vertices uses
/// exactly `0..n`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub u32);

impl VertexId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<u32> for VertexId {
    fn from(v: u32) -> Self {
        VertexId(v)
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Ordered finite set of vertices.
pub type VertexSet = BTreeSet<VertexId>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("vertex {vertex} is out of range for a graph with {count} vertices")]
    VertexOutOfRange { vertex: u64, count: usize },
    #[error("graph with {0} vertices exceeds the 32-bit vertex id space")]
    TooLarge(usize),
}

/// Immutable directed graph. Successor lists are sorted, duplicate free and
/// closed in the vertex set. Self-loops are allowed.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Graph {
    successors: Vec<Vec<VertexId>>,
    edge_count: usize,
}

impl Graph {
    /// A graph with `n` vertices and no edges.
    pub fn empty(n: usize) -> Result<Self, GraphError> {
        Self::from_edges(n, std::iter::empty())
    }

    /// Builds a graph from `(source, target)` pairs. Duplicate edges collapse.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (u32, u32)>,
    {
        if n > u32::MAX as usize {
            return Err(GraphError::TooLarge(n));
        }
        let mut successors = vec![Vec::new(); n];
        for (u, v) in edges {
            for w in [u, v] {
                if w as usize >= n {
                    return Err(GraphError::VertexOutOfRange {
                        vertex: w.into(),
                        count: n,
                    });
                }
            }
            successors[u as usize].push(VertexId(v));
        }
        Ok(Self::from_lists(successors))
    }

    /// Builds a graph from per-vertex successor lists.
    pub fn from_successors(lists: Vec<Vec<u32>>) -> Result<Self, GraphError> {
        let n = lists.len();
        let edges = lists
            .iter()
            .enumerate()
            .flat_map(|(u, succ)| succ.iter().map(move |&v| (u as u32, v)));
        Self::from_edges(n, edges)
    }

    fn from_lists(mut successors: Vec<Vec<VertexId>>) -> Self {
        let mut edge_count = 0;
        for list in &mut successors {
            list.sort_unstable();
            list.dedup();
            edge_count += list.len();
        }
        Graph {
            successors,
            edge_count,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.successors.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn vertices(&self) -> impl DoubleEndedIterator<Item = VertexId> + ExactSizeIterator {
        (0..self.successors.len() as u32).map(VertexId)
    }

    pub fn vertex_set(&self) -> VertexSet {
        self.vertices().collect()
    }

    pub fn contains(&self, v: VertexId) -> bool {
        v.index() < self.successors.len()
    }

    fn check(&self, v: VertexId) -> Result<(), GraphError> {
        if self.contains(v) {
            Ok(())
        } else {
            Err(GraphError::VertexOutOfRange {
                vertex: v.0.into(),
                count: self.vertex_count(),
            })
        }
    }

    /// The successor set of `v`, sorted ascending.
    pub fn successors(&self, v: VertexId) -> Result<&[VertexId], GraphError> {
        self.check(v)?;
        Ok(&self.successors[v.index()])
    }

    /// Unchecked successor access for hot loops; panics when `v` is out of range.
    #[inline]
    pub fn succ(&self, v: VertexId) -> &[VertexId] {
        &self.successors[v.index()]
    }

    pub fn edge(&self, x: VertexId, y: VertexId) -> Result<bool, GraphError> {
        self.check(y)?;
        Ok(self.successors(x)?.binary_search(&y).is_ok())
    }

    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.vertices()
            .flat_map(move |u| self.succ(u).iter().map(move |&v| (u, v)))
    }

    /// Reflexive-transitive reachability: every vertex reaches itself by the
    /// empty path.
    pub fn reachable(&self, x: VertexId, y: VertexId) -> Result<bool, GraphError> {
        self.check(x)?;
        self.check(y)?;
        if x == y {
            return Ok(true);
        }
        let mut seen = vec![false; self.vertex_count()];
        let mut queue = VecDeque::from([x]);
        seen[x.index()] = true;
        while let Some(u) = queue.pop_front() {
            for &v in self.succ(u) {
                if v == y {
                    return Ok(true);
                }
                if !seen[v.index()] {
                    seen[v.index()] = true;
                    queue.push_back(v);
                }
            }
        }
        Ok(false)
    }

    /// Vertices reachable from `x` through white vertices.
    ///
    /// The result always contains `x`. When `x` is white it also contains
    /// every `y` reached by a path `x -> ... -> y` whose vertices other than
    /// `y` are all white; `y` itself may be colored. This frontier is what
    /// makes the returned minimum of a search match the minimum serial number
    /// over the cone: a cross edge into an already-colored vertex counts.
    /// A colored `x` contributes only itself.
    pub fn white_reachable(&self, white: &VertexSet, x: VertexId) -> Result<VertexSet, GraphError> {
        self.check(x)?;
        let mut cone = VertexSet::from([x]);
        if !white.contains(&x) {
            return Ok(cone);
        }
        let mut queue = VecDeque::from([x]);
        while let Some(u) = queue.pop_front() {
            for &v in self.succ(u) {
                if cone.insert(v) && white.contains(&v) {
                    queue.push_back(v);
                }
            }
        }
        Ok(cone)
    }
}

/// Memoized all-pairs reachability, one breadth-first search per vertex,
/// stored as bit rows.
#[derive(Clone, Debug)]
pub struct Reachability {
    n: usize,
    words: usize,
    bits: Vec<u64>,
}

impl Reachability {
    pub fn new(g: &Graph) -> Self {
        let n = g.vertex_count();
        let words = n.div_ceil(64);
        let mut bits = vec![0u64; n * words];
        let mut queue = VecDeque::new();
        for s in g.vertices() {
            let row = &mut bits[s.index() * words..(s.index() + 1) * words];
            row[s.index() / 64] |= 1 << (s.index() % 64);
            queue.push_back(s);
            while let Some(u) = queue.pop_front() {
                for &v in g.succ(u) {
                    let (w, b) = (v.index() / 64, 1u64 << (v.index() % 64));
                    if row[w] & b == 0 {
                        row[w] |= b;
                        queue.push_back(v);
                    }
                }
            }
        }
        Reachability { n, words, bits }
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    /// Panics if either vertex is out of range.
    #[inline]
    pub fn reaches(&self, x: VertexId, y: VertexId) -> bool {
        assert!(
            x.index() < self.n && y.index() < self.n,
            "vertex out of range"
        );
        self.bits[x.index() * self.words + y.index() / 64] & (1 << (y.index() % 64)) != 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(i: u32) -> VertexId {
        VertexId(i)
    }

    fn set(ids: &[u32]) -> VertexSet {
        ids.iter().copied().map(VertexId).collect()
    }

    #[test]
    fn successor_lookup() {
        let g = Graph::from_edges(2, [(0, 1)]).unwrap();
        assert_eq!(g.successors(v(0)).unwrap(), &[v(1)]);
        assert!(g.successors(v(1)).unwrap().is_empty());
        let loop1 = Graph::from_edges(1, [(0, 0)]).unwrap();
        assert_eq!(loop1.successors(v(0)).unwrap(), &[v(0)]);
    }

    #[test]
    fn out_of_range_is_a_domain_error() {
        let g = Graph::empty(2).unwrap();
        assert!(matches!(
            g.successors(v(2)),
            Err(GraphError::VertexOutOfRange {
                vertex: 2,
                count: 2
            })
        ));
        assert!(g.edge(v(0), v(5)).is_err());
        assert!(g.reachable(v(9), v(0)).is_err());
        assert!(Graph::from_edges(2, [(0, 2)]).is_err());
    }

    #[test]
    fn edges_dedup_and_loops() {
        let g = Graph::from_edges(2, [(0, 1), (0, 1), (1, 1)]).unwrap();
        assert_eq!(g.edge_count(), 2);
        assert!(g.edge(v(0), v(1)).unwrap());
        assert!(!g.edge(v(1), v(0)).unwrap());
        assert!(g.edge(v(1), v(1)).unwrap());
    }

    #[test]
    fn reachability_basics() {
        let g = Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        assert!(g.reachable(v(2), v(2)).unwrap());
        assert!(g.reachable(v(0), v(2)).unwrap());
        assert!(!g.reachable(v(2), v(0)).unwrap());
        let r = Reachability::new(&g);
        assert!(r.reaches(v(0), v(2)) && !r.reaches(v(2), v(0)) && r.reaches(v(1), v(1)));
    }

    #[test]
    fn white_reachable_cones() {
        let g = Graph::from_edges(2, [(0, 1)]).unwrap();
        assert_eq!(
            g.white_reachable(&set(&[0, 1]), v(0)).unwrap(),
            set(&[0, 1])
        );
        // 1 is colored: it is part of the frontier but the search stops there.
        assert_eq!(g.white_reachable(&set(&[0]), v(0)).unwrap(), set(&[0, 1]));
        // A colored root contributes only itself.
        assert_eq!(g.white_reachable(&set(&[]), v(0)).unwrap(), set(&[0]));
        assert_eq!(g.white_reachable(&set(&[1]), v(0)).unwrap(), set(&[0]));

        // The walk does not continue past a colored vertex.
        let chain = Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        assert_eq!(
            chain.white_reachable(&set(&[0, 2]), v(0)).unwrap(),
            set(&[0, 1])
        );
    }
}
