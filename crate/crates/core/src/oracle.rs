//! Brute-force SCC ground truth: equivalence classes of mutual reachability
//! over a full transitive closure. Deliberately naive and independent of
//! both Tarjan implementations.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::graph::{Graph, Reachability, VertexId, VertexSet};

/// A set of disjoint, non-empty vertex sets in canonical form: members
/// ascending, components ordered by least member.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SccPartition {
    components: Vec<Vec<VertexId>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PartitionError {
    #[error("empty component")]
    EmptyComponent,
    #[error("vertex {0} appears in more than one component")]
    Overlap(VertexId),
    #[error("vertex {0} is not covered by any component")]
    Uncovered(VertexId),
    #[error("vertex {0} is not a vertex of the graph")]
    Foreign(VertexId),
}

impl SccPartition {
    /// Canonicalizes arbitrary components. No validity check is done here;
    /// see [`SccPartition::validate`].
    pub fn from_components<I, C>(components: I) -> Self
    where
        I: IntoIterator<Item = C>,
        C: IntoIterator<Item = VertexId>,
    {
        let mut components: Vec<Vec<VertexId>> = components
            .into_iter()
            .map(|c| {
                let mut c: Vec<VertexId> = c.into_iter().collect();
                c.sort_unstable();
                c.dedup();
                c
            })
            .collect();
        components.sort_unstable();
        SccPartition { components }
    }

    /// Builds the partition from a component label per vertex in linear
    /// time. Labels are arbitrary but must be below `labels.len()`.
    pub fn from_labels(labels: &[u32]) -> Self {
        let mut slot = vec![u32::MAX; labels.len()];
        let mut components: Vec<Vec<VertexId>> = Vec::new();
        for (v, &label) in labels.iter().enumerate() {
            let s = &mut slot[label as usize];
            if *s == u32::MAX {
                *s = components.len() as u32;
                components.push(Vec::new());
            }
            components[*s as usize].push(VertexId(v as u32));
        }
        SccPartition { components }
    }

    pub fn components(&self) -> &[Vec<VertexId>] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Components pairwise disjoint, non-empty and covering exactly the
    /// vertices of `g`.
    pub fn validate(&self, g: &Graph) -> Result<(), PartitionError> {
        let mut seen = vec![false; g.vertex_count()];
        for c in &self.components {
            if c.is_empty() {
                return Err(PartitionError::EmptyComponent);
            }
            for &v in c {
                if !g.contains(v) {
                    return Err(PartitionError::Foreign(v));
                }
                if std::mem::replace(&mut seen[v.index()], true) {
                    return Err(PartitionError::Overlap(v));
                }
            }
        }
        match seen.iter().position(|s| !s) {
            Some(v) => Err(PartitionError::Uncovered(VertexId(v as u32))),
            None => Ok(()),
        }
    }

    /// Index of the component of every vertex; `None` for vertices not
    /// covered.
    pub fn component_index(&self, n: usize) -> Vec<Option<usize>> {
        let mut index = vec![None; n];
        for (i, c) in self.components.iter().enumerate() {
            for v in c {
                if let Some(slot) = index.get_mut(v.index()) {
                    *slot = Some(i);
                }
            }
        }
        index
    }
}

impl From<&BTreeSet<VertexSet>> for SccPartition {
    fn from(sets: &BTreeSet<VertexSet>) -> Self {
        SccPartition::from_components(sets.iter().map(|s| s.iter().copied()))
    }
}

/// One line per component, members ascending.
impl fmt::Display for SccPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.components {
            let mut first = true;
            for v in c {
                if !first {
                    f.write_str(" ")?;
                }
                first = false;
                write!(f, "{v}")?;
            }
            f.write_str("\n")?;
        }
        Ok(())
    }
}

/// Reachability facts about one graph, computed once and queried many times.
#[derive(Clone, Debug)]
pub struct Oracle<'g> {
    graph: &'g Graph,
    reach: Reachability,
    class_of: Vec<usize>,
    classes: Vec<VertexSet>,
}

impl<'g> Oracle<'g> {
    pub fn new(graph: &'g Graph) -> Self {
        let reach = Reachability::new(graph);
        let n = graph.vertex_count();
        let mut class_of = vec![usize::MAX; n];
        let mut classes = Vec::new();
        for x in graph.vertices() {
            if class_of[x.index()] != usize::MAX {
                continue;
            }
            let id = classes.len();
            let class: VertexSet = graph
                .vertices()
                .filter(|&y| reach.reaches(x, y) && reach.reaches(y, x))
                .collect();
            for y in &class {
                class_of[y.index()] = id;
            }
            classes.push(class);
        }
        Oracle {
            graph,
            reach,
            class_of,
            classes,
        }
    }

    pub fn graph(&self) -> &'g Graph {
        self.graph
    }

    pub fn reachable(&self, x: VertexId, y: VertexId) -> bool {
        self.reach.reaches(x, y)
    }

    pub fn in_same_scc(&self, x: VertexId, y: VertexId) -> bool {
        self.reach.reaches(x, y) && self.reach.reaches(y, x)
    }

    /// Every pair of members mutually reachable. Vacuously true for the
    /// empty set.
    pub fn is_subscc(&self, s: &VertexSet) -> bool {
        let Some(&first) = s.first() else { return true };
        s.iter()
            .all(|&y| self.graph.contains(y) && self.in_same_scc(first, y))
    }

    /// Non-empty, mutually reachable and maximal: no outside vertex is
    /// mutually reachable with a member.
    pub fn is_scc(&self, s: &VertexSet) -> bool {
        let Some(&first) = s.first() else {
            return false;
        };
        self.is_subscc(s)
            && self
                .graph
                .vertices()
                .all(|y| s.contains(&y) || !self.in_same_scc(first, y))
    }

    /// The SCC containing `x`.
    pub fn scc_of(&self, x: VertexId) -> &VertexSet {
        &self.classes[self.class_of[x.index()]]
    }

    /// All SCCs of the graph.
    pub fn sccs(&self) -> &[VertexSet] {
        &self.classes
    }

    pub fn partition(&self) -> SccPartition {
        SccPartition::from_components(self.classes.iter().map(|c| c.iter().copied()))
    }
}

pub fn in_same_scc(g: &Graph, x: VertexId, y: VertexId) -> bool {
    Oracle::new(g).in_same_scc(x, y)
}

pub fn is_scc(g: &Graph, s: &VertexSet) -> bool {
    Oracle::new(g).is_scc(s)
}

pub fn scc_oracle(g: &Graph) -> SccPartition {
    Oracle::new(g).partition()
}
