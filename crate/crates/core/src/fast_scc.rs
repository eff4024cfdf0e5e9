//! Iterative index/lowlink Tarjan and a small wall-clock harness for
//! checking that its running time grows linearly.

use std::fmt;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::graph::Graph;
use crate::oracle::SccPartition;

const UNVISITED: u32 = u32::MAX;

/// Per-vertex state: DFS serial, lowlink, component label (the base vertex
/// of its component) and stack membership.
#[derive(Clone, Copy)]
struct Node {
    index: u32,
    low: u32,
    label: u32,
    on_stack: bool,
}

/// Strongly connected components in `O(|V| + |E|)` time without host
/// recursion.
pub fn tarjan_fast(g: &Graph) -> SccPartition {
    let n = g.vertex_count();
    // Flat adjacency: successors of v are targets[offsets[v]..offsets[v + 1]].
    let mut offsets = Vec::with_capacity(n + 1);
    let mut targets = Vec::with_capacity(g.edge_count());
    offsets.push(0u32);
    for v in g.vertices() {
        targets.extend(g.succ(v).iter().map(|w| w.0));
        offsets.push(targets.len() as u32);
    }

    let mut node = vec![
        Node {
            index: UNVISITED,
            low: 0,
            label: 0,
            on_stack: false
        };
        n
    ];
    let mut stack: Vec<u32> = Vec::new();
    // (vertex, position in `targets` of the next successor to look at)
    let mut frames: Vec<(u32, u32)> = Vec::new();
    let mut counter = 0u32;

    for root in 0..n {
        if node[root].index != UNVISITED {
            continue;
        }
        node[root] = Node {
            index: counter,
            low: counter,
            label: 0,
            on_stack: true,
        };
        counter += 1;
        stack.push(root as u32);
        frames.push((root as u32, offsets[root]));

        while let Some(frame) = frames.last_mut() {
            let v = frame.0 as usize;
            if frame.1 < offsets[v + 1] {
                let w = targets[frame.1 as usize] as usize;
                frame.1 += 1;
                if node[w].index == UNVISITED {
                    node[w] = Node {
                        index: counter,
                        low: counter,
                        label: 0,
                        on_stack: true,
                    };
                    counter += 1;
                    stack.push(w as u32);
                    frames.push((w as u32, offsets[w]));
                } else if node[w].on_stack {
                    node[v].low = node[v].low.min(node[w].index);
                }
                continue;
            }
            frames.pop();
            let low_v = node[v].low;
            if let Some(&(parent, _)) = frames.last() {
                let p = &mut node[parent as usize];
                p.low = p.low.min(low_v);
            }
            if low_v == node[v].index {
                loop {
                    let w = stack.pop().expect("root is on the stack") as usize;
                    node[w].on_stack = false;
                    node[w].label = v as u32;
                    if w == v {
                        break;
                    }
                }
            }
        }
    }
    let labels: Vec<u32> = node.iter().map(|x| x.label).collect();
    SccPartition::from_labels(&labels)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BenchError {
    #[error("need at least 3 sizes, got {0}")]
    TooFewSizes(usize),
    #[error("sizes must be strictly increasing ({prev} then {next})")]
    NotIncreasing { prev: usize, next: usize },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BenchRow {
    pub size: usize,
    pub edges: usize,
    pub time: Duration,
}

impl BenchRow {
    pub fn millis(&self) -> f64 {
        self.time.as_secs_f64() * 1e3
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct BenchTable {
    pub rows: Vec<BenchRow>,
}

impl BenchTable {
    /// `time(i + 1) / time(i)` for consecutive rows.
    pub fn ratios(&self) -> Vec<f64> {
        self.rows
            .windows(2)
            .map(|w| w[1].time.as_secs_f64() / w[0].time.as_secs_f64().max(f64::MIN_POSITIVE))
            .collect()
    }

    pub fn to_csv(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for BenchTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "size,edges,millis")?;
        for r in &self.rows {
            writeln!(f, "{},{},{:.3}", r.size, r.edges, r.millis())?;
        }
        Ok(())
    }
}

/// Times [`tarjan_fast`] on `family(size)` for each size. Each entry is the
/// best of `reps` runs; graph construction is not timed.
pub fn bench_linear<F>(family: F, sizes: &[usize], reps: usize) -> Result<BenchTable, BenchError>
where
    F: FnMut(usize) -> Graph,
{
    bench_with(family, sizes, reps, |g| {
        std::hint::black_box(tarjan_fast(g));
    })
}

/// [`bench_linear`] with an arbitrary workload.
pub fn bench_with<F, W>(
    mut family: F,
    sizes: &[usize],
    reps: usize,
    mut work: W,
) -> Result<BenchTable, BenchError>
where
    F: FnMut(usize) -> Graph,
    W: FnMut(&Graph),
{
    if sizes.len() < 3 {
        return Err(BenchError::TooFewSizes(sizes.len()));
    }
    if let Some(w) = sizes.windows(2).find(|w| w[0] >= w[1]) {
        return Err(BenchError::NotIncreasing {
            prev: w[0],
            next: w[1],
        });
    }
    let mut rows = Vec::with_capacity(sizes.len());
    for &size in sizes {
        let g = family(size);
        let mut best = Duration::MAX;
        for _ in 0..reps.max(1) {
            let start = Instant::now();
            work(&g);
            best = best.min(start.elapsed());
        }
        rows.push(BenchRow {
            size,
            edges: g.edge_count(),
            time: best,
        });
    }
    Ok(BenchTable { rows })
}
