//! Graph families shared by the criterion benches.

use tarjan_core::{generate, Graph, GraphSpec, Model};

/// Sizes of the doubling series, 2^14 through 2^17.
pub const DOUBLING_SIZES: [usize; 4] = [1 << 14, 1 << 15, 1 << 16, 1 << 17];

/// G(n, d/n): expected out-degree `degree`.
pub fn sparse_random(n: usize, degree: f64, seed: u64) -> Graph {
    let p = if n == 0 {
        0.0
    } else {
        (degree / n as f64).min(1.0)
    };
    generate(&GraphSpec::gnp(n, p, seed)).expect("p in range")
}

/// One long cycle: a single component with DFS depth `n`.
pub fn ring(n: usize) -> Graph {
    generate(&GraphSpec::new(n, Model::CycleChain { k: 1.min(n) }, 0)).expect("k <= n")
}

/// `k` linked cycles.
pub fn cycle_chain(n: usize, k: usize) -> Graph {
    generate(&GraphSpec::new(n, Model::CycleChain { k }, 0)).expect("k <= n")
}

#[cfg(test)]
mod tests {
    use super::*;
    use tarjan_core::tarjan_fast;

    #[test]
    fn families() {
        assert_eq!(tarjan_fast(&ring(1000)).len(), 1);
        assert_eq!(ring(0).vertex_count(), 0);
        assert_eq!(tarjan_fast(&cycle_chain(100, 10)).len(), 10);
        let g = sparse_random(4096, 8.0, 1);
        let avg = g.edge_count() as f64 / 4096.0;
        assert!((7.0..9.0).contains(&avg), "{avg}");
    }
}
