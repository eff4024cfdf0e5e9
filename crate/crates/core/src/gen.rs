//! Seeded random digraphs.
//!
//! Randomness comes from SplitMix64 seeded with `seed`:
//!
//! ```text
//! state <- state + 0x9E3779B97F4A7C15
//! z <- state
//! z <- (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//! z <- (z ^ (z >> 27)) * 0x94D049BB133111EB
//! output z ^ (z >> 31)
//! ```
//!
//! (all arithmetic modulo 2^64). An output `r` becomes the uniform
//! `u = ((r >> 11) + 1) * 2^-53` in `(0, 1]`. For the `gnp` and `dag` models
//! each row `v = 0, 1, ..` scans its candidate targets in ascending order
//! (all of `0..n` for `gnp`, `v+1..n` for `dag`) and jumps over
//! `floor(ln u / ln(1 - p))` candidates before taking the next one, so the
//! graph is a sequence of independent Bernoulli(p) trials. `p = 0` and
//! `p = 1` draw nothing.

use std::fmt;
use std::str::FromStr;

use rand_xoshiro::rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;
use thiserror::Error;

use crate::graph::{Graph, GraphError};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Model {
    /// Every ordered pair, self-loops included, with probability `p`.
    Gnp {
        p: f64,
    },
    /// Every pair `u < v` as `u -> v` with probability `p`.
    Dag {
        p: f64,
    },
    /// `k` cycles over consecutive blocks of near-equal size, block `i`
    /// linked to block `i + 1` by one edge. A block of one vertex gets a
    /// self-loop.
    CycleChain {
        k: usize,
    },
    /// Every pair `u != v`.
    Complete,
    Empty,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GraphSpec {
    pub n: usize,
    pub model: Model,
    pub seed: u64,
}

impl GraphSpec {
    pub fn new(n: usize, model: Model, seed: u64) -> Self {
        GraphSpec { n, model, seed }
    }

    pub fn gnp(n: usize, p: f64, seed: u64) -> Self {
        Self::new(n, Model::Gnp { p }, seed)
    }

    pub fn dag(n: usize, p: f64, seed: u64) -> Self {
        Self::new(n, Model::Dag { p }, seed)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenError {
    #[error("edge probability {0} is outside [0, 1]")]
    InvalidProbability(f64),
    #[error("cycle_chain needs 1 <= k <= n (k = {k}, n = {n})")]
    InvalidCycleCount { k: usize, n: usize },
    #[error("bad graph spec `{text}`: {reason}")]
    Syntax { text: String, reason: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

pub fn generate(spec: &GraphSpec) -> Result<Graph, GenError> {
    let n = spec.n;
    let mut rng = SplitMix64::from_seed(spec.seed.to_le_bytes());
    let mut succ: Vec<Vec<u32>> = vec![Vec::new(); n];
    match spec.model {
        Model::Gnp { p } => {
            check_p(p)?;
            for row in succ.iter_mut() {
                bernoulli_row(&mut rng, p, 0, n, row);
            }
        }
        Model::Dag { p } => {
            check_p(p)?;
            for (v, row) in succ.iter_mut().enumerate() {
                bernoulli_row(&mut rng, p, v + 1, n, row);
            }
        }
        Model::CycleChain { k } => {
            if n == 0 && k == 0 {
                return Ok(Graph::empty(0)?);
            }
            if k == 0 || k > n {
                return Err(GenError::InvalidCycleCount { k, n });
            }
            let mut start = 0;
            for i in 0..k {
                let len = n / k + usize::from(i < n % k);
                for j in 0..len {
                    let v = start + j;
                    succ[v].push((start + (j + 1) % len) as u32);
                }
                if i + 1 < k {
                    succ[start + len - 1].push((start + len) as u32);
                }
                start += len;
            }
        }
        Model::Complete => {
            for (v, row) in succ.iter_mut().enumerate() {
                row.extend((0..n as u32).filter(|&w| w as usize != v));
            }
        }
        Model::Empty => {}
    }
    Ok(Graph::from_successors(succ)?)
}

fn check_p(p: f64) -> Result<(), GenError> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(GenError::InvalidProbability(p))
    }
}

fn uniform(rng: &mut SplitMix64) -> f64 {
    ((rng.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Pushes each target in `lo..hi` independently with probability `p`.
fn bernoulli_row(rng: &mut SplitMix64, p: f64, lo: usize, hi: usize, row: &mut Vec<u32>) {
    if p <= 0.0 || lo >= hi {
        return;
    }
    if p >= 1.0 {
        row.extend(lo as u32..hi as u32);
        return;
    }
    let log_q = (1.0 - p).ln();
    let mut next = lo;
    loop {
        let skip = (uniform(rng).ln() / log_q).floor();
        if skip >= (hi - next) as f64 {
            return;
        }
        next += skip as usize;
        row.push(next as u32);
        next += 1;
        if next >= hi {
            return;
        }
    }
}

impl fmt::Display for GraphSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.model {
            Model::Gnp { p } => write!(f, "gnp:n={},p={p},seed={}", self.n, self.seed),
            Model::Dag { p } => write!(f, "dag:n={},p={p},seed={}", self.n, self.seed),
            Model::CycleChain { k } => write!(f, "cycle_chain:n={},k={k}", self.n),
            Model::Complete => write!(f, "complete:n={}", self.n),
            Model::Empty => write!(f, "empty:n={}", self.n),
        }
    }
}

/// `model:key=value,...` with keys `n` (required), `p` (for `gnp`, `dag`),
/// `k` (for `cycle_chain`) and `seed` (optional, default 0).
impl FromStr for GraphSpec {
    type Err = GenError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let syntax = |reason: String| GenError::Syntax {
            text: text.to_owned(),
            reason,
        };
        let (model, params) = text.trim().split_once(':').unwrap_or((text.trim(), ""));
        let (mut n, mut p, mut k, mut seed) = (None, None, None, 0u64);
        for item in params.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| syntax(format!("expected key=value, got `{item}`")))?;
            let bad = || syntax(format!("bad value for `{key}`"));
            match key.trim() {
                "n" => n = Some(value.trim().parse::<usize>().map_err(|_| bad())?),
                "p" => p = Some(value.trim().parse::<f64>().map_err(|_| bad())?),
                "k" => k = Some(value.trim().parse::<usize>().map_err(|_| bad())?),
                "seed" => seed = value.trim().parse().map_err(|_| bad())?,
                other => return Err(syntax(format!("unknown key `{other}`"))),
            }
        }
        let n = n.ok_or_else(|| syntax("missing `n`".into()))?;
        let need_p = || p.ok_or_else(|| syntax(format!("`{model}` needs `p`")));
        let model = match model {
            "gnp" => Model::Gnp { p: need_p()? },
            "dag" => Model::Dag { p: need_p()? },
            "cycle_chain" => Model::CycleChain {
                k: k.ok_or_else(|| syntax("`cycle_chain` needs `k`".into()))?,
            },
            "complete" => Model::Complete,
            "empty" => Model::Empty,
            other => return Err(syntax(format!("unknown model `{other}`"))),
        };
        if let Model::Gnp { p } | Model::Dag { p } = model {
            check_p(p)?;
        }
        Ok(GraphSpec { n, model, seed })
    }
}
