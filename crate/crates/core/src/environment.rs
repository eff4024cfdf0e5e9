//! The environment record threaded through the search and the predicates
//! that describe well-formed environments.
//!
//! Updaters take the environment by value and hand back the new one, so
//! every state is an immutable value from the caller's point of view while
//! the unchecked search never copies the maps.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::graph::{Graph, VertexId, VertexSet};
use crate::oracle::Oracle;

/// Value of `num` at a vertex.
///
/// `Serial` marks are totally ordered among themselves and below `Infinity`.
/// `Unvisited` only takes part in equality tests: every order comparison
/// involving it is false.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum NumMark {
    #[default]
    Unvisited,
    Serial(usize),
    Infinity,
}

impl NumMark {
    pub fn is_visited(self) -> bool {
        self != NumMark::Unvisited
    }

    /// Minimum with `Infinity` as identity. `Unvisited` is treated like
    /// `Infinity`; it never reaches this point in a correct run.
    pub fn min(self, other: NumMark) -> NumMark {
        match (self, other) {
            (NumMark::Serial(a), NumMark::Serial(b)) => NumMark::Serial(a.min(b)),
            (NumMark::Serial(_), _) => self,
            _ => other,
        }
    }

    /// Maximum in the same order; only used by fault injection.
    pub(crate) fn max(self, other: NumMark) -> NumMark {
        match (self, other) {
            (NumMark::Serial(a), NumMark::Serial(b)) => NumMark::Serial(a.max(b)),
            (NumMark::Infinity, _) | (_, NumMark::Infinity) => NumMark::Infinity,
            (NumMark::Unvisited, x) | (x, NumMark::Unvisited) => x,
        }
    }
}

impl PartialOrd for NumMark {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        use NumMark::*;
        match (self, other) {
            (Unvisited, Unvisited) => Some(Ordering::Equal),
            (Unvisited, _) | (_, Unvisited) => None,
            (Serial(a), Serial(b)) => Some(a.cmp(b)),
            (Serial(_), Infinity) => Some(Ordering::Less),
            (Infinity, Serial(_)) => Some(Ordering::Greater),
            (Infinity, Infinity) => Some(Ordering::Equal),
        }
    }
}

impl fmt::Display for NumMark {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NumMark::Unvisited => f.write_str("-"),
            NumMark::Serial(n) => write!(f, "{n}"),
            NumMark::Infinity => f.write_str("inf"),
        }
    }
}

impl FromStr for NumMark {
    type Err = ParseEnvError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "-" => Ok(NumMark::Unvisited),
            "inf" => Ok(NumMark::Infinity),
            _ => s
                .parse()
                .map(NumMark::Serial)
                .map_err(|_| ParseEnvError::Mark(s.to_owned())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnvError {
    #[error("vertex {0} does not occur in the stack")]
    NotOnStack(VertexId),
}

/// The search stack. Listed top first everywhere in the API; stored bottom
/// first so pushes and pops at the top are cheap.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Stack(Vec<VertexId>);

impl Stack {
    pub fn new() -> Self {
        Stack(Vec::new())
    }

    pub fn from_top_first<I: IntoIterator<Item = VertexId>>(items: I) -> Self {
        let mut v: Vec<VertexId> = items.into_iter().collect();
        v.reverse();
        Stack(v)
    }

    pub fn push(&mut self, x: VertexId) {
        self.0.push(x);
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn top(&self) -> Option<VertexId> {
        self.0.last().copied()
    }

    pub fn contains(&self, x: VertexId) -> bool {
        self.0.contains(&x)
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = VertexId> + ExactSizeIterator + '_ {
        self.0.iter().rev().copied()
    }

    pub fn to_vec(&self) -> Vec<VertexId> {
        self.iter().collect()
    }

    pub fn elements(&self) -> VertexSet {
        self.0.iter().copied().collect()
    }

    /// Stack contents from the bottom up.
    pub fn bottom_up(&self) -> &[VertexId] {
        &self.0
    }

    /// When `self = s ++ older` (top-first), returns `s` top first.
    pub fn strip_suffix(&self, older: &Stack) -> Option<Vec<VertexId>> {
        self.0
            .starts_with(&older.0)
            .then(|| self.0[older.0.len()..].iter().rev().copied().collect())
    }

    /// Pops everything down to and including the topmost occurrence of `x`.
    /// Returns the popped prefix (top first, ending with `x`) and what
    /// remains. Agrees with [`split`] on the top-first listing.
    pub fn split(mut self, x: VertexId) -> Result<(Vec<VertexId>, Stack), EnvError> {
        let at = self
            .0
            .iter()
            .rposition(|&y| y == x)
            .ok_or(EnvError::NotOnStack(x))?;
        let mut popped = self.0.split_off(at);
        popped.reverse();
        Ok((popped, self))
    }
}

/// Splits a top-first sequence at the first occurrence of `x`: returns
/// `(s2, s3)` with `s = s2 ++ s3` and `x` the last element of `s2`.
pub fn split(x: VertexId, s: &[VertexId]) -> Result<(Vec<VertexId>, Vec<VertexId>), EnvError> {
    let at = s
        .iter()
        .position(|&y| y == x)
        .ok_or(EnvError::NotOnStack(x))?;
    Ok((s[..=at].to_vec(), s[at + 1..].to_vec()))
}

/// Maps every vertex of `s` to `Infinity`.
pub fn set_infty(s: &[VertexId], mut num: Vec<NumMark>) -> Vec<NumMark> {
    for &x in s {
        num[x.index()] = NumMark::Infinity;
    }
    num
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Env {
    /// Ghost: fully visited vertices.
    pub black: VertexSet,
    /// Ghost: vertices under visit.
    pub gray: VertexSet,
    pub stack: Stack,
    pub sccs: BTreeSet<VertexSet>,
    /// Next fresh serial number.
    pub sn: usize,
    pub num: Vec<NumMark>,
}

impl Env {
    pub fn num(&self, x: VertexId) -> NumMark {
        self.num.get(x.index()).copied().unwrap_or_default()
    }

    pub fn colored(&self) -> VertexSet {
        self.black.union(&self.gray).copied().collect()
    }

    /// Vertices that are neither black nor gray.
    pub fn white(&self, g: &Graph) -> VertexSet {
        g.vertices()
            .filter(|v| !self.black.contains(v) && !self.gray.contains(v))
            .collect()
    }

    pub fn scc_members(&self) -> VertexSet {
        self.sccs.iter().flatten().copied().collect()
    }

    /// One line per field: `black`, `gray`, `stack` (top first), `sccs`,
    /// `sn`, `num` (as `v:mark` pairs).
    pub fn to_text(&self) -> String {
        self.field_lines().join("\n")
    }

    /// The same fields on a single line, separated by ` | `.
    pub fn to_inline(&self) -> String {
        self.field_lines().join(" | ")
    }

    fn field_lines(&self) -> [String; 6] {
        fn ids<I: IntoIterator<Item = VertexId>>(it: I) -> String {
            it.into_iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join(" ")
        }
        let sccs = self
            .sccs
            .iter()
            .map(|c| format!("{{{}}}", ids(c.iter().copied())))
            .collect::<Vec<_>>()
            .join(" ");
        let num = self
            .num
            .iter()
            .enumerate()
            .map(|(v, m)| format!("{v}:{m}"))
            .collect::<Vec<_>>()
            .join(" ");
        [
            format!("black {}", ids(self.black.iter().copied())),
            format!("gray {}", ids(self.gray.iter().copied())),
            format!("stack {}", ids(self.stack.iter())),
            format!("sccs {sccs}"),
            format!("sn {}", self.sn),
            format!("num {num}"),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseEnvError {
    #[error("missing field `{0}`")]
    MissingField(&'static str),
    #[error("unexpected field line `{0}`")]
    UnexpectedLine(String),
    #[error("bad vertex id `{0}`")]
    Vertex(String),
    #[error("bad num mark `{0}`")]
    Mark(String),
    #[error("bad scc list `{0}`")]
    Sccs(String),
    #[error("num entries must be listed for vertices 0..n in order, got `{0}`")]
    NumOrder(String),
}

fn parse_ids(s: &str) -> Result<Vec<VertexId>, ParseEnvError> {
    s.split_whitespace()
        .map(|t| {
            t.parse()
                .map(VertexId)
                .map_err(|_| ParseEnvError::Vertex(t.to_owned()))
        })
        .collect()
}

/// Accepts both the multi-line and the ` | `-separated forms.
impl FromStr for Env {
    type Err = ParseEnvError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut fields: [Option<&str>; 6] = Default::default();
        const NAMES: [&str; 6] = ["black", "gray", "stack", "sccs", "sn", "num"];
        for line in s
            .split(['\n', '|'])
            .map(str::trim)
            .filter(|l| !l.is_empty())
        {
            let (key, rest) = line.split_once(' ').unwrap_or((line, ""));
            let slot = NAMES
                .iter()
                .position(|&n| n == key)
                .ok_or_else(|| ParseEnvError::UnexpectedLine(line.to_owned()))?;
            fields[slot] = Some(rest.trim());
        }
        let get = |i: usize| fields[i].ok_or(ParseEnvError::MissingField(NAMES[i]));

        let black = parse_ids(get(0)?)?.into_iter().collect();
        let gray = parse_ids(get(1)?)?.into_iter().collect();
        let stack = Stack::from_top_first(parse_ids(get(2)?)?);
        let mut sccs = BTreeSet::new();
        let mut rest = get(3)?;
        while !rest.is_empty() {
            let body = rest
                .strip_prefix('{')
                .ok_or_else(|| ParseEnvError::Sccs(rest.to_owned()))?;
            let (inner, tail) = body
                .split_once('}')
                .ok_or_else(|| ParseEnvError::Sccs(rest.to_owned()))?;
            sccs.insert(parse_ids(inner)?.into_iter().collect());
            rest = tail.trim_start();
        }
        let sn_text = get(4)?;
        let sn = sn_text
            .parse()
            .map_err(|_| ParseEnvError::Mark(sn_text.to_owned()))?;
        let mut num = Vec::new();
        for (i, pair) in get(5)?.split_whitespace().enumerate() {
            let (v, m) = pair
                .split_once(':')
                .ok_or_else(|| ParseEnvError::NumOrder(pair.to_owned()))?;
            if v.parse::<usize>().ok() != Some(i) {
                return Err(ParseEnvError::NumOrder(pair.to_owned()));
            }
            num.push(m.parse()?);
        }
        Ok(Env {
            black,
            gray,
            stack,
            sccs,
            sn,
            num,
        })
    }
}

pub fn init_env(g: &Graph) -> Env {
    Env {
        black: VertexSet::new(),
        gray: VertexSet::new(),
        stack: Stack::new(),
        sccs: BTreeSet::new(),
        sn: 0,
        num: vec![NumMark::Unvisited; g.vertex_count()],
    }
}

/// Pushes `x`, makes it gray and gives it the next serial number.
pub fn add_stack_incr(x: VertexId, mut e: Env) -> Env {
    e.gray.insert(x);
    e.stack.push(x);
    e.num[x.index()] = NumMark::Serial(e.sn);
    e.sn += 1;
    e
}

/// Moves `x` from gray to black.
pub fn add_black(x: VertexId, mut e: Env) -> Env {
    e.black.insert(x);
    e.gray.remove(&x);
    e
}

/// Outcome of evaluating one named clause.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckReport {
    pub clause: String,
    pub holds: bool,
    /// Present exactly when the clause fails.
    pub witness: Option<String>,
}

impl CheckReport {
    pub fn pass(clause: impl Into<String>) -> Self {
        CheckReport {
            clause: clause.into(),
            holds: true,
            witness: None,
        }
    }

    pub fn fail(clause: impl Into<String>, witness: impl Into<String>) -> Self {
        CheckReport {
            clause: clause.into(),
            holds: false,
            witness: Some(witness.into()),
        }
    }

    /// Passes when `failure` is `None`, otherwise fails with it as witness.
    pub fn from_witness(clause: impl Into<String>, failure: Option<String>) -> Self {
        match failure {
            None => Self::pass(clause),
            Some(w) => Self::fail(clause, w),
        }
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.witness {
            None => write!(f, "{}=ok", self.clause),
            Some(w) => write!(f, "{}=FAIL({})", self.clause, w),
        }
    }
}

pub const WF_CLAUSES: [&str; 7] = [
    "wf_color",
    "wf_num",
    "simplelist",
    "no_black_to_white",
    "stack_reaches_higher",
    "stack_reaches_gray",
    "sccs_are_black_sccs",
];

/// Evaluates the seven well-formedness clauses, in order.
pub fn wf_env(g: &Graph, e: &Env) -> Vec<CheckReport> {
    wf_env_with(&Oracle::new(g), e)
}

/// [`wf_env`] against precomputed reachability.
pub fn wf_env_with(oracle: &Oracle<'_>, e: &Env) -> Vec<CheckReport> {
    let g = oracle.graph();
    let stack = e.stack.to_vec();
    let stack_set = e.stack.elements();
    let members = e.scc_members();
    let colored = e.colored();
    let num = |x: VertexId| e.num(x);

    let color = (|| {
        if let Some(x) = e.black.intersection(&e.gray).next() {
            return Some(format!("{x} is both black and gray"));
        }
        if let Some(x) = colored.iter().find(|x| !g.contains(**x)) {
            return Some(format!("colored {x} is not a vertex"));
        }
        if let Some(x) = e.gray.iter().find(|x| !stack_set.contains(x)) {
            return Some(format!("gray {x} is not on the stack"));
        }
        if let Some(x) = stack.iter().find(|x| !colored.contains(x)) {
            return Some(format!("stack vertex {x} is white"));
        }
        if let Some(x) = members.iter().find(|x| !e.black.contains(x)) {
            return Some(format!("scc member {x} is not black"));
        }
        if let Some(x) = stack.iter().find(|x| members.contains(x)) {
            return Some(format!("stack vertex {x} already belongs to an scc"));
        }
        if let Some(x) = e
            .black
            .iter()
            .find(|x| !stack_set.contains(x) && !members.contains(x))
        {
            return Some(format!("black {x} is neither on the stack nor in an scc"));
        }
        None
    })();

    let num_clause = (|| {
        if e.num.len() != g.vertex_count() {
            return Some(format!(
                "num has {} entries for {} vertices",
                e.num.len(),
                g.vertex_count()
            ));
        }
        for x in g.vertices() {
            if num(x).is_visited() != colored.contains(&x) {
                return Some(format!(
                    "{x}: num {} but colored={}",
                    num(x),
                    colored.contains(&x)
                ));
            }
            if (num(x) == NumMark::Infinity) != members.contains(&x) {
                return Some(format!(
                    "{x}: num {} but scc member={}",
                    num(x),
                    members.contains(&x)
                ));
            }
        }
        if colored.len() != e.sn {
            return Some(format!(
                "sn {} but {} numbered vertices",
                e.sn,
                colored.len()
            ));
        }
        let mut below: Option<(VertexId, usize)> = None;
        for &x in e.stack.bottom_up() {
            let NumMark::Serial(k) = num(x) else {
                return Some(format!("stack vertex {x} has num {}", num(x)));
            };
            if k >= e.sn {
                return Some(format!("stack vertex {x} has serial {k} >= sn {}", e.sn));
            }
            if let Some((y, j)) = below {
                if j >= k {
                    return Some(format!("{y} (serial {j}) lies below {x} (serial {k})"));
                }
            }
            below = Some((x, k));
        }
        None
    })();

    let simple = {
        let mut seen = VertexSet::new();
        stack
            .iter()
            .find(|&&x| !seen.insert(x))
            .map(|x| format!("{x} occurs twice"))
    };

    let no_black_to_white = e.black.iter().filter(|b| g.contains(**b)).find_map(|&b| {
        g.succ(b)
            .iter()
            .find(|w| !colored.contains(w))
            .map(|w| format!("edge {b}->{w}"))
    });

    let reaches_higher = stack.iter().find_map(|&x| {
        stack
            .iter()
            .find(|&&y| num(x) <= num(y) && !oracle.reachable(x, y))
            .map(|y| format!("{x} does not reach {y}"))
    });

    let reaches_gray = stack.iter().find_map(|&y| {
        let ok = e
            .gray
            .iter()
            .any(|&x| g.contains(x) && num(x) <= num(y) && oracle.reachable(y, x));
        (!ok).then(|| format!("{y} reaches no lower gray vertex"))
    });

    let sccs_clause = e
        .sccs
        .iter()
        .find_map(|cc| {
            if !cc.is_subset(&e.black) {
                Some(format!("stored {} is not all black", fmt_set(cc)))
            } else if !oracle.is_scc(cc) {
                Some(format!("stored {} is not an scc", fmt_set(cc)))
            } else {
                None
            }
        })
        .or_else(|| {
            oracle
                .sccs()
                .iter()
                .find(|cc| cc.is_subset(&e.black) && !e.sccs.contains(*cc))
                .map(|cc| format!("black scc {} not stored", fmt_set(cc)))
        });

    [
        color,
        num_clause,
        simple,
        no_black_to_white,
        reaches_higher,
        reaches_gray,
        sccs_clause,
    ]
    .into_iter()
    .zip(WF_CLAUSES)
    .map(|(w, name)| CheckReport::from_witness(name, w))
    .collect()
}

/// Monotone extension from `e` to `e2`.
pub fn subenv(e: &Env, e2: &Env) -> CheckReport {
    let witness = (|| {
        if let Some(x) = e.black.difference(&e2.black).next() {
            return Some(format!("{x} lost its black color"));
        }
        if e.gray != e2.gray {
            return Some(format!(
                "gray changed from {} to {}",
                fmt_set(&e.gray),
                fmt_set(&e2.gray)
            ));
        }
        let Some(pushed) = e2.stack.strip_suffix(&e.stack) else {
            return Some("old stack is not a suffix of the new one".to_owned());
        };
        if let Some(x) = pushed.iter().find(|x| !e2.black.contains(x)) {
            return Some(format!("new stack vertex {x} is not black"));
        }
        if let Some(cc) = e.sccs.iter().find(|cc| !e2.sccs.contains(*cc)) {
            return Some(format!("scc {} was dropped", fmt_set(cc)));
        }
        e.stack.iter().find(|&x| e.num(x) != e2.num(x)).map(|x| {
            format!(
                "num of stack vertex {x} changed from {} to {}",
                e.num(x),
                e2.num(x)
            )
        })
    })();
    CheckReport::from_witness("subenv", witness)
}

pub(crate) fn fmt_set(s: &VertexSet) -> String {
    format!(
        "{{{}}}",
        s.iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    )
}
