//! Text formats: edge lists, DIMACS arc files, scc listings and the
//! condensation.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::str::FromStr;

use thiserror::Error;

use crate::graph::{Graph, GraphError};
use crate::oracle::{PartitionError, SccPartition};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum GraphFormat {
    /// DIMACS if the first meaningful line is a `p` header, else edge list.
    #[default]
    Auto,
    EdgeList,
    Dimacs,
}

impl FromStr for GraphFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "auto" => Ok(GraphFormat::Auto),
            "edges" | "edgelist" => Ok(GraphFormat::EdgeList),
            "dimacs" => Ok(GraphFormat::Dimacs),
            _ => Err(format!(
                "unknown graph format `{s}` (expected auto, edges or dimacs)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("missing header")]
    MissingHeader,
    #[error("header declares {declared} arcs but {found} were listed")]
    ArcCount { declared: usize, found: usize },
    #[error("line {line}: {source}")]
    Graph { line: usize, source: GraphError },
}

fn syntax(line: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        message: message.into(),
    }
}

/// Non-blank lines with `#` comments removed, numbered from 1.
fn meaningful_lines(
    text: &str,
    comment: impl Fn(&str) -> bool,
) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(move |(_, l)| !l.is_empty() && !comment(l))
}

fn parse_u32(line: usize, token: Option<&str>, what: &str) -> Result<u32, ParseError> {
    let token = token.ok_or_else(|| syntax(line, format!("missing {what}")))?;
    token
        .parse()
        .map_err(|_| syntax(line, format!("bad {what} `{token}`")))
}

fn build(n: usize, edges: Vec<(usize, u32, u32)>) -> Result<Graph, ParseError> {
    if let Some(&(line, u, v)) = edges
        .iter()
        .find(|&&(_, u, v)| u as usize >= n || v as usize >= n)
    {
        let vertex = if u as usize >= n { u } else { v };
        return Err(ParseError::Graph {
            line,
            source: GraphError::VertexOutOfRange {
                vertex: vertex.into(),
                count: n,
            },
        });
    }
    Graph::from_edges(n, edges.into_iter().map(|(_, u, v)| (u, v)))
        .map_err(|source| ParseError::Graph { line: 0, source })
}

/// `n <count>` followed by `u v` lines; duplicate edges collapse.
pub fn parse_edge_list(text: &str) -> Result<Graph, ParseError> {
    let mut lines = meaningful_lines(text, |_| false);
    let (hline, header) = lines.next().ok_or(ParseError::MissingHeader)?;
    let mut tokens = header.split_whitespace();
    if tokens.next() != Some("n") {
        return Err(syntax(hline, "expected `n <count>`"));
    }
    let n = parse_u32(hline, tokens.next(), "vertex count")? as usize;
    if tokens.next().is_some() {
        return Err(syntax(hline, "trailing tokens after vertex count"));
    }
    let mut edges = Vec::new();
    for (line, l) in lines {
        let mut t = l.split_whitespace();
        let u = parse_u32(line, t.next(), "source")?;
        let v = parse_u32(line, t.next(), "target")?;
        if t.next().is_some() {
            return Err(syntax(line, "expected `u v`"));
        }
        edges.push((line, u, v));
    }
    build(n, edges)
}

/// `p edge <n> <m>` followed by `m` lines `a u v` with 1-based ids.
/// Lines starting with `c` are comments. The arc count must match the
/// header exactly, before duplicates are removed.
pub fn parse_dimacs(text: &str) -> Result<Graph, ParseError> {
    let mut lines = meaningful_lines(text, |l| l == "c" || l.starts_with("c "));
    let (hline, header) = lines.next().ok_or(ParseError::MissingHeader)?;
    let t: Vec<&str> = header.split_whitespace().collect();
    if t.len() != 4 || t[0] != "p" || !matches!(t[1], "edge" | "sp") {
        return Err(syntax(hline, "expected `p edge <vertices> <arcs>`"));
    }
    let n = parse_u32(hline, Some(t[2]), "vertex count")? as usize;
    let m = parse_u32(hline, Some(t[3]), "arc count")? as usize;
    let mut edges = Vec::with_capacity(m);
    for (line, l) in lines {
        let t: Vec<&str> = l.split_whitespace().collect();
        if !(t.len() == 3 || t.len() == 4) || t[0] != "a" {
            return Err(syntax(line, "expected `a <u> <v>`"));
        }
        let one_based = |tok: &str, what| match parse_u32(line, Some(tok), what)? {
            0 => Err(syntax(line, "vertex ids start at 1")),
            v => Ok(v - 1),
        };
        edges.push((line, one_based(t[1], "source")?, one_based(t[2], "target")?));
    }
    if edges.len() != m {
        return Err(ParseError::ArcCount {
            declared: m,
            found: edges.len(),
        });
    }
    build(n, edges)
}

pub fn parse_graph(text: &str, format: GraphFormat) -> Result<Graph, ParseError> {
    match format {
        GraphFormat::EdgeList => parse_edge_list(text),
        GraphFormat::Dimacs => parse_dimacs(text),
        GraphFormat::Auto => {
            let first = meaningful_lines(text, |l| l == "c" || l.starts_with("c ")).next();
            match first {
                Some((_, l)) if l.starts_with("p ") => parse_dimacs(text),
                _ => parse_edge_list(text),
            }
        }
    }
}

pub fn write_edge_list(g: &Graph) -> String {
    let mut out = format!("n {}\n", g.vertex_count());
    for (u, v) in g.edges() {
        let _ = writeln!(out, "{u} {v}");
    }
    out
}

/// One line per component, members ascending, components ordered by least
/// member.
pub fn format_sccs(p: &SccPartition) -> String {
    p.to_string()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CondensationError {
    #[error("invalid partition: {0}")]
    Partition(#[from] PartitionError),
    #[error("quotient graph has a cycle through C{0}; the partition is not the scc partition")]
    Cyclic(u32),
}

/// The quotient graph: a `C<m>: members` line per component (named after
/// its least member `m`), then the distinct `Ci -> Cj` edges, `i != j`,
/// sorted.
pub fn emit_condensation(g: &Graph, p: &SccPartition) -> Result<String, CondensationError> {
    p.validate(g)?;
    let class = p.component_index(g.vertex_count());
    let name: Vec<u32> = p.components().iter().map(|c| c[0].0).collect();
    let mut arcs = BTreeSet::new();
    for (u, v) in g.edges() {
        let (cu, cv) = (
            class[u.index()].expect("validated"),
            class[v.index()].expect("validated"),
        );
        if cu != cv {
            arcs.insert((cu, cv));
        }
    }

    // Kahn's algorithm on component indices.
    let k = name.len();
    let mut indegree = vec![0usize; k];
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); k];
    for &(a, b) in &arcs {
        indegree[b] += 1;
        out[a].push(b);
    }
    let mut ready: Vec<usize> = (0..k).filter(|&c| indegree[c] == 0).collect();
    let mut seen = 0;
    while let Some(c) = ready.pop() {
        seen += 1;
        for &d in &out[c] {
            indegree[d] -= 1;
            if indegree[d] == 0 {
                ready.push(d);
            }
        }
    }
    if seen < k {
        let stuck = (0..k)
            .find(|&c| indegree[c] > 0)
            .expect("some component left");
        return Err(CondensationError::Cyclic(name[stuck]));
    }

    let mut text = String::new();
    for (c, members) in p.components().iter().enumerate() {
        let _ = write!(text, "C{}:", name[c]);
        for v in members {
            let _ = write!(text, " {v}");
        }
        text.push('\n');
    }
    for (a, b) in arcs {
        let _ = writeln!(text, "C{} -> C{}", name[a], name[b]);
    }
    Ok(text)
}
