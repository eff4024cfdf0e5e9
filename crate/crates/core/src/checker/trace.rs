//! Line-oriented trace files: one event per line, tab-separated fields
//!
//! ```text
//! index  kind  subject  value  env_before  env_after  reports
//! ```
//!
//! `kind` is one of `call_dfs1`, `call_dfs`, `return_dfs1`, `return_dfs`,
//! `assert_A1` .. `assert_A7`. `subject` is the vertex of a `dfs1` event or
//! the root set `{..}` of a `dfs` event. Environments use the single-line
//! form of [`Env::to_inline`]; absent optional fields are empty. Reports
//! are `clause=ok` or `clause=FAIL(witness)` joined by `; `.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::environment::{fmt_set, subenv, wf_env_with, CheckReport, Env, NumMark, ParseEnvError};
use crate::graph::{Graph, VertexId, VertexSet};
use crate::oracle::Oracle;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EventKind {
    CallDfs1,
    CallDfs,
    ReturnDfs1,
    ReturnDfs,
    /// Assertion point A1..A7 of `dfs1`.
    Assert(u8),
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EventKind::CallDfs1 => f.write_str("call_dfs1"),
            EventKind::CallDfs => f.write_str("call_dfs"),
            EventKind::ReturnDfs1 => f.write_str("return_dfs1"),
            EventKind::ReturnDfs => f.write_str("return_dfs"),
            EventKind::Assert(k) => write!(f, "assert_A{k}"),
        }
    }
}

impl FromStr for EventKind {
    type Err = TraceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "call_dfs1" => EventKind::CallDfs1,
            "call_dfs" => EventKind::CallDfs,
            "return_dfs1" => EventKind::ReturnDfs1,
            "return_dfs" => EventKind::ReturnDfs,
            _ => match s
                .strip_prefix("assert_A")
                .and_then(|k| k.parse::<u8>().ok())
            {
                Some(k @ 1..=7) => EventKind::Assert(k),
                _ => return Err(TraceError::Kind(s.to_owned())),
            },
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Subject {
    Vertex(VertexId),
    Roots(VertexSet),
}

impl fmt::Display for Subject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Subject::Vertex(x) => write!(f, "{x}"),
            Subject::Roots(r) => f.write_str(&fmt_set(r)),
        }
    }
}

/// One observation of the checked search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceEvent {
    pub kind: EventKind,
    pub subject: Subject,
    /// Entry environment of the call the event belongs to.
    pub env_before: Env,
    pub env_after: Option<Env>,
    pub value: Option<NumMark>,
    pub reports: Vec<CheckReport>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TraceError {
    #[error("line {line}: expected 7 tab-separated fields, found {found}")]
    FieldCount { line: usize, found: usize },
    #[error("unknown event kind `{0}`")]
    Kind(String),
    #[error("line {line}: bad {what} `{text}`")]
    Field {
        line: usize,
        what: &'static str,
        text: String,
    },
    #[error("line {line}: {source}")]
    Env { line: usize, source: ParseEnvError },
}

impl TraceEvent {
    pub fn to_line(&self, index: usize) -> String {
        let value = self.value.map(|v| v.to_string()).unwrap_or_default();
        let after = self
            .env_after
            .as_ref()
            .map(Env::to_inline)
            .unwrap_or_default();
        let reports = self
            .reports
            .iter()
            .map(|r| r.to_string())
            .collect::<Vec<_>>()
            .join("; ");
        format!(
            "{index}\t{}\t{}\t{value}\t{}\t{after}\t{reports}",
            self.kind,
            self.subject,
            self.env_before.to_inline()
        )
    }

    pub fn parse_line(line_no: usize, line: &str) -> Result<(usize, TraceEvent), TraceError> {
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 7 {
            return Err(TraceError::FieldCount {
                line: line_no,
                found: fields.len(),
            });
        }
        let bad = |what, text: &str| TraceError::Field {
            line: line_no,
            what,
            text: text.to_owned(),
        };
        let index = fields[0].parse().map_err(|_| bad("index", fields[0]))?;
        let kind: EventKind = fields[1].parse()?;
        let subject = match fields[2]
            .strip_prefix('{')
            .and_then(|s| s.strip_suffix('}'))
        {
            Some(inner) => Subject::Roots(
                inner
                    .split_whitespace()
                    .map(|t| t.parse().map(VertexId).map_err(|_| bad("root", t)))
                    .collect::<Result<_, _>>()?,
            ),
            None => Subject::Vertex(VertexId(
                fields[2].parse().map_err(|_| bad("subject", fields[2]))?,
            )),
        };
        let value = match fields[3] {
            "" => None,
            v => Some(v.parse().map_err(|_| bad("value", v))?),
        };
        let env = |text: &str| {
            text.parse::<Env>().map_err(|source| TraceError::Env {
                line: line_no,
                source,
            })
        };
        let env_before = env(fields[4])?;
        let env_after = match fields[5] {
            "" => None,
            text => Some(env(text)?),
        };
        let mut reports = Vec::new();
        for item in fields[6].split("; ").filter(|s| !s.is_empty()) {
            let (clause, verdict) = item.split_once('=').ok_or_else(|| bad("report", item))?;
            reports.push(match verdict {
                "ok" => CheckReport::pass(clause),
                _ => {
                    let w = verdict
                        .strip_prefix("FAIL(")
                        .and_then(|w| w.strip_suffix(')'))
                        .ok_or_else(|| bad("report", item))?;
                    CheckReport::fail(clause, w)
                }
            });
        }
        Ok((
            index,
            TraceEvent {
                kind,
                subject,
                env_before,
                env_after,
                value,
                reports,
            },
        ))
    }
}

pub fn write_trace(events: &[TraceEvent]) -> String {
    let mut out = String::new();
    for (i, ev) in events.iter().enumerate() {
        out.push_str(&ev.to_line(i));
        out.push('\n');
    }
    out
}

pub fn parse_trace(text: &str) -> Result<Vec<TraceEvent>, TraceError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| TraceEvent::parse_line(i + 1, l).map(|(_, ev)| ev))
        .collect()
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ReplaySummary {
    pub events: usize,
    pub envs_checked: usize,
    /// Failed clauses with the index of the event they came from.
    pub failures: Vec<(usize, CheckReport)>,
}

impl ReplaySummary {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Re-evaluates a recorded trace against `g`: `wf_env` on every recorded
/// environment, `subenv` across every return, balanced call/return nesting.
pub fn replay(g: &Graph, text: &str) -> Result<ReplaySummary, TraceError> {
    let events = parse_trace(text)?;
    let oracle = Oracle::new(g);
    let mut summary = ReplaySummary {
        events: events.len(),
        ..Default::default()
    };
    let mut open: Vec<(EventKind, Subject)> = Vec::new();
    for (i, ev) in events.iter().enumerate() {
        for env in std::iter::once(&ev.env_before).chain(ev.env_after.as_ref()) {
            summary.envs_checked += 1;
            if env.num.len() != g.vertex_count() {
                summary.failures.push((
                    i,
                    CheckReport::fail("trace.graph", "environment size does not match the graph"),
                ));
                continue;
            }
            summary.failures.extend(
                wf_env_with(&oracle, env)
                    .into_iter()
                    .filter(|r| !r.holds)
                    .map(|r| (i, r)),
            );
        }
        match ev.kind {
            EventKind::CallDfs1 | EventKind::CallDfs => open.push((ev.kind, ev.subject.clone())),
            EventKind::ReturnDfs1 | EventKind::ReturnDfs => {
                let expected = if ev.kind == EventKind::ReturnDfs1 {
                    EventKind::CallDfs1
                } else {
                    EventKind::CallDfs
                };
                match open.pop() {
                    Some((k, s)) if k == expected && s == ev.subject => {}
                    _ => summary.failures.push((
                        i,
                        CheckReport::fail("trace.nesting", format!("unmatched {}", ev.kind)),
                    )),
                }
                match &ev.env_after {
                    Some(after) => {
                        let r = subenv(&ev.env_before, after);
                        if !r.holds {
                            summary.failures.push((i, r));
                        }
                    }
                    None => summary.failures.push((
                        i,
                        CheckReport::fail("trace.nesting", "return without result env"),
                    )),
                }
            }
            EventKind::Assert(_) => {}
        }
    }
    if !open.is_empty() {
        summary.failures.push((
            events.len(),
            CheckReport::fail(
                "trace.nesting",
                format!("{} calls never returned", open.len()),
            ),
        ));
    }
    Ok(summary)
}
