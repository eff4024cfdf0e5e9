//! Checked execution. The functional search runs with an observer that
//! evaluates the contract clauses at their anchor points: preconditions and
//! measures at every call, the in-body assertions at the `dfs1` branch,
//! post-conditions at every return.

mod measure;
mod predicates;
mod trace;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub use measure::{check_measures, colored_num, fuel_bound, Measure};
pub use predicates::{
    check_assertions_dfs1, check_post_dfs, dfs1_postconditions, dfs1_preconditions,
    dfs_postconditions, dfs_preconditions, is_last, num_of_reachable, precedes, xedge_to,
    Dfs1Bindings, PredicateError,
};
pub use trace::{
    parse_trace, replay, write_trace, EventKind, ReplaySummary, Subject, TraceError, TraceEvent,
};

use crate::algorithm::{
    sufficient_fuel, BranchPoint, ChoiceOrder, DfsResult, Halt, Mutation, Observer, Search,
    SearchError,
};
use crate::environment::{wf_env_with, CheckReport, Env};
use crate::graph::{Graph, VertexId, VertexSet};
use crate::oracle::{Oracle, SccPartition};

/// A family of clauses that can be switched on and off.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Suite {
    Preconditions,
    Postconditions,
    Assertions,
    WfEnvEachStep,
    Measures,
    FuelBound,
    CoqPost,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::Preconditions,
        Suite::Postconditions,
        Suite::Assertions,
        Suite::WfEnvEachStep,
        Suite::Measures,
        Suite::FuelBound,
        Suite::CoqPost,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Preconditions => "preconditions",
            Suite::Postconditions => "postconditions",
            Suite::Assertions => "assertions",
            Suite::WfEnvEachStep => "wf_env_each_step",
            Suite::Measures => "measures",
            Suite::FuelBound => "fuel_bound",
            Suite::CoqPost => "coq_post",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error("unknown check suite `{0}`")]
    UnknownSuite(String),
    #[error("no check suite enabled")]
    NoSuites,
}

impl FromStr for Suite {
    type Err = CheckError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| CheckError::UnknownSuite(s.to_owned()))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum FailMode {
    #[default]
    Collect,
    HaltOnFirst,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckConfig {
    pub suites: BTreeSet<Suite>,
    pub fail_mode: FailMode,
    /// Recursion budget. `None` means unbounded, except that the
    /// `fuel_bound` suite runs with [`sufficient_fuel`].
    pub fuel: Option<u64>,
    /// Keep the event list; counts are collected either way.
    pub record_events: bool,
}

impl CheckConfig {
    pub fn all() -> Self {
        Self::with_suites(Suite::ALL)
    }

    pub fn with_suites<I: IntoIterator<Item = Suite>>(suites: I) -> Self {
        CheckConfig {
            suites: suites.into_iter().collect(),
            fail_mode: FailMode::Collect,
            fuel: None,
            record_events: true,
        }
    }

    /// Parses a comma-separated suite list; `all` selects every suite.
    pub fn parse_suites(list: &str) -> Result<Self, CheckError> {
        if list.trim() == "all" {
            return Ok(Self::all());
        }
        let suites = list
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(Suite::from_str)
            .collect::<Result<BTreeSet<_>, _>>()?;
        if suites.is_empty() {
            return Err(CheckError::NoSuites);
        }
        Ok(Self::with_suites(suites))
    }

    pub fn halt_on_first(mut self) -> Self {
        self.fail_mode = FailMode::HaltOnFirst;
        self
    }

    fn has(&self, suite: Suite) -> bool {
        self.suites.contains(&suite)
    }

    fn effective_fuel(&self, g: &Graph) -> Option<u64> {
        self.fuel.or_else(|| {
            self.has(Suite::FuelBound)
                .then(|| sufficient_fuel(g.vertex_count()))
        })
    }
}

impl Default for CheckConfig {
    fn default() -> Self {
        Self::all()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Failure {
    /// Index of the event that carried the report; `None` for failures
    /// raised outside any event.
    pub event: Option<usize>,
    pub report: CheckReport,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Summary {
    pub evaluated: usize,
    pub failed: usize,
    pub evaluated_by_clause: BTreeMap<String, usize>,
    pub failures_by_clause: BTreeMap<String, usize>,
    pub first_failure: Option<Failure>,
}

impl Summary {
    fn record(&mut self, event: Option<usize>, reports: &[CheckReport]) {
        self.evaluated += reports.len();
        for r in reports {
            match self.evaluated_by_clause.get_mut(&r.clause) {
                Some(count) => *count += 1,
                None => {
                    self.evaluated_by_clause.insert(r.clause.clone(), 1);
                }
            }
        }
        for r in reports.iter().filter(|r| !r.holds) {
            self.failed += 1;
            *self.failures_by_clause.entry(r.clause.clone()).or_default() += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(Failure {
                    event,
                    report: r.clone(),
                });
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Completed,
    /// Stopped at the first failure (halt mode).
    Halted,
    FuelExhausted,
    /// The search itself could not continue, e.g. a vertex missing from the
    /// stack at a split.
    Aborted(String),
}

#[derive(Clone, Debug)]
pub struct CheckedRun {
    /// Present when the search completed.
    pub partition: Option<SccPartition>,
    pub events: Vec<TraceEvent>,
    pub summary: Summary,
    pub outcome: Outcome,
}

impl CheckedRun {
    pub fn passed(&self) -> bool {
        self.outcome == Outcome::Completed && self.summary.failed == 0
    }

    /// Names of every clause that failed at least once.
    pub fn failed_clauses(&self) -> impl Iterator<Item = &str> {
        self.summary.failures_by_clause.keys().map(String::as_str)
    }
}

/// Runs `tarjan` with every enabled suite evaluated at its anchor points.
pub fn run_checked(
    g: &Graph,
    config: &CheckConfig,
    order: ChoiceOrder,
) -> Result<CheckedRun, CheckError> {
    run_checked_with(g, config, order, None)
}

/// [`run_checked`] with an optional injected fault.
pub fn run_checked_with(
    g: &Graph,
    config: &CheckConfig,
    order: ChoiceOrder,
    mutation: Option<Mutation>,
) -> Result<CheckedRun, CheckError> {
    if config.suites.is_empty() {
        return Err(CheckError::NoSuites);
    }
    let oracle = Oracle::new(g);
    let mut monitor = Monitor {
        oracle: &oracle,
        config,
        frames: Vec::new(),
        events: Vec::new(),
        summary: Summary::default(),
    };
    let result = Search::new(g)
        .order(order)
        .fuel(config.effective_fuel(g))
        .mutation(mutation)
        .run(&mut monitor);

    let outcome = match result {
        Ok(DfsResult { env, .. }) => {
            let partition = SccPartition::from(&env.sccs);
            if config.has(Suite::Postconditions) {
                let expected = oracle.partition();
                let report = CheckReport::from_witness(
                    "tarjan.post.all_sccs",
                    (partition != expected).then(|| {
                        format!(
                            "result differs from the scc partition ({} vs {} components)",
                            partition.len(),
                            expected.len()
                        )
                    }),
                );
                monitor.attach_to_last(report);
            }
            return Ok(CheckedRun {
                partition: Some(partition),
                events: monitor.events,
                summary: monitor.summary,
                outcome: Outcome::Completed,
            });
        }
        Err(SearchError::Halted) => Outcome::Halted,
        Err(SearchError::FuelExhausted) => {
            monitor.summary.record(
                None,
                &[CheckReport::fail(
                    "fuel.exhausted",
                    "fuel ran out before the search finished",
                )],
            );
            Outcome::FuelExhausted
        }
        Err(SearchError::Env(e)) => {
            monitor
                .summary
                .record(None, &[CheckReport::fail("dfs1.split", e.to_string())]);
            Outcome::Aborted(e.to_string())
        }
    };
    Ok(CheckedRun {
        partition: None,
        events: monitor.events,
        summary: monitor.summary,
        outcome,
    })
}

struct Frame {
    subject: Subject,
    entry: Env,
    measure: Option<Measure>,
}

struct Monitor<'a, 'g> {
    oracle: &'a Oracle<'g>,
    config: &'a CheckConfig,
    frames: Vec<Frame>,
    events: Vec<TraceEvent>,
    summary: Summary,
}

impl Monitor<'_, '_> {
    fn graph(&self) -> &Graph {
        self.oracle.graph()
    }

    fn emit(&mut self, event: TraceEvent) -> Result<(), Halt> {
        let index = self.config.record_events.then_some(self.events.len());
        self.summary.record(index, &event.reports);
        let failed = event.reports.iter().any(|r| !r.holds);
        if self.config.record_events {
            self.events.push(event);
        }
        if failed && self.config.fail_mode == FailMode::HaltOnFirst {
            Err(Halt)
        } else {
            Ok(())
        }
    }

    fn attach_to_last(&mut self, report: CheckReport) {
        let index = self.events.len().checked_sub(1);
        self.summary.record(index, std::slice::from_ref(&report));
        if let Some(last) = self.events.last_mut() {
            last.reports.push(report);
        }
    }

    fn wants_wf_on_entry(&self) -> bool {
        self.config.has(Suite::Preconditions) || self.config.has(Suite::WfEnvEachStep)
    }

    fn wants_wf_on_exit(&self) -> bool {
        self.config.has(Suite::Postconditions)
            || self.config.has(Suite::WfEnvEachStep)
            || self.config.has(Suite::CoqPost)
    }

    /// Measure edge from the enclosing call and `colored_num`.
    fn call_measures(&self, callee: &Measure, e: &Env, reports: &mut Vec<CheckReport>) {
        if let Some(caller) = self.frames.last().and_then(|f| f.measure.as_ref()) {
            reports.extend(check_measures(caller, callee));
        }
        reports.push(colored_num(self.graph(), e));
    }

    fn enter(
        &mut self,
        kind: EventKind,
        subject: Subject,
        e: &Env,
        mut reports: Vec<CheckReport>,
        measure: Option<Measure>,
    ) -> Result<(), Halt> {
        self.frames.push(Frame {
            subject: subject.clone(),
            entry: e.clone(),
            measure,
        });
        let env_before = if self.config.record_events {
            e.clone()
        } else {
            Env::placeholder()
        };
        reports.shrink_to_fit();
        self.emit(TraceEvent {
            kind,
            subject,
            env_before,
            env_after: None,
            value: None,
            reports,
        })
    }

    fn leave(&mut self, kind: EventKind, result: &DfsResult) -> Result<(), Halt> {
        let frame = self.frames.pop().expect("return without a matching call");
        let cfg = self.config;
        let wf = if self.wants_wf_on_exit() {
            wf_env_with(self.oracle, &result.env)
        } else {
            Vec::new()
        };
        let mut reports = Vec::new();
        if cfg.has(Suite::Postconditions) {
            match (&frame.subject, kind) {
                (Subject::Vertex(x), EventKind::ReturnDfs1) => {
                    reports.extend(predicates::dfs1_postconditions_given(
                        self.oracle,
                        *x,
                        &frame.entry,
                        result.value,
                        &result.env,
                        &wf,
                    ))
                }
                _ => reports.extend(predicates::dfs_postconditions_given(
                    &frame.entry,
                    &result.env,
                    &wf,
                )),
            }
        }
        if cfg.has(Suite::WfEnvEachStep) {
            reports.extend(wf.iter().cloned());
        }
        if cfg.has(Suite::CoqPost) {
            let roots = match &frame.subject {
                Subject::Vertex(x) => VertexSet::from([*x]),
                Subject::Roots(r) => r.clone(),
            };
            reports.extend(predicates::post_dfs_given(
                self.oracle,
                &roots,
                &frame.entry,
                &result.env,
                result.value,
                &wf,
            ));
        }
        let (env_before, env_after) = if cfg.record_events {
            (frame.entry, Some(result.env.clone()))
        } else {
            (Env::placeholder(), None)
        };
        self.emit(TraceEvent {
            kind,
            subject: frame.subject,
            env_before,
            env_after,
            value: Some(result.value),
            reports,
        })
    }
}

impl Observer for Monitor<'_, '_> {
    fn enter_dfs1(&mut self, x: VertexId, e: &Env) -> Result<(), Halt> {
        let mut reports = Vec::new();
        let wf = if self.wants_wf_on_entry() {
            wf_env_with(self.oracle, e)
        } else {
            Vec::new()
        };
        if self.config.has(Suite::Preconditions) {
            reports.extend(predicates::dfs1_preconditions_given(self.oracle, x, e, &wf));
        }
        if self.config.has(Suite::WfEnvEachStep) {
            reports.extend(wf);
        }
        let measure = self
            .config
            .has(Suite::Measures)
            .then(|| Measure::dfs1(self.graph(), x, e));
        if let Some(m) = &measure {
            self.call_measures(m, e, &mut reports);
        }
        self.enter(EventKind::CallDfs1, Subject::Vertex(x), e, reports, measure)
    }

    fn enter_dfs(&mut self, roots: &VertexSet, e: &Env, fuel: Option<u64>) -> Result<(), Halt> {
        let mut reports = Vec::new();
        let wf = if self.wants_wf_on_entry() {
            wf_env_with(self.oracle, e)
        } else {
            Vec::new()
        };
        if self.config.has(Suite::Preconditions) {
            reports.extend(predicates::dfs_preconditions_given(
                self.oracle,
                roots,
                e,
                &wf,
            ));
        }
        if self.config.has(Suite::WfEnvEachStep) {
            reports.extend(wf);
        }
        let measure = self
            .config
            .has(Suite::Measures)
            .then(|| Measure::dfs(self.graph(), roots, e));
        if let Some(m) = &measure {
            self.call_measures(m, e, &mut reports);
        }
        if let (true, Some(f)) = (self.config.has(Suite::FuelBound), fuel) {
            reports.push(fuel_bound(self.graph(), e, roots, f));
        }
        self.enter(
            EventKind::CallDfs,
            Subject::Roots(roots.clone()),
            e,
            reports,
            measure,
        )
    }

    fn branch(&mut self, at: &BranchPoint<'_>) -> Result<(), Halt> {
        if !self.config.has(Suite::Assertions) {
            return Ok(());
        }
        let frame = self.frames.last().expect("branch outside dfs1");
        let bindings = Dfs1Bindings {
            x: at.x,
            e: &frame.entry,
            n0: at.n0,
            n1: at.n1,
            branch: &at.branch,
        };
        let reports = check_assertions_dfs1(self.oracle, &bindings);
        let (subject, env_before) = (frame.subject.clone(), frame.entry.clone());
        for report in reports {
            let k = report
                .clause
                .strip_prefix("assert.A")
                .and_then(|k| k.parse().ok())
                .unwrap_or(0);
            self.emit(TraceEvent {
                kind: EventKind::Assert(k),
                subject: subject.clone(),
                env_before: env_before.clone(),
                env_after: None,
                value: Some(at.n1),
                reports: vec![report],
            })?;
        }
        Ok(())
    }

    fn exit_dfs1(&mut self, _x: VertexId, result: &DfsResult) -> Result<(), Halt> {
        self.leave(EventKind::ReturnDfs1, result)
    }

    fn exit_dfs(&mut self, result: &DfsResult) -> Result<(), Halt> {
        self.leave(EventKind::ReturnDfs, result)
    }
}

impl Env {
    /// Empty stand-in used when events are not recorded.
    fn placeholder() -> Env {
        Env {
            black: VertexSet::new(),
            gray: VertexSet::new(),
            stack: Default::default(),
            sccs: Default::default(),
            sn: 0,
            num: Vec::new(),
        }
    }
}
