use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use tarjan_core::checker::{replay, run_checked_with, write_trace, Outcome};
use tarjan_core::fast_scc::bench_linear;
use tarjan_core::io::{emit_condensation, format_sccs, parse_graph, GraphFormat};
use tarjan_core::{
    generate, scc_oracle, sufficient_fuel, tarjan, tarjan_fast, tarjan_fueled, CheckConfig,
    CheckedRun, ChoiceOrder, FailMode, Graph, GraphSpec, Mutation,
};

#[derive(Parser, Debug)]
#[command(
    name = "tarjan",
    version,
    about = "Strongly connected components with runtime-checked contracts"
)]
struct Args {
    /// Graph file (edge list or DIMACS).
    #[arg(long, value_name = "PATH", conflicts_with = "gen")]
    input: Option<PathBuf>,

    /// Generated graph, e.g. `gnp:n=100,p=0.05,seed=42`.
    #[arg(long, value_name = "SPEC")]
    gen: Option<String>,

    /// Input file format.
    #[arg(long, default_value = "auto", value_parser = parse_format)]
    format: GraphFormat,

    #[arg(long, value_enum, default_value_t = Algo::Functional)]
    algo: Algo,

    /// Run with contract checking; comma-separated suites or `all`.
    #[arg(long, value_name = "SUITES", num_args = 0..=1, default_missing_value = "all")]
    checked: Option<String>,

    /// Stop at the first failed clause.
    #[arg(long, requires = "checked")]
    halt: bool,

    /// Root choice order: `min` or `seed:<k>`.
    #[arg(long, default_value = "min", value_parser = parse_order)]
    order: ChoiceOrder,

    #[arg(long, value_enum, default_value_t = Emit::Sccs)]
    emit: Emit,

    /// Recursion budget for the functional algorithm: `auto` or a number.
    #[arg(long, value_parser = parse_fuel)]
    fuel: Option<Fuel>,

    /// Write the payload here instead of standard output.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Re-check a recorded trace against the graph.
    #[arg(long, value_name = "TRACE", conflicts_with_all = ["checked", "emit"])]
    replay: Option<PathBuf>,

    /// Inject a known fault into the functional algorithm (checker testing).
    #[arg(long, value_name = "NAME", requires = "checked")]
    mutate: Option<Mutation>,

    /// Benchmark sizes, strictly increasing.
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "16384,32768,65536,131072"
    )]
    sizes: Vec<usize>,

    /// Expected out-degree of the benchmark graphs G(n, d/n).
    #[arg(long, default_value_t = 8.0)]
    degree: f64,

    /// Timed repetitions per benchmark size; the fastest is reported.
    #[arg(long, default_value_t = 5)]
    reps: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Algo {
    Functional,
    Fast,
    Oracle,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Emit {
    Sccs,
    Condensation,
    Trace,
    Bench,
}

#[derive(Clone, Copy, Debug)]
enum Fuel {
    Auto,
    Fixed(u64),
}

fn parse_format(s: &str) -> Result<GraphFormat, String> {
    s.parse()
}

fn parse_order(s: &str) -> Result<ChoiceOrder, String> {
    match s {
        "min" => Ok(ChoiceOrder::Smallest),
        _ => s
            .strip_prefix("seed:")
            .and_then(|k| k.parse().ok())
            .map(ChoiceOrder::Seeded)
            .ok_or_else(|| format!("expected `min` or `seed:<k>`, got `{s}`")),
    }
}

fn parse_fuel(s: &str) -> Result<Fuel, String> {
    match s {
        "auto" => Ok(Fuel::Auto),
        _ => s
            .parse()
            .map(Fuel::Fixed)
            .map_err(|_| format!("expected `auto` or a number, got `{s}`")),
    }
}

/// Why the run did not succeed.
enum Failure {
    /// Bad input or flags: exit 2.
    Input(String),
    /// A check failed or fuel ran out: exit 1.
    Check(String),
}

fn input(msg: impl ToString) -> Failure {
    Failure::Input(msg.to_string())
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(args: &Args) -> Result<(), Failure> {
    if args.emit == Emit::Bench {
        return bench(args);
    }
    let g = load_graph(args)?;
    if let Some(path) = &args.replay {
        return replay_trace(args, &g, path);
    }

    let checked = args.checked.is_some() || args.emit == Emit::Trace;
    if args.algo != Algo::Functional && (checked || args.fuel.is_some() || args.mutate.is_some()) {
        return Err(input(
            "--checked, --fuel and --emit trace need --algo functional",
        ));
    }
    let fuel = args.fuel.map(|f| match f {
        Fuel::Auto => sufficient_fuel(g.vertex_count()),
        Fuel::Fixed(n) => n,
    });

    let partition = if checked {
        let run = checked_run(args, &g, fuel)?;
        if args.emit == Emit::Trace {
            write_payload(args, &write_trace(&run.events))?;
        }
        report_checked(&run)?;
        run.partition.expect("completed run has a partition")
    } else {
        match args.algo {
            Algo::Functional => match fuel {
                None => tarjan(&g, args.order),
                Some(n) => tarjan_fueled(&g, n, args.order).ok_or_else(|| {
                    Failure::Check(format!("fuel exhausted: budget {n} was not enough"))
                })?,
            },
            Algo::Fast => tarjan_fast(&g),
            Algo::Oracle => scc_oracle(&g),
        }
    };

    match args.emit {
        Emit::Sccs => write_payload(args, &format_sccs(&partition)),
        Emit::Condensation => {
            let text = emit_condensation(&g, &partition)
                .map_err(|e| Failure::Check(format!("condensation: {e}")))?;
            write_payload(args, &text)
        }
        Emit::Trace => Ok(()),
        Emit::Bench => unreachable!("handled above"),
    }
}

fn load_graph(args: &Args) -> Result<Graph, Failure> {
    match (&args.input, &args.gen) {
        (Some(path), None) => {
            let text =
                fs::read_to_string(path).map_err(|e| input(format!("{}: {e}", path.display())))?;
            parse_graph(&text, args.format).map_err(|e| input(format!("{}: {e}", path.display())))
        }
        (None, Some(spec)) => {
            let spec: GraphSpec = spec.parse().map_err(input)?;
            generate(&spec).map_err(input)
        }
        _ => Err(input("exactly one of --input or --gen is required")),
    }
}

fn checked_run(args: &Args, g: &Graph, fuel: Option<u64>) -> Result<CheckedRun, Failure> {
    let mut config = match &args.checked {
        Some(list) => CheckConfig::parse_suites(list).map_err(input)?,
        None => CheckConfig::all(),
    };
    config.fuel = fuel;
    config.record_events = true;
    if args.halt {
        config.fail_mode = FailMode::HaltOnFirst;
    }
    run_checked_with(g, &config, args.order, args.mutate).map_err(input)
}

/// Lists failed clauses with their witnesses on standard error.
fn report_checked(run: &CheckedRun) -> Result<(), Failure> {
    let summary = &run.summary;
    if run.passed() {
        eprintln!(
            "checked: {} clause evaluations, all hold",
            summary.evaluated
        );
        return Ok(());
    }
    const SHOWN: usize = 20;
    let mut lines = Vec::new();
    for (i, ev) in run.events.iter().enumerate() {
        for r in ev.reports.iter().filter(|r| !r.holds) {
            if lines.len() < SHOWN {
                let witness = r.witness.as_deref().unwrap_or("");
                lines.push(format!(
                    "FAIL {} at event {i} ({} {}): {witness}",
                    r.clause, ev.kind, ev.subject
                ));
            }
        }
    }
    if let Some(first) = &summary.first_failure {
        if first.event.is_none() {
            lines.push(format!(
                "FAIL {}: {}",
                first.report.clause,
                first.report.witness.as_deref().unwrap_or("")
            ));
        }
    }
    if summary.failed > lines.len() {
        lines.push(format!("... {} failures in total", summary.failed));
    }
    for (clause, n) in &summary.failures_by_clause {
        lines.push(format!("clause {clause}: {n} failures"));
    }
    match &run.outcome {
        Outcome::FuelExhausted => lines.push("fuel exhausted".into()),
        Outcome::Halted => lines.push("halted at first failure".into()),
        Outcome::Aborted(why) => lines.push(format!("search aborted: {why}")),
        Outcome::Completed => {}
    }
    Err(Failure::Check(lines.join("\n")))
}

fn replay_trace(args: &Args, g: &Graph, path: &PathBuf) -> Result<(), Failure> {
    let text = fs::read_to_string(path).map_err(|e| input(format!("{}: {e}", path.display())))?;
    let summary = replay(g, &text).map_err(|e| input(format!("{}: {e}", path.display())))?;
    let mut out = format!(
        "events {}\nenvironments {}\nfailures {}\n",
        summary.events,
        summary.envs_checked,
        summary.failures.len()
    );
    if !summary.passed() {
        let detail: Vec<String> = summary
            .failures
            .iter()
            .map(|(i, r)| {
                format!(
                    "FAIL {} at event {i}: {}",
                    r.clause,
                    r.witness.as_deref().unwrap_or("")
                )
            })
            .collect();
        write_payload(args, &out)?;
        return Err(Failure::Check(detail.join("\n")));
    }
    out.push_str("ok\n");
    write_payload(args, &out)
}

fn bench(args: &Args) -> Result<(), Failure> {
    if args.degree.is_nan() || args.degree <= 0.0 {
        return Err(input("--degree must be positive"));
    }
    let degree = args.degree;
    let family = |n: usize| {
        let p = if n == 0 {
            0.0
        } else {
            (degree / n as f64).min(1.0)
        };
        generate(&GraphSpec::gnp(n, p, 0)).expect("probability is in range")
    };
    let table = bench_linear(family, &args.sizes, args.reps).map_err(input)?;
    let ratios: Vec<String> = table.ratios().iter().map(|r| format!("{r:.2}")).collect();
    eprintln!("doubling ratios: {}", ratios.join(" "));
    write_payload(args, &table.to_csv())
}

fn write_payload(args: &Args, text: &str) -> Result<(), Failure> {
    match &args.out {
        Some(path) => fs::write(path, text).map_err(|e| input(format!("{}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| input(format!("stdout: {e}")))
        }
    }
}
