use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn tarjan(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tarjan"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

const TWO_CYCLE_TAIL: &str = "# 0 <-> 1 -> 2\nn 3\n0 1\n1 0\n1 2\n";

#[test]
fn sccs_of_a_chain() {
    let dir = TempDir::new().unwrap();
    let chain = write(&dir, "chain.txt", "n 4\n3 2\n2 1\n1 0\n");
    let o = tarjan(&["--input", &chain, "--emit", "sccs"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "0\n1\n2\n3\n");
}

#[test]
fn every_algorithm_prints_the_same_bytes() {
    let spec = "gnp:n=40,p=0.06,seed=3";
    let runs: Vec<String> = ["functional", "fast", "oracle"]
        .iter()
        .map(|a| {
            let o = tarjan(&["--gen", spec, "--algo", a]);
            assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
            stdout(&o)
        })
        .collect();
    assert_eq!(runs[0], runs[1]);
    assert_eq!(runs[1], runs[2]);
    assert_eq!(
        stdout(&tarjan(&["--gen", spec, "--order", "seed:9"])),
        runs[0]
    );
}

#[test]
fn checked_generated_graph_passes() {
    let o = tarjan(&[
        "--gen",
        "gnp:n=6,p=0.4,seed=7",
        "--algo",
        "functional",
        "--checked",
        "all",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stderr(&o).contains("all hold"));
}

#[test]
fn checked_with_suite_list() {
    let o = tarjan(&[
        "--gen",
        "gnp:n=8,p=0.3,seed=1",
        "--checked",
        "measures,fuel_bound",
        "--fuel",
        "auto",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = tarjan(&["--gen", "gnp:n=8,p=0.3,seed=1", "--checked", "nonsense"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn condensation_of_two_cycle_with_tail() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "g.txt", TWO_CYCLE_TAIL);
    let o = tarjan(&[
        "--input",
        &g,
        "--algo",
        "functional",
        "--emit",
        "condensation",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text, "C0: 0 1\nC2: 2\nC0 -> C2\n");
    assert_eq!(text.lines().filter(|l| l.contains("->")).count(), 1);
}

#[test]
fn dimacs_input() {
    let dir = TempDir::new().unwrap();
    let g = write(
        &dir,
        "g.dimacs",
        "c ring\np edge 3 3\na 1 2\na 2 3\na 3 1\n",
    );
    let o = tarjan(&["--input", &g, "--format", "dimacs"]);
    assert_eq!(stdout(&o), "0 1 2\n");
    let bad = write(&dir, "bad.dimacs", "p edge 3 2\na 1 2\n");
    assert_eq!(tarjan(&["--input", &bad]).status.code(), Some(2));
}

#[test]
fn input_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    let garbage = write(&dir, "g.txt", "this is not a graph\n");
    assert_eq!(tarjan(&["--input", &garbage]).status.code(), Some(2));
    let out_of_range = write(&dir, "r.txt", "n 2\n0 5\n");
    assert_eq!(tarjan(&["--input", &out_of_range]).status.code(), Some(2));
    assert_eq!(
        tarjan(&["--input", "/definitely/not/here"]).status.code(),
        Some(2)
    );
    assert_eq!(tarjan(&["--gen", "gnp:n=4,p=1.5"]).status.code(), Some(2));
    assert_eq!(tarjan(&[]).status.code(), Some(2));
    assert_eq!(
        tarjan(&["--gen", "empty:n=2", "--order", "random"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        tarjan(&["--gen", "empty:n=2", "--algo", "fast", "--checked"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn fuel_exhaustion_exits_1() {
    let o = tarjan(&["--gen", "cycle_chain:n=6,k=3", "--fuel", "3"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("fuel"));
    let o = tarjan(&["--gen", "cycle_chain:n=6,k=3", "--fuel", "auto"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "0 1\n2 3\n4 5\n");
}

#[test]
fn injected_fault_names_the_clause() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "g.txt", TWO_CYCLE_TAIL);
    let o = tarjan(&["--input", &g, "--checked", "--mutate", "skip_set_infty"]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("FAIL wf_num"), "{err}");
    let o = tarjan(&[
        "--input",
        &g,
        "--checked",
        "--halt",
        "--mutate",
        "wrong_min",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("halted"));
}

#[test]
fn trace_round_trip_through_replay() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "g.txt", TWO_CYCLE_TAIL);
    let trace = dir.path().join("t.tsv");
    let o = tarjan(&[
        "--input",
        &g,
        "--emit",
        "trace",
        "--out",
        trace.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = fs::read_to_string(&trace).unwrap();
    assert!(text
        .lines()
        .next()
        .unwrap()
        .starts_with("0\tcall_dfs\t{0 1 2}\t"));
    assert!(text.contains("inf"));

    let o = tarjan(&["--input", &g, "--replay", trace.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).ends_with("ok\n"));

    // Same trace against a different graph breaks the recorded invariants.
    let other = write(&dir, "h.txt", "n 3\n0 1\n1 2\n");
    let o = tarjan(&["--input", &other, "--replay", trace.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn out_file_receives_payload() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("sccs.txt");
    let o = tarjan(&[
        "--gen",
        "cycle_chain:n=4,k=2",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    assert_eq!(fs::read_to_string(Path::new(&out)).unwrap(), "0 1\n2 3\n");
}

#[test]
fn bench_table() {
    let o = tarjan(&["--emit", "bench", "--sizes", "500,1000,2000", "--reps", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "size,edges,millis");
    assert_eq!(lines.len(), 4);
    assert!(lines[1].starts_with("500,"));
    assert_eq!(
        tarjan(&["--emit", "bench", "--sizes", "500"]).status.code(),
        Some(2)
    );
    assert_eq!(
        tarjan(&["--emit", "bench", "--sizes", "500,400,800"])
            .status
            .code(),
        Some(2)
    );
}
