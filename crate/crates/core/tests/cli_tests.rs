use std::process::Command;

use clap::Parser;
use siegel::cli::{execute, run_report, Cli, Task};
use siegel::report::{Cell, Format, RunConfig};

const BIN: &str = env!("CARGO_BIN_EXE_siegel");

fn cli(args: &[&str]) -> Cli {
    Cli::try_parse_from(std::iter::once("siegel").chain(args.iter().copied())).unwrap()
}

fn status(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(BIN).args(args).output().unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn config(symbol: &str) -> RunConfig {
    let mut cfg = RunConfig::new(1);
    cfg.node_count = 800;
    cfg.symbol = Some(symbol.into());
    cfg
}

#[test]
fn report_body_is_deterministic() {
    for task in [Task::Berezin, Task::Mo, Task::BmoScan, Task::Bloch] {
        let id = if task == Task::Bloch { "log-kernel" } else { "beta-dist" };
        let a = run_report(&config(id), task).unwrap();
        let b = run_report(&config(id), task).unwrap();
        assert_eq!(a.render_body(), b.render_body(), "{task:?}");
        assert_eq!(a.render_with_time(7), b.render_with_time(7));
    }
}

#[test]
fn every_row_carries_a_citation() {
    for task in [Task::Berezin, Task::Mo, Task::BmoScan, Task::Bloch, Task::Decay] {
        let rep = run_report(&config("log-kernel"), task).unwrap();
        assert!(!rep.rows.is_empty());
        for r in &rep.rows {
            match r.get("citation") {
                Some(Cell::Text(s)) => assert!(!s.is_empty()),
                other => panic!("{task:?} row without citation: {other:?}"),
            }
        }
    }
}

#[test]
fn csv_has_header_and_columns() {
    let mut cfg = config("bump");
    cfg.format = Format::Csv;
    let rep = run_report(&cfg, Task::Berezin).unwrap();
    let text = rep.render_with_time(0);
    assert!(text.lines().any(|l| l == "# command: report berezin"));
    assert!(text.lines().any(|l| l.starts_with("# corpus_sha256: ")));
    let rendered = rep.render_body();
    let body: Vec<&str> = rendered.lines().collect();
    assert!(body[0].split(',').any(|c| c == "value_re"));
    assert_eq!(body.len(), rep.rows.len() + 1);
}

#[test]
fn configuration_errors_exit_with_two() {
    let cases: &[&[&str]] = &[
        &["report", "berezin", "--symbol", "bump", "--nodes", "10"],
        &["report", "berezin", "--symbol", "no-such-symbol"],
        &["report", "bloch", "--symbol", "beta-dist"],
        &["report", "berezin"],
        &["report", "mo", "--symbol", "coord", "--param", "k=2", "--n", "1"],
        &["report", "berezin", "--symbol", "bump", "--param", "radius=1", "--param", "radius=2"],
        &["report", "mo", "--symbol", "bump", "--radius", "0"],
    ];
    for args in cases {
        let out = execute(&cli(args));
        assert_eq!(out.code, 2, "{args:?}: {:?}", out.message);
        assert!(out.report.is_none());
    }
}

#[test]
fn binary_exit_codes() {
    let (code, _, _) = status(&["report", "no-such-task", "--symbol", "bump"]);
    assert_eq!(code, 2);
    let (code, _, err) = status(&["report", "berezin", "--symbol", "bump", "--nodes", "10"]);
    assert_eq!(code, 2);
    assert!(err.contains("error"));
    let (code, out, _) = status(&["report", "berezin", "--symbol", "bump", "--nodes", "400"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("{\"header\":"));
}

#[test]
fn fault_injection_fails_gram_certification() {
    let (code, out, _) = status(&["verify", "--fault-injection", "--degree-cap", "4", "--nodes", "2000"]);
    assert_eq!(code, 1);
    let failing: Vec<&str> = out.lines().filter(|l| l.contains("\"status\":\"FAIL\"")).collect();
    assert!(failing.iter().any(|l| l.contains("gram certification")), "{out}");
}

#[test]
fn output_file_is_written() {
    let path = std::env::temp_dir().join(format!("siegel-cli-{}.jsonl", std::process::id()));
    let p = path.to_str().unwrap();
    let (code, out, _) = status(&["report", "bloch", "--symbol", "log-kernel", "--out", p]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).unwrap();
    assert!(text.lines().count() > 1);
}

#[test]
fn radius_flag_reaches_rows_and_header() {
    let out = execute(&cli(&["report", "mo", "--symbol", "beta-dist", "--radius", "0.5", "--nodes", "400"]));
    assert_eq!(out.code, 0);
    let rep = out.report.unwrap();
    assert_eq!(rep.config.radius, 0.5);
    assert!(rep.rows.iter().all(|r| r.get("radius") == Some(&Cell::Real(0.5))));
    assert!(rep.render_with_time(0).contains("\"radius\":5.0000000000000000e-1"));
}
