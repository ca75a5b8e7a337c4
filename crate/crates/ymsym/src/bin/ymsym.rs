//! Batch entry point: load or synthesize a run configuration, execute the
//! selected verification suites, and emit the JSON report.
//!
//! Exit codes: 0 when every record passes, 1 on any failed record, 2 on a
//! configuration error.

use std::process::ExitCode;
use ymsym::config::{RunConfig, SuiteKind};
use ymsym::suite::run;

const USAGE: &str = "usage: ymsym [--config PATH] [--suite NAME] [--seed INT] \
[--samples INT] [--out PATH]
  suites: asdym | pullback | contact | super | reduction | all
  YMSYM_THREADS limits the worker pool";

fn fail_usage(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    eprintln!("{USAGE}");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let mut args = std::env::args().skip(1);
    let mut config_path: Option<String> = None;
    let mut suite: Option<String> = None;
    let mut seed: Option<String> = None;
    let mut samples: Option<usize> = None;
    let mut out: Option<String> = None;
    while let Some(arg) = args.next() {
        match arg.as_str() {
            "--config" => config_path = args.next(),
            "--suite" => suite = args.next(),
            "--seed" => seed = args.next(),
            "--samples" => {
                samples = match args.next().map(|v| v.parse::<usize>()) {
                    Some(Ok(v)) => Some(v),
                    _ => return fail_usage("--samples needs an integer"),
                }
            }
            "--out" => out = args.next(),
            "--help" | "-h" => {
                println!("{USAGE}");
                return ExitCode::SUCCESS;
            }
            other => return fail_usage(&format!("unknown argument '{other}'")),
        }
    }
    let seed = match seed.map(|s| s.parse::<u64>()) {
        None => None,
        Some(Ok(v)) => Some(v),
        Some(Err(_)) => return fail_usage("--seed needs an integer"),
    };

    if let Ok(threads) = std::env::var("YMSYM_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }

    let mut config = match &config_path {
        Some(p) => match std::fs::read_to_string(p) {
            Ok(s) => match RunConfig::from_json(&s) {
                Ok(c) => c,
                Err(e) => return fail_usage(&format!("{e}")),
            },
            Err(e) => return fail_usage(&format!("cannot read {p}: {e}")),
        },
        None => RunConfig::default(),
    };
    if let Some(s) = suite {
        config.suite = match s.parse::<SuiteKind>() {
            Ok(k) => k,
            Err(e) => return fail_usage(&format!("{e}")),
        };
    }
    if let Some(s) = seed {
        config.seed = s;
    }
    if let Some(n) = samples {
        config.region.samples = n;
    }

    let report = match run(&config) {
        Ok(r) => r,
        Err(e) => return fail_usage(&format!("{e}")),
    };
    let json = report.to_json();
    match &out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &json) {
                eprintln!("error: cannot write {path}: {e}");
                return ExitCode::from(2);
            }
        }
        None => println!("{json}"),
    }
    for rec in &report.records {
        eprintln!(
            "{} {:<28} max {:.3e} tol {:.1e}",
            if rec.pass { "PASS" } else { "FAIL" },
            rec.check,
            rec.max_residual,
            rec.tolerance
        );
    }
    if report.overall_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
