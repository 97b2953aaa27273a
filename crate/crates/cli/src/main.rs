//! `verify <suite> --config <file> [--seed N] [--threads N] [--out DIR]`
//!
//! Runs one verification suite, writes its CSV/JSON reports, and exits
//! with status 0 exactly when every check passed.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use hyplane_cli::config::{ExperimentConfig, SuiteKind};
use hyplane_cli::report::{emit_report, ReportFormat};
use hyplane_cli::suites::run_suite;

#[derive(Parser, Debug)]
#[command(name = "verify", about = "Run a named verification suite")]
struct Args {
    /// Suite to run: group, geometry, spherical, transforms, decay_j,
    /// decay_i, split_i, or hecke
    suite: String,

    /// JSON configuration file; defaults are used when omitted
    #[arg(long)]
    config: Option<PathBuf>,

    /// Override the random seed
    #[arg(long)]
    seed: Option<u64>,

    /// Worker threads (defaults to the number of physical cores)
    #[arg(long)]
    threads: Option<usize>,

    /// Output directory for reports and sweep artifacts
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let suite = match SuiteKind::parse(&args.suite) {
        Some(s) => s,
        None => {
            eprintln!("unknown suite '{}'", args.suite);
            return ExitCode::from(2);
        }
    };
    let mut cfg = match &args.config {
        Some(path) => {
            let text = match std::fs::read_to_string(path) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("cannot read {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            };
            match ExperimentConfig::from_json(&text) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("{e}");
                    return ExitCode::from(2);
                }
            }
        }
        None => ExperimentConfig::for_suite(suite),
    };
    cfg.suite = suite;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(out) = args.out {
        cfg.output_dir = out;
    }
    if let Err(e) = cfg.validate() {
        eprintln!("{e}");
        return ExitCode::from(2);
    }

    let threads = args.threads.unwrap_or_else(num_threads_default);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("thread pool");

    if cfg.non_default_thresholds() {
        eprintln!("==============================================");
        eprintln!("  WARNING: NON-DEFAULT THRESHOLDS IN EFFECT");
        eprintln!("==============================================");
    }

    let report = pool.install(|| run_suite(&cfg));

    for r in &report.records {
        println!(
            "{:<44} measured {:>14.6e}  threshold {:>12.4e}  {}",
            r.name,
            r.measured,
            r.threshold,
            if r.pass { "PASS" } else { "FAIL" }
        );
    }
    println!(
        "suite {}: {} ({} checks, {:.1} s)",
        report.suite,
        if report.overall_pass { "PASS" } else { "FAIL" },
        report.records.len(),
        report.runtime_seconds
    );

    match emit_report(
        &report,
        &cfg.output_dir,
        &[ReportFormat::Csv, ReportFormat::Json],
    ) {
        Ok(paths) => {
            for p in paths {
                println!("wrote {}", p.display());
            }
        }
        Err(e) => {
            eprintln!("could not write reports: {e}");
            return ExitCode::from(3);
        }
    }

    if report.overall_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn num_threads_default() -> usize {
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
}
