//! Library side of the verification harness: configuration, suite
//! execution, and report emission. The `verify` binary is a thin clap
//! wrapper around [`suites::run_suite`].

pub mod config;
pub mod report;
pub mod suites;
