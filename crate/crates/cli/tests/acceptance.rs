//! Acceptance suite: every criterion runs at its stated tolerance and
//! prints one pass/fail line. Each criterion maps onto one named suite;
//! the group suite carries the first two criteria (structure and
//! derivatives), timed separately through its runtime records.

use std::sync::OnceLock;

use hyplane_cli::config::{ExperimentConfig, SuiteKind};
use hyplane_cli::report::SuiteReport;
use hyplane_cli::suites::run_suite;

fn run_cached(suite: SuiteKind, slot: &'static OnceLock<SuiteReport>) -> &'static SuiteReport {
    slot.get_or_init(|| {
        let mut cfg = ExperimentConfig::for_suite(suite);
        cfg.seed = 20260810;
        cfg.output_dir = std::env::temp_dir().join(format!("hyplane_acceptance_{}", suite.name()));
        run_suite(&cfg)
    })
}

fn assert_records(criterion: &str, report: &SuiteReport, names: Option<&[&str]>) {
    let selected: Vec<_> = report
        .records
        .iter()
        .filter(|r| names.map_or(true, |ns| ns.iter().any(|n| r.name.starts_with(n))))
        .collect();
    assert!(
        !selected.is_empty(),
        "criterion {criterion}: no records matched"
    );
    let all_pass = selected.iter().all(|r| r.pass);
    println!(
        "criterion {criterion}: {} ({} checks)",
        if all_pass { "PASS" } else { "FAIL" },
        selected.len()
    );
    for r in &selected {
        println!(
            "    {:<44} measured {:>14.6e}  threshold {:>12.4e}  {}",
            r.name,
            r.measured,
            r.threshold,
            if r.pass { "PASS" } else { "FAIL" }
        );
    }
    assert!(all_pass, "criterion {criterion} failed");
}

static GROUP: OnceLock<SuiteReport> = OnceLock::new();

#[test]
fn criterion_1_group_suite() {
    let report = run_cached(SuiteKind::Group, &GROUP);
    assert_records(
        "1 (group structure)",
        report,
        Some(&[
            "iwasawa_roundtrip_max",
            "phi_action_law_max",
            "a_splitting_max",
            "explicit_a_formula_max",
            "runtime_group_block_seconds",
        ]),
    );
}

#[test]
fn criterion_2_derivative_suite() {
    let report = run_cached(SuiteKind::Group, &GROUP);
    assert_records(
        "2 (derivatives)",
        report,
        Some(&[
            "a_derivatives_fd_max",
            "grad_k_origin_max",
            "uniformization_sigma_min",
            "uniform_boundedness_sigma",
            "runtime_derivative_block_seconds",
        ]),
    );
}

#[test]
fn criterion_3_geometry_suite() {
    static SLOT: OnceLock<SuiteReport> = OnceLock::new();
    let report = run_cached(SuiteKind::Geometry, &SLOT);
    assert_records("3 (geometry)", report, None);
}

#[test]
fn criterion_4_spherical_suite() {
    static SLOT: OnceLock<SuiteReport> = OnceLock::new();
    let report = run_cached(SuiteKind::Spherical, &SLOT);
    assert_records("4 (spherical)", report, None);
}

#[test]
fn criterion_5_transform_suite() {
    static SLOT: OnceLock<SuiteReport> = OnceLock::new();
    let report = run_cached(SuiteKind::Transforms, &SLOT);
    assert_records("5 (transforms)", report, None);
}

#[test]
fn criterion_6_decay_j_suite() {
    static SLOT: OnceLock<SuiteReport> = OnceLock::new();
    let report = run_cached(SuiteKind::DecayJ, &SLOT);
    assert_records("6 (decay of J)", report, None);
}

#[test]
fn criterion_7_split_i_suite() {
    static SLOT: OnceLock<SuiteReport> = OnceLock::new();
    let report = run_cached(SuiteKind::SplitI, &SLOT);
    assert_records(
        "7 (split of I)",
        report,
        Some(&[
            "split_additivity_beta",
            "i1_constant_over_beta",
            "i2_abs_beta16",
            "i2_qmc_se_fraction",
            "i_kernel_support_vanishing",
            "runtime_seconds",
        ]),
    );
}

#[test]
fn criterion_8_hecke_suite() {
    static SLOT: OnceLock<SuiteReport> = OnceLock::new();
    let report = run_cached(SuiteKind::Hecke, &SLOT);
    assert_records("8 (Hecke algebra)", report, None);
}

#[test]
fn criterion_9_phase_certificate_suite() {
    static SLOT: OnceLock<SuiteReport> = OnceLock::new();
    let report = run_cached(SuiteKind::DecayI, &SLOT);
    assert_records("9 (phase certificates)", report, None);
}
