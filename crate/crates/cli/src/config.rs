//! Experiment configuration: a single JSON document with fail-closed
//! parsing (unknown keys are rejected) and field-level validation.
//! Threshold defaults equal the acceptance numbers; overriding any of them
//! is flagged so reports can carry a prominent banner.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SuiteKind {
    Group,
    Geometry,
    Spherical,
    Transforms,
    DecayJ,
    DecayI,
    SplitI,
    Hecke,
}

impl SuiteKind {
    pub fn name(&self) -> &'static str {
        match self {
            SuiteKind::Group => "group",
            SuiteKind::Geometry => "geometry",
            SuiteKind::Spherical => "spherical",
            SuiteKind::Transforms => "transforms",
            SuiteKind::DecayJ => "decay_j",
            SuiteKind::DecayI => "decay_i",
            SuiteKind::SplitI => "split_i",
            SuiteKind::Hecke => "hecke",
        }
    }

    pub fn parse(s: &str) -> Option<SuiteKind> {
        Some(match s {
            "group" => SuiteKind::Group,
            "geometry" => SuiteKind::Geometry,
            "spherical" => SuiteKind::Spherical,
            "transforms" => SuiteKind::Transforms,
            "decay_j" => SuiteKind::DecayJ,
            "decay_i" => SuiteKind::DecayI,
            "split_i" => SuiteKind::SplitI,
            "hecke" => SuiteKind::Hecke,
            _ => return None,
        })
    }
}

/// Quadrature and sampling orders.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct QuadratureOrders {
    pub qmc_points: usize,
    pub qmc_shifts: usize,
    pub gauss_u: usize,
    pub gauss_v: usize,
    pub sample_large: usize,
    pub sample_small: usize,
}

impl Default for QuadratureOrders {
    fn default() -> Self {
        QuadratureOrders {
            qmc_points: 4096,
            qmc_shifts: 8,
            gauss_u: 64,
            gauss_v: 24,
            sample_large: 10_000,
            sample_small: 1_000,
        }
    }
}

/// Pass thresholds; the defaults are the acceptance numbers.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct Thresholds {
    pub iwasawa_roundtrip: f64,
    pub action_law: f64,
    pub a_splitting: f64,
    pub explicit_a: f64,
    pub derivative_fd: f64,
    pub dist_consistency: f64,
    pub kn_derivative_k_max: f64,
    pub phi_origin: f64,
    pub backend_agreement: f64,
    pub phi_slope: f64,
    pub phi_slope_tol: f64,
    pub plancherel_band: f64,
    pub inversion_residual: f64,
    pub hc_roundtrip_rel: f64,
    pub k1hat_cross_ratio: f64,
    pub j_slope_max: f64,
    pub j_abs_at_top: f64,
    pub j_control_ratio: f64,
    pub i2_abs: f64,
    pub j2_abs: f64,
    pub se_fraction: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            iwasawa_roundtrip: 1e-9,
            action_law: 1e-9,
            a_splitting: 1e-9,
            explicit_a: 1e-10,
            derivative_fd: 1e-6,
            dist_consistency: 1e-10,
            kn_derivative_k_max: 10.0,
            phi_origin: 1e-10,
            backend_agreement: 1e-6,
            phi_slope: -1.5,
            phi_slope_tol: 0.15,
            plancherel_band: 4.0,
            inversion_residual: 1e-3,
            hc_roundtrip_rel: 1e-3,
            k1hat_cross_ratio: 1e-4,
            j_slope_max: -3.0,
            j_abs_at_top: 1e-5,
            j_control_ratio: 1e3,
            i2_abs: 1e-4,
            j2_abs: 1e-4,
            se_fraction: 0.05,
        }
    }
}

fn default_lambda_grid() -> Vec<f64> {
    vec![40.0]
}
fn default_beta() -> f64 {
    10.0
}
fn default_eps0() -> f64 {
    0.1
}
fn default_s_grid() -> Vec<f64> {
    vec![50.0, 100.0, 200.0]
}
fn default_q_list() -> Vec<u32> {
    vec![2, 3, 5]
}
fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub suite: SuiteKind,
    #[serde(default = "default_lambda_grid")]
    pub lambda_grid: Vec<f64>,
    #[serde(default = "default_beta")]
    pub beta: f64,
    #[serde(default = "default_eps0")]
    pub eps0: f64,
    #[serde(default = "default_s_grid")]
    pub s_grid: Vec<f64>,
    #[serde(default = "default_q_list")]
    pub q_list: Vec<u32>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub quadrature: QuadratureOrders,
    #[serde(default)]
    pub thresholds: Thresholds,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
}

impl ExperimentConfig {
    pub fn for_suite(suite: SuiteKind) -> Self {
        ExperimentConfig {
            suite,
            lambda_grid: default_lambda_grid(),
            beta: default_beta(),
            eps0: default_eps0(),
            s_grid: default_s_grid(),
            q_list: default_q_list(),
            seed: 0,
            quadrature: QuadratureOrders::default(),
            thresholds: Thresholds::default(),
            output_dir: default_output_dir(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| ConfigError {
            problems: vec![format!("parse: {e}")],
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn non_default_thresholds(&self) -> bool {
        self.thresholds != Thresholds::default()
    }

    /// Field-level validation; collects every problem before failing.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let mut problems = Vec::new();
        let increasing = |v: &[f64]| v.windows(2).all(|w| w[1] > w[0]);
        if self.lambda_grid.is_empty() {
            problems.push("lambda_grid: must be nonempty".into());
        } else if !increasing(&self.lambda_grid) {
            problems.push("lambda_grid: must be strictly increasing".into());
        }
        if self.s_grid.is_empty() {
            problems.push("s_grid: must be nonempty".into());
        } else if !increasing(&self.s_grid) {
            problems.push("s_grid: must be strictly increasing".into());
        }
        if self.q_list.is_empty() {
            problems.push("q_list: must be nonempty".into());
        }
        if !(self.eps0 > 0.0 && self.eps0 < 0.125) {
            problems.push(format!("eps0: {} outside (0, 1/8)", self.eps0));
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            problems.push("beta: must be positive and finite".into());
        } else {
            // desk surrogate of the window constraint on beta relative to
            // every lambda in the grid, with margin exponent 1e-2
            for &lam in &self.lambda_grid {
                if lam <= 1.0 {
                    problems.push(format!("lambda_grid: {lam} must exceed 1"));
                    continue;
                }
                let lo = lam.powf(0.01);
                let hi = lam.powf(0.99);
                if matches!(self.suite, SuiteKind::SplitI | SuiteKind::Transforms)
                    && !(self.beta >= lo && self.beta <= hi)
                {
                    problems.push(format!(
                        "beta: {} outside [lambda^0.01, lambda^0.99] = [{lo:.3}, {hi:.3}] for lambda = {lam}",
                        self.beta
                    ));
                }
            }
        }
        if self.quadrature.qmc_points == 0 || self.quadrature.qmc_shifts == 0 {
            problems.push("quadrature: qmc sampling must be nonzero".into());
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(ConfigError { problems })
        }
    }
}

/// Validation failure with one message per offending field.
#[derive(Debug)]
pub struct ConfigError {
    pub problems: Vec<String>,
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "invalid configuration:")?;
        for p in &self.problems {
            writeln!(f, "  - {p}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigError {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_round_trips() {
        let cfg = ExperimentConfig::for_suite(SuiteKind::Hecke);
        let text = serde_json::to_string(&cfg).unwrap();
        let back = ExperimentConfig::from_json(&text).unwrap();
        assert_eq!(back.suite, SuiteKind::Hecke);
        assert!(!back.non_default_thresholds());
    }

    #[test]
    fn rejects_unknown_keys() {
        let text = r#"{"suite": "hecke", "not_a_field": 3}"#;
        assert!(ExperimentConfig::from_json(text).is_err());
    }

    #[test]
    fn rejects_empty_lambda_grid() {
        let text = r#"{"suite": "group", "lambda_grid": []}"#;
        let err = ExperimentConfig::from_json(text).unwrap_err();
        assert!(err.problems.iter().any(|p| p.contains("lambda_grid")));
    }

    #[test]
    fn rejects_bad_eps0() {
        let text = r#"{"suite": "group", "eps0": 0.2}"#;
        assert!(ExperimentConfig::from_json(text).is_err());
    }

    #[test]
    fn flags_non_default_thresholds() {
        let text = r#"{"suite": "group", "thresholds": {"iwasawa_roundtrip": 1e-6}}"#;
        let cfg = ExperimentConfig::from_json(text).unwrap();
        assert!(cfg.non_default_thresholds());
    }
}
