//! Experiment reports: every metric stores the empirical value, the
//! analytic reference, the standard error, and the decision rule, so any
//! pass/fail flag can be recomputed offline from the stored fields alone.

use serde::{Deserialize, Serialize};

use super::{ExperimentConfig, ExperimentKind};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Decision rule attached to a metric.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Criterion {
    /// `|empirical - analytic| <= tolerance * std_error`
    TwoSidedSigma,
    /// `empirical <= analytic + tolerance * std_error`
    UpperSigma,
    /// `empirical >= analytic - tolerance * std_error`
    LowerSigma,
    /// `|empirical - analytic| <= tolerance`
    Absolute,
    /// `|empirical - analytic| <= tolerance * |analytic|`
    Relative,
    /// `empirical <= analytic`
    Below,
    /// `empirical == analytic`
    Exact,
}

/// One checked quantity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metric {
    pub name: String,
    pub empirical: f64,
    pub analytic: f64,
    pub std_error: f64,
    pub tolerance: f64,
    pub criterion: Criterion,
    pub pass: bool,
}

impl Metric {
    fn build(
        name: impl Into<String>,
        empirical: f64,
        analytic: f64,
        std_error: f64,
        tolerance: f64,
        criterion: Criterion,
    ) -> Self {
        let pass = match criterion {
            Criterion::TwoSidedSigma => (empirical - analytic).abs() <= tolerance * std_error,
            Criterion::UpperSigma => empirical <= analytic + tolerance * std_error,
            Criterion::LowerSigma => empirical >= analytic - tolerance * std_error,
            Criterion::Absolute => (empirical - analytic).abs() <= tolerance,
            Criterion::Relative => (empirical - analytic).abs() <= tolerance * analytic.abs(),
            Criterion::Below => empirical <= analytic,
            Criterion::Exact => empirical == analytic,
        };
        Self {
            name: name.into(),
            empirical,
            analytic,
            std_error,
            tolerance,
            criterion,
            pass,
        }
    }

    pub fn two_sided(name: impl Into<String>, empirical: f64, analytic: f64, se: f64) -> Self {
        Self::build(name, empirical, analytic, se, 3.0, Criterion::TwoSidedSigma)
    }

    pub fn upper(name: impl Into<String>, empirical: f64, analytic: f64, se: f64) -> Self {
        Self::build(name, empirical, analytic, se, 3.0, Criterion::UpperSigma)
    }

    pub fn lower(name: impl Into<String>, empirical: f64, analytic: f64, se: f64) -> Self {
        Self::build(name, empirical, analytic, se, 3.0, Criterion::LowerSigma)
    }

    pub fn absolute(name: impl Into<String>, empirical: f64, analytic: f64, tol: f64) -> Self {
        Self::build(name, empirical, analytic, 0.0, tol, Criterion::Absolute)
    }

    pub fn relative(name: impl Into<String>, empirical: f64, analytic: f64, tol: f64) -> Self {
        Self::build(name, empirical, analytic, 0.0, tol, Criterion::Relative)
    }

    pub fn below(name: impl Into<String>, empirical: f64, analytic: f64) -> Self {
        Self::build(name, empirical, analytic, 0.0, 0.0, Criterion::Below)
    }

    pub fn exact(name: impl Into<String>, empirical: f64, analytic: f64) -> Self {
        Self::build(name, empirical, analytic, 0.0, 0.0, Criterion::Exact)
    }
}

/// The statistics-relevant configuration echoed into the report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub k: usize,
    pub n: u32,
    pub trials: usize,
    pub master_seed: u64,
    pub alpha: f64,
}

impl From<&ExperimentConfig> for ConfigEcho {
    fn from(config: &ExperimentConfig) -> Self {
        Self {
            k: config.k,
            n: config.n,
            trials: config.trials,
            master_seed: config.master_seed,
            alpha: config.alpha,
        }
    }
}

/// The deterministic part of a report: identical configs serialize to
/// byte-identical bodies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportBody {
    pub schema_version: u32,
    pub experiment: ExperimentKind,
    pub config: ConfigEcho,
    pub metrics: Vec<Metric>,
    pub pass: bool,
}

/// A finished experiment: the deterministic body plus wall time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub body: ReportBody,
    pub wall_time_ms: f64,
}

impl ExperimentReport {
    pub fn pass(&self) -> bool {
        self.body.pass
    }

    /// Full document, pretty-printed.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }

    /// The deterministic body alone, for byte comparison across runs.
    pub fn body_json(&self) -> String {
        serde_json::to_string_pretty(&self.body).expect("report serialization cannot fail")
    }

    /// CSV rendering: one row per metric, wall time excluded.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("name,empirical,analytic,std_error,tolerance,criterion,pass\n");
        for m in &self.body.metrics {
            let criterion = serde_json::to_string(&m.criterion)
                .expect("criterion serialization cannot fail")
                .trim_matches('"')
                .to_string();
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                m.name, m.empirical, m.analytic, m.std_error, m.tolerance, criterion, m.pass
            ));
        }
        out.push_str(&format!("overall,,,,,,{}\n", self.body.pass));
        out
    }
}
