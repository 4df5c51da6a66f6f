//! Verification report: `{version, config, results}`. The field set is
//! fixed by `docs/report.schema.json`.

use std::io::Write;

use dqm_core::verify::{CheckResult, VerifyConfig};
use dqm_core::{FamilyId, ParamSet};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const REPORT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemRef {
    pub family: FamilyId,
    /// absent for inline parameters
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixture: Option<String>,
    pub params: ParamSet,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportConfig {
    pub suites: Vec<String>,
    pub systems: Vec<SystemRef>,
    #[serde(flatten)]
    pub verify: VerifyConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub version: u32,
    pub config: ReportConfig,
    pub results: Vec<CheckResult>,
}

impl Report {
    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.results.iter().filter(|r| !r.passed)
    }

    pub fn passed(&self) -> bool {
        self.failures().next().is_none()
    }

    pub fn to_json(&self) -> Result<String, CliError> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// 17 significant digits, enough to round-trip any double.
pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_human(report: &Report, out: &mut dyn Write) -> std::io::Result<()> {
    for r in &report.results {
        let (lo, hi) = r.level_range;
        writeln!(
            out,
            "{}  {:<26} {:<38} n={lo}..{hi:<3} residual={:<10.3e} tol={:.0e}{}",
            if r.passed { "PASS" } else { "FAIL" },
            r.family.slug(),
            r.check_id,
            r.max_residual,
            r.tolerance,
            r.note.as_deref().map(|n| format!("  ({n})")).unwrap_or_default(),
        )?;
        if !r.sequence.is_empty() {
            let seq: Vec<String> = r.sequence.iter().map(|v| format!("{v:.4e}")).collect();
            writeln!(out, "      sequence: {}", seq.join(", "))?;
        }
    }
    let failed = report.failures().count();
    writeln!(out, "{} checks, {} passed, {} failed", report.results.len(), report.results.len() - failed, failed)
}

pub fn write_csv(report: &Report, out: &mut dyn Write) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "family",
        "check_id",
        "n_min",
        "n_max",
        "max_residual",
        "tolerance",
        "passed",
        "samples_used",
        "note",
        "sequence",
    ])?;
    for r in &report.results {
        let seq: Vec<String> = r.sequence.iter().map(|&v| fmt17(v)).collect();
        w.write_record([
            r.family.slug().to_string(),
            r.check_id.clone(),
            r.level_range.0.to_string(),
            r.level_range.1.to_string(),
            fmt17(r.max_residual),
            fmt17(r.tolerance),
            r.passed.to_string(),
            r.samples_used.to_string(),
            r.note.clone().unwrap_or_default(),
            seq.join(";"),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for v in [0.1, 1.0 / 3.0, 2.0f64.sqrt() * 1e-300, f64::MAX, -7.25e-12] {
            let s = fmt17(v);
            assert_eq!(s.parse::<f64>().unwrap(), v);
            let mantissa = s.split('e').next().unwrap().trim_start_matches('-');
            assert_eq!(mantissa.chars().filter(|c| c.is_ascii_digit()).count(), 17);
        }
    }
}
