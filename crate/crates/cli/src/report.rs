//! Residual reports: records, summary, JSON and CSV export.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::{CliError, Result};

/// Rounds to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn of(residual: f64, tolerance: f64) -> Self {
        if biharm_core::tolerance::passes(residual, tolerance) {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub check_id: String,
    pub point_index: usize,
    pub point: Vec<f64>,
    pub residual: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
}

impl Record {
    /// Non-finite residuals are stored as `f64::MAX` so the report stays
    /// valid JSON; they always fail.
    pub fn new(check_id: impl Into<String>, point_index: usize, point: &[f64], residual: f64, tolerance: f64) -> Self {
        let residual = if residual.is_finite() { round12(residual) } else { f64::MAX };
        let tolerance = round12(tolerance);
        Self {
            check_id: check_id.into(),
            point_index,
            point: point.iter().copied().map(round12).collect(),
            residual,
            tolerance,
            verdict: Verdict::of(residual, tolerance),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckSummary {
    pub passed: usize,
    pub failed: usize,
    pub max_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub passed: usize,
    pub failed: usize,
    pub checks: BTreeMap<String, CheckSummary>,
}

impl Summary {
    pub fn from_records(records: &[Record]) -> Self {
        let mut checks: BTreeMap<String, CheckSummary> = BTreeMap::new();
        for r in records {
            let e = checks.entry(r.check_id.clone()).or_insert(CheckSummary {
                passed: 0,
                failed: 0,
                max_residual: 0.0,
            });
            match r.verdict {
                Verdict::Pass => e.passed += 1,
                Verdict::Fail => e.failed += 1,
            }
            if r.residual > e.max_residual {
                e.max_residual = r.residual;
            }
        }
        Self {
            passed: checks.values().map(|c| c.passed).sum(),
            failed: checks.values().map(|c| c.failed).sum(),
            checks,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub command: String,
    pub config: RunConfig,
    pub timestamp: String,
    pub versions: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Roots {
    /// Proper biharmonic heights located by the scan.
    pub found: Vec<f64>,
    pub expected: Vec<f64>,
    /// Zeros of the residual where the hyperplane is minimal.
    #[serde(default)]
    pub harmonic: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub metadata: Metadata,
    pub records: Vec<Record>,
    pub summary: Summary,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub roots: Option<Roots>,
}

impl ResidualReport {
    pub fn new(command: &str, config: &RunConfig, mut records: Vec<Record>, roots: Option<Roots>) -> Self {
        records.sort_by(|a, b| a.check_id.cmp(&b.check_id).then(a.point_index.cmp(&b.point_index)));
        let mut versions = BTreeMap::new();
        versions.insert("biharm-cli".to_string(), env!("CARGO_PKG_VERSION").to_string());
        versions.insert("report-format".to_string(), "1".to_string());
        let summary = Summary::from_records(&records);
        Self {
            metadata: Metadata {
                command: command.to_string(),
                config: config.clone(),
                timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
                versions,
            },
            records,
            summary,
            roots,
        }
    }

    pub fn all_passed(&self) -> bool {
        self.summary.failed == 0
    }

    /// Does the stored summary agree with the records?
    pub fn is_consistent(&self) -> bool {
        Summary::from_records(&self.records) == self.summary
            && self.records.iter().all(|r| r.verdict == Verdict::of(r.residual, r.tolerance))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json() + "\n").map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn read_json(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|source| CliError::Json {
            path: path.to_path_buf(),
            source,
        })
    }

    /// One row per record: `check_id, point_coords, residual, tolerance,
    /// verdict`; coordinates are joined with `;`.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["check_id", "point_coords", "residual", "tolerance", "verdict"])?;
        for r in &self.records {
            let coords: Vec<String> = r.point.iter().map(|x| x.to_string()).collect();
            w.write_record([
                r.check_id.clone(),
                coords.join(";"),
                format!("{:e}", r.residual),
                format!("{:e}", r.tolerance),
                r.verdict.as_str().to_string(),
            ])?;
        }
        w.flush().map_err(|e| CliError::Csv(e.into()))?;
        Ok(())
    }

    pub fn write_csv_file(&self, path: &Path) -> Result<()> {
        let file = fs::File::create(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        self.write_csv(file)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_keeps_twelve_digits() {
        assert_eq!(round12(0.123456789012345), 0.123456789012);
        assert_eq!(round12(1.0 / 3.0), 0.333333333333);
        assert_eq!(round12(0.0), 0.0);
        assert!(round12(f64::NAN).is_nan());
    }

    #[test]
    fn summary_tracks_records() {
        let recs = vec![
            Record::new("b", 1, &[0.0], 2.0, 1.0),
            Record::new("a", 0, &[0.0], 0.5, 1.0),
            Record::new("b", 0, &[0.0], 0.1, 1.0),
        ];
        let rep = ResidualReport::new("test", &RunConfig::default(), recs, None);
        assert_eq!(rep.records[0].check_id, "a");
        assert_eq!(rep.records[1].point_index, 0);
        assert_eq!((rep.summary.passed, rep.summary.failed), (2, 1));
        assert_eq!(rep.summary.checks["b"].max_residual, 2.0);
        assert!(rep.is_consistent());
        let back: ResidualReport = serde_json::from_str(&rep.to_json()).unwrap();
        assert_eq!(back, rep);
    }

    #[test]
    fn nan_residual_fails() {
        let r = Record::new("x", 0, &[], f64::NAN, 1.0);
        assert_eq!(r.verdict, Verdict::Fail);
        assert_eq!(r.residual, f64::MAX);
    }
}
