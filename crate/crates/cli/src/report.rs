//! Report structures and emission: one JSON document per run plus one CSV
//! table per claim, diff-friendly for golden tests.

use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::Path;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub meta: Meta,
    pub claims: Vec<ClaimReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub version: String,
    pub config: serde_json::Value,
    pub started: String,
    pub finished: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClaimReport {
    pub id: String,
    /// "pass" | "fail" | "reported"
    pub verdict: String,
    pub rows: Vec<Row>,
    pub fit: Option<Fit>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub lambda: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub pass: bool,
}

impl Row {
    pub fn new(lambda: f64, lhs: f64, rhs: f64, pass: bool) -> Self {
        Row {
            lambda,
            lhs,
            rhs,
            margin: rhs - lhs,
            pass,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fit {
    pub slope: f64,
    pub stderr: f64,
}

impl ClaimReport {
    pub fn failed(&self) -> bool {
        self.verdict == "fail"
    }
}

/// Derive the verdict from asserted rows: pass only if every row passes.
pub fn verdict_from_rows(rows: &[Row]) -> String {
    if rows.iter().all(|r| r.pass) {
        "pass".to_string()
    } else {
        "fail".to_string()
    }
}

/// Floats carry 12 significant digits in every table.
pub fn sig12(x: f64) -> String {
    format!("{x:.11e}")
}

pub fn claim_csv(claim: &ClaimReport) -> String {
    let mut out = String::from("claim,lambda,lhs,rhs,margin,pass\n");
    for row in &claim.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            claim.id,
            sig12(row.lambda),
            sig12(row.lhs),
            sig12(row.rhs),
            sig12(row.margin),
            row.pass
        ));
    }
    out
}

/// Write `report.json` and one CSV per claim into `dir`.
pub fn write_report(dir: &Path, report: &Report) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    let json = serde_json::to_string_pretty(report).expect("report serializes");
    let mut f = std::fs::File::create(dir.join("report.json"))?;
    f.write_all(json.as_bytes())?;
    f.write_all(b"\n")?;
    for claim in &report.claims {
        let path = dir.join(format!("{}.csv", claim.id));
        std::fs::write(path, claim_csv(claim))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_json_roundtrips_field_for_field() {
        let report = Report {
            meta: Meta {
                version: TOOL_VERSION.to_string(),
                config: serde_json::json!({"command": "verify", "claim": "FK"}),
                started: "1970-01-01T00:00:00Z".to_string(),
                finished: "1970-01-01T00:00:00Z".to_string(),
            },
            claims: vec![ClaimReport {
                id: "FK".to_string(),
                verdict: "pass".to_string(),
                rows: vec![Row::new(2.0, 1.0, 9.08, true)],
                fit: Some(Fit {
                    slope: 1.0,
                    stderr: 0.01,
                }),
            }],
        };
        let text = serde_json::to_string(&report).unwrap();
        let parsed: Report = serde_json::from_str(&text).unwrap();
        assert_eq!(parsed, report);
    }

    #[test]
    fn csv_uses_twelve_significant_digits() {
        assert_eq!(sig12(2.0), "2.00000000000e0");
        assert_eq!(sig12(0.000123456789012345), "1.23456789012e-4");
        let claim = ClaimReport {
            id: "Lem1.2".to_string(),
            verdict: "pass".to_string(),
            rows: vec![Row::new(1.5, 0.25, 0.5, true)],
            fit: None,
        };
        let csv = claim_csv(&claim);
        assert!(csv.starts_with("claim,lambda,lhs,rhs,margin,pass\n"));
        assert!(csv.contains("Lem1.2,1.50000000000e0,"));
        assert!(csv.ends_with("true\n"));
        assert!(!csv.contains('\r'));
    }
}
