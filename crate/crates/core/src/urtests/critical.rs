//! Embedded critical-value table.
//!
//! The CSV has columns `test, det_spec, t_min, t_max, alpha, value`; a row
//! applies to series lengths in `t_min..=t_max`.

use std::sync::OnceLock;

use super::{DetSpec, TestId};
use crate::error::{Error, Result};

const TABLE_CSV: &str = include_str!("../../data/critical_values.csv");

#[derive(Debug, Clone, PartialEq)]
pub struct CriticalValueRow {
    pub test: TestId,
    pub det_spec: DetSpec,
    pub t_min: usize,
    pub t_max: usize,
    pub alpha: f64,
    pub value: f64,
}

/// Parse a critical-value table in the embedded CSV layout.
pub fn parse_table(text: &str) -> Result<Vec<CriticalValueRow>> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let line = i + 2;
        let bad = |message: String| Error::Parse {
            path: "critical_values.csv".into(),
            line,
            message,
        };
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        if rec.len() != 6 {
            return Err(bad(format!("expected 6 fields, got {}", rec.len())));
        }
        let test = TestId::parse(&rec[0]).ok_or_else(|| bad(format!("unknown test {}", &rec[0])))?;
        let det_spec = DetSpec::parse(&rec[1]).ok_or_else(|| bad(format!("unknown det_spec {}", &rec[1])))?;
        let num = |j: usize| rec[j].trim().parse::<f64>().map_err(|e| bad(e.to_string()));
        rows.push(CriticalValueRow {
            test,
            det_spec,
            t_min: num(2)? as usize,
            t_max: num(3)? as usize,
            alpha: num(4)?,
            value: num(5)?,
        });
    }
    Ok(rows)
}

/// The embedded table, parsed once.
pub fn table() -> &'static [CriticalValueRow] {
    static TABLE: OnceLock<Vec<CriticalValueRow>> = OnceLock::new();
    TABLE.get_or_init(|| parse_table(TABLE_CSV).expect("embedded critical-value table is valid"))
}

/// Raw CSV text of the embedded table.
pub fn table_csv() -> &'static str {
    TABLE_CSV
}

pub fn critical_value(test: TestId, det: DetSpec, n: usize, alpha: f64) -> Result<f64> {
    table()
        .iter()
        .find(|r| r.test == test && r.det_spec == det && (r.alpha - alpha).abs() < 1e-9 && r.t_min <= n && n <= r.t_max)
        .map(|r| r.value)
        .ok_or_else(|| Error::InvalidSpec(format!("no {alpha} critical value for {} ({}) at T = {n}", test.name(), det.name())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simplest_adf_case() {
        for n in [24, 100, 500, 600] {
            assert_eq!(critical_value(TestId::Adf, DetSpec::None, n, 0.05).unwrap(), -1.95);
        }
    }

    #[test]
    fn every_allowed_spec_is_covered() {
        for test in TestId::ALL {
            for &det in test.allowed_det_specs() {
                for n in [24, 60, 100, 250, 600, 5000] {
                    for alpha in [0.01, 0.05, 0.10] {
                        critical_value(test, det, n, alpha).unwrap();
                    }
                }
            }
        }
    }

    #[test]
    fn bands_do_not_overlap() {
        let t = table();
        for (i, a) in t.iter().enumerate() {
            for b in &t[i + 1..] {
                if a.test == b.test && a.det_spec == b.det_spec && a.alpha == b.alpha {
                    assert!(a.t_max < b.t_min || b.t_max < a.t_min, "{a:?} {b:?}");
                }
            }
        }
    }

    #[test]
    fn malformed_rows_are_reported() {
        let err = parse_table("test,det_spec,t_min,t_max,alpha,value\nADF,none,1,x,0.05,-1.95\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
    }
}
