//! Headered CSV exports of tables and curves.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::cost::Calibration;
use super::importance::Importance;
use super::metrics::{metrics, ConfusionMatrix, MetricsReport, METRIC_NAMES};
use super::power::PowerCurve;
use super::roc::RocCurve;
use crate::error::{Error, Result};

/// One line of a metrics table: a classifier and its confusion matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub name: String,
    pub confusion: ConfusionMatrix,
    pub metrics: MetricsReport,
}

impl MetricsRow {
    pub fn new(name: impl Into<String>, confusion: ConfusionMatrix) -> Self {
        MetricsRow {
            name: name.into(),
            metrics: metrics(&confusion, 1.0),
            confusion,
        }
    }
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Parse {
            path: path.to_path_buf(),
            line: 0,
            message: format!("{other:?}"),
        },
    }
}

/// Write `rows` under `header`.
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    w.write_record(header).map_err(|e| csv_err(path, e))?;
    for r in rows {
        w.write_record(r).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

fn f(v: f64) -> String {
    format!("{v}")
}

/// Name, the seven measures and the four counts.
pub fn write_metrics_table(path: &Path, rows: &[MetricsRow]) -> Result<()> {
    let mut header = vec!["name"];
    header.extend(METRIC_NAMES);
    header.extend(["TP", "FP", "TN", "FN"]);
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            let mut v = vec![r.name.clone()];
            v.extend(r.metrics.row().iter().map(|x| f(*x)));
            let c = &r.confusion;
            v.extend([c.tp, c.fp, c.tn, c.fn_].iter().map(|x| x.to_string()));
            v
        })
        .collect();
    write_csv(path, &header, &body)
}

/// Read back a table written by [`write_metrics_table`].
pub fn read_metrics_table(path: &Path) -> Result<Vec<MetricsRow>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_err(path, e))?;
    let mut out = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| csv_err(path, e))?;
        let bad = |m: &str| Error::Parse {
            path: path.to_path_buf(),
            line: i + 2,
            message: m.to_string(),
        };
        if rec.len() != 12 {
            return Err(bad("expected 12 fields"));
        }
        let count = |j: usize| rec[j].parse::<u64>().map_err(|_| bad("bad count"));
        let cm = ConfusionMatrix {
            tp: count(8)?,
            fp: count(9)?,
            tn: count(10)?,
            fn_: count(11)?,
        };
        let mut row = MetricsRow::new(&rec[0], cm);
        let stored: Vec<f64> = (1..8)
            .map(|j| rec[j].parse::<f64>().map_err(|_| bad("bad measure")))
            .collect::<Result<_>>()?;
        let m = &mut row.metrics;
        [m.acc, m.sen, m.spe, m.ppv, m.npv, m.f_beta, m.mcc] = stored.try_into().expect("seven measures");
        out.push(row);
    }
    Ok(out)
}

pub fn write_roc(path: &Path, curves: &[(String, RocCurve)]) -> Result<()> {
    let rows: Vec<Vec<String>> = curves
        .iter()
        .flat_map(|(name, c)| {
            c.points
                .iter()
                .map(move |p| vec![name.clone(), f(p.threshold), f(p.fpr), f(p.tpr), f(c.auc)])
        })
        .collect();
    write_csv(path, &["name", "threshold", "fpr", "tpr", "auc"], &rows)
}

pub fn write_power_curves(path: &Path, curves: &[PowerCurve]) -> Result<()> {
    let rows: Vec<Vec<String>> = curves
        .iter()
        .flat_map(|c| {
            c.points.iter().map(move |p| {
                vec![
                    c.target.clone(),
                    c.n_periods.to_string(),
                    f(p.phi),
                    f(p.rejection_rate),
                    c.n_reps.to_string(),
                    p.n_failed.to_string(),
                    f(c.cutoff),
                ]
            })
        })
        .collect();
    write_csv(
        path,
        &["target", "n_periods", "phi", "rejection_rate", "n_reps", "n_failed", "cutoff"],
        &rows,
    )
}

pub fn write_matrix(path: &Path, names: &[String], m: &[Vec<f64>]) -> Result<()> {
    let mut header = vec![""];
    header.extend(names.iter().map(String::as_str));
    let rows: Vec<Vec<String>> = names
        .iter()
        .zip(m)
        .map(|(n, row)| std::iter::once(n.clone()).chain(row.iter().map(|v| f(*v))).collect())
        .collect();
    write_csv(path, &header, &rows)
}

pub fn write_importance(path: &Path, columns: &[(String, Vec<Importance>)]) -> Result<()> {
    let rows: Vec<Vec<String>> = columns
        .iter()
        .flat_map(|(model, imp)| {
            imp.iter()
                .map(move |i| vec![model.clone(), i.feature.clone(), f(i.raw), f(i.scaled)])
        })
        .collect();
    write_csv(path, &["model", "feature", "raw", "scaled"], &rows)
}

pub fn write_thresholds(path: &Path, rows: &[(String, Calibration)]) -> Result<()> {
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|(m, c)| {
            vec![
                m.clone(),
                f(c.ratio),
                f(c.threshold),
                c.type_i.to_string(),
                c.type_ii.to_string(),
                f(c.cost),
            ]
        })
        .collect();
    write_csv(path, &["model", "cost_ratio", "threshold", "type_i", "type_ii", "cost"], &body)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn metrics_table_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.csv");
        let rows = vec![
            MetricsRow::new("ADF", ConfusionMatrix { tp: 30, fp: 2, tn: 48, fn_: 20 }),
            MetricsRow::new("RF", ConfusionMatrix { tp: 47, fp: 3, tn: 47, fn_: 3 }),
        ];
        write_metrics_table(&p, &rows).unwrap();
        let back = read_metrics_table(&p).unwrap();
        assert_eq!(back, rows);
        let text = std::fs::read_to_string(&p).unwrap();
        assert!(text.starts_with("name,ACC,SEN,SPE,PPV,NPV,F1,MCC,TP,FP,TN,FN\n"));
    }
}
