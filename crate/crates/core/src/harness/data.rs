//! Dataset records and external series files.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::{DgpForm, DgpSpec, Innovation, LabeledSeries, Partition};

/// One simulated series as stored in `dataset.csv`. The values themselves
/// are not stored: the spec (seed included) regenerates them exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetRecord {
    pub id: u64,
    pub partition: String,
    pub label: String,
    pub dgp_form: String,
    pub phi: f64,
    pub lambda: f64,
    pub delta: f64,
    pub sigma: f64,
    pub n_periods: usize,
    pub seed: u64,
    pub burn_in: usize,
    pub innovation: Innovation,
}

impl DatasetRecord {
    pub fn new(partition: Partition, s: &LabeledSeries) -> Self {
        let sp = &s.spec;
        DatasetRecord {
            id: s.id,
            partition: partition.name().into(),
            label: s.label.name().into(),
            dgp_form: sp.dgp_form.name().into(),
            phi: sp.phi,
            lambda: sp.lambda,
            delta: sp.delta,
            sigma: sp.sigma,
            n_periods: sp.n_periods,
            seed: sp.seed,
            burn_in: sp.burn_in,
            innovation: sp.innovation,
        }
    }

    pub fn partition(&self) -> Result<Partition> {
        Partition::parse(&self.partition).ok_or_else(|| Error::Schema(format!("unknown partition {:?}", self.partition)))
    }

    pub fn spec(&self) -> Result<DgpSpec> {
        let dgp_form =
            DgpForm::parse(&self.dgp_form).ok_or_else(|| Error::Schema(format!("unknown dgp_form {:?}", self.dgp_form)))?;
        Ok(DgpSpec {
            dgp_form,
            phi: self.phi,
            lambda: self.lambda,
            delta: self.delta,
            sigma: self.sigma,
            n_periods: self.n_periods,
            seed: self.seed,
            burn_in: self.burn_in,
            innovation: self.innovation,
        })
    }
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line() as usize);
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        kind => Error::Parse {
            path: path.to_path_buf(),
            line,
            message: match kind {
                csv::ErrorKind::Deserialize { err, .. } => err.to_string(),
                other => format!("{other:?}"),
            },
        },
    }
}

pub fn write_dataset(path: &Path, records: &[DatasetRecord]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    for r in records {
        w.serialize(r).map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_dataset(path: &Path) -> Result<Vec<DatasetRecord>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    let rows: Vec<DatasetRecord> = r.deserialize().collect::<std::result::Result<_, _>>().map_err(|e| csv_error(path, e))?;
    if rows.is_empty() {
        return Err(Error::EmptyInput(format!("{}: no series", path.display())));
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesSummary {
    pub start: i64,
    pub end: i64,
    pub t: usize,
    pub min: f64,
    pub max: f64,
    /// Sample standard deviation.
    pub sd: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IngestedSeries {
    pub id: String,
    pub values: Vec<f64>,
    pub summary: SeriesSummary,
}

fn summarise(start: i64, values: &[f64]) -> SeriesSummary {
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    let ss: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
    SeriesSummary {
        start,
        end: start + n as i64 - 1,
        t: n,
        min: values.iter().cloned().fold(f64::INFINITY, f64::min),
        max: values.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        sd: if n > 1 { (ss / (n - 1) as f64).sqrt() } else { 0.0 },
    }
}

/// Parse the long format `series,year,value`: one row per observation,
/// rows of a series contiguous and in consecutive years.
pub fn ingest_str(text: &str, origin: &Path) -> Result<Vec<IngestedSeries>> {
    let bad = |line: usize, message: String| Error::Parse {
        path: origin.to_path_buf(),
        line,
        message,
    };
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let Some((_, header)) = lines.next() else {
        return Err(Error::EmptyInput(format!("{}: empty file", origin.display())));
    };
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    if cols != ["series", "year", "value"] {
        return Err(bad(1, format!("expected header series,year,value, got {header:?}")));
    }
    let mut out: Vec<(String, i64, Vec<f64>)> = Vec::new();
    for (i, line) in lines {
        let no = i + 1;
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 3 {
            return Err(bad(no, format!("expected 3 fields, got {}", fields.len())));
        }
        let year: i64 = fields[1].parse().map_err(|_| bad(no, format!("year {:?} is not an integer", fields[1])))?;
        let value: f64 = fields[2]
            .parse()
            .ok()
            .filter(|v: &f64| v.is_finite())
            .ok_or_else(|| bad(no, format!("value {:?} is not a finite number", fields[2])))?;
        match out.last_mut() {
            Some((id, start, vals)) if id == fields[0] => {
                if year != *start + vals.len() as i64 {
                    return Err(bad(no, format!("{id}: expected year {}, got {year}", *start + vals.len() as i64)));
                }
                vals.push(value);
            }
            _ => {
                if fields[0].is_empty() {
                    return Err(bad(no, "empty series name".into()));
                }
                if out.iter().any(|(id, _, _)| id == fields[0]) {
                    return Err(bad(no, format!("rows of series {:?} are not contiguous", fields[0])));
                }
                out.push((fields[0].to_string(), year, vec![value]));
            }
        }
    }
    if out.is_empty() {
        return Err(Error::EmptyInput(format!("{}: no observations", origin.display())));
    }
    Ok(out
        .into_iter()
        .map(|(id, start, values)| IngestedSeries {
            summary: summarise(start, &values),
            id,
            values,
        })
        .collect())
}

pub fn ingest_csv(path: &Path) -> Result<Vec<IngestedSeries>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    ingest_str(&text, path)
}

const NELSON_PLOSSER: &str = include_str!("../../data/nelson_plosser.csv");

/// The bundled annual macroeconomic series (levels).
pub fn nelson_plosser() -> Vec<IngestedSeries> {
    ingest_str(NELSON_PLOSSER, Path::new("nelson_plosser.csv")).expect("bundled file parses")
}

/// Natural log of every value; all values must be positive.
pub fn log_transform(id: &str, values: &[f64]) -> Result<Vec<f64>> {
    if values.iter().any(|v| *v <= 0.0) {
        return Err(Error::DegenerateSeries(format!("{id}: log transform needs positive values")));
    }
    Ok(values.iter().map(|v| v.ln()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{generate_dataset, SamplingConfig};

    #[test]
    fn bundled_series_reconcile() {
        let np = nelson_plosser();
        let gnp = np.iter().find(|s| s.id == "Real GNP").unwrap();
        assert_eq!((gnp.summary.start, gnp.summary.end, gnp.summary.t), (1909, 1970, 62));
        assert!((gnp.summary.min - 116.8).abs() < 0.01 && (gnp.summary.max - 724.7).abs() < 0.01);
        assert!((gnp.summary.sd - 180.32).abs() < 0.01);
        let bonds = np.iter().find(|s| s.id == "Bond Yields").unwrap();
        assert_eq!(bonds.summary.t, 100);
        assert!((bonds.summary.sd - 24.05).abs() < 0.01);
    }

    #[test]
    fn ingest_errors_name_the_line() {
        let p = Path::new("x.csv");
        assert!(matches!(ingest_str("", p), Err(Error::EmptyInput(_))));
        assert!(matches!(ingest_str("series,year,value\n", p), Err(Error::EmptyInput(_))));
        let e = ingest_str("series,year,value\na,1,1.0\na,2,oops\n", p).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, .. }), "{e}");
        let e = ingest_str("series,year,value\na,1,1.0\na,3,2.0\n", p).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, .. }));
        let e = ingest_str("series,year,value\na,1,1\nb,1,1\na,2,1\n", p).unwrap_err();
        assert!(matches!(e, Error::Parse { line: 4, .. }));
    }

    #[test]
    fn dataset_records_round_trip() {
        let ds = generate_dataset(20, 3, &SamplingConfig::default()).unwrap();
        let recs: Vec<DatasetRecord> = ds.train.iter().map(|s| DatasetRecord::new(Partition::Train, s)).collect();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("d.csv");
        write_dataset(&p, &recs).unwrap();
        let back = read_dataset(&p).unwrap();
        assert_eq!(back, recs);
        for (r, s) in back.iter().zip(&ds.train) {
            let again = crate::sim::simulate_series_with_id(&r.spec().unwrap(), r.id).unwrap();
            assert_eq!(again.values, s.values);
        }
    }
}
