//! Feature tables: one row per series, stored as CSV with `NA` for cells
//! that could not be computed.

use std::path::Path;

use rayon::prelude::*;

use super::config::ExperimentConfig;
use super::data::DatasetRecord;
use crate::error::{Error, Result};
use crate::learners::FeatureMatrix;
use crate::sim::{simulate_series_with_id, DgpForm, SeriesLabel};
use crate::tsfeatures::{features_for_series, FEATURE_NAMES, N_FEATURES};
use crate::urtests::critical::critical_value;
use crate::urtests::{predicted_label, rejects, TestId};

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureTable {
    pub ids: Vec<u64>,
    /// +1 unit root, -1 near unit root.
    pub labels: Vec<i8>,
    pub forms: Vec<DgpForm>,
    pub matrix: FeatureMatrix,
}

impl FeatureTable {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn n_invalid_cells(&self) -> usize {
        (0..self.len()).map(|i| self.matrix.row(i).iter().filter(|v| v.is_nan()).count()).sum()
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        FEATURE_NAMES.iter().position(|n| *n == name).map(|j| self.matrix.column(j))
    }

    /// Rows whose generating process is `form`.
    pub fn subset(&self, form: DgpForm) -> FeatureTable {
        let rows: Vec<usize> = (0..self.len()).filter(|&i| self.forms[i] == form).collect();
        FeatureTable {
            ids: rows.iter().map(|&i| self.ids[i]).collect(),
            labels: rows.iter().map(|&i| self.labels[i]).collect(),
            forms: rows.iter().map(|&i| self.forms[i]).collect(),
            matrix: self.matrix.select_rows(&rows),
        }
    }
}

/// Regenerate every series and compute its feature vector. A series whose
/// features cannot be computed at all keeps its row with every cell `NA`.
pub fn build_feature_matrix(records: &[DatasetRecord], config: &ExperimentConfig) -> Result<FeatureTable> {
    let rows: Vec<(Vec<f64>, i8, DgpForm)> = records
        .par_iter()
        .map(|r| {
            let spec = r.spec()?;
            let s = simulate_series_with_id(&spec, r.id)?;
            let values = match features_for_series(&s.values, &config.policy_for(spec.dgp_form)) {
                Ok(f) => f.values,
                Err(_) => vec![f64::NAN; N_FEATURES],
            };
            Ok((values, s.label.sign(), spec.dgp_form))
        })
        .collect::<Result<_>>()?;
    let mut matrix = FeatureMatrix::new(N_FEATURES);
    let mut labels = Vec::with_capacity(rows.len());
    let mut forms = Vec::with_capacity(rows.len());
    for (v, l, f) in rows {
        matrix.push_row(&v)?;
        labels.push(l);
        forms.push(f);
    }
    Ok(FeatureTable {
        ids: records.iter().map(|r| r.id).collect(),
        labels,
        forms,
        matrix,
    })
}

fn header() -> Vec<&'static str> {
    let mut h = vec!["id", "label", "dgp_form"];
    h.extend(FEATURE_NAMES);
    h
}

pub fn write_features(path: &Path, table: &FeatureTable) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::io(path, e.into()))?;
    let io = |e: csv::Error| Error::io(path, e.into());
    w.write_record(header()).map_err(io)?;
    for i in 0..table.len() {
        let mut rec = vec![
            table.ids[i].to_string(),
            SeriesLabel::from_sign(table.labels[i]).name().to_string(),
            table.forms[i].name().to_string(),
        ];
        rec.extend(table.matrix.row(i).iter().map(|v| if v.is_nan() { "NA".to_string() } else { format!("{v}") }));
        w.write_record(&rec).map_err(io)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_features(path: &Path) -> Result<FeatureTable> {
    let mut r = csv::Reader::from_path(path).map_err(|e| Error::io(path, e.into()))?;
    let bad = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let got: Vec<String> = r
        .headers()
        .map_err(|e| bad(1, e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    if got != header() {
        return Err(Error::Schema(format!("{}: feature columns do not match this build's schema", path.display())));
    }
    let mut table = FeatureTable {
        ids: Vec::new(),
        labels: Vec::new(),
        forms: Vec::new(),
        matrix: FeatureMatrix::new(N_FEATURES),
    };
    let mut row = vec![0.0; N_FEATURES];
    for (k, rec) in r.records().enumerate() {
        let line = k + 2;
        let rec = rec.map_err(|e| bad(line, e.to_string()))?;
        table.ids.push(rec[0].parse().map_err(|_| bad(line, "bad id".into()))?);
        table
            .labels
            .push(SeriesLabel::parse(&rec[1]).ok_or_else(|| bad(line, "bad label".into()))?.sign());
        table
            .forms
            .push(DgpForm::parse(&rec[2]).ok_or_else(|| bad(line, "bad dgp_form".into()))?);
        for (j, cell) in rec.iter().skip(3).enumerate() {
            row[j] = if cell == "NA" {
                f64::NAN
            } else {
                cell.parse().map_err(|_| bad(line, format!("bad value {cell:?}")))?
            };
        }
        table.matrix.push_row(&row)?;
    }
    if table.is_empty() {
        return Err(Error::EmptyInput(format!("{}: no rows", path.display())));
    }
    Ok(table)
}

/// Classical decisions at the 5% level from the stored statistics: +1 when
/// the test points to a unit root. A statistic that could not be computed
/// counts as a failure to reject.
pub fn test_decisions(table: &FeatureTable, test: TestId, config: &ExperimentConfig) -> Result<Vec<i8>> {
    let col = test as usize;
    let len_col = FEATURE_NAMES.iter().position(|n| *n == "length").expect("length feature");
    (0..table.len())
        .map(|i| {
            let stat = table.matrix.get(i, col);
            let det = config.policy_for(table.forms[i]).for_test(test);
            let n = table.matrix.get(i, len_col) as usize;
            let reject = if stat.is_nan() {
                !test.null_is_unit_root()
            } else {
                rejects(test, stat, critical_value(test, det, n, 0.05)?)
            };
            Ok(predicted_label(test, reject).sign())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{generate_dataset, Partition};

    fn small() -> (Vec<DatasetRecord>, ExperimentConfig) {
        let cfg = ExperimentConfig {
            n_series: 40,
            ..ExperimentConfig::default()
        };
        let ds = generate_dataset(cfg.n_series, cfg.seed, &cfg.sampling).unwrap();
        (ds.train.iter().map(|s| DatasetRecord::new(Partition::Train, s)).collect(), cfg)
    }

    #[test]
    fn shape_and_round_trip() {
        let (recs, cfg) = small();
        let t = build_feature_matrix(&recs, &cfg).unwrap();
        assert_eq!((t.len(), t.matrix.n_cols()), (recs.len(), N_FEATURES));
        let dir = tempfile::tempdir().unwrap();
        let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
        write_features(&a, &t).unwrap();
        write_features(&b, &build_feature_matrix(&recs, &cfg).unwrap()).unwrap();
        assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
        let back = read_features(&a).unwrap();
        assert_eq!(back.ids, t.ids);
        for i in 0..t.len() {
            for (x, y) in back.matrix.row(i).iter().zip(t.matrix.row(i)) {
                assert!(x.to_bits() == y.to_bits() || (x.is_nan() && y.is_nan()));
            }
        }
    }

    #[test]
    fn wrong_schema_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("f.csv");
        std::fs::write(&p, "id,label,dgp_form,ADF\n1,UR,plain,0.1\n").unwrap();
        assert!(matches!(read_features(&p), Err(Error::Schema(_))));
    }

    #[test]
    fn decisions_follow_the_statistic() {
        let (recs, cfg) = small();
        let t = build_feature_matrix(&recs, &cfg).unwrap();
        let d = test_decisions(&t, TestId::Adf, &cfg).unwrap();
        for i in 0..t.len() {
            let r = crate::urtests::compute_statistic(
                TestId::Adf,
                &simulate_series_with_id(&recs[i].spec().unwrap(), recs[i].id).unwrap().values,
                cfg.policy_for(t.forms[i]).for_test(TestId::Adf),
            )
            .unwrap();
            assert_eq!(d[i], r.predicted_label().sign());
        }
    }
}
