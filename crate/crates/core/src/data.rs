//! Dataset model, CSV ingestion, binarization and seeded splitting.
//!
//! Labels are standardized to {0,1} internally; the lexicographically
//! smaller raw label maps to 0. Features are stored row-major as f64.

use crate::rng::master;
use crate::{Error, Result};
use rand::seq::SliceRandom;
use std::collections::BTreeSet;
use std::path::Path;

/// Tabular binary-classification dataset.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    n: usize,
    m: usize,
    features: Vec<f64>, // row-major n x m
    labels: Vec<u8>,
    feature_names: Vec<String>,
    binary_flag: bool,
}

impl Dataset {
    /// Assemble a dataset from parts, validating the invariants.
    pub fn new(
        features: Vec<Vec<f64>>,
        labels: Vec<u8>,
        feature_names: Vec<String>,
    ) -> Result<Self> {
        let n = features.len();
        if n == 0 {
            return Err(Error::EmptyFile("no data rows".into()));
        }
        let m = features[0].len();
        if m == 0 {
            return Err(Error::EmptyFile("no feature columns".into()));
        }
        if labels.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: labels.len(),
            });
        }
        if feature_names.len() != m {
            return Err(Error::LengthMismatch {
                expected: m,
                got: feature_names.len(),
            });
        }
        if labels.iter().any(|&y| y > 1) {
            return Err(Error::NonBinaryPrediction);
        }
        let mut flat = Vec::with_capacity(n * m);
        for row in &features {
            if row.len() != m {
                return Err(Error::LengthMismatch {
                    expected: m,
                    got: row.len(),
                });
            }
            flat.extend_from_slice(row);
        }
        let binary_flag = flat.iter().all(|&v| v == 0.0 || v == 1.0);
        Ok(Dataset {
            n,
            m,
            features: flat,
            labels,
            feature_names,
            binary_flag,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    /// True iff every feature value is 0 or 1.
    pub fn is_binary(&self) -> bool {
        self.binary_flag
    }

    /// Feature row for sample `i`.
    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.m..(i + 1) * self.m]
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.features[i * self.m + j]
    }

    /// Replace labels, keeping features (noise injectors use this).
    pub(crate) fn with_labels(&self, labels: Vec<u8>) -> Dataset {
        debug_assert_eq!(labels.len(), self.n);
        Dataset {
            labels,
            ..self.clone()
        }
    }

    /// Replace features, keeping labels; recomputes the binary flag.
    pub(crate) fn with_features(&self, features: Vec<f64>) -> Dataset {
        debug_assert_eq!(features.len(), self.n * self.m);
        let binary_flag = features.iter().all(|&v| v == 0.0 || v == 1.0);
        Dataset {
            features,
            binary_flag,
            ..self.clone()
        }
    }

    /// Dataset restricted to `rows` (in the given order).
    pub fn select(&self, rows: &[usize]) -> Dataset {
        let mut features = Vec::with_capacity(rows.len() * self.m);
        let mut labels = Vec::with_capacity(rows.len());
        for &r in rows {
            features.extend_from_slice(self.row(r));
            labels.push(self.labels[r]);
        }
        Dataset {
            n: rows.len(),
            m: self.m,
            features,
            labels,
            feature_names: self.feature_names.clone(),
            binary_flag: self.binary_flag,
        }
    }

    /// Dataset restricted to feature columns `cols` (in the given order).
    pub fn select_features(&self, cols: &[usize]) -> Dataset {
        let mut features = Vec::with_capacity(self.n * cols.len());
        for i in 0..self.n {
            for &c in cols {
                features.push(self.value(i, c));
            }
        }
        Dataset {
            n: self.n,
            m: cols.len(),
            features,
            labels: self.labels.clone(),
            feature_names: cols
                .iter()
                .map(|&c| self.feature_names[c].clone())
                .collect(),
            binary_flag: self.binary_flag,
        }
    }
}

/// Load a CSV file with a header row; `label_column` must hold exactly two
/// distinct raw values, mapped to {0,1} by lexicographic order.
pub fn load_csv(path: &Path, label_column: &str) -> Result<Dataset> {
    let file =
        std::fs::File::open(path).map_err(|_| Error::MissingFile(path.display().to_string()))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(file);
    let headers: Vec<String> = reader
        .headers()?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    let label_idx = headers
        .iter()
        .position(|h| h == label_column)
        .ok_or_else(|| Error::MissingColumn(label_column.to_string()))?;
    let feature_names: Vec<String> = headers
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != label_idx)
        .map(|(_, h)| h.clone())
        .collect();

    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut raw_labels: Vec<String> = Vec::new();
    for (row_no, record) in reader.records().enumerate() {
        let record = record?;
        let mut row = Vec::with_capacity(feature_names.len());
        for (col, cell) in record.iter().enumerate() {
            if col == label_idx {
                raw_labels.push(cell.trim().to_string());
            } else {
                row.push(
                    cell.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::NonNumericCell {
                            row: row_no + 2, // 1-based, after header
                            column: headers.get(col).cloned().unwrap_or_default(),
                            value: cell.to_string(),
                        })?,
                );
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::EmptyFile(path.display().to_string()));
    }

    let distinct: BTreeSet<&String> = raw_labels.iter().collect();
    if distinct.len() != 2 {
        return Err(Error::LabelCardinality {
            column: label_column.to_string(),
            found: distinct.len(),
        });
    }
    let zero = distinct.iter().next().unwrap().to_string();
    let labels: Vec<u8> = raw_labels.iter().map(|l| (*l != zero) as u8).collect();
    Dataset::new(rows, labels, feature_names)
}

/// Write a dataset back to CSV (features as shortest round-trip decimals,
/// labels as 0/1 in a final column).
pub fn save_csv(d: &Dataset, path: &Path, label_column: &str) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)?;
    let mut header: Vec<String> = d.feature_names.to_vec();
    header.push(label_column.to_string());
    writer.write_record(&header)?;
    for i in 0..d.n {
        let mut record: Vec<String> = d.row(i).iter().map(|v| format!("{v}")).collect();
        record.push(format!("{}", d.labels[i]));
        writer.write_record(&record)?;
    }
    writer.flush()?;
    Ok(())
}

/// Per-feature binarization thresholds.
#[derive(Clone, Debug)]
pub enum Thresholds {
    /// One threshold per feature column.
    PerFeature(Vec<f64>),
    /// Column median; mean of the two middle order statistics for even n.
    Median,
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Map each feature to `1[value > threshold]`, preserving column order.
pub fn binarize(d: &Dataset, thresholds: &Thresholds) -> Result<Dataset> {
    let thr: Vec<f64> = match thresholds {
        Thresholds::PerFeature(t) => {
            if t.len() != d.m {
                return Err(Error::LengthMismatch {
                    expected: d.m,
                    got: t.len(),
                });
            }
            t.clone()
        }
        Thresholds::Median => (0..d.m)
            .map(|j| {
                let mut col: Vec<f64> = (0..d.n).map(|i| d.value(i, j)).collect();
                median(&mut col)
            })
            .collect(),
    };
    let features: Vec<f64> = (0..d.n)
        .flat_map(|i| {
            let thr = &thr;
            (0..d.m).map(move |j| (d.value(i, j) > thr[j]) as u8 as f64)
        })
        .collect();
    Ok(d.with_features(features))
}

/// Rescale every feature column to [0,1] (no-op for constant columns).
pub fn min_max_scale(d: &Dataset) -> Dataset {
    let mut mins = vec![f64::INFINITY; d.m];
    let mut maxs = vec![f64::NEG_INFINITY; d.m];
    for i in 0..d.n {
        for j in 0..d.m {
            let v = d.value(i, j);
            mins[j] = mins[j].min(v);
            maxs[j] = maxs[j].max(v);
        }
    }
    let features: Vec<f64> = (0..d.n)
        .flat_map(|i| {
            let (mins, maxs) = (&mins, &maxs);
            (0..d.m).map(move |j| {
                let span = maxs[j] - mins[j];
                if span == 0.0 {
                    d.value(i, j)
                } else {
                    (d.value(i, j) - mins[j]) / span
                }
            })
        })
        .collect();
    d.with_features(features)
}

/// Seeded train/validation split description.
#[derive(Clone, Copy, Debug, serde::Serialize, serde::Deserialize)]
pub struct SplitSpec {
    pub validation_fraction: f64,
    pub fold_count: usize,
    pub seed: u64,
}

impl SplitSpec {
    pub fn validate(&self, n: usize) -> Result<()> {
        if !(self.validation_fraction > 0.0 && self.validation_fraction < 1.0) {
            return Err(Error::OutOfRange {
                name: "validation_fraction",
                value: self.validation_fraction,
                range: "(0,1)",
            });
        }
        if self.validation_fraction * (n as f64) < 1.0 {
            return Err(Error::OutOfRange {
                name: "validation_fraction",
                value: self.validation_fraction,
                range: "validation_fraction * n >= 1",
            });
        }
        if self.fold_count < 2 || self.fold_count > n {
            return Err(Error::FoldCount {
                folds: self.fold_count,
                n,
            });
        }
        Ok(())
    }
}

fn shuffled_indices(n: usize, seed: u64) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut master(seed));
    idx
}

/// Disjoint train/validation partition, reproducible from the seed.
pub fn split(d: &Dataset, s: &SplitSpec) -> Result<(Dataset, Dataset)> {
    s.validate(d.n)?;
    let n_val = ((s.validation_fraction * d.n as f64).round() as usize).clamp(1, d.n - 1);
    let idx = shuffled_indices(d.n, s.seed);
    let (val_idx, train_idx) = idx.split_at(n_val);
    let mut val_idx = val_idx.to_vec();
    let mut train_idx = train_idx.to_vec();
    val_idx.sort_unstable();
    train_idx.sort_unstable();
    Ok((d.select(&train_idx), d.select(&val_idx)))
}

/// `fold_count` disjoint (train, validation) pairs covering the dataset;
/// fold sizes differ by at most one.
pub fn k_folds(d: &Dataset, s: &SplitSpec) -> Result<Vec<(Dataset, Dataset)>> {
    s.validate(d.n)?;
    let idx = shuffled_indices(d.n, s.seed);
    let k = s.fold_count;
    let base = d.n / k;
    let extra = d.n % k;
    let mut folds: Vec<Vec<usize>> = Vec::with_capacity(k);
    let mut at = 0;
    for f in 0..k {
        let size = base + (f < extra) as usize;
        let mut fold = idx[at..at + size].to_vec();
        fold.sort_unstable();
        folds.push(fold);
        at += size;
    }
    let mut out = Vec::with_capacity(k);
    for f in 0..k {
        let mut train: Vec<usize> = Vec::with_capacity(d.n - folds[f].len());
        for (g, fold) in folds.iter().enumerate() {
            if g != f {
                train.extend_from_slice(fold);
            }
        }
        train.sort_unstable();
        out.push((d.select(&train), d.select(&folds[f])));
    }
    Ok(out)
}
