//! Tabular binary-classification datasets: CSV ingestion, missing-value
//! imputation and stratified fold assignment.
//!
//! Column numbers in a [`Schema`] are 1-based, matching how the UCI
//! attribute tables number them.

use std::collections::BTreeSet;
use std::fmt;
use std::io::{Read, Write};
use std::path::Path;

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Binary class tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Positive,
    Negative,
}

impl Label {
    pub fn is_positive(self) -> bool {
        self == Label::Positive
    }

    pub fn flip(self) -> Label {
        match self {
            Label::Positive => Label::Negative,
            Label::Negative => Label::Positive,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::Positive => "positive",
            Label::Negative => "negative",
        })
    }
}

impl std::str::FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "positive" | "pos" => Ok(Label::Positive),
            "negative" | "neg" => Ok(Label::Negative),
            other => Err(Error::Config(format!(
                "expected `positive` or `negative`, got `{other}`"
            ))),
        }
    }
}

/// How to read a CSV file into a [`Dataset`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schema {
    /// 1-based column holding the class label.
    pub label_col: usize,
    /// Token of the positive class in the label column.
    pub positive: String,
    /// Token of the negative class. When absent, the first non-positive
    /// token seen is taken as negative and any third token is rejected.
    pub negative: Option<String>,
    /// 1-based columns excluded from the features (identifiers).
    pub drop_cols: Vec<usize>,
    pub has_header: bool,
}

impl Schema {
    pub fn new(label_col: usize, positive: impl Into<String>) -> Self {
        Schema {
            label_col,
            positive: positive.into(),
            negative: None,
            drop_cols: Vec::new(),
            has_header: false,
        }
    }

    pub fn with_negative(mut self, negative: impl Into<String>) -> Self {
        self.negative = Some(negative.into());
        self
    }

    pub fn with_drop_cols(mut self, cols: impl IntoIterator<Item = usize>) -> Self {
        self.drop_cols = cols.into_iter().collect();
        self
    }

    pub fn with_header(mut self, has_header: bool) -> Self {
        self.has_header = has_header;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.label_col == 0 {
            return Err(Error::Schema("column numbers are 1-based; label column 0 is invalid".into()));
        }
        if self.drop_cols.contains(&0) {
            return Err(Error::Schema("column numbers are 1-based; drop column 0 is invalid".into()));
        }
        if self.drop_cols.contains(&self.label_col) {
            return Err(Error::Schema(format!(
                "label column {} is also listed as a dropped column",
                self.label_col
            )));
        }
        if self.negative.as_deref() == Some(self.positive.as_str()) {
            return Err(Error::Schema("positive and negative tokens are identical".into()));
        }
        Ok(())
    }
}

/// Feature matrix with binary labels and a missing-value mask.
///
/// Masked cells hold a `0.0` placeholder until [`impute`] replaces them.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    name: String,
    features: DMatrix<f64>,
    labels: Vec<Label>,
    missing: DMatrix<bool>,
}

impl Dataset {
    pub fn new(
        name: impl Into<String>,
        features: DMatrix<f64>,
        labels: Vec<Label>,
        missing: DMatrix<bool>,
    ) -> Result<Self> {
        let (n, m) = features.shape();
        if n == 0 {
            return Err(Error::EmptyDataset);
        }
        if m == 0 {
            return Err(Error::Schema("dataset has no feature columns".into()));
        }
        if labels.len() != n {
            return Err(Error::Dimension {
                expected: n,
                found: labels.len(),
            });
        }
        if missing.shape() != (n, m) {
            return Err(Error::Dimension {
                expected: n * m,
                found: missing.len(),
            });
        }
        for i in 0..n {
            for j in 0..m {
                if !missing[(i, j)] && !features[(i, j)].is_finite() {
                    return Err(Error::NumericInput(format!(
                        "row {i}, column {j} is not finite"
                    )));
                }
            }
        }
        Ok(Dataset {
            name: name.into(),
            features,
            labels,
            missing,
        })
    }

    /// Builds a dataset with no missing cells from row vectors.
    pub fn from_rows(name: impl Into<String>, rows: &[Vec<f64>], labels: Vec<Label>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::EmptyDataset);
        }
        let m = rows[0].len();
        if let Some(bad) = rows.iter().find(|r| r.len() != m) {
            return Err(Error::Dimension {
                expected: m,
                found: bad.len(),
            });
        }
        let features = DMatrix::from_fn(n, m, |i, j| rows[i][j]);
        Dataset::new(name, features, labels, DMatrix::from_element(n, m, false))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n_instances(&self) -> usize {
        self.features.nrows()
    }

    pub fn n_features(&self) -> usize {
        self.features.ncols()
    }

    pub fn features(&self) -> &DMatrix<f64> {
        &self.features
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn missing_mask(&self) -> &DMatrix<bool> {
        &self.missing
    }

    pub fn is_missing(&self, row: usize, col: usize) -> bool {
        self.missing[(row, col)]
    }

    pub fn has_missing(&self) -> bool {
        self.missing.iter().any(|&b| b)
    }

    /// Number of instances with at least one masked cell.
    pub fn rows_with_missing(&self) -> usize {
        (0..self.n_instances())
            .filter(|&i| self.missing.row(i).iter().any(|&b| b))
            .count()
    }

    /// (positive count, negative count)
    pub fn class_counts(&self) -> (usize, usize) {
        let pos = self.labels.iter().filter(|l| l.is_positive()).count();
        (pos, self.labels.len() - pos)
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        self.features.row(i).iter().copied().collect()
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.features.column(j).iter().copied().collect()
    }

    /// Sub-dataset made of the given rows, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> Result<Dataset> {
        let m = self.n_features();
        let features = DMatrix::from_fn(rows.len(), m, |i, j| self.features[(rows[i], j)]);
        let missing = DMatrix::from_fn(rows.len(), m, |i, j| self.missing[(rows[i], j)]);
        let labels = rows.iter().map(|&r| self.labels[r]).collect();
        Dataset::new(self.name.clone(), features, labels, missing)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }
}

pub fn load_csv(path: impl AsRef<Path>, schema: &Schema) -> Result<Dataset> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::file(path, e))?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".to_owned());
    read_csv(file, name, schema)
}

fn is_missing_token(cell: &str) -> bool {
    cell.is_empty() || cell == "?"
}

struct RawTable {
    values: Vec<f64>,
    mask: Vec<bool>,
    /// (line, token) of each record's label cell
    label_tokens: Vec<(u64, String)>,
    rows: usize,
    cols: usize,
}

fn parse_table<R: Read>(
    reader: R,
    has_header: bool,
    label_col: Option<usize>,
    drop_cols: &[usize],
) -> Result<RawTable> {
    if label_col == Some(0) || drop_cols.contains(&0) {
        return Err(Error::Schema("column numbers are 1-based; column 0 is invalid".into()));
    }
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(has_header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);

    let mut width = if has_header {
        Some(rdr.headers()?.len())
    } else {
        None
    };
    let mut table = RawTable {
        values: Vec::new(),
        mask: Vec::new(),
        label_tokens: Vec::new(),
        rows: 0,
        cols: 0,
    };
    let mut feature_cols: Vec<usize> = Vec::new();

    for record in rdr.records() {
        let record = record?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let expected = *width.get_or_insert(record.len());
        if record.len() != expected {
            return Err(Error::Parse {
                line,
                message: format!("expected {expected} columns, found {}", record.len()),
            });
        }
        if feature_cols.is_empty() {
            if let Some(c) = label_col.filter(|&c| c > expected) {
                return Err(Error::Schema(format!(
                    "label column {c} is beyond the {expected} columns of the file"
                )));
            }
            if let Some(&c) = drop_cols.iter().find(|&&c| c > expected) {
                return Err(Error::Schema(format!(
                    "drop column {c} is beyond the {expected} columns of the file"
                )));
            }
            let dropped: BTreeSet<usize> = drop_cols.iter().copied().collect();
            feature_cols = (1..=expected)
                .filter(|c| Some(*c) != label_col && !dropped.contains(c))
                .collect();
            if feature_cols.is_empty() {
                return Err(Error::Schema("no feature columns remain".into()));
            }
        }

        if let Some(c) = label_col {
            table.label_tokens.push((line, record[c - 1].to_owned()));
        }
        for &c in &feature_cols {
            let cell = &record[c - 1];
            if is_missing_token(cell) {
                table.values.push(0.0);
                table.mask.push(true);
                continue;
            }
            let v: f64 = cell.parse().map_err(|_| Error::Parse {
                line,
                message: format!("column {c}: `{cell}` is not a number"),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    line,
                    message: format!("column {c}: `{cell}` is not finite"),
                });
            }
            table.values.push(v);
            table.mask.push(false);
        }
        table.rows += 1;
    }
    if table.rows == 0 {
        return Err(Error::EmptyDataset);
    }
    table.cols = feature_cols.len();
    Ok(table)
}

/// Parses CSV text from any reader. `"?"` and empty cells are missing.
pub fn read_csv<R: Read>(reader: R, name: impl Into<String>, schema: &Schema) -> Result<Dataset> {
    schema.validate()?;
    let table = parse_table(reader, schema.has_header, Some(schema.label_col), &schema.drop_cols)?;

    let mut negative = schema.negative.clone();
    let mut labels = Vec::with_capacity(table.rows);
    for (line, token) in &table.label_tokens {
        let label = if *token == schema.positive {
            Label::Positive
        } else {
            match &negative {
                Some(neg) if neg == token => Label::Negative,
                Some(neg) => {
                    return Err(Error::Schema(format!(
                        "line {line}: unknown label token `{token}` (expected `{}` or `{neg}`)",
                        schema.positive
                    )))
                }
                None => {
                    negative = Some(token.clone());
                    Label::Negative
                }
            }
        };
        labels.push(label);
    }

    let features = DMatrix::from_row_slice(table.rows, table.cols, &table.values);
    let missing = DMatrix::from_row_slice(table.rows, table.cols, &table.mask);
    Dataset::new(name, features, labels, missing)
}

/// Unlabelled feature rows, as fed to a trained model.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureTable {
    pub features: DMatrix<f64>,
    pub missing: DMatrix<bool>,
}

impl FeatureTable {
    /// Copy with masked cells replaced by `fills[column]`.
    pub fn filled(&self, fills: &[f64]) -> Result<DMatrix<f64>> {
        if fills.len() != self.features.ncols() {
            return Err(Error::Dimension {
                expected: self.features.ncols(),
                found: fills.len(),
            });
        }
        let mut out = self.features.clone();
        for j in 0..out.ncols() {
            for i in 0..out.nrows() {
                if self.missing[(i, j)] {
                    out[(i, j)] = fills[j];
                }
            }
        }
        Ok(out)
    }
}

/// Reads feature rows, ignoring `label_col` when given.
pub fn read_features_csv<R: Read>(
    reader: R,
    label_col: Option<usize>,
    drop_cols: &[usize],
    has_header: bool,
) -> Result<FeatureTable> {
    let table = parse_table(reader, has_header, label_col, drop_cols)?;
    Ok(FeatureTable {
        features: DMatrix::from_row_slice(table.rows, table.cols, &table.values),
        missing: DMatrix::from_row_slice(table.rows, table.cols, &table.mask),
    })
}

/// Writes features followed by the label column; masked cells become `"?"`.
pub fn write_csv<W: Write>(ds: &Dataset, writer: W, positive: &str, negative: &str) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let m = ds.n_features();
    for i in 0..ds.n_instances() {
        let mut rec: Vec<String> = (0..m)
            .map(|j| {
                if ds.is_missing(i, j) {
                    "?".to_owned()
                } else {
                    ds.features[(i, j)].to_string()
                }
            })
            .collect();
        rec.push(match ds.labels[i] {
            Label::Positive => positive.to_owned(),
            Label::Negative => negative.to_owned(),
        });
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Per-column mean of unmasked values over `rows`; `None` where every
/// such cell is masked.
pub fn column_means(ds: &Dataset, rows: &[usize]) -> Vec<Option<f64>> {
    (0..ds.n_features())
        .map(|j| {
            let (sum, count) = rows
                .iter()
                .filter(|&&i| !ds.missing[(i, j)])
                .fold((0.0, 0usize), |(s, c), &i| (s + ds.features[(i, j)], c + 1));
            (count > 0).then(|| sum / count as f64)
        })
        .collect()
}

/// Replaces each masked cell with the mean of its column over `train_rows`.
/// The mask is kept for provenance.
pub fn impute(ds: &Dataset, train_rows: &[usize]) -> Result<Dataset> {
    if train_rows.is_empty() {
        return Err(Error::Config("imputation needs at least one training row".into()));
    }
    if !ds.has_missing() {
        return Ok(ds.clone());
    }
    let means = column_means(ds, train_rows);
    let mut out = ds.clone();
    for (j, mean) in means.iter().enumerate() {
        let column_masked = ds.missing.column(j).iter().any(|&b| b);
        if !column_masked {
            continue;
        }
        let mean = mean.ok_or(Error::Imputation { column: j })?;
        for i in 0..ds.n_instances() {
            if ds.missing[(i, j)] {
                out.features[(i, j)] = mean;
            }
        }
    }
    Ok(out)
}

/// Assignment of every instance to one of `k` folds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldAssignment {
    pub k: usize,
    pub fold_of: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl FoldAssignment {
    pub fn test_rows(&self, fold: usize) -> Vec<usize> {
        (0..self.fold_of.len())
            .filter(|&i| self.fold_of[i] == fold)
            .collect()
    }

    pub fn train_rows(&self, fold: usize) -> Vec<usize> {
        (0..self.fold_of.len())
            .filter(|&i| self.fold_of[i] != fold)
            .collect()
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &f in &self.fold_of {
            sizes[f] += 1;
        }
        sizes
    }
}

pub fn stratified_folds(ds: &Dataset, k: usize, seed: u64) -> Result<FoldAssignment> {
    stratified_folds_for_labels(ds.labels(), k, seed)
}

/// Shuffles each class with a seeded ChaCha8 stream, then deals positives
/// and then negatives round-robin, continuing the fold cursor between
/// classes so overall fold sizes also differ by at most one.
pub fn stratified_folds_for_labels(labels: &[Label], k: usize, seed: u64) -> Result<FoldAssignment> {
    let n = labels.len();
    if k < 2 {
        return Err(Error::Config(format!("fold count must be at least 2, got {k}")));
    }
    if k > n {
        return Err(Error::Config(format!(
            "fold count {k} exceeds the {n} available instances"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fold_of = vec![0; n];
    let mut warnings = Vec::new();
    let mut cursor = 0;
    for class in [Label::Positive, Label::Negative] {
        let mut members: Vec<usize> = (0..n).filter(|&i| labels[i] == class).collect();
        if members.len() < k {
            warnings.push(format!(
                "{class} class has {} members, fewer than {k} folds",
                members.len()
            ));
        }
        members.shuffle(&mut rng);
        for i in members {
            fold_of[i] = cursor % k;
            cursor += 1;
        }
    }
    Ok(FoldAssignment { k, fold_of, warnings })
}
