//! k-fold cross-validation and the confusion-matrix metrics reported for
//! every method.

use std::fmt;
use std::io::Write;
use std::ops::Add;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::{gnb_train, knn_train, GnbModel, KnnModel, DEFAULT_KNN_K};
use crate::classifier::Classifier;
use crate::dataset::{impute, stratified_folds, Dataset, Label};
use crate::error::{Error, Result};
use crate::lperceptron::{train_traced, Hyperparameters, LPerceptronModel, TrainingTrace};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

impl ConfusionMatrix {
    pub fn total(&self) -> usize {
        self.tp + self.fp + self.tn + self.fn_
    }

    pub fn actual_positives(&self) -> usize {
        self.tp + self.fn_
    }

    pub fn actual_negatives(&self) -> usize {
        self.tn + self.fp
    }
}

impl Add for ConfusionMatrix {
    type Output = ConfusionMatrix;

    fn add(self, o: ConfusionMatrix) -> ConfusionMatrix {
        ConfusionMatrix {
            tp: self.tp + o.tp,
            fp: self.fp + o.fp,
            tn: self.tn + o.tn,
            fn_: self.fn_ + o.fn_,
        }
    }
}

impl std::iter::Sum for ConfusionMatrix {
    fn sum<I: Iterator<Item = ConfusionMatrix>>(iter: I) -> Self {
        iter.fold(ConfusionMatrix::default(), Add::add)
    }
}

pub fn confusion(predicted: &[Label], actual: &[Label]) -> Result<ConfusionMatrix> {
    if predicted.len() != actual.len() {
        return Err(Error::Dimension {
            expected: actual.len(),
            found: predicted.len(),
        });
    }
    if actual.is_empty() {
        return Err(Error::Config("confusion matrix needs at least one instance".into()));
    }
    let mut cm = ConfusionMatrix::default();
    for (&p, &a) in predicted.iter().zip(actual) {
        match (p, a) {
            (Label::Positive, Label::Positive) => cm.tp += 1,
            (Label::Positive, Label::Negative) => cm.fp += 1,
            (Label::Negative, Label::Negative) => cm.tn += 1,
            (Label::Negative, Label::Positive) => cm.fn_ += 1,
        }
    }
    Ok(cm)
}

/// Rates derived from a confusion matrix, each in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub accuracy: f64,
    pub sensitivity: f64,
    pub specificity: f64,
    pub precision: f64,
    pub f1: f64,
    /// Metrics whose denominator was zero and were set to 0.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub degenerate: Vec<String>,
}

fn ratio(num: usize, den: usize, name: &str, degenerate: &mut Vec<String>) -> f64 {
    if den == 0 {
        degenerate.push(name.to_owned());
        0.0
    } else {
        num as f64 / den as f64
    }
}

pub fn metrics(cm: &ConfusionMatrix) -> Result<Metrics> {
    let total = cm.total();
    if total == 0 {
        return Err(Error::Config("metrics of an empty confusion matrix".into()));
    }
    let mut degenerate = Vec::new();
    let accuracy = (cm.tp + cm.tn) as f64 / total as f64;
    let sensitivity = ratio(cm.tp, cm.tp + cm.fn_, "sensitivity", &mut degenerate);
    let specificity = ratio(cm.tn, cm.tn + cm.fp, "specificity", &mut degenerate);
    let precision = ratio(cm.tp, cm.tp + cm.fp, "precision", &mut degenerate);
    let f1 = if precision + sensitivity == 0.0 {
        degenerate.push("f1".to_owned());
        0.0
    } else {
        2.0 * precision * sensitivity / (precision + sensitivity)
    };
    Ok(Metrics {
        accuracy,
        sensitivity,
        specificity,
        precision,
        f1,
        degenerate,
    })
}

/// Which classifier a cross-validation run trains.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Method {
    Lperceptron { hyperparameters: Hyperparameters },
    NaiveBayes,
    Knn { k: usize },
}

impl Method {
    pub fn knn_default() -> Self {
        Method::Knn { k: DEFAULT_KNN_K }
    }

    pub fn display_name(&self) -> &'static str {
        match self {
            Method::Lperceptron { .. } => "L-Perceptron",
            Method::NaiveBayes => "Naive Bayes",
            Method::Knn { .. } => "KNN",
        }
    }

    pub fn hyperparameters(&self) -> Option<&Hyperparameters> {
        match self {
            Method::Lperceptron { hyperparameters } => Some(hyperparameters),
            _ => None,
        }
    }

    pub fn train(&self, features: &DMatrix<f64>, labels: &[Label]) -> Result<TrainedModel> {
        Ok(match self {
            Method::Lperceptron { hyperparameters } => {
                let (model, trace) = train_traced(features, labels, hyperparameters)?;
                TrainedModel::Lperceptron(model, trace)
            }
            Method::NaiveBayes => TrainedModel::NaiveBayes(gnb_train(features, labels)?),
            Method::Knn { k } => TrainedModel::Knn(knn_train(features, labels, *k)?),
        })
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.display_name())
    }
}

pub enum TrainedModel {
    Lperceptron(LPerceptronModel, TrainingTrace),
    NaiveBayes(GnbModel),
    Knn(KnnModel),
}

impl TrainedModel {
    pub fn classifier(&self) -> &dyn Classifier {
        match self {
            TrainedModel::Lperceptron(m, _) => m,
            TrainedModel::NaiveBayes(m) => m,
            TrainedModel::Knn(m) => m,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldResult {
    pub fold: usize,
    pub train_size: usize,
    pub test_size: usize,
    pub confusion: ConfusionMatrix,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub positive_above: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degrees: Option<Vec<usize>>,
    /// Training misclassifications with positives above / below the threshold.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orientation_errors: Option<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub method: String,
    pub dataset: String,
    pub k: usize,
    pub seed: u64,
    pub trainer: Method,
    pub per_fold: Vec<FoldResult>,
    /// Entrywise sum of the per-fold matrices.
    pub pooled: ConfusionMatrix,
    /// Headline metrics, computed from `pooled`.
    pub metrics: Metrics,
    /// Unweighted mean of the per-fold metrics.
    pub fold_mean: Metrics,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

fn run_fold(ds: &Dataset, fold: usize, train_rows: &[usize], test_rows: &[usize], method: &Method) -> Result<FoldResult> {
    let filled = impute(ds, train_rows)?;
    let train = filled.select_rows(train_rows)?;
    let test = filled.select_rows(test_rows)?;
    let mut warnings = Vec::new();
    let (pos, neg) = train.class_counts();
    if pos == 0 || neg == 0 {
        warnings.push(format!("fold {fold}: training partition holds a single class"));
    }
    let trained = method.train(train.features(), train.labels())?;
    let predicted = trained.classifier().predict_batch(test.features())?;
    let cm = confusion(&predicted, test.labels())?;
    let mut result = FoldResult {
        fold,
        train_size: train_rows.len(),
        test_size: test_rows.len(),
        confusion: cm,
        positive_above: None,
        degrees: None,
        orientation_errors: None,
        warnings,
    };
    if let TrainedModel::Lperceptron(model, trace) = &trained {
        result.positive_above = Some(model.positive_above());
        result.degrees = Some(model.degrees().to_vec());
        result.orientation_errors = Some(trace.orientation_errors);
    }
    Ok(result)
}

fn mean_metrics(all: &[Metrics]) -> Metrics {
    let n = all.len() as f64;
    let avg = |f: fn(&Metrics) -> f64| all.iter().map(f).sum::<f64>() / n;
    Metrics {
        accuracy: avg(|m| m.accuracy),
        sensitivity: avg(|m| m.sensitivity),
        specificity: avg(|m| m.specificity),
        precision: avg(|m| m.precision),
        f1: avg(|m| m.f1),
        degenerate: Vec::new(),
    }
}

/// Stratified k-fold cross-validation. Missing cells are imputed per fold
/// from that fold's training rows. Folds run in parallel; results are
/// assembled in fold order.
pub fn cross_validate(ds: &Dataset, k: usize, seed: u64, method: &Method) -> Result<EvaluationReport> {
    if let Some(h) = method.hyperparameters() {
        h.validate()?;
    }
    let folds = stratified_folds(ds, k, seed)?;
    let per_fold = (0..k)
        .into_par_iter()
        .map(|f| run_fold(ds, f, &folds.train_rows(f), &folds.test_rows(f), method))
        .collect::<Result<Vec<_>>>()?;

    let mut warnings = folds.warnings.clone();
    warnings.extend(per_fold.iter().flat_map(|r| r.warnings.iter().cloned()));

    let pooled: ConfusionMatrix = per_fold.iter().map(|r| r.confusion).sum();
    let headline = metrics(&pooled)?;
    if !headline.degenerate.is_empty() {
        warnings.push(format!(
            "degenerate pooled metrics set to 0: {}",
            headline.degenerate.join(", ")
        ));
    }
    let fold_metrics = per_fold
        .iter()
        .map(|r| metrics(&r.confusion))
        .collect::<Result<Vec<_>>>()?;
    let fold_mean = mean_metrics(&fold_metrics);

    Ok(EvaluationReport {
        method: method.display_name().to_owned(),
        dataset: ds.name().to_owned(),
        k,
        seed,
        trainer: method.clone(),
        per_fold,
        pooled,
        metrics: headline,
        fold_mean,
        warnings,
    })
}

/// Percentage with two decimals, as printed in the comparison tables.
pub fn percent(rate: f64) -> String {
    format!("{:.2}", 100.0 * rate)
}

pub const REPORT_CSV_HEADER: [&str; 7] = [
    "method",
    "dataset",
    "accuracy",
    "sensitivity",
    "specificity",
    "f1",
    "source",
];

impl EvaluationReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn csv_record(&self) -> [String; 7] {
        [
            self.method.clone(),
            self.dataset.clone(),
            percent(self.metrics.accuracy),
            percent(self.metrics.sensitivity),
            percent(self.metrics.specificity),
            percent(self.metrics.f1),
            "measured".to_owned(),
        ]
    }

    /// Whether every fold chose the same threshold orientation
    /// (vacuously true for methods without one).
    pub fn orientation_stable(&self) -> bool {
        let mut flags = self.per_fold.iter().filter_map(|f| f.positive_above);
        match flags.next() {
            Some(first) => flags.all(|f| f == first),
            None => true,
        }
    }
}

/// Writes reports as a flat CSV, one row per report.
pub fn write_reports_csv<W: Write>(reports: &[EvaluationReport], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(REPORT_CSV_HEADER)?;
    for r in reports {
        w.write_record(r.csv_record())?;
    }
    w.flush()?;
    Ok(())
}
