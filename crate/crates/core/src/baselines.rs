//! Reference classifiers for the comparison tables: Gaussian naive Bayes and
//! Euclidean k-nearest-neighbours.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::classifier::{check_instance, check_training_input, Classifier};
use crate::dataset::Label;
use crate::error::{Error, Result};

pub const VARIANCE_FLOOR: f64 = 1e-9;
pub const DEFAULT_KNN_K: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassStats {
    pub prior: f64,
    pub means: Vec<f64>,
    pub variances: Vec<f64>,
}

impl ClassStats {
    fn log_joint(&self, x: &[f64]) -> f64 {
        let log_density: f64 = x
            .iter()
            .zip(self.means.iter().zip(&self.variances))
            .map(|(&v, (&mu, &var))| -0.5 * ((2.0 * PI * var).ln() + (v - mu) * (v - mu) / var))
            .sum();
        self.prior.ln() + log_density
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GnbModel {
    pub positive: ClassStats,
    pub negative: ClassStats,
}

fn class_stats(features: &DMatrix<f64>, labels: &[Label], class: Label) -> ClassStats {
    let rows: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
    let count = rows.len() as f64;
    let m = features.ncols();
    let means: Vec<f64> = (0..m)
        .map(|j| rows.iter().map(|&i| features[(i, j)]).sum::<f64>() / count)
        .collect();
    let variances = (0..m)
        .map(|j| {
            let var = rows
                .iter()
                .map(|&i| (features[(i, j)] - means[j]).powi(2))
                .sum::<f64>()
                / count;
            var.max(VARIANCE_FLOOR)
        })
        .collect();
    ClassStats {
        prior: count / labels.len() as f64,
        means,
        variances,
    }
}

pub fn gnb_train(features: &DMatrix<f64>, labels: &[Label]) -> Result<GnbModel> {
    check_training_input(features, labels)?;
    let positives = labels.iter().filter(|l| l.is_positive()).count();
    if positives == 0 || positives == labels.len() {
        return Err(Error::Training(
            "naive Bayes needs at least one instance of each class".into(),
        ));
    }
    Ok(GnbModel {
        positive: class_stats(features, labels, Label::Positive),
        negative: class_stats(features, labels, Label::Negative),
    })
}

/// Class with the larger log-posterior; ties go to the negative class.
pub fn gnb_predict(model: &GnbModel, instance: &[f64]) -> Result<Label> {
    check_instance(instance, model.positive.means.len())?;
    let pos = model.positive.log_joint(instance);
    let neg = model.negative.log_joint(instance);
    Ok(if pos > neg {
        Label::Positive
    } else {
        Label::Negative
    })
}

impl Classifier for GnbModel {
    fn n_features(&self) -> usize {
        self.positive.means.len()
    }

    fn predict(&self, instance: &[f64]) -> Result<Label> {
        gnb_predict(self, instance)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KnnModel {
    features: DMatrix<f64>,
    labels: Vec<Label>,
    k: usize,
}

impl KnnModel {
    pub fn k(&self) -> usize {
        self.k
    }
}

/// Validates `k` (odd, at most the training size) and stores the data.
pub fn knn_train(features: &DMatrix<f64>, labels: &[Label], k: usize) -> Result<KnnModel> {
    check_training_input(features, labels)?;
    if k == 0 || k.is_multiple_of(2) {
        return Err(Error::Config(format!("KNN k must be a positive odd number, got {k}")));
    }
    if k > labels.len() {
        return Err(Error::Config(format!(
            "KNN k = {k} exceeds the {} training instances",
            labels.len()
        )));
    }
    Ok(KnnModel {
        features: features.clone(),
        labels: labels.to_vec(),
        k,
    })
}

/// Majority label among the `k` nearest rows; equal distances prefer the
/// lower row index.
pub fn knn_predict(model: &KnnModel, instance: &[f64]) -> Result<Label> {
    check_instance(instance, model.features.ncols())?;
    let mut dist: Vec<(f64, usize)> = (0..model.features.nrows())
        .map(|i| {
            let d2: f64 = model
                .features
                .row(i)
                .iter()
                .zip(instance)
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            (d2, i)
        })
        .collect();
    dist.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let positives = dist[..model.k]
        .iter()
        .filter(|&&(_, i)| model.labels[i].is_positive())
        .count();
    Ok(if 2 * positives > model.k {
        Label::Positive
    } else {
        Label::Negative
    })
}

impl Classifier for KnnModel {
    fn n_features(&self) -> usize {
        self.features.ncols()
    }

    fn predict(&self, instance: &[f64]) -> Result<Label> {
        knn_predict(self, instance)
    }
}
