//! The L-Perceptron: one least-squares function per feature, fitted to
//! class target values, summed and passed through a step activation.
//!
//! Training tunes each feature's polynomial degree with a greedy pass over
//! the features: raise one degree, keep it if the training error drops,
//! otherwise put it back.

use nalgebra::DMatrix;
use serde_json::value::RawValue;
use serde::{Deserialize, Serialize, Serializer};

use crate::classifier::{check_instance, check_training_input, Classifier};
use crate::dataset::Label;
use crate::error::{Error, Result};
use crate::polyfit::{
    build_targets_for, FeatureFunction, FittingFamily, Polynomial, PolynomialFamily,
};

/// Error the update rule minimizes.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ErrorMetric {
    /// Training misclassifications under the full predict pipeline.
    #[default]
    Misclassification,
    /// Sum over features of the per-feature squared residuals.
    Sse,
}

impl std::str::FromStr for ErrorMetric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "misclassification" => Ok(ErrorMetric::Misclassification),
            "sse" => Ok(ErrorMetric::Sse),
            other => Err(Error::Config(format!("unknown error metric `{other}`"))),
        }
    }
}

impl std::fmt::Display for ErrorMetric {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ErrorMetric::Misclassification => "misclassification",
            ErrorMetric::Sse => "sse",
        })
    }
}

fn default_p1_label() -> Label {
    Label::Positive
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hyperparameters {
    /// Target value for instances of class `p1_label`.
    pub p1: f64,
    /// Target value for the other class.
    pub p2: f64,
    /// Degree lower bound; every feature starts here.
    pub dlb: usize,
    /// Degree upper bound.
    pub dub: usize,
    /// Maximum number of update-rule passes.
    pub ite: usize,
    /// Activation threshold.
    pub threshold: f64,
    /// Which class receives `p1`.
    #[serde(default = "default_p1_label")]
    pub p1_label: Label,
    #[serde(default)]
    pub error_metric: ErrorMetric,
}

impl Hyperparameters {
    pub fn new(p1: f64, p2: f64, dlb: usize, dub: usize, ite: usize, threshold: f64) -> Self {
        Hyperparameters {
            p1,
            p2,
            dlb,
            dub,
            ite,
            threshold,
            p1_label: Label::Positive,
            error_metric: ErrorMetric::Misclassification,
        }
    }

    pub fn with_p1_label(mut self, label: Label) -> Self {
        self.p1_label = label;
        self
    }

    pub fn with_error_metric(mut self, metric: ErrorMetric) -> Self {
        self.error_metric = metric;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p1.is_finite() && self.p2.is_finite() && self.threshold.is_finite()) {
            return Err(Error::Config("p1, p2 and threshold must be finite".into()));
        }
        if self.p1 == self.p2 {
            return Err(Error::Config("p1 and p2 must differ".into()));
        }
        if self.dlb > self.dub {
            return Err(Error::Config(format!(
                "degree lower bound {} exceeds upper bound {}",
                self.dlb, self.dub
            )));
        }
        Ok(())
    }

    /// Target value attached to `label`.
    pub fn target_of(&self, label: Label) -> f64 {
        if label == self.p1_label {
            self.p1
        } else {
            self.p2
        }
    }

    /// Orientation preferred when both orientations tie on training data:
    /// positives above the threshold iff their target is the larger one.
    pub fn preferred_positive_above(&self) -> bool {
        self.target_of(Label::Positive) > self.target_of(Label::Negative)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LPerceptronModel<F = Polynomial> {
    per_feature: Vec<F>,
    degrees: Vec<usize>,
    hyper: Hyperparameters,
    positive_above: bool,
    fill_values: Option<Vec<f64>>,
}

impl<F: FeatureFunction> LPerceptronModel<F> {
    pub fn from_parts(
        per_feature: Vec<F>,
        hyper: Hyperparameters,
        positive_above: bool,
    ) -> Result<Self> {
        hyper.validate()?;
        if per_feature.is_empty() {
            return Err(Error::Config("model needs at least one feature".into()));
        }
        let degrees: Vec<usize> = per_feature.iter().map(|f| f.complexity()).collect();
        if let Some(d) = degrees.iter().find(|&&d| d < hyper.dlb || d > hyper.dub) {
            return Err(Error::Config(format!(
                "degree {d} lies outside [{}, {}]",
                hyper.dlb, hyper.dub
            )));
        }
        Ok(LPerceptronModel {
            per_feature,
            degrees,
            hyper,
            positive_above,
            fill_values: None,
        })
    }

    pub fn per_feature(&self) -> &[F] {
        &self.per_feature
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn hyperparameters(&self) -> &Hyperparameters {
        &self.hyper
    }

    pub fn positive_above(&self) -> bool {
        self.positive_above
    }

    pub fn fill_values(&self) -> Option<&[f64]> {
        self.fill_values.as_deref()
    }

    /// Attaches per-feature values used to fill missing cells at prediction time.
    pub fn with_fill_values(mut self, fills: Vec<f64>) -> Result<Self> {
        if fills.len() != self.per_feature.len() {
            return Err(Error::Dimension {
                expected: self.per_feature.len(),
                found: fills.len(),
            });
        }
        if fills.iter().any(|v| !v.is_finite()) {
            return Err(Error::NumericInput("fill values must be finite".into()));
        }
        self.fill_values = Some(fills);
        Ok(self)
    }

    pub fn score(&self, instance: &[f64]) -> Result<f64> {
        check_instance(instance, self.per_feature.len())?;
        Ok(raw_score(&self.per_feature, instance))
    }

    /// Applies the step activation to an already computed score.
    /// A score equal to the threshold counts as "not above".
    pub fn label_for_score(&self, score: f64) -> Label {
        activate(score, self.hyper.threshold, self.positive_above)
    }
}

impl<F: FeatureFunction> Classifier for LPerceptronModel<F> {
    fn n_features(&self) -> usize {
        self.per_feature.len()
    }

    fn predict(&self, instance: &[f64]) -> Result<Label> {
        Ok(self.label_for_score(self.score(instance)?))
    }
}

fn raw_score<F: FeatureFunction>(fs: &[F], instance: &[f64]) -> f64 {
    fs.iter().zip(instance).map(|(f, &x)| f.eval(x)).sum()
}

fn activate(score: f64, threshold: f64, positive_above: bool) -> Label {
    let above = score > threshold;
    if above == positive_above {
        Label::Positive
    } else {
        Label::Negative
    }
}

/// Record of one training run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingTrace {
    /// Error of the all-`dlb` starting model.
    pub initial_error: f64,
    /// Current error after every tentative step, in order.
    pub errors: Vec<f64>,
    pub tentative_refits: usize,
    pub passes: usize,
    /// Final training misclassifications with positives above / below the threshold.
    pub orientation_errors: [usize; 2],
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl TrainingTrace {
    pub fn final_error(&self) -> f64 {
        self.errors.last().copied().unwrap_or(self.initial_error)
    }
}

/// Misclassifications with positives above and below the threshold.
fn orientation_mistakes(scores: &[f64], labels: &[Label], threshold: f64) -> [usize; 2] {
    let mut above_wrong = 0;
    let mut below_wrong = 0;
    for (&s, &l) in scores.iter().zip(labels) {
        if activate(s, threshold, true) != l {
            above_wrong += 1;
        }
        if activate(s, threshold, false) != l {
            below_wrong += 1;
        }
    }
    [above_wrong, below_wrong]
}

struct FeatureState<F> {
    function: F,
    outputs: Vec<f64>,
    sse: f64,
}

fn fit_feature<Fam: FittingFamily>(
    family: &Fam,
    xs: &[f64],
    targets: &[f64],
    degree: usize,
) -> Result<FeatureState<Fam::Function>> {
    let function = family.fit(xs, targets, degree)?;
    let outputs: Vec<f64> = xs.iter().map(|&x| function.eval(x)).collect();
    let sse = outputs
        .iter()
        .zip(targets)
        .map(|(o, t)| (t - o) * (t - o))
        .sum();
    Ok(FeatureState {
        function,
        outputs,
        sse,
    })
}

struct Trainer<'a> {
    labels: &'a [Label],
    hyper: &'a Hyperparameters,
    scores: Vec<f64>,
}

impl Trainer<'_> {
    fn error<F>(&self, states: &[FeatureState<F>]) -> f64 {
        match self.hyper.error_metric {
            ErrorMetric::Misclassification => {
                let [a, b] = orientation_mistakes(&self.scores, self.labels, self.hyper.threshold);
                a.min(b) as f64
            }
            ErrorMetric::Sse => states.iter().map(|s| s.sse).sum(),
        }
    }

    fn recompute_scores<F>(&mut self, states: &[FeatureState<F>]) {
        for (i, s) in self.scores.iter_mut().enumerate() {
            *s = states.iter().map(|st| st.outputs[i]).sum();
        }
    }
}

/// Trains with polynomial feature functions.
pub fn train(
    features: &DMatrix<f64>,
    labels: &[Label],
    hyper: &Hyperparameters,
) -> Result<LPerceptronModel> {
    train_traced(features, labels, hyper).map(|(m, _)| m)
}

pub fn train_traced(
    features: &DMatrix<f64>,
    labels: &[Label],
    hyper: &Hyperparameters,
) -> Result<(LPerceptronModel, TrainingTrace)> {
    train_with(&PolynomialFamily, features, labels, hyper)
}

pub fn train_with<Fam: FittingFamily>(
    family: &Fam,
    features: &DMatrix<f64>,
    labels: &[Label],
    hyper: &Hyperparameters,
) -> Result<(LPerceptronModel<Fam::Function>, TrainingTrace)> {
    hyper.validate()?;
    check_training_input(features, labels)?;
    let (n, m) = features.shape();
    let mut warnings = Vec::new();
    if labels.iter().all(|&l| l == labels[0]) {
        warnings.push(format!("training set holds only the {} class", labels[0]));
    }

    let targets = build_targets_for(labels, hyper.p1, hyper.p2, hyper.p1_label)?;
    let targets = targets.values();
    let columns: Vec<Vec<f64>> = (0..m)
        .map(|j| features.column(j).iter().copied().collect())
        .collect();

    let mut degrees = vec![hyper.dlb; m];
    let mut states = columns
        .iter()
        .map(|xs| fit_feature(family, xs, targets, hyper.dlb))
        .collect::<Result<Vec<_>>>()?;
    let mut trainer = Trainer {
        labels,
        hyper,
        scores: vec![0.0; n],
    };
    trainer.recompute_scores(&states);

    let initial_error = trainer.error(&states);
    let mut error = initial_error;
    let mut errors = Vec::new();
    let mut refits = 0;
    let mut passes = 0;

    for _ in 0..hyper.ite {
        passes += 1;
        let mut accepted = false;
        for j in 0..m {
            if degrees[j] >= hyper.dub {
                continue;
            }
            let candidate = fit_feature(family, &columns[j], targets, degrees[j] + 1)?;
            refits += 1;
            let previous = std::mem::replace(&mut states[j], candidate);
            trainer.recompute_scores(&states);
            let new_error = trainer.error(&states);
            if new_error < error {
                error = new_error;
                degrees[j] += 1;
                accepted = true;
            } else {
                states[j] = previous;
                trainer.recompute_scores(&states);
            }
            errors.push(error);
        }
        if !accepted {
            break;
        }
    }

    let orientation_errors = orientation_mistakes(&trainer.scores, labels, hyper.threshold);
    let positive_above = match orientation_errors[0].cmp(&orientation_errors[1]) {
        std::cmp::Ordering::Less => true,
        std::cmp::Ordering::Greater => false,
        std::cmp::Ordering::Equal => hyper.preferred_positive_above(),
    };

    let per_feature = states.into_iter().map(|s| s.function).collect();
    let model = LPerceptronModel::from_parts(per_feature, hyper.clone(), positive_above)?;
    debug_assert_eq!(model.degrees(), degrees.as_slice());
    let trace = TrainingTrace {
        initial_error,
        errors,
        tentative_refits: refits,
        passes,
        orientation_errors,
        warnings,
    };
    Ok((model, trace))
}

/// Misclassification count of `model` on a labelled matrix.
pub fn training_error<F: FeatureFunction>(
    model: &LPerceptronModel<F>,
    features: &DMatrix<f64>,
    labels: &[Label],
) -> Result<usize> {
    let predicted = model.predict_batch(features)?;
    Ok(predicted.iter().zip(labels).filter(|(p, l)| p != l).count())
}

pub const MODEL_SCHEMA_VERSION: u32 = 1;

struct Exact(f64);

impl Serialize for Exact {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        // 17 significant digits round-trip any f64 exactly
        let raw = RawValue::from_string(format!("{:.16e}", self.0)).map_err(serde::ser::Error::custom)?;
        raw.serialize(s)
    }
}

fn exact_matrix<S: Serializer>(rows: &[Vec<f64>], s: S) -> std::result::Result<S::Ok, S::Error> {
    let rows: Vec<Vec<Exact>> = rows
        .iter()
        .map(|r| r.iter().map(|&v| Exact(v)).collect())
        .collect();
    rows.serialize(s)
}

fn exact_option_vec<S: Serializer>(
    values: &Option<Vec<f64>>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match values {
        Some(v) => v.iter().map(|&x| Exact(x)).collect::<Vec<_>>().serialize(s),
        None => s.serialize_none(),
    }
}

#[derive(Serialize, Deserialize)]
struct ModelDocument {
    schema_version: u32,
    feature_count: usize,
    degrees: Vec<usize>,
    #[serde(serialize_with = "exact_matrix")]
    coefficients: Vec<Vec<f64>>,
    hyperparameters: Hyperparameters,
    positive_above: bool,
    #[serde(
        default,
        skip_serializing_if = "Option::is_none",
        serialize_with = "exact_option_vec"
    )]
    fill_values: Option<Vec<f64>>,
}

impl LPerceptronModel<Polynomial> {
    pub fn to_json(&self) -> Result<String> {
        let doc = ModelDocument {
            schema_version: MODEL_SCHEMA_VERSION,
            feature_count: self.per_feature.len(),
            degrees: self.degrees.clone(),
            coefficients: self
                .per_feature
                .iter()
                .map(|p| p.coefficients().to_vec())
                .collect(),
            hyperparameters: self.hyper.clone(),
            positive_above: self.positive_above,
            fill_values: self.fill_values.clone(),
        };
        Ok(serde_json::to_string_pretty(&doc)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ModelDocument = serde_json::from_str(text)?;
        if doc.schema_version != MODEL_SCHEMA_VERSION {
            return Err(Error::Schema(format!(
                "unsupported model schema version {}",
                doc.schema_version
            )));
        }
        if doc.degrees.len() != doc.feature_count || doc.coefficients.len() != doc.feature_count {
            return Err(Error::Schema(format!(
                "model declares {} features but lists {} degrees and {} coefficient vectors",
                doc.feature_count,
                doc.degrees.len(),
                doc.coefficients.len()
            )));
        }
        let per_feature = doc
            .coefficients
            .into_iter()
            .map(Polynomial::new)
            .collect::<Result<Vec<_>>>()?;
        for (j, (p, &d)) in per_feature.iter().zip(&doc.degrees).enumerate() {
            if p.degree() != d {
                return Err(Error::Schema(format!(
                    "feature {j}: degree {d} does not match {} coefficients",
                    p.coefficients().len()
                )));
            }
        }
        let model = LPerceptronModel::from_parts(per_feature, doc.hyperparameters, doc.positive_above)?;
        match doc.fill_values {
            Some(f) => model.with_fill_values(f),
            None => Ok(model),
        }
    }
}
