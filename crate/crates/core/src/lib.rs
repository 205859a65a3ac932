//! L-Perceptron classification engine and evaluation harness.
//!
//! The classifier fits one least-squares polynomial per feature against two
//! class target values, tunes each feature's degree greedily on training
//! error, and predicts by thresholding the sum of the per-feature outputs.
//! Around it sit CSV ingestion with missing values, stratified k-fold
//! cross-validation, confusion-matrix metrics and two reference baselines.

pub mod baselines;
pub mod classifier;
pub mod commands;
pub mod config;
pub mod dataset;
pub mod error;
pub mod evaluation;
pub mod lperceptron;
pub mod polyfit;
pub mod presets;
pub mod reference;

pub use classifier::Classifier;
pub use nalgebra::DMatrix;
pub use config::{DataSource, ExperimentConfig, ReportFormat};
pub use dataset::{impute, load_csv, read_csv, stratified_folds, Dataset, FoldAssignment, Label, Schema};
pub use error::{Error, ErrorKind, Result};
pub use evaluation::{confusion, cross_validate, metrics, ConfusionMatrix, EvaluationReport, Method, Metrics};
pub use lperceptron::{train, train_traced, ErrorMetric, Hyperparameters, LPerceptronModel, TrainingTrace};
pub use polyfit::{build_targets, evaluate, fit_polynomial, sse, Polynomial, TargetVector};
