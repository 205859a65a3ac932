//! Library side of the `lperc` subcommands. The binary only parses flags,
//! does file I/O and maps errors to exit codes.

use std::io::Write;

use crate::classifier::Classifier;
use crate::config::{ExperimentConfig, ReportFormat};
use crate::dataset::{column_means, impute, Dataset, FeatureTable, Label};
use crate::error::{Error, Result};
use crate::evaluation::{
    cross_validate, percent, write_reports_csv, EvaluationReport, Method,
};
use crate::lperceptron::{train, Hyperparameters, LPerceptronModel};
use crate::presets;
use crate::reference;

pub fn run_cv(cfg: &ExperimentConfig) -> Result<EvaluationReport> {
    cfg.validate()?;
    let ds = cfg.load_dataset()?;
    cross_validate(&ds, cfg.k, cfg.seed, &cfg.method)
}

pub fn render_report(report: &EvaluationReport, format: ReportFormat) -> Result<Vec<u8>> {
    match format {
        ReportFormat::Json => {
            let mut text = report.to_json()?;
            text.push('\n');
            Ok(text.into_bytes())
        }
        ReportFormat::Csv => {
            let mut buf = Vec::new();
            write_reports_csv(std::slice::from_ref(report), &mut buf)?;
            Ok(buf)
        }
    }
}

/// Four headline metrics as two-decimal percentages.
pub fn headline(report: &EvaluationReport) -> String {
    let m = &report.metrics;
    format!(
        "{} on {} ({}-fold, seed {})\naccuracy    {}\nsensitivity {}\nspecificity {}\nf1          {}\n",
        report.method,
        report.dataset,
        report.k,
        report.seed,
        percent(m.accuracy),
        percent(m.sensitivity),
        percent(m.specificity),
        percent(m.f1),
    )
}

/// Per-fold breakdown for verbose output.
pub fn fold_details(report: &EvaluationReport) -> String {
    let mut s = String::new();
    for f in &report.per_fold {
        let c = &f.confusion;
        s.push_str(&format!(
            "fold {:>2}: train {:>4} test {:>3}  tp {:>3} fp {:>3} tn {:>3} fn {:>3}",
            f.fold, f.train_size, f.test_size, c.tp, c.fp, c.tn, c.fn_
        ));
        if let (Some(above), Some([up, down])) = (f.positive_above, f.orientation_errors) {
            s.push_str(&format!(
                "  positive_above {above} (train errors: above {up}, below {down})"
            ));
        }
        if let Some(d) = &f.degrees {
            s.push_str(&format!("  degrees {d:?}"));
        }
        s.push('\n');
    }
    let m = &report.fold_mean;
    s.push_str(&format!(
        "fold mean: accuracy {} sensitivity {} specificity {} f1 {}\n",
        percent(m.accuracy),
        percent(m.sensitivity),
        percent(m.specificity),
        percent(m.f1)
    ));
    s
}

/// Trains an L-Perceptron on every row of the configured dataset. Missing
/// cells are filled with column means, which are stored in the model.
pub fn train_full(cfg: &ExperimentConfig) -> Result<LPerceptronModel> {
    cfg.validate()?;
    let hyper = cfg.method.hyperparameters().ok_or_else(|| {
        Error::Config(format!(
            "`train` builds L-Perceptron models; method is {}",
            cfg.method
        ))
    })?;
    train_dataset(&cfg.load_dataset()?, hyper)
}

/// Trains on every row of `ds`, filling missing cells with column means and
/// storing those means in the model.
pub fn train_dataset(ds: &Dataset, hyper: &Hyperparameters) -> Result<LPerceptronModel> {
    let all: Vec<usize> = (0..ds.n_instances()).collect();
    let filled = impute(ds, &all)?;
    let fills = column_means(ds, &all)
        .into_iter()
        .enumerate()
        .map(|(column, m)| m.ok_or(Error::Imputation { column }))
        .collect::<Result<Vec<_>>>()?;
    train(filled.features(), filled.labels(), hyper)?.with_fill_values(fills)
}

/// Scores and labels for every row of `table`.
pub fn predict_table(model: &LPerceptronModel, table: &FeatureTable) -> Result<Vec<(f64, Label)>> {
    if table.features.ncols() != model.n_features() {
        return Err(Error::Dimension {
            expected: model.n_features(),
            found: table.features.ncols(),
        });
    }
    let features = if table.missing.iter().any(|&b| b) {
        let fills = model.fill_values().ok_or_else(|| {
            Error::Schema("input has missing cells but the model stores no fill values".into())
        })?;
        table.filled(fills)?
    } else {
        table.features.clone()
    };
    (0..features.nrows())
        .map(|i| {
            let row: Vec<f64> = features.row(i).iter().copied().collect();
            let score = model.score(&row)?;
            Ok((score, model.label_for_score(score)))
        })
        .collect()
}

pub fn write_predictions_csv<W: Write>(predictions: &[(f64, Label)], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["row", "score", "label"])?;
    for (i, (score, label)) in predictions.iter().enumerate() {
        w.write_record([i.to_string(), score.to_string(), label.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowSource {
    Measured,
    PaperReported,
}

impl RowSource {
    pub fn as_str(self) -> &'static str {
        match self {
            RowSource::Measured => "measured",
            RowSource::PaperReported => "paper-reported",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompareRow {
    pub method: String,
    pub accuracy: String,
    pub sensitivity: String,
    pub specificity: String,
    pub f1: String,
    pub source: RowSource,
}

/// Measured rows for the in-repo methods followed by the published rows for
/// the same bundled dataset.
pub fn compare(dataset: &str, k: usize, seed: u64) -> Result<Vec<CompareRow>> {
    let bundled = presets::bundled(dataset)?;
    let published = reference::rows_for(bundled.name)
        .ok_or_else(|| Error::Config(format!("no published rows for `{dataset}`")))?;
    let ds = bundled.load()?;
    let lp = presets::preset(&format!("{}-lp", bundled.name), seed)?.method;
    let methods = [lp, Method::NaiveBayes, Method::knn_default()];

    let mut rows = Vec::new();
    for method in &methods {
        let report = cross_validate(&ds, k, seed, method)?;
        let m = &report.metrics;
        rows.push(CompareRow {
            method: report.method,
            accuracy: percent(m.accuracy),
            sensitivity: percent(m.sensitivity),
            specificity: percent(m.specificity),
            f1: percent(m.f1),
            source: RowSource::Measured,
        });
    }
    rows.extend(published.iter().map(|r| CompareRow {
        method: r.method.to_owned(),
        accuracy: r.accuracy.to_owned(),
        sensitivity: r.sensitivity.to_owned(),
        specificity: r.specificity.to_owned(),
        f1: r.f1.to_owned(),
        source: RowSource::PaperReported,
    }));
    Ok(rows)
}

pub fn write_compare_csv<W: Write>(rows: &[CompareRow], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["method", "accuracy", "sensitivity", "specificity", "f1", "source"])?;
    for r in rows {
        w.write_record([
            r.method.as_str(),
            &r.accuracy,
            &r.sensitivity,
            &r.specificity,
            &r.f1,
            r.source.as_str(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
