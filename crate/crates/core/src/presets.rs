//! Bundled benchmark datasets and the experiment presets built on them.
//!
//! * `wbcd`: Wisconsin breast cancer (original), 699 rows, 9 integer
//!   features, sample code number dropped. Positive class: malignant (`4`).
//! * `hsd`: Haberman's survival data, 306 rows, 3 integer features.
//!   Positive class: survived five years or longer (`1`).
//!
//! The L-Perceptron presets attach `p1` to the class with the lowest code in
//! each file (benign for WBCD, survived for HSD).

use crate::config::{DataSource, ExperimentConfig, ReportFormat};
use crate::dataset::{read_csv, Dataset, Label, Schema};
use crate::error::{Error, Result};
use crate::evaluation::Method;
use crate::lperceptron::Hyperparameters;

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_FOLDS: usize = 10;

pub struct BundledDataset {
    pub name: &'static str,
    pub file_name: &'static str,
    pub text: &'static str,
    label_col: usize,
    positive: &'static str,
    negative: &'static str,
    drop_cols: &'static [usize],
}

impl BundledDataset {
    pub fn schema(&self) -> Schema {
        Schema::new(self.label_col, self.positive)
            .with_negative(self.negative)
            .with_drop_cols(self.drop_cols.iter().copied())
    }

    pub fn load(&self) -> Result<Dataset> {
        read_csv(self.text.as_bytes(), self.name, &self.schema())
    }
}

pub const WBCD: BundledDataset = BundledDataset {
    name: "wbcd",
    file_name: "breast-cancer-wisconsin.data",
    text: include_str!("../data/breast-cancer-wisconsin.data"),
    label_col: 11,
    positive: "4",
    negative: "2",
    drop_cols: &[1],
};

pub const HSD: BundledDataset = BundledDataset {
    name: "hsd",
    file_name: "haberman.data",
    text: include_str!("../data/haberman.data"),
    label_col: 4,
    positive: "1",
    negative: "2",
    drop_cols: &[],
};

pub const BUNDLED: [&BundledDataset; 2] = [&WBCD, &HSD];

pub fn bundled(name: &str) -> Result<&'static BundledDataset> {
    BUNDLED
        .into_iter()
        .find(|d| d.name == name)
        .ok_or_else(|| Error::Config(format!("no bundled dataset named `{name}` (try wbcd or hsd)")))
}

/// WBCD column of the published parameter table.
pub fn wbcd_hyperparameters() -> Hyperparameters {
    Hyperparameters::new(-2.0, 3.0, 4, 4, 2, 0.5).with_p1_label(Label::Negative)
}

/// HSD column of the published parameter table.
pub fn hsd_hyperparameters() -> Hyperparameters {
    Hyperparameters::new(-1.3, 2.9, 1, 1, 0, 0.42)
}

pub const PRESET_NAMES: [&str; 6] = ["wbcd-lp", "hsd-lp", "wbcd-nb", "hsd-nb", "wbcd-knn", "hsd-knn"];

/// Experiment preset by name, using `seed` for fold assignment.
pub fn preset(name: &str, seed: u64) -> Result<ExperimentConfig> {
    let (dataset, method) = match name {
        "wbcd-lp" => (&WBCD, Method::Lperceptron { hyperparameters: wbcd_hyperparameters() }),
        "hsd-lp" => (&HSD, Method::Lperceptron { hyperparameters: hsd_hyperparameters() }),
        "wbcd-nb" => (&WBCD, Method::NaiveBayes),
        "hsd-nb" => (&HSD, Method::NaiveBayes),
        "wbcd-knn" => (&WBCD, Method::knn_default()),
        "hsd-knn" => (&HSD, Method::knn_default()),
        other => {
            return Err(Error::Config(format!(
                "unknown preset `{other}` (available: {})",
                PRESET_NAMES.join(", ")
            )))
        }
    };
    Ok(ExperimentConfig {
        data: DataSource::Bundled(dataset.name.to_owned()),
        schema: dataset.schema(),
        method,
        k: DEFAULT_FOLDS,
        seed,
        out: None,
        format: ReportFormat::Json,
    })
}
