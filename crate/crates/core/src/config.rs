//! Experiment configuration and its flat `key = value` file format.
//!
//! ```text
//! # comments and blank lines are ignored
//! data = bundled:wbcd
//! label_col = 11
//! positive = 4
//! negative = 2
//! drop_cols = 1
//! header = false
//! method = lperceptron
//! p1 = -2
//! ...
//! ```

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::path::PathBuf;
use std::str::FromStr;

use crate::dataset::{load_csv, Dataset, Label, Schema};
use crate::error::{Error, Result};
use crate::evaluation::Method;
use crate::lperceptron::{ErrorMetric, Hyperparameters};
use crate::presets;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DataSource {
    Bundled(String),
    File(PathBuf),
}

impl DataSource {
    pub fn load(&self, schema: &Schema) -> Result<Dataset> {
        match self {
            DataSource::Bundled(name) => {
                let ds = presets::bundled(name)?;
                crate::dataset::read_csv(ds.text.as_bytes(), ds.name, schema)
            }
            DataSource::File(path) => load_csv(path, schema),
        }
    }
}

impl fmt::Display for DataSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DataSource::Bundled(name) => write!(f, "bundled:{name}"),
            DataSource::File(path) => write!(f, "{}", path.display()),
        }
    }
}

impl FromStr for DataSource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.is_empty() {
            return Err(Error::Config("empty data source".into()));
        }
        Ok(match s.strip_prefix("bundled:") {
            Some(name) => DataSource::Bundled(name.to_owned()),
            None => DataSource::File(PathBuf::from(s)),
        })
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum ReportFormat {
    #[default]
    Json,
    Csv,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            other => Err(Error::Config(format!("unknown report format `{other}`"))),
        }
    }
}

impl fmt::Display for ReportFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReportFormat::Json => "json",
            ReportFormat::Csv => "csv",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub data: DataSource,
    pub schema: Schema,
    pub method: Method,
    pub k: usize,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub format: ReportFormat,
}

impl ExperimentConfig {
    pub fn load_dataset(&self) -> Result<Dataset> {
        self.data.load(&self.schema)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k < 2 {
            return Err(Error::Config(format!("fold count must be at least 2, got {}", self.k)));
        }
        if let Some(h) = self.method.hyperparameters() {
            h.validate()?;
        }
        if let Method::Knn { k } = self.method {
            if k == 0 || k % 2 == 0 {
                return Err(Error::Config(format!("KNN k must be a positive odd number, got {k}")));
            }
        }
        Ok(())
    }

    /// Canonical text form; [`ExperimentConfig::parse`] reads it back unchanged.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mut put = |k: &str, v: &dyn fmt::Display| {
            let _ = writeln!(s, "{k} = {v}");
        };
        put("data", &self.data);
        put("label_col", &self.schema.label_col);
        put("positive", &self.schema.positive);
        if let Some(neg) = &self.schema.negative {
            put("negative", neg);
        }
        put("drop_cols", &join(&self.schema.drop_cols));
        put("header", &self.schema.has_header);
        match &self.method {
            Method::Lperceptron { hyperparameters: h } => {
                put("method", &"lperceptron");
                put("p1", &h.p1);
                put("p2", &h.p2);
                put("dlb", &h.dlb);
                put("dub", &h.dub);
                put("ite", &h.ite);
                put("threshold", &h.threshold);
                put("p1_label", &h.p1_label);
                put("error_metric", &h.error_metric);
            }
            Method::NaiveBayes => put("method", &"naive-bayes"),
            Method::Knn { k } => {
                put("method", &"knn");
                put("knn_k", k);
            }
        }
        put("k", &self.k);
        put("seed", &self.seed);
        if let Some(out) = &self.out {
            put("out", &out.display());
        }
        put("format", &self.format);
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::parse_with_default_seed(text, presets::DEFAULT_SEED)
    }

    /// Like [`ExperimentConfig::parse`], with `default_seed` used when the
    /// text has no `seed` key.
    pub fn parse_with_default_seed(text: &str, default_seed: u64) -> Result<Self> {
        let mut map = KeyValues::parse(text)?;
        let cfg = ExperimentConfig {
            data: map.required("data")?,
            schema: Schema {
                label_col: map.required("label_col")?,
                positive: map.required("positive")?,
                negative: map.optional("negative")?,
                drop_cols: parse_list(&map.optional::<String>("drop_cols")?.unwrap_or_default())?,
                has_header: map.optional("header")?.unwrap_or(false),
            },
            method: parse_method(&mut map)?,
            k: map.optional("k")?.unwrap_or(presets::DEFAULT_FOLDS),
            seed: map.optional("seed")?.unwrap_or(default_seed),
            out: map.optional::<String>("out")?.map(PathBuf::from),
            format: map.optional("format")?.unwrap_or_default(),
        };
        map.finish()?;
        Ok(cfg)
    }
}

fn parse_method(map: &mut KeyValues) -> Result<Method> {
    let name: String = map.optional("method")?.unwrap_or_else(|| "lperceptron".to_owned());
    Ok(match name.as_str() {
        "lperceptron" | "lp" => {
            let mut h = Hyperparameters::new(
                map.required("p1")?,
                map.required("p2")?,
                map.required("dlb")?,
                map.required("dub")?,
                map.required("ite")?,
                map.required("threshold")?,
            );
            if let Some(l) = map.optional::<Label>("p1_label")? {
                h.p1_label = l;
            }
            if let Some(m) = map.optional::<ErrorMetric>("error_metric")? {
                h.error_metric = m;
            }
            Method::Lperceptron { hyperparameters: h }
        }
        "naive-bayes" | "nb" => Method::NaiveBayes,
        "knn" => Method::Knn {
            k: map.optional("knn_k")?.unwrap_or(crate::baselines::DEFAULT_KNN_K),
        },
        other => return Err(Error::Config(format!("unknown method `{other}`"))),
    })
}

pub fn parse_method_name(name: &str) -> Result<&'static str> {
    match name {
        "lperceptron" | "lp" => Ok("lperceptron"),
        "naive-bayes" | "nb" => Ok("naive-bayes"),
        "knn" => Ok("knn"),
        other => Err(Error::Config(format!("unknown method `{other}`"))),
    }
}

fn join(cols: &[usize]) -> String {
    cols.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",")
}

/// Comma-separated column numbers; empty string is the empty list.
pub fn parse_list(text: &str) -> Result<Vec<usize>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse()
                .map_err(|_| Error::Config(format!("`{s}` is not a column number")))
        })
        .collect()
}

struct KeyValues(BTreeMap<String, String>);

impl KeyValues {
    fn parse(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("config line {}: expected `key = value`", no + 1))
            })?;
            let key = k.trim().to_owned();
            if map.insert(key.clone(), v.trim().to_owned()).is_some() {
                return Err(Error::Config(format!("config key `{key}` appears twice")));
            }
        }
        Ok(KeyValues(map))
    }

    fn optional<T: FromStr>(&mut self, key: &str) -> Result<Option<T>> {
        match self.0.remove(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| Error::Config(format!("config key `{key}`: cannot parse `{v}`"))),
        }
    }

    fn required<T: FromStr>(&mut self, key: &str) -> Result<T> {
        self.optional(key)?
            .ok_or_else(|| Error::Config(format!("config key `{key}` is required")))
    }

    fn finish(self) -> Result<()> {
        match self.0.keys().next() {
            Some(k) => Err(Error::Config(format!("unknown config key `{k}`"))),
            None => Ok(()),
        }
    }
}
