//! C interface to the L-Perceptron engine.
//!
//! Every function returns an [`LpercStatus`]. On failure a description is
//! available from [`lperc_last_error_message`] on the same thread until the
//! next failing call. Handles are opaque and must be released with their
//! `_free` function. Strings returned through out-pointers are owned by the
//! caller and released with [`lperc_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use lperc_core::commands::train_dataset;
use lperc_core::dataset::{load_csv, Dataset, Label, Schema};
use lperc_core::evaluation::{cross_validate, Method};
use lperc_core::lperceptron::{ErrorMetric, Hyperparameters, LPerceptronModel};
use lperc_core::presets;
use lperc_core::{Classifier, Error};

/// Result code of every exported function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpercStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Io = 3,
    Parse = 4,
    Data = 5,
    Dimension = 6,
    Numeric = 7,
    Config = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpercLabel {
    Negative = 0,
    Positive = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpercErrorMetric {
    Misclassification = 0,
    Sse = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpercMethod {
    Lperceptron = 0,
    NaiveBayes = 1,
    Knn = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LpercHyperparameters {
    pub p1: f64,
    pub p2: f64,
    pub dlb: usize,
    pub dub: usize,
    pub ite: usize,
    pub threshold: f64,
    /// Class whose target value is `p1`.
    pub p1_label: LpercLabel,
    pub error_metric: LpercErrorMetric,
}

/// Pooled cross-validation rates in `[0, 1]`.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LpercMetrics {
    pub accuracy: f64,
    pub sensitivity: f64,
    pub specificity: f64,
    pub precision: f64,
    pub f1: f64,
    pub true_positives: usize,
    pub false_positives: usize,
    pub true_negatives: usize,
    pub false_negatives: usize,
}

/// Opaque dataset handle.
pub struct LpercDataset {
    inner: Dataset,
}

/// Opaque trained-model handle.
pub struct LpercModel {
    inner: LPerceptronModel,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(LpercStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Config(_) => LpercStatus::Config,
            Error::Parse { .. } | Error::Csv(_) | Error::Json(_) => LpercStatus::Parse,
            Error::Dimension { .. } => LpercStatus::Dimension,
            Error::NumericInput(_) | Error::Numeric(_) | Error::Training(_) => LpercStatus::Numeric,
            Error::File { .. } | Error::Io(_) => LpercStatus::Io,
            Error::Schema(_) | Error::EmptyDataset | Error::Imputation { .. } => LpercStatus::Data,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(LpercStatus::NullPointer, format!("`{what}` is null"))
}

fn invalid(message: impl Into<String>) -> Failure {
    Failure(LpercStatus::InvalidArgument, message.into())
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> LpercStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => LpercStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_last_error(message);
            status
        }
        Err(payload) => {
            let message = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("panic: {message}"));
            LpercStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| invalid(format!("`{what}` is not valid UTF-8")))
}

unsafe fn slice_arg<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn out_arg<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

fn into_c_string(s: String) -> Result<*mut c_char, Failure> {
    CString::new(s)
        .map(CString::into_raw)
        .map_err(|_| invalid("output contains a NUL byte"))
}

fn label_to_c(label: Label) -> LpercLabel {
    match label {
        Label::Positive => LpercLabel::Positive,
        Label::Negative => LpercLabel::Negative,
    }
}

fn label_from_c(label: LpercLabel) -> Label {
    match label {
        LpercLabel::Positive => Label::Positive,
        LpercLabel::Negative => Label::Negative,
    }
}

impl From<&LpercHyperparameters> for Hyperparameters {
    fn from(h: &LpercHyperparameters) -> Self {
        Hyperparameters::new(h.p1, h.p2, h.dlb, h.dub, h.ite, h.threshold)
            .with_p1_label(label_from_c(h.p1_label))
            .with_error_metric(match h.error_metric {
                LpercErrorMetric::Misclassification => ErrorMetric::Misclassification,
                LpercErrorMetric::Sse => ErrorMetric::Sse,
            })
    }
}

impl From<&Hyperparameters> for LpercHyperparameters {
    fn from(h: &Hyperparameters) -> Self {
        LpercHyperparameters {
            p1: h.p1,
            p2: h.p2,
            dlb: h.dlb,
            dub: h.dub,
            ite: h.ite,
            threshold: h.threshold,
            p1_label: label_to_c(h.p1_label),
            error_metric: match h.error_metric {
                ErrorMetric::Misclassification => LpercErrorMetric::Misclassification,
                ErrorMetric::Sse => LpercErrorMetric::Sse,
            },
        }
    }
}

/// Message for the most recent failure on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn lperc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn lperc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Loads a delimited text file. `label_col` and `drop_cols` are 1-based;
/// `negative` may be NULL to take the first non-positive token.
///
/// # Safety
/// String arguments must be NUL-terminated; `drop_cols` must point to
/// `n_drop` values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lperc_dataset_load_csv(
    path: *const c_char,
    label_col: usize,
    positive: *const c_char,
    negative: *const c_char,
    drop_cols: *const usize,
    n_drop: usize,
    has_header: bool,
    out: *mut *mut LpercDataset,
) -> LpercStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let path = str_arg(path, "path")?;
        let mut schema = Schema::new(label_col, str_arg(positive, "positive")?)
            .with_drop_cols(slice_arg(drop_cols, n_drop, "drop_cols")?.iter().copied())
            .with_header(has_header);
        if !negative.is_null() {
            schema = schema.with_negative(str_arg(negative, "negative")?);
        }
        let inner = load_csv(path, &schema)?;
        *out = Box::into_raw(Box::new(LpercDataset { inner }));
        Ok(())
    })
}

/// Loads a bundled benchmark dataset by name (`wbcd` or `hsd`).
///
/// # Safety
/// `name` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lperc_dataset_bundled(
    name: *const c_char,
    out: *mut *mut LpercDataset,
) -> LpercStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let inner = presets::bundled(str_arg(name, "name")?)?.load()?;
        *out = Box::into_raw(Box::new(LpercDataset { inner }));
        Ok(())
    })
}

/// Builds a dataset from a row-major `rows x cols` matrix. NaN marks a
/// missing cell.
///
/// # Safety
/// `features` must point to `rows * cols` values and `labels` to `rows`
/// values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lperc_dataset_from_arrays(
    features: *const f64,
    labels: *const LpercLabel,
    rows: usize,
    cols: usize,
    out: *mut *mut LpercDataset,
) -> LpercStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let cells = rows
            .checked_mul(cols)
            .ok_or_else(|| invalid("rows * cols overflows"))?;
        let x = slice_arg(features, cells, "features")?;
        let y = slice_arg(labels, rows, "labels")?;
        let missing = lperc_core::DMatrix::from_fn(rows, cols, |i, j| x[i * cols + j].is_nan());
        let values = lperc_core::DMatrix::from_fn(rows, cols, |i, j| {
            let v = x[i * cols + j];
            if v.is_nan() {
                0.0
            } else {
                v
            }
        });
        let labels = y.iter().map(|&l| label_from_c(l)).collect();
        let inner = Dataset::new("arrays", values, labels, missing)?;
        *out = Box::into_raw(Box::new(LpercDataset { inner }));
        Ok(())
    })
}

/// Number of rows, or 0 for NULL.
///
/// # Safety
/// `ds` must be NULL or a live dataset handle.
#[no_mangle]
pub unsafe extern "C" fn lperc_dataset_rows(ds: *const LpercDataset) -> usize {
    ds.as_ref().map_or(0, |d| d.inner.n_instances())
}

/// Number of feature columns, or 0 for NULL.
///
/// # Safety
/// `ds` must be NULL or a live dataset handle.
#[no_mangle]
pub unsafe extern "C" fn lperc_dataset_cols(ds: *const LpercDataset) -> usize {
    ds.as_ref().map_or(0, |d| d.inner.n_features())
}

/// # Safety
/// `ds` must be NULL or a dataset handle that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn lperc_dataset_free(ds: *mut LpercDataset) {
    if !ds.is_null() {
        drop(Box::from_raw(ds));
    }
}

/// Published hyperparameters for a bundled dataset (`wbcd` or `hsd`).
///
/// # Safety
/// `name` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lperc_preset_hyperparameters(
    name: *const c_char,
    out: *mut LpercHyperparameters,
) -> LpercStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let h = match str_arg(name, "name")? {
            "wbcd" => presets::wbcd_hyperparameters(),
            "hsd" => presets::hsd_hyperparameters(),
            other => return Err(invalid(format!("no preset for `{other}`"))),
        };
        *out = (&h).into();
        Ok(())
    })
}

/// Trains on every row of `ds`. Missing cells are filled with column means,
/// which the model keeps.
///
/// # Safety
/// `ds` and `hyper` must be valid; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lperc_model_train(
    ds: *const LpercDataset,
    hyper: *const LpercHyperparameters,
    out: *mut *mut LpercModel,
) -> LpercStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let ds = handle(ds, "ds")?;
        let hyper: Hyperparameters = handle(hyper, "hyper")?.into();
        let inner = train_dataset(&ds.inner, &hyper)?;
        *out = Box::into_raw(Box::new(LpercModel { inner }));
        Ok(())
    })
}

/// Sum of the per-feature outputs for one instance of `len` values.
///
/// # Safety
/// `x` must point to `len` values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lperc_model_score(
    model: *const LpercModel,
    x: *const f64,
    len: usize,
    out: *mut f64,
) -> LpercStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let model = handle(model, "model")?;
        *out = model.inner.score(slice_arg(x, len, "x")?)?;
        Ok(())
    })
}

/// Predicted label for one instance of `len` values.
///
/// # Safety
/// `x` must point to `len` values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lperc_model_predict(
    model: *const LpercModel,
    x: *const f64,
    len: usize,
    out: *mut LpercLabel,
) -> LpercStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let model = handle(model, "model")?;
        *out = label_to_c(model.inner.predict(slice_arg(x, len, "x")?)?);
        Ok(())
    })
}

/// Number of features the model expects, or 0 for NULL.
///
/// # Safety
/// `model` must be NULL or a live model handle.
#[no_mangle]
pub unsafe extern "C" fn lperc_model_feature_count(model: *const LpercModel) -> usize {
    model.as_ref().map_or(0, |m| m.inner.n_features())
}

/// Copies the selected degree of each feature into `out`, which must hold
/// exactly `lperc_model_feature_count` values.
///
/// # Safety
/// `out` must point to `len` writable values.
#[no_mangle]
pub unsafe extern "C" fn lperc_model_degrees(
    model: *const LpercModel,
    out: *mut usize,
    len: usize,
) -> LpercStatus {
    guard(|| {
        let model = handle(model, "model")?;
        let degrees = model.inner.degrees();
        if len != degrees.len() {
            return Err(Failure(
                LpercStatus::Dimension,
                format!("model has {} features, buffer holds {len}", degrees.len()),
            ));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        std::slice::from_raw_parts_mut(out, len).copy_from_slice(degrees);
        Ok(())
    })
}

/// Model as a JSON document. Free the result with `lperc_string_free`.
///
/// # Safety
/// `model` must be valid; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lperc_model_to_json(
    model: *const LpercModel,
    out: *mut *mut c_char,
) -> LpercStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = into_c_string(handle(model, "model")?.inner.to_json()?)?;
        Ok(())
    })
}

/// # Safety
/// `json` must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lperc_model_from_json(
    json: *const c_char,
    out: *mut *mut LpercModel,
) -> LpercStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let inner = LPerceptronModel::from_json(str_arg(json, "json")?)?;
        *out = Box::into_raw(Box::new(LpercModel { inner }));
        Ok(())
    })
}

/// # Safety
/// `model` must be NULL or a model handle that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn lperc_model_free(model: *mut LpercModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Stratified `k`-fold cross-validation. `hyper` is read only for
/// `LPERC_METHOD_LPERCEPTRON` and `knn_k` only for `LPERC_METHOD_KNN`.
/// Either `metrics` or `report_json` may be NULL.
///
/// # Safety
/// Pointers must be NULL or valid as described above.
#[no_mangle]
pub unsafe extern "C" fn lperc_cross_validate(
    ds: *const LpercDataset,
    method: LpercMethod,
    hyper: *const LpercHyperparameters,
    knn_k: usize,
    k: usize,
    seed: u64,
    metrics: *mut LpercMetrics,
    report_json: *mut *mut c_char,
) -> LpercStatus {
    guard(|| {
        let ds = handle(ds, "ds")?;
        let method = match method {
            LpercMethod::Lperceptron => Method::Lperceptron {
                hyperparameters: handle(hyper, "hyper")?.into(),
            },
            LpercMethod::NaiveBayes => Method::NaiveBayes,
            LpercMethod::Knn => Method::Knn { k: knn_k },
        };
        let report = cross_validate(&ds.inner, k, seed, &method)?;
        if let Some(m) = metrics.as_mut() {
            let c = &report.pooled;
            *m = LpercMetrics {
                accuracy: report.metrics.accuracy,
                sensitivity: report.metrics.sensitivity,
                specificity: report.metrics.specificity,
                precision: report.metrics.precision,
                f1: report.metrics.f1,
                true_positives: c.tp,
                false_positives: c.fp,
                true_negatives: c.tn,
                false_negatives: c.fn_,
            };
        }
        if let Some(out) = report_json.as_mut() {
            *out = into_c_string(report.to_json()?)?;
        }
        Ok(())
    })
}
