//! Published comparison numbers for methods this crate does not implement
//! (and for the ones it does, so measured and published rows sit side by side).
//!
//! Values are kept as the original strings so they print exactly as published.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReferenceRow {
    pub method: &'static str,
    pub accuracy: &'static str,
    pub sensitivity: &'static str,
    pub specificity: &'static str,
    pub f1: &'static str,
}

const fn row(
    method: &'static str,
    accuracy: &'static str,
    sensitivity: &'static str,
    specificity: &'static str,
    f1: &'static str,
) -> ReferenceRow {
    ReferenceRow {
        method,
        accuracy,
        sensitivity,
        specificity,
        f1,
    }
}

pub const WBCD: &[ReferenceRow] = &[
    row("L-Perceptron", "97.42", "98.73", "96.2", "96.50"),
    row("Naive Bayes", "97.36", "97.4", "97.9", "97.64"),
    row("RBF Network", "96.77", "97.07", "96.23", "96.6"),
    row("J48", "93.41", "93.4", "90.37", "91.86"),
];

pub const HSD: &[ReferenceRow] = &[
    row("L-Perceptron", "75.18", "90.04", "37.08", "83.86"),
    row("Logistic Regression", "74.27", "94.77", "22.95", "82.62"),
    row("Linear Discriminant Analysis", "73.78", "95.42", "19.67", "82.71"),
    row("KNN", "71.03", "88.23", "34.42", "81.57"),
    row("CART", "64.02", "74.5", "26.22", "78.44"),
    row("Naive Bayes", "74.17", "94.11", "27.86", "82.52"),
    row("SVM", "69.77", "95.42", "3.27", "82.71"),
    row("MLP", "66.21", "62.74", "55.73", "72.64"),
    row("Random Forest", "67.27", "81.69", "22.95", "80.38"),
];

/// Reference rows for a bundled dataset name.
pub fn rows_for(dataset: &str) -> Option<&'static [ReferenceRow]> {
    match dataset {
        "wbcd" => Some(WBCD),
        "hsd" => Some(HSD),
        _ => None,
    }
}
