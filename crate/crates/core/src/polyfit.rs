//! Univariate polynomial least squares.
//!
//! Fits go through a Householder QR factorization of the Vandermonde
//! matrix. When the factorization reveals a (numerically) rank-deficient
//! system, the fit falls back to an SVD and returns the minimum-norm
//! least-squares solution.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::dataset::Label;
use crate::error::{Error, Result};

/// Polynomial in the monomial basis; `coefficients[j]` multiplies `x^j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Polynomial {
    coefficients: Vec<f64>,
}

impl Polynomial {
    pub fn new(coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::NumericInput("polynomial needs at least one coefficient".into()));
        }
        if let Some(c) = coefficients.iter().find(|c| !c.is_finite()) {
            return Err(Error::NumericInput(format!("coefficient {c} is not finite")));
        }
        Ok(Polynomial { coefficients })
    }

    pub fn constant(c: f64) -> Result<Self> {
        Polynomial::new(vec![c])
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// Horner evaluation.
    pub fn evaluate(&self, x: f64) -> f64 {
        self.coefficients.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    /// Adds `c` to the constant term.
    pub fn shifted(&self, c: f64) -> Result<Self> {
        let mut coefficients = self.coefficients.clone();
        coefficients[0] += c;
        Polynomial::new(coefficients)
    }
}

impl TryFrom<Vec<f64>> for Polynomial {
    type Error = Error;

    fn try_from(value: Vec<f64>) -> Result<Self> {
        Polynomial::new(value)
    }
}

impl From<Polynomial> for Vec<f64> {
    fn from(p: Polynomial) -> Self {
        p.coefficients
    }
}

pub fn evaluate(poly: &Polynomial, x: f64) -> f64 {
    poly.evaluate(x)
}

/// Regression targets: one of two class values per instance.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetVector {
    values: Vec<f64>,
}

impl TargetVector {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Maps positive labels to `p1` and negative labels to `p2`.
pub fn build_targets(labels: &[Label], p1: f64, p2: f64) -> Result<TargetVector> {
    build_targets_for(labels, p1, p2, Label::Positive)
}

/// Maps labels equal to `p1_label` to `p1` and the other class to `p2`.
pub fn build_targets_for(labels: &[Label], p1: f64, p2: f64, p1_label: Label) -> Result<TargetVector> {
    if labels.is_empty() {
        return Err(Error::Training("cannot build targets for an empty label vector".into()));
    }
    let values = labels
        .iter()
        .map(|&l| if l == p1_label { p1 } else { p2 })
        .collect();
    Ok(TargetVector { values })
}

fn vandermonde(xs: &[f64], degree: usize) -> DMatrix<f64> {
    DMatrix::from_fn(xs.len(), degree + 1, |i, j| xs[i].powi(j as i32))
}

/// Relative cutoff on singular values (and on the QR diagonal) below which a
/// direction is treated as absent.
fn rank_tolerance(rows: usize, cols: usize) -> f64 {
    f64::EPSILON * rows.max(cols) as f64
}

/// In-place Householder QR least squares. Returns `None` when the
/// triangular factor is numerically singular, judged against the largest
/// column norm since that bounds the rounding left in every column.
fn householder_solve(mut a: DMatrix<f64>, mut b: DVector<f64>) -> Option<DVector<f64>> {
    let (n, p) = a.shape();
    debug_assert!(n >= p);
    let largest = a.column_iter().fold(0.0f64, |m, c| m.max(c.norm()));
    let mut diag = vec![0.0; p];
    for k in 0..p {
        let norm = a.view((k, k), (n - k, 1)).norm();
        if norm == 0.0 {
            diag[k] = 0.0;
            continue;
        }
        let alpha = if a[(k, k)] > 0.0 { -norm } else { norm };
        // v = x - alpha e1, stored in column k below the diagonal
        let mut v: Vec<f64> = (k..n).map(|i| a[(i, k)]).collect();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        if vnorm2 > 0.0 {
            for j in k + 1..p {
                let dot: f64 = (k..n).map(|i| v[i - k] * a[(i, j)]).sum();
                let f = 2.0 * dot / vnorm2;
                for i in k..n {
                    a[(i, j)] -= f * v[i - k];
                }
            }
            let dot: f64 = (k..n).map(|i| v[i - k] * b[i]).sum();
            let f = 2.0 * dot / vnorm2;
            for i in k..n {
                b[i] -= f * v[i - k];
            }
        }
        diag[k] = alpha;
        a[(k, k)] = alpha;
    }

    let cutoff = rank_tolerance(n, p) * largest;
    if largest == 0.0 || diag.iter().any(|d| d.abs() <= cutoff) {
        return None;
    }

    let mut x = DVector::zeros(p);
    for k in (0..p).rev() {
        let tail: f64 = (k + 1..p).map(|j| a[(k, j)] * x[j]).sum();
        x[k] = (b[k] - tail) / diag[k];
    }
    Some(x)
}

const JACOBI_MAX_SWEEPS: usize = 64;

/// Minimum-norm least squares through a one-sided (Hestenes) Jacobi SVD.
/// Rotations orthogonalize the columns of `a`, so `a V = W` with the column
/// norms of `W` as singular values; the solution is
/// `sum_i v_i (w_i . b) / |w_i|^2` over the columns above the rank cutoff.
fn min_norm_solve(a: DMatrix<f64>, b: &DVector<f64>) -> Result<DVector<f64>> {
    let (n, p) = a.shape();
    let mut w = a;
    let mut v = DMatrix::<f64>::identity(p, p);
    // Columns reduced to rounding noise stay noise; rotating them never settles.
    let negligible = (f64::EPSILON * w.norm()).powi(2);
    let mut converged = false;
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..p {
            for j in i + 1..p {
                let alpha = w.column(i).norm_squared();
                let beta = w.column(j).norm_squared();
                let gamma = w.column(i).dot(&w.column(j));
                if alpha <= negligible
                    || beta <= negligible
                    || gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt()
                {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + zeta.hypot(1.0));
                let c = 1.0 / t.hypot(1.0);
                let s = c * t;
                rotate(&mut w, i, j, c, s);
                rotate(&mut v, i, j, c, s);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Numeric("singular value iteration did not converge".into()));
    }

    let sigma: Vec<f64> = w.column_iter().map(|c| c.norm()).collect();
    let cutoff = rank_tolerance(n, p) * sigma.iter().fold(0.0f64, |m, s| m.max(*s));
    let mut x = DVector::zeros(p);
    for (i, &s) in sigma.iter().enumerate() {
        if s > cutoff {
            x += v.column(i) * (w.column(i).dot(b) / (s * s));
        }
    }
    Ok(x)
}

/// Applies the plane rotation `(c, s)` to columns `i` and `j` of `m`.
fn rotate(m: &mut DMatrix<f64>, i: usize, j: usize, c: f64, s: f64) {
    for k in 0..m.nrows() {
        let (a, b) = (m[(k, i)], m[(k, j)]);
        m[(k, i)] = c * a - s * b;
        m[(k, j)] = s * a + c * b;
    }
}

/// Least-squares polynomial of the given degree through `(xs, targets)`.
pub fn fit_polynomial(xs: &[f64], targets: &[f64], degree: usize) -> Result<Polynomial> {
    if xs.len() != targets.len() {
        return Err(Error::Dimension {
            expected: xs.len(),
            found: targets.len(),
        });
    }
    if xs.is_empty() {
        return Err(Error::NumericInput("cannot fit a polynomial to zero points".into()));
    }
    if xs.iter().chain(targets).any(|v| !v.is_finite()) {
        return Err(Error::NumericInput("fit inputs must be finite".into()));
    }
    let a = vandermonde(xs, degree);
    let b = DVector::from_column_slice(targets);
    let (n, p) = a.shape();
    let solution = if n >= p {
        match householder_solve(a.clone(), b.clone()) {
            Some(x) => x,
            None => min_norm_solve(a, &b)?,
        }
    } else {
        min_norm_solve(a, &b)?
    };
    let coefficients: Vec<f64> = solution.iter().copied().collect();
    if coefficients.iter().any(|c| !c.is_finite()) {
        return Err(Error::Numeric(format!(
            "degree-{degree} fit produced non-finite coefficients"
        )));
    }
    Polynomial::new(coefficients)
}

/// Sum of squared residuals of `poly` against `targets`.
pub fn sse(poly: &Polynomial, xs: &[f64], targets: &[f64]) -> Result<f64> {
    if xs.len() != targets.len() {
        return Err(Error::Dimension {
            expected: xs.len(),
            found: targets.len(),
        });
    }
    Ok(xs
        .iter()
        .zip(targets)
        .map(|(&x, &t)| {
            let r = t - poly.evaluate(x);
            r * r
        })
        .sum())
}

/// A family of per-feature functions indexed by an integer complexity.
///
/// Polynomials (complexity = degree) are the only family shipped.
pub trait FittingFamily {
    type Function: FeatureFunction;

    fn fit(&self, xs: &[f64], targets: &[f64], complexity: usize) -> Result<Self::Function>;
}

pub trait FeatureFunction: Clone {
    fn eval(&self, x: f64) -> f64;
    fn complexity(&self) -> usize;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct PolynomialFamily;

impl FittingFamily for PolynomialFamily {
    type Function = Polynomial;

    fn fit(&self, xs: &[f64], targets: &[f64], complexity: usize) -> Result<Polynomial> {
        fit_polynomial(xs, targets, complexity)
    }
}

impl FeatureFunction for Polynomial {
    fn eval(&self, x: f64) -> f64 {
        self.evaluate(x)
    }

    fn complexity(&self) -> usize {
        self.degree()
    }
}
