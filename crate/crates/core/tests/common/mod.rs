//! Oracles, generators and property checks shared by the integration suites
//! and the acceptance runner.
#![allow(dead_code)]

use lperc_core::dataset::{column_means, impute, stratified_folds, write_csv};
use lperc_core::evaluation::{confusion, cross_validate, metrics, ConfusionMatrix, Method};
use lperc_core::lperceptron::{train, train_traced, Hyperparameters, LPerceptronModel};
use lperc_core::polyfit::{build_targets_for, fit_polynomial, sse, Polynomial};
use lperc_core::baselines::{gnb_predict, gnb_train, knn_predict, knn_train, GnbModel, VARIANCE_FLOOR};
use lperc_core::{read_csv, Classifier, DMatrix, Dataset, Label, Schema};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

// ---------------------------------------------------------------------------
// Oracles
// ---------------------------------------------------------------------------

/// Least squares through the normal equations, with column equilibration and
/// Gaussian elimination with partial pivoting. Written independently of the
/// library solver.
pub fn normal_equations_fit(xs: &[f64], ys: &[f64], degree: usize) -> Vec<f64> {
    let p = degree + 1;
    let col = |i: usize, j: usize| xs[i].powi(j as i32);
    let norms: Vec<f64> = (0..p)
        .map(|j| (0..xs.len()).map(|i| col(i, j).powi(2)).sum::<f64>().sqrt().max(f64::MIN_POSITIVE))
        .collect();
    let mut a = vec![vec![0.0; p + 1]; p];
    for r in 0..p {
        for c in 0..p {
            a[r][c] = (0..xs.len()).map(|i| col(i, r) * col(i, c)).sum::<f64>() / (norms[r] * norms[c]);
        }
        a[r][p] = (0..xs.len()).map(|i| col(i, r) * ys[i]).sum::<f64>() / norms[r];
    }
    for k in 0..p {
        let piv = (k..p)
            .max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs()))
            .unwrap();
        a.swap(k, piv);
        let (head, tail) = a.split_at_mut(k + 1);
        let pivot = &head[k];
        for row in tail.iter_mut() {
            let f = row[k] / pivot[k];
            for (v, q) in row[k..].iter_mut().zip(&pivot[k..]) {
                *v -= f * q;
            }
        }
    }
    let mut z = vec![0.0; p];
    for k in (0..p).rev() {
        let tail: f64 = (k + 1..p).map(|c| a[k][c] * z[c]).sum();
        z[k] = (a[k][p] - tail) / a[k][k];
    }
    z.iter().zip(&norms).map(|(z, n)| z / n).collect()
}

/// Minimum-norm least squares when every sample sits at the same `x`:
/// the design matrix is `1 v^T` with `v = (1, x, ..., x^d)`, whose
/// pseudo-inverse gives `c = mean(y) * v / |v|^2`.
pub fn single_point_pseudo_inverse(x: f64, ys: &[f64], degree: usize) -> Vec<f64> {
    let v: Vec<f64> = (0..=degree).map(|j| x.powi(j as i32)).collect();
    let vv: f64 = v.iter().map(|a| a * a).sum();
    let mean = ys.iter().sum::<f64>() / ys.len() as f64;
    v.iter().map(|a| mean * a / vv).collect()
}

/// Training misclassifications of the per-feature fits at `degrees`, taking
/// the better of the two threshold orientations.
pub fn best_orientation_error(
    features: &DMatrix<f64>,
    labels: &[Label],
    hyper: &Hyperparameters,
    degrees: &[usize],
) -> usize {
    let targets = build_targets_for(labels, hyper.p1, hyper.p2, hyper.p1_label).unwrap();
    let n = features.nrows();
    let mut scores = vec![0.0; n];
    for (j, &d) in degrees.iter().enumerate() {
        let xs: Vec<f64> = features.column(j).iter().copied().collect();
        let poly = fit_polynomial(&xs, targets.values(), d).unwrap();
        for (s, x) in scores.iter_mut().zip(&xs) {
            *s += poly.evaluate(*x);
        }
    }
    let wrong = |positive_above: bool| {
        scores
            .iter()
            .zip(labels)
            .filter(|(&s, &l)| ((s > hyper.threshold) == positive_above) != l.is_positive())
            .count()
    };
    wrong(true).min(wrong(false))
}

/// Minimum of [`best_orientation_error`] over every degree vector in
/// `[dlb, dub]^m`.
pub fn exhaustive_min_error(features: &DMatrix<f64>, labels: &[Label], hyper: &Hyperparameters) -> usize {
    let m = features.ncols();
    let span = hyper.dub - hyper.dlb + 1;
    let mut best = usize::MAX;
    for code in 0..span.pow(m as u32) {
        let mut rest = code;
        let degrees: Vec<usize> = (0..m)
            .map(|_| {
                let d = hyper.dlb + rest % span;
                rest /= span;
                d
            })
            .collect();
        best = best.min(best_orientation_error(features, labels, hyper, &degrees));
    }
    best
}

/// Gaussian log-posterior gap (positive minus negative) computed from the
/// stored class statistics.
pub fn gnb_log_gap(model: &GnbModel, x: &[f64]) -> f64 {
    let lp = |prior: f64, means: &[f64], vars: &[f64]| {
        prior.ln()
            + x.iter()
                .zip(means.iter().zip(vars))
                .map(|(x, (m, v))| -0.5 * (2.0 * std::f64::consts::PI * v).ln() - (x - m).powi(2) / (2.0 * v))
                .sum::<f64>()
    };
    lp(model.positive.prior, &model.positive.means, &model.positive.variances)
        - lp(model.negative.prior, &model.negative.means, &model.negative.variances)
}

// ---------------------------------------------------------------------------
// Generators
// ---------------------------------------------------------------------------

/// Well-conditioned fitting problem: a full-degree polynomial with
/// coefficients away from zero plus small noise, sampled at spread-out xs.
pub fn well_conditioned_fit() -> impl Strategy<Value = (Vec<f64>, Vec<f64>, usize)> {
    (0usize..=5)
        .prop_flat_map(|d| {
            let n_min = 2 * (d + 1) + 2;
            (
                Just(d),
                proptest::collection::vec(-5.0f64..5.0, n_min..=50),
                proptest::collection::vec((0.5f64..2.0, any::<bool>()), d + 1),
                any::<u64>(),
            )
        })
        .prop_filter("xs need spread", |(d, xs, _, _)| spread_ok(xs, *d))
        .prop_map(|(d, xs, coef, noise_seed)| {
            let coef: Vec<f64> = coef.iter().map(|&(c, neg)| if neg { -c } else { c }).collect();
            let mut state = noise_seed;
            let ys = xs
                .iter()
                .map(|&x| {
                    state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    let noise = ((state >> 11) as f64 / (1u64 << 53) as f64 - 0.5) * 0.02;
                    coef.iter().rev().fold(0.0, |acc, c| acc * x + c) + noise
                })
                .collect();
            (xs, ys, d)
        })
}

fn spread_ok(xs: &[f64], d: usize) -> bool {
    let mut buckets = [false; 10];
    for &x in xs {
        buckets[(((x + 5.0) / 1.0) as usize).min(9)] = true;
    }
    buckets.iter().filter(|&&b| b).count() >= (d + 1).max(4)
}

/// Data with substantial residual, possibly with repeated integer xs.
pub fn noisy_fit() -> impl Strategy<Value = (Vec<f64>, Vec<f64>, usize)> {
    (0usize..=4).prop_flat_map(|d| {
        let xs = prop_oneof![
            proptest::collection::vec(-5.0f64..5.0, 2 * (d + 1) + 2..40),
            proptest::collection::vec((1i32..=10).prop_map(f64::from), 2 * (d + 1) + 2..40),
        ];
        xs.prop_flat_map(move |xs| {
            let n = xs.len();
            (Just(xs), proptest::collection::vec(-5.0f64..5.0, n), Just(d))
        })
    })
}

/// Few distinct xs, each with one consistent target.
pub fn interpolation_case() -> impl Strategy<Value = (Vec<f64>, Vec<f64>, usize)> {
    (1usize..=5)
        .prop_flat_map(|distinct| {
            (
                proptest::collection::btree_set(-20i32..=20, distinct),
                proptest::collection::vec(-5.0f64..5.0, distinct),
                proptest::collection::vec(0usize..distinct, distinct..30),
                (distinct - 1)..=5usize,
            )
        })
        .prop_map(|(grid, values, picks, degree)| {
            let grid: Vec<f64> = grid.into_iter().map(|g| f64::from(g) * 0.25).collect();
            let xs = picks.iter().map(|&i| grid[i]).collect();
            let ys = picks.iter().map(|&i| values[i]).collect();
            (xs, ys, degree)
        })
}

fn labels_strategy(n: usize) -> impl Strategy<Value = Vec<Label>> {
    proptest::collection::vec(any::<bool>(), n).prop_map(|bits| {
        bits.into_iter()
            .map(|b| if b { Label::Positive } else { Label::Negative })
            .collect()
    })
}

fn matrix_strategy(n: usize, m: usize) -> impl Strategy<Value = DMatrix<f64>> {
    let cell = prop_oneof![(1i32..=10).prop_map(f64::from), -3.0f64..3.0];
    proptest::collection::vec(cell, n * m).prop_map(move |v| DMatrix::from_row_slice(n, m, &v))
}

/// Small labelled matrix, `n` in `[n_lo, n_hi)`, `m` in `[1, m_hi]`.
pub fn labelled_matrix(
    n_lo: usize,
    n_hi: usize,
    m_hi: usize,
) -> impl Strategy<Value = (DMatrix<f64>, Vec<Label>)> {
    (n_lo..n_hi, 1..=m_hi).prop_flat_map(|(n, m)| (matrix_strategy(n, m), labels_strategy(n)))
}

pub fn hyperparameters(max_span: usize) -> impl Strategy<Value = Hyperparameters> {
    (
        -3.0f64..3.0,
        0.5f64..3.0,
        any::<bool>(),
        0usize..=3,
        0..=max_span,
        0usize..=4,
        -1.0f64..1.0,
        any::<bool>(),
    )
        .prop_map(|(p1, gap, up, dlb, span, ite, threshold, flip)| {
            let p2 = if up { p1 + gap } else { p1 - gap };
            let h = Hyperparameters::new(p1, p2, dlb, dlb + span, ite, threshold);
            if flip {
                h.with_p1_label(Label::Negative)
            } else {
                h
            }
        })
}

/// Tiny greedy-search problem: `m <= 2`, `dub - dlb <= 3`, `n <= 40`.
pub fn tiny_training_problem() -> impl Strategy<Value = (DMatrix<f64>, Vec<Label>, Hyperparameters)> {
    (labelled_matrix(3, 41, 2), hyperparameters(3)).prop_map(|((x, y), h)| (x, y, h))
}

/// Dataset with a random missing mask (at most a third of cells masked).
pub fn masked_dataset() -> impl Strategy<Value = Dataset> {
    (2usize..25, 1usize..=4)
        .prop_flat_map(|(n, m)| {
            (
                matrix_strategy(n, m),
                labels_strategy(n),
                proptest::collection::vec(prop::bool::weighted(0.2), n * m),
            )
        })
        .prop_map(|(x, y, mask)| {
            let (n, m) = x.shape();
            let missing = DMatrix::from_row_slice(n, m, &mask);
            let features = DMatrix::from_fn(n, m, |i, j| if missing[(i, j)] { 0.0 } else { x[(i, j)] });
            Dataset::new("generated", features, y, missing).unwrap()
        })
}

// ---------------------------------------------------------------------------
// Property checks
// ---------------------------------------------------------------------------

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
}

pub fn check_oracle_agreement(xs: &[f64], ys: &[f64], d: usize) -> Result<(), TestCaseError> {
    let got = fit_polynomial(xs, ys, d).unwrap();
    let want = normal_equations_fit(xs, ys, d);
    for (j, (a, b)) in got.coefficients().iter().zip(&want).enumerate() {
        prop_assert!(close(*a, *b, 1e-6), "coefficient {j}: library {a} vs oracle {b}");
    }
    Ok(())
}

pub fn check_residual_orthogonality(xs: &[f64], ys: &[f64], d: usize) -> Result<(), TestCaseError> {
    let mut distinct = xs.to_vec();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    prop_assume!(distinct.len() > d);
    let poly = fit_polynomial(xs, ys, d).unwrap();
    let r: Vec<f64> = xs.iter().zip(ys).map(|(x, y)| y - poly.evaluate(*x)).collect();
    let r_norm = r.iter().map(|v| v * v).sum::<f64>().sqrt();
    for j in 0..=d {
        let col: Vec<f64> = xs.iter().map(|x| x.powi(j as i32)).collect();
        let c_norm = col.iter().map(|v| v * v).sum::<f64>().sqrt();
        let dot: f64 = r.iter().zip(&col).map(|(a, b)| a * b).sum();
        prop_assert!(
            dot.abs() <= 1e-8 * r_norm * c_norm,
            "column {j}: |r.x^j| = {} vs bound {}",
            dot.abs(),
            1e-8 * r_norm * c_norm
        );
    }
    Ok(())
}

pub fn check_sse_monotone(xs: &[f64], ys: &[f64], d: usize) -> Result<(), TestCaseError> {
    let lo = sse(&fit_polynomial(xs, ys, d).unwrap(), xs, ys).unwrap();
    let hi = sse(&fit_polynomial(xs, ys, d + 1).unwrap(), xs, ys).unwrap();
    prop_assert!(hi <= lo + 1e-9, "sse at degree {}: {hi} > {lo} at degree {d}", d + 1);
    Ok(())
}

pub fn check_interpolation(xs: &[f64], ys: &[f64], d: usize) -> Result<(), TestCaseError> {
    let s = sse(&fit_polynomial(xs, ys, d).unwrap(), xs, ys).unwrap();
    let t_norm = ys.iter().map(|v| v * v).sum::<f64>().sqrt();
    prop_assert!(s.sqrt() <= 1e-8 * t_norm.max(1e-300), "residual {} vs target norm {t_norm}", s.sqrt());
    Ok(())
}

pub fn check_permutation_invariance(
    xs: &[f64],
    ys: &[f64],
    d: usize,
    perm_seed: u64,
) -> Result<(), TestCaseError> {
    let n = xs.len();
    let mut order: Vec<usize> = (0..n).collect();
    let mut s = perm_seed | 1;
    for i in (1..n).rev() {
        s ^= s << 13;
        s ^= s >> 7;
        s ^= s << 17;
        order.swap(i, (s % (i as u64 + 1)) as usize);
    }
    let px: Vec<f64> = order.iter().map(|&i| xs[i]).collect();
    let py: Vec<f64> = order.iter().map(|&i| ys[i]).collect();
    let a = fit_polynomial(xs, ys, d).unwrap();
    let b = fit_polynomial(&px, &py, d).unwrap();
    // Compare fitted values: coefficients of a rank-deficient fit are only
    // determined up to rounding in the null-space direction.
    let scale = ys.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    for &x in xs {
        prop_assert!(
            (a.evaluate(x) - b.evaluate(x)).abs() <= 1e-8 * scale,
            "fit differs at x = {x}: {} vs {}",
            a.evaluate(x),
            b.evaluate(x)
        );
    }
    Ok(())
}

pub fn check_degree_bounds(x: &DMatrix<f64>, y: &[Label], h: &Hyperparameters) -> Result<(), TestCaseError> {
    let (model, trace) = train_traced(x, y, h).unwrap();
    prop_assert_eq!(model.degrees().len(), x.ncols());
    for (j, (&d, p)) in model.degrees().iter().zip(model.per_feature()).enumerate() {
        prop_assert!(h.dlb <= d && d <= h.dub, "feature {j}: degree {d} outside [{}, {}]", h.dlb, h.dub);
        prop_assert_eq!(p.degree(), d);
    }
    prop_assert!(trace.tentative_refits <= h.ite * x.ncols());
    prop_assert!(trace.passes <= h.ite);
    Ok(())
}

pub fn check_greedy_monotone(x: &DMatrix<f64>, y: &[Label], h: &Hyperparameters) -> Result<(), TestCaseError> {
    let (_, trace) = train_traced(x, y, h).unwrap();
    let mut prev = trace.initial_error;
    for (step, &e) in trace.errors.iter().enumerate() {
        prop_assert!(e <= prev, "step {step}: error rose from {prev} to {e}");
        prev = e;
    }
    Ok(())
}

pub fn check_determinism(x: &DMatrix<f64>, y: &[Label], h: &Hyperparameters) -> Result<(), TestCaseError> {
    let a = train(x, y, h).unwrap();
    let b = train(x, y, h).unwrap();
    prop_assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
    Ok(())
}

/// Adding `c` to every feature function and `m * c` to the threshold keeps
/// every prediction. Instances whose score sits within rounding distance of
/// the threshold are skipped.
pub fn check_shift_invariance(
    x: &DMatrix<f64>,
    y: &[Label],
    h: &Hyperparameters,
    c: f64,
) -> Result<(), TestCaseError> {
    let model = train(x, y, h).unwrap();
    let m = x.ncols();
    let shifted_polys: Vec<Polynomial> = model.per_feature().iter().map(|p| p.shifted(c).unwrap()).collect();
    let mut shifted_h = model.hyperparameters().clone();
    shifted_h.threshold += m as f64 * c;
    let shifted = LPerceptronModel::from_parts(shifted_polys, shifted_h, model.positive_above()).unwrap();
    for i in 0..x.nrows() {
        let row: Vec<f64> = x.row(i).iter().copied().collect();
        let s = model.score(&row).unwrap();
        let slack = 1e-9 * (1.0 + s.abs() + (m as f64 * c).abs() + h.threshold.abs());
        if (s - h.threshold).abs() <= slack {
            continue;
        }
        prop_assert_eq!(model.predict(&row).unwrap(), shifted.predict(&row).unwrap(), "row {}", i);
    }
    Ok(())
}

/// Greedy final error lies between the exhaustive minimum and the all-`dlb`
/// starting error.
pub fn check_greedy_oracle_bound(
    x: &DMatrix<f64>,
    y: &[Label],
    h: &Hyperparameters,
) -> Result<(), TestCaseError> {
    let (model, trace) = train_traced(x, y, h).unwrap();
    let start = best_orientation_error(x, y, h, &vec![h.dlb; x.ncols()]);
    let best = exhaustive_min_error(x, y, h);
    let greedy = best_orientation_error(x, y, h, model.degrees());
    prop_assert_eq!(greedy as f64, trace.final_error());
    prop_assert_eq!(start as f64, trace.initial_error);
    prop_assert!(best <= greedy && greedy <= start, "oracle {best}, greedy {greedy}, start {start}");
    Ok(())
}

pub fn check_fold_invariants(labels: &[Label], k: usize, seed: u64) -> Result<(), TestCaseError> {
    let ds = Dataset::from_rows(
        "folds",
        &labels.iter().map(|_| vec![0.0]).collect::<Vec<_>>(),
        labels.to_vec(),
    )
    .unwrap();
    let f = stratified_folds(&ds, k, seed).unwrap();
    prop_assert_eq!(f.fold_of.len(), labels.len());
    prop_assert!(f.fold_of.iter().all(|&v| v < k));
    let sizes = f.fold_sizes();
    prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1, "sizes {:?}", sizes);
    for class in [Label::Positive, Label::Negative] {
        let mut per = vec![0usize; k];
        for (i, &fold) in f.fold_of.iter().enumerate() {
            if labels[i] == class {
                per[fold] += 1;
            }
        }
        prop_assert!(per.iter().max().unwrap() - per.iter().min().unwrap() <= 1, "{class:?} {per:?}");
    }
    prop_assert_eq!(&f, &stratified_folds(&ds, k, seed).unwrap());
    Ok(())
}

pub fn check_imputation(ds: &Dataset, train_mask: &[bool]) -> Result<(), TestCaseError> {
    let train: Vec<usize> = (0..ds.n_instances()).filter(|&i| train_mask[i]).collect();
    prop_assume!(!train.is_empty());
    let means = column_means(ds, &train);
    let needs: Vec<usize> = (0..ds.n_features())
        .filter(|&j| (0..ds.n_instances()).any(|i| ds.is_missing(i, j)))
        .collect();
    let imputable = needs.iter().all(|&j| means[j].is_some());
    let out = impute(ds, &train);
    if !imputable {
        prop_assert!(out.is_err());
        return Ok(());
    }
    let out = out.unwrap();
    for i in 0..ds.n_instances() {
        for j in 0..ds.n_features() {
            let v = out.features()[(i, j)];
            prop_assert!(v.is_finite());
            if !ds.is_missing(i, j) {
                prop_assert_eq!(v.to_bits(), ds.features()[(i, j)].to_bits());
            }
        }
    }
    prop_assert_eq!(out.missing_mask(), ds.missing_mask());
    Ok(())
}

/// Overwriting every unmasked cell outside `train` leaves imputed values
/// unchanged.
pub fn check_imputation_leakage(ds: &Dataset, train_mask: &[bool], junk: f64) -> Result<(), TestCaseError> {
    let train: Vec<usize> = (0..ds.n_instances()).filter(|&i| train_mask[i]).collect();
    prop_assume!(!train.is_empty());
    let Ok(before) = impute(ds, &train) else {
        return Ok(());
    };
    let mut poked = ds.features().clone();
    for i in (0..ds.n_instances()).filter(|&i| !train_mask[i]) {
        for j in 0..ds.n_features() {
            if !ds.is_missing(i, j) {
                poked[(i, j)] = junk;
            }
        }
    }
    let poked = Dataset::new("poked", poked, ds.labels().to_vec(), ds.missing_mask().clone()).unwrap();
    let after = impute(&poked, &train).unwrap();
    for i in 0..ds.n_instances() {
        for j in 0..ds.n_features() {
            if ds.is_missing(i, j) {
                prop_assert_eq!(before.features()[(i, j)].to_bits(), after.features()[(i, j)].to_bits());
            }
        }
    }
    Ok(())
}

pub fn check_csv_round_trip(ds: &Dataset) -> Result<(), TestCaseError> {
    let mut buf = Vec::new();
    write_csv(ds, &mut buf, "yes", "no").unwrap();
    let schema = Schema::new(ds.n_features() + 1, "yes").with_negative("no");
    let back = read_csv(buf.as_slice(), ds.name(), &schema);
    // A file whose rows all share one label is still readable.
    let back = back.unwrap();
    prop_assert_eq!(&back, ds);
    Ok(())
}

pub fn check_accuracy_decomposition(cm: &ConfusionMatrix) -> Result<(), TestCaseError> {
    let m = metrics(cm).unwrap();
    for v in [m.accuracy, m.sensitivity, m.specificity, m.precision, m.f1] {
        prop_assert!((0.0..=1.0).contains(&v));
    }
    let p = (cm.tp + cm.fn_) as f64;
    let n = (cm.tn + cm.fp) as f64;
    let recomposed = (m.sensitivity * p + m.specificity * n) / (p + n);
    prop_assert!((m.accuracy - recomposed).abs() <= 1e-12, "{} vs {}", m.accuracy, recomposed);
    prop_assert_eq!(m.accuracy, (cm.tp + cm.tn) as f64 / cm.total() as f64);
    Ok(())
}

pub fn confusion_strategy() -> impl Strategy<Value = ConfusionMatrix> {
    (0usize..50, 0usize..50, 0usize..50, 0usize..50)
        .prop_filter("non-empty", |(a, b, c, d)| a + b + c + d > 0)
        .prop_map(|(tp, fp, tn, fn_)| ConfusionMatrix { tp, fp, tn, fn_ })
}

pub fn check_pooled_covers_everything(
    x: &DMatrix<f64>,
    y: &[Label],
    k: usize,
    seed: u64,
) -> Result<(), TestCaseError> {
    let ds = Dataset::new("cv", x.clone(), y.to_vec(), DMatrix::from_element(x.nrows(), x.ncols(), false)).unwrap();
    let method = Method::Lperceptron {
        hyperparameters: Hyperparameters::new(1.0, -1.0, 1, 2, 1, 0.0),
    };
    let report = cross_validate(&ds, k, seed, &method).unwrap();
    prop_assert_eq!(report.pooled.total(), x.nrows());
    let summed: ConfusionMatrix = report.per_fold.iter().map(|f| f.confusion).sum();
    prop_assert_eq!(summed, report.pooled);
    prop_assert_eq!(&report.metrics, &metrics(&report.pooled).unwrap());
    Ok(())
}

pub fn check_knn_memorises(x: &DMatrix<f64>, y: &[Label]) -> Result<(), TestCaseError> {
    let rows: Vec<Vec<f64>> = (0..x.nrows()).map(|i| x.row(i).iter().copied().collect()).collect();
    for i in 0..rows.len() {
        for j in 0..i {
            prop_assume!(rows[i] != rows[j]);
        }
    }
    let model = knn_train(x, y, 1).unwrap();
    for (row, &label) in rows.iter().zip(y) {
        prop_assert_eq!(knn_predict(&model, row).unwrap(), label);
    }
    Ok(())
}

pub fn check_gnb_duplication(x: &DMatrix<f64>, y: &[Label], probes: &[Vec<f64>]) -> Result<(), TestCaseError> {
    prop_assume!(y.contains(&Label::Positive) && y.contains(&Label::Negative));
    let doubled_x = DMatrix::from_fn(2 * x.nrows(), x.ncols(), |i, j| x[(i % x.nrows(), j)]);
    let doubled_y: Vec<Label> = y.iter().chain(y).copied().collect();
    let a = gnb_train(x, y).unwrap();
    let b = gnb_train(&doubled_x, &doubled_y).unwrap();
    prop_assert_eq!(a.positive.prior, b.positive.prior);
    for (sa, sb) in [(&a.positive, &b.positive), (&a.negative, &b.negative)] {
        for (u, v) in sa.means.iter().zip(&sb.means).chain(sa.variances.iter().zip(&sb.variances)) {
            prop_assert!((u - v).abs() <= 1e-12 * (1.0 + u.abs()), "{u} vs {v}");
        }
        prop_assert!(sa.variances.iter().all(|&v| v >= VARIANCE_FLOOR));
    }
    for p in probes.iter().filter(|p| p.len() == x.ncols()) {
        if gnb_log_gap(&a, p).abs() < 1e-6 {
            continue;
        }
        prop_assert_eq!(gnb_predict(&a, p).unwrap(), gnb_predict(&b, p).unwrap());
    }
    Ok(())
}

pub fn check_baseline_determinism(x: &DMatrix<f64>, y: &[Label]) -> Result<(), TestCaseError> {
    prop_assume!(y.contains(&Label::Positive) && y.contains(&Label::Negative));
    let k = if x.nrows() % 2 == 1 { x.nrows().min(3) } else { 1 };
    let g1 = gnb_train(x, y).unwrap().predict_batch(x).unwrap();
    let g2 = gnb_train(x, y).unwrap().predict_batch(x).unwrap();
    prop_assert_eq!(g1, g2);
    let k1 = knn_train(x, y, k).unwrap().predict_batch(x).unwrap();
    let k2 = knn_train(x, y, k).unwrap().predict_batch(x).unwrap();
    prop_assert_eq!(k1, k2);
    Ok(())
}

/// Confusion matrix of `predicted` against `actual`, recomputed without the
/// library for cross-checking.
pub fn count_confusion(predicted: &[Label], actual: &[Label]) -> ConfusionMatrix {
    let mut cm = ConfusionMatrix::default();
    for (p, a) in predicted.iter().zip(actual) {
        match (p.is_positive(), a.is_positive()) {
            (true, true) => cm.tp += 1,
            (true, false) => cm.fp += 1,
            (false, false) => cm.tn += 1,
            (false, true) => cm.fn_ += 1,
        }
    }
    assert_eq!(confusion(predicted, actual).unwrap(), cm);
    cm
}
