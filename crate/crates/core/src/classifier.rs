use nalgebra::DMatrix;

use crate::dataset::Label;
use crate::error::{Error, Result};

/// A trained binary classifier over fixed-width real feature vectors.
pub trait Classifier {
    fn n_features(&self) -> usize;

    fn predict(&self, instance: &[f64]) -> Result<Label>;

    fn predict_batch(&self, features: &DMatrix<f64>) -> Result<Vec<Label>> {
        if features.nrows() > 0 && features.ncols() != self.n_features() {
            return Err(Error::Dimension {
                expected: self.n_features(),
                found: features.ncols(),
            });
        }
        (0..features.nrows())
            .map(|i| {
                let row: Vec<f64> = features.row(i).iter().copied().collect();
                self.predict(&row)
            })
            .collect()
    }
}

pub(crate) fn check_instance(instance: &[f64], expected: usize) -> Result<()> {
    if instance.len() != expected {
        return Err(Error::Dimension {
            expected,
            found: instance.len(),
        });
    }
    if instance.iter().any(|v| !v.is_finite()) {
        return Err(Error::NumericInput("instance contains a non-finite value".into()));
    }
    Ok(())
}

pub(crate) fn check_training_input(features: &DMatrix<f64>, labels: &[Label]) -> Result<()> {
    if features.nrows() == 0 {
        return Err(Error::Training("empty training set".into()));
    }
    if features.ncols() == 0 {
        return Err(Error::Training("training set has no features".into()));
    }
    if labels.len() != features.nrows() {
        return Err(Error::Dimension {
            expected: features.nrows(),
            found: labels.len(),
        });
    }
    if features.iter().any(|v| !v.is_finite()) {
        return Err(Error::NumericInput(
            "training features must be finite (impute missing values first)".into(),
        ));
    }
    Ok(())
}
