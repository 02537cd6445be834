use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Per-column mean and sample standard deviation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalerParams {
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
    /// Columns with zero spread; they normalise to 0.
    pub degenerate: Vec<bool>,
}

/// Fits one scaler column per input slice (sample std, n - 1).
pub fn zscore_fit<C: AsRef<[f64]>>(columns: &[C]) -> Result<ScalerParams> {
    let mut means = Vec::with_capacity(columns.len());
    let mut stds = Vec::with_capacity(columns.len());
    let mut degenerate = Vec::with_capacity(columns.len());
    for (j, col) in columns.iter().enumerate() {
        let col = col.as_ref();
        if col.len() < 2 {
            return Err(Error::InsufficientData(format!(
                "z-score column {j} has {} values, need at least 2",
                col.len()
            )));
        }
        let n = col.len() as f64;
        let mean = col.iter().sum::<f64>() / n;
        let var = col.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        let std = var.sqrt();
        means.push(mean);
        stds.push(std);
        degenerate.push(!(std > 0.0));
    }
    Ok(ScalerParams {
        means,
        stds,
        degenerate,
    })
}

pub fn zscore_apply(params: &ScalerParams, column: usize, value: f64) -> f64 {
    params.apply(column, value)
}

impl ScalerParams {
    pub fn width(&self) -> usize {
        self.means.len()
    }

    pub fn apply(&self, column: usize, value: f64) -> f64 {
        if self.degenerate[column] {
            0.0
        } else {
            (value - self.means[column]) / self.stds[column]
        }
    }

    pub fn apply_row(&self, row: &[f64]) -> Vec<f64> {
        row.iter().enumerate().map(|(j, &v)| self.apply(j, v)).collect()
    }

    /// Maps a normalised value back to physical units.
    pub fn inverse(&self, column: usize, z: f64) -> f64 {
        if self.degenerate[column] {
            self.means[column]
        } else {
            z * self.stds[column] + self.means[column]
        }
    }
}
