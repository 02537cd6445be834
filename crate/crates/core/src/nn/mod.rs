//! Neural regressors for half-hour-ahead load forecasting.
//!
//! Networks work in z-score space: inputs come straight from a
//! [`FeatureMatrix`](crate::features::FeatureMatrix) and targets are scaled
//! with its load scaler. Every reported RMSE is de-normalised to RT.

mod linear;
mod lstm;
mod mlp;
mod optim;
mod train;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use linear::{linear_loss_grad, LinearModel};
pub use lstm::{lstm_forward, lstm_gradient, lstm_loss_grad, row_to_sequence, LstmModel, LstmStep};
pub use mlp::{mlp_forward, mlp_gradient, mlp_loss_grad, MlpModel};
pub use optim::{clip_global_norm, Optimizer, OptimizerKind};
pub use train::{predict_rows, predict_series, train, EvalReport, SplitMode, TrainConfig};

pub(crate) fn sigmoid(v: f64) -> f64 {
    1.0 / (1.0 + (-v).exp())
}

/// Uniform in `+-sqrt(6 / (fan_in + fan_out))`.
pub(crate) fn glorot<R: Rng>(w: &mut [f64], fan_in: usize, fan_out: usize, rng: &mut R) {
    let a = (6.0 / (fan_in + fan_out) as f64).sqrt();
    for v in w {
        *v = rng.random_range(-a..a);
    }
}

pub fn rmse(y: &[f64], yhat: &[f64]) -> Result<f64> {
    if y.len() != yhat.len() {
        return Err(Error::DimensionMismatch {
            expected: y.len(),
            got: yhat.len(),
        });
    }
    if y.is_empty() {
        return Err(Error::InsufficientData("rmse of an empty series".into()));
    }
    let ss: f64 = y.iter().zip(yhat).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok((ss / y.len() as f64).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Mlp,
    Lstm,
    /// Convex proxy used to check optimiser behaviour.
    Linear,
}

impl Family {
    pub fn as_str(&self) -> &'static str {
        match self {
            Family::Mlp => "mlp",
            Family::Lstm => "lstm",
            Family::Linear => "linear",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "mlp" => Ok(Family::Mlp),
            "lstm" => Ok(Family::Lstm),
            "linear" => Ok(Family::Linear),
            other => Err(Error::InvalidConfig(format!("unknown model family `{other}`"))),
        }
    }
}

/// A trained network of any family. Serialises with a `family` tag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Model {
    Mlp(MlpModel),
    Lstm(LstmModel),
    Linear(LinearModel),
}

/// Inputs prepared once per dataset in the shape a family consumes.
pub(crate) enum Inputs {
    Rows(Vec<Vec<f64>>),
    Seqs(Vec<Vec<Vec<f64>>>),
}

impl Inputs {
    pub(crate) fn len(&self) -> usize {
        match self {
            Inputs::Rows(r) => r.len(),
            Inputs::Seqs(s) => s.len(),
        }
    }
}

impl Model {
    pub fn init<R: Rng>(family: Family, row_width: usize, lags: usize, hidden: usize, rng: &mut R) -> Model {
        match family {
            Family::Mlp => Model::Mlp(MlpModel::init(row_width, hidden, rng)),
            Family::Lstm => Model::Lstm(LstmModel::init(row_width - lags + 1, hidden, rng)),
            Family::Linear => Model::Linear(LinearModel::zeros(row_width)),
        }
    }

    pub fn family(&self) -> Family {
        match self {
            Model::Mlp(_) => Family::Mlp,
            Model::Lstm(_) => Family::Lstm,
            Model::Linear(_) => Family::Linear,
        }
    }

    pub fn params(&self) -> Vec<f64> {
        match self {
            Model::Mlp(m) => m.params(),
            Model::Lstm(m) => m.params(),
            Model::Linear(m) => m.params(),
        }
    }

    pub fn set_params(&mut self, p: &[f64]) {
        match self {
            Model::Mlp(m) => m.set_params(p),
            Model::Lstm(m) => m.set_params(p),
            Model::Linear(m) => m.set_params(p),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Model::Mlp(m) => m.validate(),
            Model::Lstm(m) => m.validate(),
            Model::Linear(m) => m.validate(),
        }
    }

    /// Feature-row width this model accepts given the lag depth.
    pub fn row_width(&self, lags: usize) -> usize {
        match self {
            Model::Mlp(m) => m.input,
            Model::Lstm(m) => m.input + lags - 1,
            Model::Linear(m) => m.w.len(),
        }
    }

    pub(crate) fn prepare(&self, rows: &[Vec<f64>], lags: usize) -> Result<Inputs> {
        let want = self.row_width(lags);
        if let Some(r) = rows.iter().find(|r| r.len() != want) {
            return Err(Error::DimensionMismatch {
                expected: want,
                got: r.len(),
            });
        }
        Ok(match self {
            Model::Lstm(_) => Inputs::Seqs(rows.iter().map(|r| row_to_sequence(r, lags)).collect()),
            _ => Inputs::Rows(rows.to_vec()),
        })
    }

    pub(crate) fn predict_prepared(&self, x: &Inputs, i: usize) -> Result<f64> {
        match (self, x) {
            (Model::Mlp(m), Inputs::Rows(r)) => mlp_forward(m, &r[i]),
            (Model::Linear(m), Inputs::Rows(r)) => m.forward(&r[i]),
            (Model::Lstm(m), Inputs::Seqs(s)) => lstm_forward(m, &s[i]),
            _ => unreachable!("inputs prepared for another family"),
        }
    }

    pub(crate) fn loss_grad(&self, x: &Inputs, idx: &[usize], ys: &[f64]) -> Result<(f64, Vec<f64>)> {
        match (self, x) {
            (Model::Mlp(m), Inputs::Rows(r)) => {
                let xs: Vec<&[f64]> = idx.iter().map(|&i| r[i].as_slice()).collect();
                mlp_loss_grad(m, &xs, ys)
            }
            (Model::Linear(m), Inputs::Rows(r)) => {
                let xs: Vec<&[f64]> = idx.iter().map(|&i| r[i].as_slice()).collect();
                linear_loss_grad(m, &xs, ys)
            }
            (Model::Lstm(m), Inputs::Seqs(s)) => {
                let xs: Vec<&[Vec<f64>]> = idx.iter().map(|&i| s[i].as_slice()).collect();
                lstm_loss_grad(m, &xs, ys)
            }
            _ => unreachable!("inputs prepared for another family"),
        }
    }

    /// Prediction for one feature row, in z-score space.
    pub fn predict_row(&self, row: &[f64], lags: usize) -> Result<f64> {
        let x = self.prepare(std::slice::from_ref(&row.to_vec()), lags)?;
        self.predict_prepared(&x, 0)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Model> {
        let m: Model = serde_json::from_str(s)?;
        m.validate()?;
        Ok(m)
    }
}
