//! One-hidden-layer perceptron: `w2 . tanh(W1 x + b1) + b2`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::glorot;
use crate::error::{Error, Result};

/// Parameters are stored row-major; flat order is `w1, b1, w2, b2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpModel {
    pub input: usize,
    pub hidden: usize,
    /// `hidden x input`.
    pub w1: Vec<f64>,
    pub b1: Vec<f64>,
    pub w2: Vec<f64>,
    pub b2: f64,
}

impl MlpModel {
    pub fn zeros(input: usize, hidden: usize) -> Self {
        Self {
            input,
            hidden,
            w1: vec![0.0; hidden * input],
            b1: vec![0.0; hidden],
            w2: vec![0.0; hidden],
            b2: 0.0,
        }
    }

    pub fn init<R: Rng>(input: usize, hidden: usize, rng: &mut R) -> Self {
        let mut m = Self::zeros(input, hidden);
        glorot(&mut m.w1, input, hidden, rng);
        glorot(&mut m.w2, hidden, 1, rng);
        m
    }

    pub fn n_params(&self) -> usize {
        self.hidden * self.input + 2 * self.hidden + 1
    }

    pub fn params(&self) -> Vec<f64> {
        let mut p = Vec::with_capacity(self.n_params());
        p.extend_from_slice(&self.w1);
        p.extend_from_slice(&self.b1);
        p.extend_from_slice(&self.w2);
        p.push(self.b2);
        p
    }

    pub fn set_params(&mut self, p: &[f64]) {
        debug_assert_eq!(p.len(), self.n_params());
        let (w1, rest) = p.split_at(self.w1.len());
        let (b1, rest) = rest.split_at(self.hidden);
        let (w2, rest) = rest.split_at(self.hidden);
        self.w1.copy_from_slice(w1);
        self.b1.copy_from_slice(b1);
        self.w2.copy_from_slice(w2);
        self.b2 = rest[0];
    }

    pub fn validate(&self) -> Result<()> {
        if self.w1.len() != self.hidden * self.input
            || self.b1.len() != self.hidden
            || self.w2.len() != self.hidden
        {
            return Err(Error::Parse("mlp parameter shapes inconsistent with widths".into()));
        }
        if !self.params().iter().all(|v| v.is_finite()) {
            return Err(Error::Parse("mlp parameters must be finite".into()));
        }
        Ok(())
    }

    fn check(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.input {
            return Err(Error::DimensionMismatch {
                expected: self.input,
                got: x.len(),
            });
        }
        Ok(())
    }

    /// Hidden activations into `a`; returns the output.
    fn forward_into(&self, x: &[f64], a: &mut [f64]) -> f64 {
        let mut y = self.b2;
        for j in 0..self.hidden {
            let row = &self.w1[j * self.input..(j + 1) * self.input];
            let z: f64 = self.b1[j] + row.iter().zip(x).map(|(w, v)| w * v).sum::<f64>();
            a[j] = z.tanh();
            y += self.w2[j] * a[j];
        }
        y
    }
}

pub fn mlp_forward(model: &MlpModel, x: &[f64]) -> Result<f64> {
    model.check(x)?;
    let mut a = vec![0.0; model.hidden];
    Ok(model.forward_into(x, &mut a))
}

/// Mean-squared loss `(1/m) sum (y - yhat)^2` and its gradient in flat order.
pub fn mlp_loss_grad(model: &MlpModel, xs: &[&[f64]], ys: &[f64]) -> Result<(f64, Vec<f64>)> {
    if xs.is_empty() || xs.len() != ys.len() {
        return Err(Error::InsufficientData("gradient needs a non-empty, aligned batch".into()));
    }
    let (ni, nh) = (model.input, model.hidden);
    let mut g = vec![0.0; model.n_params()];
    let (gw1, rest) = g.split_at_mut(nh * ni);
    let (gb1, rest) = rest.split_at_mut(nh);
    let (gw2, gb2) = rest.split_at_mut(nh);
    let mut a = vec![0.0; nh];
    let m = xs.len() as f64;
    let mut loss = 0.0;
    for (x, &y) in xs.iter().zip(ys) {
        model.check(x)?;
        let yhat = model.forward_into(x, &mut a);
        let r = yhat - y;
        loss += r * r;
        let dy = 2.0 * r / m;
        gb2[0] += dy;
        for j in 0..nh {
            gw2[j] += dy * a[j];
            let dz = dy * model.w2[j] * (1.0 - a[j] * a[j]);
            gb1[j] += dz;
            let row = &mut gw1[j * ni..(j + 1) * ni];
            for (gw, v) in row.iter_mut().zip(x.iter()) {
                *gw += dz * v;
            }
        }
    }
    Ok((loss / m, g))
}

pub fn mlp_gradient(model: &MlpModel, xs: &[&[f64]], ys: &[f64]) -> Result<Vec<f64>> {
    mlp_loss_grad(model, xs, ys).map(|(_, g)| g)
}
