use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `w . x + b`; flat order `w, b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub w: Vec<f64>,
    pub b: f64,
}

impl LinearModel {
    pub fn zeros(input: usize) -> Self {
        Self { w: vec![0.0; input], b: 0.0 }
    }

    pub fn params(&self) -> Vec<f64> {
        let mut p = self.w.clone();
        p.push(self.b);
        p
    }

    pub fn set_params(&mut self, p: &[f64]) {
        let n = self.w.len();
        self.w.copy_from_slice(&p[..n]);
        self.b = p[n];
    }

    pub fn validate(&self) -> Result<()> {
        if !self.params().iter().all(|v| v.is_finite()) {
            return Err(Error::Parse("linear parameters must be finite".into()));
        }
        Ok(())
    }

    pub fn forward(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.w.len() {
            return Err(Error::DimensionMismatch {
                expected: self.w.len(),
                got: x.len(),
            });
        }
        Ok(self.b + self.w.iter().zip(x).map(|(a, b)| a * b).sum::<f64>())
    }
}

pub fn linear_loss_grad(model: &LinearModel, xs: &[&[f64]], ys: &[f64]) -> Result<(f64, Vec<f64>)> {
    if xs.is_empty() || xs.len() != ys.len() {
        return Err(Error::InsufficientData("gradient needs a non-empty, aligned batch".into()));
    }
    let n = model.w.len();
    let m = xs.len() as f64;
    let mut g = vec![0.0; n + 1];
    let mut loss = 0.0;
    for (x, &y) in xs.iter().zip(ys) {
        let r = model.forward(x)? - y;
        loss += r * r;
        let d = 2.0 * r / m;
        for k in 0..n {
            g[k] += d * x[k];
        }
        g[n] += d;
    }
    Ok((loss / m, g))
}
