//! Single-layer LSTM with a dense head on the final hidden state.
//!
//! Gate blocks are stacked in the order forget, input, candidate, output:
//! row `g * hidden + j` of `w` belongs to unit `j` of gate `g`, and every row
//! acts on the concatenation `[h_prev, x_t]`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{glorot, sigmoid};
use crate::error::{Error, Result};

const F: usize = 0;
const I: usize = 1;
const C: usize = 2;
const O: usize = 3;

/// Flat parameter order is `w, b, wd, bd`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LstmModel {
    pub input: usize,
    pub hidden: usize,
    /// `4 hidden x (hidden + input)`.
    pub w: Vec<f64>,
    pub b: Vec<f64>,
    pub wd: Vec<f64>,
    pub bd: f64,
}

/// Forward-pass intermediates for one time step.
#[derive(Debug, Clone, PartialEq)]
pub struct LstmStep {
    pub f: Vec<f64>,
    pub i: Vec<f64>,
    pub c_tilde: Vec<f64>,
    pub o: Vec<f64>,
    pub c: Vec<f64>,
    pub h: Vec<f64>,
}

impl LstmModel {
    pub fn zeros(input: usize, hidden: usize) -> Self {
        Self {
            input,
            hidden,
            w: vec![0.0; 4 * hidden * (hidden + input)],
            b: vec![0.0; 4 * hidden],
            wd: vec![0.0; hidden],
            bd: 0.0,
        }
    }

    pub fn init<R: Rng>(input: usize, hidden: usize, rng: &mut R) -> Self {
        let mut m = Self::zeros(input, hidden);
        let cols = hidden + input;
        for g in 0..4 {
            let block = &mut m.w[g * hidden * cols..(g + 1) * hidden * cols];
            glorot(block, cols, hidden, rng);
        }
        glorot(&mut m.wd, hidden, 1, rng);
        m
    }

    fn cols(&self) -> usize {
        self.hidden + self.input
    }

    pub fn n_params(&self) -> usize {
        self.w.len() + self.b.len() + self.hidden + 1
    }

    pub fn params(&self) -> Vec<f64> {
        let mut p = Vec::with_capacity(self.n_params());
        p.extend_from_slice(&self.w);
        p.extend_from_slice(&self.b);
        p.extend_from_slice(&self.wd);
        p.push(self.bd);
        p
    }

    pub fn set_params(&mut self, p: &[f64]) {
        debug_assert_eq!(p.len(), self.n_params());
        let (w, rest) = p.split_at(self.w.len());
        let (b, rest) = rest.split_at(self.b.len());
        let (wd, rest) = rest.split_at(self.hidden);
        self.w.copy_from_slice(w);
        self.b.copy_from_slice(b);
        self.wd.copy_from_slice(wd);
        self.bd = rest[0];
    }

    pub fn validate(&self) -> Result<()> {
        if self.w.len() != 4 * self.hidden * self.cols() || self.b.len() != 4 * self.hidden || self.wd.len() != self.hidden {
            return Err(Error::Parse("lstm parameter shapes inconsistent with widths".into()));
        }
        if !self.params().iter().all(|v| v.is_finite()) {
            return Err(Error::Parse("lstm parameters must be finite".into()));
        }
        Ok(())
    }

    fn check(&self, seq: &[Vec<f64>]) -> Result<()> {
        if seq.is_empty() {
            return Err(Error::InsufficientData("lstm input sequence is empty".into()));
        }
        if let Some(x) = seq.iter().find(|x| x.len() != self.input) {
            return Err(Error::DimensionMismatch {
                expected: self.input,
                got: x.len(),
            });
        }
        Ok(())
    }

    /// Runs the cell over `seq`, returning every step and the head output.
    pub fn trace(&self, seq: &[Vec<f64>]) -> Result<(Vec<LstmStep>, f64)> {
        self.check(seq)?;
        let (nh, cols) = (self.hidden, self.cols());
        let mut steps: Vec<LstmStep> = Vec::with_capacity(seq.len());
        let mut z = vec![0.0; cols];
        let mut pre = vec![0.0; 4 * nh];
        for x in seq {
            let (h_prev, c_prev) = match steps.last() {
                Some(s) => (s.h.as_slice(), s.c.as_slice()),
                None => (&[][..], &[][..]),
            };
            if h_prev.is_empty() {
                z[..nh].iter_mut().for_each(|v| *v = 0.0);
            } else {
                z[..nh].copy_from_slice(h_prev);
            }
            z[nh..].copy_from_slice(x);
            for (r, p) in pre.iter_mut().enumerate() {
                let row = &self.w[r * cols..(r + 1) * cols];
                *p = self.b[r] + row.iter().zip(&z).map(|(a, b)| a * b).sum::<f64>();
            }
            let mut s = LstmStep {
                f: vec![0.0; nh],
                i: vec![0.0; nh],
                c_tilde: vec![0.0; nh],
                o: vec![0.0; nh],
                c: vec![0.0; nh],
                h: vec![0.0; nh],
            };
            for j in 0..nh {
                s.f[j] = sigmoid(pre[F * nh + j]);
                s.i[j] = sigmoid(pre[I * nh + j]);
                s.c_tilde[j] = pre[C * nh + j].tanh();
                s.o[j] = sigmoid(pre[O * nh + j]);
                let cp = if c_prev.is_empty() { 0.0 } else { c_prev[j] };
                s.c[j] = s.f[j] * cp + s.i[j] * s.c_tilde[j];
                s.h[j] = s.o[j] * s.c[j].tanh();
            }
            steps.push(s);
        }
        let h = &steps.last().unwrap().h;
        let y = self.bd + self.wd.iter().zip(h).map(|(a, b)| a * b).sum::<f64>();
        Ok((steps, y))
    }
}

pub fn lstm_forward(model: &LstmModel, seq: &[Vec<f64>]) -> Result<f64> {
    model.trace(seq).map(|(_, y)| y)
}

/// Mean-squared loss over sequences and its gradient by backpropagation
/// through time, in flat parameter order.
pub fn lstm_loss_grad(model: &LstmModel, seqs: &[&[Vec<f64>]], ys: &[f64]) -> Result<(f64, Vec<f64>)> {
    if seqs.is_empty() || seqs.len() != ys.len() {
        return Err(Error::InsufficientData("gradient needs a non-empty, aligned batch".into()));
    }
    let len = seqs[0].len();
    if seqs.iter().any(|s| s.len() != len) {
        return Err(Error::InsufficientData("all sequences in a batch must share one length".into()));
    }
    let (nh, cols) = (model.hidden, model.cols());
    let mut g = vec![0.0; model.n_params()];
    let (gw, rest) = g.split_at_mut(model.w.len());
    let (gb, rest) = rest.split_at_mut(4 * nh);
    let (gwd, gbd) = rest.split_at_mut(nh);
    let m = seqs.len() as f64;
    let mut loss = 0.0;
    let mut dh = vec![0.0; nh];
    let mut dc = vec![0.0; nh];
    let mut da = vec![0.0; 4 * nh];
    let mut z = vec![0.0; cols];
    for (seq, &y) in seqs.iter().zip(ys) {
        let (steps, yhat) = model.trace(seq)?;
        let r = yhat - y;
        loss += r * r;
        let dy = 2.0 * r / m;
        gbd[0] += dy;
        let h_last = &steps[len - 1].h;
        for j in 0..nh {
            gwd[j] += dy * h_last[j];
            dh[j] = dy * model.wd[j];
            dc[j] = 0.0;
        }
        for t in (0..len).rev() {
            let s = &steps[t];
            for j in 0..nh {
                let tc = s.c[j].tanh();
                let c_prev = if t > 0 { steps[t - 1].c[j] } else { 0.0 };
                let d_o = dh[j] * tc;
                dc[j] += dh[j] * s.o[j] * (1.0 - tc * tc);
                let d_f = dc[j] * c_prev;
                let d_i = dc[j] * s.c_tilde[j];
                let d_g = dc[j] * s.i[j];
                da[F * nh + j] = d_f * s.f[j] * (1.0 - s.f[j]);
                da[I * nh + j] = d_i * s.i[j] * (1.0 - s.i[j]);
                da[C * nh + j] = d_g * (1.0 - s.c_tilde[j] * s.c_tilde[j]);
                da[O * nh + j] = d_o * s.o[j] * (1.0 - s.o[j]);
                dc[j] *= s.f[j];
            }
            if t > 0 {
                z[..nh].copy_from_slice(&steps[t - 1].h);
            } else {
                z[..nh].iter_mut().for_each(|v| *v = 0.0);
            }
            z[nh..].copy_from_slice(&seq[t]);
            dh.iter_mut().for_each(|v| *v = 0.0);
            for (r, &d) in da.iter().enumerate() {
                if d == 0.0 {
                    continue;
                }
                gb[r] += d;
                let row = &model.w[r * cols..(r + 1) * cols];
                let grow = &mut gw[r * cols..(r + 1) * cols];
                for k in 0..cols {
                    grow[k] += d * z[k];
                }
                for k in 0..nh {
                    dh[k] += d * row[k];
                }
            }
        }
    }
    Ok((loss / m, g))
}

pub fn lstm_gradient(model: &LstmModel, seqs: &[&[Vec<f64>]], ys: &[f64]) -> Result<Vec<f64>> {
    lstm_loss_grad(model, seqs, ys).map(|(_, g)| g)
}

/// Splits a feature row `[static.., lag0, .., lag{n-1}]` into an oldest-first
/// sequence whose step `s` is `[static.., lag{n-1-s}]`.
pub fn row_to_sequence(row: &[f64], lags: usize) -> Vec<Vec<f64>> {
    let stat = &row[..row.len() - lags];
    (0..lags)
        .map(|s| {
            let mut x = stat.to_vec();
            x.push(row[row.len() - 1 - s]);
            x
        })
        .collect()
}
