//! Scalar Kalman filter for denoising the cooling-load series.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{LoadSeries, Provenance};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KalmanConfig {
    /// State transition.
    pub a: f64,
    /// Measurement scale.
    pub h: f64,
    /// Process-noise variance.
    pub q: f64,
    /// Measurement-noise variance.
    pub r: f64,
    /// Initial estimate; the first measurement when `None`.
    pub x0: Option<f64>,
    pub p0: f64,
}

impl Default for KalmanConfig {
    fn default() -> Self {
        Self {
            a: 1.0,
            h: 1.0,
            q: 1.0,
            r: 1.0,
            x0: None,
            p0: 1.0,
        }
    }
}

impl KalmanConfig {
    pub fn validate(&self) -> Result<()> {
        let finite = [self.a, self.h, self.q, self.r, self.p0].iter().all(|v| v.is_finite())
            && self.x0.is_none_or(f64::is_finite);
        if !finite {
            return Err(Error::InvalidConfig("kalman parameters must be finite".into()));
        }
        if self.q < 0.0 || self.r <= 0.0 || self.p0 < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "kalman requires q >= 0, r > 0, p0 >= 0 (q={}, r={}, p0={})",
                self.q, self.r, self.p0
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KalmanState {
    pub x_hat: f64,
    pub p: f64,
}

/// Intermediate quantities of one predict/update cycle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KalmanStep {
    pub x_prior: f64,
    pub p_prior: f64,
    pub gain: f64,
    pub state: KalmanState,
}

/// One predict/update cycle, returning the intermediates.
pub fn kf_step_detailed(state: KalmanState, z: f64, cfg: &KalmanConfig) -> KalmanStep {
    let x_prior = cfg.a * state.x_hat;
    let p_prior = cfg.a * state.p * cfg.a + cfg.q;
    let gain = p_prior * cfg.h / (cfg.h * p_prior * cfg.h + cfg.r);
    let x_hat = x_prior + gain * (z - cfg.h * x_prior);
    let p = (1.0 - gain * cfg.h) * p_prior;
    KalmanStep {
        x_prior,
        p_prior,
        gain,
        state: KalmanState { x_hat, p },
    }
}

pub fn kf_step(state: KalmanState, z: f64, cfg: &KalmanConfig) -> KalmanState {
    kf_step_detailed(state, z, cfg).state
}

/// Filters a raw series; element `i` is the estimate after consuming measurement `i`.
pub fn kf_filter_series(series: &LoadSeries, cfg: &KalmanConfig) -> Result<LoadSeries> {
    cfg.validate()?;
    let Some(&first) = series.values.first() else {
        return Err(Error::EmptyInput("kalman input series".into()));
    };
    let mut state = KalmanState {
        x_hat: cfg.x0.unwrap_or(first),
        p: cfg.p0,
    };
    let values = series
        .values
        .iter()
        .map(|&z| {
            state = kf_step(state, z, cfg);
            state.x_hat
        })
        .collect();
    Ok(LoadSeries::new(
        series.start,
        series.step_minutes,
        values,
        Provenance::KalmanFiltered,
    ))
}
