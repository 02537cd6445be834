//! Best-of-N training protocol and evaluation.

use std::time::Instant;

use chrono::Duration;
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::optim::{clip_global_norm, Optimizer, OptimizerKind};
use super::{rmse, Family, Model};
use crate::error::{Error, Result};
use crate::features::FeatureMatrix;
use crate::ingest::{LoadSeries, Provenance};
use crate::rng::rng_for;

const SPLIT_STREAM: u64 = 0x5711;
const RUN_STREAM: u64 = 0x7a11;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitMode {
    Chronological,
    Random,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub runs: usize,
    /// Train, validation and test fractions.
    pub split: [f64; 3],
    pub split_mode: SplitMode,
    pub seed: u64,
    /// Global gradient-norm ceiling; `0` disables clipping.
    pub clip: f64,
    pub optimizer: OptimizerKind,
    pub momentum: f64,
    pub hidden: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.005,
            epochs: 40,
            batch_size: 32,
            runs: 10,
            split: [0.70, 0.15, 0.15],
            split_mode: SplitMode::Chronological,
            seed: 0,
            clip: 5.0,
            optimizer: OptimizerKind::Adam,
            momentum: 0.9,
            hidden: 16,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(format!("nn: {m}")));
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad("learning rate must be positive");
        }
        if self.runs == 0 || self.epochs == 0 || self.batch_size == 0 || self.hidden == 0 {
            return bad("runs, epochs, batch size and hidden width must be >= 1");
        }
        if self.split.iter().any(|f| !(*f >= 0.0)) || (self.split.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return bad("split fractions must be non-negative and sum to 1");
        }
        if !(self.clip >= 0.0) || !(0.0..1.0).contains(&self.momentum) {
            return bad("clip must be >= 0 and momentum in [0, 1)");
        }
        Ok(())
    }
}

/// Training outcome; RMSE values are in RT. Equality ignores wall time.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalReport {
    pub family: Family,
    pub feature_set: String,
    /// `None` marks a run that diverged.
    pub run_val_rmse: Vec<Option<f64>>,
    pub selected_run: usize,
    pub train_rmse: f64,
    pub val_rmse: f64,
    pub test_rmse: f64,
    /// Mean minibatch loss per epoch of the selected run, z-score units.
    pub loss_trace: Vec<f64>,
    pub split_sizes: [usize; 3],
    #[serde(skip)]
    pub wall_time_s: f64,
}

impl PartialEq for EvalReport {
    fn eq(&self, o: &Self) -> bool {
        self.family == o.family
            && self.feature_set == o.feature_set
            && self.run_val_rmse == o.run_val_rmse
            && self.selected_run == o.selected_run
            && self.train_rmse == o.train_rmse
            && self.val_rmse == o.val_rmse
            && self.test_rmse == o.test_rmse
            && self.loss_trace == o.loss_trace
            && self.split_sizes == o.split_sizes
    }
}

struct Split {
    train: Vec<usize>,
    val: Vec<usize>,
    test: Vec<usize>,
}

fn split_rows(n: usize, cfg: &TrainConfig) -> Result<Split> {
    let n_train = (cfg.split[0] * n as f64).floor() as usize;
    let n_val = (cfg.split[1] * n as f64).floor() as usize;
    if n_train == 0 || n_val == 0 || n_train + n_val >= n {
        return Err(Error::InsufficientData(format!(
            "{n} rows cannot fill non-empty train/validation/test partitions"
        )));
    }
    let mut idx: Vec<usize> = (0..n).collect();
    if cfg.split_mode == SplitMode::Random {
        idx.shuffle(&mut rng_for(cfg.seed, SPLIT_STREAM));
    }
    let test = idx.split_off(n_train + n_val);
    let val = idx.split_off(n_train);
    Ok(Split { train: idx, val, test })
}

struct RunResult {
    model: Model,
    trace: Vec<f64>,
}

fn train_run(family: Family, fm: &FeatureMatrix, ys: &[f64], split: &Split, cfg: &TrainConfig, run: usize) -> Result<Option<RunResult>> {
    let mut rng = rng_for(cfg.seed.wrapping_add(run as u64), RUN_STREAM);
    let mut model = Model::init(family, fm.width(), fm.lags(), cfg.hidden, &mut rng);
    let x = model.prepare(&fm.features, fm.lags())?;
    let mut params = model.params();
    let mut opt = Optimizer::new(cfg.optimizer, cfg.learning_rate, cfg.momentum, params.len());
    let mut order = split.train.clone();
    let mut trace = Vec::with_capacity(cfg.epochs);
    let mut batch_y = Vec::with_capacity(cfg.batch_size.min(order.len()));
    for _ in 0..cfg.epochs {
        order.shuffle(&mut rng);
        let mut total = 0.0;
        for batch in order.chunks(cfg.batch_size) {
            batch_y.clear();
            batch_y.extend(batch.iter().map(|&i| ys[i]));
            let (loss, mut g) = model.loss_grad(&x, batch, &batch_y)?;
            if !loss.is_finite() || !g.iter().all(|v| v.is_finite()) {
                return Ok(None);
            }
            total += loss * batch.len() as f64;
            clip_global_norm(&mut g, cfg.clip);
            opt.step(&mut params, &g);
            model.set_params(&params);
        }
        trace.push(total / order.len() as f64);
    }
    Ok(Some(RunResult { model, trace }))
}

fn rmse_rt(model: &Model, fm: &FeatureMatrix, rows: &[usize]) -> Result<f64> {
    let pred = predict_rows(model, fm)?;
    let y: Vec<f64> = rows.iter().map(|&i| fm.targets[i]).collect();
    let p: Vec<f64> = rows.iter().map(|&i| pred[i]).collect();
    rmse(&y, &p)
}

/// Trains `cfg.runs` independently initialised networks and keeps the one
/// with the lowest validation RMSE; ties go to the lowest run index.
pub fn train(family: Family, fm: &FeatureMatrix, cfg: &TrainConfig) -> Result<(Model, EvalReport)> {
    cfg.validate()?;
    let started = Instant::now();
    let split = split_rows(fm.n_rows(), cfg)?;
    let ys: Vec<f64> = fm.targets.iter().map(|&t| fm.load_scaler.apply(0, t)).collect();

    let mut run_val = Vec::with_capacity(cfg.runs);
    let mut best: Option<(usize, f64, RunResult)> = None;
    for run in 0..cfg.runs {
        let Some(res) = train_run(family, fm, &ys, &split, cfg, run)? else {
            run_val.push(None);
            continue;
        };
        let v = rmse_rt(&res.model, fm, &split.val)?;
        if !v.is_finite() {
            run_val.push(None);
            continue;
        }
        run_val.push(Some(v));
        if best.as_ref().is_none_or(|(_, bv, _)| v < *bv) {
            best = Some((run, v, res));
        }
    }
    let Some((selected, val_rmse, res)) = best else {
        return Err(Error::Training(format!(
            "all {} {} runs on {} diverged",
            cfg.runs,
            family.as_str(),
            fm.spec.name
        )));
    };
    let report = EvalReport {
        family,
        feature_set: fm.spec.name.clone(),
        run_val_rmse: run_val,
        selected_run: selected,
        train_rmse: rmse_rt(&res.model, fm, &split.train)?,
        val_rmse,
        test_rmse: rmse_rt(&res.model, fm, &split.test)?,
        loss_trace: res.trace,
        split_sizes: [split.train.len(), split.val.len(), split.test.len()],
        wall_time_s: started.elapsed().as_secs_f64(),
    };
    Ok((res.model, report))
}

/// De-normalised prediction for every row, RT.
pub fn predict_rows(model: &Model, fm: &FeatureMatrix) -> Result<Vec<f64>> {
    let x = model.prepare(&fm.features, fm.lags())?;
    (0..x.len())
        .map(|i| Ok(fm.load_scaler.inverse(0, model.predict_prepared(&x, i)?)))
        .collect()
}

/// Predictions stamped at the target instants `t + step`.
pub fn predict_series(model: &Model, fm: &FeatureMatrix) -> Result<LoadSeries> {
    if fm.n_rows() == 0 {
        return Err(Error::InsufficientData("no feature rows to predict".into()));
    }
    let values = predict_rows(model, fm)?;
    Ok(LoadSeries::new(
        fm.timestamps[0] + Duration::minutes(fm.step_minutes),
        fm.step_minutes,
        values,
        Provenance::Predicted,
    ))
}
