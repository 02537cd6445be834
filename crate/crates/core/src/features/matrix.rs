//! Supervised feature sets.
//!
//! Row layout: `[workday, offday, time_of_day, weather block, load lags]`.
//! The weather block is either three z-scored values or a one-hot cluster
//! indicator; lags run from the current step backwards. The target is the
//! load one step ahead, in RT.

use std::io::Write;

use chrono::{Datelike, NaiveDate, NaiveDateTime, Timelike, Weekday};
use serde::{Deserialize, Serialize};

use super::kmeans::ClusterModel;
use super::scaler::{zscore_fit, ScalerParams};
use crate::error::{Error, Result};
use crate::ingest::{format_timestamp, LoadSeries, Provenance, WeatherSample};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeatherMode {
    Raw,
    Clustered(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FeatureSpec {
    pub name: String,
    pub weather: WeatherMode,
    pub lags: usize,
    pub load_source: Provenance,
}

impl FeatureSpec {
    pub fn benchmark() -> Self {
        Self {
            name: "Benchmark".into(),
            weather: WeatherMode::Raw,
            lags: 1,
            load_source: Provenance::Raw,
        }
    }

    pub fn filtered(weather: WeatherMode, lags: usize) -> Self {
        let w = match weather {
            WeatherMode::Raw => "Raw".to_string(),
            WeatherMode::Clustered(k) => format!("K{k}"),
        };
        Self {
            name: format!("{w}-N{lags}"),
            weather,
            lags,
            load_source: Provenance::KalmanFiltered,
        }
    }

    /// The benchmark followed by the eight filtered sets.
    pub fn all() -> Vec<FeatureSpec> {
        let mut v = vec![Self::benchmark()];
        for w in [
            WeatherMode::Raw,
            WeatherMode::Clustered(2),
            WeatherMode::Clustered(3),
            WeatherMode::Clustered(4),
        ] {
            for n in [1, 5] {
                v.push(Self::filtered(w, n));
            }
        }
        v
    }

    pub fn by_name(name: &str) -> Option<FeatureSpec> {
        Self::all().into_iter().find(|s| s.name == name)
    }

    pub fn is_benchmark(&self) -> bool {
        self.name == "Benchmark"
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(format!("feature set {}: {m}", self.name)));
        if self.lags == 0 {
            return bad("lag depth must be >= 1".into());
        }
        if let WeatherMode::Clustered(k) = self.weather {
            if !(2..=4).contains(&k) {
                return bad(format!("cluster count {k} outside 2..=4"));
            }
        }
        if self.is_benchmark() {
            if self.weather != WeatherMode::Raw || self.lags != 1 || self.load_source != Provenance::Raw {
                return bad("benchmark must use raw weather, N = 1 and raw load".into());
            }
        } else if self.load_source != Provenance::KalmanFiltered {
            return bad("non-benchmark sets use the filtered load".into());
        }
        Ok(())
    }

    /// Number of feature columns this feature set produces.
    pub fn width(&self) -> usize {
        let weather = match self.weather {
            WeatherMode::Raw => 3,
            WeatherMode::Clustered(k) => k,
        };
        3 + weather + self.lags
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColumnKind {
    DayType,
    TimeOfDay,
    Weather,
    Cluster,
    LoadLag,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureColumn {
    pub name: String,
    pub kind: ColumnKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureOptions {
    /// Fraction of rows whose data fits the scalers when `train_until` is unset.
    pub train_fraction: f64,
    /// Rows with `t` strictly before this instant form the training partition.
    pub train_until: Option<NaiveDateTime>,
    /// Extra off-days besides Saturday and Sunday.
    pub holidays: Vec<NaiveDate>,
}

impl Default for FeatureOptions {
    fn default() -> Self {
        Self {
            train_fraction: 0.70,
            train_until: None,
            holidays: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureMatrix {
    pub spec: FeatureSpec,
    pub columns: Vec<FeatureColumn>,
    /// Instant `t` of each row; the target belongs to `t + step`.
    pub timestamps: Vec<NaiveDateTime>,
    pub step_minutes: i64,
    pub features: Vec<Vec<f64>>,
    /// One-step-ahead load, RT.
    pub targets: Vec<f64>,
    /// Scaler of the load lags; also used for targets.
    pub load_scaler: ScalerParams,
    pub weather_scaler: Option<ScalerParams>,
    /// Rows in the partition the scalers were fit on.
    pub train_rows: usize,
}

impl FeatureMatrix {
    pub fn n_rows(&self) -> usize {
        self.features.len()
    }

    pub fn width(&self) -> usize {
        self.columns.len()
    }

    pub fn lags(&self) -> usize {
        self.spec.lags
    }

    /// Width of the non-lag block shared by every step of a sequence.
    pub fn static_width(&self) -> usize {
        self.width() - self.lags()
    }

    pub fn target_timestamp(&self, row: usize) -> NaiveDateTime {
        self.timestamps[row] + chrono::Duration::minutes(self.step_minutes)
    }

    /// Delimiter-separated dump with one header cell per column.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        let mut header = vec!["timestamp".to_string()];
        header.extend(self.columns.iter().map(|c| c.name.clone()));
        header.push("target_rt".into());
        wtr.write_record(&header)?;
        for ((t, row), y) in self.timestamps.iter().zip(&self.features).zip(&self.targets) {
            let mut rec = vec![format_timestamp(*t)];
            rec.extend(row.iter().map(|v| v.to_string()));
            rec.push(y.to_string());
            wtr.write_record(&rec)?;
        }
        wtr.flush().map_err(|e| Error::io("<features>", e))?;
        Ok(())
    }
}

fn is_off_day(d: NaiveDate, holidays: &[NaiveDate]) -> bool {
    matches!(d.weekday(), Weekday::Sat | Weekday::Sun) || holidays.contains(&d)
}

pub fn build_features(
    load: &LoadSeries,
    weather: &[WeatherSample],
    spec: &FeatureSpec,
    cluster: Option<&ClusterModel>,
    opts: &FeatureOptions,
) -> Result<FeatureMatrix> {
    spec.validate()?;
    load.validate_downstream()?;
    if load.provenance != spec.load_source {
        return Err(Error::InvalidConfig(format!(
            "feature set {} expects a {} load series, got {}",
            spec.name,
            spec.load_source.as_str(),
            load.provenance.as_str()
        )));
    }
    if weather.len() != load.len() {
        return Err(Error::SpanMismatch(format!(
            "{} load steps vs {} weather samples",
            load.len(),
            weather.len()
        )));
    }
    if let Some(i) = (0..load.len()).find(|&i| weather[i].timestamp != load.timestamp(i)) {
        return Err(Error::SpanMismatch(format!(
            "weather sample {} at {} does not match load step at {}",
            i,
            weather[i].timestamp,
            load.timestamp(i)
        )));
    }
    let cluster = match (spec.weather, cluster) {
        (WeatherMode::Clustered(k), Some(c)) if c.k == k => Some(c),
        (WeatherMode::Clustered(k), Some(c)) => {
            return Err(Error::InvalidConfig(format!(
                "feature set {} needs k = {k}, cluster model has k = {}",
                spec.name, c.k
            )))
        }
        (WeatherMode::Clustered(_), None) => return Err(Error::MissingClusterModel(spec.name.clone())),
        (WeatherMode::Raw, _) => None,
    };

    let n = spec.lags;
    if load.len() < n + 1 {
        return Err(Error::InsufficientData(format!(
            "{} steps cannot fill {} lags plus a target",
            load.len(),
            n
        )));
    }
    let n_rows = load.len() - n;
    let row_time = |r: usize| load.timestamp(r + n - 1);
    let train_rows = match opts.train_until {
        Some(cut) => (0..n_rows).take_while(|&r| row_time(r) < cut).count(),
        None => {
            if !(opts.train_fraction > 0.0 && opts.train_fraction <= 1.0) {
                return Err(Error::InvalidConfig("train_fraction must be in (0, 1]".into()));
            }
            (opts.train_fraction * n_rows as f64).floor() as usize
        }
    };
    if train_rows == 0 {
        return Err(Error::InsufficientData("training partition is empty".into()));
    }
    // last series index touched by a training row (its target)
    let fit_end = train_rows + n;
    let load_scaler = zscore_fit(&[&load.values[..fit_end]])?;

    let raw_weather: Vec<[f64; 3]> = weather
        .iter()
        .map(ClusterModel::weather_point)
        .collect::<Result<_>>()?;
    let weather_scaler = match spec.weather {
        WeatherMode::Raw => {
            let cols: Vec<Vec<f64>> = (0..3)
                .map(|j| raw_weather[..fit_end].iter().map(|p| p[j]).collect())
                .collect();
            Some(zscore_fit(&cols)?)
        }
        WeatherMode::Clustered(_) => None,
    };

    let mut columns = vec![
        FeatureColumn { name: "workday".into(), kind: ColumnKind::DayType },
        FeatureColumn { name: "offday".into(), kind: ColumnKind::DayType },
        FeatureColumn { name: "time_of_day".into(), kind: ColumnKind::TimeOfDay },
    ];
    match spec.weather {
        WeatherMode::Raw => columns.extend(["dry_bulb_z", "humidity_ratio_z", "wind_speed_z"].map(|s| {
            FeatureColumn { name: s.into(), kind: ColumnKind::Weather }
        })),
        WeatherMode::Clustered(k) => columns.extend((0..k).map(|j| FeatureColumn {
            name: format!("cluster_{j}"),
            kind: ColumnKind::Cluster,
        })),
    }
    columns.extend((0..n).map(|j| FeatureColumn {
        name: format!("load_lag{j}_z"),
        kind: ColumnKind::LoadLag,
    }));

    let mut features = Vec::with_capacity(n_rows);
    let mut targets = Vec::with_capacity(n_rows);
    let mut timestamps = Vec::with_capacity(n_rows);
    for r in 0..n_rows {
        let t = r + n - 1;
        let ts = load.timestamp(t);
        let mut row = Vec::with_capacity(columns.len());
        if is_off_day(ts.date(), &opts.holidays) {
            row.extend([0.0, 1.0]);
        } else {
            row.extend([1.0, 0.0]);
        }
        row.push((ts.hour() * 60 + ts.minute()) as f64 / 1440.0);
        match (spec.weather, cluster) {
            (WeatherMode::Clustered(k), Some(c)) => {
                let label = c.assign_weather(&weather[t])?;
                row.extend((0..k).map(|j| if j == label { 1.0 } else { 0.0 }));
            }
            _ => {
                let s = weather_scaler.as_ref().unwrap();
                row.extend(s.apply_row(&raw_weather[t]));
            }
        }
        row.extend((0..n).map(|j| load_scaler.apply(0, load.values[t - j])));
        let target = load.values[t + 1];
        if let Some(v) = row.iter().chain(std::iter::once(&target)).find(|v| !v.is_finite()) {
            return Err(Error::Parse(format!("non-finite feature value {v} at {ts}")));
        }
        features.push(row);
        targets.push(target);
        timestamps.push(ts);
    }

    Ok(FeatureMatrix {
        spec: spec.clone(),
        columns,
        timestamps,
        step_minutes: load.step_minutes,
        features,
        targets,
        load_scaler,
        weather_scaler,
        train_rows,
    })
}
