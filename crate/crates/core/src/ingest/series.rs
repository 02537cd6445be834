use std::io::{Read, Write};

use chrono::{Duration, NaiveDateTime};
use serde::{Deserialize, Serialize};

use super::{format_timestamp, parse_timestamp};
use crate::error::{Error, Result};

pub const HALF_HOUR_MINUTES: i64 = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Raw,
    KalmanFiltered,
    Predicted,
}

impl Provenance {
    pub fn as_str(&self) -> &'static str {
        match self {
            Provenance::Raw => "raw",
            Provenance::KalmanFiltered => "kalman-filtered",
            Provenance::Predicted => "predicted",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s.trim() {
            "raw" => Some(Provenance::Raw),
            "kalman-filtered" => Some(Provenance::KalmanFiltered),
            "predicted" => Some(Provenance::Predicted),
            _ => None,
        }
    }
}

/// A regularly sampled cooling-load series in RT.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoadSeries {
    pub start: NaiveDateTime,
    pub step_minutes: i64,
    pub values: Vec<f64>,
    pub provenance: Provenance,
}

impl LoadSeries {
    pub fn new(start: NaiveDateTime, step_minutes: i64, values: Vec<f64>, provenance: Provenance) -> Self {
        Self {
            start,
            step_minutes,
            values,
            provenance,
        }
    }

    pub fn half_hourly(start: NaiveDateTime, values: Vec<f64>, provenance: Provenance) -> Self {
        Self::new(start, HALF_HOUR_MINUTES, values, provenance)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn step(&self) -> Duration {
        Duration::minutes(self.step_minutes)
    }

    pub fn step_hours(&self) -> f64 {
        self.step_minutes as f64 / 60.0
    }

    pub fn timestamp(&self, i: usize) -> NaiveDateTime {
        self.start + Duration::minutes(self.step_minutes * i as i64)
    }

    pub fn timestamps(&self) -> impl Iterator<Item = NaiveDateTime> + '_ {
        (0..self.len()).map(|i| self.timestamp(i))
    }

    /// Indices holding negative values. Only raw series may have any.
    pub fn negative_indices(&self) -> Vec<usize> {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, v)| **v < 0.0)
            .map(|(i, _)| i)
            .collect()
    }

    /// Checks the contract for series handed to downstream stages.
    pub fn validate_downstream(&self) -> Result<()> {
        if self.len() < 2 {
            return Err(Error::InsufficientData(format!(
                "load series has {} values, need at least 2",
                self.len()
            )));
        }
        if self.step_minutes <= 0 {
            return Err(Error::InvalidConfig("series step must be positive".into()));
        }
        if let Some(i) = self.values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Parse(format!("non-finite load at index {i}")));
        }
        if self.provenance != Provenance::Raw {
            if let Some(&i) = self.negative_indices().first() {
                return Err(Error::InvalidConfig(format!(
                    "{} series has negative load {} at {}",
                    self.provenance.as_str(),
                    self.values[i],
                    self.timestamp(i)
                )));
            }
        }
        Ok(())
    }

    /// Sub-series `[from, to)` by index.
    pub fn slice(&self, from: usize, to: usize) -> LoadSeries {
        LoadSeries {
            start: self.timestamp(from),
            step_minutes: self.step_minutes,
            values: self.values[from..to].to_vec(),
            provenance: self.provenance,
        }
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["timestamp", "load_rt", "provenance"])?;
        for (i, v) in self.values.iter().enumerate() {
            wtr.write_record([
                format_timestamp(self.timestamp(i)),
                v.to_string(),
                self.provenance.as_str().to_string(),
            ])?;
        }
        wtr.flush().map_err(|e| Error::io("<load series>", e))?;
        Ok(())
    }

    /// Reads a series written by [`LoadSeries::write_csv`]; `#` lines are skipped.
    pub fn read_csv<R: Read>(r: R) -> Result<LoadSeries> {
        let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(r);
        let mut stamps = Vec::new();
        let mut values = Vec::new();
        let mut provenance = None;
        for rec in rdr.records() {
            let rec = rec?;
            let ts = rec
                .get(0)
                .and_then(parse_timestamp)
                .ok_or_else(|| Error::Parse(format!("bad timestamp in {:?}", rec)))?;
            let v: f64 = rec
                .get(1)
                .and_then(|s| s.trim().parse().ok())
                .ok_or_else(|| Error::Parse(format!("bad load in {:?}", rec)))?;
            let p = rec
                .get(2)
                .and_then(Provenance::parse)
                .ok_or_else(|| Error::Parse(format!("bad provenance in {:?}", rec)))?;
            provenance.get_or_insert(p);
            stamps.push(ts);
            values.push(v);
        }
        if values.is_empty() {
            return Err(Error::EmptyInput("load series".into()));
        }
        let step_minutes = if stamps.len() >= 2 {
            (stamps[1] - stamps[0]).num_minutes()
        } else {
            HALF_HOUR_MINUTES
        };
        if step_minutes <= 0 {
            return Err(Error::Parse("load series timestamps not increasing".into()));
        }
        for (i, w) in stamps.windows(2).enumerate() {
            if (w[1] - w[0]).num_minutes() != step_minutes {
                return Err(Error::Parse(format!(
                    "irregular step at row {} ({} -> {})",
                    i + 1,
                    w[0],
                    w[1]
                )));
            }
        }
        Ok(LoadSeries::new(
            stamps[0],
            step_minutes,
            values,
            provenance.unwrap_or(Provenance::Raw),
        ))
    }
}
