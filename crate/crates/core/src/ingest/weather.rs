use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use chrono::NaiveDateTime;
use serde::{Deserialize, Serialize};

use super::psychro::humidity_ratio;
use super::telemetry::RejectedRow;
use super::{format_timestamp, parse_timestamp};
use crate::error::{Error, Result};

pub const PRESSURE_RANGE_HPA: (f64, f64) = (850.0, 1100.0);

/// Half-hourly weather observation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeatherSample {
    pub timestamp: NaiveDateTime,
    /// degC
    pub dry_bulb: f64,
    /// percent, 0..=100
    pub rel_humidity: f64,
    /// degrees
    pub wind_dir: f64,
    /// m/s
    pub wind_speed: f64,
    /// hPa
    pub pressure: f64,
}

impl WeatherSample {
    pub fn validate(&self) -> std::result::Result<(), String> {
        if !(0.0..=100.0).contains(&self.rel_humidity) {
            return Err(format!("rel_humidity {} outside [0, 100]", self.rel_humidity));
        }
        if self.wind_speed < 0.0 {
            return Err(format!("negative wind_speed {}", self.wind_speed));
        }
        if !(PRESSURE_RANGE_HPA.0..=PRESSURE_RANGE_HPA.1).contains(&self.pressure) {
            return Err(format!("pressure {} outside [850, 1100] hPa", self.pressure));
        }
        Ok(())
    }

    pub fn humidity_ratio(&self) -> Result<f64> {
        humidity_ratio(self.dry_bulb, self.rel_humidity, self.pressure)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeatherColumnMap {
    pub timestamp: String,
    pub dry_bulb: String,
    pub rel_humidity: String,
    pub wind_dir: String,
    pub wind_speed: String,
    pub pressure: String,
    pub delimiter: u8,
}

impl Default for WeatherColumnMap {
    fn default() -> Self {
        Self {
            timestamp: "timestamp".into(),
            dry_bulb: "dry_bulb".into(),
            rel_humidity: "rel_humidity".into(),
            wind_dir: "wind_dir".into(),
            wind_speed: "wind_speed".into(),
            pressure: "pressure".into(),
            delimiter: b',',
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeatherParse {
    pub samples: Vec<WeatherSample>,
    pub rejects: Vec<RejectedRow>,
}

pub fn parse_weather(path: &Path, schema: &WeatherColumnMap) -> Result<WeatherParse> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_weather(file, &path.display().to_string(), schema)
}

pub fn read_weather<R: Read>(reader: R, source: &str, schema: &WeatherColumnMap) -> Result<WeatherParse> {
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(schema.delimiter)
        .comment(Some(b'#'))
        .flexible(true)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    let col = |name: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| Error::Schema {
                path: source.into(),
                column: name.to_string(),
            })
    };
    let idx_ts = col(&schema.timestamp)?;
    let names = [
        &schema.dry_bulb,
        &schema.rel_humidity,
        &schema.wind_dir,
        &schema.wind_speed,
        &schema.pressure,
    ];
    let idx = names.map(|n| col(n));
    let idx: Vec<usize> = idx.into_iter().collect::<Result<_>>()?;

    let mut rows = Vec::new();
    let mut rejects = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        let raw = rec.iter().collect::<Vec<_>>().join(&(schema.delimiter as char).to_string());
        let Some(ts) = rec.get(idx_ts).and_then(parse_timestamp) else {
            rejects.push(RejectedRow {
                line,
                reason: format!("unparseable timestamp in `{}`", schema.timestamp),
                raw,
            });
            continue;
        };
        let parsed: Option<Vec<f64>> = idx
            .iter()
            .map(|&i| {
                rec.get(i)
                    .and_then(|s| s.trim().parse::<f64>().ok())
                    .filter(|v| v.is_finite())
            })
            .collect();
        let Some(v) = parsed else {
            rejects.push(RejectedRow {
                line,
                reason: "unparseable number".into(),
                raw,
            });
            continue;
        };
        let s = WeatherSample {
            timestamp: ts,
            dry_bulb: v[0],
            rel_humidity: v[1],
            wind_dir: v[2],
            wind_speed: v[3],
            pressure: v[4],
        };
        if let Err(reason) = s.validate() {
            rejects.push(RejectedRow { line, reason, raw });
            continue;
        }
        rows.push((line, raw, s));
    }
    rows.sort_by(|a, b| a.2.timestamp.cmp(&b.2.timestamp).then(a.0.cmp(&b.0)));
    let mut samples: Vec<WeatherSample> = Vec::with_capacity(rows.len());
    for (line, raw, s) in rows {
        if samples.last().is_some_and(|p| p.timestamp == s.timestamp) {
            rejects.push(RejectedRow {
                line,
                reason: format!("duplicate timestamp {}", format_timestamp(s.timestamp)),
                raw,
            });
        } else {
            samples.push(s);
        }
    }
    rejects.sort_by_key(|r| r.line);
    if samples.is_empty() {
        return Err(Error::EmptyInput(source.to_string()));
    }
    Ok(WeatherParse { samples, rejects })
}

pub fn write_weather<W: Write>(w: W, samples: &[WeatherSample]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["timestamp", "dry_bulb", "rel_humidity", "wind_dir", "wind_speed", "pressure"])?;
    for s in samples {
        wtr.write_record([
            format_timestamp(s.timestamp),
            s.dry_bulb.to_string(),
            s.rel_humidity.to_string(),
            s.wind_dir.to_string(),
            s.wind_speed.to_string(),
            s.pressure.to_string(),
        ])?;
    }
    wtr.flush().map_err(|e| Error::io("<weather>", e))?;
    Ok(())
}
