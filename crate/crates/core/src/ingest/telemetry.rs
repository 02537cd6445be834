use std::collections::BTreeMap;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use chrono::{Duration, NaiveDateTime, Timelike};
use serde::{Deserialize, Serialize};

use super::series::{LoadSeries, Provenance, HALF_HOUR_MINUTES};
use super::{format_timestamp, parse_timestamp, PhysConstants};
use crate::error::{Error, Result};

/// Plausible chilled/condenser water temperature range, degC.
pub const PLANT_TEMP_RANGE: (f64, f64) = (0.0, 60.0);

/// Longest run of empty half-hour bins that is filled by interpolation.
pub const MAX_INTERPOLATED_BINS: usize = 2;

/// One minute of chiller plant telemetry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TelemetrySample {
    pub timestamp: NaiveDateTime,
    /// Chilled water supply temperature, degC.
    pub chw_supply_temp: f64,
    /// Chilled water return temperature, degC.
    pub chw_return_temp: f64,
    /// Chilled water mass flow, kg/s.
    pub chw_mass_flow: f64,
    pub cw_supply_temp: f64,
    pub cw_return_temp: f64,
    pub cw_mass_flow: f64,
    /// Pumps plus cooling towers, kW.
    pub aux_power: f64,
}

impl TelemetrySample {
    fn temperatures(&self) -> [(&'static str, f64); 4] {
        [
            ("chw_supply_temp", self.chw_supply_temp),
            ("chw_return_temp", self.chw_return_temp),
            ("cw_supply_temp", self.cw_supply_temp),
            ("cw_return_temp", self.cw_return_temp),
        ]
    }
}

/// Cooling load in RT: `cp * m * (T_R - T_S) / kw_per_rt`.
///
/// Negative for transient supply-temperature excursions; the caller decides
/// what to do with those.
pub fn cooling_load(s: &TelemetrySample, c: &PhysConstants) -> f64 {
    c.cp_water * s.chw_mass_flow * (s.chw_return_temp - s.chw_supply_temp) / c.kw_per_rt
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlowUnit {
    /// kg/s, used as is.
    MassKgPerS,
    /// m3/h, converted with a water density of 1000 kg/m3.
    VolumeM3PerH,
}

impl FlowUnit {
    fn to_kg_per_s(self, v: f64) -> f64 {
        match self {
            FlowUnit::MassKgPerS => v,
            FlowUnit::VolumeM3PerH => v * 1000.0 / 3600.0,
        }
    }
}

/// Maps the telemetry fields onto header names of the input file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnMap {
    pub timestamp: String,
    pub chw_supply_temp: String,
    pub chw_return_temp: String,
    pub chw_flow: String,
    pub cw_supply_temp: String,
    pub cw_return_temp: String,
    pub cw_flow: String,
    pub aux_power: String,
    pub flow_unit: FlowUnit,
    pub delimiter: u8,
}

impl Default for ColumnMap {
    fn default() -> Self {
        Self {
            timestamp: "timestamp".into(),
            chw_supply_temp: "chw_supply_temp".into(),
            chw_return_temp: "chw_return_temp".into(),
            chw_flow: "chw_mass_flow".into(),
            cw_supply_temp: "cw_supply_temp".into(),
            cw_return_temp: "cw_return_temp".into(),
            cw_flow: "cw_mass_flow".into(),
            aux_power: "aux_power".into(),
            flow_unit: FlowUnit::MassKgPerS,
            delimiter: b',',
        }
    }
}

/// A data row that could not be turned into a sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RejectedRow {
    /// 1-based line number in the source file (header is line 1).
    pub line: u64,
    pub reason: String,
    pub raw: String,
}

/// A kept sample with a temperature outside the plausible plant range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RangeFlag {
    pub timestamp: NaiveDateTime,
    pub field: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TelemetryParse {
    pub samples: Vec<TelemetrySample>,
    pub rejects: Vec<RejectedRow>,
    pub flags: Vec<RangeFlag>,
}

pub fn parse_telemetry(path: &Path, schema: &ColumnMap) -> Result<TelemetryParse> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_telemetry(file, &path.display().to_string(), schema)
}

/// Parses delimiter-separated telemetry from any reader.
///
/// Rows with unparseable or non-finite numbers, negative flow, or a duplicate
/// timestamp are reported in `rejects`. Output is sorted by timestamp.
pub fn read_telemetry<R: Read>(reader: R, source: &str, schema: &ColumnMap) -> Result<TelemetryParse> {
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
    let idx = [
        col(&schema.chw_supply_temp)?,
        col(&schema.chw_return_temp)?,
        col(&schema.chw_flow)?,
        col(&schema.cw_supply_temp)?,
        col(&schema.cw_return_temp)?,
        col(&schema.cw_flow)?,
        col(&schema.aux_power)?,
    ];
    let names = [
        &schema.chw_supply_temp,
        &schema.chw_return_temp,
        &schema.chw_flow,
        &schema.cw_supply_temp,
        &schema.cw_return_temp,
        &schema.cw_flow,
        &schema.aux_power,
    ];

    let mut samples = Vec::new();
    let mut rejects = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        let raw = rec.iter().collect::<Vec<_>>().join(&(schema.delimiter as char).to_string());
        let reject = |reason: String| RejectedRow {
            line,
            reason,
            raw: raw.clone(),
        };
        let Some(ts) = rec.get(idx_ts).and_then(parse_timestamp) else {
            rejects.push(reject(format!("unparseable timestamp in `{}`", schema.timestamp)));
            continue;
        };
        let mut vals = [0.0f64; 7];
        let mut bad = None;
        for (k, (&i, name)) in idx.iter().zip(names.iter()).enumerate() {
            match rec.get(i).map(str::trim).and_then(|s| s.parse::<f64>().ok()) {
                Some(v) if v.is_finite() => vals[k] = v,
                _ => {
                    bad = Some(format!("unparseable number in `{name}`"));
                    break;
                }
            }
        }
        if let Some(reason) = bad {
            rejects.push(reject(reason));
            continue;
        }
        let sample = TelemetrySample {
            timestamp: ts,
            chw_supply_temp: vals[0],
            chw_return_temp: vals[1],
            chw_mass_flow: schema.flow_unit.to_kg_per_s(vals[2]),
            cw_supply_temp: vals[3],
            cw_return_temp: vals[4],
            cw_mass_flow: schema.flow_unit.to_kg_per_s(vals[5]),
            aux_power: vals[6],
        };
        if sample.chw_mass_flow < 0.0 {
            rejects.push(reject(format!("negative flow in `{}`", schema.chw_flow)));
            continue;
        }
        samples.push((line, raw.clone(), sample));
    }

    samples.sort_by(|a, b| a.2.timestamp.cmp(&b.2.timestamp).then(a.0.cmp(&b.0)));
    let mut kept: Vec<TelemetrySample> = Vec::with_capacity(samples.len());
    for (line, raw, s) in samples {
        if kept.last().is_some_and(|p| p.timestamp == s.timestamp) {
            rejects.push(RejectedRow {
                line,
                reason: format!("duplicate timestamp {}", format_timestamp(s.timestamp)),
                raw,
            });
            continue;
        }
        kept.push(s);
    }
    rejects.sort_by_key(|r| r.line);

    if kept.is_empty() {
        return Err(Error::EmptyInput(source.to_string()));
    }

    let flags = kept
        .iter()
        .flat_map(|s| {
            s.temperatures()
                .into_iter()
                .filter(|(_, v)| !(PLANT_TEMP_RANGE.0..=PLANT_TEMP_RANGE.1).contains(v))
                .map(|(field, value)| RangeFlag {
                    timestamp: s.timestamp,
                    field: field.to_string(),
                    value,
                })
        })
        .collect();

    Ok(TelemetryParse {
        samples: kept,
        rejects,
        flags,
    })
}

/// Writes samples with the default column names (mass flow in kg/s).
pub fn write_telemetry<W: Write>(w: W, samples: &[TelemetrySample]) -> Result<()> {
    let m = ColumnMap::default();
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record([
        &m.timestamp,
        &m.chw_supply_temp,
        &m.chw_return_temp,
        &m.chw_flow,
        &m.cw_supply_temp,
        &m.cw_return_temp,
        &m.cw_flow,
        &m.aux_power,
    ])?;
    for s in samples {
        wtr.write_record([
            format_timestamp(s.timestamp),
            s.chw_supply_temp.to_string(),
            s.chw_return_temp.to_string(),
            s.chw_mass_flow.to_string(),
            s.cw_supply_temp.to_string(),
            s.cw_return_temp.to_string(),
            s.cw_mass_flow.to_string(),
            s.aux_power.to_string(),
        ])?;
    }
    wtr.flush().map_err(|e| Error::io("<telemetry>", e))?;
    Ok(())
}

/// Sidecar listing of rejected rows, one per line.
pub fn write_reject_report<W: Write>(mut w: W, rejects: &[RejectedRow]) -> Result<()> {
    let io = |e| Error::io("<reject report>", e);
    writeln!(w, "# rejected rows: {}", rejects.len()).map_err(io)?;
    for r in rejects {
        writeln!(w, "line {}: {}: {}", r.line, r.reason, r.raw).map_err(io)?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Resampled {
    pub series: LoadSeries,
    /// Bins that had no samples and were filled by interpolation.
    pub interpolated: Vec<usize>,
}

fn floor_half_hour(ts: NaiveDateTime) -> NaiveDateTime {
    let m = ts.minute() - ts.minute() % HALF_HOUR_MINUTES as u32;
    ts.with_minute(m)
        .and_then(|t| t.with_second(0))
        .and_then(|t| t.with_nanosecond(0))
        .expect("valid time components")
}

/// Averages per-minute cooling loads into half-hour bins.
///
/// Bins start on :00 and :30. Runs of at most [`MAX_INTERPOLATED_BINS`] empty
/// bins are filled linearly from their neighbours; longer runs are an error.
pub fn resample_half_hour(samples: &[TelemetrySample], c: &PhysConstants) -> Result<Resampled> {
    c.validate()?;
    if samples.is_empty() {
        return Err(Error::EmptyInput("telemetry".into()));
    }
    let origin = floor_half_hour(samples.iter().map(|s| s.timestamp).min().unwrap());
    let bin_of = |ts: NaiveDateTime| ((ts - origin).num_minutes() / HALF_HOUR_MINUTES) as usize;

    let mut sums: BTreeMap<usize, (f64, usize)> = BTreeMap::new();
    for s in samples {
        let e = sums.entry(bin_of(s.timestamp)).or_insert((0.0, 0));
        e.0 += cooling_load(s, c);
        e.1 += 1;
    }
    let nbins = sums.keys().next_back().unwrap() + 1;
    let mut values: Vec<Option<f64>> = vec![None; nbins];
    for (b, (sum, n)) in sums {
        values[b] = Some(sum / n as f64);
    }

    let mut interpolated = Vec::new();
    let mut i = 0;
    while i < nbins {
        if values[i].is_some() {
            i += 1;
            continue;
        }
        let gap_start = i;
        while values[i].is_none() {
            i += 1;
        }
        let gap = i - gap_start;
        if gap > MAX_INTERPOLATED_BINS {
            let from = origin + Duration::minutes(HALF_HOUR_MINUTES * gap_start as i64);
            let to = origin + Duration::minutes(HALF_HOUR_MINUTES * i as i64);
            return Err(Error::Gap {
                from: format_timestamp(from),
                to: format_timestamp(to),
                bins: gap,
            });
        }
        // first and last bins always hold samples
        let left = values[gap_start - 1].unwrap();
        let right = values[i].unwrap();
        for (k, slot) in values[gap_start..i].iter_mut().enumerate() {
            let frac = (k + 1) as f64 / (gap + 1) as f64;
            *slot = Some(left + (right - left) * frac);
            interpolated.push(gap_start + k);
        }
    }

    Ok(Resampled {
        series: LoadSeries::half_hourly(
            origin,
            values.into_iter().map(|v| v.unwrap()).collect(),
            Provenance::Raw,
        ),
        interpolated,
    })
}
