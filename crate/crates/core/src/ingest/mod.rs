//! Telemetry and weather ingestion, cooling-load computation and resampling.

mod psychro;
mod series;
mod synth;
mod telemetry;
mod weather;

pub use psychro::{humidity_ratio, saturation_pressure_hpa};
pub use series::{LoadSeries, Provenance, HALF_HOUR_MINUTES};
pub use synth::{synth_generate, SynthConfig, SynthOutput};
pub use telemetry::{
    cooling_load, parse_telemetry, read_telemetry, resample_half_hour, write_reject_report,
    write_telemetry, ColumnMap, FlowUnit, RangeFlag, RejectedRow, Resampled, TelemetryParse,
    TelemetrySample,
};
pub use weather::{
    parse_weather, read_weather, write_weather, WeatherColumnMap, WeatherParse, WeatherSample,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Physical constants for the chilled-water energy balance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhysConstants {
    /// Specific heat of water, kJ/(kg K).
    pub cp_water: f64,
    /// kW thermal per refrigeration ton.
    pub kw_per_rt: f64,
}

impl Default for PhysConstants {
    fn default() -> Self {
        Self {
            cp_water: 4.19,
            kw_per_rt: KW_PER_RT,
        }
    }
}

impl PhysConstants {
    pub fn validate(&self) -> Result<()> {
        if !(self.cp_water > 0.0 && self.cp_water.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "cp_water must be positive, got {}",
                self.cp_water
            )));
        }
        if !(self.kw_per_rt > 0.0 && self.kw_per_rt.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "kw_per_rt must be positive, got {}",
                self.kw_per_rt
            )));
        }
        Ok(())
    }
}

/// 3500 RT x 3.517 = 12309.5 kW, the installed plant rating.
pub const KW_PER_RT: f64 = 3.517;

pub(crate) const TIMESTAMP_FORMAT: &str = "%Y-%m-%dT%H:%M:%S";

pub(crate) fn parse_timestamp(s: &str) -> Option<chrono::NaiveDateTime> {
    use chrono::NaiveDateTime;
    let s = s.trim();
    let s = s.strip_suffix('Z').unwrap_or(s);
    const FORMATS: [&str; 4] = [
        "%Y-%m-%dT%H:%M:%S%.f",
        "%Y-%m-%d %H:%M:%S%.f",
        "%Y-%m-%dT%H:%M",
        "%Y-%m-%d %H:%M",
    ];
    FORMATS
        .iter()
        .find_map(|f| NaiveDateTime::parse_from_str(s, f).ok())
        .or_else(|| {
            chrono::DateTime::parse_from_rfc3339(s)
                .ok()
                .map(|dt| dt.naive_utc())
        })
}

pub(crate) fn format_timestamp(ts: chrono::NaiveDateTime) -> String {
    ts.format(TIMESTAMP_FORMAT).to_string()
}
