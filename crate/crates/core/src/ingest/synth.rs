//! Synthetic plant telemetry and weather.
//!
//! The load envelope is a weekday/weekend occupancy shape modulated by the
//! dry-bulb anomaly, then rescaled over the whole horizon so that its minimum
//! is `base_rt` and its maximum is `peak_rt`. Measurement noise and chiller
//! cut-in transients are applied on top, the latter as a rise in the chilled
//! water supply temperature that shrinks the measured delta-T.

use chrono::{Datelike, Duration, NaiveDate, NaiveDateTime, Weekday};
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::{PhysConstants, TelemetrySample, WeatherSample};
use crate::error::{Error, Result};
use crate::rng::rng_for;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthConfig {
    pub days: u32,
    pub start: NaiveDate,
    pub base_rt: f64,
    pub peak_rt: f64,
    /// Weekend occupancy as a fraction of weekday occupancy.
    pub weekend_factor: f64,
    /// Probability of a chiller cut-in event per half-hour bin.
    pub spike_rate: f64,
    /// Fractional dip of the measured load during a cut-in.
    pub spike_depth: f64,
    pub spike_minutes: u32,
    /// Gaussian measurement noise on the load, RT.
    pub noise_sigma: f64,
    /// Relative load increase per degC of dry-bulb anomaly.
    pub weather_coupling: f64,
    pub temp_mean: f64,
    pub temp_amplitude: f64,
    /// Day-to-day standard deviation of the mean temperature.
    pub temp_day_sigma: f64,
    pub rh_mean: f64,
    pub rh_amplitude: f64,
    pub wind_mean: f64,
    pub wind_amplitude: f64,
    pub pressure_mean: f64,
    /// Chilled water supply set point, degC.
    pub supply_setpoint: f64,
    /// Design chilled water delta-T, K.
    pub design_delta_t: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            days: 31,
            start: NaiveDate::from_ymd_opt(2023, 8, 1).unwrap(),
            base_rt: 350.0,
            peak_rt: 2350.0,
            weekend_factor: 0.45,
            spike_rate: 0.04,
            spike_depth: 0.4,
            spike_minutes: 12,
            noise_sigma: 25.0,
            weather_coupling: 0.06,
            temp_mean: 28.5,
            temp_amplitude: 3.5,
            temp_day_sigma: 1.2,
            rh_mean: 76.0,
            rh_amplitude: 12.0,
            wind_mean: 2.6,
            wind_amplitude: 1.2,
            pressure_mean: 1009.0,
            supply_setpoint: 6.7,
            design_delta_t: 5.5,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(format!("synth: {m}")));
        if self.days < 1 {
            return bad("days must be >= 1");
        }
        if !(self.base_rt >= 0.0 && self.peak_rt >= self.base_rt && self.peak_rt.is_finite()) {
            return bad("need peak_rt >= base_rt >= 0");
        }
        if !(0.0..=1.0).contains(&self.weekend_factor) {
            return bad("weekend_factor must be in [0, 1]");
        }
        if !(0.0..=1.0).contains(&self.spike_rate) || !(0.0..1.0).contains(&self.spike_depth) {
            return bad("spike_rate in [0, 1] and spike_depth in [0, 1) required");
        }
        if self.spike_minutes == 0 || self.spike_minutes > 30 {
            return bad("spike_minutes must be in 1..=30");
        }
        if !(self.noise_sigma >= 0.0) || !(self.temp_day_sigma >= 0.0) {
            return bad("standard deviations must be >= 0");
        }
        if !(self.design_delta_t > 0.0) {
            return bad("design_delta_t must be positive");
        }
        if !(0.0..=100.0).contains(&self.rh_mean) || !(self.wind_mean >= 0.0) {
            return bad("rh_mean in [0, 100] and wind_mean >= 0 required");
        }
        if !(870.0..=1080.0).contains(&self.pressure_mean) {
            return bad("pressure_mean must be within [870, 1080] hPa");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthOutput {
    pub telemetry: Vec<TelemetrySample>,
    pub weather: Vec<WeatherSample>,
}

fn smoothstep(x: f64) -> f64 {
    let x = x.clamp(0.0, 1.0);
    x * x * (3.0 - 2.0 * x)
}

/// Weekday occupancy in [0, 1] as a function of hour of day.
fn occupancy(hour: f64) -> f64 {
    smoothstep((hour - 6.5) / 2.5) * (1.0 - smoothstep((hour - 18.0) / 3.0))
}

fn is_weekend(d: NaiveDate) -> bool {
    matches!(d.weekday(), Weekday::Sat | Weekday::Sun)
}

pub fn synth_generate(cfg: &SynthConfig, seed: u64) -> Result<SynthOutput> {
    cfg.validate()?;
    let c = PhysConstants::default();
    let minutes = cfg.days as usize * 24 * 60;
    let t0: NaiveDateTime = cfg.start.and_hms_opt(0, 0, 0).unwrap();
    let tau = std::f64::consts::TAU;

    let mut day_rng = rng_for(seed, 1);
    let day_offset: Vec<f64> = {
        let n = Normal::new(0.0, cfg.temp_day_sigma.max(1e-300)).unwrap();
        (0..cfg.days)
            .map(|_| if cfg.temp_day_sigma > 0.0 { n.sample(&mut day_rng) } else { 0.0 })
            .collect()
    };
    let dry_bulb_at = |minute: usize| -> f64 {
        let day = minute / 1440;
        let hour = (minute % 1440) as f64 / 60.0;
        cfg.temp_mean + day_offset[day] + cfg.temp_amplitude * (tau * (hour - 9.0) / 24.0).sin()
    };

    // noiseless envelope, rescaled to [base, peak] over the horizon
    let shape: Vec<f64> = (0..minutes)
        .map(|m| {
            let ts = t0 + Duration::minutes(m as i64);
            let hour = (m % 1440) as f64 / 60.0;
            let mut occ = occupancy(hour);
            if is_weekend(ts.date()) {
                occ *= cfg.weekend_factor;
            }
            let anomaly = dry_bulb_at(m) - cfg.temp_mean;
            (occ * (1.0 + cfg.weather_coupling * anomaly)).max(0.0)
        })
        .collect();
    let lo = shape.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = shape.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let span = hi - lo;
    let envelope = |v: f64| -> f64 {
        if span > 0.0 {
            cfg.base_rt + (cfg.peak_rt - cfg.base_rt) * (v - lo) / span
        } else {
            cfg.base_rt
        }
    };

    let mut rng = rng_for(seed, 2);
    let noise = Normal::new(0.0, cfg.noise_sigma.max(1e-300)).unwrap();
    let bins = minutes / 30;
    // per bin: optional (start minute within bin)
    let spikes: Vec<Option<u32>> = (0..bins)
        .map(|_| {
            let hit = rng.random::<f64>() < cfg.spike_rate;
            let start = rng.random_range(0..30u32);
            hit.then_some(start)
        })
        .collect();
    let in_spike = |m: usize| -> bool {
        let b = m / 30;
        let within = (m % 30) as u32;
        let here = spikes[b].is_some_and(|s| within >= s && within < s + cfg.spike_minutes);
        let spill = b > 0
            && spikes[b - 1].is_some_and(|s| s + cfg.spike_minutes > 30 && within < s + cfg.spike_minutes - 30);
        here || spill
    };

    let mut telemetry = Vec::with_capacity(minutes);
    for (m, &sh) in shape.iter().enumerate() {
        let true_load = envelope(sh);
        let measured = if cfg.noise_sigma > 0.0 {
            true_load + noise.sample(&mut rng)
        } else {
            true_load
        };
        let flow = (measured * c.kw_per_rt / (c.cp_water * cfg.design_delta_t)).max(0.0);
        let supply = if in_spike(m) {
            cfg.supply_setpoint + cfg.spike_depth * cfg.design_delta_t
        } else {
            cfg.supply_setpoint
        };
        let ret = cfg.supply_setpoint + cfg.design_delta_t;
        let heat_rejected_kw = 1.2 * true_load * c.kw_per_rt;
        let cw_supply = 29.5 + 0.15 * (dry_bulb_at(m) - cfg.temp_mean);
        telemetry.push(TelemetrySample {
            timestamp: t0 + Duration::minutes(m as i64),
            chw_supply_temp: supply,
            chw_return_temp: ret,
            chw_mass_flow: flow,
            cw_supply_temp: cw_supply,
            cw_return_temp: cw_supply + 5.0,
            cw_mass_flow: heat_rejected_kw / (c.cp_water * 5.0),
            aux_power: 0.12 * true_load,
        });
    }

    let mut wrng = rng_for(seed, 3);
    let n01 = Normal::new(0.0, 1.0).unwrap();
    let weather = (0..bins)
        .map(|b| {
            let m = b * 30;
            let hour = (m % 1440) as f64 / 60.0;
            let phase = (tau * (hour - 9.0) / 24.0).sin();
            let dry_bulb = dry_bulb_at(m) + 0.2 * n01.sample(&mut wrng);
            let rh = (cfg.rh_mean - cfg.rh_amplitude * phase + 2.0 * n01.sample(&mut wrng)).clamp(5.0, 100.0);
            let wind_speed = (cfg.wind_mean
                + cfg.wind_amplitude * (tau * (hour - 12.0) / 24.0).cos() * -1.0
                + 0.5 * n01.sample(&mut wrng))
            .max(0.0);
            let wind_dir = (180.0 + 60.0 * phase + 20.0 * n01.sample(&mut wrng)).rem_euclid(360.0);
            let pressure = (cfg.pressure_mean + 1.5 * (2.0 * tau * hour / 24.0).sin() + 0.3 * n01.sample(&mut wrng))
                .clamp(850.0, 1100.0);
            WeatherSample {
                timestamp: t0 + Duration::minutes(m as i64),
                dry_bulb,
                rel_humidity: rh,
                wind_dir,
                wind_speed,
                pressure,
            }
        })
        .collect();

    Ok(SynthOutput { telemetry, weather })
}
