//! Chiller plant + thermal energy storage proposals.
//!
//! Storage is thermal: a slot in which the chillers deliver `Q` RT against a
//! building load of `L` RT charges `(Q - L) * kw_per_rt * hours` kWh when
//! positive and discharges the opposite when negative. Charged energy is kept
//! with retention `eta`: `soc += eta * charge - discharge`.

mod cost;

use std::io::Write;

use chrono::{NaiveDateTime, NaiveTime, Timelike};
use serde::{Deserialize, Serialize};

use crate::dispatch::{solve_slot, ChillerSpec, PlantConfig, ScheduleConfig};
use crate::error::{Error, Result};
use crate::ingest::{format_timestamp, LoadSeries, KW_PER_RT};

pub use cost::{
    compare_proposals, cost_analysis, CapexRates, Comparison, ComparisonEntry, CostReport, EnergySummary, Savings,
    DAYS_PER_YEAR, MONTHS_PER_YEAR, YEARS,
};

/// Slack on storage bounds for values produced by arithmetic, kWh.
const SOC_EPS: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TariffSchedule {
    /// $/kWh.
    pub peak_rate: f64,
    pub offpeak_rate: f64,
    /// $/kW/month on maximum demand.
    pub capacity_rate: f64,
    /// Peak window `[start, end)`; wraps past midnight when `start > end`.
    pub peak_start: NaiveTime,
    pub peak_end: NaiveTime,
}

impl Default for TariffSchedule {
    fn default() -> Self {
        Self {
            peak_rate: 0.2967,
            offpeak_rate: 0.1843,
            capacity_rate: 16.48,
            peak_start: NaiveTime::from_hms_opt(7, 0, 0).unwrap(),
            peak_end: NaiveTime::from_hms_opt(23, 0, 0).unwrap(),
        }
    }
}

impl TariffSchedule {
    pub fn validate(&self) -> Result<()> {
        if !(self.peak_rate > 0.0 && self.offpeak_rate > 0.0 && self.capacity_rate > 0.0) {
            return Err(Error::InvalidConfig("tariff rates must be positive".into()));
        }
        if self.peak_start == self.peak_end {
            return Err(Error::InvalidConfig("peak window is empty".into()));
        }
        Ok(())
    }

    /// Classifies a slot by its start time.
    pub fn is_peak(&self, t: NaiveDateTime) -> bool {
        let x = t.time();
        if self.peak_start < self.peak_end {
            x >= self.peak_start && x < self.peak_end
        } else {
            x >= self.peak_start || x < self.peak_end
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TesConfig {
    /// kWh thermal; `None` sizes the tank to the simulated swing.
    pub capacity_kwh: Option<f64>,
    /// Thermal kW limits; `None` is unlimited.
    pub max_charge_kw: Option<f64>,
    pub max_discharge_kw: Option<f64>,
    pub retention: f64,
    /// `None` starts from the lowest level that keeps the tank non-negative.
    pub initial_soc_kwh: Option<f64>,
}

impl Default for TesConfig {
    fn default() -> Self {
        Self {
            capacity_kwh: None,
            max_charge_kw: None,
            max_discharge_kw: None,
            retention: 0.999,
            initial_soc_kwh: None,
        }
    }
}

impl TesConfig {
    pub fn none() -> Self {
        Self {
            capacity_kwh: Some(0.0),
            initial_soc_kwh: Some(0.0),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(format!("tes: {m}")));
        if !(self.retention > 0.0 && self.retention <= 1.0) {
            return bad("retention must lie in (0, 1]");
        }
        for v in [self.capacity_kwh, self.max_charge_kw, self.max_discharge_kw, self.initial_soc_kwh].into_iter().flatten() {
            if !(v >= 0.0) || !v.is_finite() {
                return bad("capacities, rates and state of charge must be finite and non-negative");
            }
        }
        if let (Some(c), Some(s)) = (self.capacity_kwh, self.initial_soc_kwh) {
            if s > c {
                return bad("initial state of charge exceeds capacity");
            }
        }
        Ok(())
    }
}

/// How one tariff phase sets the chiller output `Q` against load `L`.
/// `theta` is the single balancing level solved so storage ends the day
/// where it started.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LoadingMode {
    /// `Q = L`.
    Follow,
    /// `Q` = every chiller of the set at its maximum-efficiency PLR.
    MaxEfficiency,
    /// `Q = min(L, max-efficiency output)`.
    MaxEfficiencyCap,
    /// `Q = max(L, theta)`.
    BalanceFloor,
    /// `Q = min(L, theta)`.
    BalanceCap,
    /// `Q = theta`.
    BalanceConstant,
}

impl LoadingMode {
    fn balancing(&self) -> bool {
        matches!(self, LoadingMode::BalanceFloor | LoadingMode::BalanceCap | LoadingMode::BalanceConstant)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseRule {
    /// Indices into the proposal fleet.
    pub chillers: Vec<usize>,
    pub mode: LoadingMode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Policy {
    pub off_peak: PhaseRule,
    pub peak: PhaseRule,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProposalConfig {
    pub name: String,
    pub fleet: PlantConfig,
    pub policy: Policy,
    pub tes: TesConfig,
}

fn fleet(n1000: usize, n500: usize) -> PlantConfig {
    let mut chillers: Vec<ChillerSpec> = (0..n1000).map(|i| ChillerSpec::default_1000rt(format!("1000rt-{}", i + 1))).collect();
    chillers.extend((0..n500).map(|i| ChillerSpec::default_500rt(format!("500rt-{}", i + 1))));
    PlantConfig { chillers }
}

fn rule(chillers: &[usize], mode: LoadingMode) -> PhaseRule {
    PhaseRule {
        chillers: chillers.to_vec(),
        mode,
    }
}

impl ProposalConfig {
    /// Existing plant, dispatch-optimal every slot, no storage.
    pub fn baseline() -> Self {
        Self::custom("Baseline", PlantConfig::default(), TesConfig::none())
    }

    /// Dispatch-optimal loading of the whole fleet in every slot.
    pub fn custom(name: &str, fleet: PlantConfig, tes: TesConfig) -> Self {
        let all: Vec<usize> = (0..fleet.len()).collect();
        Self {
            name: name.into(),
            policy: Policy {
                off_peak: rule(&all, LoadingMode::Follow),
                peak: rule(&all, LoadingMode::Follow),
            },
            fleet,
            tes,
        }
    }

    /// The four storage designs:
    /// 1. two 1000 RT; one at maximum efficiency off-peak, both shaving the peak;
    /// 2. two 1000 RT + one 500 RT charging off-peak, one 1000 RT at maximum efficiency in peak;
    /// 3. three 1000 RT + one 500 RT; the 1000 RT machines charge off-peak, the 500 RT runs at maximum efficiency in peak;
    /// 4. one 1000 RT + one 500 RT at one constant output all day.
    pub fn preset(n: u8) -> Result<Self> {
        use LoadingMode::*;
        let (fleet, off_peak, peak) = match n {
            1 => (fleet(2, 0), rule(&[0], MaxEfficiency), rule(&[0, 1], BalanceCap)),
            2 => (fleet(2, 1), rule(&[0, 1, 2], BalanceFloor), rule(&[0], MaxEfficiencyCap)),
            3 => (fleet(3, 1), rule(&[0, 1, 2], BalanceFloor), rule(&[3], MaxEfficiencyCap)),
            4 => (fleet(1, 1), rule(&[0, 1], BalanceConstant), rule(&[0, 1], BalanceConstant)),
            other => return Err(Error::InvalidConfig(format!("unknown proposal preset {other}"))),
        };
        Ok(Self {
            name: format!("Proposal {n}"),
            fleet,
            policy: Policy { off_peak, peak },
            tes: TesConfig::default(),
        })
    }

    pub fn validate(&self) -> Result<()> {
        self.fleet.validate()?;
        self.tes.validate()?;
        for r in [&self.policy.off_peak, &self.policy.peak] {
            if r.chillers.is_empty() {
                return Err(Error::InvalidConfig(format!("{}: phase rule names no chillers", self.name)));
            }
            if let Some(&i) = r.chillers.iter().find(|&&i| i >= self.fleet.len()) {
                return Err(Error::InvalidConfig(format!("{}: chiller index {i} outside the fleet", self.name)));
            }
            let mut s = r.chillers.clone();
            s.sort_unstable();
            s.dedup();
            if s.len() != r.chillers.len() {
                return Err(Error::InvalidConfig(format!("{}: duplicate chiller in phase rule", self.name)));
            }
        }
        Ok(())
    }

    /// Installed chiller capacity, kW electrical-equivalent (`RT * kw_per_rt`).
    pub fn fleet_kw(&self) -> f64 {
        self.fleet.total_capacity() * KW_PER_RT
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlotRecord {
    pub timestamp: NaiveDateTime,
    pub peak: bool,
    pub load_rt: f64,
    /// Thermal output of the chillers, RT.
    pub chiller_rt: f64,
    pub charge_kwh: f64,
    pub discharge_kwh: f64,
    /// State of charge at the end of the slot.
    pub soc_kwh: f64,
    pub power_kw: f64,
    /// One entry per fleet chiller.
    pub plr: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub name: String,
    pub total_kwh: f64,
    pub peak_kwh: f64,
    pub offpeak_kwh: f64,
    pub max_demand_kw: f64,
    pub charged_kwh: f64,
    pub discharged_kwh: f64,
    pub capacity_kwh: f64,
    pub initial_soc_kwh: f64,
    pub final_soc_kwh: f64,
    /// Solved balancing level, RT, when the policy has one.
    pub balancing_rt: Option<f64>,
    pub ledger: Vec<SlotRecord>,
}

impl EnergyReport {
    pub fn summary(&self) -> EnergySummary {
        EnergySummary {
            peak_kwh: self.peak_kwh,
            offpeak_kwh: self.offpeak_kwh,
            max_demand_kw: self.max_demand_kw,
        }
    }

    pub fn write_ledger_csv<W: Write>(&self, w: W, chiller_ids: &[String]) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        let mut header: Vec<String> = ["timestamp", "peak", "load_rt", "chiller_rt", "charge_kwh", "discharge_kwh", "soc_kwh", "power_kw"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        header.extend(chiller_ids.iter().map(|id| format!("plr_{id}")));
        wtr.write_record(&header)?;
        for s in &self.ledger {
            let mut rec = vec![
                format_timestamp(s.timestamp),
                s.peak.to_string(),
                format!("{:.4}", s.load_rt),
                format!("{:.4}", s.chiller_rt),
                format!("{:.4}", s.charge_kwh),
                format!("{:.4}", s.discharge_kwh),
                format!("{:.4}", s.soc_kwh),
                format!("{:.4}", s.power_kw),
            ];
            rec.extend(s.plr.iter().map(|p| format!("{p:.4}")));
            wtr.write_record(&rec)?;
        }
        wtr.flush().map_err(|e| Error::io("<tes ledger>", e))?;
        Ok(())
    }
}

struct Sim<'a> {
    p: &'a ProposalConfig,
    loads: &'a LoadSeries,
    peak: Vec<bool>,
    /// kWh per RT held for one slot.
    kwh_per_rt: f64,
    set_cap: [f64; 2],
    max_eff_rt: [f64; 2],
}

impl Sim<'_> {
    fn rule(&self, t: usize) -> (&PhaseRule, usize) {
        if self.peak[t] {
            (&self.p.policy.peak, 1)
        } else {
            (&self.p.policy.off_peak, 0)
        }
    }

    fn output(&self, t: usize, theta: f64) -> f64 {
        let l = self.loads.values[t];
        let (r, ph) = self.rule(t);
        let q = match r.mode {
            LoadingMode::Follow => l,
            LoadingMode::MaxEfficiency => self.max_eff_rt[ph],
            LoadingMode::MaxEfficiencyCap => l.min(self.max_eff_rt[ph]),
            LoadingMode::BalanceFloor => l.max(theta),
            LoadingMode::BalanceCap => l.min(theta),
            LoadingMode::BalanceConstant => theta,
        };
        q.clamp(0.0, self.set_cap[ph])
    }

    /// Net storage change over the day for a balancing level.
    fn net(&self, theta: f64) -> f64 {
        let eta = self.p.tes.retention;
        (0..self.loads.len())
            .map(|t| {
                let d = (self.output(t, theta) - self.loads.values[t]) * self.kwh_per_rt;
                if d > 0.0 {
                    eta * d
                } else {
                    d
                }
            })
            .sum()
    }
}

/// Runs one proposal over a 24 h profile.
pub fn simulate_proposal(
    p: &ProposalConfig,
    loads: &LoadSeries,
    t: &TariffSchedule,
    dispatch: &ScheduleConfig,
) -> Result<EnergyReport> {
    p.validate()?;
    t.validate()?;
    if loads.len() < 2 || loads.step_minutes * loads.len() as i64 != 24 * 60 {
        return Err(Error::SpanMismatch(format!(
            "storage simulation needs exactly 24 h of slots, got {} x {} min",
            loads.len(),
            loads.step_minutes
        )));
    }
    if let Some(v) = loads.values.iter().find(|v| !(**v >= 0.0) || !v.is_finite()) {
        return Err(Error::Parse(format!("cooling load must be finite and non-negative, got {v}")));
    }
    let hours = loads.step_hours();
    let subset = |r: &PhaseRule| PlantConfig {
        chillers: r.chillers.iter().map(|&i| p.fleet.chillers[i].clone()).collect(),
    };
    let plants = [subset(&p.policy.off_peak), subset(&p.policy.peak)];
    let max_eff = |pl: &PlantConfig| pl.chillers.iter().map(|c| c.capacity * c.max_efficiency_plr()).sum::<f64>();
    let sim = Sim {
        p,
        loads,
        peak: loads.timestamps().map(|ts| t.is_peak(ts)).collect(),
        kwh_per_rt: KW_PER_RT * hours,
        set_cap: [plants[0].total_capacity(), plants[1].total_capacity()],
        max_eff_rt: [max_eff(&plants[0]), max_eff(&plants[1])],
    };

    let balancing = p.policy.off_peak.mode.balancing() || p.policy.peak.mode.balancing();
    let theta = if balancing {
        let hi = sim.set_cap[0].max(sim.set_cap[1]);
        if sim.net(0.0) >= 0.0 {
            0.0
        } else if sim.net(hi) < 0.0 {
            return Err(Error::Infeasible(format!(
                "{}: chillers cannot recover the stored energy used over the day",
                p.name
            )));
        } else {
            let (mut lo, mut up) = (0.0, hi);
            for _ in 0..200 {
                let mid = 0.5 * (lo + up);
                if mid <= lo || mid >= up {
                    break;
                }
                if sim.net(mid) >= 0.0 {
                    up = mid;
                } else {
                    lo = mid;
                }
            }
            up
        }
    } else {
        0.0
    };

    let eta = p.tes.retention;
    let n = loads.len();
    let mut charge = vec![0.0; n];
    let mut discharge = vec![0.0; n];
    let mut outputs = vec![0.0; n];
    let mut rel = vec![0.0; n];
    let mut level = 0.0;
    for i in 0..n {
        let q = sim.output(i, theta);
        outputs[i] = q;
        let d = (q - loads.values[i]) * sim.kwh_per_rt;
        if d > 0.0 {
            charge[i] = d;
        } else {
            discharge[i] = -d;
        }
        level += eta * charge[i] - discharge[i];
        rel[i] = level;
    }
    let lowest = rel.iter().cloned().fold(0.0, f64::min);
    let initial = p.tes.initial_soc_kwh.unwrap_or(-lowest);
    let highest = rel.iter().cloned().fold(0.0, f64::max);
    let capacity = p.tes.capacity_kwh.unwrap_or(initial + highest);

    let mut ledger = Vec::with_capacity(n);
    let (mut peak_kwh, mut offpeak_kwh, mut max_demand) = (0.0, 0.0, 0.0f64);
    for i in 0..n {
        let ts = loads.timestamp(i);
        let soc = initial + rel[i];
        if soc < -SOC_EPS {
            return Err(Error::Infeasible(format!("{}: load unmet with storage empty at {ts}", p.name)));
        }
        if soc > capacity + SOC_EPS {
            return Err(Error::Infeasible(format!("{}: storage full at {ts}, surplus cannot be stored", p.name)));
        }
        if let Some(r) = p.tes.max_charge_kw {
            if charge[i] / hours > r + SOC_EPS {
                return Err(Error::Infeasible(format!("{}: charge rate above {r} kW at {ts}", p.name)));
            }
        }
        if let Some(r) = p.tes.max_discharge_kw {
            if discharge[i] / hours > r + SOC_EPS {
                return Err(Error::Infeasible(format!("{}: discharge rate above {r} kW at {ts}", p.name)));
            }
        }
        let (r, ph) = sim.rule(i);
        let sol = solve_slot(&plants[ph], outputs[i], dispatch, i)?;
        if !sol.feasible {
            return Err(Error::Infeasible(format!("{}: chiller set cannot deliver {:.1} RT at {ts}", p.name, outputs[i])));
        }
        let mut plr = vec![0.0; p.fleet.len()];
        for (k, &fi) in r.chillers.iter().enumerate() {
            plr[fi] = sol.plr[k];
        }
        let kwh = sol.total_power * hours;
        if sim.peak[i] {
            peak_kwh += kwh;
        } else {
            offpeak_kwh += kwh;
        }
        max_demand = max_demand.max(sol.total_power);
        ledger.push(SlotRecord {
            timestamp: ts,
            peak: sim.peak[i],
            load_rt: loads.values[i],
            chiller_rt: outputs[i],
            charge_kwh: charge[i],
            discharge_kwh: discharge[i],
            soc_kwh: soc,
            power_kw: sol.total_power,
            plr,
        });
    }
    let final_soc = initial + rel[n - 1];
    if (final_soc - initial).abs() > 0.01 * initial + SOC_EPS {
        return Err(Error::Cyclicity {
            start_kwh: initial,
            end_kwh: final_soc,
        });
    }
    Ok(EnergyReport {
        name: p.name.clone(),
        total_kwh: peak_kwh + offpeak_kwh,
        peak_kwh,
        offpeak_kwh,
        max_demand_kw: max_demand,
        charged_kwh: charge.iter().sum(),
        discharged_kwh: discharge.iter().sum(),
        capacity_kwh: capacity,
        initial_soc_kwh: initial,
        final_soc_kwh: final_soc,
        balancing_rt: balancing.then_some(theta),
        ledger,
    })
}

/// Minutes since midnight of a slot start; used for plotting.
pub fn minute_of_day(t: NaiveDateTime) -> u32 {
    t.hour() * 60 + t.minute()
}
