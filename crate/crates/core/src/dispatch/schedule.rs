//! Per-slot application of the optimiser to a load series.

use std::io::Write;

use chrono::NaiveDateTime;
use serde::{Deserialize, Serialize};

use super::bruteforce::{optimize_dispatch_bruteforce, PlrGrid};
use super::ga::{optimize_dispatch_ga, GaConfig};
use super::{DispatchSolution, PlantConfig};
use crate::error::{Error, Result};
use crate::ingest::{format_timestamp, LoadSeries};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Solver {
    Ga,
    Oracle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleConfig {
    pub solver: Solver,
    /// Also solve every slot with the grid oracle for comparison.
    pub oracle_column: bool,
    /// Slot `i` runs the GA with seed `ga.seed + i`.
    pub ga: GaConfig,
    pub grid: PlrGrid,
}

impl Default for ScheduleConfig {
    fn default() -> Self {
        Self {
            solver: Solver::Ga,
            oracle_column: false,
            ga: GaConfig::default(),
            grid: PlrGrid::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DispatchSlot {
    pub timestamp: NaiveDateTime,
    pub load: f64,
    pub solution: DispatchSolution,
    pub oracle: Option<DispatchSolution>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DispatchPlan {
    pub chiller_ids: Vec<String>,
    pub slot_hours: f64,
    pub slots: Vec<DispatchSlot>,
    /// `sum total_power * slot_hours`, kWh.
    pub energy_kwh: f64,
    /// kW.
    pub max_demand_kw: f64,
    /// Slots whose load exceeds plant capacity; non-empty marks a partial plan.
    pub infeasible_slots: Vec<usize>,
}

impl DispatchPlan {
    pub fn is_partial(&self) -> bool {
        !self.infeasible_slots.is_empty()
    }

    pub fn oracle_energy_kwh(&self) -> Option<f64> {
        self.slots
            .iter()
            .map(|s| s.oracle.as_ref().map(|o| o.total_power * self.slot_hours))
            .sum()
    }

    /// Columns: time, load, one PLR per chiller, total power, then the
    /// oracle's total power and relative gap when present.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        let with_oracle = self.slots.iter().any(|s| s.oracle.is_some());
        let mut header = vec!["timestamp".to_string(), "load_rt".into()];
        header.extend(self.chiller_ids.iter().map(|id| format!("plr_{id}")));
        header.push("total_power_kw".into());
        header.push("feasible".into());
        if with_oracle {
            header.extend(["oracle_power_kw".to_string(), "gap_vs_oracle".into()]);
        }
        wtr.write_record(&header)?;
        for s in &self.slots {
            let mut rec = vec![format_timestamp(s.timestamp), format!("{:.1}", s.load)];
            rec.extend(s.solution.plr.iter().map(|p| format!("{p:.4}")));
            rec.push(format!("{:.3}", s.solution.total_power));
            rec.push(s.solution.feasible.to_string());
            if with_oracle {
                match &s.oracle {
                    Some(o) => {
                        rec.push(format!("{:.3}", o.total_power));
                        let gap = if o.total_power > 0.0 {
                            (s.solution.total_power - o.total_power) / o.total_power
                        } else {
                            0.0
                        };
                        rec.push(format!("{gap:.6}"));
                    }
                    None => rec.extend([String::new(), String::new()]),
                }
            }
            wtr.write_record(&rec)?;
        }
        wtr.flush().map_err(|e| Error::io("<dispatch plan>", e))?;
        Ok(())
    }
}

/// Solves one slot with the configured solver; GA slots are seeded
/// `ga.seed + slot`.
pub fn solve_slot(plant: &PlantConfig, load: f64, cfg: &ScheduleConfig, slot: usize) -> Result<DispatchSolution> {
    match cfg.solver {
        Solver::Ga => {
            let ga = GaConfig {
                seed: cfg.ga.seed.wrapping_add(slot as u64),
                ..cfg.ga.clone()
            };
            optimize_dispatch_ga(plant, load, &ga)
        }
        Solver::Oracle => optimize_dispatch_bruteforce(plant, load, cfg.grid),
    }
}

pub fn schedule_dispatch(plant: &PlantConfig, loads: &LoadSeries, cfg: &ScheduleConfig) -> Result<DispatchPlan> {
    if loads.is_empty() {
        return Err(Error::InsufficientData("dispatch needs at least one load slot".into()));
    }
    let slot_hours = loads.step_hours();
    let mut slots = Vec::with_capacity(loads.len());
    let mut infeasible_slots = Vec::new();
    for (i, &load) in loads.values.iter().enumerate() {
        let solution = solve_slot(plant, load, cfg, i)?;
        let oracle = match (cfg.oracle_column, cfg.solver) {
            (true, Solver::Ga) => Some(optimize_dispatch_bruteforce(plant, load, cfg.grid)?),
            (true, Solver::Oracle) => Some(solution.clone()),
            _ => None,
        };
        if !solution.feasible {
            infeasible_slots.push(i);
        }
        slots.push(DispatchSlot {
            timestamp: loads.timestamp(i),
            load,
            solution,
            oracle,
        });
    }
    let energy_kwh = slots.iter().map(|s| s.solution.total_power * slot_hours).sum();
    let max_demand_kw = slots.iter().map(|s| s.solution.total_power).fold(0.0, f64::max);
    Ok(DispatchPlan {
        chiller_ids: plant.chillers.iter().map(|c| c.id.clone()).collect(),
        slot_hours,
        slots,
        energy_kwh,
        max_demand_kw,
        infeasible_slots,
    })
}
