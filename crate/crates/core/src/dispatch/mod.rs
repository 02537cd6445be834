//! Minimum-power chiller loading.
//!
//! Each chiller runs at `plr = 0` or `plr in [min_plr, 1]`, the plant must
//! supply at least the building load and the objective is total electrical
//! power. [`optimize_dispatch_ga`] is the production solver;
//! [`optimize_dispatch_bruteforce`] enumerates a PLR grid and serves as its
//! oracle.

mod bruteforce;
mod chiller;
mod ga;
mod schedule;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use bruteforce::{optimize_dispatch_bruteforce, PlrGrid, DEFAULT_GRID_STEP};
pub use chiller::{
    chiller_power, eval_cubic, fit_power_curve, ChillerSpec, PartLoadRow, PowerFit, PowerMode, DEFAULT_MIN_PLR,
    PLR_EPS, TABLE_1000RT, TABLE_500RT, TABLE_CONSISTENCY_KW,
};
pub use ga::{optimize_dispatch_ga, GaConfig};
pub use schedule::{schedule_dispatch, solve_slot, DispatchPlan, DispatchSlot, ScheduleConfig, Solver};

/// Slack on `supplied >= load` for values produced by arithmetic, RT.
pub const SUPPLY_EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantConfig {
    pub chillers: Vec<ChillerSpec>,
}

/// On-disk plant description: chillers with their part-load tables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct PlantFile {
    chillers: Vec<ChillerEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct ChillerEntry {
    id: String,
    capacity: f64,
    #[serde(default = "default_min_plr")]
    min_plr: f64,
    table: Vec<PartLoadRow>,
}

fn default_min_plr() -> f64 {
    DEFAULT_MIN_PLR
}

impl Default for PlantConfig {
    /// Three 1000 RT machines and one 500 RT machine.
    fn default() -> Self {
        Self {
            chillers: vec![
                ChillerSpec::default_1000rt("chiller-1"),
                ChillerSpec::default_1000rt("chiller-2"),
                ChillerSpec::default_1000rt("chiller-3"),
                ChillerSpec::default_500rt("chiller-4"),
            ],
        }
    }
}

impl PlantConfig {
    pub fn new(chillers: Vec<ChillerSpec>) -> Result<Self> {
        let p = Self { chillers };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.chillers.is_empty() {
            return Err(Error::InvalidConfig("plant needs at least one chiller".into()));
        }
        self.chillers.iter().try_for_each(ChillerSpec::validate)
    }

    pub fn total_capacity(&self) -> f64 {
        self.chillers.iter().map(|c| c.capacity).sum()
    }

    pub fn len(&self) -> usize {
        self.chillers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chillers.is_empty()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let f: PlantFile = serde_json::from_str(text)?;
        let chillers = f
            .chillers
            .into_iter()
            .map(|c| ChillerSpec::from_table(c.id, c.capacity, c.table, c.min_plr))
            .collect::<Result<Vec<_>>>()?;
        Self::new(chillers)
    }

    pub fn to_json(&self) -> Result<String> {
        let f = PlantFile {
            chillers: self
                .chillers
                .iter()
                .map(|c| ChillerEntry {
                    id: c.id.clone(),
                    capacity: c.capacity,
                    min_plr: c.min_plr,
                    table: c.table.clone(),
                })
                .collect(),
        };
        Ok(serde_json::to_string_pretty(&f)?)
    }

    pub fn supplied(&self, plr: &[f64]) -> f64 {
        self.chillers.iter().zip(plr).map(|(c, p)| c.capacity * p).sum()
    }

    /// Total power of a PLR vector, validating every entry.
    pub fn total_power(&self, plr: &[f64]) -> Result<f64> {
        if plr.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                got: plr.len(),
            });
        }
        self.chillers
            .iter()
            .zip(plr)
            .map(|(c, &p)| chiller_power(c, p, PowerMode::Strict))
            .sum()
    }

    /// Builds a solution record, computing power and supply from `plr`.
    pub fn solution(&self, load: f64, plr: Vec<f64>) -> Result<DispatchSolution> {
        let total_power = self.total_power(&plr)?;
        let supplied_load = self.supplied(&plr);
        Ok(DispatchSolution {
            load,
            feasible: supplied_load >= load - SUPPLY_EPS,
            plr,
            total_power,
            supplied_load,
        })
    }

    /// Returned when the load exceeds plant capacity: every chiller at full load.
    pub(crate) fn infeasible(&self, load: f64) -> DispatchSolution {
        let plr = vec![1.0; self.len()];
        DispatchSolution {
            load,
            total_power: self.chillers.iter().map(|c| eval_cubic(&c.coeffs, 1.0)).sum(),
            supplied_load: self.total_capacity(),
            plr,
            feasible: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DispatchSolution {
    /// Requested load, RT.
    pub load: f64,
    pub plr: Vec<f64>,
    /// kW.
    pub total_power: f64,
    /// `sum plr_i * capacity_i`, RT.
    pub supplied_load: f64,
    pub feasible: bool,
}

/// Independent check of a feasible solution: PLR bounds, load coverage and
/// the power total.
pub fn validate_solution(plant: &PlantConfig, s: &DispatchSolution) -> Result<()> {
    if s.plr.len() != plant.len() {
        return Err(Error::DimensionMismatch {
            expected: plant.len(),
            got: s.plr.len(),
        });
    }
    for (c, &p) in plant.chillers.iter().zip(&s.plr) {
        c.check_plr(p)?;
    }
    let supplied: f64 = plant.chillers.iter().zip(&s.plr).map(|(c, p)| c.capacity * p).sum();
    if supplied < s.load - SUPPLY_EPS {
        return Err(Error::Infeasible(format!("supplies {supplied} RT for a {} RT load", s.load)));
    }
    let power: f64 = plant
        .chillers
        .iter()
        .zip(&s.plr)
        .map(|(c, &p)| if p == 0.0 { 0.0 } else { eval_cubic(&c.coeffs, p) })
        .sum();
    if power != s.total_power {
        return Err(Error::Infeasible(format!("power total {} differs from recomputed {power}", s.total_power)));
    }
    Ok(())
}

pub(crate) fn check_load(load: f64) -> Result<()> {
    if !(load >= 0.0) || !load.is_finite() {
        return Err(Error::Parse(format!("cooling load must be finite and non-negative, got {load}")));
    }
    Ok(())
}
