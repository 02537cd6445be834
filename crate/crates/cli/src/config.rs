//! Run configuration: one TOML document covering every stage.
//!
//! Keys are dotted (`kalman.q = 1.0`, `nn.epochs = 40`); TOML tables are the
//! same keys written in block form. Every section rejects unknown keys. The
//! single top-level `seed` drives every stochastic stage, so per-module seed
//! keys are refused.

use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use coolplan::dispatch::{GaConfig, PlrGrid, ScheduleConfig, Solver};
use coolplan::features::{FeatureOptions, FeatureSpec, KMeansConfig};
use coolplan::ingest::{PhysConstants, SynthConfig};
use coolplan::kalman::KalmanConfig;
use coolplan::nn::{Family, TrainConfig};
use coolplan::tes::{CapexRates, TariffSchedule, TesConfig};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Paths {
    /// Directory every stage reads from and writes to.
    pub out: PathBuf,
    /// Plant description (JSON); the built-in 3 x 1000 RT + 500 RT plant when absent.
    pub plant: Option<PathBuf>,
}

impl Default for Paths {
    fn default() -> Self {
        Self {
            out: PathBuf::from("out"),
            plant: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClusterSection {
    pub max_iter: usize,
    pub tol: f64,
    pub restarts: usize,
}

impl Default for ClusterSection {
    fn default() -> Self {
        let k = KMeansConfig::new(2, 0);
        Self {
            max_iter: k.max_iter,
            tol: k.tol,
            restarts: k.restarts,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FeaturesSection {
    /// Feature-set names; all nine when empty.
    pub sets: Vec<String>,
    pub train_fraction: f64,
    pub holidays: Vec<NaiveDate>,
}

impl Default for FeaturesSection {
    fn default() -> Self {
        Self {
            sets: Vec::new(),
            train_fraction: FeatureOptions::default().train_fraction,
            holidays: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DispatchSection {
    pub solver: Solver,
    /// Add the grid-oracle power and gap columns to dispatch plans.
    pub oracle: bool,
    pub grid_step: f64,
}

impl Default for DispatchSection {
    fn default() -> Self {
        Self {
            solver: Solver::Ga,
            oracle: false,
            grid_step: PlrGrid::default().step,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReportSection {
    /// Network families trained by `train` and `report`.
    pub families: Vec<String>,
    /// Storage presets evaluated against the baseline.
    pub proposals: Vec<u8>,
    /// Day used for the dispatch plan and storage study; the last complete
    /// predicted day when absent.
    pub day: Option<NaiveDate>,
}

impl Default for ReportSection {
    fn default() -> Self {
        Self {
            families: vec!["mlp".into(), "lstm".into()],
            proposals: vec![1, 2, 3, 4],
            day: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub paths: Paths,
    pub ingest: PhysConstants,
    pub synth: SynthConfig,
    pub kalman: KalmanConfig,
    pub cluster: ClusterSection,
    pub features: FeaturesSection,
    pub nn: TrainConfig,
    pub ga: GaConfig,
    pub dispatch: DispatchSection,
    pub tes: TesConfig,
    pub tariff: TariffSchedule,
    pub capex: CapexRates,
    pub report: ReportSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            paths: Paths::default(),
            ingest: PhysConstants::default(),
            synth: SynthConfig::default(),
            kalman: KalmanConfig::default(),
            cluster: ClusterSection::default(),
            features: FeaturesSection::default(),
            nn: TrainConfig::default(),
            ga: GaConfig::default(),
            dispatch: DispatchSection::default(),
            tes: TesConfig::default(),
            tariff: TariffSchedule::default(),
            capex: CapexRates::default(),
            report: ReportSection::default(),
        }
    }
}

const SEEDED_SECTIONS: [&str; 2] = ["nn", "ga"];

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let table: toml::Table = text.parse().map_err(|e: toml::de::Error| CliError::config(e.message()))?;
        for section in SEEDED_SECTIONS {
            if table.get(section).and_then(|v| v.get("seed")).is_some() {
                return Err(CliError::config(format!(
                    "`{section}.seed` is not accepted; the top-level `seed` drives every stage"
                )));
            }
        }
        let mut cfg: RunConfig = table
            .try_into()
            .map_err(|e: toml::de::Error| CliError::config(e.message()))?;
        cfg.sync_seeds();
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| CliError::config(format!("{}: {}", path.display(), e.message)))
    }

    /// Copies the top-level seed into the module configs that carry one.
    pub fn sync_seeds(&mut self) {
        self.nn.seed = self.seed;
        self.ga.seed = self.seed;
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.ingest.validate()?;
        self.synth.validate()?;
        self.kalman.validate()?;
        self.nn.validate()?;
        self.ga.validate()?;
        self.tes.validate()?;
        self.tariff.validate()?;
        self.capex.validate()?;
        if self.cluster.max_iter == 0 || self.cluster.restarts == 0 || !(self.cluster.tol >= 0.0) {
            return Err(CliError::config("cluster: max_iter and restarts must be >= 1, tol >= 0"));
        }
        if !(self.features.train_fraction > 0.0 && self.features.train_fraction <= 1.0) {
            return Err(CliError::config("features.train_fraction must lie in (0, 1]"));
        }
        for name in &self.features.sets {
            if FeatureSpec::by_name(name).is_none() {
                return Err(CliError::config(format!("features.sets: unknown feature set `{name}`")));
            }
        }
        if !(self.dispatch.grid_step > 0.0 && self.dispatch.grid_step <= 0.5) {
            return Err(CliError::config("dispatch.grid_step must lie in (0, 0.5]"));
        }
        self.families()?;
        if let Some(p) = self.report.proposals.iter().find(|&&p| !(1..=4).contains(&p)) {
            return Err(CliError::config(format!("report.proposals: unknown preset {p}")));
        }
        Ok(())
    }

    /// Stable digest of every setting that can change an artifact. Paths are
    /// excluded so the same run in two directories hashes identically.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.paths = Paths::default();
        let json = serde_json::to_string(&c).expect("config serialises");
        let digest = Sha256::digest(json.as_bytes());
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn feature_specs(&self) -> Vec<FeatureSpec> {
        if self.features.sets.is_empty() {
            FeatureSpec::all()
        } else {
            self.features.sets.iter().filter_map(|n| FeatureSpec::by_name(n)).collect()
        }
    }

    pub fn families(&self) -> Result<Vec<Family>, CliError> {
        if self.report.families.is_empty() {
            return Err(CliError::config("report.families must name at least one family"));
        }
        self.report
            .families
            .iter()
            .map(|f| Family::parse(f).map_err(CliError::from))
            .collect()
    }

    pub fn feature_options(&self) -> FeatureOptions {
        FeatureOptions {
            train_fraction: self.features.train_fraction,
            train_until: None,
            holidays: self.features.holidays.clone(),
        }
    }

    pub fn kmeans(&self, k: usize) -> KMeansConfig {
        KMeansConfig {
            k,
            seed: self.seed,
            max_iter: self.cluster.max_iter,
            tol: self.cluster.tol,
            restarts: self.cluster.restarts,
        }
    }

    pub fn schedule(&self, oracle_column: bool) -> ScheduleConfig {
        ScheduleConfig {
            solver: self.dispatch.solver,
            oracle_column: oracle_column || self.dispatch.oracle,
            ga: self.ga.clone(),
            grid: PlrGrid {
                step: self.dispatch.grid_step,
            },
        }
    }

    /// The fully resolved configuration, for the run directory.
    /// Resolved config without `paths.out`, so the copy saved in a run
    /// directory does not depend on where that directory is.
    pub fn to_toml(&self) -> String {
        let mut table = toml::Table::try_from(self).expect("config serialises");
        if let Some(toml::Value::Table(t)) = table.get_mut("paths") {
            t.remove("out");
        }
        for section in SEEDED_SECTIONS {
            if let Some(toml::Value::Table(t)) = table.get_mut(section) {
                t.remove("seed");
            }
        }
        toml::to_string(&table).expect("config serialises")
    }
}
