//! One function per pipeline stage. Stages communicate only through files in
//! the run directory, so any stage can be deleted and re-run on its own.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use chrono::{Duration, NaiveDate};
use coolplan::dispatch::{schedule_dispatch, validate_solution, DispatchPlan, PlantConfig};
use coolplan::features::{build_features, ClusterModel, FeatureMatrix, FeatureSpec, WeatherMode};
use coolplan::ingest::{
    parse_telemetry, parse_weather, resample_half_hour, synth_generate, write_reject_report, write_telemetry,
    write_weather, ColumnMap, LoadSeries, Provenance, WeatherColumnMap, WeatherSample,
};
use coolplan::kalman::kf_filter_series;
use coolplan::nn::{predict_series, train, EvalReport, Family, Model};
use coolplan::tes::{compare_proposals, simulate_proposal, Comparison, EnergyReport, ProposalConfig};
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::{CliError, Kind};
use crate::output::{open, read_json, Artifacts};

pub const CONFIG: &str = "config.toml";
pub const TELEMETRY: &str = "telemetry.csv";
pub const WEATHER: &str = "weather.csv";
pub const LOAD_RAW: &str = "load_raw.csv";
pub const LOAD_FILTERED: &str = "load_filtered.csv";
pub const REJECTS: &str = "rejects.txt";
pub const FILTER_SUMMARY: &str = "filter_summary.json";
pub const RMSE_TABLE: &str = "rmse_table.csv";
pub const DISPATCH_PLAN: &str = "dispatch_plan.csv";
pub const DISPATCH_SUMMARY: &str = "dispatch_summary.json";
pub const COST_COMPARISON: &str = "cost_comparison.csv";
pub const TES_SUMMARY: &str = "tes_summary.json";
pub const SUMMARY: &str = "summary.json";

/// GA-versus-oracle tolerance reported for dispatch plans, relative.
pub const GA_ORACLE_TOLERANCE: f64 = 1e-3;

pub fn cluster_file(k: usize) -> String {
    format!("clusters/k{k}.json")
}

pub fn features_file(set: &str) -> String {
    format!("features/{set}.csv")
}

pub fn model_file(family: Family, set: &str) -> String {
    format!("models/{}_{set}.json", family.as_str())
}

pub fn eval_file(family: Family, set: &str) -> String {
    format!("eval/{}_{set}.json", family.as_str())
}

pub fn prediction_file(family: Family, set: &str) -> String {
    format!("predictions/{}_{set}.csv", family.as_str())
}

pub fn ledger_file(name: &str) -> String {
    let slug: String = name
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() { c.to_ascii_lowercase() } else { '_' })
        .collect();
    format!("tes/{slug}.csv")
}

/// Resolved configuration plus the run directory.
pub struct Ctx {
    pub cfg: RunConfig,
    pub out: Artifacts,
}

impl Ctx {
    pub fn new(cfg: RunConfig) -> Self {
        let out = Artifacts::new(cfg.paths.out.clone(), &cfg);
        Self { cfg, out }
    }

    pub fn path(&self, rel: &str) -> PathBuf {
        self.out.path(rel)
    }

    fn plant(&self) -> Result<PlantConfig, CliError> {
        match &self.cfg.paths.plant {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| CliError::input(format!("{}: {e}", p.display())))?;
                Ok(PlantConfig::from_json(&text)?)
            }
            None => Ok(PlantConfig::default()),
        }
    }

    fn write_config(&self) -> Result<(), CliError> {
        self.out.write_text(CONFIG, &self.cfg.to_toml())?;
        Ok(())
    }
}

fn read_load(path: &Path) -> Result<LoadSeries, CliError> {
    LoadSeries::read_csv(open(path)?).map_err(|e| CliError::from(e).prefixed(path))
}

fn read_weather(path: &Path) -> Result<Vec<WeatherSample>, CliError> {
    Ok(parse_weather(path, &WeatherColumnMap::default())?.samples)
}

impl CliError {
    fn prefixed(mut self, path: &Path) -> Self {
        if !self.message.contains(&path.display().to_string()) {
            self.message = format!("{}: {}", path.display(), self.message);
        }
        self
    }
}

// ---- synth ----

pub fn cmd_synth(ctx: &Ctx) -> Result<(), CliError> {
    ctx.write_config()?;
    let data = synth_generate(&ctx.cfg.synth, ctx.cfg.seed)?;
    ctx.out.write_csv(TELEMETRY, |w| write_telemetry(w, &data.telemetry))?;
    ctx.out.write_csv(WEATHER, |w| write_weather(w, &data.weather))?;
    Ok(())
}

// ---- filter ----

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterSummary {
    pub samples: usize,
    pub rejected_rows: usize,
    pub range_flags: usize,
    pub bins: usize,
    pub interpolated_bins: Vec<usize>,
    pub negative_raw_bins: Vec<usize>,
    pub raw_mean_rt: f64,
    pub filtered_mean_rt: f64,
}

pub fn cmd_filter(ctx: &Ctx, telemetry: Option<&Path>) -> Result<(), CliError> {
    let src = telemetry.map(Path::to_path_buf).unwrap_or_else(|| ctx.path(TELEMETRY));
    let parsed = parse_telemetry(&src, &ColumnMap::default())?;
    let resampled = resample_half_hour(&parsed.samples, &ctx.cfg.ingest)?;
    let raw = resampled.series;
    let filtered = kf_filter_series(&raw, &ctx.cfg.kalman)?;
    filtered.validate_downstream()?;
    ctx.out.write_csv(LOAD_RAW, |w| raw.write_csv(w))?;
    ctx.out.write_csv(LOAD_FILTERED, |w| filtered.write_csv(w))?;
    ctx.out.write_csv(REJECTS, |w| write_reject_report(w, &parsed.rejects))?;
    let mean = |s: &LoadSeries| s.values.iter().sum::<f64>() / s.len() as f64;
    ctx.out.write_json(
        FILTER_SUMMARY,
        &FilterSummary {
            samples: parsed.samples.len(),
            rejected_rows: parsed.rejects.len(),
            range_flags: parsed.flags.len(),
            bins: raw.len(),
            interpolated_bins: resampled.interpolated,
            negative_raw_bins: raw.negative_indices(),
            raw_mean_rt: mean(&raw),
            filtered_mean_rt: mean(&filtered),
        },
    )?;
    Ok(())
}

// ---- cluster ----

fn cluster_ks(specs: &[FeatureSpec]) -> Vec<usize> {
    let mut ks: Vec<usize> = specs
        .iter()
        .filter_map(|s| match s.weather {
            WeatherMode::Clustered(k) => Some(k),
            WeatherMode::Raw => None,
        })
        .collect();
    ks.sort_unstable();
    ks.dedup();
    ks
}

/// Clusters are fitted on the leading training share of the weather record.
pub fn cmd_cluster(ctx: &Ctx, weather: Option<&Path>) -> Result<(), CliError> {
    let src = weather.map(Path::to_path_buf).unwrap_or_else(|| ctx.path(WEATHER));
    let samples = read_weather(&src)?;
    let n_fit = ((samples.len() as f64 * ctx.cfg.features.train_fraction).ceil() as usize).clamp(1, samples.len());
    for k in cluster_ks(&ctx.cfg.feature_specs()) {
        let model = ClusterModel::fit_weather(&samples[..n_fit], &ctx.cfg.kmeans(k))?;
        ctx.out.write_json(&cluster_file(k), &model)?;
    }
    Ok(())
}

// ---- features ----

/// Lazily loaded stage inputs shared by the feature, training and prediction stages.
struct FeatureInputs<'a> {
    ctx: &'a Ctx,
    raw: Option<LoadSeries>,
    filtered: Option<LoadSeries>,
    weather: Option<Vec<WeatherSample>>,
    clusters: BTreeMap<usize, ClusterModel>,
}

impl<'a> FeatureInputs<'a> {
    fn new(ctx: &'a Ctx) -> Self {
        Self {
            ctx,
            raw: None,
            filtered: None,
            weather: None,
            clusters: BTreeMap::new(),
        }
    }

    fn matrix(&mut self, spec: &FeatureSpec) -> Result<FeatureMatrix, CliError> {
        let ctx = self.ctx;
        let load = match spec.load_source {
            Provenance::Raw => &mut self.raw,
            _ => &mut self.filtered,
        };
        if load.is_none() {
            let file = if spec.load_source == Provenance::Raw { LOAD_RAW } else { LOAD_FILTERED };
            *load = Some(read_load(&ctx.path(file))?);
        }
        if self.weather.is_none() {
            self.weather = Some(read_weather(&ctx.path(WEATHER))?);
        }
        if let WeatherMode::Clustered(k) = spec.weather {
            if !self.clusters.contains_key(&k) {
                self.clusters.insert(k, read_json(&ctx.path(&cluster_file(k)))?);
            }
        }
        let cluster = match spec.weather {
            WeatherMode::Clustered(k) => self.clusters.get(&k),
            WeatherMode::Raw => None,
        };
        let load = match spec.load_source {
            Provenance::Raw => self.raw.as_ref(),
            _ => self.filtered.as_ref(),
        }
        .expect("loaded above");
        Ok(build_features(
            load,
            self.weather.as_ref().expect("loaded above"),
            spec,
            cluster,
            &ctx.cfg.feature_options(),
        )?)
    }
}

pub fn cmd_features(ctx: &Ctx) -> Result<(), CliError> {
    let mut inputs = FeatureInputs::new(ctx);
    for spec in ctx.cfg.feature_specs() {
        let fm = inputs.matrix(&spec)?;
        ctx.out.write_csv(&features_file(&spec.name), |w| fm.write_csv(w))?;
    }
    Ok(())
}

// ---- train ----

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub feature_set: String,
    pub model: Model,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RmseRow {
    pub feature_set: String,
    /// Test RMSE per family, RT, in configured family order.
    pub test_rmse: Vec<f64>,
    pub val_rmse: Vec<f64>,
    /// `(benchmark - rmse) / benchmark` per family when the benchmark was trained.
    pub improvement: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RmseTable {
    pub families: Vec<Family>,
    pub rows: Vec<RmseRow>,
}

impl RmseTable {
    fn build(families: &[Family], specs: &[FeatureSpec], reports: &BTreeMap<(usize, usize), EvalReport>) -> Self {
        let bench = specs.iter().position(FeatureSpec::is_benchmark);
        let rows = specs
            .iter()
            .enumerate()
            .map(|(si, s)| {
                let test: Vec<f64> = (0..families.len()).map(|fi| reports[&(si, fi)].test_rmse).collect();
                let val = (0..families.len()).map(|fi| reports[&(si, fi)].val_rmse).collect();
                let improvement = (0..families.len())
                    .map(|fi| bench.map(|b| (reports[&(b, fi)].test_rmse - test[fi]) / reports[&(b, fi)].test_rmse))
                    .collect();
                RmseRow {
                    feature_set: s.name.clone(),
                    test_rmse: test,
                    val_rmse: val,
                    improvement,
                }
            })
            .collect();
        Self {
            families: families.to_vec(),
            rows,
        }
    }

    /// One row per feature set, one test-RMSE column per family.
    pub fn write_csv<W: std::io::Write>(&self, w: W) -> coolplan::Result<()> {
        let mut wtr = csv_writer(w);
        let mut header = vec!["feature_set".to_string()];
        for f in &self.families {
            header.push(format!("{}_test_rmse_rt", f.as_str()));
        }
        for f in &self.families {
            header.push(format!("{}_val_rmse_rt", f.as_str()));
        }
        for f in &self.families {
            header.push(format!("{}_improvement_vs_benchmark", f.as_str()));
        }
        wtr.write_record(&header)?;
        for r in &self.rows {
            let mut rec = vec![r.feature_set.clone()];
            rec.extend(r.test_rmse.iter().map(|v| format!("{v:.4}")));
            rec.extend(r.val_rmse.iter().map(|v| format!("{v:.4}")));
            rec.extend(r.improvement.iter().map(|v| v.map(|x| format!("{x:.4}")).unwrap_or_default()));
            wtr.write_record(&rec)?;
        }
        wtr.flush().map_err(|e| coolplan::Error::io("<rmse table>", e))?;
        Ok(())
    }

    /// Lowest validation RMSE among sets whose target is the filtered load;
    /// ties go to the earlier set, then the earlier family.
    pub fn selected(&self) -> Option<(Family, String)> {
        let mut best: Option<(f64, Family, &str)> = None;
        for r in &self.rows {
            let filtered = FeatureSpec::by_name(&r.feature_set).is_some_and(|s| s.load_source != Provenance::Raw);
            if !filtered {
                continue;
            }
            for (fi, &v) in r.val_rmse.iter().enumerate() {
                if best.is_none_or(|(bv, _, _)| v < bv) {
                    best = Some((v, self.families[fi], &r.feature_set));
                }
            }
        }
        best.map(|(_, f, s)| (f, s.to_string()))
    }
}

fn csv_writer<W: std::io::Write>(w: W) -> csv::Writer<W> {
    csv::Writer::from_writer(w)
}

pub fn cmd_train(ctx: &Ctx) -> Result<RmseTable, CliError> {
    let families = ctx.cfg.families()?;
    let specs = ctx.cfg.feature_specs();
    let mut inputs = FeatureInputs::new(ctx);
    let mut reports = BTreeMap::new();
    for (si, spec) in specs.iter().enumerate() {
        let fm = inputs.matrix(spec)?;
        for (fi, &family) in families.iter().enumerate() {
            let (model, report) = train(family, &fm, &ctx.cfg.nn)?;
            ctx.out.write_json(
                &model_file(family, &spec.name),
                &ModelFile {
                    feature_set: spec.name.clone(),
                    model,
                },
            )?;
            ctx.out.write_json(&eval_file(family, &spec.name), &report)?;
            reports.insert((si, fi), report);
        }
    }
    let table = RmseTable::build(&families, &specs, &reports);
    ctx.out.write_csv(RMSE_TABLE, |w| table.write_csv(w))?;
    Ok(table)
}

// ---- predict ----

/// Predicted load at each target instant, RT.
pub fn cmd_predict(ctx: &Ctx, model: &Path) -> Result<PathBuf, CliError> {
    let mf: ModelFile = read_json(model)?;
    let spec = FeatureSpec::by_name(&mf.feature_set)
        .ok_or_else(|| CliError::input(format!("{}: unknown feature set `{}`", model.display(), mf.feature_set)))?;
    let fm = FeatureInputs::new(ctx).matrix(&spec)?;
    let series = predict_series(&mf.model, &fm)?;
    ctx.out
        .write_csv(&prediction_file(mf.model.family(), &spec.name), |w| series.write_csv(w))
}

// ---- dispatch ----

/// The 48 slots of `day`, or of the last day the series covers completely.
pub fn select_day(series: &LoadSeries, day: Option<NaiveDate>) -> Result<(NaiveDate, LoadSeries), CliError> {
    let per_day = (24 * 60 / series.step_minutes) as usize;
    let window = |d: NaiveDate| -> Option<usize> {
        let off = d.and_hms_opt(0, 0, 0)? - series.start;
        let m = off.num_minutes();
        (m >= 0 && m % series.step_minutes == 0 && (m / series.step_minutes) as usize + per_day <= series.len())
            .then_some((m / series.step_minutes) as usize)
    };
    if series.step_minutes <= 0 || (24 * 60) % series.step_minutes != 0 {
        return Err(CliError::input("load series step does not divide a day"));
    }
    let chosen = match day {
        Some(d) => window(d).map(|i| (d, i)).ok_or_else(|| {
            CliError::input(format!("load series does not cover all of {d}"))
        })?,
        None => {
            let last = series.timestamp(series.len() - 1).date();
            let mut d = last;
            loop {
                if let Some(i) = window(d) {
                    break (d, i);
                }
                if d <= series.start.date() {
                    return Err(CliError::input("load series does not cover a complete day"));
                }
                d -= Duration::days(1);
            }
        }
    };
    Ok((chosen.0, series.slice(chosen.1, chosen.1 + per_day)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DispatchSummary {
    pub loads: String,
    pub day: Option<NaiveDate>,
    pub slots: usize,
    pub energy_kwh: f64,
    pub max_demand_kw: f64,
    pub infeasible_slots: Vec<usize>,
    pub oracle_energy_kwh: Option<f64>,
    /// Largest `(ga - oracle) / oracle` over slots.
    pub worst_gap_vs_oracle: Option<f64>,
    pub slots_within_tolerance: Option<usize>,
    pub tolerance: f64,
}

pub fn cmd_dispatch(
    ctx: &Ctx,
    loads: Option<&Path>,
    oracle: bool,
    day: Option<NaiveDate>,
) -> Result<(DispatchPlan, DispatchSummary), CliError> {
    let src = loads.map(Path::to_path_buf).unwrap_or_else(|| ctx.path(LOAD_FILTERED));
    let series = read_load(&src)?;
    let day = day.or(ctx.cfg.report.day);
    let (day, series) = match day {
        Some(d) => {
            let (d, s) = select_day(&series, Some(d))?;
            (Some(d), s)
        }
        None => (None, series),
    };
    let plant = ctx.plant()?;
    let plan = schedule_dispatch(&plant, &series, &ctx.cfg.schedule(oracle))?;
    for s in &plan.slots {
        if s.solution.feasible {
            validate_solution(&plant, &s.solution)?;
        }
    }
    let gaps: Vec<f64> = plan
        .slots
        .iter()
        .filter_map(|s| {
            s.oracle.as_ref().map(|o| {
                if o.total_power > 0.0 {
                    (s.solution.total_power - o.total_power) / o.total_power
                } else {
                    0.0
                }
            })
        })
        .collect();
    let with_oracle = !gaps.is_empty();
    let summary = DispatchSummary {
        loads: src.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default(),
        day,
        slots: plan.slots.len(),
        energy_kwh: plan.energy_kwh,
        max_demand_kw: plan.max_demand_kw,
        infeasible_slots: plan.infeasible_slots.clone(),
        oracle_energy_kwh: plan.oracle_energy_kwh(),
        worst_gap_vs_oracle: with_oracle.then(|| gaps.iter().cloned().fold(f64::NEG_INFINITY, f64::max)),
        slots_within_tolerance: with_oracle.then(|| gaps.iter().filter(|&&g| g <= GA_ORACLE_TOLERANCE).count()),
        tolerance: GA_ORACLE_TOLERANCE,
    };
    ctx.out.write_csv(DISPATCH_PLAN, |w| plan.write_csv(w))?;
    ctx.out.write_json(DISPATCH_SUMMARY, &summary)?;
    if plan.is_partial() {
        let stamps: Vec<String> = plan
            .infeasible_slots
            .iter()
            .map(|&i| plan.slots[i].timestamp.to_string())
            .collect();
        return Err(CliError::new(
            Kind::Infeasible,
            format!("load exceeds plant capacity at {}", stamps.join(", ")),
        ));
    }
    Ok((plan, summary))
}

// ---- tes ----

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProposalOutcome {
    pub name: String,
    pub feasible: bool,
    pub error: Option<String>,
    pub report: Option<EnergySummaryRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergySummaryRow {
    pub total_kwh: f64,
    pub peak_kwh: f64,
    pub offpeak_kwh: f64,
    pub max_demand_kw: f64,
    pub capacity_kwh: f64,
    pub initial_soc_kwh: f64,
    pub final_soc_kwh: f64,
    pub balancing_rt: Option<f64>,
}

impl From<&EnergyReport> for EnergySummaryRow {
    fn from(r: &EnergyReport) -> Self {
        Self {
            total_kwh: r.total_kwh,
            peak_kwh: r.peak_kwh,
            offpeak_kwh: r.offpeak_kwh,
            max_demand_kw: r.max_demand_kw,
            capacity_kwh: r.capacity_kwh,
            initial_soc_kwh: r.initial_soc_kwh,
            final_soc_kwh: r.final_soc_kwh,
            balancing_rt: r.balancing_rt,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TesSummary {
    pub loads: String,
    pub day: NaiveDate,
    pub proposals: Vec<ProposalOutcome>,
    pub comparison: Comparison,
    pub best: String,
}

/// Simulates the baseline and every configured preset on one day. Presets
/// that cannot serve the day are listed as infeasible and left out of the
/// comparison; the command fails only when nothing remains to compare.
pub fn cmd_tes(ctx: &Ctx, loads: Option<&Path>, day: Option<NaiveDate>) -> Result<TesSummary, CliError> {
    let src = loads.map(Path::to_path_buf).unwrap_or_else(|| ctx.path(LOAD_FILTERED));
    let series = read_load(&src)?;
    let (day, series) = select_day(&series, day.or(ctx.cfg.report.day))?;
    let dispatch = ctx.cfg.schedule(false);

    let mut baseline = ProposalConfig::baseline();
    baseline.fleet = ctx.plant()?;
    let mut proposals = vec![baseline];
    for &n in &ctx.cfg.report.proposals {
        let mut p = ProposalConfig::preset(n)?;
        p.tes = ctx.cfg.tes.clone();
        proposals.push(p);
    }

    let mut outcomes = Vec::new();
    let mut entries = Vec::new();
    for (i, p) in proposals.iter().enumerate() {
        match simulate_proposal(p, &series, &ctx.cfg.tariff, &dispatch) {
            Ok(r) => {
                let ids: Vec<String> = p.fleet.chillers.iter().map(|c| c.id.clone()).collect();
                ctx.out.write_csv(&ledger_file(&p.name), |w| r.write_ledger_csv(w, &ids))?;
                let tes_kwh = if i == 0 { 0.0 } else { r.capacity_kwh };
                entries.push((p.name.clone(), r.summary(), p.fleet_kw(), tes_kwh));
                outcomes.push(ProposalOutcome {
                    name: p.name.clone(),
                    feasible: true,
                    error: None,
                    report: Some((&r).into()),
                });
            }
            Err(e) if i > 0 && e.kind() == coolplan::ErrorKind::Infeasible => {
                outcomes.push(ProposalOutcome {
                    name: p.name.clone(),
                    feasible: false,
                    error: Some(e.to_string()),
                    report: None,
                });
            }
            Err(e) => return Err(e.into()),
        }
    }
    if entries.len() < 2 {
        return Err(CliError::new(
            Kind::Infeasible,
            format!("no storage proposal can serve the load profile of {day}"),
        ));
    }
    let comparison = compare_proposals(entries, &ctx.cfg.tariff, &ctx.cfg.capex)?;
    ctx.out.write_csv(COST_COMPARISON, |w| comparison.write_csv(w))?;
    let summary = TesSummary {
        loads: src.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default(),
        day,
        proposals: outcomes,
        best: comparison.entries[comparison.best()].name.clone(),
        comparison,
    };
    ctx.out.write_json(TES_SUMMARY, &summary)?;
    Ok(summary)
}

// ---- report ----

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, passed: bool, detail: String) -> Self {
        Self {
            name: name.into(),
            passed,
            detail,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportSummary {
    pub rmse: RmseTable,
    pub selected_model: String,
    pub day: NaiveDate,
    pub dispatch: DispatchSummary,
    pub tes: TesSummary,
    pub checks: Vec<Check>,
}

/// Runs every stage in order and summarises the results.
pub fn cmd_report(ctx: &Ctx) -> Result<ReportSummary, CliError> {
    cmd_synth(ctx)?;
    cmd_filter(ctx, None)?;
    cmd_cluster(ctx, None)?;
    cmd_features(ctx)?;
    let rmse = cmd_train(ctx)?;
    let (family, set) = rmse
        .selected()
        .ok_or_else(|| CliError::config("report needs at least one feature set with a filtered target"))?;
    let predictions = cmd_predict(ctx, &ctx.path(&model_file(family, &set)))?;
    let series = read_load(&predictions)?;
    let (day, _) = select_day(&series, ctx.cfg.report.day)?;
    let (plan, dispatch) = cmd_dispatch(ctx, Some(&predictions), true, Some(day))?;
    let tes = cmd_tes(ctx, Some(&predictions), Some(day))?;

    let filter: FilterSummary = read_json(&ctx.path(FILTER_SUMMARY))?;
    let filtered = read_load(&ctx.path(LOAD_FILTERED))?;
    let mut checks = Vec::new();
    checks.push(Check::new(
        "filtered_load_non_negative",
        filtered.negative_indices().is_empty(),
        format!("{} bins, {} interpolated", filter.bins, filter.interpolated_bins.len()),
    ));
    let finite = rmse.rows.iter().all(|r| r.test_rmse.iter().chain(&r.val_rmse).all(|v| v.is_finite()));
    checks.push(Check::new(
        "rmse_table_complete",
        finite && rmse.rows.len() == ctx.cfg.feature_specs().len(),
        format!("{} feature sets x {} families", rmse.rows.len(), rmse.families.len()),
    ));
    let supplied = plan.slots.iter().all(|s| s.solution.feasible && s.solution.supplied_load + 1e-6 >= s.load);
    checks.push(Check::new(
        "dispatch_meets_load",
        supplied && !plan.is_partial(),
        format!("{} slots", plan.slots.len()),
    ));
    let within = dispatch.slots_within_tolerance.unwrap_or(0);
    checks.push(Check::new(
        "ga_within_oracle_tolerance",
        within == plan.slots.len(),
        format!(
            "{within}/{} slots within {}; worst gap {:.6}",
            plan.slots.len(),
            GA_ORACLE_TOLERANCE,
            dispatch.worst_gap_vs_oracle.unwrap_or(f64::NAN)
        ),
    ));
    let cyclic = tes.proposals.iter().filter_map(|p| p.report.as_ref()).all(|r| {
        (r.final_soc_kwh - r.initial_soc_kwh).abs() <= 0.01 * r.initial_soc_kwh + 1e-6
            && r.initial_soc_kwh <= r.capacity_kwh + 1e-6
    });
    checks.push(Check::new(
        "storage_cyclic",
        cyclic,
        format!("{} proposals simulated", tes.proposals.iter().filter(|p| p.feasible).count()),
    ));
    let ranked = tes
        .comparison
        .ranking
        .windows(2)
        .all(|w| tes.comparison.entries[w[0]].cost.ten_year <= tes.comparison.entries[w[1]].cost.ten_year);
    checks.push(Check::new("cost_ranking_sorted", ranked, format!("best: {}", tes.best)));

    let summary = ReportSummary {
        rmse,
        selected_model: format!("{}_{set}", family.as_str()),
        day,
        dispatch,
        tes,
        checks,
    };
    ctx.out.write_json(SUMMARY, &summary)?;
    Ok(summary)
}
