//! Capital, tariff and 10-year cost arithmetic.

use std::io::Write;

use serde::{Deserialize, Serialize};

use super::TariffSchedule;
use crate::error::{Error, Result};

pub const YEARS: f64 = 10.0;
pub const DAYS_PER_YEAR: f64 = 365.0;
pub const MONTHS_PER_YEAR: f64 = 12.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CapexRates {
    /// $/kW of chiller capacity.
    pub chiller_per_kw: f64,
    /// $/kWh of storage.
    pub tes_per_kwh: f64,
}

impl Default for CapexRates {
    fn default() -> Self {
        Self {
            chiller_per_kw: 654.00,
            tes_per_kwh: 71.09,
        }
    }
}

impl CapexRates {
    pub fn validate(&self) -> Result<()> {
        if !(self.chiller_per_kw > 0.0 && self.tes_per_kwh > 0.0) {
            return Err(Error::InvalidConfig("capital cost rates must be positive".into()));
        }
        Ok(())
    }
}

/// The energy quantities the cost model consumes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergySummary {
    pub peak_kwh: f64,
    pub offpeak_kwh: f64,
    pub max_demand_kw: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Savings {
    pub capital: f64,
    pub operating: f64,
    pub ten_year: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostReport {
    pub chiller_kw: f64,
    pub tes_kwh: f64,
    pub chiller_capital: f64,
    pub tes_capital: f64,
    pub total_capital: f64,
    /// $/day.
    pub daily_peak_tariff: f64,
    pub daily_offpeak_tariff: f64,
    pub daily_tariff: f64,
    /// $/month.
    pub monthly_capacity: f64,
    pub yearly_operating: f64,
    pub ten_year: f64,
    /// Fractions relative to the baseline, positive when cheaper.
    pub savings: Option<Savings>,
}

fn saving(base: f64, x: f64) -> f64 {
    if base == 0.0 {
        0.0
    } else {
        (base - x) / base
    }
}

pub fn cost_analysis(
    e: &EnergySummary,
    fleet_kw: f64,
    tes_kwh: f64,
    t: &TariffSchedule,
    c: &CapexRates,
    baseline: Option<&CostReport>,
) -> CostReport {
    let chiller_capital = fleet_kw * c.chiller_per_kw;
    let tes_capital = tes_kwh * c.tes_per_kwh;
    let total_capital = chiller_capital + tes_capital;
    let daily_peak_tariff = e.peak_kwh * t.peak_rate;
    let daily_offpeak_tariff = e.offpeak_kwh * t.offpeak_rate;
    let daily_tariff = daily_peak_tariff + daily_offpeak_tariff;
    let monthly_capacity = e.max_demand_kw * t.capacity_rate;
    let yearly_operating = DAYS_PER_YEAR * daily_tariff + MONTHS_PER_YEAR * monthly_capacity;
    let ten_year = total_capital + YEARS * yearly_operating;
    let savings = baseline.map(|b| Savings {
        capital: saving(b.total_capital, total_capital),
        operating: saving(b.yearly_operating, yearly_operating),
        ten_year: saving(b.ten_year, ten_year),
    });
    CostReport {
        chiller_kw: fleet_kw,
        tes_kwh,
        chiller_capital,
        tes_capital,
        total_capital,
        daily_peak_tariff,
        daily_offpeak_tariff,
        daily_tariff,
        monthly_capacity,
        yearly_operating,
        ten_year,
        savings,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonEntry {
    pub name: String,
    pub energy: EnergySummary,
    pub cost: CostReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    /// Baseline first.
    pub entries: Vec<ComparisonEntry>,
    /// Entry indices by ascending 10-year cost; ties keep input order.
    pub ranking: Vec<usize>,
}

impl Comparison {
    pub fn best(&self) -> usize {
        self.ranking[0]
    }

    /// Item-per-row table with one column per entry.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        let mut header = vec!["item".to_string(), "unit".into()];
        header.extend(self.entries.iter().map(|e| e.name.clone()));
        wtr.write_record(&header)?;
        type Cell = fn(&ComparisonEntry) -> Option<f64>;
        let rows: [(&str, &str, Cell); 17] = [
            ("total_energy", "kWh", |e| Some(e.energy.peak_kwh + e.energy.offpeak_kwh)),
            ("peak_energy", "kWh", |e| Some(e.energy.peak_kwh)),
            ("offpeak_energy", "kWh", |e| Some(e.energy.offpeak_kwh)),
            ("max_demand", "kW", |e| Some(e.energy.max_demand_kw)),
            ("chiller_capacity", "kW", |e| Some(e.cost.chiller_kw)),
            ("tes_capacity", "kWh", |e| Some(e.cost.tes_kwh)),
            ("chiller_capital", "$", |e| Some(e.cost.chiller_capital)),
            ("tes_capital", "$", |e| Some(e.cost.tes_capital)),
            ("total_capital", "$", |e| Some(e.cost.total_capital)),
            ("capital_savings", "fraction", |e| e.cost.savings.map(|s| s.capital)),
            ("peak_tariff", "$/day", |e| Some(e.cost.daily_peak_tariff)),
            ("offpeak_tariff", "$/day", |e| Some(e.cost.daily_offpeak_tariff)),
            ("total_tariff", "$/day", |e| Some(e.cost.daily_tariff)),
            ("capacity_charge", "$/month", |e| Some(e.cost.monthly_capacity)),
            ("yearly_operating", "$", |e| Some(e.cost.yearly_operating)),
            ("operating_savings", "fraction", |e| e.cost.savings.map(|s| s.operating)),
            ("ten_year_cost", "$", |e| Some(e.cost.ten_year)),
        ];
        for (item, unit, f) in rows {
            let mut rec = vec![item.to_string(), unit.to_string()];
            rec.extend(self.entries.iter().map(|e| f(e).map(|v| format!("{v:.4}")).unwrap_or_default()));
            wtr.write_record(&rec)?;
        }
        let mut rec = vec!["ten_year_savings".to_string(), "fraction".into()];
        rec.extend(
            self.entries
                .iter()
                .map(|e| e.cost.savings.map(|s| format!("{:.4}", s.ten_year)).unwrap_or_default()),
        );
        wtr.write_record(&rec)?;
        let mut rec = vec!["rank".to_string(), "".into()];
        let mut ranks = vec![0; self.entries.len()];
        for (r, &i) in self.ranking.iter().enumerate() {
            ranks[i] = r + 1;
        }
        rec.extend(ranks.iter().map(|r| r.to_string()));
        wtr.write_record(&rec)?;
        wtr.flush().map_err(|e| Error::io("<comparison>", e))?;
        Ok(())
    }
}

/// Recomputes savings against the first entry and ranks by 10-year cost.
pub fn compare_proposals(
    entries: Vec<(String, EnergySummary, f64, f64)>,
    t: &TariffSchedule,
    c: &CapexRates,
) -> Result<Comparison> {
    if entries.len() < 2 {
        return Err(Error::InsufficientData("comparison needs a baseline and at least one proposal".into()));
    }
    let (bn, be, bkw, btes) = &entries[0];
    let base = cost_analysis(be, *bkw, *btes, t, c, None);
    let base_with = cost_analysis(be, *bkw, *btes, t, c, Some(&base));
    let mut out = vec![ComparisonEntry {
        name: bn.clone(),
        energy: *be,
        cost: base_with,
    }];
    for (name, e, kw, tes) in &entries[1..] {
        out.push(ComparisonEntry {
            name: name.clone(),
            energy: *e,
            cost: cost_analysis(e, *kw, *tes, t, c, Some(&base)),
        });
    }
    let mut ranking: Vec<usize> = (0..out.len()).collect();
    ranking.sort_by(|&a, &b| out[a].cost.ten_year.total_cmp(&out[b].cost.ten_year));
    Ok(Comparison { entries: out, ranking })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn baseline() -> EnergySummary {
        EnergySummary {
            peak_kwh: 13295.7,
            offpeak_kwh: 1174.9,
            max_demand_kw: 1096.4,
        }
    }

    #[test]
    fn identities_hold() {
        let t = TariffSchedule::default();
        let c = CapexRates::default();
        let r = cost_analysis(&baseline(), 12309.5, 500.0, &t, &c, None);
        assert_eq!(r.chiller_capital, 12309.5 * 654.0);
        assert_eq!(r.tes_capital, 500.0 * 71.09);
        assert_eq!(r.yearly_operating, 365.0 * r.daily_tariff + 12.0 * r.monthly_capacity);
        assert_eq!(r.ten_year, r.total_capital + 10.0 * r.yearly_operating);
    }

    #[test]
    fn identical_reports_save_nothing() {
        let t = TariffSchedule::default();
        let c = CapexRates::default();
        let cmp = compare_proposals(
            vec![("a".into(), baseline(), 100.0, 0.0), ("b".into(), baseline(), 100.0, 0.0)],
            &t,
            &c,
        )
        .unwrap();
        for e in &cmp.entries {
            let s = e.cost.savings.unwrap();
            assert_eq!((s.capital, s.operating, s.ten_year), (0.0, 0.0, 0.0));
        }
        assert_eq!(cmp.ranking, vec![0, 1]);
    }

    #[test]
    fn higher_peak_rate_never_cheaper() {
        let c = CapexRates::default();
        let mut prev = 0.0;
        for k in 0..20 {
            let t = TariffSchedule {
                peak_rate: 0.1 + 0.05 * k as f64,
                ..TariffSchedule::default()
            };
            let r = cost_analysis(&baseline(), 1000.0, 0.0, &t, &c, None);
            assert!(r.daily_tariff >= prev);
            prev = r.daily_tariff;
        }
    }

    #[test]
    fn lower_demand_lowers_capacity_charge() {
        let t = TariffSchedule::default();
        let c = CapexRates::default();
        let a = cost_analysis(&baseline(), 1.0, 0.0, &t, &c, None);
        let mut e = baseline();
        e.max_demand_kw -= 0.5;
        let b = cost_analysis(&e, 1.0, 0.0, &t, &c, None);
        assert!(b.monthly_capacity < a.monthly_capacity);
    }

    #[test]
    fn needs_two_entries() {
        let t = TariffSchedule::default();
        let c = CapexRates::default();
        assert!(compare_proposals(vec![("a".into(), baseline(), 1.0, 0.0)], &t, &c).is_err());
    }
}
