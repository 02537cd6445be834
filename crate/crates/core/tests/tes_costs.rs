//! Cost arithmetic fed with the published energy rows and rates.

use coolplan::tes::*;

/// (name, peak kWh, off-peak kWh, max demand kW, chiller kW, storage kWh)
pub const PROPOSALS: [(&str, f64, f64, f64, f64, f64); 5] = [
    ("Baseline", 13295.7, 1174.9, 1096.4, 12309.5, 0.0),
    ("Proposal 1", 10882.4, 3349.9, 837.0, 7034.0, 20217.4),
    ("Proposal 2", 6696.0, 7672.5, 959.1, 8792.5, 51879.2),
    ("Proposal 3", 3564.0, 11036.8, 1379.6, 12309.5, 74394.1),
    ("Proposal 4", 9735.7, 4867.8, 608.5, 5275.5, 35809.3),
];

fn within(x: f64, want: f64, rel: f64) -> bool {
    (x - want).abs() <= rel * want.abs()
}

fn comparison() -> Comparison {
    let entries = PROPOSALS
        .iter()
        .map(|&(n, pk, op, md, kw, tes)| {
            (
                n.to_string(),
                EnergySummary {
                    peak_kwh: pk,
                    offpeak_kwh: op,
                    max_demand_kw: md,
                },
                kw,
                tes,
            )
        })
        .collect();
    compare_proposals(entries, &TariffSchedule::default(), &CapexRates::default()).unwrap()
}

#[test]
fn baseline_cost_rows() {
    let c = comparison();
    let b = &c.entries[0].cost;
    assert!(within(b.daily_peak_tariff, 3944.8, 1e-3));
    assert!(within(b.daily_offpeak_tariff, 216.5, 1e-3));
    assert!(within(b.daily_tariff, 4161.4, 1e-3));
    assert_eq!(b.chiller_capital, 8_050_413.0);
    assert!(within(b.ten_year, 25_407_720.09, 1e-3));
}

#[test]
fn proposal_capital_rows() {
    let c = comparison();
    let want = [6_037_492.1, 9_438_387.9, 13_339_089.6, 5_995_859.1];
    for (e, w) in c.entries[1..].iter().zip(want) {
        assert!(within(e.cost.total_capital, w, 1e-3), "{}: {}", e.name, e.cost.total_capital);
    }
}

#[test]
fn proposal_four_ranks_best() {
    let c = comparison();
    assert_eq!(c.entries[c.best()].name, "Proposal 4");
    let s = c.entries[4].cost.savings.unwrap();
    assert!((s.ten_year - 0.17).abs() < 0.005, "{}", s.ten_year);
    let published = [0.14, 0.07, -0.08, 0.17];
    for (e, p) in c.entries[1..].iter().zip(published) {
        let got = e.cost.savings.unwrap().ten_year;
        assert!((got - p).abs() < 0.006, "{}: {got}", e.name);
    }
}

#[test]
fn identities_to_the_cent() {
    let t = TariffSchedule::default();
    let k = CapexRates::default();
    for e in comparison().entries {
        let r = &e.cost;
        let by_hand_daily = e.energy.peak_kwh * t.peak_rate + e.energy.offpeak_kwh * t.offpeak_rate;
        let by_hand_year = 365.0 * by_hand_daily + 12.0 * e.energy.max_demand_kw * t.capacity_rate;
        let by_hand_total = r.chiller_kw * k.chiller_per_kw + r.tes_kwh * k.tes_per_kwh + 10.0 * by_hand_year;
        assert!((r.daily_tariff - by_hand_daily).abs() < 0.005);
        assert!((r.yearly_operating - by_hand_year).abs() < 0.005);
        assert!((r.ten_year - by_hand_total).abs() < 0.005);
    }
}

#[test]
fn comparison_csv_has_one_column_per_entry() {
    let mut buf = Vec::new();
    comparison().write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let header = text.lines().next().unwrap();
    assert_eq!(header.split(',').count(), 2 + PROPOSALS.len());
    assert!(text.lines().any(|l| l.starts_with("rank,")));
}
