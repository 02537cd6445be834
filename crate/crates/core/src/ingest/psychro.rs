use crate::error::{Error, Result};

/// Ratio of molar masses of water vapour and dry air.
const MOLAR_MASS_RATIO: f64 = 0.621945;

/// Saturation vapour pressure over water (Magnus form), hPa.
pub fn saturation_pressure_hpa(dry_bulb_c: f64) -> f64 {
    6.112 * (17.62 * dry_bulb_c / (243.12 + dry_bulb_c)).exp()
}

/// Humidity ratio in kg water per kg dry air.
pub fn humidity_ratio(dry_bulb_c: f64, rel_humidity_pct: f64, pressure_hpa: f64) -> Result<f64> {
    let vapour = rel_humidity_pct / 100.0 * saturation_pressure_hpa(dry_bulb_c);
    if vapour >= pressure_hpa {
        return Err(Error::SaturationOverflow {
            vapour_hpa: vapour,
            total_hpa: pressure_hpa,
        });
    }
    Ok(MOLAR_MASS_RATIO * vapour / (pressure_hpa - vapour))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Straight-line evaluation of the Magnus + mixing-ratio formulas.
    fn oracle(t: f64, rh: f64, p: f64) -> f64 {
        let es = 6.112 * f64::exp(17.62 * t / (243.12 + t));
        let e = rh * es / 100.0;
        0.621945 * e / (p - e)
    }

    #[test]
    fn dry_air_is_zero() {
        assert_eq!(humidity_ratio(30.0, 0.0, 1010.0).unwrap(), 0.0);
    }

    #[test]
    fn warm_humid_reference_point() {
        let w = humidity_ratio(30.0, 75.0, 1010.0).unwrap();
        assert!((w - oracle(30.0, 75.0, 1010.0)).abs() < 1e-15);
        assert!((w - 0.020188).abs() < 1e-6, "w = {w}");
    }

    #[test]
    fn saturated_25c_matches_table() {
        // Psychrometric tables list W_s(25 degC, 101.325 kPa) = 0.02016 kg/kg.
        let w = humidity_ratio(25.0, 100.0, 1013.25).unwrap();
        assert!((w - 0.0201).abs() / 0.0201 < 0.01, "w = {w}");
        assert!((w - 0.02016).abs() / 0.02016 < 0.01);
    }

    #[test]
    fn overflow_when_vapour_exceeds_pressure() {
        // 100 degC saturation is ~1000 hPa.
        assert!(matches!(
            humidity_ratio(100.0, 100.0, 850.0),
            Err(Error::SaturationOverflow { .. })
        ));
    }

    #[test]
    fn increasing_in_rh_on_grid() {
        for t in (0..=45).step_by(5) {
            for p in [850.0, 950.0, 1013.25, 1100.0] {
                let mut prev = -1.0;
                for rh in 0..=100 {
                    let w = humidity_ratio(t as f64, rh as f64, p).unwrap();
                    assert!(w > prev, "t={t} p={p} rh={rh}");
                    prev = w;
                }
            }
        }
    }
}
