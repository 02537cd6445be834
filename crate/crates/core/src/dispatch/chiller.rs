//! Chiller part-load curves.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Allowed gap between tabulated power and `efficiency * plr * capacity`.
pub const TABLE_CONSISTENCY_KW: f64 = 1.5;
pub const DEFAULT_MIN_PLR: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PartLoadRow {
    pub plr: f64,
    /// kW/RT.
    pub efficiency: f64,
    /// kW.
    pub power: f64,
}

const fn row(plr: f64, efficiency: f64, power: f64) -> PartLoadRow {
    PartLoadRow { plr, efficiency, power }
}

/// Manufacturer part-load data of the 1000 RT machine.
pub const TABLE_1000RT: [PartLoadRow; 9] = [
    row(0.2, 0.767, 153.0),
    row(0.3, 0.632, 190.0),
    row(0.4, 0.557, 223.0),
    row(0.5, 0.514, 257.0),
    row(0.6, 0.491, 295.0),
    row(0.7, 0.475, 333.0),
    row(0.8, 0.467, 374.0),
    row(0.9, 0.465, 419.0),
    row(1.0, 0.483, 483.0),
];

/// Manufacturer part-load data of the 500 RT machine.
pub const TABLE_500RT: [PartLoadRow; 9] = [
    row(0.2, 0.822, 82.0),
    row(0.3, 0.686, 103.0),
    row(0.4, 0.612, 122.0),
    row(0.5, 0.564, 141.0),
    row(0.6, 0.536, 161.0),
    row(0.7, 0.516, 181.0),
    row(0.8, 0.500, 200.0),
    row(0.9, 0.495, 223.0),
    row(1.0, 0.498, 249.0),
];

/// Cubic `a + b x + c x^2 + d x^3` fitted by least squares.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerFit {
    pub coeffs: [f64; 4],
    /// `fitted - tabulated`, kW, one per row.
    pub residuals: Vec<f64>,
}

impl PowerFit {
    pub fn max_rel_residual(&self, table: &[PartLoadRow]) -> f64 {
        self.residuals
            .iter()
            .zip(table)
            .map(|(r, t)| (r / t.power).abs())
            .fold(0.0, f64::max)
    }
}

pub fn eval_cubic(c: &[f64; 4], x: f64) -> f64 {
    c[0] + x * (c[1] + x * (c[2] + x * c[3]))
}

pub fn fit_power_curve(rows: &[PartLoadRow]) -> Result<PowerFit> {
    if rows.len() < 4 {
        return Err(Error::RankDeficient(format!("{} rows cannot determine a cubic", rows.len())));
    }
    let mut xs: Vec<f64> = rows.iter().map(|r| r.plr).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    if xs.len() < 4 {
        return Err(Error::RankDeficient(format!("only {} distinct part load ratios", xs.len())));
    }
    let a = DMatrix::from_fn(rows.len(), 4, |i, j| rows[i].plr.powi(j as i32));
    let b = DVector::from_iterator(rows.len(), rows.iter().map(|r| r.power));
    let sol = a
        .svd(true, true)
        .solve(&b, 1e-12)
        .map_err(|e| Error::RankDeficient(e.to_string()))?;
    let coeffs = [sol[0], sol[1], sol[2], sol[3]];
    if !coeffs.iter().all(|v| v.is_finite()) {
        return Err(Error::RankDeficient("non-finite coefficients".into()));
    }
    let residuals = rows.iter().map(|r| eval_cubic(&coeffs, r.plr) - r.power).collect();
    Ok(PowerFit { coeffs, residuals })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PowerMode {
    /// `plr` must be `0` or within `[min_plr, 1]`.
    Strict,
    /// Any non-negative `plr`; used while scoring infeasible candidates.
    Penalty,
}

/// Tolerance on the PLR bounds for values produced by arithmetic.
pub const PLR_EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChillerSpec {
    pub id: String,
    /// RT.
    pub capacity: f64,
    pub table: Vec<PartLoadRow>,
    pub coeffs: [f64; 4],
    pub min_plr: f64,
}

impl ChillerSpec {
    /// Validates the table and fits the power curve.
    pub fn from_table(id: impl Into<String>, capacity: f64, table: Vec<PartLoadRow>, min_plr: f64) -> Result<Self> {
        let id = id.into();
        let fit = fit_power_curve(&table)?;
        let spec = Self {
            id,
            capacity,
            table,
            coeffs: fit.coeffs,
            min_plr,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn default_1000rt(id: impl Into<String>) -> Self {
        Self::from_table(id, 1000.0, TABLE_1000RT.to_vec(), DEFAULT_MIN_PLR).expect("shipped table is valid")
    }

    pub fn default_500rt(id: impl Into<String>) -> Self {
        Self::from_table(id, 500.0, TABLE_500RT.to_vec(), DEFAULT_MIN_PLR).expect("shipped table is valid")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(format!("chiller {}: {m}", self.id)));
        if !(self.capacity > 0.0 && self.capacity.is_finite()) {
            return bad("capacity must be positive".into());
        }
        if !(self.min_plr > 0.0 && self.min_plr < 1.0) {
            return bad(format!("min_plr {} outside (0, 1)", self.min_plr));
        }
        for w in self.table.windows(2) {
            if !(w[1].plr > w[0].plr) {
                return bad("table PLR must be strictly increasing".into());
            }
        }
        for r in &self.table {
            if !(0.2..=1.0).contains(&r.plr) {
                return bad(format!("table PLR {} outside [0.2, 1]", r.plr));
            }
            let gap = (r.power - r.efficiency * r.plr * self.capacity).abs();
            if gap > TABLE_CONSISTENCY_KW {
                return bad(format!("row at PLR {}: power and efficiency disagree by {gap:.3} kW", r.plr));
            }
        }
        let lo = self.min_power_on_range();
        if !(lo > 0.0) {
            return bad(format!("fitted power not positive on [min_plr, 1] (minimum {lo})"));
        }
        Ok(())
    }

    /// Exact minimum of the cubic over `[min_plr, 1]`.
    pub fn min_power_on_range(&self) -> f64 {
        let c = &self.coeffs;
        let mut cands = vec![self.min_plr, 1.0];
        // roots of b + 2c x + 3d x^2
        let (qa, qb, qc) = (3.0 * c[3], 2.0 * c[2], c[1]);
        if qa.abs() > 1e-15 {
            let disc = qb * qb - 4.0 * qa * qc;
            if disc >= 0.0 {
                let s = disc.sqrt();
                cands.push((-qb + s) / (2.0 * qa));
                cands.push((-qb - s) / (2.0 * qa));
            }
        } else if qb.abs() > 1e-15 {
            cands.push(-qc / qb);
        }
        cands
            .into_iter()
            .filter(|x| (self.min_plr..=1.0).contains(x))
            .map(|x| eval_cubic(c, x))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn max_power(&self) -> f64 {
        let n = 1000;
        (0..=n)
            .map(|k| eval_cubic(&self.coeffs, self.min_plr + (1.0 - self.min_plr) * k as f64 / n as f64))
            .fold(0.0, f64::max)
    }

    pub fn check_plr(&self, plr: f64) -> Result<()> {
        if plr == 0.0 || (plr >= self.min_plr - PLR_EPS && plr <= 1.0 + PLR_EPS) {
            Ok(())
        } else {
            Err(Error::InvalidPlr {
                chiller: self.id.clone(),
                plr,
            })
        }
    }

    /// Fitted efficiency, kW/RT.
    pub fn efficiency(&self, plr: f64) -> f64 {
        eval_cubic(&self.coeffs, plr) / (plr * self.capacity)
    }

    /// PLR of minimum kW/RT on `[min_plr, 1]`, to 1e-5.
    pub fn max_efficiency_plr(&self) -> f64 {
        let n = ((1.0 - self.min_plr) / 1e-5).round() as usize;
        let mut best = (f64::INFINITY, 1.0);
        for k in 0..=n {
            let x = self.min_plr + (1.0 - self.min_plr) * k as f64 / n as f64;
            let e = self.efficiency(x);
            if e < best.0 {
                best = (e, x);
            }
        }
        best.1
    }

    /// Curves are interchangeable for canonicalisation purposes.
    pub fn same_model(&self, o: &ChillerSpec) -> bool {
        self.capacity == o.capacity && self.coeffs == o.coeffs && self.min_plr == o.min_plr
    }
}

pub fn chiller_power(spec: &ChillerSpec, plr: f64, mode: PowerMode) -> Result<f64> {
    if plr < 0.0 || plr.is_nan() {
        return Err(Error::InvalidPlr {
            chiller: spec.id.clone(),
            plr,
        });
    }
    if mode == PowerMode::Strict {
        spec.check_plr(plr)?;
    }
    if plr == 0.0 {
        return Ok(0.0);
    }
    Ok(eval_cubic(&spec.coeffs, plr))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Normal equations with hand Gaussian elimination.
    fn lsq_oracle(rows: &[PartLoadRow]) -> [f64; 4] {
        let mut m = [[0.0f64; 5]; 4];
        for r in rows {
            let p = [1.0, r.plr, r.plr * r.plr, r.plr.powi(3)];
            for i in 0..4 {
                for j in 0..4 {
                    m[i][j] += p[i] * p[j];
                }
                m[i][4] += p[i] * r.power;
            }
        }
        for col in 0..4 {
            let piv = (col..4).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs())).unwrap();
            m.swap(col, piv);
            for r in 0..4 {
                if r != col {
                    let f = m[r][col] / m[col][col];
                    for c in col..5 {
                        m[r][c] -= f * m[col][c];
                    }
                }
            }
        }
        [m[0][4] / m[0][0], m[1][4] / m[1][1], m[2][4] / m[2][2], m[3][4] / m[3][3]]
    }

    #[test]
    fn exact_cubic_recovered() {
        let c = [12.0, -3.5, 40.0, 7.25];
        let rows: Vec<PartLoadRow> = (0..7)
            .map(|k| {
                let x = 0.2 + 0.1 * k as f64;
                row(x, 0.0, eval_cubic(&c, x))
            })
            .collect();
        let fit = fit_power_curve(&rows).unwrap();
        for (a, b) in fit.coeffs.iter().zip(&c) {
            assert!((a - b).abs() < 1e-8, "{a} vs {b}");
        }
    }

    #[test]
    fn fit_agrees_with_normal_equation_oracle() {
        for t in [&TABLE_1000RT, &TABLE_500RT] {
            let fit = fit_power_curve(t).unwrap();
            let oracle = lsq_oracle(t);
            for (a, b) in fit.coeffs.iter().zip(&oracle) {
                assert!((a - b).abs() < 1e-6 * b.abs().max(1.0), "{a} vs {b}");
            }
        }
    }

    #[test]
    fn table_residuals_within_two_percent() {
        // oracle bounds: 0.974 % (1000 RT), 0.552 % (500 RT)
        let r1 = fit_power_curve(&TABLE_1000RT).unwrap().max_rel_residual(&TABLE_1000RT);
        let r2 = fit_power_curve(&TABLE_500RT).unwrap().max_rel_residual(&TABLE_500RT);
        assert!((r1 - 0.00974).abs() < 5e-5, "{r1}");
        assert!((r2 - 0.00552).abs() < 5e-5, "{r2}");
        assert!(r1 < 0.02 && r2 < 0.02);
    }

    #[test]
    fn duplicate_plrs_are_rank_deficient() {
        let rows = vec![row(0.5, 0.5, 250.0); 5];
        assert!(matches!(fit_power_curve(&rows), Err(Error::RankDeficient(_))));
        assert!(fit_power_curve(&TABLE_1000RT[..3]).is_err());
    }

    #[test]
    fn power_examples() {
        let big = ChillerSpec::default_1000rt("c1");
        let small = ChillerSpec::default_500rt("c4");
        assert_eq!(chiller_power(&big, 0.0, PowerMode::Strict).unwrap(), 0.0);
        let p08 = chiller_power(&big, 0.8, PowerMode::Strict).unwrap();
        assert!((p08 - 374.0).abs() / 374.0 < 0.02, "{p08}");
        let p1 = chiller_power(&small, 1.0, PowerMode::Strict).unwrap();
        assert!((p1 - 249.0).abs() / 249.0 < 0.02, "{p1}");
        assert!(chiller_power(&big, 0.2, PowerMode::Strict).is_err());
        assert!(chiller_power(&big, 0.2, PowerMode::Penalty).is_ok());
        assert!(chiller_power(&big, -0.1, PowerMode::Penalty).is_err());
    }

    #[test]
    fn big_chiller_at_sixty_beats_small_at_ninety() {
        let big = ChillerSpec::default_1000rt("c1");
        let small = ChillerSpec::default_500rt("c4");
        assert!(big.efficiency(0.6) < small.efficiency(0.9));
        assert!(TABLE_1000RT[4].efficiency < TABLE_500RT[7].efficiency);
    }

    #[test]
    fn table_consistency_rejects_bad_row() {
        let mut t = TABLE_1000RT.to_vec();
        t[3].power += 2.0;
        assert!(ChillerSpec::from_table("x", 1000.0, t, 0.3).is_err());
        let mut t = TABLE_500RT.to_vec();
        t.swap(1, 2);
        assert!(ChillerSpec::from_table("x", 500.0, t, 0.3).is_err());
    }

    #[test]
    fn max_efficiency_plr_values() {
        let big = ChillerSpec::default_1000rt("c1").max_efficiency_plr();
        let small = ChillerSpec::default_500rt("c4").max_efficiency_plr();
        assert!((big - 0.8144).abs() < 1e-3, "{big}");
        assert!((small - 0.9385).abs() < 1e-3, "{small}");
    }
}
