//! Exhaustive grid search over PLR vectors.

use serde::{Deserialize, Serialize};

use super::chiller::{eval_cubic, ChillerSpec};
use super::{check_load, DispatchSolution, PlantConfig, SUPPLY_EPS};
use crate::error::{Error, Result};

pub const DEFAULT_GRID_STEP: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlrGrid {
    pub step: f64,
}

impl Default for PlrGrid {
    fn default() -> Self {
        Self { step: DEFAULT_GRID_STEP }
    }
}

impl PlrGrid {
    /// `{0} u {min_plr, min_plr + step, .., 1}` in ascending order.
    ///
    /// When `1/step` and `min_plr/step` are integers the points are formed as
    /// `integer / integer`, so `0.77` is the same double as the literal.
    pub fn values(&self, c: &ChillerSpec) -> Result<Vec<f64>> {
        let s = self.step;
        if !(s > 0.0 && s <= 1.0 - c.min_plr) {
            return Err(Error::InvalidConfig(format!("grid step {s} outside (0, 1 - min_plr]")));
        }
        let inv = 1.0 / s;
        let n = inv.round();
        let m0 = c.min_plr * n;
        let exact = (inv - n).abs() < 1e-9 && (m0 - m0.round()).abs() < 1e-9;
        let count = ((1.0 - c.min_plr) / s + 1e-9).floor() as usize + 1;
        let mut v = Vec::with_capacity(count + 2);
        v.push(0.0);
        for k in 0..count {
            let x = if exact {
                (m0.round() + k as f64) / n
            } else {
                c.min_plr + k as f64 * s
            };
            v.push(x.min(1.0));
        }
        if *v.last().unwrap() < 1.0 {
            v.push(1.0);
        }
        Ok(v)
    }
}

struct Search {
    load: f64,
    caps: Vec<f64>,
    vals: Vec<Vec<f64>>,
    powers: Vec<Vec<f64>>,
    /// Chiller `c` must not use a lower index than `c - 1`.
    tied: Vec<bool>,
    /// Capacity of chillers `c..`.
    rest_cap: Vec<f64>,
    /// `(min power over indices k.., smallest such index)` for the last chiller.
    last_suffix: Vec<(f64, usize)>,
    idx: Vec<usize>,
    best: Option<(f64, Vec<usize>)>,
}

impl Search {
    fn run(&mut self, c: usize, supplied: f64, power: f64) {
        let n = self.caps.len();
        if supplied + self.rest_cap[c] < self.load - SUPPLY_EPS {
            return;
        }
        let lower = if self.tied[c] { self.idx[c - 1] } else { 0 };
        if c == n - 1 {
            let need = self.load - supplied;
            let vals = &self.vals[c];
            let first = vals.partition_point(|&v| v * self.caps[c] < need - SUPPLY_EPS);
            let start = first.max(lower);
            if start >= vals.len() {
                return;
            }
            let (p_last, k) = self.last_suffix[start];
            let total = power + p_last;
            if self.best.as_ref().is_none_or(|(b, _)| total < *b) {
                self.idx[c] = k;
                self.best = Some((total, self.idx.clone()));
            }
            return;
        }
        for k in lower..self.vals[c].len() {
            self.idx[c] = k;
            let s = supplied + self.vals[c][k] * self.caps[c];
            let p = power + self.powers[c][k];
            self.run(c + 1, s, p);
        }
    }
}

/// Minimum-power PLR vector over the grid. Identical adjacent chillers are
/// enumerated with non-decreasing grid indices; ties keep the
/// lexicographically smallest vector.
pub fn optimize_dispatch_bruteforce(plant: &PlantConfig, load: f64, grid: PlrGrid) -> Result<DispatchSolution> {
    check_load(load)?;
    plant.validate()?;
    if load > plant.total_capacity() + SUPPLY_EPS {
        return Ok(plant.infeasible(load));
    }
    let n = plant.len();
    let vals: Vec<Vec<f64>> = plant.chillers.iter().map(|c| grid.values(c)).collect::<Result<_>>()?;
    let powers: Vec<Vec<f64>> = plant
        .chillers
        .iter()
        .zip(&vals)
        .map(|(c, v)| v.iter().map(|&x| if x == 0.0 { 0.0 } else { eval_cubic(&c.coeffs, x) }).collect())
        .collect();
    let mut rest_cap = vec![0.0; n + 1];
    for c in (0..n).rev() {
        rest_cap[c] = rest_cap[c + 1] + plant.chillers[c].capacity;
    }
    let tied = (0..n)
        .map(|c| c > 0 && plant.chillers[c].same_model(&plant.chillers[c - 1]))
        .collect();
    let last = &powers[n - 1];
    let mut last_suffix = vec![(f64::INFINITY, 0); last.len()];
    let mut acc = (f64::INFINITY, last.len());
    for k in (0..last.len()).rev() {
        if last[k] <= acc.0 {
            acc = (last[k], k);
        }
        last_suffix[k] = acc;
    }
    let mut s = Search {
        load,
        caps: plant.chillers.iter().map(|c| c.capacity).collect(),
        vals,
        powers,
        tied,
        rest_cap,
        last_suffix,
        idx: vec![0; n],
        best: None,
    };
    s.run(0, 0.0, 0.0);
    let (_, idx) = s
        .best
        .ok_or_else(|| Error::Infeasible(format!("no grid point covers {load} RT")))?;
    let plr = idx.iter().enumerate().map(|(c, &k)| s.vals[c][k]).collect();
    plant.solution(load, plr)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_values_are_literal_decimals() {
        let c = ChillerSpec::default_1000rt("c");
        let v = PlrGrid::default().values(&c).unwrap();
        assert_eq!(v.len(), 72);
        assert_eq!(v[0], 0.0);
        assert_eq!(v[1], 0.3);
        assert_eq!(v[48], 0.77);
        assert_eq!(*v.last().unwrap(), 1.0);
        let coarse = PlrGrid { step: 0.3 }.values(&c).unwrap();
        let want = [0.0, 0.3, 0.6, 0.9, 1.0];
        assert_eq!(coarse.len(), want.len());
        assert!(coarse.iter().zip(want).all(|(a, b)| (a - b).abs() < 1e-12));
    }

    #[test]
    fn zero_load_turns_everything_off() {
        let p = PlantConfig::default();
        let s = optimize_dispatch_bruteforce(&p, 0.0, PlrGrid::default()).unwrap();
        assert_eq!(s.plr, vec![0.0; 4]);
        assert_eq!(s.total_power, 0.0);
        assert!(s.feasible);
    }

    #[test]
    fn overload_is_flagged() {
        let p = PlantConfig::default();
        let s = optimize_dispatch_bruteforce(&p, 3600.0, PlrGrid::default()).unwrap();
        assert!(!s.feasible);
        assert!(optimize_dispatch_bruteforce(&p, -1.0, PlrGrid::default()).is_err());
    }

    /// Full enumeration without canonicalisation or pruning.
    fn naive(p: &PlantConfig, load: f64, grid: PlrGrid) -> f64 {
        let vals: Vec<Vec<f64>> = p.chillers.iter().map(|c| grid.values(c).unwrap()).collect();
        let mut best = f64::INFINITY;
        let mut idx = vec![0usize; p.len()];
        loop {
            let plr: Vec<f64> = idx.iter().enumerate().map(|(c, &k)| vals[c][k]).collect();
            if p.supplied(&plr) >= load - SUPPLY_EPS {
                best = best.min(p.total_power(&plr).unwrap());
            }
            let mut c = 0;
            loop {
                if c == p.len() {
                    return best;
                }
                idx[c] += 1;
                if idx[c] < vals[c].len() {
                    break;
                }
                idx[c] = 0;
                c += 1;
            }
        }
    }

    #[test]
    fn matches_naive_enumeration_on_coarse_grid() {
        let p = PlantConfig::default();
        let grid = PlrGrid { step: 0.05 };
        for load in [0.0, 150.0, 640.0, 1333.0, 2267.2, 2900.0, 3499.0] {
            let s = optimize_dispatch_bruteforce(&p, load, grid).unwrap();
            let n = naive(&p, load, grid);
            assert!((s.total_power - n).abs() < 1e-9, "{load}: {} vs {n}", s.total_power);
            super::super::validate_solution(&p, &s).unwrap();
        }
    }

    #[test]
    fn single_chiller_half_load() {
        let p = PlantConfig::new(vec![ChillerSpec::default_1000rt("c")]).unwrap();
        let s = optimize_dispatch_bruteforce(&p, 500.0, PlrGrid::default()).unwrap();
        assert_eq!(s.plr, vec![0.5]);
    }

    #[test]
    fn identical_chillers_come_back_sorted() {
        let p = PlantConfig::default();
        let s = optimize_dispatch_bruteforce(&p, 2267.2, PlrGrid::default()).unwrap();
        assert!(s.plr[0] <= s.plr[1] && s.plr[1] <= s.plr[2]);
        assert_eq!(s.plr[3], 0.0);
        assert!(s.plr[..3].iter().all(|v| *v > 0.0));
    }
}
