//! Genetic-algorithm loading optimiser.
//!
//! Genome: one `(on, plr)` pair per chiller with `plr in [min_plr, 1]`.
//! A genome is evaluated at its operating point: the PLRs of its running
//! chillers scaled by a common factor until supply meets the load. Fitness
//! (minimised) is total power; an individual whose running set cannot cover
//! the load, falling short by `v` RT, additionally pays `P_max + penalty * v^2`, where `P_max` bounds the
//! power of any feasible vector, so every feasible individual ranks above
//! every infeasible one.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::chiller::eval_cubic;
use super::{check_load, DispatchSolution, PlantConfig, SUPPLY_EPS};
use crate::error::{Error, Result};
use crate::rng::rng_for;

const GA_STREAM: u64 = 0x6a;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GaConfig {
    pub population: usize,
    pub generations: usize,
    pub crossover_rate: f64,
    pub mutation_rate: f64,
    /// Standard deviation of PLR mutations.
    pub mutation_sigma: f64,
    pub elitism: usize,
    /// Relative mean improvement of the best fitness over the stall window.
    pub function_tolerance: f64,
    pub stall_generations: usize,
    /// Largest supply deficit, RT, still counted as converged.
    pub constraint_tolerance: f64,
    /// kW per RT^2 of deficit.
    pub penalty: f64,
    pub seed: u64,
}

impl Default for GaConfig {
    fn default() -> Self {
        Self {
            population: 80,
            generations: 200,
            crossover_rate: 0.8,
            mutation_rate: 0.1,
            mutation_sigma: 0.05,
            elitism: 2,
            function_tolerance: 1e-6,
            stall_generations: 30,
            constraint_tolerance: 1.0,
            penalty: 10.0,
            seed: 0,
        }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(format!("ga: {m}")));
        if self.population < 2 {
            return bad("population must be >= 2");
        }
        if self.generations == 0 || self.stall_generations == 0 {
            return bad("generations and stall window must be >= 1");
        }
        for r in [self.crossover_rate, self.mutation_rate] {
            if !(0.0..=1.0).contains(&r) {
                return bad("rates must lie in [0, 1]");
            }
        }
        if self.elitism >= self.population {
            return bad("elitism must be smaller than the population");
        }
        if !(self.mutation_sigma > 0.0) || !(self.function_tolerance >= 0.0) || !(self.constraint_tolerance >= 0.0) || !(self.penalty > 0.0) {
            return bad("sigma and penalty must be positive, tolerances non-negative");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
struct Genome {
    on: Vec<bool>,
    plr: Vec<f64>,
}

impl Genome {
    fn decode(&self) -> Vec<f64> {
        self.on.iter().zip(&self.plr).map(|(&o, &p)| if o { p } else { 0.0 }).collect()
    }
}

struct Problem<'a> {
    plant: &'a PlantConfig,
    load: f64,
    max_feasible_power: f64,
    penalty: f64,
}

impl Problem<'_> {
    fn deficit(&self, plr: &[f64]) -> f64 {
        (self.load - self.plant.supplied(plr)).max(0.0)
    }

    fn power(&self, plr: &[f64]) -> f64 {
        self.plant
            .chillers
            .iter()
            .zip(plr)
            .map(|(c, &p)| if p == 0.0 { 0.0 } else { eval_cubic(&c.coeffs, p) })
            .sum()
    }

    /// Operating point of a genome: its running set fitted to the load.
    fn phenotype(&self, g: &Genome) -> Vec<f64> {
        let mut plr = g.decode();
        fit_to_load(self.plant, self.load, &mut plr);
        plr
    }

    fn fitness(&self, g: &Genome) -> f64 {
        let plr = self.phenotype(g);
        let v = self.deficit(&plr);
        let p = self.power(&plr);
        if v > SUPPLY_EPS {
            p + self.max_feasible_power + self.penalty * v * v
        } else {
            p
        }
    }
}

/// Raises PLRs until the load is covered: running chillers first, scaled
/// towards full load, then idle chillers in index order.
fn repair(plant: &PlantConfig, load: f64, plr: &mut [f64]) {
    for c in 0..plr.len() {
        let short = load - plant.supplied(plr);
        if short <= SUPPLY_EPS {
            return;
        }
        if plr[c] > 0.0 {
            plr[c] = (plr[c] + short / plant.chillers[c].capacity).min(1.0);
        }
    }
    for c in 0..plr.len() {
        let short = load - plant.supplied(plr);
        if short <= SUPPLY_EPS {
            return;
        }
        if plr[c] == 0.0 {
            let ch = &plant.chillers[c];
            plr[c] = (short / ch.capacity).clamp(ch.min_plr, 1.0);
        }
    }
}

/// Scales running chillers by a common factor, each clamped to
/// `[min_plr, 1]`, to the smallest supply that covers the load. Idle chillers
/// stay idle; if the running set cannot cover the load it runs flat out.
fn fit_to_load(plant: &PlantConfig, load: f64, plr: &mut [f64]) {
    let scaled = |a: f64| -> Vec<f64> {
        plr.iter()
            .zip(&plant.chillers)
            .map(|(&p, c)| if p == 0.0 { 0.0 } else { (a * p).clamp(c.min_plr, 1.0) })
            .collect()
    };
    let lowest = scaled(0.0);
    if plant.supplied(&lowest) >= load {
        plr.copy_from_slice(&lowest);
        return;
    }
    let min_ratio = plr.iter().filter(|p| **p > 0.0).fold(f64::INFINITY, |m, p| m.min(*p));
    if !min_ratio.is_finite() {
        return;
    }
    let (mut lo, mut hi) = (0.0, 1.0 / min_ratio);
    if plant.supplied(&scaled(hi)) < load {
        plr.copy_from_slice(&scaled(hi));
        return;
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if plant.supplied(&scaled(mid)) >= load {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    plr.copy_from_slice(&scaled(hi));
}

fn roulette<R: Rng>(fit: &[f64], rng: &mut R) -> usize {
    let max = fit.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = fit.iter().cloned().fold(f64::INFINITY, f64::min);
    let shift = 1e-9 * (max - min) + 1e-12;
    let total: f64 = fit.iter().map(|f| max - f + shift).sum();
    let mut r = rng.random_range(0.0..total);
    for (i, f) in fit.iter().enumerate() {
        r -= max - f + shift;
        if r < 0.0 {
            return i;
        }
    }
    fit.len() - 1
}

pub fn optimize_dispatch_ga(plant: &PlantConfig, load: f64, cfg: &GaConfig) -> Result<DispatchSolution> {
    check_load(load)?;
    plant.validate()?;
    cfg.validate()?;
    if load > plant.total_capacity() + SUPPLY_EPS {
        return Ok(plant.infeasible(load));
    }
    let n = plant.len();
    let problem = Problem {
        plant,
        load,
        max_feasible_power: plant.chillers.iter().map(|c| c.max_power()).sum::<f64>() + 1.0,
        penalty: cfg.penalty,
    };
    let mut rng = rng_for(cfg.seed, GA_STREAM);
    let gauss = Normal::new(0.0, cfg.mutation_sigma).map_err(|e| Error::InvalidConfig(e.to_string()))?;
    let lo: Vec<f64> = plant.chillers.iter().map(|c| c.min_plr).collect();

    let mut pop: Vec<Genome> = (0..cfg.population)
        .map(|_| Genome {
            on: (0..n).map(|_| rng.random_bool(0.5)).collect(),
            plr: lo.iter().map(|&l| rng.random_range(l..=1.0)).collect(),
        })
        .collect();
    let mut fit: Vec<f64> = pop.iter().map(|g| problem.fitness(g)).collect();
    let mut best_hist = vec![fit.iter().cloned().fold(f64::INFINITY, f64::min)];

    for _ in 0..cfg.generations {
        let mut order: Vec<usize> = (0..pop.len()).collect();
        order.sort_by(|&a, &b| fit[a].total_cmp(&fit[b]));
        let mut next: Vec<Genome> = order[..cfg.elitism].iter().map(|&i| pop[i].clone()).collect();
        while next.len() < cfg.population {
            let mut a = pop[roulette(&fit, &mut rng)].clone();
            let mut b = pop[roulette(&fit, &mut rng)].clone();
            if n > 1 && rng.random_bool(cfg.crossover_rate) {
                let cut = rng.random_range(1..n);
                for c in cut..n {
                    std::mem::swap(&mut a.on[c], &mut b.on[c]);
                    std::mem::swap(&mut a.plr[c], &mut b.plr[c]);
                }
            }
            for child in [&mut a, &mut b] {
                for c in 0..n {
                    if rng.random_bool(cfg.mutation_rate) {
                        child.on[c] = !child.on[c];
                    }
                    if rng.random_bool(cfg.mutation_rate) {
                        child.plr[c] = (child.plr[c] + gauss.sample(&mut rng)).clamp(lo[c], 1.0);
                    }
                }
            }
            next.push(a);
            if next.len() < cfg.population {
                next.push(b);
            }
        }
        pop = next;
        fit = pop.iter().map(|g| problem.fitness(g)).collect();
        let best = fit.iter().cloned().fold(f64::INFINITY, f64::min);
        best_hist.push(best);
        let w = cfg.stall_generations;
        if best_hist.len() > w {
            let old = best_hist[best_hist.len() - 1 - w];
            let mean_change = (old - best) / w as f64;
            let best_g = &pop[fit.iter().position(|f| *f == best).unwrap()];
            let v = problem.deficit(&problem.phenotype(best_g));
            if mean_change <= cfg.function_tolerance * best.abs().max(1.0) && v < cfg.constraint_tolerance {
                break;
            }
        }
    }

    let best_i = (0..pop.len()).min_by(|&a, &b| fit[a].total_cmp(&fit[b])).unwrap();
    let mut plr = problem.phenotype(&pop[best_i]);
    if problem.deficit(&plr) > SUPPLY_EPS {
        repair(plant, load, &mut plr);
        fit_to_load(plant, load, &mut plr);
    }
    plant.solution(load, plr)
}
