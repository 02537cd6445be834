//! Lloyd's K-means with random distinct-point initialisation and restarts.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::scaler::{zscore_fit, ScalerParams};
use crate::error::{Error, Result};
use crate::ingest::WeatherSample;
use crate::rng::rng_for;

/// Weather variables that are clustered, in order.
pub const CLUSTER_FEATURES: [&str; 3] = ["dry_bulb", "humidity_ratio", "wind_speed"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KMeansConfig {
    pub k: usize,
    pub seed: u64,
    pub max_iter: usize,
    /// Stop when no centroid moves farther than this.
    pub tol: f64,
    pub restarts: usize,
}

impl KMeansConfig {
    pub fn new(k: usize, seed: u64) -> Self {
        Self {
            k,
            seed,
            max_iter: 300,
            tol: 1e-9,
            restarts: 10,
        }
    }
}

/// Result of one converged K-means fit.
#[derive(Debug, Clone, PartialEq)]
pub struct KMeansFit {
    pub centroids: Vec<Vec<f64>>,
    /// Nearest-centroid label of every input point.
    pub labels: Vec<usize>,
    pub inertia: f64,
    /// Inertia after each assignment step of the selected restart.
    pub inertia_trace: Vec<f64>,
    pub iterations: usize,
    pub restart: usize,
}

pub fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Nearest centroid by squared Euclidean distance; ties go to the lowest index.
pub fn kmeans_assign(centroids: &[Vec<f64>], point: &[f64]) -> Result<usize> {
    let Some(first) = centroids.first() else {
        return Err(Error::InvalidConfig("no centroids".into()));
    };
    if point.len() != first.len() {
        return Err(Error::DimensionMismatch {
            expected: first.len(),
            got: point.len(),
        });
    }
    Ok(nearest(centroids, point).0)
}

fn nearest(centroids: &[Vec<f64>], point: &[f64]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (j, c) in centroids.iter().enumerate() {
        let d = squared_distance(c, point);
        if d < best.1 {
            best = (j, d);
        }
    }
    best
}

pub fn inertia(points: &[Vec<f64>], centroids: &[Vec<f64>], labels: &[usize]) -> f64 {
    points
        .iter()
        .zip(labels)
        .map(|(p, &l)| squared_distance(p, &centroids[l]))
        .sum()
}

fn canonical_bits(p: &[f64]) -> Vec<u64> {
    // -0.0 and 0.0 are the same point
    p.iter().map(|v| (v + 0.0).to_bits()).collect()
}

fn distinct_count(points: &[Vec<f64>]) -> usize {
    let mut keys: Vec<Vec<u64>> = points.iter().map(|p| canonical_bits(p)).collect();
    keys.sort_unstable();
    keys.dedup();
    keys.len()
}

pub fn kmeans_fit(points: &[Vec<f64>], cfg: &KMeansConfig) -> Result<KMeansFit> {
    if cfg.k == 0 || cfg.restarts == 0 {
        return Err(Error::InvalidConfig("kmeans requires k >= 1 and restarts >= 1".into()));
    }
    let Some(first) = points.first() else {
        return Err(Error::InsufficientData("kmeans on empty point set".into()));
    };
    let dim = first.len();
    if let Some(p) = points.iter().find(|p| p.len() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: p.len(),
        });
    }
    if points.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::Parse("kmeans input contains non-finite values".into()));
    }
    let distinct = distinct_count(points);
    if cfg.k > distinct {
        return Err(Error::InsufficientData(format!(
            "k = {} exceeds {} distinct points",
            cfg.k, distinct
        )));
    }

    let mut best: Option<KMeansFit> = None;
    for restart in 0..cfg.restarts {
        let fit = lloyd(points, cfg, restart);
        // strict comparison keeps the lowest restart index on ties
        if best.as_ref().is_none_or(|b| fit.inertia < b.inertia) {
            best = Some(fit);
        }
    }
    Ok(best.unwrap())
}

fn init_centroids(points: &[Vec<f64>], k: usize, seed: u64, restart: usize) -> Vec<Vec<f64>> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.shuffle(&mut rng_for(seed, restart as u64));
    let mut chosen: Vec<Vec<f64>> = Vec::with_capacity(k);
    let mut keys: Vec<Vec<u64>> = Vec::with_capacity(k);
    for i in order {
        let key = canonical_bits(&points[i]);
        if !keys.contains(&key) {
            keys.push(key);
            chosen.push(points[i].clone());
            if chosen.len() == k {
                break;
            }
        }
    }
    chosen
}

fn assign_all(points: &[Vec<f64>], centroids: &[Vec<f64>]) -> (Vec<usize>, Vec<f64>) {
    points.iter().map(|p| nearest(centroids, p)).unzip()
}

fn lloyd(points: &[Vec<f64>], cfg: &KMeansConfig, restart: usize) -> KMeansFit {
    let dim = points[0].len();
    let mut centroids = init_centroids(points, cfg.k, cfg.seed, restart);
    let mut trace = Vec::new();
    let mut iterations = 0;

    while iterations < cfg.max_iter {
        let (labels, dists) = assign_all(points, &centroids);
        trace.push(dists.iter().sum());
        iterations += 1;

        let mut sums = vec![vec![0.0; dim]; cfg.k];
        let mut counts = vec![0usize; cfg.k];
        for (p, &l) in points.iter().zip(&labels) {
            counts[l] += 1;
            for (s, v) in sums[l].iter_mut().zip(p) {
                *s += v;
            }
        }
        let mut next: Vec<Vec<f64>> = sums
            .into_iter()
            .zip(&counts)
            .map(|(s, &n)| s.into_iter().map(|v| v / n.max(1) as f64).collect())
            .collect();

        // empty clusters take the point farthest from its own centroid
        let mut taken: Vec<usize> = Vec::new();
        for j in (0..cfg.k).filter(|&j| counts[j] == 0) {
            let far = (0..points.len())
                .filter(|i| !taken.contains(i))
                .fold(None::<(usize, f64)>, |acc, i| match acc {
                    Some((_, d)) if dists[i] <= d => acc,
                    _ => Some((i, dists[i])),
                });
            if let Some((i, _)) = far {
                taken.push(i);
                next[j] = points[i].clone();
            }
        }

        let shift = centroids
            .iter()
            .zip(&next)
            .map(|(a, b)| squared_distance(a, b).sqrt())
            .fold(0.0, f64::max);
        centroids = next;
        if shift < cfg.tol {
            break;
        }
    }

    let (labels, dists) = assign_all(points, &centroids);
    let inertia: f64 = dists.iter().sum();
    trace.push(inertia);
    KMeansFit {
        centroids,
        labels,
        inertia,
        inertia_trace: trace,
        iterations,
        restart,
    }
}

/// Weather clusters over z-scored (dry bulb, humidity ratio, wind speed).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterModel {
    pub k: usize,
    pub centroids: Vec<Vec<f64>>,
    pub scaler: ScalerParams,
    pub inertia: f64,
}

impl ClusterModel {
    pub fn weather_point(w: &WeatherSample) -> Result<[f64; 3]> {
        Ok([w.dry_bulb, w.humidity_ratio()?, w.wind_speed])
    }

    /// Fits the scaler and clusters on the given weather samples.
    pub fn fit_weather(weather: &[WeatherSample], cfg: &KMeansConfig) -> Result<ClusterModel> {
        let raw: Vec<[f64; 3]> = weather.iter().map(Self::weather_point).collect::<Result<_>>()?;
        let columns: Vec<Vec<f64>> = (0..3).map(|j| raw.iter().map(|p| p[j]).collect()).collect();
        let scaler = zscore_fit(&columns)?;
        let points: Vec<Vec<f64>> = raw.iter().map(|p| scaler.apply_row(p)).collect();
        let fit = kmeans_fit(&points, cfg)?;
        Ok(ClusterModel {
            k: cfg.k,
            centroids: fit.centroids,
            scaler,
            inertia: fit.inertia,
        })
    }

    pub fn assign_weather(&self, w: &WeatherSample) -> Result<usize> {
        let z = self.scaler.apply_row(&Self::weather_point(w)?);
        kmeans_assign(&self.centroids, &z)
    }
}
