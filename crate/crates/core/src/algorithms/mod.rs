//! Clustering algorithms.
//!
//! Every iterative algorithm here is an instance of one alternating scheme
//! (see [`framework`]): update the category model from the partition, then
//! the partition from the model, until the partition stops changing, the
//! objective settles, or the iteration cap is hit.

use std::fmt;
use std::str::FromStr;

use ndarray::{Array2, ArrayView2};
use rand::seq::index::sample;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::categorization::ClusteringResult;
use crate::data::DataSet;
use crate::error::{Error, Result};
use crate::numeric::sq_dist;

pub mod framework;
mod linkage;
mod prototype;
mod weighted;

pub use framework::{run_framework, run_framework_observed, AlternatingScheme, Assignment, Start, Sweep};
pub use linkage::single_linkage;
pub use prototype::{c_means, cml_gaussian, fuzzy_c_means, CMeans, CmlGaussian, FuzzyCMeans};
pub use weighted::{
    sample_weighted_gaussian, sample_weighted_multinomial, SampleWeightedGaussian, SampleWeightedMultinomial,
};

/// How the first model or partition is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Init {
    /// First object drawn at random, each next one the object farthest from
    /// those already chosen.
    #[default]
    FarthestFirst,
    /// `c` distinct objects drawn uniformly.
    RandomObjects,
    /// Uniformly random labels, every cluster nonempty.
    RandomPartition,
}

impl FromStr for Init {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "farthest-first" | "farthest_first" => Ok(Init::FarthestFirst),
            "random-objects" | "random_objects" => Ok(Init::RandomObjects),
            "random-partition" | "random_partition" => Ok(Init::RandomPartition),
            other => Err(Error::Config(format!("unknown initialization `{other}`"))),
        }
    }
}

/// Settings shared by all algorithms. Parameters an algorithm does not use
/// are ignored.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlgoConfig {
    pub c: usize,
    pub max_iterations: usize,
    /// Stop once the objective moves by at most this much in one sweep.
    pub tolerance: f64,
    pub seed: u64,
    pub init: Init,
    /// Fuzzifier or sample-weighting exponent.
    pub m: f64,
    pub beta: f64,
    pub sigma: f64,
    pub kappa: f64,
}

impl AlgoConfig {
    pub fn new(c: usize) -> Self {
        AlgoConfig {
            c,
            max_iterations: 300,
            tolerance: 1e-9,
            seed: 0,
            init: Init::default(),
            m: 2.0,
            beta: 1.0,
            sigma: 1.0,
            kappa: 1.0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_m(mut self, m: f64) -> Self {
        self.m = m;
        self
    }

    pub fn with_beta(mut self, beta: f64) -> Self {
        self.beta = beta;
        self
    }

    pub fn with_init(mut self, init: Init) -> Self {
        self.init = init;
        self
    }

    /// Checks the settings every algorithm depends on.
    pub fn validate(&self, n: usize) -> Result<()> {
        if self.c == 0 || self.c > n {
            return Err(Error::Config(format!("c = {} must lie in [1, {n}]", self.c)));
        }
        if self.max_iterations == 0 {
            return Err(Error::Config("max_iterations must be at least 1".into()));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::Config(format!("tolerance must be positive, got {}", self.tolerance)));
        }
        Ok(())
    }
}

/// The algorithms available by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    SingleLinkage,
    CMeans,
    FuzzyCMeans,
    CmlGaussian,
    SampleWeightedGaussian,
    SampleWeightedMultinomial,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] = [
        Algorithm::SingleLinkage,
        Algorithm::CMeans,
        Algorithm::FuzzyCMeans,
        Algorithm::CmlGaussian,
        Algorithm::SampleWeightedGaussian,
        Algorithm::SampleWeightedMultinomial,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::SingleLinkage => "single_linkage",
            Algorithm::CMeans => "c_means",
            Algorithm::FuzzyCMeans => "fuzzy_c_means",
            Algorithm::CmlGaussian => "cml_gaussian",
            Algorithm::SampleWeightedGaussian => "sample_weighted_gaussian",
            Algorithm::SampleWeightedMultinomial => "sample_weighted_multinomial",
        }
    }

    pub fn run(self, data: &DataSet, cfg: &AlgoConfig) -> Result<ClusteringResult> {
        match self {
            Algorithm::SingleLinkage => single_linkage(data, cfg.c),
            Algorithm::CMeans => c_means(data, cfg),
            Algorithm::FuzzyCMeans => fuzzy_c_means(data, cfg),
            Algorithm::CmlGaussian => cml_gaussian(data, cfg),
            Algorithm::SampleWeightedGaussian => sample_weighted_gaussian(data, cfg),
            Algorithm::SampleWeightedMultinomial => sample_weighted_multinomial(data, cfg),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.replace('-', "_");
        match s.as_str() {
            "fcm" => return Ok(Algorithm::FuzzyCMeans),
            "kmeans" | "k_means" => return Ok(Algorithm::CMeans),
            "sw_gaussian" => return Ok(Algorithm::SampleWeightedGaussian),
            "sw_multinomial" => return Ok(Algorithm::SampleWeightedMultinomial),
            _ => {}
        }
        Algorithm::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown algorithm `{s}`")))
    }
}

/// Picks `c` seed rows of `points` according to `init`.
///
/// Farthest-first falls back to the lowest unused index once every
/// remaining row coincides with a chosen one, so it always returns `c`
/// distinct indices.
pub(crate) fn seed_rows(points: ArrayView2<'_, f64>, c: usize, init: Init, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let n = points.nrows();
    match init {
        Init::RandomObjects | Init::RandomPartition => sample(rng, n, c).into_vec(),
        Init::FarthestFirst => {
            let mut chosen = vec![rng.random_range(0..n)];
            let mut nearest: Vec<f64> = (0..n).map(|k| sq_dist(points.row(k), points.row(chosen[0]))).collect();
            while chosen.len() < c {
                let mut best: Option<usize> = None;
                for k in 0..n {
                    if chosen.contains(&k) {
                        continue;
                    }
                    if best.is_none_or(|b| nearest[k] > nearest[b]) {
                        best = Some(k);
                    }
                }
                let next = best.expect("c ≤ n leaves an unused object");
                chosen.push(next);
                for k in 0..n {
                    nearest[k] = nearest[k].min(sq_dist(points.row(k), points.row(next)));
                }
            }
            chosen
        }
    }
}

/// Uniform random labels with every cluster nonempty: a random permutation
/// fills one object per cluster, the rest are drawn freely.
pub(crate) fn random_labels(n: usize, c: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let order = sample(rng, n, n).into_vec();
    let mut labels = vec![0; n];
    for (slot, &k) in order.iter().enumerate() {
        labels[k] = if slot < c { slot } else { rng.random_range(0..c) };
    }
    labels
}

/// Index of the row of `points` farthest from its nearest row of `centers`,
/// skipping rows in `taken`. Smallest index wins ties.
pub(crate) fn farthest_from(points: ArrayView2<'_, f64>, centers: &[Vec<f64>], taken: &[usize]) -> usize {
    let mut best = None;
    let mut best_d = f64::NEG_INFINITY;
    for k in 0..points.nrows() {
        if taken.contains(&k) {
            continue;
        }
        let d = centers
            .iter()
            .map(|v| {
                points
                    .row(k)
                    .iter()
                    .zip(v)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
            })
            .fold(f64::INFINITY, f64::min);
        if best.is_none() || d > best_d {
            best = Some(k);
            best_d = d;
        }
    }
    best.unwrap_or(0)
}

/// Weighted means of `points` with one weight row per cluster. Clusters with
/// no mass are reseeded at the point farthest from the other prototypes.
pub(crate) fn weighted_means(points: ArrayView2<'_, f64>, weights: ArrayView2<'_, f64>) -> Array2<f64> {
    let (c, r) = (weights.nrows(), points.ncols());
    let mut means: Vec<Option<Vec<f64>>> = vec![None; c];
    for (i, slot) in means.iter_mut().enumerate() {
        let mass: f64 = weights.row(i).sum();
        if mass > 0.0 && mass.is_finite() {
            let mut acc = vec![0.0; r];
            for (k, &w) in weights.row(i).iter().enumerate() {
                if w != 0.0 {
                    for (a, x) in acc.iter_mut().zip(points.row(k)) {
                        *a += w * x;
                    }
                }
            }
            *slot = Some(acc.into_iter().map(|a| a / mass).collect());
        }
    }
    let mut taken = Vec::new();
    for i in 0..c {
        if means[i].is_none() {
            let centers: Vec<Vec<f64>> = means.iter().flatten().cloned().collect();
            let k = farthest_from(points, &centers, &taken);
            taken.push(k);
            means[i] = Some(points.row(k).to_vec());
        }
    }
    let flat: Vec<f64> = means.into_iter().flatten().flatten().collect();
    Array2::from_shape_vec((c, r), flat).expect("c rows of length r")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithms::framework::seeded_rng as trial_rng;
    use ndarray::array;

    #[test]
    fn farthest_first_spreads_out() {
        let pts = array![[0.0], [1.0], [10.0], [11.0]];
        for seed in 0..20 {
            let rows = seed_rows(pts.view(), 2, Init::FarthestFirst, &mut trial_rng(seed));
            let (a, b) = (pts[[rows[0], 0]], pts[[rows[1], 0]]);
            assert!((a - b).abs() >= 10.0, "{rows:?}");
        }
    }

    #[test]
    fn seeding_identical_points_still_returns_distinct_indices() {
        let pts = Array2::zeros((5, 2));
        let mut rows = seed_rows(pts.view(), 3, Init::FarthestFirst, &mut trial_rng(1));
        rows.sort();
        rows.dedup();
        assert_eq!(rows.len(), 3);
    }

    #[test]
    fn random_labels_cover_every_cluster() {
        for seed in 0..50 {
            let l = random_labels(6, 4, &mut trial_rng(seed));
            for i in 0..4 {
                assert!(l.contains(&i));
            }
        }
    }

    #[test]
    fn empty_cluster_reseeded_far_away() {
        let pts = array![[0.0], [1.0], [10.0]];
        let w = array![[1.0, 1.0, 1.0], [0.0, 0.0, 0.0]];
        let v = weighted_means(pts.view(), w.view());
        assert!((v[[0, 0]] - 11.0 / 3.0).abs() < 1e-12);
        assert_eq!(v[[1, 0]], 10.0);
    }

    #[test]
    fn config_validation() {
        assert!(AlgoConfig::new(0).validate(3).is_err());
        assert!(AlgoConfig::new(4).validate(3).is_err());
        let mut cfg = AlgoConfig::new(2);
        cfg.max_iterations = 0;
        assert!(cfg.validate(3).is_err());
        assert!(AlgoConfig::new(3).validate(3).is_ok());
    }

    #[test]
    fn names_round_trip() {
        for a in Algorithm::ALL {
            assert_eq!(a.as_str().parse::<Algorithm>().unwrap(), a);
        }
        assert_eq!("fcm".parse::<Algorithm>().unwrap(), Algorithm::FuzzyCMeans);
        assert!("ward".parse::<Algorithm>().is_err());
    }
}
