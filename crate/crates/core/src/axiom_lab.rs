//! Randomized and exhaustive verification of the inequalities a clustering
//! result must satisfy once the axioms hold.
//!
//! Write `φ*(k) = argmax_i u_ik` for the assignment map read off the
//! partition and `φ` for an arbitrary map `{objects} → {clusters}`. With a
//! similarity mapping `Sim`, mixing weights `α` (positive, summing to one) and
//! a pair `(f, g)` with `f` convex and `f(g(t)) = t`:
//!
//! ```text
//! Π_k Sim(k, φ*(k))  ≥  Π_k Sim(k, φ(k))
//! Σ_k Sim(k, φ*(k))  ≥  Σ_k Sim(k, φ(k))
//! Π_k Sim(k, φ*(k))  ≥  Π_k Σ_i α_i Sim(k, i)
//! Σ_k Sim(k, φ*(k))  ≥  Σ_k f(Σ_i α_i g(Sim(k, i)))
//! ```
//!
//! With a dissimilarity mapping `Ds` and `f` concave the four mirror images
//! hold with `≤`. [`verify_thm4`] and [`verify_thm5`] check these on a
//! result; [`search_counterexample`] hunts for instances where the axioms
//! pass but an inequality fails, which would indicate a bug.
//!
//! Products are compared as sums of logarithms. A breach is only reported
//! when it exceeds [`SLACK`] in the domain being compared.

use std::fmt;

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::categorization::{
    affinity_table, check_categorization_equivalency, check_category_separation,
    check_sample_separation, AffinityMap, AffinityMode, AffinityTable, CategoryModel,
    ClusteringResult,
};
use crate::data::DataSet;
use crate::error::{Error, Result};
use crate::numeric::{logsumexp, shortfall};
use crate::partition::Partition;

/// Breaches at or below this size are treated as rounding noise.
pub const SLACK: f64 = 1e-9;

/// Exhaustive enumeration of assignment maps is used when `c^n` is at most
/// this many.
pub const EXHAUSTIVE_LIMIT: usize = 4096;

/// Exponents of the built-in power pairs.
pub const POWER_EXPONENTS: [f64; 4] = [1.0, 1.5, 2.0, 4.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Curvature {
    Convex,
    Concave,
}

/// A pair `(f, g)` with `f(g(t)) = t` on `t ≥ 0` and `f` of known curvature.
///
/// `general_mean` evaluates `f(Σ_i α_i g(t_i))`. Implementors may override
/// `log_general_mean` with a form that works directly on logarithms.
pub trait ConvexPair: fmt::Debug + Send + Sync {
    fn name(&self) -> String;
    fn curvature(&self) -> Curvature;
    fn f(&self, t: f64) -> f64;
    fn g(&self, t: f64) -> f64;

    fn general_mean(&self, alpha: &[f64], values: &[f64]) -> f64 {
        let inner: f64 = alpha.iter().zip(values).map(|(a, &t)| a * self.g(t)).sum();
        self.f(inner)
    }

    /// `log f(Σ_i α_i g(exp(l_i)))` given `log α_i` and `l_i`.
    fn log_general_mean(&self, log_alpha: &[f64], log_values: &[f64]) -> f64 {
        let alpha: Vec<f64> = log_alpha.iter().map(|a| a.exp()).collect();
        let values: Vec<f64> = log_values.iter().map(|l| l.exp()).collect();
        self.general_mean(&alpha, &values).ln()
    }
}

/// `f(t) = t^m, g(t) = t^{1/m}` (convex) or `f(t) = t^{1/m}, g(t) = t^m`
/// (concave), for `m ≥ 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerPair {
    pub m: f64,
    pub curvature: Curvature,
}

impl PowerPair {
    pub fn convex(m: f64) -> Result<Self> {
        Self::checked(m, Curvature::Convex)
    }

    pub fn concave(m: f64) -> Result<Self> {
        Self::checked(m, Curvature::Concave)
    }

    fn checked(m: f64, curvature: Curvature) -> Result<Self> {
        if !(m >= 1.0) || !m.is_finite() {
            return Err(Error::Domain(format!("power pair needs m ≥ 1, got {m}")));
        }
        Ok(PowerPair { m, curvature })
    }

    fn outer_exponent(&self) -> f64 {
        match self.curvature {
            Curvature::Convex => self.m,
            Curvature::Concave => 1.0 / self.m,
        }
    }
}

impl ConvexPair for PowerPair {
    fn name(&self) -> String {
        match self.curvature {
            Curvature::Convex => format!("t^{}", self.m),
            Curvature::Concave => format!("t^(1/{})", self.m),
        }
    }

    fn curvature(&self) -> Curvature {
        self.curvature
    }

    fn f(&self, t: f64) -> f64 {
        t.powf(self.outer_exponent())
    }

    fn g(&self, t: f64) -> f64 {
        t.powf(1.0 / self.outer_exponent())
    }

    fn log_general_mean(&self, log_alpha: &[f64], log_values: &[f64]) -> f64 {
        let p = self.outer_exponent();
        let terms: Vec<f64> = log_alpha.iter().zip(log_values).map(|(a, l)| a + l / p).collect();
        p * logsumexp(terms.iter().copied())
    }
}

/// Spot-checks the defining properties of a pair: `f(g(t)) = t` within
/// `1e-9` relative error and the midpoint inequality matching its curvature.
pub fn check_pair(pair: &dyn ConvexPair, samples: usize, seed: u64) -> std::result::Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let t: f64 = rng.random_range(0.0..100.0);
        let back = pair.f(pair.g(t));
        if (back - t).abs() > 1e-9 * t.max(1.0) {
            return Err(format!("{}: f(g({t})) = {back}", pair.name()));
        }
        let a: f64 = rng.random_range(0.0..100.0);
        let b: f64 = rng.random_range(0.0..100.0);
        let mid = pair.f(0.5 * (a + b));
        let chord = 0.5 * (pair.f(a) + pair.f(b));
        let slack = 1e-9 * chord.abs().max(1.0);
        let ok = match pair.curvature() {
            Curvature::Convex => mid <= chord + slack,
            Curvature::Concave => mid >= chord - slack,
        };
        if !ok {
            return Err(format!("{}: midpoint test fails at ({a}, {b})", pair.name()));
        }
    }
    Ok(())
}

/// A map from objects to clusters, `φ: {0..n} → {0..c}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AssignmentMap(Vec<usize>);

impl AssignmentMap {
    pub fn new(map: Vec<usize>, c: usize) -> Result<Self> {
        if let Some(&bad) = map.iter().find(|&&i| i >= c) {
            return Err(Error::Domain(format!("assignment {bad} out of range for c = {c}")));
        }
        Ok(AssignmentMap(map))
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }
}

/// Mixing weights: positive, summing to one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MixtureWeights(Vec<f64>);

impl MixtureWeights {
    pub fn new(alpha: Vec<f64>) -> Result<Self> {
        let sum: f64 = alpha.iter().sum();
        if alpha.is_empty() || alpha.iter().any(|&a| !(a > 0.0)) || (sum - 1.0).abs() > 1e-12 {
            return Err(Error::Domain(format!("mixing weights {alpha:?} are not a positive simplex point")));
        }
        Ok(MixtureWeights(alpha))
    }

    pub fn uniform(c: usize) -> Self {
        MixtureWeights(vec![1.0 / c as f64; c])
    }

    /// Flat-Dirichlet draw.
    pub fn random(c: usize, rng: &mut impl Rng) -> Self {
        let e: Vec<f64> = (0..c)
            .map(|_| -(1.0 - rng.random::<f64>()).ln())
            .map(|x: f64| x.max(1e-12))
            .collect();
        let s: f64 = e.iter().sum();
        MixtureWeights(e.into_iter().map(|x| x / s).collect())
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Theorem {
    /// Similarity inequalities (convex pairs).
    #[serde(rename = "thm4")]
    Similarity,
    /// Dissimilarity inequalities (concave pairs).
    #[serde(rename = "thm5")]
    Dissimilarity,
}

/// The eight inequalities, named by their shape.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Inequality {
    SimProductOverMaps,
    SimSumOverMaps,
    SimProductOverMixture,
    SimSumOverGeneralMean,
    DsSumUnderMaps,
    DsSumUnderGeneralMean,
    DsProductUnderMaps,
    DsProductUnderGeneralMean,
}

/// One inequality that failed by more than [`SLACK`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Breach {
    pub inequality: Inequality,
    /// Trial index; the trial's RNG stream is `(seed, trial)`. `None` for
    /// exhaustive checks.
    pub trial: Option<usize>,
    pub phi: Option<Vec<usize>>,
    pub alpha: Option<Vec<f64>>,
    pub pair: Option<String>,
    #[serde(with = "crate::numeric::real")]
    pub lhs: f64,
    #[serde(with = "crate::numeric::real")]
    pub rhs: f64,
    #[serde(with = "crate::numeric::real")]
    pub breach: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Precondition {
    pub met: bool,
    pub reason: Option<String>,
}

/// Outcome of [`verify_thm4`] or [`verify_thm5`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheoremReport {
    pub theorem: Theorem,
    pub trials: usize,
    pub exhaustive: bool,
    pub maps_enumerated: usize,
    pub seed: u64,
    pub precondition: Precondition,
    /// Breaches found. When the precondition is unmet these are exhibits
    /// rather than theorem violations.
    pub violations: Vec<Breach>,
    /// Largest `rhs − lhs` (oriented so positive means breach) over every
    /// comparison made.
    #[serde(with = "crate::numeric::real")]
    pub max_slack_breach: f64,
}

impl TheoremReport {
    /// True when the axioms hold and some inequality still failed.
    pub fn theorem_violated(&self) -> bool {
        self.precondition.met && !self.violations.is_empty()
    }
}

/// Knobs for the verification harness.
#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub trials: usize,
    pub seed: u64,
    /// Tie tolerance used by the axiom checks.
    pub tol: f64,
    /// Exponents for the power pairs drawn in random trials.
    pub exponents: Vec<f64>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            trials: 1000,
            seed: 0,
            tol: crate::numeric::DEFAULT_TIE_TOL,
            exponents: POWER_EXPONENTS.to_vec(),
        }
    }
}

/// Verifies the similarity inequalities for a result whose affinity map is a
/// similarity.
pub fn verify_thm4(data: &DataSet, result: &ClusteringResult, trials: usize, seed: u64) -> Result<TheoremReport> {
    let opts = VerifyOptions { trials, seed, ..VerifyOptions::default() };
    verify_table(Theorem::Similarity, &result.table(data)?, &result.partition, &opts)
}

/// Verifies the dissimilarity inequalities for a result whose affinity map is
/// a dissimilarity.
pub fn verify_thm5(data: &DataSet, result: &ClusteringResult, trials: usize, seed: u64) -> Result<TheoremReport> {
    let opts = VerifyOptions { trials, seed, ..VerifyOptions::default() };
    verify_table(Theorem::Dissimilarity, &result.table(data)?, &result.partition, &opts)
}

/// Verification against a precomputed table.
pub fn verify_table(
    theorem: Theorem,
    table: &AffinityTable,
    partition: &Partition,
    opts: &VerifyOptions,
) -> Result<TheoremReport> {
    let expected = match theorem {
        Theorem::Similarity => AffinityMode::Similarity,
        Theorem::Dissimilarity => AffinityMode::Dissimilarity,
    };
    if table.mode() != expected {
        return Err(Error::Domain(format!(
            "{theorem:?} inequalities need a {expected:?} mapping, got {:?}",
            table.mode()
        )));
    }
    if opts.exponents.is_empty() {
        return Err(Error::Domain("at least one pair exponent is required".into()));
    }
    let precondition = precondition(table, partition, opts.tol)?;
    let phi_star = partition.hard_assignment(opts.tol).labels;
    let checker = Checker::new(theorem, table, phi_star);
    let c = table.clusters();
    let n = table.objects();

    let mut log = Log::default();

    let exhaustive = c
        .checked_pow(n as u32)
        .is_some_and(|total| total <= EXHAUSTIVE_LIMIT);
    let mut maps_enumerated = 0;
    if exhaustive {
        let mut phi = vec![0usize; n];
        loop {
            checker.check_map(&phi, None, &mut log);
            maps_enumerated += 1;
            if !next_map(&mut phi, c) {
                break;
            }
        }
        let uniform = MixtureWeights::uniform(c);
        for &m in &opts.exponents {
            let pair = checker.pair(m)?;
            checker.check_mixture(&uniform, &pair, None, &mut log);
        }
    }

    for trial in 0..opts.trials {
        let mut rng = trial_rng(opts.seed, trial);
        let phi: Vec<usize> = (0..n).map(|_| rng.random_range(0..c)).collect();
        let alpha = MixtureWeights::random(c, &mut rng);
        let m = opts.exponents[rng.random_range(0..opts.exponents.len())];
        let pair = checker.pair(m)?;
        checker.check_map(&phi, Some(trial), &mut log);
        checker.check_mixture(&alpha, &pair, Some(trial), &mut log);
    }

    Ok(TheoremReport {
        theorem,
        trials: opts.trials,
        exhaustive,
        maps_enumerated,
        seed: opts.seed,
        precondition,
        violations: log.breaches,
        max_slack_breach: log.max_shortfall,
    })
}

/// RNG stream for one trial; parallel and serial runs see the same draws.
pub fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

fn next_map(phi: &mut [usize], c: usize) -> bool {
    for slot in phi.iter_mut() {
        *slot += 1;
        if *slot < c {
            return true;
        }
        *slot = 0;
    }
    false
}

fn precondition(table: &AffinityTable, partition: &Partition, tol: f64) -> Result<Precondition> {
    let mut reasons = Vec::new();
    let sample = check_sample_separation(table, tol);
    if !sample.holds {
        reasons.push(format!("sample separation fails at objects {:?}", sample.violations));
    }
    let category = check_category_separation(table, tol);
    if !category.holds {
        reasons.push(format!("category separation fails at clusters {:?}", category.violations));
    }
    let eq = check_categorization_equivalency(partition, table, tol)?;
    if !eq.holds {
        reasons.push(format!("categorization equivalency fails at objects {:?}", eq.mismatches));
    }
    Ok(Precondition {
        met: reasons.is_empty(),
        reason: (!reasons.is_empty()).then(|| reasons.join("; ")),
    })
}

struct Log {
    breaches: Vec<Breach>,
    max_shortfall: f64,
}

impl Default for Log {
    fn default() -> Self {
        Log { breaches: Vec::new(), max_shortfall: f64::NEG_INFINITY }
    }
}

struct Comparison<'a> {
    inequality: Inequality,
    trial: Option<usize>,
    phi: Option<&'a [usize]>,
    alpha: Option<&'a MixtureWeights>,
    pair: Option<&'a dyn ConvexPair>,
}

impl Log {
    /// Records `lhs ≥ rhs`.
    fn at_least(&mut self, cmp: Comparison<'_>, lhs: f64, rhs: f64) {
        self.record(cmp, lhs, rhs, shortfall(lhs, rhs));
    }

    /// Records `lhs ≤ rhs`.
    fn at_most(&mut self, cmp: Comparison<'_>, lhs: f64, rhs: f64) {
        self.record(cmp, lhs, rhs, shortfall(rhs, lhs));
    }

    fn record(&mut self, cmp: Comparison<'_>, lhs: f64, rhs: f64, breach: f64) {
        self.max_shortfall = self.max_shortfall.max(breach);
        if breach > SLACK {
            self.breaches.push(Breach {
                inequality: cmp.inequality,
                trial: cmp.trial,
                phi: cmp.phi.map(<[usize]>::to_vec),
                alpha: cmp.alpha.map(|a| a.as_slice().to_vec()),
                pair: cmp.pair.map(|p| p.name()),
                lhs,
                rhs,
                breach,
            });
        }
    }
}

/// Precomputed per-object values for one table.
struct Checker {
    theorem: Theorem,
    c: usize,
    n: usize,
    /// Whether sums must be formed in the log domain.
    log_sums: bool,
    /// Linear affinities, `values[k][i]`.
    linear: Vec<Vec<f64>>,
    /// Log affinities, `logs[k][i]`.
    logs: Vec<Vec<f64>>,
    phi_star: Vec<usize>,
    lhs_product: f64,
    lhs_sum: f64,
}

impl Checker {
    fn new(theorem: Theorem, table: &AffinityTable, phi_star: Vec<usize>) -> Self {
        let (c, n) = (table.clusters(), table.objects());
        let v = table.values();
        let column = |k: usize| (0..c).map(|i| v[[i, k]]).collect::<Vec<f64>>();
        let (linear, logs): (Vec<Vec<f64>>, Vec<Vec<f64>>) = if table.is_log() {
            (0..n)
                .map(|k| {
                    let l = column(k);
                    (l.iter().map(|x| x.exp()).collect(), l)
                })
                .unzip()
        } else {
            (0..n)
                .map(|k| {
                    let s = column(k);
                    let l = s.iter().map(|x| x.ln()).collect();
                    (s, l)
                })
                .unzip()
        };
        let log_sums = table.is_log();
        let mut checker = Checker {
            theorem,
            c,
            n,
            log_sums,
            linear,
            logs,
            phi_star,
            lhs_product: 0.0,
            lhs_sum: 0.0,
        };
        let phi_star = checker.phi_star.clone();
        checker.lhs_product = checker.log_product(&phi_star);
        checker.lhs_sum = checker.sum(&phi_star);
        checker
    }

    fn pair(&self, m: f64) -> Result<PowerPair> {
        match self.theorem {
            Theorem::Similarity => PowerPair::convex(m),
            Theorem::Dissimilarity => PowerPair::concave(m),
        }
    }

    fn log_product(&self, phi: &[usize]) -> f64 {
        (0..self.n).map(|k| self.logs[k][phi[k]]).sum()
    }

    fn sum(&self, phi: &[usize]) -> f64 {
        if self.log_sums {
            logsumexp((0..self.n).map(|k| self.logs[k][phi[k]]).collect::<Vec<_>>())
        } else {
            (0..self.n).map(|k| self.linear[k][phi[k]]).sum()
        }
    }

    fn check_map(&self, phi: &[usize], trial: Option<usize>, log: &mut Log) {
        let cmp = |inequality| Comparison { inequality, trial, phi: Some(phi), alpha: None, pair: None };
        let product = self.log_product(phi);
        let sum = self.sum(phi);
        match self.theorem {
            Theorem::Similarity => {
                log.at_least(cmp(Inequality::SimProductOverMaps), self.lhs_product, product);
                log.at_least(cmp(Inequality::SimSumOverMaps), self.lhs_sum, sum);
            }
            Theorem::Dissimilarity => {
                log.at_most(cmp(Inequality::DsSumUnderMaps), self.lhs_sum, sum);
                log.at_most(cmp(Inequality::DsProductUnderMaps), self.lhs_product, product);
            }
        }
    }

    fn check_mixture(&self, alpha: &MixtureWeights, pair: &dyn ConvexPair, trial: Option<usize>, log: &mut Log) {
        let a = alpha.as_slice();
        debug_assert_eq!(a.len(), self.c);
        let log_a: Vec<f64> = a.iter().map(|x| x.ln()).collect();
        let cmp = |inequality, with_pair: bool| Comparison {
            inequality,
            trial,
            phi: None,
            alpha: Some(alpha),
            pair: with_pair.then_some(pair),
        };
        let general_log: Vec<f64> = (0..self.n).map(|k| pair.log_general_mean(&log_a, &self.logs[k])).collect();
        match self.theorem {
            Theorem::Similarity => {
                let mixture: f64 = (0..self.n)
                    .map(|k| logsumexp(log_a.iter().zip(&self.logs[k]).map(|(la, l)| la + l).collect::<Vec<_>>()))
                    .sum();
                log.at_least(cmp(Inequality::SimProductOverMixture, false), self.lhs_product, mixture);
                let general = if self.log_sums {
                    logsumexp(general_log.iter().copied())
                } else {
                    (0..self.n).map(|k| pair.general_mean(a, &self.linear[k])).sum()
                };
                log.at_least(cmp(Inequality::SimSumOverGeneralMean, true), self.lhs_sum, general);
            }
            Theorem::Dissimilarity => {
                let general: f64 = (0..self.n).map(|k| pair.general_mean(a, &self.linear[k])).sum();
                log.at_most(cmp(Inequality::DsSumUnderGeneralMean, true), self.lhs_sum, general);
                let general_product: f64 = general_log.iter().sum();
                log.at_most(cmp(Inequality::DsProductUnderGeneralMean, true), self.lhs_product, general_product);
            }
        }
    }
}

/// Families of random instances for [`search_counterexample`]. Every
/// instance has `n ≤ 8` objects and `c ≤ 3` clusters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Generator {
    /// Planar points, prototypes, Gaussian similarity.
    GaussianPrototype,
    /// Planar points, prototypes, squared-Euclidean dissimilarity.
    SqEuclideanPrototype,
    /// Random weighted graphs, multinomial similarity (log domain).
    Multinomial,
}

/// A randomly generated instance.
#[derive(Debug, Clone)]
pub struct Instance {
    pub index: usize,
    pub data: DataSet,
    pub model: CategoryModel,
    pub map: AffinityMap,
    pub partition: Partition,
    pub report: TheoremReport,
}

/// Generates up to `budget` instances and returns the first one on which the
/// axioms pass under `tol` but some inequality fails by more than [`SLACK`].
///
/// Half the instances use the partition induced by the affinity table, half a
/// random hard partition, so the axiom checks have something to reject.
pub fn search_counterexample(generator: Generator, budget: usize, seed: u64, tol: f64) -> Result<Option<Instance>> {
    let theorem = match generator {
        Generator::SqEuclideanPrototype => Theorem::Dissimilarity,
        _ => Theorem::Similarity,
    };
    for index in 0..budget {
        let mut rng = trial_rng(seed, index);
        let (data, model, map) = generate(generator, &mut rng)?;
        let table = affinity_table(&data, &model, &map)?;
        let c = table.clusters();
        let n = table.objects();
        let partition = if rng.random_bool(0.5) {
            crate::categorization::partition_from_table(&table)?
        } else {
            let labels: Vec<usize> = (0..n).map(|_| rng.random_range(0..c)).collect();
            Partition::from_labels(&labels, c)?
        };
        let opts = VerifyOptions { trials: 16, seed: rng.random(), tol, ..VerifyOptions::default() };
        if !precondition(&table, &partition, tol)?.met {
            continue;
        }
        let report = verify_table(theorem, &table, &partition, &opts)?;
        if report.theorem_violated() {
            return Ok(Some(Instance { index, data, model, map, partition, report }));
        }
    }
    Ok(None)
}

fn generate(generator: Generator, rng: &mut ChaCha8Rng) -> Result<(DataSet, CategoryModel, AffinityMap)> {
    let n = rng.random_range(2..=8);
    let c = rng.random_range(1..=3usize.min(n));
    match generator {
        Generator::GaussianPrototype | Generator::SqEuclideanPrototype => {
            let features = Array2::from_shape_fn((n, 2), |_| rng.random_range(0.0..10.0));
            let prototypes = Array2::from_shape_fn((c, 2), |_| rng.random_range(0.0..10.0));
            let map = if generator == Generator::GaussianPrototype {
                AffinityMap::Gaussian { beta: rng.random_range(0.5..20.0) }
            } else {
                AffinityMap::SqEuclidean
            };
            Ok((DataSet::from_features(features)?, CategoryModel::prototypes(prototypes)?, map))
        }
        Generator::Multinomial => {
            let mut a = Array2::zeros((n, n));
            for k in 0..n {
                // A ring guarantees every degree is positive.
                let l = (k + 1) % n;
                let w = rng.random_range(1..=3) as f64;
                a[[k, l]] += w;
                a[[l, k]] += w;
                for l in (k + 1)..n {
                    if rng.random_bool(0.3) {
                        let w = rng.random_range(1..=3) as f64;
                        a[[k, l]] += w;
                        a[[l, k]] += w;
                    }
                }
            }
            let mut theta = Array2::zeros((c, n));
            for i in 0..c {
                let w = MixtureWeights::random(n, rng);
                theta.row_mut(i).assign(&ndarray::ArrayView1::from(w.as_slice()));
            }
            Ok((
                DataSet::from_adjacency(a)?,
                CategoryModel::multinomial(theta)?,
                AffinityMap::Multinomial,
            ))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::DEFAULT_TIE_TOL as TOL;

    fn d4() -> DataSet {
        DataSet::from_points(&[0.0, 1.0, 10.0, 11.0]).unwrap()
    }

    fn proper(map: AffinityMap) -> ClusteringResult {
        let v = Array2::from_shape_vec((2, 1), vec![0.5, 10.5]).unwrap();
        ClusteringResult::new(
            CategoryModel::prototypes(v).unwrap(),
            Partition::from_labels(&[0, 0, 1, 1], 2).unwrap(),
            map,
        )
        .unwrap()
    }

    #[test]
    fn builtin_pairs_pass_spot_checks() {
        for m in POWER_EXPONENTS {
            check_pair(&PowerPair::convex(m).unwrap(), 500, 1).unwrap();
            check_pair(&PowerPair::concave(m).unwrap(), 500, 2).unwrap();
        }
        assert!(PowerPair::convex(0.5).is_err());
    }

    #[test]
    fn a_mislabelled_pair_fails_the_midpoint_test() {
        // f = t^2 labelled concave.
        let lie = PowerPair { m: 2.0, curvature: Curvature::Convex };
        assert!(check_pair(&ConcaveClaim(lie), 200, 3).is_err());
    }

    #[derive(Debug)]
    struct ConcaveClaim(PowerPair);

    impl ConvexPair for ConcaveClaim {
        fn name(&self) -> String {
            "mislabelled".into()
        }
        fn curvature(&self) -> Curvature {
            Curvature::Concave
        }
        fn f(&self, t: f64) -> f64 {
            self.0.f(t)
        }
        fn g(&self, t: f64) -> f64 {
            self.0.g(t)
        }
    }

    #[test]
    fn log_general_mean_matches_linear() {
        let pair = PowerPair::convex(2.0).unwrap();
        let alpha = [0.3, 0.7];
        let values = [0.2, 0.9];
        let lin = pair.general_mean(&alpha, &values);
        let la: Vec<f64> = alpha.iter().map(|a: &f64| a.ln()).collect();
        let lv: Vec<f64> = values.iter().map(|a: &f64| a.ln()).collect();
        assert!((pair.log_general_mean(&la, &lv) - lin.ln()).abs() < 1e-12);
    }

    #[test]
    fn proper_gaussian_result_has_no_breaches_exhaustively() {
        let r = proper(AffinityMap::Gaussian { beta: 1.0 });
        let rep = verify_thm4(&d4(), &r, 0, 7).unwrap();
        assert!(rep.precondition.met);
        assert!(rep.exhaustive);
        assert_eq!(rep.maps_enumerated, 16);
        assert!(rep.violations.is_empty(), "{:?}", rep.violations);
    }

    #[test]
    fn swapped_labels_fail_precondition_and_exhibit_a_breach() {
        let mut r = proper(AffinityMap::Gaussian { beta: 1.0 });
        r.partition = Partition::from_labels(&[1, 1, 0, 0], 2).unwrap();
        let rep = verify_thm4(&d4(), &r, 0, 7).unwrap();
        assert!(!rep.precondition.met);
        assert!(!rep.theorem_violated());
        assert!(rep
            .violations
            .iter()
            .any(|b| b.inequality == Inequality::SimProductOverMaps));
    }

    #[test]
    fn single_cluster_is_tight() {
        let v = Array2::from_shape_vec((1, 1), vec![5.5]).unwrap();
        let r = ClusteringResult::new(
            CategoryModel::prototypes(v).unwrap(),
            Partition::from_labels(&[0, 0, 0, 0], 1).unwrap(),
            AffinityMap::Gaussian { beta: 50.0 },
        )
        .unwrap();
        let rep = verify_thm4(&d4(), &r, 200, 1).unwrap();
        assert!(rep.precondition.met && rep.violations.is_empty());
        // Every comparison is an equality up to rounding.
        assert!(rep.max_slack_breach.abs() < 1e-12, "{}", rep.max_slack_breach);
    }

    #[test]
    fn dissimilarity_suite_on_proper_result() {
        let r = proper(AffinityMap::SqEuclidean);
        let rep = verify_thm5(&d4(), &r, 10_000, 11).unwrap();
        assert!(rep.precondition.met && rep.violations.is_empty());
        assert!(matches!(verify_thm4(&d4(), &r, 1, 1), Err(Error::Domain(_))));
    }

    #[test]
    fn optimal_map_gives_equality() {
        let r = proper(AffinityMap::SqEuclidean);
        let table = r.table(&d4()).unwrap();
        let checker = Checker::new(Theorem::Dissimilarity, &table, vec![0, 0, 1, 1]);
        assert_eq!(checker.sum(&[0, 0, 1, 1]), checker.lhs_sum);
        assert_eq!(checker.log_product(&[0, 0, 1, 1]), checker.lhs_product);
    }

    #[test]
    fn identity_pair_general_mean_is_the_alpha_average() {
        let r = proper(AffinityMap::Gaussian { beta: 2.0 });
        let table = r.table(&d4()).unwrap();
        let checker = Checker::new(Theorem::Similarity, &table, vec![0, 0, 1, 1]);
        let pair = PowerPair::convex(1.0).unwrap();
        let alpha = [0.25, 0.75];
        for k in 0..4 {
            let direct: f64 = (0..2).map(|i| alpha[i] * checker.linear[k][i]).sum();
            assert!((pair.general_mean(&alpha, &checker.linear[k]) - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn uniform_alpha_identity_pair_on_dissimilarity_holds() {
        let r = proper(AffinityMap::SqEuclidean);
        let table = r.table(&d4()).unwrap();
        let checker = Checker::new(Theorem::Dissimilarity, &table, vec![0, 0, 1, 1]);
        let mut log = Log::default();
        checker.check_mixture(&MixtureWeights::uniform(2), &PowerPair::concave(1.0).unwrap(), None, &mut log);
        assert!(log.breaches.is_empty());
        // Sums: 1 against 201. Products: 0.25^4 against (55.25 · 45.25)^2.
        let sums: f64 = 1.0 - 201.0;
        let products = 4.0 * 0.25f64.ln() - 2.0 * (55.25f64 * 45.25).ln();
        assert!((log.max_shortfall - sums.max(products)).abs() < 1e-9);
    }

    #[test]
    fn reports_are_reproducible_from_seed() {
        let r = proper(AffinityMap::Gaussian { beta: 3.0 });
        let a = verify_thm4(&d4(), &r, 300, 99).unwrap();
        let b = verify_thm4(&d4(), &r, 300, 99).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn map_enumeration_visits_every_map() {
        let mut phi = vec![0; 3];
        let mut count = 1;
        while next_map(&mut phi, 2) {
            count += 1;
        }
        assert_eq!(count, 8);
        assert_eq!(phi, vec![0, 0, 0]);
    }

    #[test]
    fn weights_and_maps_validate() {
        assert!(MixtureWeights::new(vec![0.5, 0.5]).is_ok());
        assert!(MixtureWeights::new(vec![1.0, 0.0]).is_err());
        assert!(AssignmentMap::new(vec![0, 2], 2).is_err());
        let mut rng = trial_rng(0, 0);
        let w = MixtureWeights::random(5, &mut rng);
        assert!((w.as_slice().iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn faulty_comparator_is_caught() {
        let hit = search_counterexample(Generator::GaussianPrototype, 2000, 5, -1.0).unwrap();
        let hit = hit.expect("a negative tolerance must let a bad instance through");
        assert!(!hit.report.violations.is_empty());
    }

    #[test]
    fn healthy_search_finds_nothing_small_budget() {
        for g in [Generator::GaussianPrototype, Generator::SqEuclideanPrototype, Generator::Multinomial] {
            assert!(search_counterexample(g, 300, 17, TOL).unwrap().is_none(), "{g:?}");
        }
    }
}
