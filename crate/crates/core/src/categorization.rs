//! Category representations, category (dis)similarity mappings, and the
//! three axioms a clustering result is checked against:
//!
//! * **sample separation**: every object has a strictly best cluster;
//! * **category separation**: every cluster is strictly best for at least
//!   one object;
//! * **categorization equivalency**: for every object, the clusters of
//!   maximal membership are exactly the clusters of optimal affinity.
//!
//! "Strictly better" means better by more than a tolerance `tol`.
//! Product-form similarities are tabulated as logarithms; since `log` is
//! monotone the checks are unaffected.

use std::collections::BTreeSet;

use ndarray::{Array2, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::data::DataSet;
use crate::error::{Error, Result};
use crate::numeric::{best_set, sq_dist, strictly_best};
use crate::partition::{Partition, PartitionKind};

/// Cognitive representation of the `c` categories.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum CategoryModel {
    /// One prototype row `v_i` per category, with optional mixing weights.
    Prototype {
        #[serde(with = "crate::numeric::rows")]
        prototypes: Array2<f64>,
        #[serde(skip_serializing_if = "Option::is_none")]
        mixing: Option<Vec<f64>>,
    },
    /// Member sets `X_i` over the data set (0-based object indices).
    Exemplar { members: Vec<Vec<usize>> },
    /// Row-stochastic `c × n` parameters `θ_il`, with optional mixing weights.
    Multinomial {
        #[serde(with = "crate::numeric::rows")]
        theta: Array2<f64>,
        #[serde(skip_serializing_if = "Option::is_none")]
        mixing: Option<Vec<f64>>,
    },
    /// Prototypes with an isotropic density `κ·exp(−‖x − v_i‖²/σ)`.
    Gaussian {
        #[serde(with = "crate::numeric::rows")]
        prototypes: Array2<f64>,
        kappa: f64,
        sigma: f64,
    },
}

impl CategoryModel {
    pub fn prototypes(prototypes: Array2<f64>) -> Result<Self> {
        if prototypes.nrows() == 0 || prototypes.ncols() == 0 {
            return Err(Error::Structural("prototype matrix must be nonempty".into()));
        }
        Ok(CategoryModel::Prototype { prototypes, mixing: None })
    }

    pub fn exemplars(members: Vec<Vec<usize>>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::Structural("exemplar model needs at least one category".into()));
        }
        if let Some(i) = members.iter().position(Vec::is_empty) {
            return Err(Error::Structural(format!("exemplar set {i} is empty")));
        }
        Ok(CategoryModel::Exemplar { members })
    }

    pub fn multinomial(theta: Array2<f64>) -> Result<Self> {
        for (i, row) in theta.rows().into_iter().enumerate() {
            let s = row.sum();
            if row.iter().any(|&t| t < 0.0 || !t.is_finite()) || (s - 1.0).abs() > 1e-9 {
                return Err(Error::Structural(format!(
                    "θ row {i} is not a probability vector (sum {s})"
                )));
            }
        }
        Ok(CategoryModel::Multinomial { theta, mixing: None })
    }

    pub fn gaussian(prototypes: Array2<f64>, kappa: f64, sigma: f64) -> Result<Self> {
        if sigma <= 0.0 || kappa <= 0.0 {
            return Err(Error::Domain(format!("need κ > 0 and σ > 0, got κ={kappa}, σ={sigma}")));
        }
        Ok(CategoryModel::Gaussian { prototypes, kappa, sigma })
    }

    /// Number of categories `c`.
    pub fn clusters(&self) -> usize {
        match self {
            CategoryModel::Prototype { prototypes, .. } | CategoryModel::Gaussian { prototypes, .. } => {
                prototypes.nrows()
            }
            CategoryModel::Exemplar { members } => members.len(),
            CategoryModel::Multinomial { theta, .. } => theta.nrows(),
        }
    }

    pub fn variant_name(&self) -> &'static str {
        match self {
            CategoryModel::Prototype { .. } => "prototype",
            CategoryModel::Exemplar { .. } => "exemplar",
            CategoryModel::Multinomial { .. } => "multinomial",
            CategoryModel::Gaussian { .. } => "gaussian",
        }
    }

    /// Prototype rows, for the variants that carry them.
    pub fn prototype_matrix(&self) -> Option<ArrayView2<'_, f64>> {
        match self {
            CategoryModel::Prototype { prototypes, .. } | CategoryModel::Gaussian { prototypes, .. } => {
                Some(prototypes.view())
            }
            _ => None,
        }
    }

    pub fn mixing(&self) -> Option<&[f64]> {
        match self {
            CategoryModel::Prototype { mixing, .. } | CategoryModel::Multinomial { mixing, .. } => {
                mixing.as_deref()
            }
            _ => None,
        }
    }

    /// Whether categories `i` and `j` have the same representation.
    ///
    /// Numeric variants compare prototype or θ rows componentwise within
    /// `tol`; exemplar sets compare as sets.
    pub fn same_category(&self, i: usize, j: usize, tol: f64) -> bool {
        let rows_equal = |m: &Array2<f64>| {
            m.row(i)
                .iter()
                .zip(m.row(j).iter())
                .all(|(a, b)| (a - b).abs() <= tol)
        };
        match self {
            CategoryModel::Prototype { prototypes, .. } | CategoryModel::Gaussian { prototypes, .. } => {
                rows_equal(prototypes)
            }
            CategoryModel::Multinomial { theta, .. } => rows_equal(theta),
            CategoryModel::Exemplar { members } => {
                let a: BTreeSet<_> = members[i].iter().collect();
                let b: BTreeSet<_> = members[j].iter().collect();
                a == b
            }
        }
    }

    /// Reorders categories: row `i` of the result is row `perm[i]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> CategoryModel {
        let rows = |m: &Array2<f64>| Array2::from_shape_fn(m.dim(), |(i, o)| m[[perm[i], o]]);
        let mix = |w: &Option<Vec<f64>>| w.as_ref().map(|w| perm.iter().map(|&p| w[p]).collect());
        match self {
            CategoryModel::Prototype { prototypes, mixing } => CategoryModel::Prototype {
                prototypes: rows(prototypes),
                mixing: mix(mixing),
            },
            CategoryModel::Multinomial { theta, mixing } => CategoryModel::Multinomial {
                theta: rows(theta),
                mixing: mix(mixing),
            },
            CategoryModel::Gaussian { prototypes, kappa, sigma } => CategoryModel::Gaussian {
                prototypes: rows(prototypes),
                kappa: *kappa,
                sigma: *sigma,
            },
            CategoryModel::Exemplar { members } => CategoryModel::Exemplar {
                members: perm.iter().map(|&p| members[p].clone()).collect(),
            },
        }
    }
}

/// Whether larger or smaller affinities mean "more similar".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AffinityMode {
    Similarity,
    Dissimilarity,
}

/// Built-in category (dis)similarity mappings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum AffinityMap {
    /// `Ds = ‖x_k − v_i‖²`.
    SqEuclidean,
    /// `Sim = max_{l ∈ X_i} s_kl`.
    MaxLink,
    /// `Sim = exp(−‖x_k − v_i‖²/β)`.
    Gaussian { beta: f64 },
    /// `Sim = α_i·exp(−‖x_k − v_i‖²/(mβ))`, the weighted component affinity
    /// whose argmax drives the sample-weighted Gaussian memberships.
    WeightedGaussian { beta: f64, m: f64 },
    /// `log Sim = Σ_l A_kl log θ_il`.
    Multinomial,
    /// `log Sim = log α_i + (1/m) Σ_l A_kl log θ_il`.
    WeightedMultinomial { m: f64 },
    /// `log Sim = log p(x_k, X̲_i) = log κ − ‖x_k − v_i‖²/σ`.
    Density,
}

impl AffinityMap {
    pub fn mode(&self) -> AffinityMode {
        match self {
            AffinityMap::SqEuclidean => AffinityMode::Dissimilarity,
            _ => AffinityMode::Similarity,
        }
    }

    /// Whether tabulated values are logarithms of the similarity.
    pub fn is_log(&self) -> bool {
        matches!(
            self,
            AffinityMap::Multinomial | AffinityMap::WeightedMultinomial { .. } | AffinityMap::Density
        )
    }

    pub fn name(&self) -> &'static str {
        match self {
            AffinityMap::SqEuclidean => "sq_euclidean",
            AffinityMap::MaxLink => "max_link",
            AffinityMap::Gaussian { .. } => "gaussian",
            AffinityMap::WeightedGaussian { .. } => "weighted_gaussian",
            AffinityMap::Multinomial => "multinomial",
            AffinityMap::WeightedMultinomial { .. } => "weighted_multinomial",
            AffinityMap::Density => "density",
        }
    }

    /// Evaluates the mapping for object `k` and category `i`.
    pub fn evaluate(&self, data: &DataSet, model: &CategoryModel, k: usize, i: usize) -> Result<f64> {
        let incompatible = || Error::IncompatibleMap {
            map: self.name(),
            model: model.variant_name(),
        };
        let features = || {
            data.features().map_err(|_| Error::MissingView {
                view: "features",
                needed_by: self.name(),
            })
        };
        match (self, model) {
            (AffinityMap::SqEuclidean, CategoryModel::Prototype { prototypes, .. })
            | (AffinityMap::SqEuclidean, CategoryModel::Gaussian { prototypes, .. }) => {
                let f = features()?;
                check_dim(f.ncols(), prototypes.ncols())?;
                Ok(sq_dist(f.row(k), prototypes.row(i)))
            }
            (AffinityMap::Gaussian { beta }, CategoryModel::Prototype { prototypes, .. })
            | (AffinityMap::Gaussian { beta }, CategoryModel::Gaussian { prototypes, .. }) => {
                let f = features()?;
                check_dim(f.ncols(), prototypes.ncols())?;
                Ok((-sq_dist(f.row(k), prototypes.row(i)) / beta).exp())
            }
            (AffinityMap::WeightedGaussian { beta, m }, CategoryModel::Prototype { prototypes, mixing }) => {
                let f = features()?;
                check_dim(f.ncols(), prototypes.ncols())?;
                let alpha = mixing.as_ref().map_or(1.0, |w| w[i]);
                Ok(alpha * (-sq_dist(f.row(k), prototypes.row(i)) / (m * beta)).exp())
            }
            (AffinityMap::MaxLink, CategoryModel::Exemplar { members }) => {
                let s = data.similarity().map_err(|_| Error::MissingView {
                    view: "similarity",
                    needed_by: self.name(),
                })?;
                members[i]
                    .iter()
                    .map(|&l| s[[k, l]])
                    .reduce(f64::max)
                    .ok_or_else(|| Error::Structural(format!("exemplar set {i} is empty")))
            }
            (AffinityMap::Multinomial, CategoryModel::Multinomial { theta, .. }) => {
                multinomial_log_sim(data, theta, k, i, self.name())
            }
            (AffinityMap::WeightedMultinomial { m }, CategoryModel::Multinomial { theta, mixing }) => {
                let alpha = mixing.as_ref().map_or(1.0, |w| w[i]);
                Ok(alpha.ln() + multinomial_log_sim(data, theta, k, i, self.name())? / m)
            }
            (AffinityMap::Density, CategoryModel::Gaussian { prototypes, kappa, sigma }) => {
                let f = features()?;
                check_dim(f.ncols(), prototypes.ncols())?;
                Ok(kappa.ln() - sq_dist(f.row(k), prototypes.row(i)) / sigma)
            }
            _ => Err(incompatible()),
        }
    }
}

fn check_dim(data_dim: usize, model_dim: usize) -> Result<()> {
    if data_dim != model_dim {
        return Err(Error::Dimension(format!(
            "features have dimension {data_dim}, prototypes {model_dim}"
        )));
    }
    Ok(())
}

fn multinomial_log_sim(
    data: &DataSet,
    theta: &Array2<f64>,
    k: usize,
    i: usize,
    name: &'static str,
) -> Result<f64> {
    let a = data.adjacency().map_err(|_| Error::MissingView {
        view: "adjacency",
        needed_by: name,
    })?;
    if theta.ncols() != a.ncols() {
        return Err(Error::Dimension(format!(
            "θ has {} columns, adjacency has {} nodes",
            theta.ncols(),
            a.ncols()
        )));
    }
    // 0·log 0 = 0: only edges present contribute.
    Ok(a.row(k)
        .iter()
        .zip(theta.row(i).iter())
        .filter(|(&akl, _)| akl > 0.0)
        .map(|(&akl, &t)| akl * t.ln())
        .sum())
}

/// Tabulated affinities: entry `(i, k)` is the affinity of object `k` to
/// category `i`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AffinityTable {
    #[serde(with = "crate::numeric::rows")]
    values: Array2<f64>,
    mode: AffinityMode,
    log_scale: bool,
}

impl AffinityTable {
    /// Table of plain (non-log) affinities. Entries must be finite and
    /// nonnegative.
    pub fn new(values: Array2<f64>, mode: AffinityMode) -> Result<Self> {
        if let Some(((i, k), v)) = values.indexed_iter().find(|(_, v)| !v.is_finite() || **v < 0.0) {
            return Err(Error::Structural(format!(
                "affinity ({i}, {k}) = {v} is not a finite nonnegative number"
            )));
        }
        Self::build(values, mode, false)
    }

    /// Table of log-similarities. Entries may be `-inf` (similarity zero).
    pub fn from_log_similarities(values: Array2<f64>) -> Result<Self> {
        if let Some(((i, k), v)) = values.indexed_iter().find(|(_, v)| v.is_nan() || **v == f64::INFINITY) {
            return Err(Error::Structural(format!("log-similarity ({i}, {k}) = {v}")));
        }
        Self::build(values, AffinityMode::Similarity, true)
    }

    fn build(values: Array2<f64>, mode: AffinityMode, log_scale: bool) -> Result<Self> {
        if values.nrows() == 0 || values.ncols() == 0 {
            return Err(Error::Structural("affinity table must be nonempty".into()));
        }
        Ok(AffinityTable { values, mode, log_scale })
    }

    pub fn values(&self) -> ArrayView2<'_, f64> {
        self.values.view()
    }

    pub fn mode(&self) -> AffinityMode {
        self.mode
    }

    pub fn is_log(&self) -> bool {
        self.log_scale
    }

    pub fn clusters(&self) -> usize {
        self.values.nrows()
    }

    pub fn objects(&self) -> usize {
        self.values.ncols()
    }

    /// Column `k` as preference scores: higher is better in both modes.
    pub fn scores(&self, k: usize) -> Vec<f64> {
        let col = self.values.column(k);
        match self.mode {
            AffinityMode::Similarity => col.to_vec(),
            AffinityMode::Dissimilarity => col.iter().map(|v| -v).collect(),
        }
    }

    /// Clusters of optimal affinity for object `k` (ties within `tol`).
    pub fn optimal_set(&self, k: usize, tol: f64) -> Vec<usize> {
        best_set(&self.scores(k), tol)
    }

    /// Rows reordered: row `i` of the result is row `perm[i]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> AffinityTable {
        let v = &self.values;
        AffinityTable {
            values: Array2::from_shape_fn(v.dim(), |(i, k)| v[[perm[i], k]]),
            mode: self.mode,
            log_scale: self.log_scale,
        }
    }
}

/// Evaluates `map` for every (category, object) pair.
pub fn affinity_table(data: &DataSet, model: &CategoryModel, map: &AffinityMap) -> Result<AffinityTable> {
    let c = model.clusters();
    let n = data.len();
    if let CategoryModel::Exemplar { members } = model {
        if let Some(&bad) = members.iter().flatten().find(|&&l| l >= n) {
            return Err(Error::Dimension(format!("exemplar index {bad} out of range for n = {n}")));
        }
    }
    let mut values = Array2::zeros((c, n));
    for i in 0..c {
        for k in 0..n {
            values[[i, k]] = map.evaluate(data, model, k, i)?;
        }
    }
    if map.is_log() {
        AffinityTable::from_log_similarities(values)
    } else {
        AffinityTable::new(values, map.mode())
    }
}

/// Outcome of [`check_sample_separation`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleSeparation {
    pub holds: bool,
    /// Objects without a strictly best cluster.
    pub violations: Vec<usize>,
}

/// Sample separation: every object has a strictly optimal category.
pub fn check_sample_separation(table: &AffinityTable, tol: f64) -> SampleSeparation {
    let c = table.clusters();
    let violations: Vec<usize> = (0..table.objects())
        .filter(|&k| {
            let s = table.scores(k);
            !(0..c).any(|i| strictly_best(&s, i, tol))
        })
        .collect();
    SampleSeparation { holds: violations.is_empty(), violations }
}

/// Outcome of [`check_category_separation`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CategorySeparation {
    pub holds: bool,
    /// Categories that are strictly optimal for no object.
    pub violations: Vec<usize>,
    /// First object on which each category is strictly optimal.
    pub witnesses: Vec<Option<usize>>,
}

/// Category separation: every category is strictly optimal for some object.
pub fn check_category_separation(table: &AffinityTable, tol: f64) -> CategorySeparation {
    let columns: Vec<Vec<f64>> = (0..table.objects()).map(|k| table.scores(k)).collect();
    let witnesses: Vec<Option<usize>> = (0..table.clusters())
        .map(|i| columns.iter().position(|s| strictly_best(s, i, tol)))
        .collect();
    let violations: Vec<usize> = witnesses
        .iter()
        .enumerate()
        .filter(|(_, w)| w.is_none())
        .map(|(i, _)| i)
        .collect();
    CategorySeparation { holds: violations.is_empty(), violations, witnesses }
}

/// Outcome of [`check_categorization_equivalency`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Equivalency {
    pub holds: bool,
    pub mismatches: Vec<usize>,
}

/// Categorization equivalency: per object, the argmax set of the membership
/// column equals the optimal set of the affinity column.
pub fn check_categorization_equivalency(
    partition: &Partition,
    table: &AffinityTable,
    tol: f64,
) -> Result<Equivalency> {
    if partition.clusters() != table.clusters() || partition.objects() != table.objects() {
        return Err(Error::Dimension(format!(
            "partition is {}×{}, affinity table is {}×{}",
            partition.clusters(),
            partition.objects(),
            table.clusters(),
            table.objects()
        )));
    }
    let mismatches: Vec<usize> = (0..partition.objects())
        .filter(|&k| best_set(&partition.column(k).to_vec(), tol) != table.optimal_set(k, tol))
        .collect();
    Ok(Equivalency { holds: mismatches.is_empty(), mismatches })
}

/// Objects whose optimal category is not unique. Empty exactly when sample
/// separation holds.
pub fn boundary_set(table: &AffinityTable, tol: f64) -> Vec<usize> {
    check_sample_separation(table, tol).violations
}

/// A clustering result: category model, partition, affinity map and the
/// metadata of the run that produced it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusteringResult {
    pub algorithm: String,
    pub model: CategoryModel,
    pub partition: Partition,
    pub affinity: AffinityMap,
    /// Objective after every full sweep.
    #[serde(serialize_with = "crate::numeric::real::seq::serialize")]
    pub trace: Vec<f64>,
    /// Whether `trace` holds logarithms of the objective.
    pub trace_is_log: bool,
    pub seed: u64,
    pub iterations: usize,
    pub converged: bool,
    /// Per-object sample weights `a_k` (sample-weighted algorithms only).
    #[serde(with = "crate::numeric::real::seq::option")]
    pub sample_weights: Option<Vec<f64>>,
    /// `log a_k`, exact even where `a_k` underflows.
    #[serde(with = "crate::numeric::real::seq::option")]
    pub log_sample_weights: Option<Vec<f64>>,
}

impl ClusteringResult {
    /// Result with no run metadata, for hand-built fixtures.
    pub fn new(model: CategoryModel, partition: Partition, affinity: AffinityMap) -> Result<Self> {
        if model.clusters() != partition.clusters() {
            return Err(Error::Dimension(format!(
                "model has {} categories, partition has {} clusters",
                model.clusters(),
                partition.clusters()
            )));
        }
        Ok(ClusteringResult {
            algorithm: "fixture".into(),
            model,
            partition,
            affinity,
            trace: Vec::new(),
            trace_is_log: false,
            seed: 0,
            iterations: 0,
            converged: true,
            sample_weights: None,
            log_sample_weights: None,
        })
    }

    pub fn table(&self, data: &DataSet) -> Result<AffinityTable> {
        if data.len() != self.partition.objects() {
            return Err(Error::Dimension(format!(
                "partition has {} objects, data set has {}",
                self.partition.objects(),
                data.len()
            )));
        }
        affinity_table(data, &self.model, &self.affinity)
    }

    pub fn labels(&self, tol: f64) -> Vec<usize> {
        self.partition.hard_assignment(tol).labels
    }

    /// Member sets induced by the hard assignment of the partition.
    pub fn groups(&self, tol: f64) -> Vec<Vec<usize>> {
        let mut groups = vec![Vec::new(); self.partition.clusters()];
        for (k, l) in self.labels(tol).into_iter().enumerate() {
            groups[l].push(k);
        }
        groups
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResultType {
    Proper,
    Overlapping,
    Improper,
}

/// Classification of a clustering result.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResultClass {
    pub class: ResultType,
    pub coincident: bool,
    pub totally_coincident: bool,
}

/// Proper when both separation axioms hold, overlapping when only category
/// separation holds, improper when category separation fails.
pub fn classify_table(table: &AffinityTable, model: &CategoryModel, tol: f64) -> ResultClass {
    let sample = check_sample_separation(table, tol);
    let category = check_category_separation(table, tol);
    let class = match (category.holds, sample.holds) {
        (false, _) => ResultType::Improper,
        (true, true) => ResultType::Proper,
        (true, false) => ResultType::Overlapping,
    };
    let c = model.clusters();
    let coincident = (0..c).any(|i| ((i + 1)..c).any(|j| model.same_category(i, j, tol)));
    // Totally coincident needs at least one pair, so c = 1 never qualifies.
    let totally_coincident = coincident && (1..c).all(|j| model.same_category(0, j, tol));
    ResultClass { class, coincident, totally_coincident }
}

/// Classifies a clustering result against its own affinity table.
pub fn classify_clustering_result(data: &DataSet, result: &ClusteringResult, tol: f64) -> Result<ResultClass> {
    let table = result.table(data)?;
    Ok(classify_table(&table, &result.model, tol))
}

/// Every axiom check for one result, in the shape written to reports.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomReport {
    pub sample_separation: SampleSeparation,
    pub category_separation: CategorySeparation,
    pub equivalency: Equivalency,
    pub class: ResultType,
    pub flags: Vec<&'static str>,
    pub boundary_set: Vec<usize>,
}

impl AxiomReport {
    pub fn evaluate(data: &DataSet, result: &ClusteringResult, tol: f64) -> Result<Self> {
        let table = result.table(data)?;
        Self::from_table(&table, &result.partition, &result.model, tol)
    }

    pub fn from_table(
        table: &AffinityTable,
        partition: &Partition,
        model: &CategoryModel,
        tol: f64,
    ) -> Result<Self> {
        let class = classify_table(table, model, tol);
        let mut flags = Vec::new();
        if class.coincident {
            flags.push("coincident");
        }
        if class.totally_coincident {
            flags.push("totally_coincident");
        }
        Ok(AxiomReport {
            sample_separation: check_sample_separation(table, tol),
            category_separation: check_category_separation(table, tol),
            equivalency: check_categorization_equivalency(partition, table, tol)?,
            class: class.class,
            flags,
            boundary_set: boundary_set(table, tol),
        })
    }
}

/// Hard partition assigning each object to its first optimal category.
pub fn partition_from_table(table: &AffinityTable) -> Result<Partition> {
    let labels: Vec<usize> = (0..table.objects())
        .map(|k| crate::numeric::best_index(&table.scores(k)))
        .collect();
    let c = table.clusters();
    let mut u = Array2::zeros((c, labels.len()));
    for (k, &l) in labels.iter().enumerate() {
        u[[l, k]] = 1.0;
    }
    Partition::new(u, PartitionKind::Hard)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::DEFAULT_TIE_TOL as TOL;
    use crate::partition::make_uninformative;
    use ndarray::array;

    fn dis(v: Array2<f64>) -> AffinityTable {
        AffinityTable::new(v, AffinityMode::Dissimilarity).unwrap()
    }

    fn sim(v: Array2<f64>) -> AffinityTable {
        AffinityTable::new(v, AffinityMode::Similarity).unwrap()
    }

    fn protos(v: &[f64]) -> CategoryModel {
        CategoryModel::prototypes(Array2::from_shape_vec((v.len(), 1), v.to_vec()).unwrap()).unwrap()
    }

    #[test]
    fn sq_euclidean_and_gaussian_tables() {
        let data = DataSet::from_points(&[0.0, 10.0]).unwrap();
        let model = protos(&[0.0, 10.0]);
        let t = affinity_table(&data, &model, &AffinityMap::SqEuclidean).unwrap();
        assert_eq!(t.values(), array![[0.0, 100.0], [100.0, 0.0]]);
        assert_eq!(t.mode(), AffinityMode::Dissimilarity);
        let g = affinity_table(&data, &model, &AffinityMap::Gaussian { beta: 1.0 }).unwrap();
        let e = (-100f64).exp();
        assert_eq!(g.values(), array![[1.0, e], [e, 1.0]]);
    }

    #[test]
    fn max_link_table() {
        let data = DataSet::from_similarity(Array2::eye(2)).unwrap();
        let model = CategoryModel::exemplars(vec![vec![0], vec![1]]).unwrap();
        let t = affinity_table(&data, &model, &AffinityMap::MaxLink).unwrap();
        assert_eq!(t.values(), array![[1.0, 0.0], [0.0, 1.0]]);
    }

    #[test]
    fn max_link_without_similarity_is_configuration_error() {
        let data = DataSet::from_points(&[0.0, 1.0]).unwrap();
        let model = CategoryModel::exemplars(vec![vec![0], vec![1]]).unwrap();
        let err = affinity_table(&data, &model, &AffinityMap::MaxLink).unwrap_err();
        assert!(matches!(err, Error::MissingView { view: "similarity", .. }));
        let err = affinity_table(&data, &model, &AffinityMap::SqEuclidean).unwrap_err();
        assert!(matches!(err, Error::IncompatibleMap { .. }));
    }

    #[test]
    fn multinomial_table_is_log_domain() {
        let a = array![[0.0, 2.0], [2.0, 0.0]];
        let data = DataSet::from_adjacency(a).unwrap();
        let model = CategoryModel::multinomial(array![[0.5, 0.5], [1.0, 0.0]]).unwrap();
        let t = affinity_table(&data, &model, &AffinityMap::Multinomial).unwrap();
        assert!(t.is_log());
        assert!((t.values()[[0, 0]] - 2.0 * 0.5f64.ln()).abs() < 1e-15);
        assert_eq!(t.values()[[1, 0]], f64::NEG_INFINITY);
        assert_eq!(t.values()[[1, 1]], 0.0);
    }

    #[test]
    fn sample_separation_examples() {
        let s = check_sample_separation(&dis(array![[0.0, 100.0], [100.0, 0.0]]), TOL);
        assert!(s.holds && s.violations.is_empty());

        let data = DataSet::from_points(&[0.0, 5.0, 10.0]).unwrap();
        let t = affinity_table(&data, &protos(&[0.0, 10.0]), &AffinityMap::SqEuclidean).unwrap();
        let s = check_sample_separation(&t, TOL);
        assert_eq!((s.holds, s.violations), (false, vec![1]));

        let s = check_sample_separation(&sim(array![[1.0, 1.0], [1.0, 1.0]]), TOL);
        assert_eq!((s.holds, s.violations), (false, vec![0, 1]));
    }

    #[test]
    fn category_separation_examples() {
        let c = check_category_separation(&dis(array![[0.0, 100.0], [100.0, 0.0]]), TOL);
        assert!(c.holds);
        assert_eq!(c.witnesses, vec![Some(0), Some(1)]);

        let u = make_uninformative(&[0.7, 0.3], 3).unwrap();
        let c = check_category_separation(&sim(u.matrix().to_owned()), TOL);
        assert_eq!((c.holds, c.violations), (false, vec![1]));

        let c = check_category_separation(&sim(array![[1.0, 0.0], [1.0, 0.0]]), TOL);
        assert_eq!((c.holds, c.violations), (false, vec![0, 1]));
    }

    #[test]
    fn equivalency_examples() {
        let t = dis(array![[0.0, 100.0], [100.0, 0.0]]);
        let u = Partition::from_labels(&[0, 1], 2).unwrap();
        assert!(check_categorization_equivalency(&u, &t, TOL).unwrap().holds);
        let swapped = Partition::from_labels(&[1, 0], 2).unwrap();
        let e = check_categorization_equivalency(&swapped, &t, TOL).unwrap();
        assert_eq!((e.holds, e.mismatches), (false, vec![0, 1]));
        let half = make_uninformative(&[0.5, 0.5], 2).unwrap();
        let e = check_categorization_equivalency(&half, &sim(array![[1.0, 1.0], [1.0, 1.0]]), TOL).unwrap();
        assert!(e.holds);
        let three = Partition::from_labels(&[0, 1, 0], 2).unwrap();
        assert!(check_categorization_equivalency(&three, &t, TOL).is_err());
    }

    #[test]
    fn result_classification_examples() {
        let d4 = DataSet::from_points(&[0.0, 1.0, 10.0, 11.0]).unwrap();
        let r = ClusteringResult::new(
            protos(&[0.5, 10.5]),
            Partition::from_labels(&[0, 0, 1, 1], 2).unwrap(),
            AffinityMap::SqEuclidean,
        )
        .unwrap();
        let class = classify_clustering_result(&d4, &r, TOL).unwrap();
        assert_eq!(class, ResultClass { class: ResultType::Proper, coincident: false, totally_coincident: false });

        let d3 = DataSet::from_points(&[0.0, 5.0, 10.0]).unwrap();
        let r = ClusteringResult::new(
            protos(&[0.0, 10.0]),
            Partition::from_rows(&[vec![1.0, 0.5, 0.0], vec![0.0, 0.5, 1.0]], PartitionKind::Soft).unwrap(),
            AffinityMap::SqEuclidean,
        )
        .unwrap();
        assert_eq!(classify_clustering_result(&d3, &r, TOL).unwrap().class, ResultType::Overlapping);

        let r = ClusteringResult::new(
            protos(&[5.5, 5.5]),
            make_uninformative(&[0.5, 0.5], 4).unwrap(),
            AffinityMap::SqEuclidean,
        )
        .unwrap();
        let class = classify_clustering_result(&d4, &r, TOL).unwrap();
        assert_eq!(class, ResultClass { class: ResultType::Improper, coincident: true, totally_coincident: true });
    }

    #[test]
    fn boundary_set_examples() {
        let d3 = DataSet::from_points(&[0.0, 5.0, 10.0]).unwrap();
        let t = affinity_table(&d3, &protos(&[0.0, 10.0]), &AffinityMap::SqEuclidean).unwrap();
        assert_eq!(boundary_set(&t, TOL), vec![1]);

        let d4 = DataSet::from_points(&[0.0, 1.0, 10.0, 11.0]).unwrap();
        let t = affinity_table(&d4, &protos(&[0.5, 10.5]), &AffinityMap::SqEuclidean).unwrap();
        assert!(boundary_set(&t, TOL).is_empty());

        let t = affinity_table(&d4, &protos(&[5.5, 5.5]), &AffinityMap::SqEuclidean).unwrap();
        assert_eq!(boundary_set(&t, TOL), vec![0, 1, 2, 3]);
    }

    #[test]
    fn exemplar_equality_is_set_equality() {
        let m = CategoryModel::exemplars(vec![vec![0, 1], vec![1, 0], vec![2]]).unwrap();
        assert!(m.same_category(0, 1, TOL));
        assert!(!m.same_category(0, 2, TOL));
        assert!(CategoryModel::exemplars(vec![vec![0], vec![]]).is_err());
    }

    #[test]
    fn single_category_is_never_coincident() {
        let t = dis(array![[1.0, 2.0]]);
        let class = classify_table(&t, &protos(&[0.0]), TOL);
        assert_eq!(class.class, ResultType::Proper);
        assert!(!class.coincident && !class.totally_coincident);
    }
}
