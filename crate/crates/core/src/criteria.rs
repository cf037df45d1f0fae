//! Clustering criteria: compactness objectives, likelihoods, the two-cluster
//! cut, the ICS trade-off and the within/between scatter decomposition.
//!
//! Every evaluator sums objects left to right so results are reproducible
//! bit for bit.

use std::fmt;

use ndarray::{Array1, ArrayView2};
use serde::Serialize;

use crate::axiom_lab::{ConvexPair, MixtureWeights};
use crate::categorization::CategoryModel;
use crate::data::DataSet;
use crate::error::{Error, Result};
use crate::numeric::{logsumexp, sq_dist, DEFAULT_TIE_TOL};
use crate::partition::{Partition, PartitionKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CriterionName {
    Sse,
    GeneralCMeans,
    CmlLoglik,
    MixtureLoglik,
    Cut,
    Ics,
    SampleWeightedObjective,
}

impl CriterionName {
    pub fn direction(self) -> Direction {
        match self {
            CriterionName::Sse | CriterionName::GeneralCMeans | CriterionName::Cut | CriterionName::Ics => {
                Direction::Minimize
            }
            CriterionName::CmlLoglik | CriterionName::MixtureLoglik | CriterionName::SampleWeightedObjective => {
                Direction::Maximize
            }
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            CriterionName::Sse => "sse",
            CriterionName::GeneralCMeans => "general_c_means",
            CriterionName::CmlLoglik => "cml_loglik",
            CriterionName::MixtureLoglik => "mixture_loglik",
            CriterionName::Cut => "cut",
            CriterionName::Ics => "ics",
            CriterionName::SampleWeightedObjective => "sample_weighted_objective",
        }
    }
}

impl fmt::Display for CriterionName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Minimize,
    Maximize,
}

/// A criterion value tagged with its name and direction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionValue {
    pub name: CriterionName,
    pub direction: Direction,
    #[serde(with = "crate::numeric::real")]
    pub value: f64,
    /// True when the value is stored as a natural logarithm.
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub log_scale: bool,
}

impl CriterionValue {
    pub fn new(name: CriterionName, value: f64) -> Self {
        CriterionValue { name, direction: name.direction(), value, log_scale: false }
    }
}

fn features<'a>(data: &'a DataSet, needed_by: &'static str) -> Result<ArrayView2<'a, f64>> {
    data.features().map_err(|_| Error::MissingView { view: "features", needed_by })
}

fn prototypes<'a>(model: &'a CategoryModel, needed_by: &'static str) -> Result<ArrayView2<'a, f64>> {
    model.prototype_matrix().ok_or(Error::IncompatibleMap {
        map: needed_by,
        model: model.variant_name(),
    })
}

fn check_shapes(x: ArrayView2<'_, f64>, v: ArrayView2<'_, f64>) -> Result<()> {
    if x.ncols() != v.ncols() {
        return Err(Error::Dimension(format!(
            "features have dimension {}, prototypes {}",
            x.ncols(),
            v.ncols()
        )));
    }
    Ok(())
}

fn check_partition(p: &Partition, n: usize, c: usize) -> Result<()> {
    if p.objects() != n || p.clusters() != c {
        return Err(Error::Dimension(format!(
            "partition is {}×{}, expected {c}×{n}",
            p.clusters(),
            p.objects()
        )));
    }
    Ok(())
}

fn check_labels(labels: &[usize], n: usize, c: usize) -> Result<()> {
    if labels.len() != n {
        return Err(Error::Dimension(format!("{} labels for {n} objects", labels.len())));
    }
    if let Some(&bad) = labels.iter().find(|&&l| l >= c) {
        return Err(Error::Domain(format!("label {bad} out of range for c = {c}")));
    }
    Ok(())
}

/// `Σ_k ‖x_k − v_{φ(k)}‖²` for an explicit assignment.
pub fn sse_labels(data: &DataSet, model: &CategoryModel, labels: &[usize]) -> Result<f64> {
    let x = features(data, "sse")?;
    let v = prototypes(model, "sse")?;
    check_shapes(x, v)?;
    check_labels(labels, data.len(), v.nrows())?;
    Ok(labels
        .iter()
        .enumerate()
        .map(|(k, &i)| sq_dist(x.row(k), v.row(i)))
        .sum())
}

/// Sum of squared errors of a partition against prototypes.
///
/// Each object counts against its argmax cluster (smallest index on ties),
/// which for a hard partition is its only cluster.
pub fn sse(data: &DataSet, model: &CategoryModel, partition: &Partition) -> Result<f64> {
    check_partition(partition, data.len(), model.clusters())?;
    let labels = partition.hard_assignment(DEFAULT_TIE_TOL).labels;
    sse_labels(data, model, &labels)
}

/// `Σ_k f(Σ_i α_i g(‖x_k − v_i‖²))`.
pub fn general_c_means(
    data: &DataSet,
    model: &CategoryModel,
    alpha: &MixtureWeights,
    pair: &dyn ConvexPair,
) -> Result<f64> {
    let x = features(data, "general_c_means")?;
    let v = prototypes(model, "general_c_means")?;
    check_shapes(x, v)?;
    if alpha.as_slice().len() != v.nrows() {
        return Err(Error::Dimension(format!(
            "{} mixing weights for {} prototypes",
            alpha.as_slice().len(),
            v.nrows()
        )));
    }
    let mut total = 0.0;
    let mut d = vec![0.0; v.nrows()];
    for k in 0..x.nrows() {
        for (i, di) in d.iter_mut().enumerate() {
            *di = sq_dist(x.row(k), v.row(i));
        }
        total += pair.general_mean(alpha.as_slice(), &d);
    }
    Ok(total)
}

/// `(κ, σ)` of a density model. Plain prototypes use `κ = σ = 1`.
fn density_params(model: &CategoryModel) -> Result<(f64, f64)> {
    match model {
        CategoryModel::Gaussian { kappa, sigma, .. } => {
            if !(*sigma > 0.0) || !(*kappa > 0.0) {
                return Err(Error::Domain(format!("need κ > 0 and σ > 0, got κ={kappa}, σ={sigma}")));
            }
            Ok((*kappa, *sigma))
        }
        CategoryModel::Prototype { .. } => Ok((1.0, 1.0)),
        other => Err(Error::IncompatibleMap { map: "density", model: other.variant_name() }),
    }
}

/// Classification log-likelihood `Σ_k (ln κ − ‖x_k − v_{φ(k)}‖²/σ)`.
pub fn cml_loglik(data: &DataSet, model: &CategoryModel, phi: &[usize]) -> Result<f64> {
    let (kappa, sigma) = density_params(model)?;
    let x = features(data, "cml_loglik")?;
    let v = prototypes(model, "cml_loglik")?;
    check_shapes(x, v)?;
    check_labels(phi, data.len(), v.nrows())?;
    let ln_kappa = kappa.ln();
    Ok(phi
        .iter()
        .enumerate()
        .map(|(k, &i)| ln_kappa - sq_dist(x.row(k), v.row(i)) / sigma)
        .sum())
}

/// Mixture log-likelihood `Σ_k ln Σ_i α_i κ exp(−‖x_k − v_i‖²/σ)`.
///
/// Zero weights are allowed here; their components simply drop out.
pub fn mixture_loglik(data: &DataSet, model: &CategoryModel, alpha: &[f64]) -> Result<f64> {
    let (kappa, sigma) = density_params(model)?;
    let x = features(data, "mixture_loglik")?;
    let v = prototypes(model, "mixture_loglik")?;
    check_shapes(x, v)?;
    if alpha.len() != v.nrows() {
        return Err(Error::Dimension(format!("{} mixing weights for {} prototypes", alpha.len(), v.nrows())));
    }
    let sum: f64 = alpha.iter().sum();
    if alpha.iter().any(|&a| !(a >= 0.0)) || (sum - 1.0).abs() > 1e-12 {
        return Err(Error::Domain(format!("mixing weights {alpha:?} do not form a simplex point")));
    }
    let ln_kappa = kappa.ln();
    let log_alpha: Vec<f64> = alpha.iter().map(|a| a.ln()).collect();
    let mut total = 0.0;
    let mut terms = vec![0.0; v.nrows()];
    for k in 0..x.nrows() {
        for (i, t) in terms.iter_mut().enumerate() {
            *t = log_alpha[i] + ln_kappa - sq_dist(x.row(k), v.row(i)) / sigma;
        }
        total += logsumexp(terms.iter().copied());
    }
    Ok(total)
}

/// Total similarity crossing a valid two-cluster hard partition.
pub fn cut(data: &DataSet, partition: &Partition) -> Result<f64> {
    let s = data
        .similarity()
        .map_err(|_| Error::MissingView { view: "similarity", needed_by: "cut" })?;
    if partition.clusters() != 2 {
        return Err(Error::Domain(format!("cut needs exactly 2 clusters, got {}", partition.clusters())));
    }
    if partition.kind() != PartitionKind::Hard {
        return Err(Error::Domain("cut needs a hard partition".into()));
    }
    check_partition(partition, data.len(), 2)?;
    partition.require_valid()?;
    let u = partition.matrix();
    let first: Vec<usize> = (0..data.len()).filter(|&k| u[[0, k]] == 1.0).collect();
    let second: Vec<usize> = (0..data.len()).filter(|&k| u[[1, k]] == 1.0).collect();
    let mut total = 0.0;
    for &k in &first {
        for &l in &second {
            total += s[[k, l]];
        }
    }
    Ok(total)
}

/// `(1/n) Σ_i Σ_k u_ik^m ‖v_i − x_k‖² − (γ/c) Σ_i Σ_t ‖v_i − v_t‖²`.
pub fn ics(data: &DataSet, model: &CategoryModel, partition: &Partition, m: f64, gamma: f64) -> Result<f64> {
    let x = features(data, "ics")?;
    let v = prototypes(model, "ics")?;
    check_shapes(x, v)?;
    let (c, n) = (v.nrows(), x.nrows());
    check_partition(partition, n, c)?;
    let u = partition.matrix();
    let mut compact = 0.0;
    for i in 0..c {
        for k in 0..n {
            let w = u[[i, k]];
            if w > 0.0 {
                compact += w.powf(m) * sq_dist(v.row(i), x.row(k));
            }
        }
    }
    let mut spread = 0.0;
    for i in 0..c {
        for t in 0..c {
            spread += sq_dist(v.row(i), v.row(t));
        }
    }
    Ok(compact / n as f64 - gamma / c as f64 * spread)
}

/// Objective maximized by sample-weighted Gaussian clustering:
/// `Σ_k (Σ_i α_i exp(−‖x_k − v_i‖²/(mβ)))^m`.
pub fn sample_weighted_gaussian_objective(
    data: &DataSet,
    prototypes_: ArrayView2<'_, f64>,
    alpha: &[f64],
    m: f64,
    beta: f64,
) -> Result<f64> {
    let x = features(data, "sample_weighted_objective")?;
    check_shapes(x, prototypes_)?;
    let scale = m * beta;
    let mut total = 0.0;
    for k in 0..x.nrows() {
        let inner: f64 = (0..prototypes_.nrows())
            .map(|i| alpha[i] * (-sq_dist(x.row(k), prototypes_.row(i)) / scale).exp())
            .sum();
        total += inner.powf(m);
    }
    Ok(total)
}

/// Logarithm of the objective maximized by sample-weighted multinomial
/// clustering, `ln Σ_k (Σ_i α_i Π_l θ_il^{A_kl/m})^m`.
pub fn sample_weighted_multinomial_log_objective(
    data: &DataSet,
    theta: ArrayView2<'_, f64>,
    alpha: &[f64],
    m: f64,
) -> Result<f64> {
    let a = data
        .adjacency()
        .map_err(|_| Error::MissingView { view: "adjacency", needed_by: "sample_weighted_objective" })?;
    if theta.ncols() != a.ncols() {
        return Err(Error::Dimension(format!("θ has {} columns for {} nodes", theta.ncols(), a.ncols())));
    }
    let per_object: Vec<f64> = (0..a.nrows())
        .map(|k| {
            let terms: Vec<f64> = (0..theta.nrows())
                .map(|i| {
                    let ll: f64 = a
                        .row(k)
                        .iter()
                        .zip(theta.row(i))
                        .filter(|(&akl, _)| akl > 0.0)
                        .map(|(&akl, &t)| akl * t.ln())
                        .sum();
                    alpha[i].ln() + ll / m
                })
                .collect();
            m * logsumexp(terms)
        })
        .collect();
    Ok(logsumexp(per_object))
}

/// Scatter decomposition of a hard partition with cluster-mean prototypes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Decomposition {
    /// `Σ_i Σ_k u_ik ‖x_k − v_i‖²`
    pub within: f64,
    /// `Σ_i Σ_k u_ik ‖v_i − x̄‖²`
    pub between: f64,
    /// `Σ_k ‖x_k − x̄‖²`
    pub total: f64,
    /// `within + between − total`
    pub residual: f64,
}

impl Decomposition {
    /// Whether `|residual| ≤ 1e-9 · (1 + total)`.
    pub fn holds(&self) -> bool {
        self.residual.abs() <= 1e-9 * (1.0 + self.total)
    }
}

/// Weighted cluster means `v_i = Σ_k u_ik x_k / Σ_k u_ik`.
pub fn cluster_means(data: &DataSet, partition: &Partition) -> Result<ndarray::Array2<f64>> {
    let x = features(data, "cluster_means")?;
    let (c, n) = (partition.clusters(), data.len());
    check_partition(partition, n, c)?;
    let u = partition.matrix();
    let mut v = ndarray::Array2::zeros((c, x.ncols()));
    for i in 0..c {
        let mass: f64 = u.row(i).sum();
        if !(mass > 0.0) {
            return Err(Error::Domain(format!("cluster {i} is empty")));
        }
        let mut row = Array1::<f64>::zeros(x.ncols());
        for k in 0..n {
            if u[[i, k]] != 0.0 {
                row.scaled_add(u[[i, k]], &x.row(k));
            }
        }
        v.row_mut(i).assign(&(row / mass));
    }
    Ok(v)
}

/// Computes within, between and total scatter for a hard partition.
pub fn decomposition_check(data: &DataSet, partition: &Partition) -> Result<Decomposition> {
    if partition.kind() != PartitionKind::Hard {
        return Err(Error::Domain("decomposition needs a hard partition".into()));
    }
    let v = cluster_means(data, partition)?;
    let x = features(data, "decomposition_check")?;
    let mean = data.mean()?;
    let u = partition.matrix();
    let (mut within, mut between) = (0.0, 0.0);
    for i in 0..v.nrows() {
        let spread = sq_dist(v.row(i), mean.view());
        for k in 0..x.nrows() {
            let w = u[[i, k]];
            if w != 0.0 {
                within += w * sq_dist(x.row(k), v.row(i));
                between += w * spread;
            }
        }
    }
    let total: f64 = (0..x.nrows()).map(|k| sq_dist(x.row(k), mean.view())).sum();
    Ok(Decomposition { within, between, total, residual: within + between - total })
}
