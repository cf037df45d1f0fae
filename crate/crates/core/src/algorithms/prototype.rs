//! Prototype-based alternating algorithms: C-means, fuzzy C-means and
//! hard classification maximum likelihood with a fixed-width Gaussian.

use ndarray::{Array2, ArrayView2};
use rand_chacha::ChaCha8Rng;

use super::framework::{run_framework, AlternatingScheme, Assignment, Start};
use super::{random_labels, seed_rows, weighted_means, AlgoConfig, Init};
use crate::categorization::{AffinityMap, CategoryModel, ClusteringResult};
use crate::data::DataSet;
use crate::error::{Error, Result};
use crate::numeric::sq_dist;
use crate::partition::{Partition, PartitionKind};

fn features<'a>(data: &'a DataSet, needed_by: &'static str) -> Result<ArrayView2<'a, f64>> {
    data.features().map_err(|_| Error::MissingView { view: "features", needed_by })
}

fn prototypes(model: &CategoryModel) -> Result<ArrayView2<'_, f64>> {
    model.prototype_matrix().ok_or(Error::IncompatibleMap {
        map: "prototype step",
        model: model.variant_name(),
    })
}

/// Starting point shared by the prototype algorithms.
fn start_prototypes(x: ArrayView2<'_, f64>, cfg: &AlgoConfig, rng: &mut ChaCha8Rng) -> Result<Start> {
    if cfg.init == Init::RandomPartition {
        let labels = random_labels(x.nrows(), cfg.c, rng);
        return Ok(Start::Assignment(Assignment::plain(Partition::from_labels(&labels, cfg.c)?)));
    }
    let rows = seed_rows(x, cfg.c, cfg.init, rng);
    let v = Array2::from_shape_fn((cfg.c, x.ncols()), |(i, o)| x[[rows[i], o]]);
    Ok(Start::Model(CategoryModel::prototypes(v)?))
}

/// Index of the nearest prototype; the smallest index wins exact ties.
fn nearest(x: ArrayView2<'_, f64>, v: ArrayView2<'_, f64>, k: usize) -> usize {
    let mut best = 0;
    let mut best_d = sq_dist(x.row(k), v.row(0));
    for i in 1..v.nrows() {
        let d = sq_dist(x.row(k), v.row(i));
        if d < best_d {
            best = i;
            best_d = d;
        }
    }
    best
}

fn nearest_partition(x: ArrayView2<'_, f64>, v: ArrayView2<'_, f64>) -> Result<Partition> {
    let labels: Vec<usize> = (0..x.nrows()).map(|k| nearest(x, v, k)).collect();
    Partition::from_labels(&labels, v.nrows())
}

fn check_dims(x: ArrayView2<'_, f64>, v: ArrayView2<'_, f64>) -> Result<()> {
    if x.ncols() != v.ncols() {
        return Err(Error::Dimension(format!("features have dimension {}, prototypes {}", x.ncols(), v.ncols())));
    }
    Ok(())
}

/// Hard C-means: cluster means, then nearest-prototype assignment.
#[derive(Debug, Clone, Copy, Default)]
pub struct CMeans;

impl AlternatingScheme for CMeans {
    fn name(&self) -> &'static str {
        "c_means"
    }

    fn start(&self, data: &DataSet, cfg: &AlgoConfig, rng: &mut ChaCha8Rng) -> Result<Start> {
        start_prototypes(features(data, "c_means")?, cfg, rng)
    }

    fn model_step(&self, data: &DataSet, a: &Assignment) -> Result<CategoryModel> {
        let x = features(data, "c_means")?;
        CategoryModel::prototypes(weighted_means(x, a.partition.matrix()))
    }

    fn partition_step(&self, data: &DataSet, model: &CategoryModel) -> Result<Assignment> {
        let x = features(data, "c_means")?;
        let v = prototypes(model)?;
        check_dims(x, v)?;
        Ok(Assignment::plain(nearest_partition(x, v)?))
    }

    fn objective(&self, data: &DataSet, model: &CategoryModel, a: &Assignment) -> Result<f64> {
        crate::criteria::sse(data, model, &a.partition)
    }

    fn affinity(&self) -> AffinityMap {
        AffinityMap::SqEuclidean
    }
}

/// Runs hard C-means. The trace holds the sum of squared errors.
pub fn c_means(data: &DataSet, cfg: &AlgoConfig) -> Result<ClusteringResult> {
    run_framework(data, cfg, &CMeans)
}

/// Fuzzy C-means with fuzzifier `m > 1`.
#[derive(Debug, Clone, Copy)]
pub struct FuzzyCMeans {
    pub m: f64,
}

impl FuzzyCMeans {
    pub fn new(m: f64) -> Result<Self> {
        if !(m > 1.0) || !m.is_finite() {
            return Err(Error::Config(format!("fuzzy C-means needs m > 1, got {m}")));
        }
        Ok(FuzzyCMeans { m })
    }

    /// Memberships of one object given its squared distances. Objects sitting
    /// on prototypes split their membership evenly among those prototypes.
    fn memberships(&self, d: &[f64], out: &mut [f64]) {
        let zeros = d.iter().filter(|&&di| di == 0.0).count();
        if zeros > 0 {
            for (o, &di) in out.iter_mut().zip(d) {
                *o = if di == 0.0 { 1.0 / zeros as f64 } else { 0.0 };
            }
            return;
        }
        // u_i ∝ d_i^{-1/(m-1)}, normalized through logs.
        let p = 1.0 / (self.m - 1.0);
        let logs: Vec<f64> = d.iter().map(|di| -p * di.ln()).collect();
        let lse = crate::numeric::logsumexp(logs.iter().copied());
        for (o, l) in out.iter_mut().zip(&logs) {
            *o = (l - lse).exp();
        }
        let s: f64 = out.iter().sum();
        out.iter_mut().for_each(|o| *o /= s);
    }
}

impl AlternatingScheme for FuzzyCMeans {
    fn name(&self) -> &'static str {
        "fuzzy_c_means"
    }

    fn start(&self, data: &DataSet, cfg: &AlgoConfig, rng: &mut ChaCha8Rng) -> Result<Start> {
        start_prototypes(features(data, "fuzzy_c_means")?, cfg, rng)
    }

    fn model_step(&self, data: &DataSet, a: &Assignment) -> Result<CategoryModel> {
        let x = features(data, "fuzzy_c_means")?;
        let w = a.partition.matrix().mapv(|u| u.powf(self.m));
        CategoryModel::prototypes(weighted_means(x, w.view()))
    }

    fn partition_step(&self, data: &DataSet, model: &CategoryModel) -> Result<Assignment> {
        let x = features(data, "fuzzy_c_means")?;
        let v = prototypes(model)?;
        check_dims(x, v)?;
        let (c, n) = (v.nrows(), x.nrows());
        let mut u = Array2::zeros((c, n));
        let mut d = vec![0.0; c];
        let mut col = vec![0.0; c];
        for k in 0..n {
            for (i, di) in d.iter_mut().enumerate() {
                *di = sq_dist(x.row(k), v.row(i));
            }
            self.memberships(&d, &mut col);
            for i in 0..c {
                u[[i, k]] = col[i];
            }
        }
        Ok(Assignment::plain(Partition::new(u, PartitionKind::Soft)?))
    }

    fn objective(&self, data: &DataSet, model: &CategoryModel, a: &Assignment) -> Result<f64> {
        let x = features(data, "fuzzy_c_means")?;
        let v = prototypes(model)?;
        let u = a.partition.matrix();
        let mut total = 0.0;
        for i in 0..v.nrows() {
            for k in 0..x.nrows() {
                if u[[i, k]] > 0.0 {
                    total += u[[i, k]].powf(self.m) * sq_dist(x.row(k), v.row(i));
                }
            }
        }
        Ok(total)
    }

    fn affinity(&self) -> AffinityMap {
        AffinityMap::SqEuclidean
    }
}

/// Runs fuzzy C-means with `cfg.m`. The trace holds `Σ_i Σ_k u_ik^m ‖x_k − v_i‖²`.
pub fn fuzzy_c_means(data: &DataSet, cfg: &AlgoConfig) -> Result<ClusteringResult> {
    run_framework(data, cfg, &FuzzyCMeans::new(cfg.m)?)
}

/// Hard classification maximum likelihood under `κ·exp(−‖x − v‖²/σ)`.
#[derive(Debug, Clone, Copy)]
pub struct CmlGaussian {
    pub kappa: f64,
    pub sigma: f64,
}

impl CmlGaussian {
    pub fn new(kappa: f64, sigma: f64) -> Result<Self> {
        if !(kappa > 0.0) || !(sigma > 0.0) {
            return Err(Error::Config(format!("need κ > 0 and σ > 0, got κ={kappa}, σ={sigma}")));
        }
        Ok(CmlGaussian { kappa, sigma })
    }
}

impl AlternatingScheme for CmlGaussian {
    fn name(&self) -> &'static str {
        "cml_gaussian"
    }

    fn start(&self, data: &DataSet, cfg: &AlgoConfig, rng: &mut ChaCha8Rng) -> Result<Start> {
        Ok(match start_prototypes(features(data, "cml_gaussian")?, cfg, rng)? {
            Start::Model(m) => {
                let v = prototypes(&m)?.to_owned();
                Start::Model(CategoryModel::gaussian(v, self.kappa, self.sigma)?)
            }
            s => s,
        })
    }

    fn model_step(&self, data: &DataSet, a: &Assignment) -> Result<CategoryModel> {
        let x = features(data, "cml_gaussian")?;
        CategoryModel::gaussian(weighted_means(x, a.partition.matrix()), self.kappa, self.sigma)
    }

    fn partition_step(&self, data: &DataSet, model: &CategoryModel) -> Result<Assignment> {
        // The density is a decreasing function of distance, so the most
        // likely category is the nearest prototype.
        let x = features(data, "cml_gaussian")?;
        let v = prototypes(model)?;
        check_dims(x, v)?;
        Ok(Assignment::plain(nearest_partition(x, v)?))
    }

    fn objective(&self, data: &DataSet, model: &CategoryModel, a: &Assignment) -> Result<f64> {
        let labels = a.partition.hard_assignment(0.0).labels;
        crate::criteria::cml_loglik(data, model, &labels)
    }

    fn affinity(&self) -> AffinityMap {
        AffinityMap::Density
    }
}

/// Runs hard classification maximum likelihood with `cfg.kappa` and
/// `cfg.sigma`. The trace holds the log-likelihood.
pub fn cml_gaussian(data: &DataSet, cfg: &AlgoConfig) -> Result<ClusteringResult> {
    run_framework(data, cfg, &CmlGaussian::new(cfg.kappa, cfg.sigma)?)
}
