//! Sample-weighted clustering with a Gaussian or multinomial category model.
//!
//! Each sweep updates, in order, memberships `u`, sample weights `a`, the
//! category parameters (prototypes or `θ`), and mixing weights `α`. The
//! framework runs the last two as its model step and the first two as its
//! partition step. Sample weights are kept as `log a_k` and rescaled by
//! their maximum before use, which leaves every ratio-form update unchanged.

use ndarray::{Array2, ArrayView2};
use rand_chacha::ChaCha8Rng;

use super::framework::{run_framework, AlternatingScheme, Assignment, Start};
use super::{random_labels, seed_rows, weighted_means, AlgoConfig, Init};
use crate::categorization::{AffinityMap, CategoryModel, ClusteringResult};
use crate::data::DataSet;
use crate::error::{Error, Result};
use crate::numeric::{logsumexp, sq_dist};
use crate::partition::{Partition, PartitionKind};

/// Smallest mixing weight kept, so `ln α` stays finite.
const ALPHA_FLOOR: f64 = 1e-300;

fn check_m(m: f64) -> Result<()> {
    if !(m >= 1.0) || !m.is_finite() {
        return Err(Error::Config(format!("sample weighting needs m ≥ 1, got {m}")));
    }
    Ok(())
}

fn random_start(n: usize, cfg: &AlgoConfig, rng: &mut ChaCha8Rng) -> Result<Start> {
    let labels = random_labels(n, cfg.c, rng);
    Ok(Start::Assignment(Assignment {
        partition: Partition::from_labels(&labels, cfg.c)?,
        log_weights: Some(vec![0.0; n]),
    }))
}

/// `w_ik = (a_k / max a) · u_ik`. All weights equal when every `a_k` is zero.
fn scaled_weights(a: &Assignment) -> Array2<f64> {
    let u = a.partition.matrix();
    let la = a.log_weights.as_deref();
    let max = la.map_or(0.0, |l| l.iter().copied().fold(f64::NEG_INFINITY, f64::max));
    let w: Vec<f64> = (0..u.ncols())
        .map(|k| match la {
            Some(l) if max.is_finite() => (l[k] - max).exp(),
            _ => 1.0,
        })
        .collect();
    Array2::from_shape_fn(u.dim(), |(i, k)| w[k] * u[[i, k]])
}

/// `α_i = Σ_k w_ik / Σ_i Σ_k w_ik`, floored and renormalized.
fn mixing_from(w: &Array2<f64>) -> Vec<f64> {
    let total: f64 = w.sum();
    let c = w.nrows();
    let mut alpha: Vec<f64> = (0..c)
        .map(|i| if total > 0.0 { w.row(i).sum() / total } else { 1.0 / c as f64 })
        .map(|a| a.max(ALPHA_FLOOR))
        .collect();
    let s: f64 = alpha.iter().sum();
    alpha.iter_mut().for_each(|a| *a /= s);
    alpha
}

/// Memberships and `log a_k` from per-object log scores `e_ik`.
///
/// An object whose scores are all `-inf` gets memberships `α` and weight
/// zero.
fn responsibilities(scores: &Array2<f64>, alpha: &[f64], m: f64) -> Result<Assignment> {
    let (c, n) = scores.dim();
    let mut u = Array2::zeros((c, n));
    let mut la = vec![0.0; n];
    for k in 0..n {
        let col = scores.column(k);
        let lse = logsumexp(col.iter().copied());
        if lse == f64::NEG_INFINITY {
            for i in 0..c {
                u[[i, k]] = alpha[i];
            }
            la[k] = f64::NEG_INFINITY;
            continue;
        }
        let mut s = 0.0;
        for i in 0..c {
            u[[i, k]] = (col[i] - lse).exp();
            s += u[[i, k]];
        }
        for i in 0..c {
            u[[i, k]] /= s;
        }
        la[k] = m * lse;
    }
    Ok(Assignment { partition: Partition::new(u, PartitionKind::Soft)?, log_weights: Some(la) })
}

fn uniform(c: usize) -> Vec<f64> {
    vec![1.0 / c as f64; c]
}

/// Sample-weighted clustering with Gaussian similarity
/// `α_i exp(−‖x_k − v_i‖²/(mβ))`.
#[derive(Debug, Clone, Copy)]
pub struct SampleWeightedGaussian {
    pub m: f64,
    pub beta: f64,
}

impl SampleWeightedGaussian {
    pub fn new(m: f64, beta: f64) -> Result<Self> {
        check_m(m)?;
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(Error::Config(format!("β must be positive, got {beta}")));
        }
        Ok(SampleWeightedGaussian { m, beta })
    }

    fn features<'a>(&self, data: &'a DataSet) -> Result<ArrayView2<'a, f64>> {
        data.features().map_err(|_| Error::MissingView {
            view: "features",
            needed_by: "sample_weighted_gaussian",
        })
    }

    fn parts<'a>(&self, model: &'a CategoryModel) -> Result<(ArrayView2<'a, f64>, Vec<f64>)> {
        match model {
            CategoryModel::Prototype { prototypes, mixing } => Ok((
                prototypes.view(),
                mixing.clone().unwrap_or_else(|| uniform(prototypes.nrows())),
            )),
            other => Err(Error::IncompatibleMap { map: "weighted_gaussian", model: other.variant_name() }),
        }
    }
}

impl AlternatingScheme for SampleWeightedGaussian {
    fn name(&self) -> &'static str {
        "sample_weighted_gaussian"
    }

    fn start(&self, data: &DataSet, cfg: &AlgoConfig, rng: &mut ChaCha8Rng) -> Result<Start> {
        let x = self.features(data)?;
        if cfg.init == Init::RandomPartition {
            return random_start(x.nrows(), cfg, rng);
        }
        let rows = seed_rows(x, cfg.c, cfg.init, rng);
        let v = Array2::from_shape_fn((cfg.c, x.ncols()), |(i, o)| x[[rows[i], o]]);
        Ok(Start::Model(CategoryModel::Prototype { prototypes: v, mixing: Some(uniform(cfg.c)) }))
    }

    fn model_step(&self, data: &DataSet, a: &Assignment) -> Result<CategoryModel> {
        let x = self.features(data)?;
        let w = scaled_weights(a);
        Ok(CategoryModel::Prototype { prototypes: weighted_means(x, w.view()), mixing: Some(mixing_from(&w)) })
    }

    fn partition_step(&self, data: &DataSet, model: &CategoryModel) -> Result<Assignment> {
        let x = self.features(data)?;
        let (v, alpha) = self.parts(model)?;
        if v.ncols() != x.ncols() {
            return Err(Error::Dimension(format!("features have dimension {}, prototypes {}", x.ncols(), v.ncols())));
        }
        let scale = self.m * self.beta;
        let scores = Array2::from_shape_fn((v.nrows(), x.nrows()), |(i, k)| {
            alpha[i].ln() - sq_dist(x.row(k), v.row(i)) / scale
        });
        responsibilities(&scores, &alpha, self.m)
    }

    fn objective(&self, data: &DataSet, model: &CategoryModel, _: &Assignment) -> Result<f64> {
        let (v, alpha) = self.parts(model)?;
        crate::criteria::sample_weighted_gaussian_objective(data, v, &alpha, self.m, self.beta)
    }

    fn affinity(&self) -> AffinityMap {
        AffinityMap::WeightedGaussian { beta: self.beta, m: self.m }
    }
}

/// Runs sample-weighted Gaussian clustering with `cfg.m` and `cfg.beta`.
/// The trace holds `Σ_k (Σ_i α_i exp(−‖x_k − v_i‖²/(mβ)))^m`.
pub fn sample_weighted_gaussian(data: &DataSet, cfg: &AlgoConfig) -> Result<ClusteringResult> {
    run_framework(data, cfg, &SampleWeightedGaussian::new(cfg.m, cfg.beta)?)
}

/// Sample-weighted clustering of a graph with multinomial category models
/// `θ_i` over nodes.
#[derive(Debug, Clone, Copy)]
pub struct SampleWeightedMultinomial {
    pub m: f64,
}

impl SampleWeightedMultinomial {
    pub fn new(m: f64) -> Result<Self> {
        check_m(m)?;
        Ok(SampleWeightedMultinomial { m })
    }

    fn adjacency<'a>(&self, data: &'a DataSet) -> Result<ArrayView2<'a, f64>> {
        data.adjacency().map_err(|_| Error::MissingView {
            view: "adjacency",
            needed_by: "sample_weighted_multinomial",
        })
    }

    fn parts<'a>(&self, model: &'a CategoryModel) -> Result<(ArrayView2<'a, f64>, Vec<f64>)> {
        match model {
            CategoryModel::Multinomial { theta, mixing } => {
                Ok((theta.view(), mixing.clone().unwrap_or_else(|| uniform(theta.nrows()))))
            }
            other => Err(Error::IncompatibleMap { map: "weighted_multinomial", model: other.variant_name() }),
        }
    }
}

impl AlternatingScheme for SampleWeightedMultinomial {
    fn name(&self) -> &'static str {
        "sample_weighted_multinomial"
    }

    fn start(&self, data: &DataSet, cfg: &AlgoConfig, rng: &mut ChaCha8Rng) -> Result<Start> {
        let a = self.adjacency(data)?;
        data.require_no_isolated_nodes()?;
        let n = a.nrows();
        if cfg.init == Init::RandomPartition {
            return random_start(n, cfg, rng);
        }
        let d = data.degrees()?;
        let profiles = Array2::from_shape_fn((n, n), |(k, l)| a[[k, l]] / d[k]);
        let rows = seed_rows(profiles.view(), cfg.c, cfg.init, rng);
        // Seed θ_i from the neighbourhood of one node, itself included, mixed
        // half and half with the uniform distribution so no node starts at
        // probability zero.
        let theta = Array2::from_shape_fn((cfg.c, n), |(i, l)| {
            let k = rows[i];
            let own = if l == k { 1.0 } else { 0.0 };
            0.5 * (a[[k, l]] + own) / (d[k] + 1.0) + 0.5 / n as f64
        });
        Ok(Start::Model(CategoryModel::Multinomial { theta, mixing: Some(uniform(cfg.c)) }))
    }

    fn model_step(&self, data: &DataSet, asg: &Assignment) -> Result<CategoryModel> {
        let a = self.adjacency(data)?;
        let d = data.degrees()?;
        let w = scaled_weights(asg);
        let (c, n) = (w.nrows(), a.nrows());
        let mut theta = Array2::zeros((c, n));
        for i in 0..c {
            let denom: f64 = (0..n).map(|k| w[[i, k]] * d[k]).sum();
            if !(denom > 0.0) {
                theta.row_mut(i).fill(1.0 / n as f64);
                continue;
            }
            for l in 0..n {
                let num: f64 = (0..n).map(|k| w[[i, k]] * a[[k, l]]).sum();
                theta[[i, l]] = num / denom;
            }
            // Exact in theory; renormalizing removes rounding drift.
            let s: f64 = theta.row(i).sum();
            theta.row_mut(i).mapv_inplace(|t| t / s);
        }
        Ok(CategoryModel::Multinomial { theta, mixing: Some(mixing_from(&w)) })
    }

    fn partition_step(&self, data: &DataSet, model: &CategoryModel) -> Result<Assignment> {
        let a = self.adjacency(data)?;
        let (theta, alpha) = self.parts(model)?;
        if theta.ncols() != a.ncols() {
            return Err(Error::Dimension(format!("θ has {} columns for {} nodes", theta.ncols(), a.ncols())));
        }
        let log_theta = theta.mapv(f64::ln);
        let scores = Array2::from_shape_fn((theta.nrows(), a.nrows()), |(i, k)| {
            let ll: f64 = a
                .row(k)
                .iter()
                .zip(log_theta.row(i))
                .filter(|(&akl, _)| akl > 0.0)
                .map(|(&akl, &lt)| akl * lt)
                .sum();
            alpha[i].ln() + ll / self.m
        });
        responsibilities(&scores, &alpha, self.m)
    }

    fn objective(&self, data: &DataSet, model: &CategoryModel, _: &Assignment) -> Result<f64> {
        let (theta, alpha) = self.parts(model)?;
        crate::criteria::sample_weighted_multinomial_log_objective(data, theta, &alpha, self.m)
    }

    fn affinity(&self) -> AffinityMap {
        AffinityMap::WeightedMultinomial { m: self.m }
    }

    fn trace_is_log(&self) -> bool {
        true
    }
}

/// Runs sample-weighted multinomial clustering with `cfg.m`. The trace holds
/// the logarithm of `Σ_k (Σ_i α_i Π_l θ_il^{A_kl/m})^m`.
pub fn sample_weighted_multinomial(data: &DataSet, cfg: &AlgoConfig) -> Result<ClusteringResult> {
    run_framework(data, cfg, &SampleWeightedMultinomial::new(cfg.m)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithms::framework::run_framework_observed;
    use crate::categorization::AxiomReport;
    use crate::numeric::DEFAULT_TIE_TOL as TOL;

    fn d4() -> DataSet {
        DataSet::from_points(&[0.0, 1.0, 10.0, 11.0]).unwrap()
    }

    pub(crate) fn two_cliques() -> DataSet {
        let mut a = Array2::zeros((8, 8));
        for block in [0, 4] {
            for k in block..block + 4 {
                for l in block..block + 4 {
                    if k != l {
                        a[[k, l]] = 1.0;
                    }
                }
            }
        }
        DataSet::from_adjacency(a).unwrap()
    }

    #[test]
    fn gaussian_splits_fixture() {
        let cfg = AlgoConfig::new(2).with_m(1.0).with_beta(1.0);
        let r = sample_weighted_gaussian(&d4(), &cfg).unwrap();
        let mut g = r.groups(TOL);
        g.sort();
        assert_eq!(g, vec![vec![0, 1], vec![2, 3]]);
        assert!(AxiomReport::evaluate(&d4(), &r, TOL).unwrap().equivalency.holds);
        assert_eq!(r.sample_weights.as_ref().unwrap().len(), 4);
    }

    #[test]
    fn gaussian_simplexes_hold_every_sweep() {
        let scheme = SampleWeightedGaussian::new(2.0, 3.0).unwrap();
        let data = DataSet::from_points(&[0.0, 0.5, 2.0, 6.0, 6.1, 9.0, 13.0]).unwrap();
        let mut sweeps = 0;
        run_framework_observed(&data, &AlgoConfig::new(3), &scheme, &mut |s| {
            sweeps += 1;
            let alpha = s.model.mixing().unwrap();
            assert!((alpha.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
            for k in 0..data.len() {
                assert!((s.assignment.partition.column(k).sum() - 1.0).abs() <= 1e-12);
            }
            assert!(s.objective.is_finite());
        })
        .unwrap();
        assert!(sweeps > 0);
    }

    #[test]
    fn gaussian_single_cluster_second_sweep() {
        // From unit weights the first sweep gives the plain mean v₁. The second
        // uses a_k = exp(−(x_k − v₁)²/(mβ))^m and returns the a-weighted mean.
        let (m, beta) = (2.0, 5.0);
        let x = [0.0, 1.0, 10.0];
        let mut cfg = AlgoConfig::new(1).with_m(m).with_beta(beta).with_init(Init::RandomPartition);
        cfg.max_iterations = 2;
        let r = sample_weighted_gaussian(&DataSet::from_points(&x).unwrap(), &cfg).unwrap();
        let v1 = 11.0 / 3.0;
        let a: Vec<f64> = x.iter().map(|p: &f64| (-(p - v1).powi(2) / (m * beta)).exp().powf(m)).collect();
        let want = a.iter().zip(&x).map(|(a, x)| a * x).sum::<f64>() / a.iter().sum::<f64>();
        let v = r.model.prototype_matrix().unwrap()[[0, 0]];
        assert_eq!(r.iterations, 2);
        assert!((v - want).abs() < 1e-12, "{v} vs {want}");
        assert_eq!(r.model.mixing().unwrap(), &[1.0]);
    }

    #[test]
    fn gaussian_wide_kernel_tends_to_the_mean() {
        let cfg = AlgoConfig::new(1).with_m(1.0).with_beta(1e9);
        let r = sample_weighted_gaussian(&d4(), &cfg).unwrap();
        assert!((r.model.prototype_matrix().unwrap()[[0, 0]] - 5.5).abs() < 1e-6);
    }

    #[test]
    fn multinomial_recovers_cliques() {
        let data = two_cliques();
        for seed in 0..10 {
            let cfg = AlgoConfig::new(2).with_seed(seed).with_m(1.0);
            let r = sample_weighted_multinomial(&data, &cfg).unwrap();
            let mut g = r.groups(TOL);
            g.sort();
            assert_eq!(g, vec![vec![0, 1, 2, 3], vec![4, 5, 6, 7]], "seed {seed}");
            assert!(r.trace_is_log);
        }
    }

    #[test]
    fn multinomial_theta_rows_are_distributions_every_sweep() {
        let scheme = SampleWeightedMultinomial::new(2.0).unwrap();
        run_framework_observed(&two_cliques(), &AlgoConfig::new(2).with_seed(3), &scheme, &mut |s| {
            if let CategoryModel::Multinomial { theta, mixing } = s.model {
                for row in theta.rows() {
                    assert!((row.sum() - 1.0).abs() <= 1e-12);
                }
                assert!((mixing.as_ref().unwrap().iter().sum::<f64>() - 1.0).abs() <= 1e-12);
            } else {
                panic!("wrong model");
            }
        })
        .unwrap();
    }

    #[test]
    fn multinomial_single_cluster_first_sweep_is_degree_share() {
        // With u ≡ 1 and a ≡ 1 the first θ update is d_l / Σ_k d_k.
        let mut a = Array2::zeros((4, 4));
        for (k, l, w) in [(0, 1, 1.0), (1, 2, 2.0), (2, 3, 1.0), (0, 3, 3.0)] {
            a[[k, l]] = w;
            a[[l, k]] = w;
        }
        let data = DataSet::from_adjacency(a).unwrap();
        let mut cfg = AlgoConfig::new(1).with_m(1.5).with_init(Init::RandomPartition);
        cfg.max_iterations = 1;
        let r = sample_weighted_multinomial(&data, &cfg).unwrap();
        let CategoryModel::Multinomial { theta, .. } = &r.model else { panic!() };
        let want = [4.0 / 14.0, 3.0 / 14.0, 3.0 / 14.0, 4.0 / 14.0];
        for (t, w) in theta.iter().zip(want) {
            assert!((t - w).abs() < 1e-15);
        }
    }

    #[test]
    fn multinomial_degree_share_is_an_unstable_fixed_point() {
        // On a regular graph θ = d / Σd is reproduced exactly from unit
        // weights, but a seeded start piles θ onto one clique instead, which
        // scores higher.
        let uniform = AlgoConfig::new(1).with_m(1.0).with_init(Init::RandomPartition);
        let r = sample_weighted_multinomial(&two_cliques(), &uniform).unwrap();
        let CategoryModel::Multinomial { theta, .. } = &r.model else { panic!() };
        assert!(theta.iter().all(|&t| (t - 0.125).abs() < 1e-15));
        let flat = *r.trace.last().unwrap();
        assert!((flat - (8.0f64 / 512.0).ln()).abs() < 1e-12);

        let seeded = sample_weighted_multinomial(&two_cliques(), &AlgoConfig::new(1).with_m(1.0)).unwrap();
        let peaked = *seeded.trace.last().unwrap();
        assert!((peaked - (4.0f64 / 64.0).ln()).abs() < 1e-9, "{peaked}");
        assert!(seeded.trace.windows(2).all(|w| w[1] >= w[0] - 1e-12));
    }

    #[test]
    fn isolated_node_rejected() {
        let mut a = Array2::zeros((3, 3));
        a[[0, 1]] = 1.0;
        a[[1, 0]] = 1.0;
        let data = DataSet::from_adjacency(a).unwrap();
        let err = sample_weighted_multinomial(&data, &AlgoConfig::new(2)).unwrap_err();
        assert_eq!(err, Error::IsolatedNode { node: 2 });
    }

    #[test]
    fn random_partition_start_uses_unit_weights() {
        let cfg = AlgoConfig::new(2).with_init(Init::RandomPartition).with_m(1.0);
        let r = sample_weighted_gaussian(&d4(), &cfg).unwrap();
        assert!(r.trace.iter().all(|j| j.is_finite()));
    }
}
