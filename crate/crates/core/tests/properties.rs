use approx::assert_relative_eq;
use axioclust::algorithms::{c_means, cml_gaussian, fuzzy_c_means, AlgoConfig};
use axioclust::categorization::CategoryModel;
use axioclust::criteria::{cluster_means, cml_loglik, cut, decomposition_check, mixture_loglik, sse};
use axioclust::data::DataSet;
use axioclust::partition::{make_uninformative, Partition, PartitionKind};
use axioclust::validity::{compute_index, IndexName, IndexOptions, Variant};
use ndarray::Array2;
use proptest::prelude::*;

fn features(n: usize, r: usize) -> impl Strategy<Value = Array2<f64>> {
    prop::collection::vec(-50.0f64..50.0, n * r).prop_map(move |v| Array2::from_shape_vec((n, r), v).unwrap())
}

/// Features plus labels that use every cluster at least once.
fn labelled(max_n: usize, max_r: usize, max_c: usize) -> impl Strategy<Value = (Array2<f64>, Vec<usize>, usize)> {
    (2..=max_c, 1..=max_r).prop_flat_map(move |(c, r)| {
        (c..=max_n).prop_flat_map(move |n| {
            (features(n, r), prop::collection::vec(0..c, n), Just(c)).prop_map(move |(x, mut l, c)| {
                for (i, slot) in l.iter_mut().take(c).enumerate() {
                    *slot = i;
                }
                (x, l, c)
            })
        })
    })
}

fn permute_rows(u: &Partition, perm: &[usize]) -> Partition {
    let m = u.matrix();
    let p = Array2::from_shape_fn(m.dim(), |(i, k)| m[[perm[i], k]]);
    Partition::new(p, u.kind()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn scatter_decomposes((x, labels, c) in labelled(30, 4, 5)) {
        let data = DataSet::from_features(x).unwrap();
        let u = Partition::from_labels(&labels, c).unwrap();
        let d = decomposition_check(&data, &u).unwrap();
        prop_assert!(d.holds(), "{d:?}");
        prop_assert!((d.within + d.between - d.total).abs() <= 1e-9 * (1.0 + d.total));
    }

    #[test]
    fn cml_with_unit_density_is_negative_sse((x, labels, c) in labelled(20, 3, 4)) {
        let data = DataSet::from_features(x).unwrap();
        let u = Partition::from_labels(&labels, c).unwrap();
        let v = cluster_means(&data, &u).unwrap();
        let model = CategoryModel::gaussian(v.clone(), 1.0, 1.0).unwrap();
        let ll = cml_loglik(&data, &model, &labels).unwrap();
        let s = sse(&data, &CategoryModel::prototypes(v).unwrap(), &u).unwrap();
        prop_assert!((ll + s).abs() <= 1e-12 * (1.0 + s));
    }

    #[test]
    fn mixture_never_beats_best_classification(
        (x, labels, c) in labelled(15, 2, 4),
        raw in prop::collection::vec(0.01f64..1.0, 4),
        sigma in 0.5f64..20.0,
    ) {
        let data = DataSet::from_features(x).unwrap();
        let u = Partition::from_labels(&labels, c).unwrap();
        let v = cluster_means(&data, &u).unwrap();
        let model = CategoryModel::gaussian(v.clone(), 1.0, sigma).unwrap();
        let total: f64 = raw[..c].iter().sum();
        let alpha: Vec<f64> = raw[..c].iter().map(|a| a / total).collect();
        let best: Vec<usize> = (0..data.len())
            .map(|k| {
                let d: Vec<f64> = (0..c)
                    .map(|i| (0..v.ncols()).map(|j| (v[[i, j]] - data.features().unwrap()[[k, j]]).powi(2)).sum())
                    .collect();
                (0..c).min_by(|&a, &b| d[a].total_cmp(&d[b])).unwrap()
            })
            .collect();
        let mix = mixture_loglik(&data, &model, &alpha).unwrap();
        let cml = cml_loglik(&data, &model, &best).unwrap();
        prop_assert!(mix <= cml + 1e-9 * (1.0 + cml.abs()), "{mix} > {cml}");
    }

    #[test]
    fn cut_ignores_label_names(n in 2usize..12, seed in any::<u64>(), bits in prop::collection::vec(any::<bool>(), 12)) {
        let mut s = Array2::zeros((n, n));
        let mut state = seed;
        for k in 0..n {
            for l in (k + 1)..n {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let w = (state >> 11) as f64 / (1u64 << 53) as f64;
                s[[k, l]] = w;
                s[[l, k]] = w;
            }
        }
        let data = DataSet::from_similarity(s).unwrap();
        let mut labels: Vec<usize> = bits[..n].iter().map(|&b| b as usize).collect();
        labels[0] = 0;
        labels[1] = 1;
        let swapped: Vec<usize> = labels.iter().map(|l| 1 - l).collect();
        let a = cut(&data, &Partition::from_labels(&labels, 2).unwrap()).unwrap();
        let b = cut(&data, &Partition::from_labels(&swapped, 2).unwrap()).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a));
    }

    #[test]
    fn indices_ignore_cluster_order((x, _labels, c) in labelled(16, 2, 4), seed in 0u64..1000) {
        let data = DataSet::from_features(x).unwrap();
        let fit = fuzzy_c_means(&data, &AlgoConfig::new(c).with_seed(seed)).unwrap();
        let perm: Vec<usize> = (0..c).rev().collect();
        let model = fit.model.permuted(&perm);
        let u = permute_rows(&fit.partition, &perm);
        for variant in [Variant::Paper, Variant::Standard] {
            let opts = IndexOptions { variant, ..IndexOptions::default() };
            for index in IndexName::ALL {
                let a = compute_index(index, &data, Some(&fit.model), &fit.partition, &opts).unwrap();
                let b = compute_index(index, &data, Some(&model), &u, &opts).unwrap();
                match (a.value, b.value) {
                    (Some(p), Some(q)) if p.is_finite() => {
                        prop_assert!((p - q).abs() <= 1e-9 * (1.0 + p.abs()), "{index}: {p} vs {q}")
                    }
                    (p, q) => prop_assert_eq!(p, q, "{}", index),
                }
            }
        }
    }

    #[test]
    fn coefficient_and_entropy_bounds(c in 1usize..6, n in 1usize..10, raw in prop::collection::vec(0.0f64..1.0, 60)) {
        let mut u = Array2::zeros((c, n));
        for k in 0..n {
            let col: Vec<f64> = (0..c).map(|i| raw[i * 10 + k] + 1e-3).collect();
            let s: f64 = col.iter().sum();
            for i in 0..c {
                u[[i, k]] = col[i] / s;
            }
        }
        let data = DataSet::from_points(&(0..n).map(|k| k as f64).collect::<Vec<_>>()).unwrap();
        let u = Partition::new(u, PartitionKind::Soft).unwrap();
        let o = IndexOptions::default();
        let pc = compute_index(IndexName::PartitionCoefficient, &data, None, &u, &o).unwrap().value.unwrap();
        let pe = compute_index(IndexName::PartitionEntropy, &data, None, &u, &o).unwrap().value.unwrap();
        let cf = c as f64;
        prop_assert!(pc >= 1.0 / cf - 1e-12 && pc <= 1.0 + 1e-12);
        prop_assert!(pe >= -1e-12 && pe <= cf.ln() + 1e-12);
    }
}

#[test]
fn cml_tracks_c_means_label_for_label() {
    let data = DataSet::from_points(&[0.0, 0.4, 1.1, 3.9, 4.3, 5.0, 8.8, 9.5, 10.2, 2.4, 6.7]).unwrap();
    for seed in 0..20 {
        let cfg = AlgoConfig::new(3).with_seed(seed);
        let a = c_means(&data, &cfg).unwrap();
        let b = cml_gaussian(&data, &cfg).unwrap();
        assert_eq!(a.labels(1e-12), b.labels(1e-12), "seed {seed}");
        let s = sse(&data, &a.model, &a.partition).unwrap();
        assert_relative_eq!(*b.trace.last().unwrap(), -s, epsilon = 1e-12);
    }
}

#[test]
fn extreme_partitions_hit_the_bounds() {
    let data = DataSet::from_points(&[0.0, 1.0, 2.0, 3.0]).unwrap();
    let o = IndexOptions::default();
    let hard = Partition::from_labels(&[0, 1, 2, 0], 3).unwrap();
    let flat = make_uninformative(&[1.0 / 3.0; 3], 4).unwrap();
    let pc = |u: &Partition| compute_index(IndexName::PartitionCoefficient, &data, None, u, &o).unwrap().value.unwrap();
    assert_eq!(pc(&hard), 1.0);
    assert_relative_eq!(pc(&flat), 1.0 / 3.0, epsilon = 1e-15);
}
