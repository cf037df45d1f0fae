//! Agglomerative single linkage.

use crate::categorization::{AffinityMap, CategoryModel, ClusteringResult};
use crate::data::DataSet;
use crate::error::{Error, Result};
use crate::partition::Partition;

/// Single-linkage clustering into `c` clusters on the similarity view.
///
/// Starts from singletons and merges the pair of clusters with the largest
/// max-link similarity `n − c` times. Clusters are kept ordered by their
/// smallest member; among equally similar pairs the lexicographically
/// smallest `(i, j)` is merged. The trace records each merge's similarity.
pub fn single_linkage(data: &DataSet, c: usize) -> Result<ClusteringResult> {
    let s = data.similarity().map_err(|_| Error::MissingView {
        view: "similarity",
        needed_by: "single_linkage",
    })?;
    let n = data.len();
    if c == 0 || c > n {
        return Err(Error::Config(format!("c = {c} must lie in [1, {n}]")));
    }

    let mut clusters: Vec<Vec<usize>> = (0..n).map(|k| vec![k]).collect();
    // link[i][j] is the max-link similarity between clusters i and j.
    let mut link: Vec<Vec<f64>> = (0..n).map(|k| s.row(k).to_vec()).collect();
    let mut trace = Vec::with_capacity(n - c);

    while clusters.len() > c {
        let m = clusters.len();
        let (mut bi, mut bj, mut best) = (0, 1, f64::NEG_INFINITY);
        for i in 0..m {
            for j in (i + 1)..m {
                if link[i][j] > best {
                    (bi, bj, best) = (i, j, link[i][j]);
                }
            }
        }
        trace.push(best);
        let absorbed = clusters.remove(bj);
        clusters[bi].extend(absorbed);
        clusters[bi].sort_unstable();
        let row_j = link.remove(bj);
        for row in link.iter_mut() {
            row.remove(bj);
        }
        for t in 0..link.len() {
            if t != bi {
                let merged = link[bi][t].max(row_j[if t < bj { t } else { t + 1 }]);
                link[bi][t] = merged;
                link[t][bi] = merged;
            }
        }
    }

    let mut labels = vec![0; n];
    for (i, members) in clusters.iter().enumerate() {
        for &k in members {
            labels[k] = i;
        }
    }
    let merges = trace.len();
    Ok(ClusteringResult {
        algorithm: "single_linkage".into(),
        model: CategoryModel::exemplars(clusters)?,
        partition: Partition::from_labels(&labels, c)?,
        affinity: AffinityMap::MaxLink,
        trace,
        trace_is_log: false,
        seed: 0,
        iterations: merges,
        converged: true,
        sample_weights: None,
        log_sample_weights: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::categorization::AxiomReport;
    use crate::numeric::DEFAULT_TIE_TOL as TOL;
    use ndarray::Array2;

    fn d4() -> DataSet {
        DataSet::from_points(&[0.0, 1.0, 10.0, 11.0])
            .unwrap()
            .with_inverse_distance_similarity()
            .unwrap()
    }

    #[test]
    fn splits_the_fixture() {
        let r = single_linkage(&d4(), 2).unwrap();
        assert_eq!(r.groups(TOL), vec![vec![0, 1], vec![2, 3]]);
        assert_eq!(r.trace, vec![0.5, 0.5]);
        let report = AxiomReport::evaluate(&d4(), &r, TOL).unwrap();
        assert!(report.equivalency.holds);
    }

    #[test]
    fn extremes() {
        let id = single_linkage(&d4(), 4).unwrap();
        assert_eq!(id.groups(TOL), vec![vec![0], vec![1], vec![2], vec![3]]);
        let one = single_linkage(&d4(), 1).unwrap();
        assert_eq!(one.groups(TOL), vec![vec![0, 1, 2, 3]]);
        assert!(single_linkage(&d4(), 5).is_err());
    }

    #[test]
    fn ties_merge_lexicographically() {
        // Path graph with equal weights: every adjacent pair ties.
        let mut s = Array2::zeros((4, 4));
        for k in 0..3 {
            s[[k, k + 1]] = 1.0;
            s[[k + 1, k]] = 1.0;
        }
        let data = DataSet::from_similarity(s).unwrap();
        let r = single_linkage(&data, 3).unwrap();
        assert_eq!(r.groups(TOL), vec![vec![0, 1], vec![2], vec![3]]);
    }

    #[test]
    fn needs_similarity() {
        let data = DataSet::from_points(&[0.0, 1.0]).unwrap();
        assert!(matches!(single_linkage(&data, 1), Err(Error::MissingView { .. })));
    }
}
