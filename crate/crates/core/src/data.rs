//! Data sets under their three views: features, pairwise similarity and
//! adjacency.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};

use crate::error::{Error, Result};

/// Tolerance for the symmetry check on similarity matrices.
pub const SYMMETRY_TOL: f64 = 1e-9;

/// One data set of `n` objects seen through up to three views.
///
/// Degrees of the adjacency view are derived at construction and cannot go
/// stale since the views are immutable.
#[derive(Debug, Clone, PartialEq)]
pub struct DataSet {
    n: usize,
    features: Option<Array2<f64>>,
    similarity: Option<Array2<f64>>,
    adjacency: Option<Array2<f64>>,
    degrees: Option<Array1<f64>>,
}

impl DataSet {
    /// Data set from an `n × r` feature matrix.
    pub fn from_features(features: Array2<f64>) -> Result<Self> {
        let n = features.nrows();
        check_views_n(n)?;
        if features.ncols() == 0 {
            return Err(Error::Structural("feature matrix has zero columns".into()));
        }
        if let Some(((k, o), _)) = features.indexed_iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::Structural(format!(
                "non-finite feature at object {k}, column {o}"
            )));
        }
        Ok(DataSet {
            n,
            features: Some(features),
            similarity: None,
            adjacency: None,
            degrees: None,
        })
    }

    /// One-dimensional points, a convenience for small fixtures.
    pub fn from_points(points: &[f64]) -> Result<Self> {
        let features = Array2::from_shape_vec((points.len(), 1), points.to_vec())
            .map_err(|e| Error::Structural(e.to_string()))?;
        Self::from_features(features)
    }

    /// Data set from an `n × n` nonnegative symmetric similarity matrix.
    pub fn from_similarity(similarity: Array2<f64>) -> Result<Self> {
        validate_similarity(similarity.view())?;
        Ok(DataSet {
            n: similarity.nrows(),
            features: None,
            similarity: Some(similarity),
            adjacency: None,
            degrees: None,
        })
    }

    /// Data set from an `n × n` nonnegative adjacency matrix.
    pub fn from_adjacency(adjacency: Array2<f64>) -> Result<Self> {
        validate_square_nonnegative(adjacency.view(), "adjacency")?;
        let degrees = adjacency.sum_axis(Axis(1));
        Ok(DataSet {
            n: adjacency.nrows(),
            features: None,
            similarity: None,
            adjacency: Some(adjacency),
            degrees: Some(degrees),
        })
    }

    /// Attach a similarity view to an existing data set.
    pub fn with_similarity(mut self, similarity: Array2<f64>) -> Result<Self> {
        validate_similarity(similarity.view())?;
        self.check_n(similarity.nrows(), "similarity")?;
        self.similarity = Some(similarity);
        Ok(self)
    }

    /// Attach an adjacency view to an existing data set.
    pub fn with_adjacency(mut self, adjacency: Array2<f64>) -> Result<Self> {
        validate_square_nonnegative(adjacency.view(), "adjacency")?;
        self.check_n(adjacency.nrows(), "adjacency")?;
        self.degrees = Some(adjacency.sum_axis(Axis(1)));
        self.adjacency = Some(adjacency);
        Ok(self)
    }

    /// Attach a similarity view computed from the features as
    /// `s_kl = 1 / (1 + ‖x_k − x_l‖)`.
    pub fn with_inverse_distance_similarity(self) -> Result<Self> {
        let f = self.features()?;
        let n = self.n;
        let mut s = Array2::zeros((n, n));
        for k in 0..n {
            for l in 0..n {
                s[[k, l]] = 1.0 / (1.0 + crate::numeric::dist(f.row(k), f.row(l)));
            }
        }
        self.with_similarity(s)
    }

    fn check_n(&self, n: usize, view: &str) -> Result<()> {
        if n != self.n {
            return Err(Error::Dimension(format!(
                "{view} view has {n} objects, data set has {}",
                self.n
            )));
        }
        Ok(())
    }

    /// Number of objects.
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn features(&self) -> Result<ArrayView2<'_, f64>> {
        self.features.as_ref().map(|f| f.view()).ok_or(Error::MissingView {
            view: "features",
            needed_by: "this operation",
        })
    }

    pub fn similarity(&self) -> Result<ArrayView2<'_, f64>> {
        self.similarity.as_ref().map(|s| s.view()).ok_or(Error::MissingView {
            view: "similarity",
            needed_by: "this operation",
        })
    }

    pub fn adjacency(&self) -> Result<ArrayView2<'_, f64>> {
        self.adjacency.as_ref().map(|a| a.view()).ok_or(Error::MissingView {
            view: "adjacency",
            needed_by: "this operation",
        })
    }

    /// Degrees `d_k = Σ_l A_kl` of the adjacency view.
    pub fn degrees(&self) -> Result<ArrayView1<'_, f64>> {
        self.degrees.as_ref().map(|d| d.view()).ok_or(Error::MissingView {
            view: "adjacency",
            needed_by: "this operation",
        })
    }

    pub fn has_features(&self) -> bool {
        self.features.is_some()
    }

    pub fn has_similarity(&self) -> bool {
        self.similarity.is_some()
    }

    pub fn has_adjacency(&self) -> bool {
        self.adjacency.is_some()
    }

    /// Feature dimension `r`, if the feature view is present.
    pub fn dimension(&self) -> Option<usize> {
        self.features.as_ref().map(|f| f.ncols())
    }

    /// Global mean of the feature vectors.
    pub fn mean(&self) -> Result<Array1<f64>> {
        let f = self.features()?;
        Ok(f.sum_axis(Axis(0)) / self.n as f64)
    }

    /// Rejects adjacency views with an isolated node.
    pub fn require_no_isolated_nodes(&self) -> Result<()> {
        let d = self.degrees()?;
        match d.iter().position(|&dk| dk <= 0.0) {
            Some(node) => Err(Error::IsolatedNode { node }),
            None => Ok(()),
        }
    }
}

fn check_views_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Structural("data set has no objects".into()));
    }
    Ok(())
}

fn validate_square_nonnegative(m: ArrayView2<'_, f64>, what: &str) -> Result<()> {
    check_views_n(m.nrows())?;
    if m.nrows() != m.ncols() {
        return Err(Error::Dimension(format!(
            "{what} matrix is {}×{}, expected square",
            m.nrows(),
            m.ncols()
        )));
    }
    if let Some(((k, l), v)) = m.indexed_iter().find(|(_, v)| !v.is_finite() || **v < 0.0) {
        return Err(Error::Structural(format!(
            "{what} entry ({k}, {l}) = {v} is not a finite nonnegative number"
        )));
    }
    Ok(())
}

fn validate_similarity(s: ArrayView2<'_, f64>) -> Result<()> {
    validate_square_nonnegative(s, "similarity")?;
    let n = s.nrows();
    for k in 0..n {
        for l in (k + 1)..n {
            if (s[[k, l]] - s[[l, k]]).abs() > SYMMETRY_TOL {
                return Err(Error::Structural(format!(
                    "similarity matrix is asymmetric at ({k}, {l}): {} vs {}",
                    s[[k, l]],
                    s[[l, k]]
                )));
            }
        }
    }
    Ok(())
}
