//! Partition matrices, their kind constraints, and the partition taxonomy.
//!
//! A partition is a `c × n` nonnegative matrix `U` whose entry `u_ik` is the
//! membership of object `k` in cluster `i`. Three kinds are recognised:
//!
//! * **hard**: entries in `{0, 1}`, every column sums to 1, every row sum in
//!   `[1, n − 1]` (the whole row of ones is accepted when `c = 1`);
//! * **soft**: entries in `[0, 1]`, every column sums to 1, every row sum in
//!   `(0, n)` (again relaxed to `(0, n]` for `c = 1`);
//! * **possibilistic**: every column sum and every row sum is positive.
//!
//! Sums are compared with slack [`VALIDATION_EPS`].

use std::fmt;

use ndarray::{Array2, ArrayView1, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{best_set, strictly_best, VALIDATION_EPS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PartitionKind {
    Hard,
    Soft,
    Possibilistic,
}

impl fmt::Display for PartitionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PartitionKind::Hard => "hard",
            PartitionKind::Soft => "soft",
            PartitionKind::Possibilistic => "possibilistic",
        })
    }
}

impl std::str::FromStr for PartitionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hard" => Ok(PartitionKind::Hard),
            "soft" => Ok(PartitionKind::Soft),
            "possibilistic" => Ok(PartitionKind::Possibilistic),
            other => Err(Error::Domain(format!("unknown partition kind `{other}`"))),
        }
    }
}

/// A `c × n` membership matrix with a declared kind.
///
/// Construction only checks structure (nonempty, finite, nonnegative); the
/// kind constraints are checked by [`Partition::validate`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Partition {
    kind: PartitionKind,
    #[serde(with = "crate::numeric::rows")]
    u: Array2<f64>,
}

impl Partition {
    pub fn new(u: Array2<f64>, kind: PartitionKind) -> Result<Self> {
        if u.nrows() == 0 || u.ncols() == 0 {
            return Err(Error::Structural(format!(
                "partition matrix must have c ≥ 1 and n ≥ 1, got {}×{}",
                u.nrows(),
                u.ncols()
            )));
        }
        if let Some(((i, k), v)) = u.indexed_iter().find(|(_, v)| !v.is_finite() || **v < 0.0) {
            return Err(Error::Structural(format!(
                "membership u[{i}][{k}] = {v} is not a finite nonnegative number"
            )));
        }
        Ok(Partition { u, kind })
    }

    /// Partition from row vectors (one per cluster).
    pub fn from_rows(rows: &[Vec<f64>], kind: PartitionKind) -> Result<Self> {
        let c = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        if let Some(i) = rows.iter().position(|r| r.len() != n) {
            return Err(Error::Dimension(format!(
                "row {i} has {} entries, row 0 has {n}",
                rows[i].len()
            )));
        }
        let flat: Vec<f64> = rows.iter().flatten().copied().collect();
        let u = Array2::from_shape_vec((c, n), flat)
            .map_err(|e| Error::Structural(e.to_string()))?;
        Self::new(u, kind)
    }

    /// Hard partition from 0-based labels.
    pub fn from_labels(labels: &[usize], c: usize) -> Result<Self> {
        if let Some(&bad) = labels.iter().find(|&&l| l >= c) {
            return Err(Error::Domain(format!("label {bad} out of range for c = {c}")));
        }
        let mut u = Array2::zeros((c, labels.len()));
        for (k, &l) in labels.iter().enumerate() {
            u[[l, k]] = 1.0;
        }
        Self::new(u, PartitionKind::Hard)
    }

    pub fn kind(&self) -> PartitionKind {
        self.kind
    }

    /// Number of clusters `c`.
    pub fn clusters(&self) -> usize {
        self.u.nrows()
    }

    /// Number of objects `n`.
    pub fn objects(&self) -> usize {
        self.u.ncols()
    }

    pub fn matrix(&self) -> ArrayView2<'_, f64> {
        self.u.view()
    }

    pub fn into_matrix(self) -> Array2<f64> {
        self.u
    }

    pub fn get(&self, cluster: usize, object: usize) -> f64 {
        self.u[[cluster, object]]
    }

    pub fn column(&self, object: usize) -> ArrayView1<'_, f64> {
        self.u.column(object)
    }

    /// Row sums `Σ_k u_ik`.
    pub fn cluster_sizes(&self) -> Vec<f64> {
        self.u.rows().into_iter().map(|r| r.sum()).collect()
    }

    /// Checks the constraints of the declared kind and reports the first one
    /// violated.
    pub fn validate(&self) -> ValidationReport {
        match first_violation(self.u.view(), self.kind) {
            None => ValidationReport {
                ok: true,
                violation: None,
            },
            Some(v) => ValidationReport {
                ok: false,
                violation: Some(v),
            },
        }
    }

    /// Validates, returning a structural error on failure.
    pub fn require_valid(&self) -> Result<()> {
        match self.validate().violation {
            None => Ok(()),
            Some(v) => Err(Error::Structural(format!("invalid {} partition: {v}", self.kind))),
        }
    }

    /// Classifies the partition as proper, overlapping or improper, with the
    /// improper sub-cases flagged.
    pub fn classify(&self, tol: f64) -> Result<PartitionClass> {
        self.require_valid()?;
        Ok(classify_matrix(self.u.view(), tol))
    }

    /// `argmax_i u_ik` per object (smallest index on ties) plus the columns
    /// whose top two values are within `tol`.
    pub fn hard_assignment(&self, tol: f64) -> HardAssignment {
        hard_assignment_of(self.u.view(), tol)
    }
}

/// A broken partition constraint, with the offending row or column (0-based).
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "constraint", rename_all = "snake_case")]
pub enum Violation {
    EntryNotBinary { cluster: usize, object: usize, value: f64 },
    EntryAboveOne { cluster: usize, object: usize, value: f64 },
    ColumnSumNotOne { object: usize, sum: f64 },
    ColumnSumNotPositive { object: usize, sum: f64 },
    RowSumOutOfRange { cluster: usize, sum: f64, low: f64, high: f64 },
    RowSumNotPositive { cluster: usize, sum: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EntryNotBinary { cluster, object, value } => write!(
                f,
                "entries ∈ {{0,1}} violated at u[{cluster}][{object}] = {value}"
            ),
            Violation::EntryAboveOne { cluster, object, value } => write!(
                f,
                "entries ∈ [0,1] violated at u[{cluster}][{object}] = {value}"
            ),
            Violation::ColumnSumNotOne { object, sum } => {
                write!(f, "column sum = 1 violated at column {object} (sum {sum})")
            }
            Violation::ColumnSumNotPositive { object, sum } => {
                write!(f, "column sum > 0 violated at column {object} (sum {sum})")
            }
            Violation::RowSumOutOfRange { cluster, sum, low, high } => write!(
                f,
                "row sum within [{low}, {high}] violated at row {cluster} (sum {sum})"
            ),
            Violation::RowSumNotPositive { cluster, sum } => {
                write!(f, "row sum > 0 violated at row {cluster} (sum {sum})")
            }
        }
    }
}

/// Outcome of [`Partition::validate`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub violation: Option<Violation>,
}

fn first_violation(u: ArrayView2<'_, f64>, kind: PartitionKind) -> Option<Violation> {
    let (c, n) = u.dim();
    let eps = VALIDATION_EPS;
    match kind {
        PartitionKind::Hard => {
            for ((i, k), &v) in u.indexed_iter() {
                if v.abs() > eps && (v - 1.0).abs() > eps {
                    return Some(Violation::EntryNotBinary { cluster: i, object: k, value: v });
                }
            }
        }
        PartitionKind::Soft => {
            for ((i, k), &v) in u.indexed_iter() {
                if v > 1.0 + eps {
                    return Some(Violation::EntryAboveOne { cluster: i, object: k, value: v });
                }
            }
        }
        PartitionKind::Possibilistic => {}
    }
    for (k, col) in u.columns().into_iter().enumerate() {
        let sum = col.sum();
        match kind {
            PartitionKind::Hard | PartitionKind::Soft => {
                if (sum - 1.0).abs() > eps {
                    return Some(Violation::ColumnSumNotOne { object: k, sum });
                }
            }
            PartitionKind::Possibilistic => {
                if sum <= eps {
                    return Some(Violation::ColumnSumNotPositive { object: k, sum });
                }
            }
        }
    }
    let nf = n as f64;
    for (i, row) in u.rows().into_iter().enumerate() {
        let sum = row.sum();
        match kind {
            PartitionKind::Hard => {
                let high = if c == 1 { nf } else { nf - 1.0 };
                if sum < 1.0 - eps || sum > high + eps {
                    return Some(Violation::RowSumOutOfRange { cluster: i, sum, low: 1.0, high });
                }
            }
            PartitionKind::Soft => {
                let too_high = if c == 1 { sum > nf + eps } else { sum >= nf - eps };
                if sum <= eps || too_high {
                    return Some(Violation::RowSumOutOfRange { cluster: i, sum, low: 0.0, high: nf });
                }
            }
            PartitionKind::Possibilistic => {
                if sum <= eps {
                    return Some(Violation::RowSumNotPositive { cluster: i, sum });
                }
            }
        }
    }
    None
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PartitionType {
    Proper,
    Overlapping,
    Improper,
}

/// Sub-cases of an improper partition. All false unless the partition is
/// improper.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct PartitionFlags {
    pub covering: bool,
    pub coincident: bool,
    pub uninformative: bool,
    pub absolute_uninformative: bool,
}

impl PartitionFlags {
    pub fn any(&self) -> bool {
        self.covering || self.coincident || self.uninformative || self.absolute_uninformative
    }
}

/// Result of [`Partition::classify`]. Indices are 0-based.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartitionClass {
    pub top: PartitionType,
    pub flags: PartitionFlags,
    /// `witnesses[i]` is the first object on which cluster `i` strictly wins.
    pub witnesses: Vec<Option<usize>>,
    /// Columns whose maximum is shared by two or more clusters.
    pub tied_objects: Vec<usize>,
    /// Clusters without a witness.
    pub unwitnessed_clusters: Vec<usize>,
}

pub(crate) fn classify_matrix(u: ArrayView2<'_, f64>, tol: f64) -> PartitionClass {
    let (c, n) = u.dim();
    let columns: Vec<Vec<f64>> = (0..n).map(|k| u.column(k).to_vec()).collect();

    let tied_objects: Vec<usize> = (0..n)
        .filter(|&k| best_set(&columns[k], tol).len() > 1)
        .collect();
    let witnesses: Vec<Option<usize>> = (0..c)
        .map(|i| (0..n).find(|&k| strictly_best(&columns[k], i, tol)))
        .collect();
    let unwitnessed_clusters: Vec<usize> = (0..c).filter(|&i| witnesses[i].is_none()).collect();

    let top = if !unwitnessed_clusters.is_empty() {
        PartitionType::Improper
    } else if tied_objects.is_empty() {
        PartitionType::Proper
    } else {
        PartitionType::Overlapping
    };

    let flags = if top == PartitionType::Improper {
        improper_flags(u, tol)
    } else {
        PartitionFlags::default()
    };

    PartitionClass {
        top,
        flags,
        witnesses,
        tied_objects,
        unwitnessed_clusters,
    }
}

fn improper_flags(u: ArrayView2<'_, f64>, tol: f64) -> PartitionFlags {
    let (c, n) = u.dim();
    let mut covering = false;
    let mut coincident = false;
    for i in 0..c {
        for j in 0..c {
            if i == j {
                continue;
            }
            let ri = u.row(i);
            let rj = u.row(j);
            if ri.iter().zip(rj.iter()).all(|(a, b)| *a <= *b + tol) {
                covering = true;
            }
            if ri.iter().zip(rj.iter()).all(|(a, b)| (a - b).abs() <= tol) {
                coincident = true;
            }
        }
    }
    let first = u.column(0);
    let uninformative = (1..n).all(|k| {
        u.column(k)
            .iter()
            .zip(first.iter())
            .all(|(a, b)| (a - b).abs() <= tol)
    });
    let inv_c = 1.0 / c as f64;
    let absolute_uninformative = u.iter().all(|v| (v - inv_c).abs() <= tol);
    PartitionFlags {
        covering,
        coincident,
        uninformative,
        absolute_uninformative,
    }
}

/// The uninformative partition `π ⊗ 1_{1×n}`: every column equals `π`.
///
/// ```
/// use axioclust::partition::make_uninformative;
/// let u = make_uninformative(&[0.7, 0.3], 2).unwrap();
/// assert_eq!(u.matrix().row(0).to_vec(), vec![0.7, 0.7]);
/// ```
pub fn make_uninformative(pi: &[f64], n: usize) -> Result<Partition> {
    if pi.is_empty() || n == 0 {
        return Err(Error::Domain("π must be nonempty and n ≥ 1".into()));
    }
    if pi.iter().any(|&p| !p.is_finite() || p < 0.0) {
        return Err(Error::Domain("π has a negative or non-finite entry".into()));
    }
    let sum: f64 = pi.iter().sum();
    if (sum - 1.0).abs() > VALIDATION_EPS {
        return Err(Error::Domain(format!("π sums to {sum}, not 1")));
    }
    let u = Array2::from_shape_fn((pi.len(), n), |(i, _)| pi[i]);
    Partition::new(u, PartitionKind::Soft)
}

/// Labels from [`Partition::hard_assignment`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HardAssignment {
    pub labels: Vec<usize>,
    pub ties: Vec<usize>,
}

pub(crate) fn hard_assignment_of(u: ArrayView2<'_, f64>, tol: f64) -> HardAssignment {
    let mut labels = Vec::with_capacity(u.ncols());
    let mut ties = Vec::new();
    for (k, col) in u.columns().into_iter().enumerate() {
        let col = col.to_vec();
        let set = best_set(&col, tol);
        // A negative tolerance can empty the tied set; fall back to argmax.
        let label = set
            .first()
            .copied()
            .unwrap_or_else(|| crate::numeric::best_index(&col));
        labels.push(label);
        if set.len() > 1 {
            ties.push(k);
        }
    }
    HardAssignment { labels, ties }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::DEFAULT_TIE_TOL as TOL;
    use proptest::prelude::*;

    fn p(rows: &[&[f64]], kind: PartitionKind) -> Partition {
        let rows: Vec<Vec<f64>> = rows.iter().map(|r| r.to_vec()).collect();
        Partition::from_rows(&rows, kind).unwrap()
    }

    #[test]
    fn identity_is_valid_hard() {
        assert!(p(&[&[1.0, 0.0], &[0.0, 1.0]], PartitionKind::Hard).validate().ok);
    }

    #[test]
    fn fractional_entries_are_not_hard() {
        let r = p(&[&[0.3, 0.7], &[0.7, 0.3]], PartitionKind::Hard).validate();
        assert!(!r.ok);
        assert!(matches!(r.violation, Some(Violation::EntryNotBinary { cluster: 0, object: 0, .. })));
        assert!(r.violation.unwrap().to_string().contains("entries ∈ {0,1}"));
    }

    #[test]
    fn fractional_entries_are_soft() {
        assert!(p(&[&[0.3, 0.7], &[0.7, 0.3]], PartitionKind::Soft).validate().ok);
    }

    #[test]
    fn hard_rows_must_not_cover_everything_when_c_at_least_two() {
        let r = p(&[&[1.0, 1.0], &[0.0, 0.0]], PartitionKind::Hard).validate();
        assert!(matches!(r.violation, Some(Violation::RowSumOutOfRange { cluster: 0, .. })));
        // c = 1 accepts the full row of ones.
        assert!(p(&[&[1.0, 1.0, 1.0]], PartitionKind::Hard).validate().ok);
        assert!(p(&[&[1.0, 1.0, 1.0]], PartitionKind::Soft).validate().ok);
    }

    #[test]
    fn possibilistic_needs_positive_sums() {
        assert!(p(&[&[0.9, 0.2], &[0.9, 0.0]], PartitionKind::Possibilistic).validate().ok);
        let r = p(&[&[0.9, 0.0], &[0.0, 0.0]], PartitionKind::Possibilistic).validate();
        assert!(matches!(r.violation, Some(Violation::ColumnSumNotPositive { object: 1, .. })));
    }

    #[test]
    fn dimension_and_sign_errors() {
        assert!(Partition::from_rows(&[vec![1.0], vec![0.0, 1.0]], PartitionKind::Hard).is_err());
        assert!(Partition::from_rows(&[vec![-0.1, 1.1]], PartitionKind::Soft).is_err());
        assert!(Partition::new(Array2::zeros((0, 3)), PartitionKind::Soft).is_err());
    }

    #[test]
    fn disjoint_hard_partition_is_proper() {
        let c = p(&[&[1.0, 0.0], &[0.0, 1.0]], PartitionKind::Hard).classify(TOL).unwrap();
        assert_eq!(c.top, PartitionType::Proper);
        assert_eq!(c.witnesses, vec![Some(0), Some(1)]);
        assert!(!c.flags.any());
    }

    #[test]
    fn absolute_uninformative_carries_every_flag() {
        let c = p(&[&[0.5, 0.5], &[0.5, 0.5]], PartitionKind::Soft).classify(TOL).unwrap();
        assert_eq!(c.top, PartitionType::Improper);
        assert_eq!(
            c.flags,
            PartitionFlags { covering: true, coincident: true, uninformative: true, absolute_uninformative: true }
        );
    }

    #[test]
    fn tie_with_witnesses_is_overlapping() {
        let c = p(&[&[0.6, 0.5, 0.3], &[0.4, 0.5, 0.7]], PartitionKind::Soft)
            .classify(TOL)
            .unwrap();
        assert_eq!(c.top, PartitionType::Overlapping);
        assert_eq!(c.tied_objects, vec![1]);
        assert_eq!(c.witnesses, vec![Some(0), Some(2)]);
        assert!(!c.flags.any());
    }

    #[test]
    fn classify_rejects_invalid() {
        assert!(p(&[&[0.3, 0.7], &[0.7, 0.3]], PartitionKind::Hard).classify(TOL).is_err());
    }

    #[test]
    fn uninformative_constructions() {
        let u = make_uninformative(&[0.5, 0.5], 3).unwrap();
        assert!(u.matrix().iter().all(|&v| v == 0.5));
        let u = make_uninformative(&[0.7, 0.3], 2).unwrap();
        assert_eq!(u.matrix(), ndarray::array![[0.7, 0.7], [0.3, 0.3]]);
        let u = make_uninformative(&[1.0], 4).unwrap();
        assert_eq!(u.matrix(), ndarray::array![[1.0, 1.0, 1.0, 1.0]]);
        assert_eq!(u.kind(), PartitionKind::Soft);
        assert!(make_uninformative(&[0.6, 0.6], 2).is_err());
        assert!(make_uninformative(&[1.2, -0.2], 2).is_err());
    }

    #[test]
    fn distinct_pi_uninformative_is_improper_but_columnwise_strict() {
        let u = make_uninformative(&[0.5, 0.3, 0.2], 4).unwrap();
        let c = u.classify(TOL).unwrap();
        assert_eq!(c.top, PartitionType::Improper);
        assert!(c.tied_objects.is_empty());
        assert_eq!(c.unwitnessed_clusters, vec![1, 2]);
        assert!(c.flags.uninformative && c.flags.covering);
        assert!(!c.flags.coincident && !c.flags.absolute_uninformative);
    }

    #[test]
    fn hard_assignment_examples() {
        let h = p(&[&[1.0, 0.0], &[0.0, 1.0]], PartitionKind::Hard).hard_assignment(TOL);
        assert_eq!(h, HardAssignment { labels: vec![0, 1], ties: vec![] });
        let h = p(&[&[0.5, 0.9], &[0.5, 0.1]], PartitionKind::Soft).hard_assignment(TOL);
        assert_eq!(h, HardAssignment { labels: vec![0, 0], ties: vec![0] });
        let u = make_uninformative(&[1.0 / 3.0; 3], 5).unwrap();
        let h = u.hard_assignment(TOL);
        assert_eq!(h.labels, vec![0; 5]);
        assert_eq!(h.ties, vec![0, 1, 2, 3, 4]);
    }

    fn column_stochastic(c: usize, n: usize) -> impl Strategy<Value = Array2<f64>> {
        prop::collection::vec(0.01f64..1.0, c * n).prop_map(move |v| {
            let mut u = Array2::from_shape_vec((c, n), v).unwrap();
            for mut col in u.columns_mut() {
                let s = col.sum();
                col /= s;
            }
            u
        })
    }

    proptest! {
        #[test]
        fn hard_partitions_never_overlap(labels in prop::collection::vec(0usize..3, 3..10)) {
            let mut labels = labels;
            labels[0] = 0; labels[1] = 1; labels[2] = 2;
            let u = Partition::from_labels(&labels, 3).unwrap();
            prop_assume!(u.validate().ok);
            prop_assert_ne!(u.classify(TOL).unwrap().top, PartitionType::Overlapping);
        }

        #[test]
        fn hard_assignment_is_permutation_equivariant(u in column_stochastic(3, 6), shift in 1usize..3) {
            let perm: Vec<usize> = (0..3).map(|i| (i + shift) % 3).collect();
            let mut permuted = Array2::zeros((3, 6));
            for i in 0..3 {
                permuted.row_mut(perm[i]).assign(&u.row(i));
            }
            let a = hard_assignment_of(u.view(), TOL);
            let b = hard_assignment_of(permuted.view(), TOL);
            prop_assume!(a.ties.is_empty());
            let mapped: Vec<usize> = a.labels.iter().map(|&l| perm[l]).collect();
            prop_assert_eq!(mapped, b.labels);
        }

        #[test]
        fn flag_implications(pi in prop::collection::vec(0.05f64..1.0, 2..5), n in 1usize..6) {
            let s: f64 = pi.iter().sum();
            let pi: Vec<f64> = pi.iter().map(|p| p / s).collect();
            let c = make_uninformative(&pi, n).unwrap().classify(TOL).unwrap();
            prop_assert!(c.flags.uninformative);
            prop_assert!(c.flags.covering);
            prop_assert_eq!(c.top, PartitionType::Improper);
            if c.flags.absolute_uninformative {
                prop_assert!(c.flags.coincident);
            }
        }
    }
}
