//! Small numeric kernels shared across modules.

use ndarray::ArrayView1;

/// Absolute slack on constraint sums when validating partitions.
pub const VALIDATION_EPS: f64 = 1e-9;

/// Default tolerance under which two values are treated as tied.
pub const DEFAULT_TIE_TOL: f64 = 1e-12;

/// `log(sum(exp(xs)))` without overflow. Empty input and all `-inf` give `-inf`.
pub fn logsumexp<I>(xs: I) -> f64
where
    I: IntoIterator<Item = f64>,
    I::IntoIter: Clone,
{
    let it = xs.into_iter();
    let max = it.clone().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    let sum: f64 = it.map(|x| (x - max).exp()).sum();
    max + sum.ln()
}

/// Squared Euclidean distance.
pub fn sq_dist(a: ArrayView1<'_, f64>, b: ArrayView1<'_, f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Euclidean distance.
pub fn dist(a: ArrayView1<'_, f64>, b: ArrayView1<'_, f64>) -> f64 {
    sq_dist(a, b).sqrt()
}

/// Indices whose score is within `tol` of the best score (higher is better).
///
/// With a negative `tol` the set can be empty; callers that need a label use
/// [`best_index`].
pub fn best_set(scores: &[f64], tol: f64) -> Vec<usize> {
    let best = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    scores
        .iter()
        .enumerate()
        .filter(|(_, &s)| s >= best - tol)
        .map(|(i, _)| i)
        .collect()
}

/// Smallest index attaining the maximum score.
pub fn best_index(scores: &[f64]) -> usize {
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate().skip(1) {
        if s > scores[best] {
            best = i;
        }
    }
    best
}

/// Whether entry `i` beats every other entry by more than `tol`.
pub fn strictly_best(scores: &[f64], i: usize, tol: f64) -> bool {
    let si = scores[i];
    scores
        .iter()
        .enumerate()
        .all(|(j, &sj)| j == i || beats(si, sj, tol))
}

/// `a > b` with slack: `a - b > tol`. Handles infinite operands without NaN.
pub fn beats(a: f64, b: f64, tol: f64) -> bool {
    if a == b {
        return 0.0 > tol;
    }
    if a.is_infinite() || b.is_infinite() {
        return a > b;
    }
    a - b > tol
}

/// Breach of `lhs >= rhs`, i.e. `rhs - lhs`, with infinities resolved.
pub(crate) fn shortfall(lhs: f64, rhs: f64) -> f64 {
    if rhs == f64::NEG_INFINITY || lhs == f64::INFINITY {
        return f64::NEG_INFINITY;
    }
    if lhs == f64::NEG_INFINITY || rhs == f64::INFINITY {
        return f64::INFINITY;
    }
    rhs - lhs
}

/// Serializes a matrix as an array of row arrays.
pub(crate) mod rows {
    use ndarray::Array2;
    use serde::ser::{SerializeSeq, Serializer};

    pub fn serialize<S: Serializer>(m: &Array2<f64>, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(m.nrows()))?;
        for row in m.rows() {
            seq.serialize_element(&row.to_vec())?;
        }
        seq.end()
    }
}

/// Serializes reals as JSON numbers, with non-finite values as the strings
/// `"inf"`, `"-inf"` or `"nan"`.
pub(crate) mod real {
    use serde::Serializer;

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if v.is_nan() {
            s.serialize_str("nan")
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    /// A sequence of reals.
    pub mod seq {
        use serde::ser::{SerializeSeq, Serializer};

        struct Real(f64);

        impl serde::Serialize for Real {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                super::serialize(&self.0, s)
            }
        }

        pub fn serialize<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(v.len()))?;
            for &x in v {
                seq.serialize_element(&Real(x))?;
            }
            seq.end()
        }

        pub mod option {
            use serde::Serializer;

            pub fn serialize<S: Serializer>(v: &Option<Vec<f64>>, s: S) -> Result<S::Ok, S::Error> {
                match v {
                    Some(x) => super::serialize(x, s),
                    None => s.serialize_none(),
                }
            }
        }
    }

    pub mod option {
        use serde::Serializer;

        pub fn serialize<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
            match v {
                Some(x) => super::serialize(x, s),
                None => s.serialize_none(),
            }
        }
    }
}
