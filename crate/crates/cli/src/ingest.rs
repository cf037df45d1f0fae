//! Reading data sets and partitions from disk.
//!
//! Line numbers in errors are 1-based and count every physical line,
//! including a header line.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use axioclust::data::DataSet;
use axioclust::partition::{Partition, PartitionKind};
use clap::ValueEnum;
use ndarray::Array2;
use serde::Serialize;

/// Largest `|s_kl − s_lk|` accepted in a similarity file.
pub const SYMMETRY_TOL: f64 = 1e-9;

/// How an input file is interpreted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum View {
    /// One object per row, one feature per column.
    Features,
    /// Square symmetric similarity matrix.
    Similarity,
    /// Weighted undirected edges `k l w`, 0-based node ids.
    Edgelist,
}

impl fmt::Display for View {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            View::Features => "features",
            View::Similarity => "similarity",
            View::Edgelist => "edgelist",
        })
    }
}

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}:{line}: {source}")]
    Csv { path: PathBuf, line: u64, source: csv::Error },
    #[error("{path}:{line}: column {column}: `{cell}` is not a number")]
    NotNumeric { path: PathBuf, line: u64, column: usize, cell: String },
    #[error("{path}:{line}: expected {expected} columns, found {found}")]
    Ragged { path: PathBuf, line: u64, expected: usize, found: usize },
    #[error("{path}: no data rows")]
    Empty { path: PathBuf },
    #[error("{path}: similarity matrix is {rows}×{cols}, expected square")]
    NotSquare { path: PathBuf, rows: usize, cols: usize },
    #[error("{path}: similarity is not symmetric at pair ({k}, {l}): {a} vs {b}")]
    Asymmetric { path: PathBuf, k: usize, l: usize, a: f64, b: f64 },
    #[error("{path}:{line}: {message}")]
    Edge { path: PathBuf, line: u64, message: String },
    #[error("{path}: {source}")]
    Invalid { path: PathBuf, source: axioclust::Error },
}

/// Reads `path` as a data set under `view`.
///
/// `header` skips the first row of a features file and is ignored by the
/// other views.
pub fn ingest(path: &Path, view: View, header: bool) -> Result<DataSet, IngestError> {
    let invalid = |source| IngestError::Invalid { path: path.to_owned(), source };
    match view {
        View::Features => {
            let m = read_matrix(path, header)?;
            DataSet::from_features(m).map_err(invalid)
        }
        View::Similarity => {
            let m = read_matrix(path, false)?;
            check_symmetric(path, &m)?;
            DataSet::from_similarity(m).map_err(invalid)
        }
        View::Edgelist => {
            let a = read_edgelist(path)?;
            DataSet::from_adjacency(a).map_err(invalid)
        }
    }
}

/// Reads a `c × n` membership matrix, no header.
pub fn read_partition(path: &Path, kind: PartitionKind) -> Result<Partition, IngestError> {
    let u = read_matrix(path, false)?;
    Partition::new(u, kind).map_err(|source| IngestError::Invalid { path: path.to_owned(), source })
}

/// Numeric CSV into a dense matrix.
pub fn read_matrix(path: &Path, header: bool) -> Result<Array2<f64>, IngestError> {
    let text = fs::read_to_string(path).map_err(|source| IngestError::Io { path: path.to_owned(), source })?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(header)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());

    let mut values = Vec::new();
    let mut width = None;
    let mut rows = 0;
    for record in reader.records() {
        let record = record.map_err(|source| IngestError::Csv {
            path: path.to_owned(),
            line: source.position().map_or(0, |p| p.line()),
            source,
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.iter().all(str::is_empty) {
            continue;
        }
        let expected = *width.get_or_insert(record.len());
        if record.len() != expected {
            return Err(IngestError::Ragged { path: path.to_owned(), line, expected, found: record.len() });
        }
        for (column, cell) in record.iter().enumerate() {
            let x: f64 = cell.parse().map_err(|_| IngestError::NotNumeric {
                path: path.to_owned(),
                line,
                column: column + 1,
                cell: cell.to_string(),
            })?;
            values.push(x);
        }
        rows += 1;
    }
    let cols = width.ok_or_else(|| IngestError::Empty { path: path.to_owned() })?;
    Ok(Array2::from_shape_vec((rows, cols), values).expect("row widths checked"))
}

fn check_symmetric(path: &Path, m: &Array2<f64>) -> Result<(), IngestError> {
    let (rows, cols) = m.dim();
    if rows != cols {
        return Err(IngestError::NotSquare { path: path.to_owned(), rows, cols });
    }
    for k in 0..rows {
        for l in (k + 1)..rows {
            let (a, b) = (m[[k, l]], m[[l, k]]);
            if !((a - b).abs() <= SYMMETRY_TOL) {
                return Err(IngestError::Asymmetric { path: path.to_owned(), k, l, a, b });
            }
        }
    }
    Ok(())
}

/// Edge list into a symmetric adjacency matrix sized by the largest node id.
///
/// The weight column is optional and defaults to 1. Listing an edge in both
/// directions is allowed when the weights agree.
pub fn read_edgelist(path: &Path) -> Result<Array2<f64>, IngestError> {
    let text = fs::read_to_string(path).map_err(|source| IngestError::Io { path: path.to_owned(), source })?;
    let edge_err = |line: usize, message: String| IngestError::Edge { path: path.to_owned(), line: line as u64, message };

    let mut edges: BTreeMap<(usize, usize), (f64, usize)> = BTreeMap::new();
    let mut nodes = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let fields: Vec<&str> = body.split(|c: char| c.is_whitespace() || c == ',').filter(|f| !f.is_empty()).collect();
        if !(2..=3).contains(&fields.len()) {
            return Err(edge_err(line, format!("expected `k l w`, found {} fields", fields.len())));
        }
        let node = |f: &str| f.parse::<usize>().map_err(|_| edge_err(line, format!("`{f}` is not a node id")));
        let (k, l) = (node(fields[0])?, node(fields[1])?);
        let w = match fields.get(2) {
            Some(f) => f.parse::<f64>().map_err(|_| edge_err(line, format!("`{f}` is not a weight")))?,
            None => 1.0,
        };
        if !(w.is_finite() && w >= 0.0) {
            return Err(edge_err(line, format!("weight {w} must be finite and nonnegative")));
        }
        let key = (k.min(l), k.max(l));
        if let Some(&(prev, first)) = edges.get(&key) {
            if prev != w {
                return Err(edge_err(line, format!("edge ({k}, {l}) has weight {w}, but line {first} gave {prev}")));
            }
        }
        edges.insert(key, (w, line));
        nodes = nodes.max(k + 1).max(l + 1);
    }
    if nodes == 0 {
        return Err(IngestError::Empty { path: path.to_owned() });
    }
    let mut a = Array2::zeros((nodes, nodes));
    for (&(k, l), &(w, _)) in &edges {
        a[[k, l]] = w;
        a[[l, k]] = w;
    }
    Ok(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn file(text: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(text.as_bytes()).unwrap();
        f
    }

    #[test]
    fn four_points() {
        let f = file("0\n1\n10\n11\n");
        let d = ingest(f.path(), View::Features, false).unwrap();
        assert_eq!(d.features().unwrap().column(0).to_vec(), vec![0.0, 1.0, 10.0, 11.0]);
    }

    #[test]
    fn header_is_skipped() {
        let f = file("x,y\n0,1\n2,3\n");
        let d = ingest(f.path(), View::Features, true).unwrap();
        assert_eq!(d.len(), 2);
    }

    #[test]
    fn ragged_rows_name_the_line() {
        let f = file("0,1\n2,3\n4\n");
        let e = ingest(f.path(), View::Features, false).unwrap_err();
        assert!(matches!(e, IngestError::Ragged { line: 3, expected: 2, found: 1, .. }), "{e}");
    }

    #[test]
    fn non_numeric_cell_names_line_and_column() {
        let f = file("x,y\n0,1\n2,abc\n");
        let e = ingest(f.path(), View::Features, true).unwrap_err();
        assert!(matches!(e, IngestError::NotNumeric { line: 3, column: 2, .. }), "{e}");
        assert!(e.to_string().contains(":3: column 2"));
    }

    #[test]
    fn asymmetric_similarity_names_the_pair() {
        let f = file("1,0.5,0.2\n0.5,1,0.3\n0.2,0.4,1\n");
        let e = ingest(f.path(), View::Similarity, false).unwrap_err();
        assert!(matches!(e, IngestError::Asymmetric { k: 1, l: 2, .. }), "{e}");
        assert!(e.to_string().contains("(1, 2)"));
    }

    #[test]
    fn two_cliques_from_edges() {
        let mut text = String::new();
        for base in [0, 4] {
            for k in 0..4 {
                for l in (k + 1)..4 {
                    text.push_str(&format!("{} {} 1\n", base + k, base + l));
                }
            }
        }
        let d = ingest(file(&text).path(), View::Edgelist, false).unwrap();
        assert_eq!(d.len(), 8);
        assert!(d.degrees().unwrap().iter().all(|&x| x == 3.0));
    }

    #[test]
    fn conflicting_duplicate_edge() {
        let f = file("0 1 1\n1 0 2\n");
        let e = ingest(f.path(), View::Edgelist, false).unwrap_err();
        assert!(matches!(e, IngestError::Edge { line: 2, .. }), "{e}");
    }

    #[test]
    fn bad_edge_line() {
        let f = file("0 1 1\n# note\n\n0 x\n");
        let e = ingest(f.path(), View::Edgelist, false).unwrap_err();
        assert!(matches!(e, IngestError::Edge { line: 4, .. }), "{e}");
    }

    #[test]
    fn partition_file() {
        let f = file("1,1,0,0\n0,0,1,1\n");
        let u = read_partition(f.path(), PartitionKind::Hard).unwrap();
        assert_eq!((u.clusters(), u.objects()), (2, 4));
    }
}
