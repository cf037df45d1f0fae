//! Orchestration of the commands and the JSON reports they write.
//!
//! Every report is a single JSON object tagged `"schema": "axioclust/1"`.
//! Reports contain only ordered containers, so the same inputs and seed
//! always produce the same bytes.

use std::path::{Path, PathBuf};

use axioclust::algorithms::{AlgoConfig, Algorithm};
use axioclust::axiom_lab::{verify_thm4, verify_thm5, Theorem, TheoremReport};
use axioclust::categorization::{AffinityMap, AxiomReport, CategoryModel, ClusteringResult, ResultType};
use axioclust::criteria::{self, CriterionName, CriterionValue};
use axioclust::data::DataSet;
use axioclust::numeric::DEFAULT_TIE_TOL;
use axioclust::partition::{Partition, PartitionClass, PartitionKind, ValidationReport};
use axioclust::validity::{compute_all, extreme_value_audit, AuditReport, IndexName, IndexOptions, IndexValue, Optimum, Variant};
use ndarray::Array2;
use serde::Serialize;

use crate::ingest::{ingest, read_partition, IngestError, View};

pub const SCHEMA: &str = "axioclust/1";

/// Conventions a reader needs to compare index values with other tools.
const INDEX_CONVENTIONS: [&str; 3] = [
    "partition_entropy is -(1/n) sum_i sum_k u_ik ln u_ik, so smaller is better",
    "kwon penalty term averages ||v_i - mean(x)||^2 over the c clusters",
    "crisp clusters for davies_bouldin, silhouette, index_i and dunn are the argmax of U",
];

/// Update order of one sweep of the sample-weighted algorithms.
const SAMPLE_WEIGHTED_ORDER: [&str; 4] = ["u", "a", "prototypes", "alpha"];

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Core(#[from] axioclust::Error),
    #[error("{0}")]
    Usage(String),
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("cannot serialize report: {0}")]
    Json(#[from] serde_json::Error),
}

/// Process exit status of a command.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    Success = 0,
    Error = 1,
    /// The result, or the classified partition, is improper.
    Improper = 2,
    /// An inequality failed although the axioms held.
    TheoremViolated = 3,
}

/// A rendered report and the status to exit with.
#[derive(Debug)]
pub struct Output {
    pub json: String,
    pub exit: Exit,
}

#[derive(Debug, Clone)]
pub struct InputSpec {
    pub path: PathBuf,
    pub view: View,
    pub header: bool,
}

#[derive(Debug, Clone)]
pub struct RunSpec {
    pub input: InputSpec,
    pub algorithm: Algorithm,
    pub config: AlgoConfig,
    pub indices: bool,
    pub variant: Variant,
    pub theorems: Vec<Theorem>,
    pub trials: usize,
}

#[derive(Debug, Clone)]
pub struct ClassifySpec {
    pub input: InputSpec,
    pub partition: PathBuf,
    pub kind: PartitionKind,
}

#[derive(Debug, Clone)]
pub struct IndicesSpec {
    pub input: InputSpec,
    pub partition: PathBuf,
    pub kind: PartitionKind,
    pub variant: Variant,
    pub audit: bool,
}

#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub run: RunSpec,
    pub c_min: usize,
    pub c_max: usize,
}

#[derive(Serialize)]
struct InputInfo {
    path: String,
    view: View,
    objects: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    dimension: Option<usize>,
}

#[derive(Serialize)]
struct ConfigInfo<'a> {
    algorithm: Algorithm,
    #[serde(flatten)]
    config: &'a AlgoConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    update_order: Option<[&'static str; 4]>,
}

#[derive(Serialize)]
struct IndexBlock {
    variant: Variant,
    conventions: [&'static str; 3],
    values: Vec<IndexValue>,
}

#[derive(Serialize)]
struct ResultBlock<'a> {
    #[serde(flatten)]
    result: &'a ClusteringResult,
    labels: Vec<usize>,
}

#[derive(Serialize)]
struct RunReport<'a> {
    schema: &'static str,
    command: &'static str,
    input: InputInfo,
    config: ConfigInfo<'a>,
    seed: u64,
    result: ResultBlock<'a>,
    axioms: &'a AxiomReport,
    class: ResultType,
    flags: &'a [&'static str],
    criteria: Vec<CriterionValue>,
    #[serde(skip_serializing_if = "Option::is_none")]
    indices: Option<IndexBlock>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    theorems: Vec<TheoremReport>,
}

#[derive(Serialize)]
struct PartitionInfo {
    path: String,
    kind: PartitionKind,
    clusters: usize,
}

#[derive(Serialize)]
struct ClassifyReport<'a> {
    schema: &'static str,
    command: &'static str,
    input: InputInfo,
    partition: PartitionInfo,
    validation: ValidationReport,
    taxonomy: PartitionClass,
    model: &'a CategoryModel,
    affinity: AffinityMap,
    axioms: &'a AxiomReport,
    class: ResultType,
    flags: &'a [&'static str],
}

#[derive(Serialize)]
struct IndicesReport {
    schema: &'static str,
    command: &'static str,
    input: InputInfo,
    partition: PartitionInfo,
    indices: IndexBlock,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    audit: Vec<AuditReport>,
}

#[derive(Serialize)]
struct SweepEntry {
    c: usize,
    seed: u64,
    iterations: usize,
    converged: bool,
    class: ResultType,
    flags: Vec<&'static str>,
    criteria: Vec<CriterionValue>,
    indices: Vec<IndexValue>,
}

#[derive(Serialize)]
struct BestC {
    index: IndexName,
    direction: Optimum,
    c: Option<usize>,
}

#[derive(Serialize)]
struct SweepReport<'a> {
    schema: &'static str,
    command: &'static str,
    input: InputInfo,
    config: ConfigInfo<'a>,
    variant: Variant,
    seed_rule: &'static str,
    c_range: [usize; 2],
    entries: Vec<SweepEntry>,
    best: Vec<BestC>,
}

fn render<T: Serialize>(report: &T, exit: Exit) -> Result<Output, CliError> {
    let mut json = serde_json::to_string_pretty(report)?;
    json.push('\n');
    Ok(Output { json, exit })
}

fn load(input: &InputSpec) -> Result<(DataSet, InputInfo), CliError> {
    let data = ingest(&input.path, input.view, input.header)?;
    let info = InputInfo {
        path: input.path.display().to_string(),
        view: input.view,
        objects: data.len(),
        dimension: data.dimension(),
    };
    Ok((data, info))
}

/// Adds the derived similarity single linkage needs when only features
/// were given.
fn prepare(data: DataSet, algorithm: Algorithm) -> Result<DataSet, CliError> {
    if algorithm == Algorithm::SingleLinkage && !data.has_similarity() && data.has_features() {
        return Ok(data.with_inverse_distance_similarity()?);
    }
    Ok(data)
}

fn config_info(algorithm: Algorithm, config: &AlgoConfig) -> ConfigInfo<'_> {
    let weighted = matches!(algorithm, Algorithm::SampleWeightedGaussian | Algorithm::SampleWeightedMultinomial);
    ConfigInfo { algorithm, config, update_order: weighted.then_some(SAMPLE_WEIGHTED_ORDER) }
}

/// Criteria that apply to a result, in a fixed order.
fn criteria_for(data: &DataSet, result: &ClusteringResult, cfg: &AlgoConfig) -> Result<Vec<CriterionValue>, CliError> {
    let mut out = Vec::new();
    let labels = result.labels(DEFAULT_TIE_TOL);
    match &result.model {
        CategoryModel::Prototype { prototypes, mixing } if data.has_features() => {
            out.push(CriterionValue::new(CriterionName::Sse, criteria::sse(data, &result.model, &result.partition)?));
            if let Some(alpha) = mixing {
                let j = criteria::sample_weighted_gaussian_objective(data, prototypes.view(), alpha, cfg.m, cfg.beta)?;
                out.push(CriterionValue::new(CriterionName::SampleWeightedObjective, j));
            }
        }
        CategoryModel::Gaussian { .. } if data.has_features() => {
            out.push(CriterionValue::new(CriterionName::Sse, criteria::sse(data, &result.model, &result.partition)?));
            let cml = criteria::cml_loglik(data, &result.model, &labels)?;
            out.push(CriterionValue::new(CriterionName::CmlLoglik, cml));
            let c = result.model.clusters();
            let mix = criteria::mixture_loglik(data, &result.model, &vec![1.0 / c as f64; c])?;
            out.push(CriterionValue::new(CriterionName::MixtureLoglik, mix));
        }
        CategoryModel::Multinomial { theta, mixing: Some(alpha) } => {
            let j = criteria::sample_weighted_multinomial_log_objective(data, theta.view(), alpha, cfg.m)?;
            let mut v = CriterionValue::new(CriterionName::SampleWeightedObjective, j);
            v.log_scale = true;
            out.push(v);
        }
        _ => {}
    }
    if data.has_similarity() && result.partition.clusters() == 2 && result.partition.kind() == PartitionKind::Hard {
        out.push(CriterionValue::new(CriterionName::Cut, criteria::cut(data, &result.partition)?));
    }
    Ok(out)
}

fn index_options(variant: Variant, cfg: &AlgoConfig) -> IndexOptions {
    IndexOptions { variant, m: cfg.m, ..IndexOptions::default() }
}

fn index_block(values: Vec<IndexValue>, variant: Variant) -> IndexBlock {
    IndexBlock { variant, conventions: INDEX_CONVENTIONS, values }
}

/// Runs one algorithm, checks the axioms and writes the full report.
pub fn run(spec: &RunSpec) -> Result<Output, CliError> {
    run_as(spec, "run")
}

fn run_as(spec: &RunSpec, command: &'static str) -> Result<Output, CliError> {
    let (data, input) = load(&spec.input)?;
    let data = prepare(data, spec.algorithm)?;
    let result = spec.algorithm.run(&data, &spec.config)?;
    let axioms = AxiomReport::evaluate(&data, &result, DEFAULT_TIE_TOL)?;
    let criteria = criteria_for(&data, &result, &spec.config)?;
    let indices = if spec.indices {
        let opts = index_options(spec.variant, &spec.config);
        Some(index_block(compute_all(&data, Some(&result.model), &result.partition, &opts)?, spec.variant))
    } else {
        None
    };
    let mut theorems = Vec::new();
    for &t in &spec.theorems {
        theorems.push(verify(&data, &result, t, spec.trials, spec.config.seed)?);
    }
    let exit = if axioms.class == ResultType::Improper {
        Exit::Improper
    } else if theorems.iter().any(TheoremReport::theorem_violated) {
        Exit::TheoremViolated
    } else {
        Exit::Success
    };
    let report = RunReport {
        schema: SCHEMA,
        command,
        input,
        config: config_info(spec.algorithm, &spec.config),
        seed: spec.config.seed,
        result: ResultBlock { result: &result, labels: result.labels(DEFAULT_TIE_TOL) },
        axioms: &axioms,
        class: axioms.class,
        flags: &axioms.flags,
        criteria,
        indices,
        theorems,
    };
    render(&report, exit)
}

fn verify(data: &DataSet, result: &ClusteringResult, t: Theorem, trials: usize, seed: u64) -> Result<TheoremReport, CliError> {
    Ok(match t {
        Theorem::Similarity => verify_thm4(data, result, trials, seed)?,
        Theorem::Dissimilarity => verify_thm5(data, result, trials, seed)?,
    })
}

/// `verify` is `run` restricted to one theorem, without indices.
pub fn verify_command(spec: &RunSpec) -> Result<Output, CliError> {
    if spec.theorems.len() != 1 {
        return Err(CliError::Usage("verify takes exactly one theorem".into()));
    }
    let out = run_as(&RunSpec { indices: false, ..spec.clone() }, "verify")?;
    // An improper result is reported through the precondition, not the exit code.
    let exit = if out.exit == Exit::Improper { Exit::Success } else { out.exit };
    Ok(Output { exit, ..out })
}

/// Model implied by a partition under the view of the data:
/// weighted means for features, member sets for a similarity matrix and
/// normalized link mass for an adjacency matrix.
pub fn derive_model(data: &DataSet, u: &Partition) -> Result<(CategoryModel, AffinityMap), CliError> {
    let w = u.matrix();
    let mass = w.sum_axis(ndarray::Axis(1));
    if let Some(i) = mass.iter().position(|&m| !(m > 0.0)) {
        return Err(CliError::Core(axioclust::Error::Domain(format!("cluster {i} has zero membership mass"))));
    }
    if let Ok(x) = data.features() {
        let mut v = w.dot(&x);
        for (mut row, &m) in v.rows_mut().into_iter().zip(mass.iter()) {
            row /= m;
        }
        return Ok((CategoryModel::prototypes(v)?, AffinityMap::SqEuclidean));
    }
    if data.has_similarity() {
        let mut groups = vec![Vec::new(); u.clusters()];
        for (k, l) in u.hard_assignment(DEFAULT_TIE_TOL).labels.into_iter().enumerate() {
            groups[l].push(k);
        }
        return Ok((CategoryModel::exemplars(groups)?, AffinityMap::MaxLink));
    }
    let a = data.adjacency()?;
    let mut theta: Array2<f64> = w.dot(&a);
    for (i, mut row) in theta.rows_mut().into_iter().enumerate() {
        let s = row.sum();
        if !(s > 0.0) {
            return Err(CliError::Core(axioclust::Error::Domain(format!("cluster {i} has no incident links"))));
        }
        row /= s;
    }
    Ok((CategoryModel::multinomial(theta)?, AffinityMap::Multinomial))
}

fn partition_info(path: &Path, u: &Partition) -> PartitionInfo {
    PartitionInfo { path: path.display().to_string(), kind: u.kind(), clusters: u.clusters() }
}

fn check_objects(data: &DataSet, u: &Partition) -> Result<(), CliError> {
    if u.objects() != data.len() {
        return Err(CliError::Core(axioclust::Error::Dimension(format!(
            "partition has {} columns, data set has {} objects",
            u.objects(),
            data.len()
        ))));
    }
    Ok(())
}

/// Taxonomy and axioms for a given partition.
pub fn classify(spec: &ClassifySpec) -> Result<Output, CliError> {
    let (data, input) = load(&spec.input)?;
    let u = read_partition(&spec.partition, spec.kind)?;
    check_objects(&data, &u)?;
    let (model, affinity) = derive_model(&data, &u)?;
    let result = ClusteringResult::new(model, u, affinity)?;
    let axioms = AxiomReport::evaluate(&data, &result, DEFAULT_TIE_TOL)?;
    let exit = if axioms.class == ResultType::Improper { Exit::Improper } else { Exit::Success };
    let report = ClassifyReport {
        schema: SCHEMA,
        command: "classify",
        input,
        partition: partition_info(&spec.partition, &result.partition),
        validation: result.partition.validate(),
        taxonomy: result.partition.classify(DEFAULT_TIE_TOL)?,
        model: &result.model,
        affinity,
        axioms: &axioms,
        class: axioms.class,
        flags: &axioms.flags,
    };
    render(&report, exit)
}

/// Validity indices of a given partition, prototypes from weighted means.
pub fn indices(spec: &IndicesSpec) -> Result<Output, CliError> {
    let (data, input) = load(&spec.input)?;
    let u = read_partition(&spec.partition, spec.kind)?;
    check_objects(&data, &u)?;
    let opts = IndexOptions { variant: spec.variant, ..IndexOptions::default() };
    let values = compute_all(&data, None, &u, &opts)?;
    let mut audit = Vec::new();
    if spec.audit {
        let (model, affinity) = derive_model(&data, &u)?;
        let proper = ClusteringResult::new(model, u.clone(), affinity)?;
        for index in IndexName::ALL {
            audit.push(extreme_value_audit(index, &data, &proper, &opts)?);
        }
    }
    let report = IndicesReport {
        schema: SCHEMA,
        command: "indices",
        input,
        partition: partition_info(&spec.partition, &u),
        indices: index_block(values, spec.variant),
        audit,
    };
    render(&report, Exit::Success)
}

/// Seed used for the run with `c` clusters in a sweep.
pub fn sweep_seed(base: u64, c: usize) -> u64 {
    base.wrapping_add(c as u64)
}

/// Reruns the algorithm for every `c` in the range and tabulates the
/// indices.
pub fn sweep(spec: &SweepSpec) -> Result<Output, CliError> {
    let (data, input) = load(&spec.run.input)?;
    let data = prepare(data, spec.run.algorithm)?;
    if spec.c_min < 2 || spec.c_min > spec.c_max || spec.c_max > data.len() {
        return Err(CliError::Usage(format!(
            "c range [{}, {}] must be nonempty and within [2, {}]",
            spec.c_min,
            spec.c_max,
            data.len()
        )));
    }
    let base = &spec.run.config;
    let mut entries = Vec::new();
    for c in spec.c_min..=spec.c_max {
        let cfg = AlgoConfig { c, seed: sweep_seed(base.seed, c), ..base.clone() };
        let result = spec.run.algorithm.run(&data, &cfg)?;
        let axioms = AxiomReport::evaluate(&data, &result, DEFAULT_TIE_TOL)?;
        let opts = index_options(spec.run.variant, &cfg);
        entries.push(SweepEntry {
            c,
            seed: cfg.seed,
            iterations: result.iterations,
            converged: result.converged,
            class: axioms.class,
            flags: axioms.flags.clone(),
            criteria: criteria_for(&data, &result, &cfg)?,
            indices: compute_all(&data, Some(&result.model), &result.partition, &opts)?,
        });
    }
    let best = IndexName::ALL
        .iter()
        .enumerate()
        .map(|(slot, &index)| BestC { index, direction: index.direction(), c: best_c(&entries, slot, index.direction()) })
        .collect();
    let report = SweepReport {
        schema: SCHEMA,
        command: "sweep",
        input,
        config: config_info(spec.run.algorithm, base),
        variant: spec.run.variant,
        seed_rule: "seed + c",
        c_range: [spec.c_min, spec.c_max],
        entries,
        best,
    };
    render(&report, Exit::Success)
}

/// The `c` whose index value is best, smallest `c` on ties. Entries where
/// the index is undefined are skipped.
fn best_c(entries: &[SweepEntry], slot: usize, direction: Optimum) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for e in entries {
        let Some(v) = e.indices[slot].value else { continue };
        let better = match (best, direction) {
            (None, _) => true,
            (Some((_, b)), Optimum::MinBetter) => v < b,
            (Some((_, b)), Optimum::MaxBetter) => v > b,
        };
        if better {
            best = Some((e.c, v));
        }
    }
    best.map(|(c, _)| c)
}

/// Writes the report to `out`, or to stdout when `out` is `None`.
pub fn emit(output: &Output, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => {
            std::fs::write(path, &output.json).map_err(|source| CliError::Write { path: path.to_owned(), source })
        }
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(output.json.as_bytes())
                .map_err(|source| CliError::Write { path: PathBuf::from("<stdout>"), source })
        }
    }
}
