//! Cluster validity indices and the extreme-value audit.
//!
//! Indices that need prototypes take them from the category model, or use
//! membership-weighted cluster means when the model has none. Indices that
//! need crisp clusters read them off the argmax of the partition. All
//! distances `d(·,·)` are Euclidean.

use std::fmt;
use std::str::FromStr;

use ndarray::{Array1, Array2, ArrayView2, Axis};
use serde::Serialize;

use crate::categorization::{CategoryModel, ClusteringResult};
use crate::data::DataSet;
use crate::error::{Error, Result};
use crate::numeric::{beats, dist, sq_dist, DEFAULT_TIE_TOL};
use crate::partition::{Partition, PartitionKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IndexName {
    XieBeni,
    Kwon,
    #[serde(rename = "v_p")]
    ChenVp,
    DaviesBouldin,
    #[serde(rename = "fs")]
    FukuyamaSugeno,
    Silhouette,
    #[serde(rename = "index_i")]
    MaulikI,
    Dunn,
    CalinskiHarabasz,
    PartitionCoefficient,
    PartitionEntropy,
}

impl IndexName {
    pub const ALL: [IndexName; 11] = [
        IndexName::XieBeni,
        IndexName::Kwon,
        IndexName::ChenVp,
        IndexName::DaviesBouldin,
        IndexName::FukuyamaSugeno,
        IndexName::Silhouette,
        IndexName::MaulikI,
        IndexName::Dunn,
        IndexName::CalinskiHarabasz,
        IndexName::PartitionCoefficient,
        IndexName::PartitionEntropy,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            IndexName::XieBeni => "xie_beni",
            IndexName::Kwon => "kwon",
            IndexName::ChenVp => "v_p",
            IndexName::DaviesBouldin => "davies_bouldin",
            IndexName::FukuyamaSugeno => "fs",
            IndexName::Silhouette => "silhouette",
            IndexName::MaulikI => "index_i",
            IndexName::Dunn => "dunn",
            IndexName::CalinskiHarabasz => "calinski_harabasz",
            IndexName::PartitionCoefficient => "partition_coefficient",
            IndexName::PartitionEntropy => "partition_entropy",
        }
    }

    pub fn direction(self) -> Optimum {
        match self {
            IndexName::XieBeni
            | IndexName::Kwon
            | IndexName::DaviesBouldin
            | IndexName::FukuyamaSugeno
            | IndexName::PartitionEntropy => Optimum::MinBetter,
            _ => Optimum::MaxBetter,
        }
    }
}

impl fmt::Display for IndexName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for IndexName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.replace('-', "_").to_lowercase();
        let alias = match s.as_str() {
            "xb" => Some(IndexName::XieBeni),
            "db" => Some(IndexName::DaviesBouldin),
            "ch" => Some(IndexName::CalinskiHarabasz),
            "vpc" | "v_pc" => Some(IndexName::PartitionCoefficient),
            "vpe" | "v_pe" => Some(IndexName::PartitionEntropy),
            "i" | "maulik" => Some(IndexName::MaulikI),
            "chen" | "vp" => Some(IndexName::ChenVp),
            "fukuyama" | "fukuyama_sugeno" => Some(IndexName::FukuyamaSugeno),
            _ => None,
        };
        alias
            .or_else(|| IndexName::ALL.into_iter().find(|i| i.as_str() == s))
            .ok_or_else(|| Error::Config(format!("unknown validity index `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Optimum {
    MinBetter,
    MaxBetter,
}

/// Which form of an index to compute where the tabulated form differs from
/// the one in common use. Only Davies-Bouldin, silhouette and index I
/// differ; other indices ignore it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// Prefactors as tabulated: `1/(nc)` for DB and silhouette, `1/(nc)`
    /// without a square for index I.
    #[default]
    Paper,
    /// Textbook forms: `1/c` for DB, mean silhouette over objects,
    /// `((E₁/E_c)·D_c/c)²` for index I.
    Standard,
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" => Ok(Variant::Paper),
            "standard" => Ok(Variant::Standard),
            other => Err(Error::Config(format!("unknown index variant `{other}`"))),
        }
    }
}

/// One index value. `value` is `None` when the index is undefined for the
/// input, with the cause in `reason`; degenerate but defined cases such as
/// coincident prototypes give `+∞` and a flag.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndexValue {
    pub index: IndexName,
    pub variant: Variant,
    #[serde(with = "crate::numeric::real::option")]
    pub value: Option<f64>,
    pub direction: Optimum,
    pub flags: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

impl IndexValue {
    fn new(index: IndexName, variant: Variant) -> Self {
        IndexValue { index, variant, value: None, direction: index.direction(), flags: Vec::new(), reason: None }
    }

    fn defined(mut self, v: f64) -> Self {
        self.value = Some(v);
        self
    }

    fn undefined(mut self, reason: impl Into<String>) -> Self {
        self.value = None;
        self.reason = Some(reason.into());
        self
    }

    fn flag(mut self, f: &str) -> Self {
        self.flags.push(f.to_string());
        self
    }

    /// Whether `self` is strictly better than `other` by more than `tol`.
    /// An undefined value is never better and never worse.
    pub fn better_than(&self, other: &IndexValue, tol: f64) -> Option<bool> {
        let (a, b) = (self.value?, other.value?);
        Some(match self.direction {
            Optimum::MinBetter => beats(b, a, tol),
            Optimum::MaxBetter => beats(a, b, tol),
        })
    }
}

/// Options for index computation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndexOptions {
    pub variant: Variant,
    /// Fuzzifier used by the Fukuyama-Sugeno index.
    pub m: f64,
    /// Prototype pairs closer than this count as coincident.
    pub tol: f64,
}

impl Default for IndexOptions {
    fn default() -> Self {
        IndexOptions { variant: Variant::Paper, m: 2.0, tol: DEFAULT_TIE_TOL }
    }
}

/// Shared precomputations for one `(data, model, partition)` triple.
struct Context<'a> {
    x: ArrayView2<'a, f64>,
    u: ArrayView2<'a, f64>,
    v: Array2<f64>,
    /// Whether `v` came from the model rather than weighted means.
    model_prototypes: bool,
    xbar: Array1<f64>,
    groups: Vec<Vec<usize>>,
    c: usize,
    n: usize,
}

impl<'a> Context<'a> {
    fn new(data: &'a DataSet, model: Option<&CategoryModel>, partition: &'a Partition) -> Result<Self> {
        let x = data
            .features()
            .map_err(|_| Error::MissingView { view: "features", needed_by: "validity indices" })?;
        let u = partition.matrix();
        let (c, n) = (partition.clusters(), partition.objects());
        if n != x.nrows() {
            return Err(Error::Dimension(format!("partition has {n} objects, data set has {}", x.nrows())));
        }
        let (v, model_prototypes) = match model.and_then(CategoryModel::prototype_matrix) {
            Some(p) => {
                if p.nrows() != c || p.ncols() != x.ncols() {
                    return Err(Error::Dimension(format!(
                        "prototypes are {}×{}, expected {c}×{}",
                        p.nrows(),
                        p.ncols(),
                        x.ncols()
                    )));
                }
                (p.to_owned(), true)
            }
            None => (means(x, u), false),
        };
        let mut groups = vec![Vec::new(); c];
        for (k, l) in partition.hard_assignment(DEFAULT_TIE_TOL).labels.into_iter().enumerate() {
            groups[l].push(k);
        }
        Ok(Context { x, u, v, model_prototypes, xbar: data.mean()?, groups, c, n })
    }

    fn tag(&self, iv: IndexValue) -> IndexValue {
        if self.model_prototypes {
            iv
        } else {
            iv.flag("prototypes_from_means")
        }
    }

    /// `Σ_i Σ_k u_ik^p ‖x_k − v_i‖²`
    fn compactness(&self, p: f64) -> f64 {
        let mut s = 0.0;
        for i in 0..self.c {
            for k in 0..self.n {
                let w = self.u[[i, k]];
                if w > 0.0 {
                    s += w.powf(p) * sq_dist(self.x.row(k), self.v.row(i));
                }
            }
        }
        s
    }

    /// Smallest squared distance between distinct prototypes, and whether
    /// the smallest distance is at most `tol`.
    fn min_proto_sq(&self, tol: f64) -> (f64, bool) {
        let mut best = f64::INFINITY;
        for i in 0..self.c {
            for j in (i + 1)..self.c {
                best = best.min(sq_dist(self.v.row(i), self.v.row(j)));
            }
        }
        (best, best.sqrt() <= tol)
    }

    fn nonempty(&self) -> usize {
        self.groups.iter().filter(|g| !g.is_empty()).count()
    }
}

fn means(x: ArrayView2<'_, f64>, u: ArrayView2<'_, f64>) -> Array2<f64> {
    let mass = u.sum_axis(Axis(1));
    let mut v = u.dot(&x);
    for (mut row, &m) in v.rows_mut().into_iter().zip(mass.iter()) {
        if m > 0.0 {
            row /= m;
        }
    }
    v
}

/// Xie-Beni index `Σ_i Σ_k u_ik² ‖x_k − v_i‖² / (n · min_{i≠j} ‖v_i − v_j‖²)`.
///
/// Coincident prototypes give `+∞` with the `coincident_prototypes` flag.
///
/// ```
/// use axioclust::{data::DataSet, categorization::CategoryModel, partition::Partition};
/// use axioclust::validity::xie_beni;
/// use ndarray::array;
///
/// let data = DataSet::from_points(&[0.0, 1.0, 10.0, 11.0])?;
/// let model = CategoryModel::prototypes(array![[0.5], [10.5]])?;
/// let u = Partition::from_labels(&[0, 0, 1, 1], 2)?;
/// assert_eq!(xie_beni(&data, &model, &u)?.value, Some(0.0025));
/// # Ok::<(), axioclust::Error>(())
/// ```
pub fn xie_beni(data: &DataSet, model: &CategoryModel, partition: &Partition) -> Result<IndexValue> {
    if partition.clusters() < 2 {
        return Err(Error::Domain("Xie-Beni needs c ≥ 2".into()));
    }
    compute_index(IndexName::XieBeni, data, Some(model), partition, &IndexOptions::default())
}

/// Computes one index.
pub fn compute_index(
    index: IndexName,
    data: &DataSet,
    model: Option<&CategoryModel>,
    partition: &Partition,
    opts: &IndexOptions,
) -> Result<IndexValue> {
    let ctx = Context::new(data, model, partition)?;
    let out = IndexValue::new(index, opts.variant);
    let needs_two = !matches!(index, IndexName::PartitionCoefficient | IndexName::PartitionEntropy | IndexName::FukuyamaSugeno);
    if needs_two && ctx.c < 2 {
        return Ok(out.undefined("needs at least two clusters"));
    }
    let value = match index {
        IndexName::XieBeni => ctx.tag(xb(&ctx, out, opts.tol)),
        IndexName::Kwon => ctx.tag(kwon(&ctx, out, opts.tol)),
        IndexName::ChenVp => chen(&ctx, out),
        IndexName::DaviesBouldin => ctx.tag(davies_bouldin(&ctx, out, opts)),
        IndexName::FukuyamaSugeno => ctx.tag(fukuyama_sugeno(&ctx, out, opts.m)),
        IndexName::Silhouette => silhouette(&ctx, out, opts.variant),
        IndexName::MaulikI => ctx.tag(maulik(&ctx, out, opts.variant)),
        IndexName::Dunn => dunn(&ctx, out),
        IndexName::CalinskiHarabasz => ctx.tag(calinski_harabasz(&ctx, out)),
        IndexName::PartitionCoefficient => {
            out.defined(ctx.u.iter().map(|u| u * u).sum::<f64>() / ctx.n as f64)
        }
        IndexName::PartitionEntropy => {
            let h: f64 = ctx.u.iter().filter(|&&u| u > 0.0).map(|&u| u * u.ln()).sum();
            // Adding 0.0 turns -0.0 into 0.0 for hard partitions.
            out.defined(-h / ctx.n as f64 + 0.0)
        }
    };
    Ok(value)
}

/// Every index in [`IndexName::ALL`] order.
pub fn compute_all(
    data: &DataSet,
    model: Option<&CategoryModel>,
    partition: &Partition,
    opts: &IndexOptions,
) -> Result<Vec<IndexValue>> {
    IndexName::ALL
        .into_iter()
        .map(|i| compute_index(i, data, model, partition, opts))
        .collect()
}

fn xb(ctx: &Context<'_>, out: IndexValue, tol: f64) -> IndexValue {
    let (sep, coincident) = ctx.min_proto_sq(tol);
    if coincident {
        return out.defined(f64::INFINITY).flag("coincident_prototypes");
    }
    out.defined(ctx.compactness(2.0) / (ctx.n as f64 * sep))
}

fn kwon(ctx: &Context<'_>, out: IndexValue, tol: f64) -> IndexValue {
    let (sep, coincident) = ctx.min_proto_sq(tol);
    if coincident {
        return out.defined(f64::INFINITY).flag("coincident_prototypes");
    }
    let penalty: f64 = (0..ctx.c).map(|i| sq_dist(ctx.v.row(i), ctx.xbar.view())).sum::<f64>() / ctx.c as f64;
    out.defined((ctx.compactness(2.0) + penalty) / (ctx.n as f64 * sep))
}

fn chen(ctx: &Context<'_>, out: IndexValue) -> IndexValue {
    let (c, n) = (ctx.c, ctx.n);
    let peak: f64 = (0..n)
        .map(|k| (0..c).map(|i| ctx.u[[i, k]]).fold(f64::NEG_INFINITY, f64::max))
        .sum();
    let mut overlap = 0.0;
    for i in 0..c - 1 {
        for j in (i + 1)..c {
            overlap += (0..n).map(|k| ctx.u[[i, k]].min(ctx.u[[j, k]])).sum::<f64>();
        }
    }
    let pairs = (c * (c - 1)) as f64 / 2.0;
    out.defined((peak - overlap / pairs) / n as f64)
}

fn davies_bouldin(ctx: &Context<'_>, out: IndexValue, opts: &IndexOptions) -> IndexValue {
    if let Some(i) = ctx.groups.iter().position(Vec::is_empty) {
        return out.undefined(format!("cluster {i} is empty"));
    }
    let (_, coincident) = ctx.min_proto_sq(opts.tol);
    if coincident {
        return out.defined(f64::INFINITY).flag("coincident_prototypes");
    }
    let scatter: Vec<f64> = ctx
        .groups
        .iter()
        .enumerate()
        .map(|(i, g)| g.iter().map(|&k| dist(ctx.x.row(k), ctx.v.row(i))).sum::<f64>() / g.len() as f64)
        .collect();
    let mut total = 0.0;
    for i in 0..ctx.c {
        let worst = (0..ctx.c)
            .filter(|&j| j != i)
            .map(|j| (scatter[i] + scatter[j]) / dist(ctx.v.row(i), ctx.v.row(j)))
            .fold(f64::NEG_INFINITY, f64::max);
        total += worst;
    }
    let scale = match opts.variant {
        Variant::Paper => (ctx.n * ctx.c) as f64,
        Variant::Standard => ctx.c as f64,
    };
    out.defined(total / scale)
}

fn fukuyama_sugeno(ctx: &Context<'_>, out: IndexValue, m: f64) -> IndexValue {
    let vbar = ctx.v.mean_axis(Axis(0)).expect("c ≥ 1");
    let mut spread = 0.0;
    for i in 0..ctx.c {
        let d = sq_dist(ctx.v.row(i), vbar.view());
        for k in 0..ctx.n {
            let w = ctx.u[[i, k]];
            if w > 0.0 {
                spread += w.powf(m) * d;
            }
        }
    }
    out.defined(ctx.compactness(m) - spread)
}

fn mean_dist(ctx: &Context<'_>, k: usize, members: &[usize]) -> f64 {
    let (s, cnt) = members
        .iter()
        .filter(|&&l| l != k)
        .fold((0.0, 0usize), |(s, c), &l| (s + dist(ctx.x.row(k), ctx.x.row(l)), c + 1));
    s / cnt as f64
}

fn silhouette(ctx: &Context<'_>, out: IndexValue, variant: Variant) -> IndexValue {
    if ctx.nonempty() < 2 {
        return out.undefined("needs at least two nonempty clusters");
    }
    let mut total = 0.0;
    let mut skipped = 0;
    for (i, g) in ctx.groups.iter().enumerate() {
        for &k in g {
            let s = if g.len() < 2 {
                skipped += 1;
                match variant {
                    // The object has no cluster mates, so a(x) is undefined.
                    Variant::Paper => continue,
                    Variant::Standard => 0.0,
                }
            } else {
                let a = mean_dist(ctx, k, g);
                let b = ctx
                    .groups
                    .iter()
                    .enumerate()
                    .filter(|(j, h)| *j != i && !h.is_empty())
                    .map(|(_, h)| mean_dist(ctx, k, h))
                    .fold(f64::INFINITY, f64::min);
                let denom = a.max(b);
                if denom > 0.0 {
                    (b - a) / denom
                } else {
                    0.0
                }
            };
            total += match variant {
                Variant::Paper => s / g.len() as f64,
                Variant::Standard => s,
            };
        }
    }
    let value = match variant {
        Variant::Paper => total / (ctx.n * ctx.c) as f64,
        Variant::Standard => total / ctx.n as f64,
    };
    let out = out.defined(value);
    if skipped > 0 {
        out.flag("singleton_clusters")
    } else {
        out
    }
}

fn maulik(ctx: &Context<'_>, out: IndexValue, variant: Variant) -> IndexValue {
    let mut spread = 0.0f64;
    for i in 0..ctx.c {
        for j in 0..ctx.c {
            spread = spread.max(dist(ctx.v.row(i), ctx.v.row(j)));
        }
    }
    let e1: f64 = (0..ctx.n).map(|k| dist(ctx.x.row(k), ctx.xbar.view())).sum();
    let ec: f64 = ctx
        .groups
        .iter()
        .enumerate()
        .map(|(i, g)| g.iter().map(|&k| dist(ctx.x.row(k), ctx.v.row(i))).sum::<f64>())
        .sum();
    if ec == 0.0 {
        return if spread * e1 > 0.0 {
            out.defined(f64::INFINITY).flag("zero_within_scatter")
        } else {
            out.undefined("zero within-cluster and total scatter")
        };
    }
    let c = ctx.c as f64;
    match variant {
        Variant::Paper => out.defined(spread * e1 / (ctx.n as f64 * c * ec)),
        Variant::Standard => out.defined((e1 / ec * spread / c).powi(2)),
    }
}

fn dunn(ctx: &Context<'_>, out: IndexValue) -> IndexValue {
    let groups: Vec<&Vec<usize>> = ctx.groups.iter().filter(|g| !g.is_empty()).collect();
    if groups.len() < 2 {
        return out.undefined("needs at least two nonempty clusters");
    }
    let mut gap = f64::INFINITY;
    for (a, ga) in groups.iter().enumerate() {
        for gb in groups.iter().skip(a + 1) {
            for &k in ga.iter() {
                for &l in gb.iter() {
                    gap = gap.min(dist(ctx.x.row(k), ctx.x.row(l)));
                }
            }
        }
    }
    let mut diameter = 0.0f64;
    for g in &groups {
        for (p, &k) in g.iter().enumerate() {
            for &l in &g[p + 1..] {
                diameter = diameter.max(dist(ctx.x.row(k), ctx.x.row(l)));
            }
        }
    }
    if diameter == 0.0 {
        return if gap > 0.0 {
            out.defined(f64::INFINITY).flag("zero_diameter")
        } else {
            out.undefined("zero diameter and zero separation")
        };
    }
    out.defined(gap / diameter)
}

fn calinski_harabasz(ctx: &Context<'_>, out: IndexValue) -> IndexValue {
    if ctx.n <= ctx.c {
        return out.undefined("needs n > c");
    }
    let mut between = 0.0;
    for i in 0..ctx.c {
        let d = sq_dist(ctx.v.row(i), ctx.xbar.view());
        between += ctx.u.row(i).iter().map(|u| u * u).sum::<f64>() * d;
    }
    let within = ctx.compactness(2.0);
    let num = (ctx.n - ctx.c) as f64 * between;
    let den = (ctx.c - 1) as f64 * within;
    if den == 0.0 {
        return if num > 0.0 {
            out.defined(f64::INFINITY).flag("zero_within_scatter")
        } else {
            out.undefined("zero within-cluster and between-cluster scatter")
        };
    }
    out.defined(num / den)
}

/// How the improper variants were built.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ImproperKind {
    /// Second prototype moved onto the first; fuzzy memberships (m = 2)
    /// recomputed from the moved prototypes.
    Coincident,
    /// Every column equal to `π ∝ (1, 2, …, c)`; prototypes are the
    /// `u²`-weighted means.
    Uninformative,
    /// Every entry `1/c`; prototypes as above.
    AbsoluteUninformative,
}

/// One improper variant scored against the proper result.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VariantScore {
    pub kind: ImproperKind,
    pub value: IndexValue,
    /// `Some(true)` when the variant scores strictly worse than the proper
    /// result; `None` when either value is undefined.
    pub strictly_worse: Option<bool>,
}

/// Outcome of the extreme-value audit for one index.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditReport {
    pub index: IndexName,
    pub proper: IndexValue,
    pub variants: Vec<VariantScore>,
    /// Every variant is defined and strictly worse.
    pub conforming: bool,
}

/// The three improper variants of a result, as `(kind, model, partition)`.
pub fn improper_variants(data: &DataSet, proper: &ClusteringResult) -> Result<Vec<(ImproperKind, CategoryModel, Partition)>> {
    let x = data
        .features()
        .map_err(|_| Error::MissingView { view: "features", needed_by: "extreme_value_audit" })?;
    let c = proper.partition.clusters();
    let n = data.len();
    if c < 2 {
        return Err(Error::Domain("the audit needs c ≥ 2".into()));
    }
    let v = match proper.model.prototype_matrix() {
        Some(p) => p.to_owned(),
        None => means(x, proper.partition.matrix()),
    };

    let mut moved = v.clone();
    let first = v.row(0).to_owned();
    moved.row_mut(1).assign(&first);
    let coincident_u = fuzzy_memberships(x, moved.view());

    let mut out = vec![(
        ImproperKind::Coincident,
        CategoryModel::prototypes(moved)?,
        Partition::new(coincident_u, PartitionKind::Soft)?,
    )];
    let total = (c * (c + 1)) as f64 / 2.0;
    let ramp: Vec<f64> = (1..=c).map(|i| i as f64 / total).collect();
    for (kind, pi) in [
        (ImproperKind::Uninformative, ramp),
        (ImproperKind::AbsoluteUninformative, vec![1.0 / c as f64; c]),
    ] {
        let u = crate::partition::make_uninformative(&pi, n)?;
        let w = u.matrix().mapv(|a| a * a);
        out.push((kind, CategoryModel::prototypes(means(x, w.view()))?, u));
    }
    Ok(out)
}

fn fuzzy_memberships(x: ArrayView2<'_, f64>, v: ArrayView2<'_, f64>) -> Array2<f64> {
    let (c, n) = (v.nrows(), x.nrows());
    let mut u = Array2::zeros((c, n));
    for k in 0..n {
        let d: Vec<f64> = (0..c).map(|i| sq_dist(x.row(k), v.row(i))).collect();
        let zeros = d.iter().filter(|&&di| di == 0.0).count();
        if zeros > 0 {
            for i in 0..c {
                u[[i, k]] = if d[i] == 0.0 { 1.0 / zeros as f64 } else { 0.0 };
            }
        } else {
            let inv: Vec<f64> = d.iter().map(|di| 1.0 / di).collect();
            let s: f64 = inv.iter().sum();
            for i in 0..c {
                u[[i, k]] = inv[i] / s;
            }
        }
    }
    u
}

/// Checks whether `index` rates every improper variant of `proper` strictly
/// worse than `proper` itself.
pub fn extreme_value_audit(
    index: IndexName,
    data: &DataSet,
    proper: &ClusteringResult,
    opts: &IndexOptions,
) -> Result<AuditReport> {
    let base = compute_index(index, data, Some(&proper.model), &proper.partition, opts)?;
    let mut variants = Vec::new();
    for (kind, model, partition) in improper_variants(data, proper)? {
        let value = compute_index(index, data, Some(&model), &partition, opts)?;
        let strictly_worse = base.better_than(&value, opts.tol);
        variants.push(VariantScore { kind, value, strictly_worse });
    }
    let conforming = variants.iter().all(|v| v.strictly_worse == Some(true));
    Ok(AuditReport { index, proper: base, variants, conforming })
}
