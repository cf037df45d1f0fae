//! Command-line arguments.

use std::path::{Path, PathBuf};

use axioclust::algorithms::{AlgoConfig, Algorithm, Init};
use axioclust::axiom_lab::Theorem;
use axioclust::partition::PartitionKind;
use axioclust::validity::Variant;
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::ingest::View;
use crate::pipeline::{self, ClassifySpec, CliError, IndicesSpec, InputSpec, Output, RunSpec, SweepSpec};

#[derive(Debug, Parser)]
#[command(name = "axioclust", version, about = "Cluster, check separation axioms and score validity indices")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run an algorithm and report result, axioms, criteria and optionally
    /// indices and inequality checks.
    Run(RunArgs),
    /// Taxonomy and axiom checks for a partition file.
    Classify(ClassifyArgs),
    /// Validity indices for a partition file.
    Indices(IndicesArgs),
    /// Run an algorithm and verify one family of inequalities.
    Verify(VerifyArgs),
    /// Rerun an algorithm over a range of cluster counts.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    /// Data file.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = View::Features)]
    pub view: View,
    /// The features file starts with a header row.
    #[arg(long)]
    pub header: bool,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl InputArgs {
    fn spec(&self) -> InputSpec {
        InputSpec { path: self.input.clone(), view: self.view, header: self.header }
    }
}

#[derive(Debug, Clone, Args)]
pub struct AlgoArgs {
    /// single_linkage, c_means, fuzzy_c_means, cml_gaussian,
    /// sample_weighted_gaussian or sample_weighted_multinomial.
    #[arg(long, default_value = "c_means", value_parser = parse_algorithm)]
    pub algo: Algorithm,
    /// Number of clusters. Required except for `sweep`.
    #[arg(long)]
    pub c: Option<usize>,
    #[arg(long, default_value_t = 2.0)]
    pub m: f64,
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    #[arg(long, default_value_t = 1.0)]
    pub kappa: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Convergence tolerance on the objective.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long, default_value_t = 300)]
    pub max_iter: usize,
    /// farthest-first, random-objects or random-partition.
    #[arg(long, default_value = "farthest-first", value_parser = parse_init)]
    pub init: Init,
    #[arg(long, value_enum, default_value_t = VariantArg::Paper)]
    pub variant: VariantArg,
}

impl AlgoArgs {
    fn config(&self) -> AlgoConfig {
        AlgoConfig {
            c: self.c.unwrap_or(0),
            max_iterations: self.max_iter,
            tolerance: self.tol,
            seed: self.seed,
            init: self.init,
            m: self.m,
            beta: self.beta,
            sigma: self.sigma,
            kappa: self.kappa,
        }
    }

    fn spec(&self, input: &InputArgs, indices: bool, theorems: Vec<Theorem>, trials: usize) -> RunSpec {
        RunSpec {
            input: input.spec(),
            algorithm: self.algo,
            config: self.config(),
            indices,
            variant: self.variant.into(),
            theorems,
            trials,
        }
    }
}

fn parse_algorithm(s: &str) -> Result<Algorithm, String> {
    s.parse().map_err(|e: axioclust::Error| e.to_string())
}

fn parse_init(s: &str) -> Result<Init, String> {
    s.parse().map_err(|e: axioclust::Error| e.to_string())
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum VariantArg {
    Paper,
    Standard,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Paper => Variant::Paper,
            VariantArg::Standard => Variant::Standard,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum TheoremArg {
    /// Similarity inequalities.
    Thm4,
    /// Dissimilarity inequalities.
    Thm5,
}

impl From<TheoremArg> for Theorem {
    fn from(t: TheoremArg) -> Self {
        match t {
            TheoremArg::Thm4 => Theorem::Similarity,
            TheoremArg::Thm5 => Theorem::Dissimilarity,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum KindArg {
    Hard,
    Soft,
    Possibilistic,
}

impl From<KindArg> for PartitionKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Hard => PartitionKind::Hard,
            KindArg::Soft => PartitionKind::Soft,
            KindArg::Possibilistic => PartitionKind::Possibilistic,
        }
    }
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub algo: AlgoArgs,
    /// Add the validity-index block.
    #[arg(long)]
    pub indices: bool,
    /// Also verify these inequality families (repeatable).
    #[arg(long, value_enum)]
    pub verify: Vec<TheoremArg>,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub theorem: TheoremArg,
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub algo: AlgoArgs,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Membership matrix, c rows by n columns, no header.
    #[arg(long)]
    pub partition: PathBuf,
    #[arg(long, value_enum, default_value_t = KindArg::Hard)]
    pub kind: KindArg,
}

#[derive(Debug, Args)]
pub struct IndicesArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long)]
    pub partition: PathBuf,
    #[arg(long, value_enum, default_value_t = KindArg::Hard)]
    pub kind: KindArg,
    #[arg(long, value_enum, default_value_t = VariantArg::Paper)]
    pub variant: VariantArg,
    /// Score the improper variants of the partition as well.
    #[arg(long)]
    pub audit: bool,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub algo: AlgoArgs,
    #[arg(long, default_value_t = 2)]
    pub c_min: usize,
    #[arg(long)]
    pub c_max: usize,
}

impl Cli {
    pub fn out(&self) -> Option<&Path> {
        let input = match &self.command {
            Command::Run(a) => &a.input,
            Command::Classify(a) => &a.input,
            Command::Indices(a) => &a.input,
            Command::Verify(a) => &a.input,
            Command::Sweep(a) => &a.input,
        };
        input.out.as_deref()
    }

    pub fn execute(&self) -> Result<Output, CliError> {
        let needs_c = match &self.command {
            Command::Run(a) => Some(&a.algo),
            Command::Verify(a) => Some(&a.algo),
            _ => None,
        };
        if needs_c.is_some_and(|a| a.c.is_none()) {
            return Err(CliError::Usage("--c is required".into()));
        }
        match &self.command {
            Command::Run(a) => {
                let theorems = a.verify.iter().map(|&t| t.into()).collect();
                pipeline::run(&a.algo.spec(&a.input, a.indices, theorems, a.trials))
            }
            Command::Verify(a) => pipeline::verify_command(&a.algo.spec(&a.input, false, vec![a.theorem.into()], a.trials)),
            Command::Classify(a) => pipeline::classify(&ClassifySpec {
                input: a.input.spec(),
                partition: a.partition.clone(),
                kind: a.kind.into(),
            }),
            Command::Indices(a) => pipeline::indices(&IndicesSpec {
                input: a.input.spec(),
                partition: a.partition.clone(),
                kind: a.kind.into(),
                variant: a.variant.into(),
                audit: a.audit,
            }),
            Command::Sweep(a) => pipeline::sweep(&SweepSpec {
                run: a.algo.spec(&a.input, true, Vec::new(), 0),
                c_min: a.c_min,
                c_max: a.c_max,
            }),
        }
    }
}
