//! The alternating model/partition framework shared by the iterative
//! algorithms.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::categorization::{AffinityMap, CategoryModel, ClusteringResult};
use crate::data::DataSet;
use crate::error::Result;
use crate::partition::Partition;

use super::AlgoConfig;

/// The partition side of the alternation: memberships plus, for the
/// sample-weighted algorithms, `log a_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    pub partition: Partition,
    pub log_weights: Option<Vec<f64>>,
}

impl Assignment {
    pub fn plain(partition: Partition) -> Self {
        Assignment { partition, log_weights: None }
    }
}

/// Where the alternation begins.
#[derive(Debug, Clone)]
pub enum Start {
    /// Begin with a partition step from this model.
    Model(CategoryModel),
    /// Begin with a model step from this assignment.
    Assignment(Assignment),
}

/// State after one full sweep, handed to observers.
#[derive(Debug)]
pub struct Sweep<'a> {
    pub iteration: usize,
    pub model: &'a CategoryModel,
    pub assignment: &'a Assignment,
    pub objective: f64,
}

/// One alternating clustering algorithm.
pub trait AlternatingScheme {
    fn name(&self) -> &'static str;

    /// Checks views and draws the starting point.
    fn start(&self, data: &DataSet, cfg: &AlgoConfig, rng: &mut ChaCha8Rng) -> Result<Start>;

    /// Category model from the current assignment.
    fn model_step(&self, data: &DataSet, assignment: &Assignment) -> Result<CategoryModel>;

    /// Assignment from the current model.
    fn partition_step(&self, data: &DataSet, model: &CategoryModel) -> Result<Assignment>;

    /// Objective recorded after each sweep.
    fn objective(&self, data: &DataSet, model: &CategoryModel, assignment: &Assignment) -> Result<f64>;

    /// Affinity map the final model is judged by.
    fn affinity(&self) -> AffinityMap;

    fn trace_is_log(&self) -> bool {
        false
    }
}

/// RNG for a run with the given seed.
pub(crate) fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Runs a scheme to convergence.
///
/// A sweep is a model step followed by a partition step. The run stops when
/// the assignment (memberships and any sample weights) repeats exactly, when the objective changes by at most
/// `cfg.tolerance`, or after `cfg.max_iterations` sweeps.
pub fn run_framework<S: AlternatingScheme + ?Sized>(
    data: &DataSet,
    cfg: &AlgoConfig,
    scheme: &S,
) -> Result<ClusteringResult> {
    run_framework_observed(data, cfg, scheme, &mut |_| {})
}

/// [`run_framework`] calling `observer` after every sweep.
pub fn run_framework_observed<S: AlternatingScheme + ?Sized>(
    data: &DataSet,
    cfg: &AlgoConfig,
    scheme: &S,
    observer: &mut dyn FnMut(&Sweep<'_>),
) -> Result<ClusteringResult> {
    cfg.validate(data.len())?;
    let mut rng = seeded_rng(cfg.seed);
    let (mut assignment, mut previous) = match scheme.start(data, cfg, &mut rng)? {
        Start::Model(model) => {
            let a = scheme.partition_step(data, &model).map_err(|e| e.at_iteration(0))?;
            let j = scheme.objective(data, &model, &a).map_err(|e| e.at_iteration(0))?;
            (a, Some(j))
        }
        Start::Assignment(a) => (a, None),
    };

    let mut trace = Vec::new();
    let mut converged = false;
    let mut model = None;
    let mut iterations = 0;
    for it in 1..=cfg.max_iterations {
        iterations = it;
        let next_model = scheme.model_step(data, &assignment).map_err(|e| e.at_iteration(it))?;
        let next = scheme.partition_step(data, &next_model).map_err(|e| e.at_iteration(it))?;
        let j = scheme
            .objective(data, &next_model, &next)
            .map_err(|e| e.at_iteration(it))?;
        observer(&Sweep { iteration: it, model: &next_model, assignment: &next, objective: j });
        trace.push(j);

        let fixed_point = next == assignment;
        let settled = previous.is_some_and(|p| (j - p).abs() <= cfg.tolerance || j == p);
        assignment = next;
        model = Some(next_model);
        previous = Some(j);
        if fixed_point || settled {
            converged = true;
            break;
        }
    }

    let model = model.expect("at least one sweep runs");
    let log_weights = assignment.log_weights;
    Ok(ClusteringResult {
        algorithm: scheme.name().to_string(),
        model,
        partition: assignment.partition,
        affinity: scheme.affinity(),
        trace,
        trace_is_log: scheme.trace_is_log(),
        seed: cfg.seed,
        iterations,
        converged,
        sample_weights: log_weights.as_ref().map(|l| l.iter().map(|x| x.exp()).collect()),
        log_sample_weights: log_weights,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithms::{c_means, CMeans};
    use crate::error::Error;
    use ndarray::array;

    /// Wraps C-means and counts model steps.
    struct Counting<'a> {
        inner: CMeans,
        steps: &'a std::cell::Cell<usize>,
        constant: bool,
    }

    impl AlternatingScheme for Counting<'_> {
        fn name(&self) -> &'static str {
            "counting"
        }
        fn start(&self, data: &DataSet, cfg: &AlgoConfig, rng: &mut ChaCha8Rng) -> Result<Start> {
            self.inner.start(data, cfg, rng)
        }
        fn model_step(&self, data: &DataSet, a: &Assignment) -> Result<CategoryModel> {
            self.steps.set(self.steps.get() + 1);
            self.inner.model_step(data, a)
        }
        fn partition_step(&self, data: &DataSet, model: &CategoryModel) -> Result<Assignment> {
            self.inner.partition_step(data, model)
        }
        fn objective(&self, data: &DataSet, model: &CategoryModel, a: &Assignment) -> Result<f64> {
            if self.constant {
                Ok(7.0)
            } else {
                self.inner.objective(data, model, a)
            }
        }
        fn affinity(&self) -> AffinityMap {
            self.inner.affinity()
        }
    }

    fn blobs() -> DataSet {
        DataSet::from_points(&[0.0, 0.3, 0.9, 4.0, 4.2, 5.1, 9.0, 9.9, 10.0, 2.5]).unwrap()
    }

    #[test]
    fn wrapped_steps_reproduce_c_means() {
        let steps = std::cell::Cell::new(0);
        for seed in 0..5 {
            let cfg = AlgoConfig::new(3).with_seed(seed);
            let scheme = Counting { inner: CMeans, steps: &steps, constant: false };
            let a = run_framework(&blobs(), &cfg, &scheme).unwrap();
            let b = c_means(&blobs(), &cfg).unwrap();
            assert_eq!(a.partition, b.partition);
            assert_eq!(a.model, b.model);
            assert_eq!(a.trace, b.trace);
        }
    }

    #[test]
    fn constant_objective_stops_after_one_sweep() {
        let steps = std::cell::Cell::new(0);
        let scheme = Counting { inner: CMeans, steps: &steps, constant: true };
        let r = run_framework(&blobs(), &AlgoConfig::new(3).with_seed(2), &scheme).unwrap();
        assert_eq!(r.iterations, 1);
        assert_eq!(steps.get(), 1);
        assert!(r.converged);
    }

    #[test]
    fn zero_iterations_rejected() {
        let mut cfg = AlgoConfig::new(2);
        cfg.max_iterations = 0;
        assert!(matches!(c_means(&blobs(), &cfg), Err(Error::Config(_))));
    }

    #[test]
    fn iteration_cap_respected() {
        let steps = std::cell::Cell::new(0);
        let scheme = Counting { inner: CMeans, steps: &steps, constant: false };
        let mut cfg = AlgoConfig::new(3).with_seed(0);
        cfg.max_iterations = 1;
        let r = run_framework(&blobs(), &cfg, &scheme).unwrap();
        assert_eq!(r.iterations, 1);
        assert_eq!(r.trace.len(), 1);
    }

    #[test]
    fn step_errors_carry_the_iteration() {
        struct Failing;
        impl AlternatingScheme for Failing {
            fn name(&self) -> &'static str {
                "failing"
            }
            fn start(&self, _: &DataSet, _: &AlgoConfig, _: &mut ChaCha8Rng) -> Result<Start> {
                Ok(Start::Assignment(Assignment::plain(Partition::from_labels(&[0, 1], 2)?)))
            }
            fn model_step(&self, _: &DataSet, _: &Assignment) -> Result<CategoryModel> {
                Err(Error::Domain("empty cluster".into()))
            }
            fn partition_step(&self, _: &DataSet, _: &CategoryModel) -> Result<Assignment> {
                unreachable!()
            }
            fn objective(&self, _: &DataSet, _: &CategoryModel, _: &Assignment) -> Result<f64> {
                unreachable!()
            }
            fn affinity(&self) -> AffinityMap {
                AffinityMap::SqEuclidean
            }
        }
        let data = DataSet::from_features(array![[0.0], [1.0]]).unwrap();
        let err = run_framework(&data, &AlgoConfig::new(2), &Failing).unwrap_err();
        assert!(matches!(err, Error::Step { iteration: 1, .. }), "{err}");
    }
}
