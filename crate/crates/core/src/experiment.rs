//! Simulation experiments: generate, factorize, cluster, score, aggregate.
//!
//! Seeds form a tree: `master → case → dataset → {generate, noise,
//! factorize, cluster}` via [`seed::derive`], so cases and datasets can be
//! evaluated in any order with identical results.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::cluster::{accuracy, build_affinity, kmeans_frechet, ncut_cluster, ClusterMethod, ClusterResult, SigmaPolicy};
use crate::error::{Error, Result};
use crate::forest::ForestMatrix;
use crate::metaspace::{Metric, SignatureVector};
use crate::scnmf::{scnmf_factorize, FactorizationConfig, MetaBasis};
use crate::seed::{self, stream};
use crate::simgen::{add_attribute_noise, add_topology_noise, generate_dataset, NoiseSpec, SimulatedDataset, TreeGenSpec};

/// One experimental case: two tree sets and optional noise.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetRecipe {
    pub id: String,
    pub set_a: TreeGenSpec,
    pub set_b: TreeGenSpec,
    pub noise: Option<NoiseSpec>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub cases: Vec<DatasetRecipe>,
    pub datasets_per_case: usize,
    pub factorization: FactorizationConfig,
    pub methods: Vec<ClusterMethod>,
    pub metric: Metric,
    pub clusters: usize,
    pub sigma: SigmaPolicy,
    pub kmeans_restarts: usize,
    /// Rescale each attribute by its forest-wide maximum before factorizing.
    pub normalize: bool,
    pub master_seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            cases: Vec::new(),
            datasets_per_case: 20,
            factorization: FactorizationConfig::default(),
            methods: alloc::vec![ClusterMethod::Ncut, ClusterMethod::Kmeans],
            metric: Metric::L1,
            clusters: 2,
            sigma: SigmaPolicy::Median,
            kmeans_restarts: 10,
            normalize: false,
            master_seed: 0,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.methods.is_empty() {
            return Err(Error::InvalidConfig("at least one clustering method is required".into()));
        }
        if self.datasets_per_case == 0 {
            return Err(Error::InvalidConfig("datasets_per_case must be at least 1".into()));
        }
        if self.clusters < 2 {
            return Err(Error::InvalidConfig("at least two clusters are required".into()));
        }
        self.factorization.validate()
    }
}

pub fn case_seed(master_seed: u64, case_index: usize) -> u64 {
    seed::derive(master_seed, case_index as u64)
}

pub fn dataset_seed(case_seed: u64, dataset_index: usize) -> u64 {
    seed::derive(case_seed, dataset_index as u64)
}

/// Generates the clean forest of a recipe and applies its noise, if any.
pub fn simulate(recipe: &DatasetRecipe, dataset_seed: u64) -> Result<SimulatedDataset> {
    let mut data = generate_dataset(&recipe.set_a, &recipe.set_b, seed::derive(dataset_seed, stream::GENERATE))?;
    if let Some(noise) = &recipe.noise {
        let base = seed::derive(dataset_seed, stream::NOISE);
        data.trees = data
            .trees
            .iter()
            .enumerate()
            .map(|(i, tree)| {
                let i = i as u64;
                let noisy = add_attribute_noise(tree, noise, seed::derive(base, 2 * i))?;
                add_topology_noise(&noisy, noise, &data.support, seed::derive(base, 2 * i + 1))
            })
            .collect::<Result<_>>()?;
    }
    Ok(data)
}

/// Clusters signature vectors with one method.
pub fn cluster_signatures(
    signatures: &[SignatureVector],
    method: ClusterMethod,
    metric: Metric,
    clusters: usize,
    sigma: SigmaPolicy,
    kmeans_restarts: usize,
    seed: u64,
) -> Result<ClusterResult> {
    match method {
        ClusterMethod::Ncut => {
            let graph = build_affinity(signatures, metric, sigma)?;
            ncut_cluster(&graph, clusters, seed)
        }
        ClusterMethod::Kmeans => kmeans_frechet(signatures, clusters, metric, kmeans_restarts, seed),
    }
}

/// Assembles and factorizes a forest with the experiment's settings.
pub fn factorize_forest(forest: &ForestMatrix, cfg: &ExperimentConfig, seed: u64) -> Result<MetaBasis> {
    let factorization = FactorizationConfig {
        seed,
        ..cfg.factorization.clone()
    };
    if cfg.normalize {
        scnmf_factorize(&forest.normalized_by_attribute_max(), &factorization)
    } else {
        scnmf_factorize(forest, &factorization)
    }
}

/// Per-dataset result.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetOutcome {
    pub dataset: usize,
    pub seed: u64,
    pub objective: f64,
    pub accuracies: Vec<(ClusterMethod, f64)>,
}

impl DatasetOutcome {
    pub fn accuracy(&self, method: ClusterMethod) -> Option<f64> {
        self.accuracies.iter().find(|(m, _)| *m == method).map(|(_, a)| *a)
    }
}

/// Runs one dataset of a case end to end.
pub fn run_dataset(recipe: &DatasetRecipe, cfg: &ExperimentConfig, dataset: usize, dataset_seed: u64) -> Result<DatasetOutcome> {
    let wrap = |e: Error| Error::Dataset {
        dataset,
        message: e.to_string(),
    };
    let data = simulate(recipe, dataset_seed).map_err(wrap)?;
    let forest = ForestMatrix::assemble(&data.trees, &data.support).map_err(wrap)?;
    let basis = factorize_forest(&forest, cfg, seed::derive(dataset_seed, stream::FACTORIZE)).map_err(wrap)?;
    let signatures = basis.signature_vectors();
    let truth = forest
        .truth_labels()
        .ok_or_else(|| wrap(Error::InvalidConfig("simulated trees are unlabeled".into())))?;
    let cluster_seed = seed::derive(dataset_seed, stream::CLUSTER);
    let accuracies = cfg
        .methods
        .iter()
        .map(|&method| {
            let result = cluster_signatures(
                &signatures,
                method,
                cfg.metric,
                cfg.clusters,
                cfg.sigma,
                cfg.kmeans_restarts,
                cluster_seed,
            )?;
            Ok((method, accuracy(&result.assignments, &truth)?))
        })
        .collect::<Result<Vec<_>>>()
        .map_err(wrap)?;
    Ok(DatasetOutcome {
        dataset,
        seed: dataset_seed,
        objective: basis.objective(),
        accuracies,
    })
}

/// Runs every dataset of a case sequentially.
pub fn run_case(recipe: &DatasetRecipe, cfg: &ExperimentConfig, case_seed: u64) -> Result<Vec<DatasetOutcome>> {
    cfg.validate()?;
    (0..cfg.datasets_per_case)
        .map(|d| run_dataset(recipe, cfg, d, dataset_seed(case_seed, d)))
        .collect()
}

/// Arithmetic mean and population standard deviation.
pub fn aggregate(values: &[f64]) -> Result<(f64, f64)> {
    if values.is_empty() {
        return Err(Error::EmptyInput("accuracy list"));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    Ok((mean, libm::sqrt(var)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct AccuracyRow {
    pub case: String,
    pub method: ClusterMethod,
    pub mean: f64,
    pub sd: f64,
    pub datasets: usize,
    /// Set when the case failed; statistics are then meaningless.
    pub failure: Option<String>,
}

/// Mean ± SD accuracy per (case, method), in insertion order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct AccuracyTable {
    pub rows: Vec<AccuracyRow>,
}

impl AccuracyTable {
    /// Appends one row per method for a finished (or failed) case.
    pub fn push_case(&mut self, case: &str, methods: &[ClusterMethod], outcome: &Result<Vec<DatasetOutcome>>) {
        for &method in methods {
            let row = match outcome {
                Ok(datasets) => {
                    let values: Vec<f64> = datasets.iter().filter_map(|d| d.accuracy(method)).collect();
                    match aggregate(&values) {
                        Ok((mean, sd)) => AccuracyRow {
                            case: case.into(),
                            method,
                            mean,
                            sd,
                            datasets: values.len(),
                            failure: None,
                        },
                        Err(e) => failed(case, method, &e),
                    }
                }
                Err(e) => failed(case, method, e),
            };
            self.rows.push(row);
        }
    }

    pub fn row(&self, case: &str, method: ClusterMethod) -> Option<&AccuracyRow> {
        self.rows.iter().find(|r| r.case == case && r.method == method)
    }
}

fn failed(case: &str, method: ClusterMethod, e: &Error) -> AccuracyRow {
    AccuracyRow {
        case: case.into(),
        method,
        mean: f64::NAN,
        sd: f64::NAN,
        datasets: 0,
        failure: Some(format!("{e}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simgen::{AttrRange, DepthSpec, PatternMode};
    use alloc::vec;

    fn recipe(pattern: PatternMode, b: (f64, f64)) -> DatasetRecipe {
        let set = |lo, hi| TreeGenSpec {
            order: 2,
            depth: DepthSpec::Fixed(3),
            pattern,
            attr_ranges: vec![AttrRange::new(lo, hi).unwrap(); 3],
            count: 10,
        };
        DatasetRecipe {
            id: "t".into(),
            set_a: set(2.0, 5.0),
            set_b: set(b.0, b.1),
            noise: None,
        }
    }

    #[test]
    fn aggregate_examples() {
        assert_eq!(aggregate(&[1.0, 1.0, 1.0]).unwrap(), (1.0, 0.0));
        assert_eq!(aggregate(&[0.0, 1.0]).unwrap(), (0.5, 0.5));
        assert!(aggregate(&[]).is_err());
    }

    #[test]
    fn single_dataset_is_deterministic() {
        let cfg = ExperimentConfig {
            datasets_per_case: 1,
            ..Default::default()
        };
        let r = recipe(PatternMode::Same, (10.0, 15.0));
        let a = run_case(&r, &cfg, 99).unwrap();
        let b = run_case(&r, &cfg, 99).unwrap();
        assert_eq!(a, b);
        assert_eq!(a[0].accuracies.len(), 2);
    }

    #[test]
    fn failed_case_rows() {
        let mut table = AccuracyTable::default();
        let methods = [ClusterMethod::Ncut, ClusterMethod::Kmeans];
        table.push_case("bad", &methods, &Err(Error::ZeroForest));
        assert_eq!(table.rows.len(), 2);
        assert!(table.rows.iter().all(|r| r.failure.is_some()));
        assert!(table.row("bad", ClusterMethod::Kmeans).is_some());
    }

    #[test]
    fn config_validation() {
        let cfg = ExperimentConfig {
            methods: vec![],
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
        let cfg = ExperimentConfig {
            clusters: 1,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
    }
}
