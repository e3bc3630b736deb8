//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage error, 2 data or validation error,
//! 3 numerical failure.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use treeclust_core::cluster::{accuracy, ClusterMethod, SigmaPolicy};
use treeclust_core::experiment::{cluster_signatures, simulate};
use treeclust_core::scnmf::scnmf_factorize;
use treeclust_core::seed::{self, stream};
use treeclust_core::{ForestMatrix, Metric};
use treeclust_core::{FactorizationConfig, MetaBasis};

use crate::config::read_config;
use crate::error::{Error, Result};
use crate::forest_io::{read_forest, read_labels_csv, write_forest, write_labels_csv, write_matrix_csv, write_series_csv, ForestFile};
use crate::runner::{run_experiment, write_outputs, DETAILS_FILE, TABLE_FILE};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "treeclust", version, about = "Cluster attributed trees through meta-tree factorization")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate one simulated forest from a case of an experiment config.
    Simulate {
        /// Experiment config file.
        #[arg(long)]
        config: PathBuf,
        /// Case to simulate [default: the first case].
        #[arg(long)]
        case: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output forest file.
        #[arg(long)]
        out: PathBuf,
    },
    /// Factorize a forest and write meta-trees, coefficients and objective trace.
    Factorize {
        /// Input forest file.
        #[arg(long = "in")]
        input: PathBuf,
        #[command(flatten)]
        factor: FactorArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Directory for meta_trees.csv, coefficients.csv and objective.csv.
        #[arg(long)]
        outdir: PathBuf,
    },
    /// Factorize a forest, cluster its signature vectors and write labels.
    Cluster {
        /// Input forest file.
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value = "ncut", value_parser = ["ncut", "kmeans"])]
        method: String,
        #[arg(long, default_value = "l1", value_parser = ["l1", "l2path", "euclid"])]
        metric: String,
        /// Number of clusters.
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(2..))]
        clusters: u64,
        /// Affinity bandwidth for ncut: "median" or a positive number.
        #[arg(long, default_value = "median")]
        sigma: String,
        /// K-means restarts.
        #[arg(long, default_value_t = 10)]
        kmeans_restarts: usize,
        #[command(flatten)]
        factor: FactorArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output labels CSV (id,cluster).
        #[arg(long)]
        out: PathBuf,
    },
    /// Score a labels CSV against the ground-truth labels of a forest.
    Evaluate {
        /// Labels CSV (id,cluster).
        #[arg(long)]
        labels: PathBuf,
        /// Forest file whose trees all carry labels.
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Run every case of an experiment config and write accuracy tables.
    Experiment {
        /// Experiment config file.
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Override datasets_per_case from the config.
        #[arg(long)]
        datasets: Option<usize>,
        /// Output directory for accuracy.csv and details.csv.
        #[arg(long)]
        outdir: PathBuf,
        /// Worker threads (0 uses every core).
        #[arg(long, default_value_t = 0)]
        jobs: usize,
    },
}

#[derive(Debug, Args)]
pub struct FactorArgs {
    /// Number of meta-trees.
    #[arg(long, default_value_t = 8)]
    pub rank: usize,
    #[arg(long, default_value_t = 500)]
    pub max_iters: usize,
    /// Relative objective change treated as stalled.
    #[arg(long, default_value_t = 1e-6)]
    pub rel_tol: f64,
    /// Value given to zero-like entries of mixed meta-tree rows.
    #[arg(long, default_value_t = 1e-3)]
    pub lambda: f64,
    /// Denominator guard of the multiplicative updates.
    #[arg(long, default_value_t = 1e-12)]
    pub epsilon: f64,
    /// Entries at or below this are zero-like.
    #[arg(long, default_value_t = 1e-9)]
    pub pos_threshold: f64,
    /// Random restarts; the lowest objective wins.
    #[arg(long, default_value_t = 5)]
    pub restarts: usize,
    /// Rescale each attribute by its forest-wide maximum first.
    #[arg(long)]
    pub normalize: bool,
}

impl FactorArgs {
    fn config(&self, seed: u64) -> FactorizationConfig {
        FactorizationConfig {
            rank: self.rank,
            max_iters: self.max_iters,
            rel_tol: self.rel_tol,
            lambda: self.lambda,
            epsilon: self.epsilon,
            pos_threshold: self.pos_threshold,
            restarts: self.restarts,
            seed,
        }
    }

    fn factorize(&self, forest: &ForestMatrix, seed: u64) -> Result<MetaBasis> {
        let cfg = self.config(seed);
        let basis = if self.normalize {
            scnmf_factorize(&forest.normalized_by_attribute_max(), &cfg)
        } else {
            scnmf_factorize(forest, &cfg)
        }?;
        Ok(basis)
    }
}

/// Parses `args` and runs the command, returning the process exit code.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match run(cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_numerical() {
                EXIT_NUMERICAL
            } else {
                EXIT_DATA
            }
        }
    }
}

fn load_forest(path: &std::path::Path) -> Result<(ForestFile, ForestMatrix)> {
    let file = read_forest(path)?;
    let forest = ForestMatrix::assemble(&file.trees, &file.spec)?;
    Ok((file, forest))
}

pub fn run(command: Command) -> Result<()> {
    match command {
        Command::Simulate { config, case, seed, out } => {
            let cfg = read_config(&config)?;
            let recipe = match &case {
                None => &cfg.cases[0],
                Some(id) => cfg
                    .cases
                    .iter()
                    .find(|c| &c.id == id)
                    .ok_or_else(|| Error::Invalid(format!("no case {id:?} in {}", config.display())))?,
            };
            let data = simulate(recipe, seed)?;
            let file = ForestFile::new(data.support, data.trees);
            write_forest(&file, &out)?;
            println!(
                "case {}: n={} p={} q={}",
                recipe.id,
                file.trees.len(),
                file.spec.branch_count(),
                file.attr_names.len()
            );
        }
        Command::Factorize {
            input,
            factor,
            seed,
            outdir,
        } => {
            let (_, forest) = load_forest(&input)?;
            let basis = factor.factorize(&forest, seed)?;
            std::fs::create_dir_all(&outdir).map_err(|e| Error::io(&outdir, e))?;
            write_matrix_csv(basis.meta_trees(), &outdir.join("meta_trees.csv"))?;
            write_matrix_csv(basis.coefficients(), &outdir.join("coefficients.csv"))?;
            write_series_csv("objective", basis.objective_trace(), &outdir.join("objective.csv"))?;
            println!(
                "n={} p={} q={} rank={} objective={} sweeps={} converged={}",
                forest.n(),
                forest.p(),
                forest.q(),
                factor.rank,
                basis.objective(),
                basis.objective_trace().len(),
                basis.converged()
            );
        }
        Command::Cluster {
            input,
            method,
            metric,
            clusters,
            sigma,
            kmeans_restarts,
            factor,
            seed,
            out,
        } => {
            let method = ClusterMethod::parse(&method).expect("clap restricts --method");
            let metric = Metric::parse(&metric).expect("clap restricts --metric");
            let sigma = parse_sigma(&sigma)?;
            let (_, forest) = load_forest(&input)?;
            let basis = factor.factorize(&forest, seed::derive(seed, stream::FACTORIZE))?;
            let result = cluster_signatures(
                &basis.signature_vectors(),
                method,
                metric,
                clusters as usize,
                sigma,
                kmeans_restarts,
                seed::derive(seed, stream::CLUSTER),
            )?;
            write_labels_csv(forest.ids(), &result.assignments, &out)?;
            println!("objective={}", basis.objective());
            if let Some(truth) = forest.truth_labels() {
                println!("accuracy={}", accuracy(&result.assignments, &truth)?);
            }
        }
        Command::Evaluate { labels, input } => {
            let (ids, assignments) = read_labels_csv(&labels)?;
            let file = read_forest(&input)?;
            let truth = ids
                .iter()
                .map(|id| {
                    let tree = file
                        .trees
                        .iter()
                        .find(|t| t.id() == id)
                        .ok_or_else(|| Error::Invalid(format!("tree {id:?} is not in the forest")))?;
                    tree.label()
                        .ok_or_else(|| Error::Invalid(format!("tree {id:?} has no ground-truth label")))
                })
                .collect::<Result<Vec<&str>>>()?;
            println!("n={} accuracy={}", ids.len(), accuracy(&assignments, &truth)?);
        }
        Command::Experiment {
            config,
            seed,
            datasets,
            outdir,
            jobs,
        } => {
            let mut cfg = read_config(&config)?;
            cfg.master_seed = seed;
            if let Some(d) = datasets {
                cfg.datasets_per_case = d;
            }
            let run = run_experiment(&cfg, jobs)?;
            write_outputs(&run, &outdir)?;
            for row in &run.table.rows {
                match &row.failure {
                    None => println!(
                        "{} {}: {:.4} ± {:.4} ({} datasets)",
                        row.case,
                        row.method.name(),
                        row.mean,
                        row.sd,
                        row.datasets
                    ),
                    Some(msg) => println!("{} {}: failed: {msg}", row.case, row.method.name()),
                }
            }
            println!(
                "wrote {} and {} to {}",
                TABLE_FILE,
                DETAILS_FILE,
                outdir.display()
            );
            if run.all_failed() {
                return Err(Error::Invalid("every case failed".into()));
            }
        }
    }
    Ok(())
}

fn parse_sigma(value: &str) -> Result<SigmaPolicy> {
    if value == "median" {
        return Ok(SigmaPolicy::Median);
    }
    match value.parse::<f64>() {
        Ok(s) if s > 0.0 && s.is_finite() => Ok(SigmaPolicy::Fixed(s)),
        _ => Err(Error::Invalid(format!("--sigma must be \"median\" or a positive number, got {value:?}"))),
    }
}
