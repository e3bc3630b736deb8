//! Parallel experiment runner.
//!
//! Every (case, dataset) pair is an independent job seeded from the master
//! seed, so the worker count never changes the results. Outputs are written
//! once, after all jobs finish, in configuration order.

use std::path::Path;

use rayon::prelude::*;
use treeclust_core::experiment::{case_seed, dataset_seed, run_dataset, AccuracyTable, DatasetOutcome, ExperimentConfig};

use crate::error::{Error, Result};
use crate::report::{emit_details, emit_table};

pub const TABLE_FILE: &str = "accuracy.csv";
pub const DETAILS_FILE: &str = "details.csv";

pub struct ExperimentRun {
    pub table: AccuracyTable,
    pub cases: Vec<(String, treeclust_core::Result<Vec<DatasetOutcome>>)>,
}

impl ExperimentRun {
    pub fn failed_cases(&self) -> usize {
        self.cases.iter().filter(|(_, r)| r.is_err()).count()
    }

    pub fn all_failed(&self) -> bool {
        self.failed_cases() == self.cases.len()
    }
}

/// Runs every case of `cfg` on at most `jobs` threads (0 lets rayon choose).
pub fn run_experiment(cfg: &ExperimentConfig, jobs: usize) -> Result<ExperimentRun> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Invalid(format!("cannot start worker pool: {e}")))?;
    let tasks: Vec<(usize, usize)> = (0..cfg.cases.len())
        .flat_map(|c| (0..cfg.datasets_per_case).map(move |d| (c, d)))
        .collect();
    let results: Vec<treeclust_core::Result<DatasetOutcome>> = pool.install(|| {
        tasks
            .par_iter()
            .map(|&(c, d)| {
                let seed = dataset_seed(case_seed(cfg.master_seed, c), d);
                run_dataset(&cfg.cases[c], cfg, d, seed)
            })
            .collect()
    });

    let mut results = results.into_iter();
    let mut table = AccuracyTable::default();
    let mut cases = Vec::with_capacity(cfg.cases.len());
    for recipe in &cfg.cases {
        let chunk: Vec<_> = results.by_ref().take(cfg.datasets_per_case).collect();
        let outcome: treeclust_core::Result<Vec<DatasetOutcome>> = chunk.into_iter().collect();
        match &outcome {
            Ok(datasets) => log::info!("case {}: {} datasets done", recipe.id, datasets.len()),
            Err(e) => log::warn!("case {} failed: {e}", recipe.id),
        }
        table.push_case(&recipe.id, &cfg.methods, &outcome);
        cases.push((recipe.id.clone(), outcome));
    }
    Ok(ExperimentRun { table, cases })
}

/// Writes `accuracy.csv` and `details.csv` into `outdir`, creating it.
pub fn write_outputs(run: &ExperimentRun, outdir: &Path) -> Result<()> {
    std::fs::create_dir_all(outdir).map_err(|e| Error::io(outdir, e))?;
    emit_table(&run.table, &outdir.join(TABLE_FILE))?;
    let ok = run
        .cases
        .iter()
        .filter_map(|(id, r)| r.as_ref().ok().map(|o| (id.as_str(), o.as_slice())));
    emit_details(ok, &outdir.join(DETAILS_FILE))
}
