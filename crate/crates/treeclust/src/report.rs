//! CSV reports for experiment runs.

use std::path::Path;

use treeclust_core::experiment::{AccuracyTable, DatasetOutcome};

use crate::error::{Error, Result};

fn writer(path: &Path) -> Result<csv::Writer<std::fs::File>> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(file))
}

/// `case,method,mean,sd,datasets,status`; failed rows leave the statistics
/// empty and carry the error message in `status`.
pub fn emit_table(table: &AccuracyTable, path: &Path) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["case", "method", "mean", "sd", "datasets", "status"])?;
    for row in &table.rows {
        let (mean, sd, status) = match &row.failure {
            None => (row.mean.to_string(), row.sd.to_string(), "ok".to_owned()),
            Some(message) => (String::new(), String::new(), format!("failed: {message}")),
        };
        w.write_record([
            row.case.as_str(),
            row.method.name(),
            &mean,
            &sd,
            &row.datasets.to_string(),
            &status,
        ])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// One row per (case, dataset, method) of the successful cases.
pub fn emit_details<'a>(
    cases: impl IntoIterator<Item = (&'a str, &'a [DatasetOutcome])>,
    path: &Path,
) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["case", "dataset", "seed", "objective", "method", "accuracy"])?;
    for (case, outcomes) in cases {
        for outcome in outcomes {
            for (method, acc) in &outcome.accuracies {
                w.write_record([
                    case,
                    &outcome.dataset.to_string(),
                    &outcome.seed.to_string(),
                    &outcome.objective.to_string(),
                    method.name(),
                    &acc.to_string(),
                ])?;
            }
        }
    }
    w.flush().map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use treeclust_core::cluster::ClusterMethod;
    use treeclust_core::Error as CoreError;

    #[test]
    fn table_and_details_layout() {
        let dir = tempfile::tempdir().unwrap();
        let outcome = DatasetOutcome {
            dataset: 0,
            seed: 7,
            objective: 1.5,
            accuracies: vec![(ClusterMethod::Ncut, 1.0)],
        };
        let mut table = AccuracyTable::default();
        table.push_case("good", &[ClusterMethod::Ncut], &Ok(vec![outcome.clone()]));
        table.push_case("bad", &[ClusterMethod::Ncut], &Err(CoreError::ZeroForest));
        let path = dir.path().join("t.csv");
        emit_table(&table, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("case,method,mean,sd,datasets,status"));
        assert_eq!(lines.next(), Some("good,ncut,1,0,1,ok"));
        assert!(lines.next().unwrap().starts_with("bad,ncut,,,0,failed: "));

        let path = dir.path().join("d.csv");
        emit_details([("good", std::slice::from_ref(&outcome))], &path).unwrap();
        assert_eq!(
            std::fs::read_to_string(&path).unwrap(),
            "case,dataset,seed,objective,method,accuracy\ngood,0,7,1.5,ncut,1\n"
        );
    }
}
