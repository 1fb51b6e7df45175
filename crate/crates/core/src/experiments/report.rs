use std::collections::BTreeMap;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{DagMode, ModelKind, RunRecord};
use crate::{Error, Result};

pub const RUNS_HEADER: &str =
    "model,strategy,train_size,seed,dag_variant,dag_mode,total_mae,sample_mae,fallback_count,runtime_s";

/// One `summary.csv` row: a model x size x DAG-mode group over seeds (and
/// variants). The interval is mean +- 1.96 sd / sqrt(n), with the sample
/// standard deviation (zero for n = 1).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub model: ModelKind,
    pub strategy: String,
    pub train_size: usize,
    pub dag_mode: DagMode,
    pub n: usize,
    pub total_mae_mean: f64,
    pub total_mae_sd: f64,
    pub total_mae_ci_low: f64,
    pub total_mae_ci_high: f64,
    pub sample_mae_mean: f64,
    pub sample_mae_sd: f64,
    pub sample_mae_ci_low: f64,
    pub sample_mae_ci_high: f64,
}

fn mean_sd(xs: &[f64]) -> (f64, f64) {
    if xs.iter().all(|&x| x == xs[0]) {
        return (xs[0], 0.0);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

pub fn summarize(records: &[RunRecord]) -> Vec<SummaryRow> {
    let mut groups: BTreeMap<(ModelKind, usize, DagMode), Vec<&RunRecord>> = BTreeMap::new();
    for r in records {
        groups.entry((r.model, r.train_size, r.dag_mode)).or_default().push(r);
    }
    groups
        .into_iter()
        .map(|((model, train_size, dag_mode), rs)| {
            let total: Vec<f64> = rs.iter().map(|r| r.total_mae).collect();
            let sample: Vec<f64> = rs.iter().map(|r| r.sample_mae).collect();
            let n = rs.len();
            let half = |sd: f64| 1.96 * sd / (n as f64).sqrt();
            let (tm, tsd) = mean_sd(&total);
            let (sm, ssd) = mean_sd(&sample);
            SummaryRow {
                model,
                strategy: model.strategy_label().to_string(),
                train_size,
                dag_mode,
                n,
                total_mae_mean: tm,
                total_mae_sd: tsd,
                total_mae_ci_low: tm - half(tsd),
                total_mae_ci_high: tm + half(tsd),
                sample_mae_mean: sm,
                sample_mae_sd: ssd,
                sample_mae_ci_low: sm - half(ssd),
                sample_mae_ci_high: sm + half(ssd),
            }
        })
        .collect()
}

fn write_rows<W: Write, T: Serialize>(out: W, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}

pub fn write_runs_csv<W: Write>(out: W, records: &[RunRecord]) -> Result<()> {
    write_rows(out, records)
}

pub fn read_runs_csv<R: Read>(input: R) -> Result<Vec<RunRecord>> {
    let mut r = csv::Reader::from_reader(input);
    let header: Vec<&str> = r.headers()?.iter().collect();
    if header.join(",") != RUNS_HEADER {
        return Err(Error::Parse {
            line: 1,
            reason: format!("expected header `{RUNS_HEADER}`"),
        });
    }
    Ok(r.deserialize().collect::<std::result::Result<Vec<RunRecord>, _>>()?)
}

/// Write `runs.csv` and `summary.csv` into `dir` (created if missing) and
/// return their paths.
pub fn emit_reports(records: &[RunRecord], dir: impl AsRef<Path>) -> Result<(PathBuf, PathBuf)> {
    if records.is_empty() {
        return Err(Error::invalid("no run records to report"));
    }
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let runs = dir.join("runs.csv");
    let summary = dir.join("summary.csv");
    let create = |p: &Path| fs::File::create(p).map_err(|e| Error::io(p, e));
    write_runs_csv(create(&runs)?, records)?;
    write_rows(create(&summary)?, &summarize(records))?;
    Ok((runs, summary))
}
