//! Scaling harness: per subset size, time the calibration and walker phases
//! and record iteration counts.

use std::path::PathBuf;
use std::time::Instant;

use techrank_core::calibration::calibrate;
use techrank_core::factors::{compose_ground_truth, investment_factor_companies};
use techrank_core::graph::Layer;
use techrank_core::walker::{self, WalkerParams};

use super::ingest_pipeline;
use crate::config::RunConfig;
use crate::error::{CliError, CliResult};

#[derive(Debug, Clone)]
pub struct BenchRow {
    pub n_companies: usize,
    pub n_technologies: usize,
    pub calib_seconds: f64,
    pub walk_seconds: f64,
    pub iterations_c: Option<usize>,
    pub iterations_t: Option<usize>,
}

/// Runs one calibration (companies layer, previous-investment ground truth)
/// and one walker per size. Subsets nest under the shared seed, so the
/// induced technology counts grow with the company counts.
pub fn execute(config: &RunConfig, sizes: &[usize]) -> CliResult<Vec<BenchRow>> {
    if sizes.is_empty() {
        return Err(CliError::Config("--sizes needs at least one entry".into()));
    }
    let mut rows = Vec::with_capacity(sizes.len());
    for &size in sizes {
        if size == 0 {
            return Err(CliError::Config("sizes must be at least 1".into()));
        }
        let data = ingest_pipeline(config, Some(size))?;
        let factor = investment_factor_companies(&data.investments)?;
        let profile = techrank_core::PreferenceProfile::new(
            vec![(factor.name.clone(), 1.0)],
            Layer::Companies,
        )
        .map_err(|e| CliError::Data(e.to_string()))?;
        let truth = compose_ground_truth(&profile, &[factor])?;

        let calib_start = Instant::now();
        let calibrated = calibrate(
            &data.bipartite,
            &truth,
            Layer::Companies,
            &config.grid,
            &config.walker,
        )?;
        let calib_seconds = calib_start.elapsed().as_secs_f64();

        let walk_start = Instant::now();
        let state = walker::run(
            &data.bipartite,
            &WalkerParams {
                alpha: calibrated.alpha_star,
                beta: calibrated.beta_star,
                record_trajectory: false,
                ..config.walker.clone()
            },
        )?;
        let walk_seconds = walk_start.elapsed().as_secs_f64();

        rows.push(BenchRow {
            n_companies: data.bipartite.n_companies(),
            n_technologies: data.bipartite.n_technologies(),
            calib_seconds,
            walk_seconds,
            iterations_c: state.iterations_companies,
            iterations_t: state.iterations_technologies,
        });
    }
    Ok(rows)
}

pub fn write_csv(path: &PathBuf, rows: &[BenchRow]) -> CliResult<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record([
        "n_companies",
        "n_technologies",
        "calib_seconds",
        "walk_seconds",
        "iterations_c",
        "iterations_t",
    ])?;
    let fmt_iters = |it: Option<usize>| it.map(|n| n.to_string()).unwrap_or_default();
    for row in rows {
        w.write_record([
            row.n_companies.to_string(),
            row.n_technologies.to_string(),
            row.calib_seconds.to_string(),
            row.walk_seconds.to_string(),
            fmt_iters(row.iterations_c),
            fmt_iters(row.iterations_t),
        ])?;
    }
    w.flush()?;
    Ok(())
}
