//! Ranking reports and the emitted file formats.
//!
//! Every CSV this module writes can be read back by the matching reader in
//! this module; rerunning with the same inputs reproduces the files byte for
//! byte.

use std::path::Path;

use serde::Serialize;
use techrank_core::calibration::CalibrationResult;
use techrank_core::graph::Layer;
use techrank_core::walker::Trajectory;

use crate::error::{CliError, CliResult};

/// One ranked entity: final normalized weight, competition rank (1 = best),
/// initial degree, and the rank change relative to ranking by degree alone
/// (positive = climbed).
#[derive(Debug, Clone, PartialEq)]
pub struct EntityRow {
    pub name: String,
    pub weight: f64,
    pub rank: usize,
    pub degree: usize,
    pub rank_delta: i64,
}

/// Competition ("1224") ranks for descending weights: equal weights share the
/// smallest rank and the following rank is skipped accordingly.
pub fn competition_ranks(weights: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| weights[b].partial_cmp(&weights[a]).expect("finite weights"));
    let mut ranks = vec![0usize; weights.len()];
    let mut current = 0usize;
    for (pos, &idx) in order.iter().enumerate() {
        if pos == 0 || weights[idx] != weights[order[pos - 1]] {
            current = pos + 1;
        }
        ranks[idx] = current;
    }
    ranks
}

/// Builds the report rows, ordered by rank then name.
pub fn build_rows(names: &[String], weights: &[f64], degrees: &[usize]) -> Vec<EntityRow> {
    let ranks = competition_ranks(weights);
    let degree_weights: Vec<f64> = degrees.iter().map(|&d| d as f64).collect();
    let degree_ranks = competition_ranks(&degree_weights);
    let mut rows: Vec<EntityRow> = names
        .iter()
        .enumerate()
        .map(|(i, name)| EntityRow {
            name: name.clone(),
            weight: weights[i],
            rank: ranks[i],
            degree: degrees[i],
            rank_delta: degree_ranks[i] as i64 - ranks[i] as i64,
        })
        .collect();
    rows.sort_by(|a, b| a.rank.cmp(&b.rank).then_with(|| a.name.cmp(&b.name)));
    rows
}

pub fn write_ranking_csv(path: &Path, rows: &[EntityRow]) -> CliResult<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["name", "weight", "rank", "degree", "rank_delta"])?;
    for row in rows {
        w.write_record([
            row.name.as_str(),
            &row.weight.to_string(),
            &row.rank.to_string(),
            &row.degree.to_string(),
            &row.rank_delta.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_ranking_csv(path: &Path) -> CliResult<Vec<EntityRow>> {
    let mut rdr = csv::Reader::from_path(path)?;
    let headers = rdr.headers()?.clone();
    let idx = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| CliError::Data(format!("{}: missing column '{name}'", path.display())))
    };
    let (name_i, weight_i, rank_i, degree_i, delta_i) = (
        idx("name")?,
        idx("weight")?,
        idx("rank")?,
        idx("degree")?,
        idx("rank_delta")?,
    );
    let mut rows = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let field = |i: usize| record.get(i).unwrap_or("").to_string();
        let parse_err =
            |what: &str| CliError::Data(format!("{}: malformed {what}", path.display()));
        rows.push(EntityRow {
            name: field(name_i),
            weight: field(weight_i).parse().map_err(|_| parse_err("weight"))?,
            rank: field(rank_i).parse().map_err(|_| parse_err("rank"))?,
            degree: field(degree_i).parse().map_err(|_| parse_err("degree"))?,
            rank_delta: field(delta_i)
                .parse()
                .map_err(|_| parse_err("rank_delta"))?,
        });
    }
    Ok(rows)
}

/// One parsed surface row: (target, alpha, beta, rho or missing).
pub type SurfaceRow = (String, f64, f64, Option<f64>);

/// Writes both calibration surfaces as `target,alpha,beta,rho` rows; grid
/// points without a defined correlation leave rho empty.
pub fn write_surface_csv(path: &Path, surfaces: &[(Layer, &CalibrationResult)]) -> CliResult<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["target", "alpha", "beta", "rho"])?;
    for (layer, result) in surfaces {
        for (ai, &alpha) in result.alphas.iter().enumerate() {
            for (bi, &beta) in result.betas.iter().enumerate() {
                let rho = match result.surface[ai][bi] {
                    Some(r) => r.to_string(),
                    None => String::new(),
                };
                w.write_record([
                    &layer.to_string(),
                    &alpha.to_string(),
                    &beta.to_string(),
                    &rho,
                ])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_surface_csv(path: &Path) -> CliResult<Vec<SurfaceRow>> {
    let mut rdr = csv::Reader::from_path(path)?;
    let mut rows = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let parse = |i: usize, what: &str| -> CliResult<f64> {
            record
                .get(i)
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| CliError::Data(format!("{}: malformed {what}", path.display())))
        };
        let rho = match record.get(3) {
            Some("") | None => None,
            Some(s) => Some(
                s.parse()
                    .map_err(|_| CliError::Data(format!("{}: malformed rho", path.display())))?,
            ),
        };
        rows.push((
            record.get(0).unwrap_or("").to_string(),
            parse(1, "alpha")?,
            parse(2, "beta")?,
            rho,
        ));
    }
    Ok(rows)
}

/// Writes per-iteration normalized scores as `target,iteration,entity,weight`
/// rows, one block per layer.
pub fn write_trajectory_csv(
    path: &Path,
    blocks: &[(Layer, &Trajectory, &[String])],
) -> CliResult<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["target", "iteration", "entity", "weight"])?;
    for (layer, trajectory, names) in blocks {
        let series = match layer {
            Layer::Companies => &trajectory.companies,
            Layer::Technologies => &trajectory.technologies,
        };
        for (iteration, weights) in series.iter().enumerate() {
            for (entity, weight) in names.iter().zip(weights) {
                w.write_record([
                    &layer.to_string(),
                    &iteration.to_string(),
                    entity,
                    &weight.to_string(),
                ])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_trajectory_csv(path: &Path) -> CliResult<Vec<(String, usize, String, f64)>> {
    let mut rdr = csv::Reader::from_path(path)?;
    let mut rows = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let malformed = || CliError::Data(format!("{}: malformed trajectory row", path.display()));
        rows.push((
            record.get(0).ok_or_else(malformed)?.to_string(),
            record
                .get(1)
                .and_then(|s| s.parse().ok())
                .ok_or_else(malformed)?,
            record.get(2).ok_or_else(malformed)?.to_string(),
            record
                .get(3)
                .and_then(|s| s.parse().ok())
                .ok_or_else(malformed)?,
        ));
    }
    Ok(rows)
}

/// Per-layer outcome recorded in run.json.
#[derive(Debug, Clone, Serialize)]
pub struct TargetReport {
    pub alpha_star: f64,
    pub beta_star: f64,
    pub rho_star: f64,
    pub iterations_companies: Option<usize>,
    pub iterations_technologies: Option<usize>,
    pub total_iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct IngestCounts {
    pub organizations_total: usize,
    pub organizations_skipped: usize,
    pub organizations_kept_after_filter: usize,
    pub organizations_without_categories: usize,
    pub eligible_companies: usize,
    pub funding_rows_total: usize,
    pub funding_rows_skipped: usize,
    pub dropped_rounds: usize,
    pub n_companies: usize,
    pub n_technologies: usize,
    pub n_investors: usize,
    pub n_edges: usize,
}

/// Wall-clock seconds per pipeline phase. These vary run to run, so run.json
/// is not expected to be byte-identical across reruns; the CSVs are.
#[derive(Debug, Clone, Serialize)]
pub struct PhaseTimings {
    pub ingest_seconds: f64,
    pub factors_seconds: f64,
    pub calibration_companies_seconds: f64,
    pub calibration_technologies_seconds: f64,
    pub walk_companies_seconds: f64,
    pub walk_technologies_seconds: f64,
    pub total_seconds: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunMetadata {
    pub seed: u64,
    pub subset: Option<usize>,
    pub counts: IngestCounts,
    pub companies_missing_location: Vec<String>,
    pub companies: TargetReport,
    pub technologies: TargetReport,
    pub timings: PhaseTimings,
}

pub fn write_run_json(path: &Path, metadata: &RunMetadata) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(metadata)
        .map_err(|e| CliError::Data(format!("cannot serialize run metadata: {e}")))?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn competition_ranks_share_the_min_rank() {
        let ranks = competition_ranks(&[0.9, 0.5, 0.9, 0.1]);
        assert_eq!(ranks, vec![1, 3, 1, 4]);
    }

    #[test]
    fn higher_weight_never_ranks_worse() {
        let weights = [0.3, 0.8, 0.8, 0.1, 0.5];
        let ranks = competition_ranks(&weights);
        for i in 0..weights.len() {
            for j in 0..weights.len() {
                if weights[i] > weights[j] {
                    assert!(ranks[i] < ranks[j]);
                }
            }
        }
    }

    #[test]
    fn rows_are_ordered_and_deltas_signed() {
        let names = vec!["a".to_string(), "b".to_string(), "c".to_string()];
        let rows = build_rows(&names, &[0.1, 1.0, 0.4], &[3, 1, 2]);
        assert_eq!(rows[0].name, "b");
        assert_eq!(rows[0].rank, 1);
        // b had degree rank 3 and final rank 1: climbed by 2.
        assert_eq!(rows[0].rank_delta, 2);
        assert_eq!(rows[2].name, "a");
        assert_eq!(rows[2].rank_delta, -2);
    }
}
