//! Rank comparison against an external ranking.

use std::path::Path;

use techrank_core::calibration::spearman;
use techrank_core::graph::EntityRegistry;

use crate::error::{CliError, CliResult};
use crate::report::read_ranking_csv;

pub struct CompareOutcome {
    pub rho: f64,
    pub overlap: usize,
}

/// Reads an external `id,rank` CSV (header required, extra columns ignored).
fn read_external(path: &Path) -> CliResult<Vec<(String, f64)>> {
    let mut rdr = csv::Reader::from_path(path)?;
    let headers = rdr.headers()?.clone();
    let id_i = headers
        .iter()
        .position(|h| h == "id")
        .ok_or_else(|| CliError::Data(format!("{}: missing column 'id'", path.display())))?;
    let rank_i = headers
        .iter()
        .position(|h| h == "rank")
        .ok_or_else(|| CliError::Data(format!("{}: missing column 'rank'", path.display())))?;
    let mut rows = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let id = record.get(id_i).unwrap_or("").trim();
        let rank: Option<f64> = record.get(rank_i).and_then(|s| s.trim().parse().ok());
        if let (false, Some(rank)) = (id.is_empty(), rank) {
            rows.push((EntityRegistry::normalize(id), rank));
        }
    }
    Ok(rows)
}

/// Restricts both rankings to their shared identifiers and returns the
/// Spearman correlation of the rank vectors.
pub fn execute(ours: &Path, external: &Path) -> CliResult<CompareOutcome> {
    let our_rows = read_ranking_csv(ours)?;
    let external_rows = read_external(external)?;
    let external_by_id: std::collections::HashMap<&str, f64> = external_rows
        .iter()
        .map(|(id, rank)| (id.as_str(), *rank))
        .collect();

    let mut our_ranks = Vec::new();
    let mut their_ranks = Vec::new();
    for row in &our_rows {
        let id = EntityRegistry::normalize(&row.name);
        if let Some(&their) = external_by_id.get(id.as_str()) {
            our_ranks.push(row.rank as f64);
            their_ranks.push(their);
        }
    }
    if our_ranks.len() < 2 {
        return Err(CliError::Data(format!(
            "need at least 2 overlapping identifiers, found {}",
            our_ranks.len()
        )));
    }
    let rho = spearman(&our_ranks, &their_ranks).map_err(|e| CliError::Data(e.to_string()))?;
    Ok(CompareOutcome {
        rho,
        overlap: our_ranks.len(),
    })
}
