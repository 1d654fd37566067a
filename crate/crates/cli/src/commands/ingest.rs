//! Data validation pass: runs the ingestion pipeline and reports what
//! survived, without ranking anything.

use super::ingest_pipeline;
use crate::config::RunConfig;
use crate::error::CliResult;
use crate::report::IngestCounts;

pub fn execute(config: &RunConfig) -> CliResult<IngestCounts> {
    let data = ingest_pipeline(config, config.subset)?;
    Ok(data.counts)
}

pub fn summarize(counts: &IngestCounts) -> String {
    format!(
        "organizations: {} total, {} skipped, {} kept by filter, {} without categories\n\
         eligible companies: {}\n\
         funding rows: {} total, {} skipped, {} dropped (unknown company)\n\
         graph: {} companies, {} technologies, {} edges, {} investors",
        counts.organizations_total,
        counts.organizations_skipped,
        counts.organizations_kept_after_filter,
        counts.organizations_without_categories,
        counts.eligible_companies,
        counts.funding_rows_total,
        counts.funding_rows_skipped,
        counts.dropped_rounds,
        counts.n_companies,
        counts.n_technologies,
        counts.n_edges,
        counts.n_investors,
    )
}
