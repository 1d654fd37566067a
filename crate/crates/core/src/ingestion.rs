//! CSV ingestion of organization and funding-round exports, keyword-based
//! sector filtering, and construction of the in-memory graphs.
//!
//! Expected files carry a header row. Organizations need `id` and `name`
//! columns; `description`, `category_list`, `latitude`, `longitude`, and
//! `country` are optional. Funding rounds need `round_id`, `investor_id`,
//! and `company_id`; `amount` and `announced_on` are optional. Rows that fail
//! validation are skipped and counted, never silently dropped.

use std::collections::HashMap;
use std::path::Path;

use chrono::NaiveDate;

use crate::error::{Error, Result};
use crate::factors::GeoPoint;
use crate::graph::{BipartiteGraph, EntityRegistry, InvestmentGraph};

#[derive(Debug, Clone, PartialEq)]
pub struct OrganizationRecord {
    pub id: String,
    pub name: String,
    pub description: String,
    pub categories: Vec<String>,
    pub latitude: Option<f64>,
    pub longitude: Option<f64>,
    pub country: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FundingRoundRecord {
    pub round_id: String,
    pub investor_id: String,
    pub company_id: String,
    pub amount: f64,
    pub announced_on: Option<NaiveDate>,
}

/// CSV parsing knobs: the field delimiter and the delimiter splitting the
/// `category_list` cell.
#[derive(Debug, Clone, Copy)]
pub struct CsvOptions {
    pub delimiter: u8,
    pub category_delimiter: char,
}

impl Default for CsvOptions {
    fn default() -> Self {
        Self {
            delimiter: b',',
            category_delimiter: ',',
        }
    }
}

/// Parsed records plus the number of rows skipped by validation, so callers
/// can reconcile input rows against kept + skipped.
#[derive(Debug, Clone)]
pub struct LoadOutcome<T> {
    pub records: Vec<T>,
    pub skipped: usize,
}

struct HeaderIndex {
    by_name: HashMap<String, usize>,
}

impl HeaderIndex {
    fn new(path: &Path, headers: &csv::StringRecord, required: &[&str]) -> Result<Self> {
        let by_name: HashMap<String, usize> = headers
            .iter()
            .enumerate()
            .map(|(i, h)| (h.trim().to_lowercase(), i))
            .collect();
        for col in required {
            if !by_name.contains_key(*col) {
                return Err(Error::MalformedHeader {
                    path: path.display().to_string(),
                    reason: format!("missing required column '{col}'"),
                });
            }
        }
        Ok(Self { by_name })
    }

    fn get<'r>(&self, record: &'r csv::StringRecord, name: &str) -> Option<&'r str> {
        self.by_name
            .get(name)
            .and_then(|&i| record.get(i))
            .map(str::trim)
            .filter(|s| !s.is_empty())
    }
}

fn reader(path: &Path, opts: &CsvOptions) -> Result<csv::Reader<std::fs::File>> {
    Ok(csv::ReaderBuilder::new()
        .delimiter(opts.delimiter)
        .flexible(true)
        .from_path(path)?)
}

/// Strict locale-independent amount parsing: plain decimals only, so values
/// with thousands separators are rejected.
fn parse_amount(field: Option<&str>) -> Option<f64> {
    match field {
        None => Some(0.0),
        Some(s) => s.parse::<f64>().ok().filter(|v| v.is_finite() && *v >= 0.0),
    }
}

fn parse_coordinate(field: Option<&str>) -> Option<f64> {
    field
        .and_then(|s| s.parse::<f64>().ok())
        .filter(|v| v.is_finite())
}

pub fn load_organizations(
    path: &Path,
    opts: &CsvOptions,
) -> Result<LoadOutcome<OrganizationRecord>> {
    let mut rdr = reader(path, opts)?;
    let header = HeaderIndex::new(path, rdr.headers()?, &["id", "name"])?;
    let mut records = Vec::new();
    let mut skipped = 0;
    for row in rdr.records() {
        let row = row?;
        let (Some(id), Some(name)) = (header.get(&row, "id"), header.get(&row, "name")) else {
            skipped += 1;
            continue;
        };
        let categories = header
            .get(&row, "category_list")
            .map(|cell| {
                cell.split(opts.category_delimiter)
                    .map(str::trim)
                    .filter(|c| !c.is_empty())
                    .map(str::to_string)
                    .collect()
            })
            .unwrap_or_default();
        records.push(OrganizationRecord {
            id: id.to_string(),
            name: name.to_string(),
            description: header.get(&row, "description").unwrap_or("").to_string(),
            categories,
            latitude: parse_coordinate(header.get(&row, "latitude")),
            longitude: parse_coordinate(header.get(&row, "longitude")),
            country: header.get(&row, "country").map(str::to_string),
        });
    }
    Ok(LoadOutcome { records, skipped })
}

pub fn load_funding_rounds(
    path: &Path,
    opts: &CsvOptions,
) -> Result<LoadOutcome<FundingRoundRecord>> {
    let mut rdr = reader(path, opts)?;
    let header = HeaderIndex::new(
        path,
        rdr.headers()?,
        &["round_id", "investor_id", "company_id"],
    )?;
    let mut records = Vec::new();
    let mut skipped = 0;
    for row in rdr.records() {
        let row = row?;
        let (Some(round_id), Some(investor_id), Some(company_id)) = (
            header.get(&row, "round_id"),
            header.get(&row, "investor_id"),
            header.get(&row, "company_id"),
        ) else {
            skipped += 1;
            continue;
        };
        // Missing amounts are undisclosed rounds and count as zero; malformed
        // amounts invalidate the row.
        let Some(amount) = parse_amount(header.get(&row, "amount")) else {
            skipped += 1;
            continue;
        };
        let announced_on = header
            .get(&row, "announced_on")
            .and_then(|s| NaiveDate::parse_from_str(s, "%Y-%m-%d").ok());
        records.push(FundingRoundRecord {
            round_id: round_id.to_string(),
            investor_id: investor_id.to_string(),
            company_id: company_id.to_string(),
            amount,
            announced_on,
        });
    }
    Ok(LoadOutcome { records, skipped })
}

/// Reads a coordinate lookup file with columns (entity_id, latitude,
/// longitude). Rows with unparsable or out-of-range coordinates are skipped.
pub fn load_locations(path: &Path, opts: &CsvOptions) -> Result<LoadOutcome<(String, GeoPoint)>> {
    let mut rdr = reader(path, opts)?;
    let header = HeaderIndex::new(
        path,
        rdr.headers()?,
        &["entity_id", "latitude", "longitude"],
    )?;
    let mut records = Vec::new();
    let mut skipped = 0;
    for row in rdr.records() {
        let row = row?;
        let entry = header.get(&row, "entity_id").and_then(|id| {
            let lat = parse_coordinate(header.get(&row, "latitude"))?;
            let lon = parse_coordinate(header.get(&row, "longitude"))?;
            GeoPoint::new(lat, lon).ok().map(|p| (id.to_string(), p))
        });
        match entry {
            Some(e) => records.push(e),
            None => skipped += 1,
        }
    }
    Ok(LoadOutcome { records, skipped })
}

/// Keyword filter keeping organizations whose description mentions at least
/// `min_matches` distinct terms, matched case-insensitively as whole words.
#[derive(Debug, Clone)]
pub struct SectorFilter {
    keywords: Vec<String>,
    min_matches: usize,
}

impl SectorFilter {
    pub fn new<S: AsRef<str>>(
        keywords: impl IntoIterator<Item = S>,
        min_matches: usize,
    ) -> Result<Self> {
        let mut normalized: Vec<String> = keywords
            .into_iter()
            .map(|k| k.as_ref().trim().to_lowercase())
            .filter(|k| !k.is_empty())
            .collect();
        normalized.sort();
        normalized.dedup();
        if normalized.is_empty() {
            return Err(Error::EmptyPipeline("sector keyword list is empty".into()));
        }
        if min_matches == 0 {
            return Err(Error::InvalidParams(
                "min_matches must be at least 1".into(),
            ));
        }
        Ok(Self {
            keywords: normalized,
            min_matches,
        })
    }

    /// Loads one keyword per line; blank lines and `#` comments are ignored.
    pub fn from_file(path: &Path, min_matches: usize) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::new(
            text.lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#')),
            min_matches,
        )
    }

    pub fn keywords(&self) -> &[String] {
        &self.keywords
    }

    pub fn min_matches(&self) -> usize {
        self.min_matches
    }

    /// Number of distinct keywords present in `description` as whole words.
    pub fn distinct_matches(&self, description: &str) -> usize {
        let text = description.to_lowercase();
        self.keywords
            .iter()
            .filter(|kw| contains_whole_word(&text, kw))
            .count()
    }

    pub fn keeps(&self, org: &OrganizationRecord) -> bool {
        self.distinct_matches(&org.description) >= self.min_matches
    }
}

/// Whole-word containment: the match may not touch alphanumeric characters on
/// either side. Multi-word keywords are matched literally.
fn contains_whole_word(text: &str, word: &str) -> bool {
    if word.is_empty() {
        return false;
    }
    let mut start = 0;
    while let Some(pos) = text[start..].find(word) {
        let at = start + pos;
        let end = at + word.len();
        let before_ok = text[..at]
            .chars()
            .next_back()
            .is_none_or(|c| !c.is_alphanumeric());
        let after_ok = text[end..]
            .chars()
            .next()
            .is_none_or(|c| !c.is_alphanumeric());
        if before_ok && after_ok {
            return true;
        }
        match text[at..].chars().next() {
            Some(c) => start = at + c.len_utf8(),
            None => break,
        }
    }
    false
}

pub fn filter_sector(
    orgs: Vec<OrganizationRecord>,
    filter: &SectorFilter,
) -> Vec<OrganizationRecord> {
    orgs.into_iter().filter(|o| filter.keeps(o)).collect()
}

/// Graphs built from filtered organizations and funding rounds, plus the
/// exclusion counters needed to reconcile the input.
#[derive(Debug, Clone)]
pub struct GraphBuildOutcome {
    pub bipartite: BipartiteGraph,
    pub investments: InvestmentGraph,
    /// Rounds referencing a company outside the surviving set.
    pub dropped_rounds: usize,
    /// Organizations excluded for having no technology links.
    pub orgs_without_categories: usize,
}

/// Builds the company-technology and investor-company graphs.
///
/// Companies are keyed by normalized name (duplicates collapse), organizations
/// with no categories are excluded, and per-edge investment amounts sum over
/// rounds. Funding rounds are matched to companies by organization id.
pub fn build_graphs(
    orgs: &[OrganizationRecord],
    rounds: &[FundingRoundRecord],
) -> Result<GraphBuildOutcome> {
    let mut companies = EntityRegistry::new();
    let mut technologies = EntityRegistry::new();
    let mut rows: Vec<Vec<usize>> = Vec::new();
    let mut company_by_org_id: HashMap<&str, usize> = HashMap::new();
    let mut orgs_without_categories = 0;

    for org in orgs {
        if org.categories.is_empty() {
            orgs_without_categories += 1;
            continue;
        }
        let c = companies.get_or_insert(&org.name);
        if c == rows.len() {
            rows.push(Vec::new());
        }
        for category in &org.categories {
            let t = technologies.get_or_insert(category);
            rows[c].push(t);
        }
        company_by_org_id.insert(org.id.as_str(), c);
    }
    if companies.is_empty() {
        return Err(Error::EmptyPipeline(
            "no organization with technology links survived".into(),
        ));
    }
    let bipartite = BipartiteGraph::from_rows(companies.names(), technologies.names(), rows)?;

    let mut dropped_rounds = 0;
    let mut entries: Vec<(&str, &str, f64)> = Vec::new();
    for round in rounds {
        match company_by_org_id.get(round.company_id.as_str()) {
            Some(&c) => entries.push((
                round.investor_id.as_str(),
                bipartite.companies().name(c),
                round.amount,
            )),
            None => dropped_rounds += 1,
        }
    }
    let investments = InvestmentGraph::from_entries(bipartite.companies().clone(), entries)?;

    Ok(GraphBuildOutcome {
        bipartite,
        investments,
        dropped_rounds,
        orgs_without_categories,
    })
}

pub const CYBERSECURITY_KEYWORDS: &[&str] = &[
    "cybersecurity",
    "confidentiality",
    "integrity",
    "availability",
    "secure",
    "security",
    "safe",
    "reliability",
    "dependability",
    "confidential",
    "defence",
    "defensive",
    "privacy",
];
