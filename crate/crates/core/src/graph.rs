//! Immutable graph data model: entity registries, the company-technology
//! bipartite graph, and the investor-company investment graph.
//!
//! Graphs are immutable after construction and safe to share across threads.
//! Adjacency is stored sparsely with sorted per-row neighbor lists so both
//! row and column iteration stay cheap.

use std::collections::HashMap;

use crate::error::{Error, Result};

/// The two node classes of the bipartite graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Layer {
    Companies,
    Technologies,
}

impl std::fmt::Display for Layer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Layer::Companies => f.write_str("companies"),
            Layer::Technologies => f.write_str("technologies"),
        }
    }
}

/// Ordered set of unique entity identifiers with dense integer ids.
///
/// Identity is the case-normalized (lowercased, trimmed) name string, since
/// raw data repeats labels with inconsistent casing. Ids are contiguous from
/// zero in first-seen order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EntityRegistry {
    names: Vec<String>,
    index: HashMap<String, usize>,
}

impl EntityRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Canonical form used for entity identity.
    pub fn normalize(raw: &str) -> String {
        raw.trim().to_lowercase()
    }

    /// Returns the id for `raw`, inserting it if unseen.
    pub fn get_or_insert(&mut self, raw: &str) -> usize {
        let key = Self::normalize(raw);
        if let Some(&id) = self.index.get(&key) {
            return id;
        }
        let id = self.names.len();
        self.names.push(key.clone());
        self.index.insert(key, id);
        id
    }

    pub fn index_of(&self, raw: &str) -> Option<usize> {
        self.index.get(&Self::normalize(raw)).copied()
    }

    pub fn name(&self, id: usize) -> &str {
        &self.names[id]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }
}

impl FromIterator<String> for EntityRegistry {
    fn from_iter<I: IntoIterator<Item = String>>(iter: I) -> Self {
        let mut reg = Self::new();
        for name in iter {
            reg.get_or_insert(&name);
        }
        reg
    }
}

/// Sparse binary company-technology adjacency with entity registries.
///
/// Every company and every technology in the graph has degree at least one;
/// isolated nodes are rejected at construction because the walker raises
/// degrees to negative powers.
#[derive(Debug, Clone)]
pub struct BipartiteGraph {
    companies: EntityRegistry,
    technologies: EntityRegistry,
    /// company id -> sorted technology ids
    rows: Vec<Vec<usize>>,
    /// technology id -> sorted company ids
    cols: Vec<Vec<usize>>,
    edge_count: usize,
}

impl BipartiteGraph {
    /// Builds the graph from (company, technology) link pairs.
    ///
    /// Duplicate pairs collapse to a single binary edge. Registries are built
    /// in first-seen order. Errors on an empty pair list.
    pub fn from_pairs<S1, S2, I>(pairs: I) -> Result<Self>
    where
        S1: AsRef<str>,
        S2: AsRef<str>,
        I: IntoIterator<Item = (S1, S2)>,
    {
        let mut companies = EntityRegistry::new();
        let mut technologies = EntityRegistry::new();
        let mut rows: Vec<Vec<usize>> = Vec::new();
        for (company, technology) in pairs {
            let c = companies.get_or_insert(company.as_ref());
            let t = technologies.get_or_insert(technology.as_ref());
            if c == rows.len() {
                rows.push(Vec::new());
            }
            rows[c].push(t);
        }
        if companies.is_empty() {
            return Err(Error::EmptyPairList);
        }
        Self::from_parts(companies, technologies, rows)
    }

    /// Builds the graph from explicit per-company neighbor lists.
    ///
    /// `rows[c]` lists the technology ids linked to company `c`; duplicates
    /// collapse. Every company needs at least one link and every listed
    /// technology id must be in range; technologies with no incident edge are
    /// rejected.
    pub fn from_rows<S1, S2>(
        company_names: &[S1],
        technology_names: &[S2],
        rows: Vec<Vec<usize>>,
    ) -> Result<Self>
    where
        S1: AsRef<str>,
        S2: AsRef<str>,
    {
        let companies: EntityRegistry = company_names
            .iter()
            .map(|s| s.as_ref().to_string())
            .collect();
        let technologies: EntityRegistry = technology_names
            .iter()
            .map(|s| s.as_ref().to_string())
            .collect();
        if companies.len() != company_names.len() {
            return Err(Error::RegistryMismatch("duplicate company names".into()));
        }
        if technologies.len() != technology_names.len() {
            return Err(Error::RegistryMismatch("duplicate technology names".into()));
        }
        if rows.len() != companies.len() {
            return Err(Error::DimensionMismatch {
                what: "adjacency rows",
                expected: companies.len(),
                actual: rows.len(),
            });
        }
        Self::from_parts(companies, technologies, rows)
    }

    fn from_parts(
        companies: EntityRegistry,
        technologies: EntityRegistry,
        raw_rows: Vec<Vec<usize>>,
    ) -> Result<Self> {
        let n_t = technologies.len();
        let mut rows: Vec<Vec<usize>> = vec![Vec::new(); companies.len()];
        let mut cols: Vec<Vec<usize>> = vec![Vec::new(); n_t];
        let mut edge_count = 0usize;
        for (c, mut ts) in raw_rows.into_iter().enumerate() {
            ts.sort_unstable();
            ts.dedup();
            for &t in &ts {
                if t >= n_t {
                    return Err(Error::DimensionMismatch {
                        what: "technology id",
                        expected: n_t,
                        actual: t,
                    });
                }
                cols[t].push(c);
            }
            edge_count += ts.len();
            rows[c] = ts;
        }
        for (c, ts) in rows.iter().enumerate() {
            if ts.is_empty() {
                return Err(Error::IsolatedEntity {
                    kind: "company",
                    name: companies.name(c).to_string(),
                });
            }
        }
        for (t, cs) in cols.iter().enumerate() {
            if cs.is_empty() {
                return Err(Error::IsolatedEntity {
                    kind: "technology",
                    name: technologies.name(t).to_string(),
                });
            }
        }
        Ok(Self {
            companies,
            technologies,
            rows,
            cols,
            edge_count,
        })
    }

    /// Row and column degree vectors `(k_c, k_t)`. All entries are >= 1.
    pub fn degrees(&self) -> (Vec<usize>, Vec<usize>) {
        (
            self.rows.iter().map(Vec::len).collect(),
            self.cols.iter().map(Vec::len).collect(),
        )
    }

    pub fn n_companies(&self) -> usize {
        self.rows.len()
    }

    pub fn n_technologies(&self) -> usize {
        self.cols.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn companies(&self) -> &EntityRegistry {
        &self.companies
    }

    pub fn technologies(&self) -> &EntityRegistry {
        &self.technologies
    }

    /// Sorted technology ids linked to company `c`.
    pub fn technologies_of(&self, c: usize) -> &[usize] {
        &self.rows[c]
    }

    /// Sorted company ids linked to technology `t`.
    pub fn companies_of(&self, t: usize) -> &[usize] {
        &self.cols[t]
    }

    pub fn has_edge(&self, c: usize, t: usize) -> bool {
        self.rows[c].binary_search(&t).is_ok()
    }

    /// Exports the edge list as name pairs; rebuilding from it reproduces the
    /// adjacency exactly.
    pub fn pairs(&self) -> Vec<(String, String)> {
        let mut out = Vec::with_capacity(self.edge_count);
        for (c, ts) in self.rows.iter().enumerate() {
            for &t in ts {
                out.push((
                    self.companies.name(c).to_string(),
                    self.technologies.name(t).to_string(),
                ));
            }
        }
        out
    }
}

/// Sparse investor-company graph with per-edge funding totals.
///
/// Edge amounts are the sum over time of individual round amounts, all
/// non-negative. The company registry is shared with the bipartite graph it
/// accompanies so factor vectors stay aligned.
#[derive(Debug, Clone)]
pub struct InvestmentGraph {
    investors: EntityRegistry,
    companies: EntityRegistry,
    /// investor id -> sorted (company id, total amount)
    rows: Vec<Vec<(usize, f64)>>,
}

impl InvestmentGraph {
    /// Builds the graph over a fixed company registry.
    ///
    /// Entries are (investor, company, amount) with the company resolved
    /// against `companies`; unknown companies and invalid amounts are
    /// rejected. Repeated (investor, company) entries sum.
    pub fn from_entries<S1, S2, I>(companies: EntityRegistry, entries: I) -> Result<Self>
    where
        S1: AsRef<str>,
        S2: AsRef<str>,
        I: IntoIterator<Item = (S1, S2, f64)>,
    {
        let mut investors = EntityRegistry::new();
        let mut maps: Vec<HashMap<usize, f64>> = Vec::new();
        for (investor, company, amount) in entries {
            let c = companies
                .index_of(company.as_ref())
                .ok_or_else(|| Error::UnknownCompany(company.as_ref().to_string()))?;
            if !amount.is_finite() || amount < 0.0 {
                return Err(Error::InvalidAmount {
                    investor: investor.as_ref().to_string(),
                    company: company.as_ref().to_string(),
                    amount,
                });
            }
            let i = investors.get_or_insert(investor.as_ref());
            if i == maps.len() {
                maps.push(HashMap::new());
            }
            *maps[i].entry(c).or_insert(0.0) += amount;
        }
        let rows = maps
            .into_iter()
            .map(|m| {
                let mut row: Vec<(usize, f64)> = m.into_iter().collect();
                row.sort_unstable_by_key(|&(c, _)| c);
                row
            })
            .collect();
        Ok(Self {
            investors,
            companies,
            rows,
        })
    }

    /// Convenience constructor deriving the company registry from the entries
    /// themselves, in first-seen order.
    pub fn from_rounds<S1, S2>(entries: &[(S1, S2, f64)]) -> Result<Self>
    where
        S1: AsRef<str>,
        S2: AsRef<str>,
    {
        let mut companies = EntityRegistry::new();
        for (_, company, _) in entries {
            companies.get_or_insert(company.as_ref());
        }
        Self::from_entries(
            companies,
            entries.iter().map(|(i, c, a)| (i.as_ref(), c.as_ref(), *a)),
        )
    }

    /// Total invested amount per company (`e^C`), aligned with the company
    /// registry; companies without any round get zero.
    pub fn company_totals(&self) -> Vec<f64> {
        let mut totals = vec![0.0; self.companies.len()];
        for row in &self.rows {
            for &(c, amount) in row {
                totals[c] += amount;
            }
        }
        totals
    }

    pub fn amount(&self, investor: usize, company: usize) -> f64 {
        self.rows[investor]
            .binary_search_by_key(&company, |&(c, _)| c)
            .map(|pos| self.rows[investor][pos].1)
            .unwrap_or(0.0)
    }

    pub fn n_investors(&self) -> usize {
        self.investors.len()
    }

    pub fn n_companies(&self) -> usize {
        self.companies.len()
    }

    pub fn investors(&self) -> &EntityRegistry {
        &self.investors
    }

    pub fn companies(&self) -> &EntityRegistry {
        &self.companies
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(i, row)| row.iter().map(move |&(c, a)| (i, c, a)))
    }
}
