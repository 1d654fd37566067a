//! Run configuration: a TOML file plus command-line overrides.
//!
//! Relative paths inside the file resolve against the file's own directory;
//! paths given on the command line resolve against the working directory.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use techrank_core::calibration::GridSpec;
use techrank_core::factors::{GeoPoint, LOCATION, PREVIOUS_INVESTMENTS};
use techrank_core::graph::Layer;
use techrank_core::ingestion::CsvOptions;
use techrank_core::walker::{WalkerParams, DEFAULT_MAX_ITERATIONS, DEFAULT_TOLERANCE};
use techrank_core::PreferenceProfile;

use crate::error::{CliError, CliResult};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    data: RawData,
    filter: RawFilter,
    profile: RawProfiles,
    investor: Option<RawInvestor>,
    #[serde(default)]
    grid: RawGrid,
    #[serde(default)]
    walker: RawWalker,
    #[serde(default)]
    run: RawRun,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawData {
    organizations: PathBuf,
    funding_rounds: PathBuf,
    locations: Option<PathBuf>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFilter {
    keywords: PathBuf,
    #[serde(default = "default_min_matches")]
    min_matches: usize,
    #[serde(default = "default_delimiter")]
    csv_delimiter: String,
    #[serde(default = "default_delimiter")]
    category_delimiter: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProfiles {
    companies: RawProfile,
    technologies: RawProfile,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProfile {
    features: Vec<RawFeature>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFeature {
    name: String,
    weight: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInvestor {
    latitude: f64,
    longitude: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    alpha_min: f64,
    alpha_max: f64,
    beta_min: f64,
    beta_max: f64,
    step: f64,
}

impl Default for RawGrid {
    fn default() -> Self {
        let g = GridSpec::default();
        Self {
            alpha_min: g.alpha_min,
            alpha_max: g.alpha_max,
            beta_min: g.beta_min,
            beta_max: g.beta_max,
            step: g.step,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawWalker {
    #[serde(default = "default_tolerance")]
    tolerance: f64,
    #[serde(default = "default_max_iterations")]
    max_iterations: usize,
}

impl Default for RawWalker {
    fn default() -> Self {
        Self {
            tolerance: DEFAULT_TOLERANCE,
            max_iterations: DEFAULT_MAX_ITERATIONS,
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRun {
    #[serde(default)]
    seed: u64,
    subset: Option<usize>,
    out: Option<PathBuf>,
    #[serde(default)]
    trajectory: bool,
    #[serde(default)]
    strict: bool,
}

fn default_min_matches() -> usize {
    2
}

fn default_delimiter() -> String {
    ",".to_string()
}

fn default_tolerance() -> f64 {
    DEFAULT_TOLERANCE
}

fn default_max_iterations() -> usize {
    DEFAULT_MAX_ITERATIONS
}

/// Command-line overrides applied on top of the file.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub subset: Option<usize>,
    pub trajectory: bool,
    pub out: Option<PathBuf>,
    /// "alpha_min,alpha_max,beta_min,beta_max,step"
    pub grid: Option<String>,
    pub tolerance: Option<f64>,
    pub max_iter: Option<usize>,
    pub strict: bool,
}

/// Fully validated configuration ready for the pipeline.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub organizations: PathBuf,
    pub funding_rounds: PathBuf,
    pub locations: Option<PathBuf>,
    pub keywords: PathBuf,
    pub min_matches: usize,
    pub csv_options: CsvOptions,
    pub company_profile: PreferenceProfile,
    pub technology_profile: PreferenceProfile,
    pub investor: Option<GeoPoint>,
    pub grid: GridSpec,
    pub walker: WalkerParams,
    pub seed: u64,
    pub subset: Option<usize>,
    pub out_dir: PathBuf,
    pub trajectory: bool,
    pub strict: bool,
}

fn parse_delimiter(raw: &str, what: &str) -> CliResult<u8> {
    let bytes = raw.as_bytes();
    if bytes.len() != 1 {
        return Err(CliError::Config(format!(
            "{what} must be a single ASCII character, got {raw:?}"
        )));
    }
    Ok(bytes[0])
}

fn parse_grid_flag(raw: &str) -> CliResult<RawGrid> {
    let parts: Vec<&str> = raw.split(',').map(str::trim).collect();
    if parts.len() != 5 {
        return Err(CliError::Config(format!(
            "--grid expects \"alpha_min,alpha_max,beta_min,beta_max,step\", got {raw:?}"
        )));
    }
    let mut values = [0.0f64; 5];
    for (slot, part) in values.iter_mut().zip(&parts) {
        *slot = part
            .parse()
            .map_err(|_| CliError::Config(format!("--grid component {part:?} is not a number")))?;
    }
    Ok(RawGrid {
        alpha_min: values[0],
        alpha_max: values[1],
        beta_min: values[2],
        beta_max: values[3],
        step: values[4],
    })
}

fn resolve(base: &Path, path: PathBuf) -> PathBuf {
    if path.is_absolute() {
        path
    } else {
        base.join(path)
    }
}

fn require_exists(path: &Path, what: &str) -> CliResult<()> {
    if !path.exists() {
        return Err(CliError::Config(format!(
            "{what} file not found: {}",
            path.display()
        )));
    }
    Ok(())
}

fn build_profile(raw: &RawProfile, target: Layer) -> CliResult<PreferenceProfile> {
    let allowed: &[&str] = match target {
        Layer::Companies => &[PREVIOUS_INVESTMENTS, LOCATION],
        Layer::Technologies => &[PREVIOUS_INVESTMENTS],
    };
    for feature in &raw.features {
        if !allowed.contains(&feature.name.as_str()) {
            return Err(CliError::Config(format!(
                "unsupported {target} feature '{}'; available: {}",
                feature.name,
                allowed.join(", ")
            )));
        }
    }
    PreferenceProfile::new(
        raw.features
            .iter()
            .map(|f| (f.name.clone(), f.weight))
            .collect(),
        target,
    )
    .map_err(|e| CliError::Config(e.to_string()))
}

impl RunConfig {
    pub fn load(path: &Path, overrides: &Overrides) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        let raw: RawConfig = toml::from_str(&text).map_err(|e| {
            CliError::Config(format!("cannot parse config {}: {e}", path.display()))
        })?;
        let base = path
            .parent()
            .unwrap_or_else(|| Path::new("."))
            .to_path_buf();

        let organizations = resolve(&base, raw.data.organizations);
        let funding_rounds = resolve(&base, raw.data.funding_rounds);
        let locations = raw.data.locations.map(|p| resolve(&base, p));
        let keywords = resolve(&base, raw.filter.keywords);
        require_exists(&organizations, "organizations")?;
        require_exists(&funding_rounds, "funding rounds")?;
        if let Some(loc) = &locations {
            require_exists(loc, "locations")?;
        }
        require_exists(&keywords, "keyword list")?;

        if raw.filter.min_matches == 0 {
            return Err(CliError::Config("min_matches must be at least 1".into()));
        }
        let csv_options = CsvOptions {
            delimiter: parse_delimiter(&raw.filter.csv_delimiter, "csv_delimiter")?,
            category_delimiter: {
                let b = parse_delimiter(&raw.filter.category_delimiter, "category_delimiter")?;
                b as char
            },
        };

        let company_profile = build_profile(&raw.profile.companies, Layer::Companies)?;
        let technology_profile = build_profile(&raw.profile.technologies, Layer::Technologies)?;

        let investor = raw
            .investor
            .map(|i| GeoPoint::new(i.latitude, i.longitude))
            .transpose()
            .map_err(|e| CliError::Config(e.to_string()))?;
        let uses_location = company_profile.feature_names().any(|name| name == LOCATION);
        if uses_location && investor.is_none() {
            return Err(CliError::Config(
                "the companies profile uses 'location' but no [investor] coordinates are configured"
                    .into(),
            ));
        }

        let grid_raw = match &overrides.grid {
            Some(flag) => parse_grid_flag(flag)?,
            None => raw.grid,
        };
        let grid = GridSpec::new(
            grid_raw.alpha_min,
            grid_raw.alpha_max,
            grid_raw.beta_min,
            grid_raw.beta_max,
            grid_raw.step,
        )
        .map_err(|e| CliError::Config(e.to_string()))?;

        let walker = WalkerParams {
            tolerance: overrides.tolerance.unwrap_or(raw.walker.tolerance),
            max_iterations: overrides.max_iter.unwrap_or(raw.walker.max_iterations),
            ..WalkerParams::default()
        };
        walker
            .validate()
            .map_err(|e| CliError::Config(e.to_string()))?;

        let out_dir = match &overrides.out {
            Some(flag) => flag.clone(),
            None => resolve(&base, raw.run.out.unwrap_or_else(|| PathBuf::from("out"))),
        };

        let subset = overrides.subset.or(raw.run.subset);
        if subset == Some(0) {
            return Err(CliError::Config("subset must be at least 1".into()));
        }

        Ok(Self {
            organizations,
            funding_rounds,
            locations,
            keywords,
            min_matches: raw.filter.min_matches,
            csv_options,
            company_profile,
            technology_profile,
            investor,
            grid,
            walker,
            seed: overrides.seed.unwrap_or(raw.run.seed),
            subset,
            out_dir,
            trajectory: overrides.trajectory || raw.run.trajectory,
            strict: overrides.strict || raw.run.strict,
        })
    }
}
