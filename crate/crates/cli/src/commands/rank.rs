//! End-to-end ranking: ingest, build ground truths, calibrate both layers,
//! run the walker at each optimum, and emit the report files.

use std::path::PathBuf;
use std::time::Instant;

use techrank_core::calibration::{calibrate, normalize_minmax, CalibrationResult};
use techrank_core::factors::{
    compose_ground_truth, investment_factor_companies, investment_factor_technologies,
    location_factor, FeatureVector, GeoPoint, LOCATION, PREVIOUS_INVESTMENTS,
};
use techrank_core::graph::Layer;
use techrank_core::walker::{self, WalkerParams, WalkerState};
use techrank_core::PreferenceProfile;

use super::{ingest_pipeline, IngestedData};
use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::report::{
    build_rows, write_ranking_csv, write_run_json, write_surface_csv, write_trajectory_csv,
    PhaseTimings, RunMetadata, TargetReport,
};

pub struct RankOutcome {
    pub out_dir: PathBuf,
    pub metadata: RunMetadata,
}

struct GroundTruths {
    companies: Vec<f64>,
    technologies: Vec<f64>,
    missing_location: Vec<String>,
}

fn company_features(
    profile: &PreferenceProfile,
    data: &IngestedData,
    investor: Option<GeoPoint>,
) -> CliResult<(Vec<FeatureVector>, Vec<String>)> {
    let mut features = Vec::new();
    let mut missing = Vec::new();
    for name in profile.feature_names() {
        match name {
            PREVIOUS_INVESTMENTS => features.push(investment_factor_companies(&data.investments)?),
            LOCATION => {
                let investor = investor.ok_or_else(|| {
                    CliError::Config("location feature requires investor coordinates".into())
                })?;
                let outcome =
                    location_factor(data.bipartite.companies(), &data.locations, investor)?;
                missing = outcome.missing;
                features.push(outcome.feature);
            }
            other => {
                return Err(CliError::Config(format!(
                    "unsupported company feature '{other}'"
                )))
            }
        }
    }
    Ok((features, missing))
}

fn technology_features(
    profile: &PreferenceProfile,
    data: &IngestedData,
) -> CliResult<Vec<FeatureVector>> {
    let mut features = Vec::new();
    for name in profile.feature_names() {
        match name {
            PREVIOUS_INVESTMENTS => features.push(investment_factor_technologies(
                &data.investments,
                &data.bipartite,
            )?),
            other => {
                return Err(CliError::Config(format!(
                    "unsupported technology feature '{other}'"
                )))
            }
        }
    }
    Ok(features)
}

fn ground_truths(config: &RunConfig, data: &IngestedData) -> CliResult<GroundTruths> {
    let (company_feats, missing_location) =
        company_features(&config.company_profile, data, config.investor)?;
    let companies = compose_ground_truth(&config.company_profile, &company_feats)?;
    let technology_feats = technology_features(&config.technology_profile, data)?;
    let technologies = compose_ground_truth(&config.technology_profile, &technology_feats)?;
    Ok(GroundTruths {
        companies,
        technologies,
        missing_location,
    })
}

fn target_report(result: &CalibrationResult, state: &WalkerState) -> TargetReport {
    TargetReport {
        alpha_star: result.alpha_star,
        beta_star: result.beta_star,
        rho_star: result.rho_star,
        iterations_companies: state.iterations_companies,
        iterations_technologies: state.iterations_technologies,
        total_iterations: state.total_iterations,
        converged: state.converged,
    }
}

pub fn execute(config: &RunConfig) -> CliResult<RankOutcome> {
    let total_start = Instant::now();

    let ingest_start = Instant::now();
    let data = ingest_pipeline(config, config.subset)?;
    let ingest_seconds = ingest_start.elapsed().as_secs_f64();

    let factors_start = Instant::now();
    let truths = ground_truths(config, &data)?;
    let factors_seconds = factors_start.elapsed().as_secs_f64();

    // A grid where no point converges is the pipeline's non-convergence
    // failure; strict mode gives it its own exit code.
    let classify = |err: techrank_core::Error| match err {
        techrank_core::Error::CalibrationFailed(msg) if config.strict => {
            CliError::NonConvergence(msg)
        }
        other => CliError::from(other),
    };

    let calib_c_start = Instant::now();
    let calib_companies = calibrate(
        &data.bipartite,
        &truths.companies,
        Layer::Companies,
        &config.grid,
        &config.walker,
    )
    .map_err(classify)?;
    let calibration_companies_seconds = calib_c_start.elapsed().as_secs_f64();

    let calib_t_start = Instant::now();
    let calib_technologies = calibrate(
        &data.bipartite,
        &truths.technologies,
        Layer::Technologies,
        &config.grid,
        &config.walker,
    )
    .map_err(classify)?;
    let calibration_technologies_seconds = calib_t_start.elapsed().as_secs_f64();

    let final_params = |result: &CalibrationResult| WalkerParams {
        alpha: result.alpha_star,
        beta: result.beta_star,
        record_trajectory: config.trajectory,
        ..config.walker.clone()
    };
    let walk_c_start = Instant::now();
    let run_companies = walker::run(&data.bipartite, &final_params(&calib_companies))?;
    let walk_companies_seconds = walk_c_start.elapsed().as_secs_f64();
    let walk_t_start = Instant::now();
    let run_technologies = walker::run(&data.bipartite, &final_params(&calib_technologies))?;
    let walk_technologies_seconds = walk_t_start.elapsed().as_secs_f64();

    std::fs::create_dir_all(&config.out_dir)?;
    let out = |name: &str| config.out_dir.join(name);

    let (k_c, k_t) = data.bipartite.degrees();
    let company_rows = build_rows(
        data.bipartite.companies().names(),
        &normalize_minmax(&run_companies.company_weights),
        &k_c,
    );
    write_ranking_csv(&out("companies.csv"), &company_rows)?;
    let technology_rows = build_rows(
        data.bipartite.technologies().names(),
        &normalize_minmax(&run_technologies.technology_weights),
        &k_t,
    );
    write_ranking_csv(&out("technologies.csv"), &technology_rows)?;

    write_surface_csv(
        &out("surface.csv"),
        &[
            (Layer::Companies, &calib_companies),
            (Layer::Technologies, &calib_technologies),
        ],
    )?;

    if config.trajectory {
        let company_names = data.bipartite.companies().names();
        let technology_names = data.bipartite.technologies().names();
        let mut blocks = Vec::new();
        if let Some(traj) = &run_companies.trajectory {
            blocks.push((Layer::Companies, traj, company_names));
        }
        if let Some(traj) = &run_technologies.trajectory {
            blocks.push((Layer::Technologies, traj, technology_names));
        }
        write_trajectory_csv(&out("trajectory.csv"), &blocks)?;
    }

    let metadata = RunMetadata {
        seed: config.seed,
        subset: config.subset,
        counts: data.counts.clone(),
        companies_missing_location: truths.missing_location.clone(),
        companies: target_report(&calib_companies, &run_companies),
        technologies: target_report(&calib_technologies, &run_technologies),
        timings: PhaseTimings {
            ingest_seconds,
            factors_seconds,
            calibration_companies_seconds,
            calibration_technologies_seconds,
            walk_companies_seconds,
            walk_technologies_seconds,
            total_seconds: total_start.elapsed().as_secs_f64(),
        },
    };
    write_run_json(&out("run.json"), &metadata)?;

    if config.strict && !(run_companies.converged && run_technologies.converged) {
        return Err(CliError::NonConvergence(format!(
            "walker did not converge within {} iterations (companies: {}, technologies: {})",
            config.walker.max_iterations, run_companies.converged, run_technologies.converged
        )));
    }

    Ok(RankOutcome {
        out_dir: config.out_dir.clone(),
        metadata,
    })
}

/// Short human summary printed after a successful run.
pub fn summarize(outcome: &RankOutcome) -> String {
    let m = &outcome.metadata;
    let mut s = String::new();
    s.push_str(&format!(
        "ranked {} companies and {} technologies\n",
        m.counts.n_companies, m.counts.n_technologies
    ));
    s.push_str(&format!(
        "companies:    alpha*={} beta*={} rho*={:.4} iterations={} converged={}\n",
        m.companies.alpha_star,
        m.companies.beta_star,
        m.companies.rho_star,
        m.companies.total_iterations,
        m.companies.converged
    ));
    s.push_str(&format!(
        "technologies: alpha*={} beta*={} rho*={:.4} iterations={} converged={}\n",
        m.technologies.alpha_star,
        m.technologies.beta_star,
        m.technologies.rho_star,
        m.technologies.total_iterations,
        m.technologies.converged
    ));
    s.push_str(&format!("outputs in {}", outcome.out_dir.display()));
    s
}
