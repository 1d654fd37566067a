//! The recursive two-layer random walker.
//!
//! Scores start at the node degrees. Each iteration pushes the technology
//! scores through a column-stochastic matrix into the company layer and the
//! company scores through a row-stochastic matrix into the technology layer,
//! both matrices shaped by the degree powers `k_c^-beta` and `k_t^-alpha`.
//! Iteration stops when the min-max-normalized scores of both layers move by
//! less than the tolerance.

use crate::calibration::normalize_minmax;
use crate::error::{Error, Result};
use crate::graph::BipartiteGraph;

/// Walker configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkerParams {
    pub alpha: f64,
    pub beta: f64,
    /// Convergence threshold on the L-infinity change of the min-max
    /// normalized weight vectors.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Record the normalized weight vectors of every iteration.
    pub record_trajectory: bool,
}

pub const DEFAULT_TOLERANCE: f64 = 1e-8;
pub const DEFAULT_MAX_ITERATIONS: usize = 5_000;

impl WalkerParams {
    pub fn new(alpha: f64, beta: f64) -> Self {
        Self {
            alpha,
            beta,
            tolerance: DEFAULT_TOLERANCE,
            max_iterations: DEFAULT_MAX_ITERATIONS,
            record_trajectory: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.alpha.is_finite() || !self.beta.is_finite() {
            return Err(Error::InvalidParams(format!(
                "alpha and beta must be finite, got ({}, {})",
                self.alpha, self.beta
            )));
        }
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidParams(
                "max_iterations must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

impl Default for WalkerParams {
    fn default() -> Self {
        Self::new(0.0, 0.0)
    }
}

/// Edge-aligned pair of transition matrices.
///
/// `to_companies` carries technology mass into the company layer and is
/// column-stochastic: for every technology the weights over its companies sum
/// to one. `to_technologies` carries company mass the other way and is
/// row-stochastic: for every company the weights over its technologies sum to
/// one. Both are zero off the adjacency support.
#[derive(Debug, Clone)]
pub struct TransitionMatrices {
    n_companies: usize,
    n_technologies: usize,
    row_start: Vec<usize>,
    tech_idx: Vec<usize>,
    to_companies: Vec<f64>,
    to_technologies: Vec<f64>,
}

impl TransitionMatrices {
    pub fn n_companies(&self) -> usize {
        self.n_companies
    }

    pub fn n_technologies(&self) -> usize {
        self.n_technologies
    }

    /// Weight applied to technology `t`'s score when updating company `c`;
    /// zero when the edge is absent.
    pub fn weight_to_company(&self, c: usize, t: usize) -> f64 {
        self.edge_offset(c, t)
            .map(|e| self.to_companies[e])
            .unwrap_or(0.0)
    }

    /// Weight applied to company `c`'s score when updating technology `t`;
    /// zero when the edge is absent.
    pub fn weight_to_technology(&self, c: usize, t: usize) -> f64 {
        self.edge_offset(c, t)
            .map(|e| self.to_technologies[e])
            .unwrap_or(0.0)
    }

    fn edge_offset(&self, c: usize, t: usize) -> Option<usize> {
        let range = self.row_start[c]..self.row_start[c + 1];
        self.tech_idx[range.clone()]
            .binary_search(&t)
            .ok()
            .map(|pos| range.start + pos)
    }

    /// Iterates all edges as (company, technology, to_company weight,
    /// to_technology weight).
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64, f64)> + '_ {
        (0..self.n_companies).flat_map(move |c| {
            (self.row_start[c]..self.row_start[c + 1]).map(move |e| {
                (
                    c,
                    self.tech_idx[e],
                    self.to_companies[e],
                    self.to_technologies[e],
                )
            })
        })
    }

    /// One unnormalized update of both layers, reading the step-n vectors and
    /// writing the step-n+1 vectors.
    pub fn apply(
        &self,
        companies_in: &[f64],
        technologies_in: &[f64],
        companies_out: &mut [f64],
        technologies_out: &mut [f64],
    ) {
        technologies_out.fill(0.0);
        for c in 0..self.n_companies {
            let w_c = companies_in[c];
            let mut acc = 0.0;
            for e in self.row_start[c]..self.row_start[c + 1] {
                let t = self.tech_idx[e];
                acc += self.to_companies[e] * technologies_in[t];
                technologies_out[t] += self.to_technologies[e] * w_c;
            }
            companies_out[c] = acc;
        }
    }
}

/// Builds the transition matrices for the given exponents.
///
/// Degree powers are computed as `exp(-p * ln k)`; degrees of at least one
/// keep them finite for any finite exponent short of overflow, which is
/// reported as a parameter-range error.
pub fn transition_matrices(
    g: &BipartiteGraph,
    alpha: f64,
    beta: f64,
) -> Result<TransitionMatrices> {
    let (k_c, k_t) = g.degrees();
    let range_err = || Error::ParameterRange { alpha, beta };

    let c_pow: Vec<f64> = k_c
        .iter()
        .map(|&k| (-beta * (k as f64).ln()).exp())
        .collect();
    let t_pow: Vec<f64> = k_t
        .iter()
        .map(|&k| (-alpha * (k as f64).ln()).exp())
        .collect();
    if !c_pow
        .iter()
        .chain(t_pow.iter())
        .all(|v| v.is_finite() && *v > 0.0)
    {
        return Err(range_err());
    }

    // Column denominators sum company powers per technology, row denominators
    // sum technology powers per company.
    let mut col_denom = vec![0.0; g.n_technologies()];
    for (t, denom) in col_denom.iter_mut().enumerate() {
        *denom = g.companies_of(t).iter().map(|&c| c_pow[c]).sum();
    }
    let mut row_denom = vec![0.0; g.n_companies()];
    for (c, denom) in row_denom.iter_mut().enumerate() {
        *denom = g.technologies_of(c).iter().map(|&t| t_pow[t]).sum();
    }
    if !col_denom
        .iter()
        .chain(row_denom.iter())
        .all(|v| v.is_finite() && *v > 0.0)
    {
        return Err(range_err());
    }

    let mut row_start = Vec::with_capacity(g.n_companies() + 1);
    let mut tech_idx = Vec::with_capacity(g.edge_count());
    let mut to_companies = Vec::with_capacity(g.edge_count());
    let mut to_technologies = Vec::with_capacity(g.edge_count());
    row_start.push(0);
    for c in 0..g.n_companies() {
        for &t in g.technologies_of(c) {
            tech_idx.push(t);
            to_companies.push(c_pow[c] / col_denom[t]);
            to_technologies.push(t_pow[t] / row_denom[c]);
        }
        row_start.push(tech_idx.len());
    }
    if !to_companies
        .iter()
        .chain(to_technologies.iter())
        .all(|v| v.is_finite())
    {
        return Err(range_err());
    }

    Ok(TransitionMatrices {
        n_companies: g.n_companies(),
        n_technologies: g.n_technologies(),
        row_start,
        tech_idx,
        to_companies,
        to_technologies,
    })
}

/// Per-iteration min-max-normalized weight vectors of both layers, starting
/// from the initial (degree) state.
#[derive(Debug, Clone, Default)]
pub struct Trajectory {
    pub companies: Vec<Vec<f64>>,
    pub technologies: Vec<Vec<f64>>,
}

/// Walker state: current weight pair plus convergence bookkeeping.
#[derive(Debug, Clone)]
pub struct WalkerState {
    /// Company weights; inside `run` these are renormalized to unit sum each
    /// iteration so the convergence test is free of mass drift.
    pub company_weights: Vec<f64>,
    pub technology_weights: Vec<f64>,
    /// Last pre-renormalization update, kept alongside the normalized pair.
    pub raw_company_weights: Vec<f64>,
    pub raw_technology_weights: Vec<f64>,
    /// First iteration at which the company layer's normalized change fell
    /// below tolerance; `None` if it never did.
    pub iterations_companies: Option<usize>,
    pub iterations_technologies: Option<usize>,
    pub total_iterations: usize,
    pub converged: bool,
    pub trajectory: Option<Trajectory>,
}

impl WalkerState {
    fn dimensions_match(&self, tm: &TransitionMatrices) -> Result<()> {
        if self.company_weights.len() != tm.n_companies() {
            return Err(Error::DimensionMismatch {
                what: "company weights",
                expected: tm.n_companies(),
                actual: self.company_weights.len(),
            });
        }
        if self.technology_weights.len() != tm.n_technologies() {
            return Err(Error::DimensionMismatch {
                what: "technology weights",
                expected: tm.n_technologies(),
                actual: self.technology_weights.len(),
            });
        }
        Ok(())
    }
}

/// Initial state: both layers start at their degrees.
pub fn init_weights(g: &BipartiteGraph) -> WalkerState {
    let (k_c, k_t) = g.degrees();
    let w_c: Vec<f64> = k_c.iter().map(|&k| k as f64).collect();
    let w_t: Vec<f64> = k_t.iter().map(|&k| k as f64).collect();
    WalkerState {
        raw_company_weights: w_c.clone(),
        raw_technology_weights: w_t.clone(),
        company_weights: w_c,
        technology_weights: w_t,
        iterations_companies: None,
        iterations_technologies: None,
        total_iterations: 0,
        converged: false,
        trajectory: None,
    }
}

/// One plain recursive update of both layers, computed entirely from the
/// step-n state. No renormalization: the new company mass equals the old
/// technology mass and vice versa.
pub fn step(state: &WalkerState, tm: &TransitionMatrices) -> Result<WalkerState> {
    state.dimensions_match(tm)?;
    let mut next_c = vec![0.0; tm.n_companies()];
    let mut next_t = vec![0.0; tm.n_technologies()];
    tm.apply(
        &state.company_weights,
        &state.technology_weights,
        &mut next_c,
        &mut next_t,
    );
    Ok(WalkerState {
        raw_company_weights: next_c.clone(),
        raw_technology_weights: next_t.clone(),
        company_weights: next_c,
        technology_weights: next_t,
        iterations_companies: state.iterations_companies,
        iterations_technologies: state.iterations_technologies,
        total_iterations: state.total_iterations + 1,
        converged: state.converged,
        trajectory: state.trajectory.clone(),
    })
}

fn linf_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn renormalize(v: &mut [f64]) {
    let sum: f64 = v.iter().sum();
    if sum > 0.0 {
        for x in v.iter_mut() {
            *x /= sum;
        }
    }
}

/// Runs the walker to its fixed point.
///
/// Each iteration applies the recursive update, renormalizes both layers to
/// unit sum, and compares min-max-normalized vectors against the previous
/// iteration. The run stops once both layers move by less than the tolerance
/// in the same iteration, or flags `converged = false` after
/// `max_iterations`. The first iteration at which each layer individually met
/// the tolerance is recorded.
pub fn run(g: &BipartiteGraph, params: &WalkerParams) -> Result<WalkerState> {
    params.validate()?;
    let tm = transition_matrices(g, params.alpha, params.beta)?;
    let mut state = init_weights(g);

    let mut cur_c = state.company_weights.clone();
    let mut cur_t = state.technology_weights.clone();
    renormalize(&mut cur_c);
    renormalize(&mut cur_t);
    let mut norm_c = normalize_minmax(&cur_c);
    let mut norm_t = normalize_minmax(&cur_t);

    let mut trajectory = params.record_trajectory.then(|| Trajectory {
        companies: vec![norm_c.clone()],
        technologies: vec![norm_t.clone()],
    });

    let mut next_c = vec![0.0; cur_c.len()];
    let mut next_t = vec![0.0; cur_t.len()];

    for n in 1..=params.max_iterations {
        tm.apply(&cur_c, &cur_t, &mut next_c, &mut next_t);
        state.raw_company_weights.copy_from_slice(&next_c);
        state.raw_technology_weights.copy_from_slice(&next_t);
        renormalize(&mut next_c);
        renormalize(&mut next_t);

        let new_norm_c = normalize_minmax(&next_c);
        let new_norm_t = normalize_minmax(&next_t);
        let delta_c = linf_distance(&new_norm_c, &norm_c);
        let delta_t = linf_distance(&new_norm_t, &norm_t);

        if delta_c < params.tolerance && state.iterations_companies.is_none() {
            state.iterations_companies = Some(n);
        }
        if delta_t < params.tolerance && state.iterations_technologies.is_none() {
            state.iterations_technologies = Some(n);
        }

        std::mem::swap(&mut cur_c, &mut next_c);
        std::mem::swap(&mut cur_t, &mut next_t);
        norm_c = new_norm_c;
        norm_t = new_norm_t;
        state.total_iterations = n;

        if let Some(traj) = trajectory.as_mut() {
            traj.companies.push(norm_c.clone());
            traj.technologies.push(norm_t.clone());
        }

        if delta_c < params.tolerance && delta_t < params.tolerance {
            state.converged = true;
            break;
        }
    }

    state.company_weights = cur_c;
    state.technology_weights = cur_t;
    state.trajectory = trajectory;
    Ok(state)
}
