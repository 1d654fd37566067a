//! Grid-search calibration of the walker exponents.
//!
//! The objective is the Spearman rank correlation between the walker's final
//! normalized weights for one layer and an exogenous ground-truth vector over
//! the same layer. Grid points are independent walker runs and evaluate in
//! parallel; the argmax reduction applies a deterministic tie-break so the
//! result never depends on scheduling.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{BipartiteGraph, Layer};
use crate::walker::{self, WalkerParams};

/// Rectangular (alpha, beta) grid with a shared step.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub alpha_min: f64,
    pub alpha_max: f64,
    pub beta_min: f64,
    pub beta_max: f64,
    pub step: f64,
}

/// Snap to the 1e-9 lattice so grid values like -0.04 and 0.04 are exact
/// negatives of each other and tie-breaking stays deterministic.
fn snap(v: f64) -> f64 {
    (v * 1e9).round() / 1e9
}

impl GridSpec {
    pub fn new(
        alpha_min: f64,
        alpha_max: f64,
        beta_min: f64,
        beta_max: f64,
        step: f64,
    ) -> Result<Self> {
        let spec = Self {
            alpha_min,
            alpha_max,
            beta_min,
            beta_max,
            step,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let values = [
            self.alpha_min,
            self.alpha_max,
            self.beta_min,
            self.beta_max,
            self.step,
        ];
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidGrid("bounds and step must be finite".into()));
        }
        if self.step <= 0.0 {
            return Err(Error::InvalidGrid(format!(
                "step must be positive, got {}",
                self.step
            )));
        }
        if self.alpha_min >= self.alpha_max || self.beta_min >= self.beta_max {
            return Err(Error::InvalidGrid(
                "min must be below max on both axes".into(),
            ));
        }
        for (name, lo, hi) in [
            ("alpha", self.alpha_min, self.alpha_max),
            ("beta", self.beta_min, self.beta_max),
        ] {
            let span = hi - lo;
            let steps = (span / self.step).round();
            if (steps * self.step - span).abs() > 1e-9 {
                return Err(Error::InvalidGrid(format!(
                    "step {} does not divide the {name} range [{lo}, {hi}]",
                    self.step
                )));
            }
        }
        Ok(())
    }

    fn axis(lo: f64, hi: f64, step: f64) -> Vec<f64> {
        let count = ((hi - lo) / step).round() as usize + 1;
        (0..count).map(|i| snap(lo + i as f64 * step)).collect()
    }

    pub fn alphas(&self) -> Vec<f64> {
        Self::axis(self.alpha_min, self.alpha_max, self.step)
    }

    pub fn betas(&self) -> Vec<f64> {
        Self::axis(self.beta_min, self.beta_max, self.step)
    }

    pub fn n_points(&self) -> usize {
        self.alphas().len() * self.betas().len()
    }
}

impl Default for GridSpec {
    /// Exponents in [-2, 2] on both axes with step 0.04.
    fn default() -> Self {
        Self {
            alpha_min: -2.0,
            alpha_max: 2.0,
            beta_min: -2.0,
            beta_max: 2.0,
            step: 0.04,
        }
    }
}

/// Affine map of a vector onto [0, 1]; constant vectors map to all zeros.
pub fn normalize_minmax(v: &[f64]) -> Vec<f64> {
    let min = v.iter().copied().fold(f64::INFINITY, f64::min);
    let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = max - min;
    if span.is_nan() || span <= 0.0 {
        return vec![0.0; v.len()];
    }
    v.iter().map(|x| (x - min) / span).collect()
}

/// Fractional ranks (1-based, ties averaged).
fn fractional_ranks(v: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..v.len()).collect();
    order.sort_unstable_by(|&a, &b| v[a].partial_cmp(&v[b]).expect("finite values"));
    let mut ranks = vec![0.0; v.len()];
    let mut i = 0;
    while i < v.len() {
        let mut j = i;
        while j + 1 < v.len() && v[order[j + 1]] == v[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = avg;
        }
        i = j + 1;
    }
    ranks
}

fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mean_x: f64 = x.iter().sum::<f64>() / n;
    let mean_y: f64 = y.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut var_x = 0.0;
    let mut var_y = 0.0;
    for (a, b) in x.iter().zip(y) {
        let dx = a - mean_x;
        let dy = b - mean_y;
        cov += dx * dy;
        var_x += dx * dx;
        var_y += dy * dy;
    }
    cov / (var_x * var_y).sqrt()
}

/// Spearman rank correlation: Pearson correlation of fractional
/// (average-tie) ranks. Errors on mismatched lengths, fewer than two
/// observations, non-finite values, or an all-constant vector.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(Error::UndefinedCorrelation(
            "need at least two observations",
        ));
    }
    if !x.iter().chain(y.iter()).all(|v| v.is_finite()) {
        return Err(Error::UndefinedCorrelation("non-finite values"));
    }
    let constant = |v: &[f64]| v.iter().all(|&a| a == v[0]);
    if constant(x) || constant(y) {
        return Err(Error::UndefinedCorrelation("constant vector"));
    }
    let rho = pearson(&fractional_ranks(x), &fractional_ranks(y));
    Ok(rho.clamp(-1.0, 1.0))
}

/// Outcome of the grid search: the argmax point and the sampled correlation
/// surface. Missing surface entries mark grid points where the walker failed
/// to converge (or the correlation was undefined); they never win the argmax.
#[derive(Debug, Clone)]
pub struct CalibrationResult {
    pub alpha_star: f64,
    pub beta_star: f64,
    pub rho_star: f64,
    pub alphas: Vec<f64>,
    pub betas: Vec<f64>,
    /// `surface[alpha_index][beta_index]`
    pub surface: Vec<Vec<Option<f64>>>,
    pub target: Layer,
}

impl CalibrationResult {
    /// Writes the surface as `alpha,beta,rho` rows; missing points leave rho
    /// empty.
    pub fn write_surface_csv<W: std::io::Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "alpha,beta,rho")?;
        for (ai, &alpha) in self.alphas.iter().enumerate() {
            for (bi, &beta) in self.betas.iter().enumerate() {
                match self.surface[ai][bi] {
                    Some(rho) => writeln!(out, "{alpha},{beta},{rho}")?,
                    None => writeln!(out, "{alpha},{beta},")?,
                }
            }
        }
        Ok(())
    }
}

/// Orders candidate optima: smaller |alpha|, then smaller |beta|, then
/// lexicographic on (alpha, beta).
fn tie_break_before(a: (f64, f64), b: (f64, f64)) -> bool {
    let ka = (a.0.abs(), a.1.abs(), a.0, a.1);
    let kb = (b.0.abs(), b.1.abs(), b.0, b.1);
    ka.partial_cmp(&kb) == Some(std::cmp::Ordering::Less)
}

/// Grid search for the exponents maximizing the Spearman correlation between
/// the target layer's converged normalized weights and `ground_truth`.
///
/// Grid points run in parallel. A point where the walker does not converge is
/// recorded as missing and excluded; if every point is missing, calibration
/// fails. Ties on the correlation break deterministically toward the smallest
/// |alpha|, then |beta|, then lexicographic order.
pub fn calibrate(
    g: &BipartiteGraph,
    ground_truth: &[f64],
    target: Layer,
    grid: &GridSpec,
    walker_defaults: &WalkerParams,
) -> Result<CalibrationResult> {
    grid.validate()?;
    walker_defaults.validate()?;
    let expected = match target {
        Layer::Companies => g.n_companies(),
        Layer::Technologies => g.n_technologies(),
    };
    if ground_truth.len() != expected {
        return Err(Error::LengthMismatch {
            left: ground_truth.len(),
            right: expected,
        });
    }
    if !ground_truth.iter().all(|v| v.is_finite()) {
        return Err(Error::UndefinedCorrelation("non-finite ground truth"));
    }
    if ground_truth.iter().all(|&v| v == ground_truth[0]) {
        return Err(Error::UndefinedCorrelation("constant ground truth"));
    }
    let truth = normalize_minmax(ground_truth);

    let alphas = grid.alphas();
    let betas = grid.betas();
    let points: Vec<(usize, usize)> = (0..alphas.len())
        .flat_map(|ai| (0..betas.len()).map(move |bi| (ai, bi)))
        .collect();

    let rhos: Vec<Option<f64>> = points
        .par_iter()
        .map(|&(ai, bi)| {
            let params = WalkerParams {
                alpha: alphas[ai],
                beta: betas[bi],
                record_trajectory: false,
                ..walker_defaults.clone()
            };
            let state = walker::run(g, &params).ok()?;
            if !state.converged {
                return None;
            }
            let weights = match target {
                Layer::Companies => normalize_minmax(&state.company_weights),
                Layer::Technologies => normalize_minmax(&state.technology_weights),
            };
            spearman(&weights, &truth).ok()
        })
        .collect();

    let mut surface = vec![vec![None; betas.len()]; alphas.len()];
    let mut best: Option<(f64, f64, f64)> = None;
    for (&(ai, bi), &rho) in points.iter().zip(&rhos) {
        surface[ai][bi] = rho;
        let Some(rho) = rho else { continue };
        let candidate = (alphas[ai], betas[bi]);
        best = match best {
            None => Some((rho, candidate.0, candidate.1)),
            Some((best_rho, ba, bb)) => {
                if rho > best_rho || (rho == best_rho && tie_break_before(candidate, (ba, bb))) {
                    Some((rho, candidate.0, candidate.1))
                } else {
                    Some((best_rho, ba, bb))
                }
            }
        };
    }

    let (rho_star, alpha_star, beta_star) = best.ok_or_else(|| {
        Error::CalibrationFailed("no grid point converged to a defined correlation".into())
    })?;

    Ok(CalibrationResult {
        alpha_star,
        beta_star,
        rho_star,
        alphas,
        betas,
        surface,
        target,
    })
}
