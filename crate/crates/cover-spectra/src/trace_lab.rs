//! Monte Carlo estimates of non-backtracking traces of random covers, fits of
//! their expansion in `1/n`, non-Alon probability scans, and trace-method
//! bounds.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use crate::covers::{realize, sample_unchecked, CoordCover, ModelSpec};
use crate::error::{Error, Result};
use crate::graph::{adjacency_matrix, Graph};
use crate::spectra::{hashimoto_trace_u64, new_spectrum, non_alon_count, symmetric_eigenvalues, MATCH_TOL};
use crate::tangles::has_tangles;
use crate::walks::{lifted_trace, snbc_edge_sequences, DEFAULT_WALK_BUDGET};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TangleFilter {
    pub nu: f64,
    pub r: i64,
    pub edge_budget: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceCell {
    pub k: usize,
    pub n: usize,
    pub mean: f64,
    pub stderr: f64,
    pub trials: u64,
    /// Trials where the tangle search ran out of budget; they count as
    /// tangle-free.
    pub flagged: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceScanResult {
    pub cells: Vec<TraceCell>,
    pub trials: u64,
    pub seed: u64,
    pub filter: Option<TangleFilter>,
}

impl TraceScanResult {
    pub fn cells_for(&self, k: usize) -> Vec<&TraceCell> {
        self.cells.iter().filter(|c| c.k == k).collect()
    }
}

fn moments(values: impl Iterator<Item = i64>) -> (i128, i128, u64) {
    values.fold((0i128, 0i128, 0u64), |(s, q, c), x| (s + x as i128, q + (x as i128) * (x as i128), c + 1))
}

fn mean_stderr(sum: i128, sum_sq: i128, trials: u64) -> (f64, f64) {
    let t = trials as f64;
    let mean = sum as f64 / t;
    if trials < 2 {
        return (mean, 0.0);
    }
    let num = trials as i128 * sum_sq - sum * sum;
    let var = num as f64 / (t * (t - 1.0));
    (mean, (var / t).sqrt())
}

/// Per `(k, n)`: mean and standard error of `Trace(H_G^k) - Trace(H_B^k)`,
/// times the tangle-free indicator when a filter is given.
pub fn trace_scan(
    base: &Graph,
    spec: &ModelSpec,
    k_list: &[usize],
    n_list: &[usize],
    trials: u64,
    filter: Option<TangleFilter>,
) -> Result<TraceScanResult> {
    if trials == 0 {
        return Err(Error::pre("at least one trial is required"));
    }
    let walks: Vec<Vec<Vec<usize>>> =
        k_list.iter().map(|&k| snbc_edge_sequences(base, k, DEFAULT_WALK_BUDGET)).collect::<Result<_>>()?;
    let base_traces: Vec<i64> = walks.iter().map(|w| w.len() as i64).collect();
    let mut cells = Vec::new();
    for &n in n_list {
        spec.kind.check(base, n)?;
        // Per trial: one value per k, plus the flagged bit.
        let per_trial: Vec<(Vec<i64>, bool)> = (0..trials)
            .into_par_iter()
            .map(|t| {
                let c = sample_unchecked(base, n, spec, t);
                let (keep, flagged) = match filter {
                    None => (true, false),
                    Some(f) => {
                        let rep = has_tangles(&realize(&c).total, f.nu, f.r, f.edge_budget)?;
                        (!rep.found, !rep.found && rep.search_budget_exhausted)
                    }
                };
                let vals = walks
                    .iter()
                    .zip(&base_traces)
                    .map(|(w, &tb)| if keep { lifted_trace(&c, w) as i64 - tb } else { 0 })
                    .collect();
                Ok((vals, flagged))
            })
            .collect::<Result<_>>()?;
        let flagged = per_trial.iter().filter(|(_, f)| *f).count() as u64;
        for (ki, &k) in k_list.iter().enumerate() {
            let (s, q, c) = moments(per_trial.iter().map(|(v, _)| v[ki]));
            let (mean, stderr) = mean_stderr(s, q, c);
            cells.push(TraceCell { k, n, mean, stderr, trials, flagged });
        }
    }
    Ok(TraceScanResult { cells, trials, seed: spec.seed, filter })
}

/// `Trace(H_G^k) - Trace(H_B^k)` for one cover.
pub fn trace_excess(c: &CoordCover, k: usize) -> Result<i64> {
    let w = snbc_edge_sequences(c.base(), k, DEFAULT_WALK_BUDGET)?;
    Ok(lifted_trace(c, &w) as i64 - w.len() as i64)
}

/// `sum over k' | k of Trace(H_B^k') - h(k) - Trace(H_B^k)`.
pub fn c0_prediction(base: &Graph, k: usize, h: &dyn Fn(usize) -> f64) -> Result<f64> {
    if k == 0 {
        return Err(Error::pre("k must be positive"));
    }
    let tr = |j: usize| hashimoto_trace_u64(base, j).ok_or_else(|| Error::pre("trace overflows u64"));
    let mut s = 0.0;
    for j in 1..k {
        if k.is_multiple_of(j) {
            s += tr(j)? as f64;
        }
    }
    Ok(s - h(k))
}

#[derive(Clone, Debug, Serialize)]
pub struct CoefficientFit {
    pub k: usize,
    pub coeffs: Vec<f64>,
    pub stderrs: Vec<f64>,
    pub ci_low: Vec<f64>,
    pub ci_high: Vec<f64>,
    /// Weighted sum of squared residuals.
    pub residual: f64,
}

pub const CI_Z: f64 = 1.959_963_984_540_054;

/// Weighted least squares of `mean(n)` on `1, 1/n, ..., 1/n^(r-1)` with
/// weights `1/stderr^2` (unit weights when every stderr is zero). Confidence
/// intervals are 95% normal intervals from the propagated covariance.
/// Largest accepted condition number of the column-scaled design matrix.
pub const DESIGN_COND_MAX: f64 = 1e8;

pub fn fit_coefficients(points: &[(usize, f64, f64)], k: usize, r: usize) -> Result<CoefficientFit> {
    if r == 0 {
        return Err(Error::pre("at least one coefficient"));
    }
    let mut ns: Vec<usize> = points.iter().map(|p| p.0).collect();
    ns.sort_unstable();
    ns.dedup();
    if ns.len() < r + 2 {
        return Err(Error::pre(format!("{} distinct n values, need {}", ns.len(), r + 2)));
    }
    for &(n, mean, se) in points {
        if mean != 0.0 && se > 0.05 * mean.abs() {
            return Err(Error::pre(format!("stderr {se} at n = {n} exceeds 5% of the mean {mean}")));
        }
    }
    let unit = points.iter().all(|p| p.2 == 0.0);
    if !unit && points.iter().any(|p| p.2 == 0.0) {
        return Err(Error::pre("mixed zero and non-zero standard errors"));
    }
    let m = points.len();
    let x = DMatrix::from_fn(m, r, |i, j| (points[i].0 as f64).powi(-(j as i32)));
    let w = DVector::from_fn(m, |i, _| if unit { 1.0 } else { 1.0 / (points[i].2 * points[i].2) });
    let y = DVector::from_fn(m, |i, _| points[i].1);
    // Columns are scaled to unit weighted norm so that the condition number
    // measures clustering of the n values rather than the size of 1/n^j.
    let sw = w.map(f64::sqrt);
    let scale: Vec<f64> = (0..r).map(|j| (0..m).map(|i| (sw[i] * x[(i, j)]).powi(2)).sum::<f64>().sqrt()).collect();
    let xs = DMatrix::from_fn(m, r, |i, j| sw[i] * x[(i, j)] / scale[j]);
    let sv = xs.clone().svd(false, false).singular_values;
    let (smax, smin) = (sv.max(), sv.min());
    if smin.is_nan() || smin <= smax / DESIGN_COND_MAX {
        return Err(Error::IllConditioned(format!("design condition {:.3e}, n values too clustered", smax / smin)));
    }
    let ys = DVector::from_fn(m, |i, _| sw[i] * y[i]);
    let cov_s = (xs.transpose() * &xs)
        .try_inverse()
        .ok_or_else(|| Error::IllConditioned("singular normal matrix".into()))?;
    let beta_s: DVector<f64> = &cov_s * (xs.transpose() * ys);
    let beta = DVector::from_fn(r, |j, _| beta_s[j] / scale[j]);
    let cov = DMatrix::from_fn(r, r, |a, b| cov_s[(a, b)] / (scale[a] * scale[b]));
    let fitted: DVector<f64> = &x * &beta;
    let residual: f64 = (0..m).map(|i| w[i] * (y[i] - fitted[i]).powi(2)).sum();
    let coeffs: Vec<f64> = beta.iter().copied().collect();
    let stderrs: Vec<f64> = (0..r).map(|a| if unit { 0.0 } else { cov[(a, a)].sqrt() }).collect();
    let ci_low = coeffs.iter().zip(&stderrs).map(|(c, s)| c - CI_Z * s).collect();
    let ci_high = coeffs.iter().zip(&stderrs).map(|(c, s)| c + CI_Z * s).collect();
    Ok(CoefficientFit { k, coeffs, stderrs, ci_low, ci_high, residual })
}

pub fn fit_scan(scan: &TraceScanResult, k: usize, r: usize) -> Result<CoefficientFit> {
    let pts: Vec<(usize, f64, f64)> = scan.cells_for(k).iter().map(|c| (c.n, c.mean, c.stderr)).collect();
    fit_coefficients(&pts, k, r)
}

#[derive(Clone, Debug, Serialize)]
pub struct NonAlonRow {
    pub n: usize,
    pub trials: u64,
    pub hits: u64,
    pub p_hat: f64,
    pub stderr: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct NonAlonScan {
    pub rows: Vec<NonAlonRow>,
    /// Weighted least-squares slope of `log P` against `log n` over rows with
    /// at least one hit.
    pub slope: Option<f64>,
    pub slope_stderr: Option<f64>,
}

/// Fraction of covers with at least one new eigenvalue of absolute value above
/// `2 sqrt(d-1) + epsilon`.
pub fn nonalon_probability_scan(base: &Graph, spec: &ModelSpec, epsilon: f64, n_list: &[usize], trials: u64) -> Result<NonAlonScan> {
    if trials == 0 {
        return Err(Error::pre("at least one trial is required"));
    }
    let d = base.is_regular().ok_or_else(|| Error::pre("base must be regular"))?;
    let base_spec = symmetric_eigenvalues(&adjacency_matrix(base))?;
    let mut rows = Vec::new();
    for &n in n_list {
        spec.kind.check(base, n)?;
        let hits: Vec<bool> = (0..trials)
            .into_par_iter()
            .map(|t| {
                let g = realize(&sample_unchecked(base, n, spec, t)).total;
                let full = symmetric_eigenvalues(&adjacency_matrix(&g))?;
                let new = new_spectrum(&full, &base_spec, MATCH_TOL)?;
                Ok(non_alon_count(&new, d, epsilon) > 0)
            })
            .collect::<Result<_>>()?;
        let h = hits.iter().filter(|&&x| x).count() as u64;
        let p = h as f64 / trials as f64;
        rows.push(NonAlonRow { n, trials, hits: h, p_hat: p, stderr: (p * (1.0 - p) / trials as f64).sqrt() });
    }
    let (slope, slope_stderr) = loglog_slope(&rows);
    Ok(NonAlonScan { rows, slope, slope_stderr })
}

fn loglog_slope(rows: &[NonAlonRow]) -> (Option<f64>, Option<f64>) {
    let pts: Vec<(f64, f64, f64)> = rows
        .iter()
        .filter(|r| r.hits > 0)
        .map(|r| {
            // Delta method: sd(log p) = sd(p) / p; floor at one hit.
            let sd = (r.stderr / r.p_hat).max(1.0 / (r.trials as f64).sqrt());
            ((r.n as f64).ln(), r.p_hat.ln(), 1.0 / (sd * sd))
        })
        .collect();
    if pts.len() < 2 {
        return (None, None);
    }
    let sw: f64 = pts.iter().map(|p| p.2).sum();
    let mx = pts.iter().map(|p| p.2 * p.0).sum::<f64>() / sw;
    let my = pts.iter().map(|p| p.2 * p.1).sum::<f64>() / sw;
    let sxx: f64 = pts.iter().map(|p| p.2 * (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| p.2 * (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return (None, None);
    }
    (Some(sxy / sxx), Some((1.0 / sxx).sqrt()))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MarkovBounds {
    pub d: usize,
    pub r: usize,
    pub r_default: usize,
    /// `lambda_1^(1/r) (2 sqrt(d-1))^(r/(r+1))` with the exponents as printed.
    pub adjacency_bound_as_written: f64,
    /// `d^(1/(r+1)) (2 sqrt(d-1))^(r/(r+1))`, from balancing the two trace terms.
    pub adjacency_bound_balanced: f64,
    pub hashimoto_bound: f64,
}

pub fn r_default(d: usize) -> usize {
    2 * (((d - 1) as f64).sqrt() + 1.0).floor() as usize
}

pub fn hashimoto_bound(d: usize, r: usize) -> f64 {
    let q = (d - 1) as f64;
    let e = 1.0 / (2.0 * r as f64);
    q.sqrt() * (q.powf(e) + q.powf(-e))
}

pub fn markov_bounds(d: usize, r: usize) -> Result<MarkovBounds> {
    if d < 3 || r < 1 {
        return Err(Error::pre("need d >= 3 and r >= 1"));
    }
    let rho = 2.0 * ((d - 1) as f64).sqrt();
    let (rf, df) = (r as f64, d as f64);
    Ok(MarkovBounds {
        d,
        r,
        r_default: r_default(d),
        adjacency_bound_as_written: df.powf(1.0 / rf) * rho.powf(rf / (rf + 1.0)),
        adjacency_bound_balanced: df.powf(1.0 / (rf + 1.0)) * rho.powf(rf / (rf + 1.0)),
        hashimoto_bound: hashimoto_bound(d, r),
    })
}

pub const PUDER_OFFSET: f64 = 0.86;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PuderRow {
    pub d: usize,
    pub alon: f64,
    pub puder_bound: f64,
    /// Hashimoto-derived bound at `r = d`.
    pub hashimoto_at_d: f64,
    /// `hashimoto_at_d - 2 sqrt(d-1)`.
    pub gap: f64,
}

pub fn puder_comparison(d: usize) -> Result<PuderRow> {
    if d < 3 {
        return Err(Error::pre(format!("degree {d} < 3")));
    }
    let alon = 2.0 * ((d - 1) as f64).sqrt();
    let h = hashimoto_bound(d, d);
    Ok(PuderRow { d, alon, puder_bound: alon + PUDER_OFFSET, hashimoto_at_d: h, gap: h - alon })
}
