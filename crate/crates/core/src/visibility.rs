//! Fourier analysis of coincidence scans.
//!
//! A scan is fitted to `C(phi) = sum_k A_k cos(k phi - delta_k)` truncated at
//! `k_max`. The fit is linear least squares in the basis
//! `{1, cos k phi, sin k phi}`; amplitudes and phases are recovered from the
//! cosine/sine pair afterwards. The N-fold visibility is `A_N / A_0`.

use std::f64::consts::TAU;
use std::fmt;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coincidence::{CoincidencePattern, CoincidenceScan};
use crate::error::{Error, Result};

/// Default number of bootstrap resamples.
pub const DEFAULT_RESAMPLES: usize = 1000;

/// Relative singular-value floor below which the design is rank deficient.
const RANK_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct FourierSeries {
    pattern: CoincidencePattern,
    /// Cosine coefficients, `cos[0]` is the constant term.
    cos: Vec<f64>,
    /// Sine coefficients, `sin[0]` is always 0.
    sin: Vec<f64>,
    residual: f64,
    /// Covariance of `[c0, c1, s1, c2, s2, ...]` when per-point errors were
    /// available.
    covariance: Option<DMatrix<f64>>,
}

impl FourierSeries {
    /// Builds a series from amplitudes and phases, e.g. when reading a
    /// report back.
    pub fn from_amplitudes(
        pattern: CoincidencePattern,
        amplitudes: &[f64],
        phases: &[f64],
        residual: f64,
    ) -> Result<Self> {
        if amplitudes.len() != phases.len() || amplitudes.len() < 2 {
            return Err(Error::Input("need matching amplitude and phase lists with k_max >= 1".into()));
        }
        let cos = amplitudes.iter().zip(phases).map(|(a, d)| a * d.cos()).collect();
        let mut sin: Vec<f64> = amplitudes.iter().zip(phases).map(|(a, d)| a * d.sin()).collect();
        sin[0] = 0.0;
        Ok(Self { pattern, cos, sin, residual, covariance: None })
    }

    pub fn pattern(&self) -> CoincidencePattern {
        self.pattern
    }

    pub fn k_max(&self) -> usize {
        self.cos.len() - 1
    }

    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn cos_coefficient(&self, k: usize) -> f64 {
        self.cos[k]
    }

    pub fn sin_coefficient(&self, k: usize) -> f64 {
        self.sin[k]
    }

    /// `A_k >= 0`.
    pub fn amplitude(&self, k: usize) -> f64 {
        if k == 0 {
            self.cos[0].abs()
        } else {
            self.cos[k].hypot(self.sin[k])
        }
    }

    /// `delta_k` in `[0, 2 pi)`; 0 when `A_k < 1e-12` and for `k = 0`.
    pub fn phase(&self, k: usize) -> f64 {
        if k == 0 || self.amplitude(k) < 1e-12 {
            return 0.0;
        }
        let d = self.sin[k].atan2(self.cos[k]).rem_euclid(TAU);
        if d >= TAU {
            0.0
        } else {
            d
        }
    }

    pub fn amplitudes(&self) -> Vec<f64> {
        (0..=self.k_max()).map(|k| self.amplitude(k)).collect()
    }

    pub fn phases(&self) -> Vec<f64> {
        (0..=self.k_max()).map(|k| self.phase(k)).collect()
    }

    /// Index of the largest non-constant amplitude.
    pub fn dominant_index(&self) -> usize {
        (1..=self.k_max()).max_by(|&a, &b| self.amplitude(a).total_cmp(&self.amplitude(b))).unwrap_or(0)
    }

    pub fn evaluate(&self, phi: f64) -> f64 {
        (0..=self.k_max())
            .map(|k| {
                let x = k as f64 * phi;
                self.cos[k] * x.cos() + self.sin[k] * x.sin()
            })
            .sum()
    }

    /// Variance of `(c_k, s_k)` and their covariance with `c_0`, if known.
    fn moments(&self, k: usize) -> Option<[[f64; 3]; 3]> {
        let cov = self.covariance.as_ref()?;
        let idx = [0, 2 * k - 1, 2 * k];
        let mut out = [[0.0; 3]; 3];
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                out[a][b] = cov[(i, j)];
            }
        }
        Some(out)
    }
}

fn design_matrix(phases: &[f64], k_max: usize) -> DMatrix<f64> {
    DMatrix::from_fn(phases.len(), 2 * k_max + 1, |row, col| {
        if col == 0 {
            return 1.0;
        }
        let k = (col + 1) / 2;
        let x = k as f64 * phases[row];
        if col % 2 == 1 {
            x.cos()
        } else {
            x.sin()
        }
    })
}

/// Unweighted linear least-squares fit of the truncated Fourier series.
///
/// Needs at least `2 k_max + 2` points. When per-point standard errors are
/// present their covariance is propagated through the fit.
pub fn fit_fourier(scan: &CoincidenceScan, k_max: usize) -> Result<FourierSeries> {
    if k_max == 0 {
        return Err(Error::Input("k_max must be at least 1".into()));
    }
    let points = scan.len();
    if points < 2 * k_max + 2 {
        return Err(Error::Identifiability(format!(
            "{points} points cannot determine a series truncated at k = {k_max} (need {})",
            2 * k_max + 2
        )));
    }
    let x = design_matrix(scan.phases(), k_max);
    let y = DVector::from_column_slice(scan.values());
    let svd = x.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if !(smin > RANK_TOLERANCE * smax) {
        return Err(Error::Identifiability(format!(
            "design matrix is rank deficient (singular values {smin:e} / {smax:e})"
        )));
    }
    let u = svd.u.as_ref().expect("requested U");
    let v_t = svd.v_t.as_ref().expect("requested V^T");
    let inv_s = DMatrix::from_diagonal(&svd.singular_values.map(|s| 1.0 / s));
    // pseudo-inverse, (2k+1) x M
    let pinv = v_t.transpose() * inv_s * u.transpose();
    let beta = &pinv * &y;
    let fitted = &x * &beta;
    let residual = ((&y - fitted).norm_squared() / points as f64).sqrt();

    let covariance = scan.errors().map(|errs| {
        let var = DVector::from_iterator(points, errs.iter().map(|e| e * e));
        let weighted = DMatrix::from_fn(pinv.nrows(), points, |r, c| pinv[(r, c)] * var[c]);
        weighted * pinv.transpose()
    });

    let mut cos = vec![beta[0]];
    let mut sin = vec![0.0];
    for k in 1..=k_max {
        cos.push(beta[2 * k - 1]);
        sin.push(beta[2 * k]);
    }
    Ok(FourierSeries { pattern: scan.pattern(), cos, sin, residual, covariance })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VisibilityMethod {
    DirectFit,
    ShiftSuperimpose,
}

impl fmt::Display for VisibilityMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VisibilityMethod::DirectFit => "direct-fit",
            VisibilityMethod::ShiftSuperimpose => "shift-superimpose",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VisibilityEstimate {
    pub pattern: CoincidencePattern,
    /// `|A_N / A_0|`
    pub value: f64,
    /// One standard deviation.
    pub uncertainty: f64,
    pub method: VisibilityMethod,
}

/// `A_N / A_0` with first-order error propagation when the series carries a
/// covariance.
pub fn n_fold_visibility(series: &FourierSeries, n: usize) -> Result<VisibilityEstimate> {
    if n == 0 || n > series.k_max() {
        return Err(Error::Input(format!("N = {n} must lie in 1..={} (the fitted truncation)", series.k_max())));
    }
    let a0 = series.cos[0];
    if !(a0 > 0.0) {
        return Err(Error::UndefinedVisibility(format!("mean coincidence rate A_0 = {a0} is not positive")));
    }
    let (c, s) = (series.cos[n], series.sin[n]);
    let an = c.hypot(s);
    let value = an / a0;
    let uncertainty = match series.moments(n) {
        None => 0.0,
        Some(cov) => {
            // gradient w.r.t. (c0, cN, sN)
            let g = if an > 0.0 { [-an / (a0 * a0), c / (an * a0), s / (an * a0)] } else { [0.0, 1.0 / a0, 1.0 / a0] };
            let var: f64 = (0..3).flat_map(|i| (0..3).map(move |j| (i, j))).map(|(i, j)| g[i] * cov[i][j] * g[j]).sum();
            var.max(0.0).sqrt()
        }
    };
    Ok(VisibilityEstimate { pattern: series.pattern, value, uncertainty, method: VisibilityMethod::DirectFit })
}

/// Averages `n` copies of a uniform scan shifted by `2 pi j / n`. Every
/// Fourier component whose index is not a multiple of `n` cancels exactly;
/// multiples of `n` are untouched.
pub fn shift_superimpose(scan: &CoincidenceScan, n: usize) -> Result<CoincidenceScan> {
    if n == 0 {
        return Err(Error::Input("shift count must be positive".into()));
    }
    let points = scan.len();
    if !scan.grid().is_uniform() {
        return Err(Error::Grid("shift-and-superimpose needs a uniform grid over [0, 2 pi)".into()));
    }
    if points % n != 0 {
        return Err(Error::Grid(format!("{points} grid points are not divisible by {n}")));
    }
    let stride = points / n;
    let source = |i: usize, j: usize| (i + j * stride) % points;
    let values = (0..points).map(|i| (0..n).map(|j| scan.values()[source(i, j)]).sum::<f64>() / n as f64).collect();
    let out = CoincidenceScan::new(scan.grid().clone(), values, scan.pattern(), scan.provenance())?;
    match (scan.shots(), scan.errors()) {
        (Some(shots), Some(errors)) => {
            let shots = (0..points).map(|i| (0..n).map(|j| shots[source(i, j)]).sum()).collect();
            let errors = (0..points)
                .map(|i| (0..n).map(|j| errors[source(i, j)].powi(2)).sum::<f64>().sqrt() / n as f64)
                .collect();
            out.with_shots_and_errors(shots, errors)
        }
        _ => Ok(out),
    }
}

/// Fits at `k_max = n` and returns the N-fold visibility, optionally after
/// shift-and-superimpose.
pub fn analyze_visibility(
    scan: &CoincidenceScan,
    n: usize,
    method: VisibilityMethod,
) -> Result<(FourierSeries, VisibilityEstimate)> {
    let prepared = match method {
        VisibilityMethod::DirectFit => scan.clone(),
        VisibilityMethod::ShiftSuperimpose => shift_superimpose(scan, n)?,
    };
    let series = fit_fourier(&prepared, n)?;
    let mut estimate = n_fold_visibility(&series, n)?;
    estimate.method = method;
    Ok((series, estimate))
}

/// Parametric Poisson bootstrap of the direct-fit N-fold visibility.
pub fn bootstrap_uncertainty(
    scan: &CoincidenceScan,
    n: usize,
    resamples: usize,
    seed: u64,
) -> Result<VisibilityEstimate> {
    bootstrap_visibility(scan, n, resamples, seed, VisibilityMethod::DirectFit)
}

/// Each resample redraws every point's count from a Poisson law with the
/// observed count as mean, then reruns the same analysis. Resample `r` uses
/// ChaCha8 stream `r` of `seed`, so the result does not depend on thread
/// scheduling. The reported value is the visibility of the original scan and
/// the uncertainty is the sample standard deviation across resamples.
pub fn bootstrap_visibility(
    scan: &CoincidenceScan,
    n: usize,
    resamples: usize,
    seed: u64,
    method: VisibilityMethod,
) -> Result<VisibilityEstimate> {
    let shots = scan.shots().ok_or_else(|| Error::Input("bootstrap needs per-point shot counts".into()))?;
    if resamples < 2 {
        return Err(Error::Input("bootstrap needs at least two resamples".into()));
    }
    let (_, base) = analyze_visibility(scan, n, method)?;
    let counts: Vec<f64> = scan.values().iter().zip(shots).map(|(&rate, &s)| (rate * s as f64).round()).collect();
    let plain = CoincidenceScan::new(scan.grid().clone(), scan.values().to_vec(), scan.pattern(), scan.provenance())?;

    let draws = (0..resamples)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(r as u64);
            let values = counts
                .iter()
                .zip(shots)
                .map(|(&mean, &s)| {
                    let c = if mean > 0.0 { Poisson::new(mean).expect("positive mean").sample(&mut rng) } else { 0.0 };
                    c / s as f64
                })
                .collect();
            let resampled = CoincidenceScan::new(plain.grid().clone(), values, plain.pattern(), plain.provenance())?;
            Ok(analyze_visibility(&resampled, n, method)?.1.value)
        })
        .collect::<Result<Vec<f64>>>()?;

    let mean = draws.iter().sum::<f64>() / resamples as f64;
    let var = draws.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (resamples - 1) as f64;
    Ok(VisibilityEstimate { uncertainty: var.sqrt(), ..base })
}
