//! Coincidence rates `C_{m,n}(phi)`: the general Fock-space trace engine,
//! closed forms for coherent inputs, and scans over phase grids.

use std::borrow::Cow;
use std::f64::consts::TAU;
use std::fmt;

use nalgebra::Vector2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::detector::{joint_response, DetectorModel, OutcomeDistribution};
use crate::error::{Error, Result};
use crate::fock::{self, BlockUnitary};
use crate::states::{coherent_product_auto, ClassicalMixture, CoherentAmplitude, TwoModeState};

/// `m` clicks at D1 (first output) and `n` clicks at D2 (second output).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CoincidencePattern {
    pub m: usize,
    pub n: usize,
}

impl CoincidencePattern {
    pub fn new(m: usize, n: usize) -> Self {
        Self { m, n }
    }

    /// Total photon number `N = m + n`.
    pub fn total(&self) -> usize {
        self.m + self.n
    }

    /// Rejects the (0,0) pattern, which has no N-fold oscillation.
    pub fn require_photons(&self) -> Result<()> {
        if self.total() == 0 {
            return Err(Error::DegenerateInput("pattern (0,0) has no N-fold component".into()));
        }
        Ok(())
    }

    /// Every pattern with `1 <= m + n <= n_max`, ordered by `N` then by `m`
    /// descending.
    pub fn all_up_to(n_max: usize) -> Vec<CoincidencePattern> {
        (1..=n_max).flat_map(|total| (0..=total).rev().map(move |m| CoincidencePattern::new(m, total - m))).collect()
    }
}

impl fmt::Display for CoincidencePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.m, self.n)
    }
}

/// Where the input state enters the interferometer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Injection {
    /// Before the first beam splitter.
    Full,
    /// Between the beam splitters, directly into the two arms.
    Half,
}

impl Injection {
    pub fn single_photon_matrix(&self, phi: f64) -> nalgebra::Matrix2<num_complex::Complex64> {
        match self {
            Injection::Full => fock::mzi_matrix(phi),
            Injection::Half => fock::half_mzi_matrix(phi),
        }
    }

    /// The interferometer unitary; the same operator as
    /// [`fock::full_mzi`] / [`fock::half_mzi`], built in `O(S^2)` per block.
    pub fn unitary(&self, phi: f64, cutoff: usize) -> BlockUnitary {
        BlockUnitary::from_single_photon(&self.single_photon_matrix(phi), cutoff)
    }
}

impl fmt::Display for Injection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Injection::Full => "full",
            Injection::Half => "half",
        })
    }
}

/// Strictly increasing phases in radians.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseGrid {
    phases: Vec<f64>,
    uniform: bool,
}

impl PhaseGrid {
    /// `points` equally spaced phases covering `[0, 2 pi)`.
    pub fn uniform(points: usize) -> Self {
        let phases = (0..points).map(|i| TAU * i as f64 / points as f64).collect();
        Self { phases, uniform: points > 0 }
    }

    /// Arbitrary grid. The uniform flag is set when the phases match
    /// [`PhaseGrid::uniform`] to within `1e-12`.
    pub fn from_phases(phases: Vec<f64>) -> Result<Self> {
        if let Some(bad) = phases.iter().find(|p| !p.is_finite()) {
            return Err(Error::Grid(format!("phase {bad} is not finite")));
        }
        if let Some(w) = phases.windows(2).find(|w| !(w[1] > w[0])) {
            return Err(Error::Grid(format!("phases not strictly increasing at {} -> {}", w[0], w[1])));
        }
        let m = phases.len();
        let uniform = m > 0 && phases.iter().enumerate().all(|(i, &p)| (p - TAU * i as f64 / m as f64).abs() <= 1e-12);
        Ok(Self { phases, uniform })
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn len(&self) -> usize {
        self.phases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phases.is_empty()
    }

    pub fn is_uniform(&self) -> bool {
        self.uniform
    }

    /// `(first, last)` phase, if any.
    pub fn span(&self) -> Option<(f64, f64)> {
        Some((*self.phases.first()?, *self.phases.last()?))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Analytic,
    Trace,
    MonteCarlo,
    Ingested,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::Analytic => "analytic",
            Provenance::Trace => "trace",
            Provenance::MonteCarlo => "montecarlo",
            Provenance::Ingested => "ingested",
        })
    }
}

impl std::str::FromStr for Provenance {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "analytic" => Ok(Provenance::Analytic),
            "trace" => Ok(Provenance::Trace),
            "montecarlo" => Ok(Provenance::MonteCarlo),
            "ingested" => Ok(Provenance::Ingested),
            other => Err(Error::Input(format!("unknown provenance '{other}'"))),
        }
    }
}

/// Sampled coincidence curve. Standard errors are present exactly when shot
/// counts are.
#[derive(Clone, Debug, PartialEq)]
pub struct CoincidenceScan {
    grid: PhaseGrid,
    values: Vec<f64>,
    shots: Option<Vec<u64>>,
    errors: Option<Vec<f64>>,
    pattern: CoincidencePattern,
    provenance: Provenance,
}

/// Binomial standard error of a rate measured over `shots` gates, with the
/// rate clamped away from 0 and 1 so that empty bins still carry an error.
pub fn rate_standard_error(rate: f64, shots: u64) -> f64 {
    let n = shots as f64;
    let lo = 0.5 / n;
    let p = rate.clamp(lo, 1.0 - lo);
    (p * (1.0 - p) / n).sqrt()
}

impl CoincidenceScan {
    pub fn new(grid: PhaseGrid, values: Vec<f64>, pattern: CoincidencePattern, provenance: Provenance) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Dimension(format!("{} values for a grid of {} phases", values.len(), grid.len())));
        }
        if let Some(v) = values.iter().find(|v| !(**v >= 0.0) || !v.is_finite()) {
            return Err(Error::Input(format!("coincidence value {v} is not a nonnegative number")));
        }
        Ok(Self { grid, values, shots: None, errors: None, pattern, provenance })
    }

    /// Attaches per-point shot counts; standard errors follow from the rates.
    pub fn with_shots(mut self, shots: Vec<u64>) -> Result<Self> {
        if shots.len() != self.values.len() {
            return Err(Error::Dimension("shot counts do not match the grid".into()));
        }
        if shots.contains(&0) {
            return Err(Error::Input("shot counts must be positive".into()));
        }
        let errors = self.values.iter().zip(&shots).map(|(&v, &s)| rate_standard_error(v, s)).collect();
        self.shots = Some(shots);
        self.errors = Some(errors);
        Ok(self)
    }

    /// Like [`with_shots`](Self::with_shots) but with explicit errors.
    pub fn with_shots_and_errors(mut self, shots: Vec<u64>, errors: Vec<f64>) -> Result<Self> {
        if shots.len() != self.values.len() || errors.len() != self.values.len() {
            return Err(Error::Dimension("shot counts or errors do not match the grid".into()));
        }
        if errors.iter().any(|e| !(*e >= 0.0)) {
            return Err(Error::Input("standard errors must be nonnegative".into()));
        }
        self.shots = Some(shots);
        self.errors = Some(errors);
        Ok(self)
    }

    pub fn grid(&self) -> &PhaseGrid {
        &self.grid
    }

    pub fn phases(&self) -> &[f64] {
        self.grid.phases()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn shots(&self) -> Option<&[u64]> {
        self.shots.as_deref()
    }

    pub fn errors(&self) -> Option<&[f64]> {
        self.errors.as_deref()
    }

    pub fn pattern(&self) -> CoincidencePattern {
        self.pattern
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Multiplies every value (and error) by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= factor);
        if let Some(e) = out.errors.as_mut() {
            e.iter_mut().for_each(|v| *v *= factor);
        }
        out
    }
}

/// Ideal photon-number distribution at the two outputs.
pub fn ideal_outcomes(state: &TwoModeState, injection: Injection, phi: f64) -> Result<OutcomeDistribution> {
    let u = injection.unitary(phi, state.cutoff());
    let out = fock::apply(&u, state)?;
    OutcomeDistribution::new(out.number_distribution(), state.truncation_tail())
}

/// `Tr[U rho U^dag (pi_m (x) pi_n)]` for a pure input state.
pub fn coincidence_trace(
    state: &TwoModeState,
    injection: Injection,
    phi: f64,
    pattern: CoincidencePattern,
    d1: &DetectorModel,
    d2: &DetectorModel,
) -> Result<f64> {
    if pattern.total() > state.cutoff() {
        return Err(Error::Dimension(format!(
            "pattern {pattern} needs {} photons but the state is truncated at {}",
            pattern.total(),
            state.cutoff()
        )));
    }
    let s = state.cutoff();
    let d1 = cover(d1, s);
    let d2 = cover(d2, s);
    if pattern.m > d1.n_max() || pattern.n > d2.n_max() {
        return Err(Error::Dimension(format!("pattern {pattern} exceeds the detectors' click range")));
    }
    let p = ideal_outcomes(state, injection, phi)?;
    if d1.is_ideal() && d2.is_ideal() {
        return Ok(p.get(pattern.m, pattern.n));
    }
    joint_response(&d1, &d2, pattern.m, pattern.n, &p)
}

fn cover(d: &DetectorModel, cutoff: usize) -> Cow<'_, DetectorModel> {
    if d.cutoff() >= cutoff {
        Cow::Borrowed(d)
    } else {
        Cow::Owned(d.for_cutoff(cutoff))
    }
}

fn poisson_product(mu: num_complex::Complex64, nu: num_complex::Complex64, pattern: CoincidencePattern) -> f64 {
    let (a, b) = (mu.norm_sqr(), nu.norm_sqr());
    let fact = |k: usize| (1..=k).map(|x| x as f64).product::<f64>();
    (-(a + b)).exp() * a.powi(pattern.m as i32) * b.powi(pattern.n as i32) / (fact(pattern.m) * fact(pattern.n))
}

/// Closed form for `|alpha>|0>` through the full interferometer:
/// `e^{-|a|^2} |a|^{2N} sin^{2m}(phi/2) cos^{2n}(phi/2) / (m! n!)`.
pub fn coherent_vacuum_analytic(alpha: CoherentAmplitude, phi: f64, pattern: CoincidencePattern) -> f64 {
    let mean = alpha.mean_photons();
    let fact = |k: usize| (1..=k).map(|x| x as f64).product::<f64>();
    let (s, c) = ((phi / 2.0).sin(), (phi / 2.0).cos());
    (-mean).exp() / (fact(pattern.m) * fact(pattern.n))
        * mean.powi(pattern.total() as i32)
        * s.powi(2 * pattern.m as i32)
        * c.powi(2 * pattern.n as i32)
}

/// `|alpha>|beta>` through the full interferometer: the outputs are the
/// coherent states `M(phi) (alpha, beta)`, so the rate is a product of two
/// Poisson probabilities.
pub fn coherent_pair_analytic(
    alpha: CoherentAmplitude,
    beta: CoherentAmplitude,
    phi: f64,
    pattern: CoincidencePattern,
) -> f64 {
    coherent_pair_rate(alpha, beta, Injection::Full, phi, pattern)
}

pub fn coherent_pair_rate(
    alpha: CoherentAmplitude,
    beta: CoherentAmplitude,
    injection: Injection,
    phi: f64,
    pattern: CoincidencePattern,
) -> f64 {
    let out = injection.single_photon_matrix(phi) * Vector2::new(alpha.value(), beta.value());
    poisson_product(out[0], out[1], pattern)
}

/// Weight-averaged analytic rates of a classical mixture (full injection,
/// ideal detectors).
pub fn mixture_scan(mix: &ClassicalMixture, grid: &PhaseGrid, pattern: CoincidencePattern) -> CoincidenceScan {
    let values = grid
        .phases()
        .iter()
        .map(|&phi| {
            mix.components().iter().map(|c| c.weight * coherent_pair_analytic(c.alpha, c.beta, phi, pattern)).sum()
        })
        .collect();
    CoincidenceScan::new(grid.clone(), values, pattern, Provenance::Analytic).expect("analytic rates are nonnegative")
}

/// Input to the scan driver.
#[derive(Clone, Debug)]
pub enum Source {
    State(TwoModeState),
    Mixture(ClassicalMixture),
}

impl Source {
    /// Pure states in the ensemble with their weights.
    pub fn ensemble(&self) -> Vec<(f64, TwoModeState)> {
        match self {
            Source::State(s) => vec![(1.0, s.clone())],
            Source::Mixture(mix) => {
                mix.components().iter().map(|c| (c.weight, coherent_product_auto(c.alpha, c.beta))).collect()
            }
        }
    }
}

/// Evaluates the trace engine at every grid point, in parallel. Mixtures are
/// expanded into truncated coherent products (cutoff from
/// [`crate::states::default_cutoff`]) and averaged.
pub fn scan(
    source: &Source,
    injection: Injection,
    grid: &PhaseGrid,
    pattern: CoincidencePattern,
    d1: &DetectorModel,
    d2: &DetectorModel,
) -> Result<CoincidenceScan> {
    let ensemble = source.ensemble();
    let values = grid
        .phases()
        .par_iter()
        .map(|&phi| {
            ensemble.iter().try_fold(0.0, |acc, (w, state)| {
                Ok(acc + w * coincidence_trace(state, injection, phi, pattern, d1, d2)?)
            })
        })
        .collect::<Result<Vec<f64>>>()?;
    CoincidenceScan::new(grid.clone(), values, pattern, Provenance::Trace)
}
