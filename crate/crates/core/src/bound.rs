//! The classical N-fold visibility bound
//!
//! ```text
//! Gamma(m, n) = 2 / | sum_{r=0}^{2n} (-1)^r C(2n, r) C(2m, n + m - r) |
//! ```
//!
//! evaluated in exact integer arithmetic, plus the decision rule that
//! compares a measured visibility with it and a randomized numerical check
//! that classical light never beats it.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coincidence::{mixture_scan, CoincidencePattern, PhaseGrid};
use crate::error::{Error, Result};
use crate::states::{random_classical_mixture, ClassicalMixture, CoherentAmplitude};
use crate::visibility::{analyze_visibility, VisibilityEstimate, VisibilityMethod};

/// Default decision threshold in standard deviations.
pub const DEFAULT_SIGMA_THRESHOLD: f64 = 3.0;

/// Absolute slack for floating-point comparisons against the bound.
pub const BOUND_TOLERANCE: f64 = 1e-9;

/// `C(a, b)`, zero outside `0 <= b <= a`.
pub fn binomial(a: i64, b: i64) -> BigInt {
    if b < 0 || b > a {
        return BigInt::zero();
    }
    let b = b.min(a - b);
    let mut acc = BigInt::one();
    for i in 0..b {
        acc = acc * BigInt::from(a - i) / BigInt::from(i + 1);
    }
    acc
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassicalBoundValue {
    pattern: CoincidencePattern,
    value: BigRational,
}

impl ClassicalBoundValue {
    pub fn pattern(&self) -> CoincidencePattern {
        self.pattern
    }

    /// Reduced rational value.
    pub fn exact(&self) -> &BigRational {
        &self.value
    }

    pub fn numerator(&self) -> &BigInt {
        self.value.numer()
    }

    pub fn denominator(&self) -> &BigInt {
        self.value.denom()
    }

    pub fn to_f64(&self) -> f64 {
        self.value.to_f64().expect("bound lies in (0, 1]")
    }

    pub fn percent(&self) -> f64 {
        (&self.value * BigInt::from(100)).to_f64().expect("finite")
    }

    /// Percentage rounded half away from zero to `decimals` places, computed
    /// on the exact rational.
    pub fn percent_rounded(&self, decimals: u32) -> String {
        let scale = BigInt::from(10).pow(decimals);
        let scaled = (&self.value * BigInt::from(100) * &scale).round().to_integer();
        if decimals == 0 {
            return scaled.to_string();
        }
        let (int, frac) = scaled.div_rem(&scale);
        format!("{int}.{:0>width$}", frac.to_string(), width = decimals as usize)
    }
}

impl fmt::Display for ClassicalBoundValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{} ({}%)", self.numerator(), self.denominator(), self.percent())
    }
}

/// The exact bound for `m` clicks at D1 and `n` at D2.
pub fn classical_bound(m: usize, n: usize) -> Result<ClassicalBoundValue> {
    let pattern = CoincidencePattern::new(m, n);
    pattern.require_photons()?;
    let (m, n) = (m as i64, n as i64);
    let mut sum = BigInt::zero();
    for r in 0..=2 * n {
        let term = binomial(2 * n, r) * binomial(2 * m, n + m - r);
        if r % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    if sum.is_zero() {
        return Err(Error::Arithmetic(format!("bound denominator vanishes for {pattern}")));
    }
    let value = BigRational::new(BigInt::from(2), sum.abs());
    Ok(ClassicalBoundValue { pattern, value })
}

/// Every pattern with `1 <= m + n <= n_max` and `m >= n`, ordered by `N`
/// then by `m` ascending (the bound is symmetric in `m, n`).
pub fn bound_table(n_max: usize) -> Result<Vec<ClassicalBoundValue>> {
    let mut out = Vec::new();
    for total in 1..=n_max {
        for m in total.div_ceil(2)..=total {
            out.push(classical_bound(m, total - m)?);
        }
    }
    Ok(out)
}

/// Bound for `m, n = ceil(N/2), floor(N/2)` and for `m, n = N, 0`.
pub fn balanced_and_lopsided(total: usize) -> Result<(ClassicalBoundValue, ClassicalBoundValue)> {
    Ok((classical_bound(total.div_ceil(2), total / 2)?, classical_bound(total, 0)?))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerdictLabel {
    ClassicalConsistent,
    NonclassicalViolation,
    Inconclusive,
}

impl fmt::Display for VerdictLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VerdictLabel::ClassicalConsistent => "classical-consistent",
            VerdictLabel::NonclassicalViolation => "nonclassical-violation",
            VerdictLabel::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Verdict {
    pub pattern: CoincidencePattern,
    pub visibility: f64,
    pub sigma: f64,
    pub bound: ClassicalBoundValue,
    /// `(visibility - bound) / sigma`, only when `sigma > 0`.
    pub margin: Option<f64>,
    pub threshold: f64,
    pub label: VerdictLabel,
}

/// [`classify_with_threshold`] at 3 sigma.
pub fn classify(v: &VisibilityEstimate) -> Result<Verdict> {
    classify_with_threshold(v, DEFAULT_SIGMA_THRESHOLD)
}

/// Compares a visibility with the bound of its pattern:
///
/// * `nonclassical-violation` when `value - k sigma` exceeds the bound,
/// * `inconclusive` when the estimate is not finite or `k sigma` alone is
///   larger than the bound, so the error bar cannot separate classical from
///   nonclassical light,
/// * `classical-consistent` otherwise.
pub fn classify_with_threshold(v: &VisibilityEstimate, k: f64) -> Result<Verdict> {
    if !(v.value >= 0.0) {
        return Err(Error::Input(format!("visibility {} must be nonnegative", v.value)));
    }
    if !(k >= 0.0) {
        return Err(Error::Parameter(format!("sigma threshold {k} must be nonnegative")));
    }
    let bound = classical_bound(v.pattern.m, v.pattern.n)?;
    let gamma = bound.to_f64();
    let sigma = v.uncertainty;
    let margin = (sigma > 0.0).then(|| (v.value - gamma) / sigma);
    let label = if !v.value.is_finite() || !sigma.is_finite() {
        VerdictLabel::Inconclusive
    } else if v.value - k * sigma > gamma + BOUND_TOLERANCE {
        VerdictLabel::NonclassicalViolation
    } else if k * sigma > gamma {
        VerdictLabel::Inconclusive
    } else {
        VerdictLabel::ClassicalConsistent
    };
    Ok(Verdict { pattern: v.pattern, visibility: v.value, sigma, bound, margin, threshold: k, label })
}

/// Settings of the randomized domination check.
#[derive(Clone, Copy, Debug)]
pub struct VerifyConfig {
    pub trials: usize,
    pub n_max: usize,
    pub seed: u64,
    pub grid_points: usize,
    pub max_amplitude: f64,
    pub max_components: usize,
}

impl VerifyConfig {
    pub fn new(trials: usize, n_max: usize, seed: u64) -> Self {
        Self { trials, n_max, seed, grid_points: 64, max_amplitude: 1.5, max_components: 8 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TrialKind {
    /// `|alpha>|0>`, which attains the bound.
    CoherentVacuum,
    CoherentPair,
    Mixture,
}

impl fmt::Display for TrialKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TrialKind::CoherentVacuum => "coherent-vacuum",
            TrialKind::CoherentPair => "coherent-pair",
            TrialKind::Mixture => "mixture",
        })
    }
}

#[derive(Clone, Debug)]
pub struct Counterexample {
    pub kind: TrialKind,
    pub trial: usize,
    pub pattern: CoincidencePattern,
    pub ratio: f64,
    pub mixture: ClassicalMixture,
}

#[derive(Clone, Debug, Default)]
pub struct BoundReport {
    /// Largest `visibility / bound` seen per input kind and pattern.
    pub max_ratio: BTreeMap<(TrialKind, CoincidencePattern), f64>,
    pub violations: Vec<Counterexample>,
    pub evaluations: usize,
    /// Trials whose scan had a vanishing mean (e.g. both amplitudes 0).
    pub skipped: usize,
}

impl BoundReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn max_ratio_for(&self, kind: TrialKind) -> f64 {
        self.max_ratio.iter().filter(|((k, _), _)| *k == kind).map(|(_, &r)| r).fold(0.0, f64::max)
    }

    fn record(&mut self, kind: TrialKind, pattern: CoincidencePattern, ratio: f64) {
        let slot = self.max_ratio.entry((kind, pattern)).or_insert(0.0);
        *slot = slot.max(ratio);
        self.evaluations += 1;
    }

    fn merge(mut self, other: BoundReport) -> BoundReport {
        for (key, r) in other.max_ratio {
            let slot = self.max_ratio.entry(key).or_insert(0.0);
            *slot = slot.max(r);
        }
        self.violations.extend(other.violations);
        self.evaluations += other.evaluations;
        self.skipped += other.skipped;
        self
    }
}

fn check_mixture(
    report: &mut BoundReport,
    kind: TrialKind,
    trial: usize,
    mix: &ClassicalMixture,
    grid: &PhaseGrid,
    bounds: &[(CoincidencePattern, f64)],
) -> Result<()> {
    for &(pattern, gamma) in bounds {
        let scan = mixture_scan(mix, grid, pattern);
        let ratio = match analyze_visibility(&scan, pattern.total(), VisibilityMethod::DirectFit) {
            Ok((_, v)) => v.value / gamma,
            Err(Error::UndefinedVisibility(_)) => {
                report.skipped += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        report.record(kind, pattern, ratio);
        if ratio > 1.0 + BOUND_TOLERANCE {
            report.violations.push(Counterexample { kind, trial, pattern, ratio, mixture: mix.clone() });
        }
    }
    Ok(())
}

/// Draws random classical inputs and checks that no pattern with
/// `N <= n_max` exceeds the bound. Every trial checks one random coherent
/// pair and one random mixture of 1..=`max_components` coherent pairs; the
/// saturating input `|1>|0>` is checked once. Trial `t` uses ChaCha8 stream
/// `t` of `seed`.
pub fn verify_bound_random(trials: usize, n_max: usize, seed: u64) -> Result<BoundReport> {
    verify_bound_with(VerifyConfig::new(trials, n_max, seed))
}

pub fn verify_bound_with(cfg: VerifyConfig) -> Result<BoundReport> {
    if cfg.trials == 0 || cfg.n_max == 0 {
        return Err(Error::Parameter("trials and n_max must be positive".into()));
    }
    let grid = PhaseGrid::uniform(cfg.grid_points.max(2 * cfg.n_max + 2));
    let bounds = CoincidencePattern::all_up_to(cfg.n_max)
        .into_iter()
        .map(|p| Ok((p, classical_bound(p.m, p.n)?.to_f64())))
        .collect::<Result<Vec<_>>>()?;

    let mut report = BoundReport::default();
    let saturating = ClassicalMixture::single(CoherentAmplitude::real(1.0), CoherentAmplitude::real(0.0));
    check_mixture(&mut report, TrialKind::CoherentVacuum, 0, &saturating, &grid, &bounds)?;

    let partial = (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(t as u64);
            let mut local = BoundReport::default();
            let pair = random_classical_mixture(1, cfg.max_amplitude, rng.random())?;
            check_mixture(&mut local, TrialKind::CoherentPair, t, &pair, &grid, &bounds)?;
            let k = rng.random_range(1..=cfg.max_components);
            let mix = random_classical_mixture(k, cfg.max_amplitude, rng.random())?;
            check_mixture(&mut local, TrialKind::Mixture, t, &mix, &grid, &bounds)?;
            Ok(local)
        })
        .collect::<Result<Vec<_>>>()?;
    report = partial.into_iter().fold(report, BoundReport::merge);
    report.violations.sort_by_key(|c| (c.kind, c.trial, c.pattern));
    Ok(report)
}
