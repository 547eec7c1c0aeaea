//! Self-checks run by `mzi-bound verify`: unitarity of the block
//! construction, agreement between the trace engine and the closed forms,
//! saturation of the bound by coherent light in one arm, and the randomized
//! domination check.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bound::{classical_bound, verify_bound_with, BoundReport, TrialKind, VerifyConfig};
use crate::coincidence::{
    coherent_pair_rate, coherent_vacuum_analytic, coincidence_trace, CoincidencePattern, Injection, PhaseGrid,
};
use crate::detector::ideal_detector;
use crate::error::Result;
use crate::fock::{apply, beam_splitter, full_mzi, half_mzi};
use crate::states::{coherent_product_auto, fock_pair, ClassicalMixture, CoherentAmplitude};
use crate::visibility::{analyze_visibility, VisibilityMethod};

pub const UNITARITY_TOLERANCE: f64 = 1e-12;
pub const ORACLE_TOLERANCE: f64 = 1e-9;
pub const SINGLE_PHOTON_TOLERANCE: f64 = 1e-10;
pub const SATURATION_TOLERANCE: f64 = 1e-6;

/// Outcome of one named check. `worst` is the largest deviation seen and
/// `tolerance` the largest allowed.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub worst: f64,
    pub tolerance: f64,
    pub cases: usize,
    pub detail: String,
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        self.worst <= self.tolerance
    }
}

/// Largest unitarity defect of the beam splitter and both interferometer
/// configurations for every cutoff up to `max_cutoff`, at eight phases.
pub fn unitarity_suite(max_cutoff: usize) -> CheckOutcome {
    let mut worst: f64 = beam_splitter(max_cutoff).unitarity_defect();
    let mut cases = 1;
    for i in 0..8 {
        let phi = -PI + 0.8 * i as f64;
        worst = worst.max(full_mzi(phi, max_cutoff).unitarity_defect());
        worst = worst.max(half_mzi(phi, max_cutoff).unitarity_defect());
        cases += 2;
    }
    CheckOutcome {
        name: "unitarity",
        worst,
        tolerance: UNITARITY_TOLERANCE,
        cases,
        detail: format!("max |U^dag U - I| up to S = {max_cutoff}"),
    }
}

/// `|1,0>` through the full interferometer against `sin^2(phi/2)` and
/// `cos^2(phi/2)` on a 64-point grid.
pub fn single_photon_suite() -> Result<CheckOutcome> {
    let input = fock_pair(1, 0);
    let mut worst: f64 = 0.0;
    for &phi in PhaseGrid::uniform(64).phases() {
        let out = apply(&full_mzi(phi, 1), &input)?;
        worst = worst.max((out.amplitude(1, 0).norm_sqr() - (phi / 2.0).sin().powi(2)).abs());
        worst = worst.max((out.amplitude(0, 1).norm_sqr() - (phi / 2.0).cos().powi(2)).abs());
    }
    Ok(CheckOutcome {
        name: "single-photon",
        worst,
        tolerance: SINGLE_PHOTON_TOLERANCE,
        cases: 64,
        detail: "full interferometer port probabilities".into(),
    })
}

/// Trace engine against the closed forms on `configs` random coherent
/// inputs. Odd configurations leave the second input empty and are compared
/// with the one-arm formula; even ones use the coherent-pair formula with a
/// random injection point.
pub fn oracle_suite(configs: usize, n_max: usize, seed: u64) -> Result<CheckOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let patterns = CoincidencePattern::all_up_to(n_max.max(1));
    let mut worst: f64 = 0.0;
    let mut worst_case = String::new();
    for i in 0..configs {
        let alpha = CoherentAmplitude::new(rng.random_range(-1.5..1.5), rng.random_range(-1.5..1.5));
        let phi = rng.random_range(-PI..PI);
        let pattern = patterns[rng.random_range(0..patterns.len())];
        let (beta, injection, expected) = if i % 2 == 1 {
            let beta = CoherentAmplitude::real(0.0);
            (beta, Injection::Full, coherent_vacuum_analytic(alpha, phi, pattern))
        } else {
            let beta = CoherentAmplitude::new(rng.random_range(-1.5..1.5), rng.random_range(-1.5..1.5));
            let injection = if rng.random_bool(0.5) { Injection::Full } else { Injection::Half };
            (beta, injection, coherent_pair_rate(alpha, beta, injection, phi, pattern))
        };
        let state = coherent_product_auto(alpha, beta);
        let d = ideal_detector(state.cutoff());
        let got = coincidence_trace(&state, injection, phi, pattern, &d, &d)?;
        let err = (got - expected).abs();
        if err > worst {
            worst = err;
            worst_case = format!(
                "alpha={}{:+}i beta={}{:+}i {injection} phi={phi:.6} {pattern}",
                alpha.0.re, alpha.0.im, beta.0.re, beta.0.im
            );
        }
    }
    Ok(CheckOutcome {
        name: "oracle-equivalence",
        worst,
        tolerance: ORACLE_TOLERANCE,
        cases: configs,
        detail: if worst_case.is_empty() { "trace vs closed forms".into() } else { format!("worst at {worst_case}") },
    })
}

/// `|alpha>|0>` must reach the bound exactly for every pattern; the check
/// reports the largest `|visibility / bound - 1|`.
pub fn saturation_suite(n_max: usize, points: usize) -> Result<CheckOutcome> {
    let grid = PhaseGrid::uniform(points.max(2 * n_max + 2));
    let mix = ClassicalMixture::single(CoherentAmplitude::real(1.0), CoherentAmplitude::real(0.0));
    let mut worst: f64 = 0.0;
    let patterns = CoincidencePattern::all_up_to(n_max);
    for &pattern in &patterns {
        let scan = crate::coincidence::mixture_scan(&mix, &grid, pattern);
        let (_, v) = analyze_visibility(&scan, pattern.total(), VisibilityMethod::DirectFit)?;
        let gamma = classical_bound(pattern.m, pattern.n)?.to_f64();
        worst = worst.max((v.value / gamma - 1.0).abs());
    }
    Ok(CheckOutcome {
        name: "saturation",
        worst,
        tolerance: SATURATION_TOLERANCE,
        cases: patterns.len(),
        detail: "|alpha>|0> visibility / bound - 1".into(),
    })
}

#[derive(Clone, Debug)]
pub struct BatteryReport {
    pub checks: Vec<CheckOutcome>,
    pub bound: BoundReport,
}

impl BatteryReport {
    pub fn passed(&self) -> bool {
        self.bound.passed() && self.checks.iter().all(CheckOutcome::passed)
    }

    /// The domination check expressed as a [`CheckOutcome`].
    pub fn domination(&self) -> CheckOutcome {
        let worst = [TrialKind::CoherentPair, TrialKind::Mixture]
            .iter()
            .map(|&k| self.bound.max_ratio_for(k))
            .fold(0.0, f64::max);
        CheckOutcome {
            name: "classical-domination",
            worst: worst - 1.0,
            tolerance: crate::bound::BOUND_TOLERANCE,
            cases: self.bound.evaluations,
            detail: format!("{} violations, {} skipped", self.bound.violations.len(), self.bound.skipped),
        }
    }
}

/// Runs every suite. The oracle suite uses 100 configurations drawn from
/// `seed`; the domination check uses `cfg` as given.
pub fn run_battery(cfg: VerifyConfig) -> Result<BatteryReport> {
    let checks = vec![
        unitarity_suite(40),
        single_photon_suite()?,
        oracle_suite(100, cfg.n_max, cfg.seed)?,
        saturation_suite(cfg.n_max, cfg.grid_points)?,
    ];
    let bound = verify_bound_with(cfg)?;
    Ok(BatteryReport { checks, bound })
}
