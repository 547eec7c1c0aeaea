//! Finite-shot synthetic data.
//!
//! Each phase point is an independent run of `shots` gates. Point `i` draws
//! from ChaCha8 stream `i` of the configured seed, so output is identical
//! whether points are sampled serially or in parallel.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;

use crate::coincidence::{
    ideal_outcomes, CoincidencePattern, CoincidenceScan, Injection, PhaseGrid, Provenance, Source,
};
use crate::detector::{reported_distribution, DetectorModel};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ShotConfig {
    pub shots: u64,
    pub seed: u64,
}

impl ShotConfig {
    pub fn new(shots: u64, seed: u64) -> Result<Self> {
        if shots == 0 {
            return Err(Error::Parameter("shots per point must be at least 1".into()));
        }
        Ok(Self { shots, seed })
    }
}

fn point_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

fn binomial(rng: &mut ChaCha8Rng, trials: u64, p: f64) -> u64 {
    if trials == 0 || p <= 0.0 {
        return 0;
    }
    if p >= 1.0 {
        return trials;
    }
    Binomial::new(trials, p).expect("p in (0, 1)").sample(rng)
}

/// Draws `Binomial(shots, p)` counts at each point of an ideal scan whose
/// values are per-gate probabilities, and reports rates with their binomial
/// standard errors.
pub fn sample_scan(ideal: &CoincidenceScan, cfg: ShotConfig) -> Result<CoincidenceScan> {
    if cfg.shots == 0 {
        return Err(Error::Parameter("shots per point must be at least 1".into()));
    }
    if let Some(p) = ideal.values().iter().find(|&&p| !(-1e-9..=1.0 + 1e-9).contains(&p)) {
        return Err(Error::Input(format!("value {p} is not a probability")));
    }
    let values = ideal
        .values()
        .par_iter()
        .enumerate()
        .map(|(i, &p)| {
            let mut rng = point_rng(cfg.seed, i);
            binomial(&mut rng, cfg.shots, p.clamp(0.0, 1.0)) as f64 / cfg.shots as f64
        })
        .collect();
    CoincidenceScan::new(ideal.grid().clone(), values, ideal.pattern(), Provenance::MonteCarlo)?
        .with_shots(vec![cfg.shots; ideal.len()])
}

/// Click counts from one phase point: `counts[m][n]` plus gates whose
/// outcome fell outside the tabulated range (truncation mass).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OutcomeCounts {
    pub counts: Vec<Vec<u64>>,
    pub overflow: u64,
}

impl OutcomeCounts {
    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum::<u64>() + self.overflow
    }

    pub fn get(&self, pattern: CoincidencePattern) -> u64 {
        self.counts.get(pattern.m).and_then(|row| row.get(pattern.n)).copied().unwrap_or(0)
    }
}

#[derive(Clone, Debug)]
pub struct FullExperiment {
    /// One scan per requested pattern, in request order.
    pub scans: Vec<CoincidenceScan>,
    /// Raw joint counts per phase point.
    pub counts: Vec<OutcomeCounts>,
}

/// Multinomial draw over `probs` (plus an implicit remainder bucket) by
/// sequential conditional binomials.
fn multinomial(rng: &mut ChaCha8Rng, shots: u64, probs: &[Vec<f64>]) -> OutcomeCounts {
    let mut remaining = shots;
    let mut mass_left = 1.0f64;
    let counts = probs
        .iter()
        .map(|row| {
            row.iter()
                .map(|&p| {
                    if remaining == 0 || p <= 0.0 {
                        return 0;
                    }
                    let cond = if mass_left > 0.0 { (p / mass_left).min(1.0) } else { 1.0 };
                    let c = binomial(rng, remaining, cond);
                    remaining -= c;
                    mass_left -= p;
                    c
                })
                .collect()
        })
        .collect();
    OutcomeCounts { counts, overflow: remaining }
}

/// Simulates a whole acquisition: at every phase point one multinomial draw
/// over all reported `(m, n)` outcomes, then sliced into per-pattern scans.
/// Patterns therefore share the same gates, as in a real experiment.
pub fn sample_full_experiment(
    source: &Source,
    injection: Injection,
    patterns: &[CoincidencePattern],
    grid: &PhaseGrid,
    d1: &DetectorModel,
    d2: &DetectorModel,
    cfg: ShotConfig,
) -> Result<FullExperiment> {
    if cfg.shots == 0 {
        return Err(Error::Parameter("shots per point must be at least 1".into()));
    }
    let ensemble = source.ensemble();
    let cutoff = ensemble.iter().map(|(_, s)| s.cutoff()).max().unwrap_or(0);
    let d1 = d1.for_cutoff(cutoff);
    let d2 = d2.for_cutoff(cutoff);
    if let Some(p) = patterns.iter().find(|p| p.m > d1.n_max() || p.n > d2.n_max()) {
        return Err(Error::Dimension(format!("pattern {p} exceeds the detectors' click range")));
    }

    let counts = grid
        .phases()
        .par_iter()
        .enumerate()
        .map(|(i, &phi)| {
            let mut probs = vec![vec![0.0; d2.n_max() + 1]; d1.n_max() + 1];
            for (w, state) in &ensemble {
                let p = ideal_outcomes(state, injection, phi)?;
                let rep = reported_distribution(&d1, &d2, &p)?;
                for (row, rrow) in probs.iter_mut().zip(&rep) {
                    for (x, r) in row.iter_mut().zip(rrow) {
                        *x += w * r;
                    }
                }
            }
            let mut rng = point_rng(cfg.seed, i);
            Ok(multinomial(&mut rng, cfg.shots, &probs))
        })
        .collect::<Result<Vec<_>>>()?;

    let scans = patterns
        .iter()
        .map(|&pattern| {
            let values = counts.iter().map(|c| c.get(pattern) as f64 / cfg.shots as f64).collect();
            CoincidenceScan::new(grid.clone(), values, pattern, Provenance::MonteCarlo)?
                .with_shots(vec![cfg.shots; grid.len()])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FullExperiment { scans, counts })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detector::{ideal_detector, imperfect_detector};
    use crate::states::noon_state;

    fn flat(p: f64, points: usize) -> CoincidenceScan {
        let grid = PhaseGrid::uniform(points);
        CoincidenceScan::new(grid, vec![p; points], CoincidencePattern::new(1, 1), Provenance::Analytic).unwrap()
    }

    #[test]
    fn zero_probability_gives_zero_counts() {
        let s = sample_scan(&flat(0.0, 8), ShotConfig::new(1000, 1).unwrap()).unwrap();
        assert!(s.values().iter().all(|&v| v == 0.0));
        assert_eq!(s.provenance(), Provenance::MonteCarlo);
        assert!(s.errors().unwrap().iter().all(|&e| e > 0.0));
    }

    #[test]
    fn sampling_is_deterministic() {
        let cfg = ShotConfig::new(500, 77).unwrap();
        let a = sample_scan(&flat(0.3, 16), cfg).unwrap();
        let b = sample_scan(&flat(0.3, 16), cfg).unwrap();
        assert_eq!(a, b);
        let c = sample_scan(&flat(0.3, 16), ShotConfig::new(500, 78).unwrap()).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn rejects_non_probabilities() {
        assert!(matches!(sample_scan(&flat(1.5, 4), ShotConfig { shots: 10, seed: 0 }), Err(Error::Input(_))));
        assert!(ShotConfig::new(0, 0).is_err());
    }

    #[test]
    fn sample_mean_is_consistent() {
        let p = 0.137;
        let shots = 2000;
        let mean: f64 = (0..200)
            .map(|seed| sample_scan(&flat(p, 1), ShotConfig::new(shots, seed).unwrap()).unwrap().values()[0])
            .sum::<f64>()
            / 200.0;
        let sigma = (p * (1.0 - p) / shots as f64).sqrt();
        assert!((mean - p).abs() < 5.0 * sigma / 200f64.sqrt());
    }

    #[test]
    fn multinomial_totals_are_conserved() {
        let src = Source::State(noon_state(3).unwrap());
        let d = imperfect_detector(0.7, 0.05, 0.03, 3, 6).unwrap();
        let grid = PhaseGrid::uniform(12);
        let patterns = CoincidencePattern::all_up_to(3);
        let run =
            sample_full_experiment(&src, Injection::Half, &patterns, &grid, &d, &d, ShotConfig::new(5000, 3).unwrap())
                .unwrap();
        assert_eq!(run.scans.len(), patterns.len());
        for c in &run.counts {
            assert_eq!(c.total(), 5000);
        }
    }

    #[test]
    fn ideal_noon_only_fills_its_photon_number() {
        let src = Source::State(noon_state(2).unwrap());
        let d = ideal_detector(2);
        let grid = PhaseGrid::uniform(8);
        let run = sample_full_experiment(
            &src,
            Injection::Half,
            &[CoincidencePattern::new(1, 1)],
            &grid,
            &d,
            &d,
            ShotConfig::new(1000, 11).unwrap(),
        )
        .unwrap();
        for c in &run.counts {
            for (m, row) in c.counts.iter().enumerate() {
                for (n, &x) in row.iter().enumerate() {
                    if m + n != 2 {
                        assert_eq!(x, 0, "({m},{n})");
                    }
                }
            }
            assert_eq!(c.overflow, 0);
        }
    }
}
