//! Averaging N shifted copies of a scan removes every harmonic that is not a
//! multiple of N and leaves the N-fold one alone.

use mzi_bound::coincidence::{coherent_pair_analytic, CoincidencePattern, CoincidenceScan, PhaseGrid, Provenance};
use mzi_bound::states::CoherentAmplitude;
use mzi_bound::visibility::{fit_fourier, shift_superimpose};

fn main() -> mzi_bound::Result<()> {
    let pattern = CoincidencePattern::new(2, 1);
    let grid = PhaseGrid::uniform(60);
    let (alpha, beta) = (CoherentAmplitude::new(1.0, 0.2), CoherentAmplitude::real(0.6));
    let values = grid.phases().iter().map(|&p| coherent_pair_analytic(alpha, beta, p, pattern)).collect();
    let scan = CoincidenceScan::new(grid, values, pattern, Provenance::Analytic)?;

    let before = fit_fourier(&scan, 3)?;
    let after = fit_fourier(&shift_superimpose(&scan, 3)?, 3)?;
    println!("k   A_k before        A_k after");
    for k in 0..=3 {
        println!("{k}   {:<16.10e}  {:.10e}", before.amplitude(k), after.amplitude(k));
    }
    Ok(())
}
