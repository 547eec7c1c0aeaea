//! Finite-shot data, a Poisson bootstrap error bar and the resulting verdict
//! for a classical and a NOON source.

use mzi_bound::bound::classify;
use mzi_bound::coincidence::{scan, CoincidencePattern, Injection, PhaseGrid, Source};
use mzi_bound::detector::ideal_detector;
use mzi_bound::montecarlo::{sample_scan, ShotConfig};
use mzi_bound::states::{coherent_product_auto, noon_state, CoherentAmplitude};
use mzi_bound::visibility::{bootstrap_visibility, VisibilityMethod};

fn main() -> mzi_bound::Result<()> {
    let grid = PhaseGrid::uniform(32);
    let pattern = CoincidencePattern::new(2, 2);
    let shots = ShotConfig::new(200_000, 42)?;

    let coherent = coherent_product_auto(CoherentAmplitude::real(1.3), CoherentAmplitude::real(0.0));
    let cases = [
        ("coherent |1.3>|0>", Source::State(coherent), Injection::Full),
        ("NOON N=4", Source::State(noon_state(4)?), Injection::Half),
    ];
    for (name, source, injection) in cases {
        let cutoff = source.ensemble()[0].1.cutoff();
        let d = ideal_detector(cutoff);
        let ideal = scan(&source, injection, &grid, pattern, &d, &d)?;
        let data = sample_scan(&ideal, shots)?;
        let v = bootstrap_visibility(&data, 4, 500, 7, VisibilityMethod::DirectFit)?;
        let verdict = classify(&v)?;
        println!(
            "{name:<18} {pattern}: V = {:.4} +/- {:.4}, bound {} -> {}",
            v.value,
            v.uncertainty,
            verdict.bound.exact(),
            verdict.label
        );
    }
    Ok(())
}
