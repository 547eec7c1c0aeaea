//! Coherent light in one input arm: the trace engine against the closed
//! form, and the fitted N-fold visibility sitting exactly on the bound.

use mzi_bound::bound::classical_bound;
use mzi_bound::coincidence::{coherent_vacuum_analytic, scan, CoincidencePattern, Injection, PhaseGrid, Source};
use mzi_bound::detector::ideal_detector;
use mzi_bound::states::{coherent_product_auto, CoherentAmplitude};
use mzi_bound::visibility::{analyze_visibility, VisibilityMethod};

fn main() -> mzi_bound::Result<()> {
    let alpha = CoherentAmplitude::real(1.2);
    let state = coherent_product_auto(alpha, CoherentAmplitude::real(0.0));
    let detector = ideal_detector(state.cutoff());
    let source = Source::State(state);
    let grid = PhaseGrid::uniform(64);

    println!("pattern  max |trace - closed form|  visibility  bound");
    for pattern in CoincidencePattern::all_up_to(4) {
        let s = scan(&source, Injection::Full, &grid, pattern, &detector, &detector)?;
        let err = grid
            .phases()
            .iter()
            .zip(s.values())
            .map(|(&phi, v)| (v - coherent_vacuum_analytic(alpha, phi, pattern)).abs())
            .fold(0.0, f64::max);
        let (_, v) = analyze_visibility(&s, pattern.total(), VisibilityMethod::DirectFit)?;
        let bound = classical_bound(pattern.m, pattern.n)?;
        println!("{pattern:<8} {err:>24.2e}  {:>10.6}  {}", v.value, bound.exact());
    }
    Ok(())
}
