//! Loss, dark counts and cross-talk. Noise pulls NOON visibilities down,
//! while pure loss leaves coherent-state visibilities untouched.

use mzi_bound::coincidence::{scan, CoincidencePattern, Injection, PhaseGrid, Source};
use mzi_bound::detector::{ideal_detector, imperfect_detector};
use mzi_bound::states::{coherent_product_auto, noon_state, CoherentAmplitude};
use mzi_bound::visibility::{analyze_visibility, VisibilityMethod};

fn visibility(s: &mzi_bound::coincidence::CoincidenceScan) -> f64 {
    analyze_visibility(s, s.pattern().total(), VisibilityMethod::DirectFit).map_or(f64::NAN, |(_, v)| v.value)
}

fn main() -> mzi_bound::Result<()> {
    let grid = PhaseGrid::uniform(64);

    let noon = Source::State(noon_state(3)?);
    let ideal = ideal_detector(3);
    println!("NOON N=3, half injection");
    println!("  eta   dark  xtalk   V(3,0)    V(2,1)");
    for (eta, dark, xt) in [(1.0, 0.0, 0.0), (0.9, 0.0, 0.0), (0.6, 0.01, 0.02), (0.4, 0.05, 0.05)] {
        let d = imperfect_detector(eta, dark, xt, 3, 3)?;
        let d = if d.is_ideal() { ideal.clone() } else { d };
        let v30 = visibility(&scan(&noon, Injection::Half, &grid, CoincidencePattern::new(3, 0), &d, &d)?);
        let v21 = visibility(&scan(&noon, Injection::Half, &grid, CoincidencePattern::new(2, 1), &d, &d)?);
        println!("  {eta:<5} {dark:<5} {xt:<5}  {v30:.6}  {v21:.6}");
    }

    let state = coherent_product_auto(CoherentAmplitude::real(1.0), CoherentAmplitude::new(0.3, 0.4));
    let cutoff = state.cutoff();
    let coherent = Source::State(state);
    println!("\ncoherent pair, pattern (2,1), pure loss");
    for eta in [1.0, 0.8, 0.5, 0.2] {
        let d = imperfect_detector(eta, 0.0, 0.0, cutoff, cutoff)?;
        let s = scan(&coherent, Injection::Full, &grid, CoincidencePattern::new(2, 1), &d, &d)?;
        println!("  eta = {eta:<4} V = {:.9}", visibility(&s));
    }
    Ok(())
}
