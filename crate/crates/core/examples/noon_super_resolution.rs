//! NOON states injected between the beam splitters oscillate N times per
//! phase period with full contrast in every coincidence pattern.

use mzi_bound::bound::{classical_bound, classify};
use mzi_bound::coincidence::{scan, CoincidencePattern, Injection, PhaseGrid, Source};
use mzi_bound::detector::ideal_detector;
use mzi_bound::states::noon_state;
use mzi_bound::visibility::{analyze_visibility, VisibilityMethod};

fn main() -> mzi_bound::Result<()> {
    let grid = PhaseGrid::uniform(48);
    for total in 1..=5 {
        let source = Source::State(noon_state(total)?);
        let d = ideal_detector(total);
        for m in (0..=total).rev() {
            let pattern = CoincidencePattern::new(m, total - m);
            let s = scan(&source, Injection::Half, &grid, pattern, &d, &d)?;
            let (series, v) = analyze_visibility(&s, total, VisibilityMethod::DirectFit)?;
            let verdict = classify(&v)?;
            println!(
                "N={total} {pattern}: dominant harmonic {}, V = {:.9} vs bound {} -> {}",
                series.dominant_index(),
                v.value,
                classical_bound(m, total - m)?.exact(),
                verdict.label
            );
        }
    }
    Ok(())
}
