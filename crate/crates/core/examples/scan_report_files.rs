//! Writing a scan file, reading it back, and producing the JSON report that
//! `mzi-bound analyze` would write.

use mzi_bound::bound::classify;
use mzi_bound::cli::{ReportFile, ScanFile};
use mzi_bound::coincidence::{scan, CoincidencePattern, Injection, PhaseGrid, Source};
use mzi_bound::detector::imperfect_detector;
use mzi_bound::montecarlo::{sample_scan, ShotConfig};
use mzi_bound::states::noon_state;
use mzi_bound::visibility::{analyze_visibility, VisibilityMethod};

fn main() -> mzi_bound::Result<()> {
    let pattern = CoincidencePattern::new(2, 1);
    let d = imperfect_detector(0.7, 0.01, 0.02, 3, 3)?;
    let ideal = scan(&Source::State(noon_state(3)?), Injection::Half, &PhaseGrid::uniform(24), pattern, &d, &d)?;
    let data = sample_scan(&ideal, ShotConfig::new(50_000, 9)?)?;

    let file = ScanFile::new(data, vec![("source".into(), "noon 3".into()), ("eta".into(), "0.7".into())]);
    let text = file.to_csv_string();
    println!("{}", text.lines().take(8).collect::<Vec<_>>().join("\n"));
    println!("...");

    let back = ScanFile::parse(&text)?;
    assert_eq!(back, file);
    let (series, v) = analyze_visibility(&back.scan, 3, VisibilityMethod::DirectFit)?;
    let report = ReportFile::new(&series, &v, &classify(&v)?, back.scan.provenance());
    println!("\n{}", report.to_json());
    println!("\n{}", report.summary());
    Ok(())
}
