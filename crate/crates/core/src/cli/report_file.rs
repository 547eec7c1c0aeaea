//! JSON analysis reports.
//!
//! ```json
//! {
//!   "pattern": { "m": 2, "n": 1 },
//!   "fit": { "A_k": [..], "delta_k": [..], "residual": 0.0, "k_max": 3 },
//!   "visibility": { "value": 0.5, "sigma": 0.0, "method": "direct-fit" },
//!   "bound": { "numerator": "1", "denominator": "2", "float": 0.5 },
//!   "verdict": { "label": "classical-consistent", "margin": null, "threshold": 3.0 },
//!   "provenance": "analytic",
//!   "tool_version": "0.1.0"
//! }
//! ```
//!
//! The bound's numerator and denominator are decimal strings so that large
//! values stay exact. Floats use serde_json's shortest round-trip form.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bound::{Verdict, VerdictLabel};
use crate::coincidence::{CoincidencePattern, Provenance};
use crate::error::Result;
use crate::visibility::{FourierSeries, VisibilityEstimate, VisibilityMethod};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitSection {
    #[serde(rename = "A_k")]
    pub amplitudes: Vec<f64>,
    #[serde(rename = "delta_k")]
    pub phases: Vec<f64>,
    pub residual: f64,
    pub k_max: usize,
    /// Least-squares weighting; fits are always unweighted.
    pub weighting: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VisibilitySection {
    pub value: f64,
    pub sigma: f64,
    pub method: VisibilityMethod,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundSection {
    pub numerator: String,
    pub denominator: String,
    pub float: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerdictSection {
    pub label: VerdictLabel,
    pub margin: Option<f64>,
    pub threshold: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub pattern: CoincidencePattern,
    pub fit: FitSection,
    pub visibility: VisibilitySection,
    pub bound: BoundSection,
    pub verdict: VerdictSection,
    pub provenance: Provenance,
    pub tool_version: String,
}

impl ReportFile {
    pub fn new(
        series: &FourierSeries,
        estimate: &VisibilityEstimate,
        verdict: &Verdict,
        provenance: Provenance,
    ) -> Self {
        Self {
            pattern: estimate.pattern,
            fit: FitSection {
                amplitudes: series.amplitudes(),
                phases: series.phases(),
                residual: series.residual(),
                k_max: series.k_max(),
                weighting: "unweighted".into(),
            },
            visibility: VisibilitySection {
                value: estimate.value,
                sigma: estimate.uncertainty,
                method: estimate.method,
            },
            bound: BoundSection {
                numerator: verdict.bound.numerator().to_string(),
                denominator: verdict.bound.denominator().to_string(),
                float: verdict.bound.to_f64(),
            },
            verdict: VerdictSection { label: verdict.label, margin: verdict.margin, threshold: verdict.threshold },
            provenance,
            tool_version: TOOL_VERSION.to_string(),
        }
    }

    /// The fitted series, rebuilt from `A_k` and `delta_k`.
    pub fn series(&self) -> Result<FourierSeries> {
        FourierSeries::from_amplitudes(self.pattern, &self.fit.amplitudes, &self.fit.phases, self.fit.residual)
    }

    /// One line for humans, e.g.
    /// `(2,1): V = 0.5 +/- 0 vs bound 1/2 (50%) -> classical-consistent`.
    pub fn summary(&self) -> String {
        let pct = 100.0 * self.bound.float;
        format!(
            "{}: V = {:.6} +/- {:.6} vs bound {}/{} ({pct:.4}%) -> {}",
            self.pattern,
            self.visibility.value,
            self.visibility.sigma,
            self.bound.numerator,
            self.bound.denominator,
            self.verdict.label
        )
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is always serializable")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        w.write_all(self.to_json().as_bytes())?;
        w.write_all(b"\n")?;
        w.flush()?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bound::classify;
    use crate::coincidence::{coherent_vacuum_analytic, CoincidenceScan, PhaseGrid};
    use crate::states::CoherentAmplitude;
    use crate::visibility::analyze_visibility;

    fn report() -> ReportFile {
        let pattern = CoincidencePattern::new(2, 1);
        let grid = PhaseGrid::uniform(32);
        let values =
            grid.phases().iter().map(|&p| coherent_vacuum_analytic(CoherentAmplitude::real(1.1), p, pattern)).collect();
        let scan = CoincidenceScan::new(grid, values, pattern, Provenance::Analytic).unwrap();
        let (series, est) = analyze_visibility(&scan, 3, VisibilityMethod::DirectFit).unwrap();
        ReportFile::new(&series, &est, &classify(&est).unwrap(), Provenance::Analytic)
    }

    #[test]
    fn json_roundtrip_is_lossless() {
        let r = report();
        let back = ReportFile::from_json(&r.to_json()).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.to_json(), r.to_json());
    }

    #[test]
    fn field_names() {
        let v: serde_json::Value = serde_json::from_str(&report().to_json()).unwrap();
        for key in ["pattern", "fit", "visibility", "bound", "verdict", "provenance", "tool_version"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert!(v["fit"]["A_k"].is_array() && v["fit"]["delta_k"].is_array());
        assert_eq!(v["bound"]["numerator"], "1");
        assert_eq!(v["bound"]["denominator"], "2");
        assert_eq!(v["verdict"]["label"], "classical-consistent");
        assert_eq!(v["visibility"]["method"], "direct-fit");
        assert_eq!(v["provenance"], "analytic");
    }

    #[test]
    fn rebuilt_series_matches_fit() {
        let r = report();
        let s = r.series().unwrap();
        assert!((s.amplitude(3) / s.amplitude(0) - r.visibility.value).abs() < 1e-12);
    }
}
