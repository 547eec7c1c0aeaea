//! CSV scan files.
//!
//! ```text
//! # pattern_m: 2
//! # pattern_n: 1
//! # source: coherent 1
//! # provenance: analytic
//! phase,rate
//! 0,0
//! 0.09817477042468103,1.0990671388870713e-7
//! ```
//!
//! Lines starting with `#` carry `key: value` metadata and may appear
//! anywhere; the first other line is the header, `phase,rate` or
//! `phase,rate,shots`. Phases are radians and strictly increasing, rates are
//! nonnegative, shots are positive integers. Floats are written in Rust's
//! shortest round-trip form, so a scan survives a write/read cycle exactly.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::coincidence::{CoincidencePattern, CoincidenceScan, PhaseGrid, Provenance};
use crate::error::{Error, Result};

pub const PATTERN_M: &str = "pattern_m";
pub const PATTERN_N: &str = "pattern_n";
pub const PROVENANCE: &str = "provenance";

/// A scan plus its metadata, in file order.
#[derive(Clone, Debug, PartialEq)]
pub struct ScanFile {
    pub metadata: Vec<(String, String)>,
    pub scan: CoincidenceScan,
}

fn parse_err(line: u64, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

impl ScanFile {
    /// Wraps a scan; pattern and provenance keys are filled in from the scan
    /// and placed first.
    pub fn new(scan: CoincidenceScan, extra: Vec<(String, String)>) -> Self {
        let mut metadata = vec![
            (PATTERN_M.to_string(), scan.pattern().m.to_string()),
            (PATTERN_N.to_string(), scan.pattern().n.to_string()),
            (PROVENANCE.to_string(), scan.provenance().to_string()),
        ];
        metadata.extend(extra.into_iter().filter(|(k, _)| ![PATTERN_M, PATTERN_N, PROVENANCE].contains(&k.as_str())));
        Self { metadata, scan }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.metadata.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        for (k, v) in &self.metadata {
            writeln!(w, "# {k}: {v}")?;
        }
        let mut out = csv::Writer::from_writer(w);
        let shots = self.scan.shots();
        let csv_err = |e: csv::Error| Error::Io(e.into());
        match shots {
            Some(_) => out.write_record(["phase", "rate", "shots"]),
            None => out.write_record(["phase", "rate"]),
        }
        .map_err(csv_err)?;
        for (i, (phi, rate)) in self.scan.phases().iter().zip(self.scan.values()).enumerate() {
            let mut row = vec![phi.to_string(), rate.to_string()];
            if let Some(s) = shots {
                row.push(s[i].to_string());
            }
            out.write_record(&row).map_err(csv_err)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ASCII output")
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut f = std::io::BufWriter::new(File::create(path)?);
        self.write_to(&mut f)?;
        f.flush()?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::read_from(File::open(path)?)
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::read_from(text.as_bytes())
    }

    /// Parses a scan file. Every structural problem is reported with its
    /// 1-based line number. Pattern keys are required; a missing provenance
    /// key means `ingested`.
    pub fn read_from<R: Read>(mut r: R) -> Result<Self> {
        let mut text = String::new();
        r.read_to_string(&mut text)?;
        let metadata: Vec<(String, String)> = text
            .lines()
            .filter_map(|l| l.strip_prefix('#'))
            .filter_map(|meta| meta.split_once(':'))
            .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
            .collect();

        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .flexible(true)
            .from_reader(text.as_bytes());
        let header_line =
            text.lines().position(|l| !l.trim().is_empty() && !l.starts_with('#')).map_or(0, |i| i as u64 + 1);
        let header = reader.headers().map_err(|e| csv_parse_err(&e, header_line))?.clone();
        let with_shots = match header.iter().collect::<Vec<_>>().as_slice() {
            ["phase", "rate"] => false,
            ["phase", "rate", "shots"] => true,
            [] => return Err(parse_err(0, "missing 'phase,rate' header")),
            other => {
                return Err(parse_err(
                    header_line,
                    format!("expected header 'phase,rate[,shots]', found '{}'", other.join(",")),
                ))
            }
        };

        let mut phases: Vec<f64> = Vec::new();
        let mut rates = Vec::new();
        let mut shots = Vec::new();
        for record in reader.records() {
            let record = record.map_err(|e| csv_parse_err(&e, 0))?;
            let line_no = record.position().map_or(0, |p| p.line());
            let expected = if with_shots { 3 } else { 2 };
            if record.len() != expected {
                return Err(parse_err(line_no, format!("expected {expected} columns, found {}", record.len())));
            }
            let phase: f64 =
                record[0].parse().map_err(|_| parse_err(line_no, format!("phase '{}' is not a number", &record[0])))?;
            if !phase.is_finite() {
                return Err(parse_err(line_no, "phase is not finite"));
            }
            if let Some(&prev) = phases.last() {
                if !(phase > prev) {
                    return Err(parse_err(line_no, format!("phase {phase} does not increase past {prev}")));
                }
            }
            let rate: f64 =
                record[1].parse().map_err(|_| parse_err(line_no, format!("rate '{}' is not a number", &record[1])))?;
            if !(rate >= 0.0) || !rate.is_finite() {
                return Err(parse_err(line_no, format!("rate {rate} is negative or not finite")));
            }
            if with_shots {
                let s: u64 = record[2]
                    .parse()
                    .map_err(|_| parse_err(line_no, format!("shots '{}' is not a positive integer", &record[2])))?;
                if s == 0 {
                    return Err(parse_err(line_no, "shots must be positive"));
                }
                shots.push(s);
            }
            phases.push(phase);
            rates.push(rate);
        }
        if phases.is_empty() {
            return Err(parse_err(header_line, "no data rows after header"));
        }

        let key = |name: &str| -> Result<usize> {
            let (_, v) = metadata
                .iter()
                .find(|(k, _)| k == name)
                .ok_or_else(|| parse_err(0, format!("missing '# {name}:' metadata")))?;
            v.parse().map_err(|_| parse_err(0, format!("{name} '{v}' is not a nonnegative integer")))
        };
        let pattern = CoincidencePattern::new(key(PATTERN_M)?, key(PATTERN_N)?);
        let provenance = match metadata.iter().find(|(k, _)| k == PROVENANCE) {
            Some((_, v)) => v.parse()?,
            None => Provenance::Ingested,
        };
        let grid = PhaseGrid::from_phases(phases)?;
        let mut scan = CoincidenceScan::new(grid, rates, pattern, provenance)?;
        if with_shots {
            scan = scan.with_shots(shots)?;
        }
        Ok(Self { metadata, scan })
    }
}

fn csv_parse_err(e: &csv::Error, fallback: u64) -> Error {
    let line = e.position().map_or(fallback, |p| p.line());
    parse_err(line, e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ScanFile {
        let grid = PhaseGrid::uniform(8);
        let values = grid.phases().iter().map(|p| 0.25 * (1.0 + (2.0 * p).cos()) + 1e-17).collect();
        let scan = CoincidenceScan::new(grid, values, CoincidencePattern::new(2, 0), Provenance::Analytic).unwrap();
        ScanFile::new(scan, vec![("source".into(), "noon 2".into())])
    }

    #[test]
    fn roundtrip_is_exact() {
        let f = sample();
        let back = ScanFile::parse(&f.to_csv_string()).unwrap();
        assert_eq!(back, f);
        assert!(back.scan.grid().is_uniform());
        assert_eq!(back.get("source"), Some("noon 2"));
    }

    #[test]
    fn roundtrip_with_shots() {
        let mut f = sample();
        f.scan = f.scan.clone().with_shots(vec![100; 8]).unwrap();
        let text = f.to_csv_string();
        assert!(text.contains("phase,rate,shots\n"));
        assert_eq!(ScanFile::parse(&text).unwrap(), f);
    }

    #[test]
    fn line_numbers_in_errors() {
        let bad = "# pattern_m: 1\n# pattern_n: 1\nphase,rate\n0,0.1\n0.5,0.2\n0.4,0.3\n";
        match ScanFile::parse(bad) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 6),
            other => panic!("{other:?}"),
        }
        let neg = "# pattern_m: 1\n# pattern_n: 1\nphase,rate\n0,0.1\n0.5,-0.2\n";
        assert!(matches!(ScanFile::parse(neg), Err(Error::Parse { line: 5, .. })));
        let junk = "# pattern_m: 1\n# pattern_n: 1\nphase,rate\n0,abc\n";
        assert!(matches!(ScanFile::parse(junk), Err(Error::Parse { line: 4, .. })));
        let header = "# pattern_m: 1\nangle,rate\n";
        assert!(matches!(ScanFile::parse(header), Err(Error::Parse { line: 2, .. })));
        let zero_shots = "# pattern_m: 1\n# pattern_n: 0\nphase,rate,shots\n0,0.1,0\n";
        assert!(matches!(ScanFile::parse(zero_shots), Err(Error::Parse { line: 4, .. })));
    }

    #[test]
    fn missing_pattern_is_an_error() {
        assert!(matches!(ScanFile::parse("phase,rate\n0,1\n"), Err(Error::Parse { .. })));
    }

    #[test]
    fn missing_provenance_means_ingested() {
        let f = ScanFile::parse("# pattern_m: 1\n# pattern_n: 0\nphase,rate\n0,1\n1,2\n").unwrap();
        assert_eq!(f.scan.provenance(), Provenance::Ingested);
    }
}
