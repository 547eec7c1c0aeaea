//! The `mzi-bound` command line.
//!
//! Subcommands: `bound`, `simulate`, `analyze`, `verify`, `plotdata`. Exit
//! codes are 0 on success, 1 when a computation or verification fails and 2
//! for usage and input errors. All phases are in radians.

pub mod report_file;
pub mod scan_file;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::battery::run_battery;
use crate::bound::{
    balanced_and_lopsided, bound_table, classical_bound, classify_with_threshold, ClassicalBoundValue, VerifyConfig,
    DEFAULT_SIGMA_THRESHOLD,
};
use crate::coincidence::{
    coherent_pair_rate, coherent_vacuum_analytic, scan, CoincidencePattern, CoincidenceScan, Injection, PhaseGrid,
    Provenance, Source,
};
use crate::detector::{DetectorModel, DetectorParams};
use crate::error::{Error, Result};
use crate::montecarlo::{sample_scan, ShotConfig};
use crate::states::{noon_state, ClassicalMixture, CoherentAmplitude};
use crate::visibility::{analyze_visibility, bootstrap_visibility, fit_fourier, VisibilityMethod};

pub use report_file::ReportFile;
pub use scan_file::ScanFile;

#[derive(Debug, Parser)]
#[command(
    name = "mzi-bound",
    version,
    about = "Multiphoton coincidences at a Mach-Zehnder interferometer and the classical N-fold visibility bound",
    after_help = "Phases are in radians everywhere. Exit codes: 0 success, 1 computation or verification failure, 2 usage or input error."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact classical bound for one pattern or a table of patterns.
    Bound(BoundArgs),
    /// Simulate a phase scan and write it as a CSV scan file.
    Simulate(SimulateArgs),
    /// Fit a scan file, estimate its N-fold visibility and compare it with the bound.
    Analyze(AnalyzeArgs),
    /// Run the self-check battery and the randomized domination check.
    Verify(VerifyArgs),
    /// Write plain columnar data for external plotting.
    Plotdata(PlotdataArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    /// Clicks at the first detector.
    #[arg(required_unless_present = "table", requires = "n")]
    pub m: Option<usize>,
    /// Clicks at the second detector.
    pub n: Option<usize>,
    /// Tabulate every pattern with m >= n and 1 <= m + n <= N_MAX.
    #[arg(long, value_name = "N_MAX", conflicts_with = "m")]
    pub table: Option<usize>,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum InjectionArg {
    Full,
    Half,
}

impl From<InjectionArg> for Injection {
    fn from(v: InjectionArg) -> Self {
        match v {
            InjectionArg::Full => Injection::Full,
            InjectionArg::Half => Injection::Half,
        }
    }
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Input light: `coherent A`, `coherent-pair A B`, `noon N` or
    /// `mixture FILE.json`. Amplitudes are `RE` or `RE,IM`.
    #[arg(long, num_args = 2..=3, value_names = ["KIND", "ARGS"], required = true, allow_negative_numbers = true)]
    pub source: Vec<String>,
    /// Inject before the first beam splitter (full) or into the arms (half).
    #[arg(long, value_enum, default_value = "full")]
    pub injection: InjectionArg,
    /// Coincidence pattern: clicks at D1 and at D2.
    #[arg(long, num_args = 2, value_names = ["M", "N"], required = true)]
    pub pattern: Vec<usize>,
    /// Uniform phase points over [0, 2 pi); at least 2N + 2.
    #[arg(long, default_value_t = 64)]
    pub points: usize,
    /// Detector efficiency in [0, 1].
    #[arg(long, default_value_t = 1.0)]
    pub eta: f64,
    /// Mean dark counts per gate.
    #[arg(long, default_value_t = 0.0)]
    pub dark: f64,
    /// Cross-talk probability per click.
    #[arg(long, default_value_t = 0.0)]
    pub crosstalk: f64,
    /// Largest click number a detector reports; higher counts saturate.
    #[arg(long)]
    pub n_max: Option<usize>,
    /// Shots per phase point; switches to Monte Carlo sampling.
    #[arg(long)]
    pub shots: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Scan file to analyze.
    pub file: PathBuf,
    /// Fourier index of the visibility; defaults to m + n from the metadata.
    #[arg(long)]
    pub n_fold: Option<usize>,
    /// Shift-and-superimpose N copies of the scan before fitting.
    #[arg(long)]
    pub superimpose: bool,
    /// Poisson bootstrap with this many resamples (needs a shots column).
    #[arg(long, value_name = "R")]
    pub bootstrap: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Sigma multiple used by the verdict.
    #[arg(long, default_value_t = DEFAULT_SIGMA_THRESHOLD)]
    pub threshold: f64,
    /// Write the JSON report here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Random coherent pairs and random mixtures, each.
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    /// Largest total photon number N = m + n checked.
    #[arg(long, default_value_t = 5)]
    pub n_max: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct PlotdataArgs {
    /// Scan files; each gets an overlay of data and fitted series.
    #[arg(long, num_args = 1..)]
    pub scan: Vec<PathBuf>,
    /// Report files; the i-th report supplies the fit for the i-th scan and
    /// every report contributes one bar.
    #[arg(long, num_args = 1..)]
    pub report: Vec<PathBuf>,
    /// Largest N in the bound curve.
    #[arg(long, default_value_t = 10)]
    pub n_max: usize,
    /// Output path prefix.
    #[arg(long)]
    pub out: PathBuf,
}

/// Exit code for an error: 1 for failed computations, 2 for bad input.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Dimension(_) | Error::Identifiability(_) | Error::UndefinedVisibility(_) | Error::Arithmetic(_) => 1,
        _ => 2,
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    let result = match cli.command {
        Command::Bound(a) => cmd_bound(&a, out),
        Command::Simulate(a) => cmd_simulate(&a, out),
        Command::Analyze(a) => cmd_analyze(&a, out),
        Command::Verify(a) => cmd_verify(&a, out),
        Command::Plotdata(a) => cmd_plotdata(&a, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

#[derive(Serialize)]
struct BoundRow {
    m: usize,
    n: usize,
    total: usize,
    numerator: String,
    denominator: String,
    value: f64,
    percent: f64,
}

impl From<&ClassicalBoundValue> for BoundRow {
    fn from(b: &ClassicalBoundValue) -> Self {
        Self {
            m: b.pattern().m,
            n: b.pattern().n,
            total: b.pattern().total(),
            numerator: b.numerator().to_string(),
            denominator: b.denominator().to_string(),
            value: b.to_f64(),
            percent: b.percent(),
        }
    }
}

pub fn cmd_bound(a: &BoundArgs, out: &mut dyn Write) -> Result<i32> {
    let single = a.table.is_none();
    let rows = match (a.table, a.m, a.n) {
        (Some(n_max), _, _) => {
            if n_max == 0 {
                return Err(Error::Input("--table needs N_MAX >= 1".into()));
            }
            bound_table(n_max)?
        }
        (None, Some(m), Some(n)) => vec![classical_bound(m, n)?],
        _ => return Err(Error::Input("give m and n, or --table N_MAX".into())),
    };
    match a.format {
        Format::Text if single => writeln!(out, "{}", rows[0])?,
        Format::Text => {
            let width = rows.iter().map(|b| b.exact().to_string().len()).max().unwrap_or(1).max(5);
            writeln!(out, "{:>3} {:>3} {:>3}  {:>width$}  {:>8}", "m", "n", "N", "bound", "percent")?;
            for b in &rows {
                let p = b.pattern();
                writeln!(
                    out,
                    "{:>3} {:>3} {:>3}  {:>width$}  {:>8}",
                    p.m,
                    p.n,
                    p.total(),
                    b.exact().to_string(),
                    b.percent_rounded(2)
                )?;
            }
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut *out);
            for b in &rows {
                w.serialize(BoundRow::from(b)).map_err(|e| Error::Io(e.into()))?;
            }
            w.flush()?;
        }
        Format::Json => {
            let rows: Vec<BoundRow> = rows.iter().map(BoundRow::from).collect();
            if single {
                writeln!(out, "{}", serde_json::to_string_pretty(&rows[0])?)?;
            } else {
                writeln!(out, "{}", serde_json::to_string_pretty(&rows)?)?;
            }
        }
    }
    Ok(0)
}

fn parse_amplitude(text: &str) -> Result<CoherentAmplitude> {
    let bad = || Error::Input(format!("amplitude '{text}' is not RE or RE,IM"));
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let a = match parts.as_slice() {
        [re] => CoherentAmplitude::new(re.parse().map_err(|_| bad())?, 0.0),
        [re, im] => CoherentAmplitude::new(re.parse().map_err(|_| bad())?, im.parse().map_err(|_| bad())?),
        _ => return Err(bad()),
    };
    if !a.is_finite() {
        return Err(bad());
    }
    Ok(a)
}

/// A parsed `--source`: the light to simulate and a one-line description
/// recorded in the scan metadata.
#[derive(Clone, Debug)]
pub enum SourceSpec {
    Coherent(CoherentAmplitude),
    CoherentPair(CoherentAmplitude, CoherentAmplitude),
    Noon(usize),
    Mixture(ClassicalMixture, PathBuf),
}

impl SourceSpec {
    pub fn parse(words: &[String]) -> Result<Self> {
        let usage = || Error::Input(format!("unrecognized source '{}'", words.join(" ")));
        match words {
            [kind, a] if kind == "coherent" => Ok(Self::Coherent(parse_amplitude(a)?)),
            [kind, a, b] if kind == "coherent-pair" => Ok(Self::CoherentPair(parse_amplitude(a)?, parse_amplitude(b)?)),
            [kind, n] if kind == "noon" => {
                let n: usize = n.parse().map_err(|_| Error::Input(format!("NOON photon number '{n}' is invalid")))?;
                noon_state(n)?;
                Ok(Self::Noon(n))
            }
            [kind, file] if kind == "mixture" => {
                let text = std::fs::read_to_string(file)?;
                let mix: ClassicalMixture = serde_json::from_str(&text)?;
                Ok(Self::Mixture(mix, PathBuf::from(file)))
            }
            _ => Err(usage()),
        }
    }

    /// Coherent components, or `None` for non-classical input.
    fn coherent_components(&self) -> Option<ClassicalMixture> {
        match self {
            Self::Coherent(a) => Some(ClassicalMixture::single(*a, CoherentAmplitude::real(0.0))),
            Self::CoherentPair(a, b) => Some(ClassicalMixture::single(*a, *b)),
            Self::Mixture(mix, _) => Some(mix.clone()),
            Self::Noon(_) => None,
        }
    }

    fn source(&self) -> Result<Source> {
        Ok(match self.coherent_components() {
            Some(mix) => Source::Mixture(mix),
            None => match self {
                Self::Noon(n) => Source::State(noon_state(*n)?),
                _ => unreachable!("only NOON states are non-classical"),
            },
        })
    }

    pub fn describe(&self) -> String {
        let amp = |a: &CoherentAmplitude| format!("{},{}", a.0.re, a.0.im);
        match self {
            Self::Coherent(a) => format!("coherent {}", amp(a)),
            Self::CoherentPair(a, b) => format!("coherent-pair {} {}", amp(a), amp(b)),
            Self::Noon(n) => format!("noon {n}"),
            Self::Mixture(_, path) => format!("mixture {}", path.display()),
        }
    }
}

/// Builds the scan described by `a`: closed forms for coherent light with
/// ideal detectors, the trace engine otherwise, then finite-shot sampling
/// when `shots` is set.
pub fn simulate(a: &SimulateArgs) -> Result<ScanFile> {
    let spec = SourceSpec::parse(&a.source)?;
    let pattern = CoincidencePattern::new(a.pattern[0], a.pattern[1]);
    pattern.require_photons()?;
    if a.points < 2 * pattern.total() + 2 {
        return Err(Error::Input(format!(
            "{} points cannot resolve pattern {pattern}; need at least {}",
            a.points,
            2 * pattern.total() + 2
        )));
    }
    let params = DetectorParams { efficiency: a.eta, dark_counts: a.dark, crosstalk: a.crosstalk };
    params.validate()?;
    let injection = Injection::from(a.injection);
    let grid = PhaseGrid::uniform(a.points);

    let ideal_scan = match spec.coherent_components() {
        Some(mix) if params.is_ideal() && a.n_max.is_none() => {
            let rate = |phi: f64| -> f64 {
                match spec {
                    SourceSpec::Coherent(alpha) if injection == Injection::Full => {
                        coherent_vacuum_analytic(alpha, phi, pattern)
                    }
                    _ => mix
                        .components()
                        .iter()
                        .map(|c| c.weight * coherent_pair_rate(c.alpha, c.beta, injection, phi, pattern))
                        .sum(),
                }
            };
            let values = grid.phases().iter().map(|&phi| rate(phi)).collect();
            CoincidenceScan::new(grid.clone(), values, pattern, Provenance::Analytic)?
        }
        _ => {
            let source = spec.source()?;
            let cutoff = source.ensemble().iter().map(|(_, s)| s.cutoff()).max().unwrap_or(0);
            let n_max = a.n_max.unwrap_or(cutoff.max(pattern.m).max(pattern.n));
            let d = DetectorModel::from_params(params, cutoff, n_max)?;
            scan(&source, injection, &grid, pattern, &d, &d)?
        }
    };
    let scan = match a.shots {
        Some(shots) => sample_scan(&ideal_scan, ShotConfig::new(shots, a.seed)?)?,
        None => ideal_scan,
    };

    let mut meta = vec![
        ("source".to_string(), spec.describe()),
        ("injection".to_string(), injection.to_string()),
        ("points".to_string(), a.points.to_string()),
        ("eta".to_string(), a.eta.to_string()),
        ("dark".to_string(), a.dark.to_string()),
        ("crosstalk".to_string(), a.crosstalk.to_string()),
    ];
    if let Some(n) = a.n_max {
        meta.push(("n_max".to_string(), n.to_string()));
    }
    if let Some(s) = a.shots {
        meta.push(("shots".to_string(), s.to_string()));
        meta.push(("seed".to_string(), a.seed.to_string()));
    }
    meta.push(("tool_version".to_string(), report_file::TOOL_VERSION.to_string()));
    Ok(ScanFile::new(scan, meta))
}

pub fn cmd_simulate(a: &SimulateArgs, out: &mut dyn Write) -> Result<i32> {
    let file = simulate(a)?;
    match &a.out {
        Some(path) => file.save(path)?,
        None => file.write_to(&mut *out)?,
    }
    Ok(0)
}

/// Fits a scan file and classifies its visibility.
pub fn analyze(a: &AnalyzeArgs) -> Result<ReportFile> {
    let file = ScanFile::load(&a.file)?;
    let scan = &file.scan;
    scan.pattern().require_photons()?;
    let n = a.n_fold.unwrap_or(scan.pattern().total());
    let method = if a.superimpose { VisibilityMethod::ShiftSuperimpose } else { VisibilityMethod::DirectFit };
    let (series, mut estimate) = analyze_visibility(scan, n, method)?;
    if let Some(r) = a.bootstrap {
        estimate = bootstrap_visibility(scan, n, r, a.seed, method)?;
    }
    let verdict = classify_with_threshold(&estimate, a.threshold)?;
    Ok(ReportFile::new(&series, &estimate, &verdict, scan.provenance()))
}

pub fn cmd_analyze(a: &AnalyzeArgs, out: &mut dyn Write) -> Result<i32> {
    let report = analyze(a)?;
    if let Some(path) = &a.out {
        report.save(path)?;
    }
    writeln!(out, "{}", report.summary())?;
    Ok(0)
}

pub fn cmd_verify(a: &VerifyArgs, out: &mut dyn Write) -> Result<i32> {
    if a.trials == 0 {
        return Err(Error::Input("--trials must be at least 1".into()));
    }
    if a.n_max == 0 {
        return Err(Error::Input("--n-max must be at least 1".into()));
    }
    let report = run_battery(VerifyConfig::new(a.trials, a.n_max, a.seed))?;
    let mut checks = report.checks.clone();
    checks.push(report.domination());
    for c in &checks {
        writeln!(
            out,
            "{} {:<22} worst {:.3e} (tolerance {:.0e}, {} cases) {}",
            if c.passed() { "PASS" } else { "FAIL" },
            c.name,
            c.worst,
            c.tolerance,
            c.cases,
            c.detail
        )?;
    }
    writeln!(out)?;
    writeln!(out, "max visibility / bound")?;
    writeln!(out, "{:<8} {:>16} {:>16} {:>16}", "pattern", "coherent-vacuum", "coherent-pair", "mixture")?;
    for pattern in CoincidencePattern::all_up_to(a.n_max) {
        let mut line = format!("{:<8}", pattern.to_string());
        for kind in [
            crate::bound::TrialKind::CoherentVacuum,
            crate::bound::TrialKind::CoherentPair,
            crate::bound::TrialKind::Mixture,
        ] {
            match report.bound.max_ratio.get(&(kind, pattern)) {
                Some(r) => write!(line, " {r:>16.6}").expect("string write"),
                None => write!(line, " {:>16}", "-").expect("string write"),
            }
        }
        writeln!(out, "{line}")?;
    }
    if report.passed() {
        writeln!(out, "\nall checks passed")?;
        return Ok(0);
    }
    writeln!(out, "\ncounterexamples:")?;
    for c in report.bound.violations.iter().take(20) {
        writeln!(
            out,
            "  {} trial {} {} ratio {:.12}: {}",
            c.kind,
            c.trial,
            c.pattern,
            c.ratio,
            serde_json::to_string(&c.mixture)?
        )?;
    }
    Ok(1)
}

fn write_dat(path: &Path, header: &str, rows: &[Vec<String>]) -> Result<()> {
    let mut text = format!("# {header}\n");
    for row in rows {
        text.push_str(&row.join(" "));
        text.push('\n');
    }
    std::fs::write(path, text)?;
    Ok(())
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

/// Writes `<prefix>_bound_curve.dat`, one `<prefix>_overlay_<i>.dat` per
/// scan and, when reports are given, `<prefix>_bars.dat`. Returns the paths
/// written.
pub fn plotdata(a: &PlotdataArgs) -> Result<Vec<PathBuf>> {
    if a.n_max == 0 {
        return Err(Error::Input("--n-max must be at least 1".into()));
    }
    let mut written = Vec::new();

    let curve = with_suffix(&a.out, "_bound_curve.dat");
    let rows = (1..=a.n_max)
        .map(|total| {
            let (bal, lop) = balanced_and_lopsided(total)?;
            Ok(vec![total.to_string(), bal.to_f64().to_string(), lop.to_f64().to_string()])
        })
        .collect::<Result<Vec<_>>>()?;
    write_dat(&curve, "N gamma_balanced gamma_lopsided", &rows)?;
    written.push(curve);

    let reports = a.report.iter().map(|p| ReportFile::load(p)).collect::<Result<Vec<_>>>()?;
    for (i, path) in a.scan.iter().enumerate() {
        let file = ScanFile::load(path)?;
        let series = match reports.get(i) {
            Some(r) => r.series()?,
            None => fit_fourier(&file.scan, file.scan.pattern().total().max(1))?,
        };
        let rows: Vec<Vec<String>> = file
            .scan
            .phases()
            .iter()
            .zip(file.scan.values())
            .map(|(&phi, &v)| vec![phi.to_string(), v.to_string(), series.evaluate(phi).to_string()])
            .collect();
        let overlay = with_suffix(&a.out, &format!("_overlay_{i}.dat"));
        write_dat(&overlay, "phase measured fitted", &rows)?;
        written.push(overlay);
    }

    if !reports.is_empty() {
        let rows: Vec<Vec<String>> = reports
            .iter()
            .map(|r| {
                vec![
                    r.pattern.m.to_string(),
                    r.pattern.n.to_string(),
                    r.visibility.value.to_string(),
                    r.visibility.sigma.to_string(),
                    r.bound.float.to_string(),
                ]
            })
            .collect();
        let bars = with_suffix(&a.out, "_bars.dat");
        write_dat(&bars, "m n visibility sigma bound", &rows)?;
        written.push(bars);
    }
    Ok(written)
}

pub fn cmd_plotdata(a: &PlotdataArgs, out: &mut dyn Write) -> Result<i32> {
    for path in plotdata(a)? {
        writeln!(out, "{}", path.display())?;
    }
    Ok(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("mzi-bound").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn bound_single_pattern() {
        let (code, out, _) = run_capture(&["bound", "2", "1"]);
        assert_eq!(code, 0);
        assert_eq!(out.trim(), "1/2 (50%)");
    }

    #[test]
    fn bound_zero_pattern_is_a_usage_error() {
        let (code, _, err) = run_capture(&["bound", "0", "0"]);
        assert_eq!(code, 2);
        assert!(err.contains("(0,0)"));
    }

    #[test]
    fn bound_table_formats() {
        let (code, text, _) = run_capture(&["bound", "--table", "5"]);
        assert_eq!(code, 0);
        assert!(text.lines().any(|l| l.contains("1/126") && l.ends_with("0.79")));
        let (_, csv, _) = run_capture(&["bound", "--table", "5", "--format", "csv"]);
        assert_eq!(csv.lines().count(), 12);
        assert!(csv.starts_with("m,n,total,numerator,denominator,value,percent"));
        let (_, json, _) = run_capture(&["bound", "--table", "5", "--format", "json"]);
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v.as_array().unwrap().len(), 11);
    }

    #[test]
    fn source_parsing() {
        let words = |s: &str| s.split(' ').map(String::from).collect::<Vec<_>>();
        assert!(matches!(SourceSpec::parse(&words("coherent 1.5")), Ok(SourceSpec::Coherent(_))));
        assert!(matches!(SourceSpec::parse(&words("coherent-pair 1,0.5 -0.2")), Ok(SourceSpec::CoherentPair(..))));
        assert!(matches!(SourceSpec::parse(&words("noon 3")), Ok(SourceSpec::Noon(3))));
        assert!(SourceSpec::parse(&words("noon 0")).is_err());
        assert!(SourceSpec::parse(&words("thermal 1")).is_err());
        assert!(SourceSpec::parse(&words("coherent x")).is_err());
    }

    #[test]
    fn error_codes() {
        assert_eq!(exit_code(&Error::Identifiability("x".into())), 1);
        assert_eq!(exit_code(&Error::Parse { line: 3, message: "x".into() }), 2);
        assert_eq!(exit_code(&Error::Dimension("x".into())), 1);
    }
}
