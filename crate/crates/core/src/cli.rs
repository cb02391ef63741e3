//! Batch front end: JSON experiment configs in, CSV tables and a manifest out.
//!
//! Every experiment writes into an output directory. On success it leaves
//! its tables, a `report.txt` and a `MANIFEST.json`; on failure it leaves an
//! `error.json` with a module-qualified error code and exits nonzero.

use std::fmt::{Debug, Write as _};
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::census::{
    census_box, census_cartan, census_jordan, completeness_horizon, equal_sectors, BoxCensus, CensusError,
    CensusOptions, CountSeries, HorizonKind, SpectrumRecord,
};
use crate::fitting::{
    check_correlation_bounds, factor_critical_exponent, fit_growth, growth_indicator_ladder, jordan_cartan_ratio,
    predicted_alpha, BoundReport, FitError, FitResult, LadderOptions, LadderResult, LadderSource, RatioReport,
    DEFAULT_BOUND_TOL,
};
use crate::group::GroupError;
use crate::regions::{normalize, RegionError, RegionFamily};
use crate::reps::{
    detect_dependence, load_representation_with, validate_all, DependenceReport, RepError, Representation,
    ValidationReport, DEPENDENCE_TOL,
};
use crate::algebra::DEFAULT_TOL;

/// Longest word length any config may request.
pub const L_MAX_CAP: usize = 24;

const DEFAULT_PROBE_DEPTH: usize = 8;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("schema error: {0}")]
    Schema(String),
    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error(transparent)]
    Rep(#[from] RepError),
    #[error(transparent)]
    Census(#[from] CensusError),
    #[error(transparent)]
    Fit(#[from] FitError),
}

impl From<RegionError> for CliError {
    fn from(e: RegionError) -> Self {
        CliError::Census(e.into())
    }
}

impl From<GroupError> for CliError {
    fn from(e: GroupError) -> Self {
        CliError::Census(e.into())
    }
}

fn variant<T: Debug>(e: &T) -> String {
    let s = format!("{e:?}");
    s.split(|c: char| !c.is_alphanumeric()).next().unwrap_or_default().to_string()
}

fn group_code(e: &GroupError) -> String {
    format!("group.{}", variant(e))
}

fn census_code(e: &CensusError) -> String {
    match e {
        CensusError::Group(g) => group_code(g),
        CensusError::Region(r) => format!("regions.{}", variant(r)),
        other => format!("census.{}", variant(other)),
    }
}

impl CliError {
    /// Module-qualified error code such as `reps.PingPongFailure`.
    pub fn code(&self) -> String {
        match self {
            CliError::Schema(_) => "cli.SchemaError".into(),
            CliError::Io { .. } => "cli.IoError".into(),
            CliError::Rep(RepError::Group(g)) => group_code(g),
            CliError::Rep(r) => format!("reps.{}", variant(r)),
            CliError::Census(c) => census_code(c),
            CliError::Fit(FitError::Census(c)) => census_code(c),
            CliError::Fit(f) => format!("fitting.{}", variant(f)),
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |e| CliError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

// ---------------------------------------------------------------------------
// Config

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Validate,
    CensusJordan,
    CensusCartan,
    CensusBox,
    Ladder,
    Correlate,
    Ratio,
    Report,
}

impl ExperimentKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentKind::Validate => "validate",
            ExperimentKind::CensusJordan => "census-jordan",
            ExperimentKind::CensusCartan => "census-cartan",
            ExperimentKind::CensusBox => "census-box",
            ExperimentKind::Ladder => "ladder",
            ExperimentKind::Correlate => "correlate",
            ExperimentKind::Ratio => "ratio",
            ExperimentKind::Report => "report",
        }
    }
}

/// `{t_min, t_max, step}`; points `t_min + i·step` up to `t_max`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub t_min: f64,
    pub t_max: f64,
    pub step: f64,
}

impl GridSpec {
    pub fn points(&self) -> Result<Vec<f64>, CliError> {
        let GridSpec { t_min, t_max, step } = *self;
        if !(t_min.is_finite() && t_max.is_finite() && step > 0.0 && t_max >= t_min) {
            return Err(CliError::Schema("t_grid needs finite t_min <= t_max and step > 0".into()));
        }
        let n = ((t_max - t_min) / step + 1e-9).floor() as usize;
        if n > 1_000_000 {
            return Err(CliError::Schema("t_grid has too many points".into()));
        }
        Ok((0..=n).map(|i| t_min + step * i as f64).collect())
    }
}

/// Representation given inline or as a path to a JSON file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RepSource {
    Path(PathBuf),
    Inline(Value),
}

/// Either a number of equal sectors or explicit edges spanning `[0, π]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SectorSpec {
    Equal(usize),
    Edges(Vec<f64>),
}

impl SectorSpec {
    pub fn edges(&self) -> Vec<f64> {
        match self {
            SectorSpec::Equal(n) => equal_sectors(*n),
            SectorSpec::Edges(e) => e.clone(),
        }
    }
}

/// One experiment. Which fields are required depends on `experiment`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub experiment: Option<ExperimentKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub representation: Option<RepSource>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub region: Option<RegionFamily>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_grid: Option<GridSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l_max: Option<usize>,
    #[serde(default)]
    pub primitive_only: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direction: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub widths: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sectors: Option<SectorSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilons: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sources: Option<Vec<LadderSource>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fix_alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probe_depth: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound_tol: Option<f64>,
    /// Recorded in the manifest; every experiment is deterministic.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub force: bool,
}

impl ExperimentConfig {
    pub fn from_path(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(io_err(path))?;
        let mut cfg: Self = serde_json::from_str(&text).map_err(|e| CliError::Schema(e.to_string()))?;
        // relative representation paths are resolved against the config file
        if let (Some(RepSource::Path(p)), Some(dir)) = (&cfg.representation, path.parent()) {
            if p.is_relative() {
                cfg.representation = Some(RepSource::Path(dir.join(p)));
            }
        }
        Ok(cfg)
    }

    fn require<'a, T>(&self, field: &'a Option<T>, name: &str) -> Result<&'a T, CliError> {
        field.as_ref().ok_or_else(|| {
            CliError::Schema(format!(
                "{} requires field `{name}`",
                self.experiment.map_or("experiment", ExperimentKind::as_str)
            ))
        })
    }

    pub fn l_max(&self) -> Result<usize, CliError> {
        let l = *self.require(&self.l_max, "l_max")?;
        if l == 0 || l > L_MAX_CAP {
            return Err(CliError::Schema(format!("l_max must lie in 1..={L_MAX_CAP}")));
        }
        Ok(l)
    }

    pub fn grid(&self) -> Result<Vec<f64>, CliError> {
        self.require(&self.t_grid, "t_grid")?.points()
    }

    pub fn window(&self) -> Option<(f64, f64)> {
        self.window.map(|[a, b]| (a, b))
    }

    /// Loads the representation, running the ping-pong gate unless forced.
    pub fn load_representation(&self) -> Result<Representation, CliError> {
        let doc = match self.require(&self.representation, "representation")? {
            RepSource::Inline(v) => v.clone(),
            RepSource::Path(p) => {
                let text = fs::read_to_string(p).map_err(io_err(p))?;
                serde_json::from_str(&text).map_err(|e| CliError::Schema(format!("{}: {e}", p.display())))?
            }
        };
        let rep = load_representation_with(&doc, self.force)?;
        if !self.force {
            gate(&rep)?;
        }
        Ok(rep)
    }

    fn region_for(&self, rep: &Representation) -> Result<RegionFamily, CliError> {
        let region = self.require(&self.region, "region")?.clone();
        let region = region.validated().map_err(|e| CliError::Schema(e.to_string()))?;
        region.check_dim(rep.dim()).map_err(|e| CliError::Schema(e.to_string()))?;
        Ok(region)
    }

    fn check_vector(&self, v: &[f64], name: &str, d: usize) -> Result<(), CliError> {
        if v.len() != d {
            return Err(CliError::Schema(format!(
                "`{name}` has dimension {}, representation has {d}",
                v.len()
            )));
        }
        Ok(())
    }
}

/// Fails unless every factor passes ping-pong validation.
pub fn gate(rep: &Representation) -> Result<Vec<ValidationReport>, CliError> {
    let reports = validate_all(rep, DEFAULT_TOL)?;
    if let Some(bad) = reports.iter().find(|r| !r.pass) {
        return Err(RepError::PingPongFailure { margin: bad.margin }.into());
    }
    Ok(reports)
}

// ---------------------------------------------------------------------------
// Experiments as library calls

/// Direction `(1, (m̂ + M̂)/2)` normalized, the middle of the observed
/// stretch range of a two-factor representation.
pub fn midpoint_direction(report: &DependenceReport) -> Option<Vec<f64>> {
    let (lo, hi) = (report.stretch_min?, report.stretch_max?);
    normalize(&[1.0, 0.5 * (lo + hi)]).ok()
}

/// Critical exponent of every factor, each fitted over its own trusted
/// range on a grid of spacing `step`.
pub fn factor_exponents(
    rep: &Representation,
    l_max: usize,
    step: f64,
    opts: &CensusOptions,
) -> Result<Vec<FitResult>, CliError> {
    (0..rep.dim())
        .map(|i| {
            let single = rep.single(i);
            let (t_trust, _) = completeness_horizon(&single, l_max, HorizonKind::Cartan, opts)?;
            let n = (t_trust / step).floor().max(0.0) as usize;
            let grid: Vec<f64> = (1..=n.max(1)).map(|j| step * j as f64).collect();
            Ok(factor_critical_exponent(&single, 0, &grid, l_max, opts)?)
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct CorrelateOutcome {
    pub dependence: Option<DependenceReport>,
    pub direction: Vec<f64>,
    pub widths: Vec<f64>,
    pub census: BoxCensus,
    pub fit: FitResult,
    pub factor_fits: Vec<FitResult>,
    pub bounds: BoundReport,
}

/// Box census along `v`, its rate, the factor rates and the bound checks.
#[allow(clippy::too_many_arguments)]
pub fn correlate(
    rep: &Representation,
    direction: Option<Vec<f64>>,
    widths: Option<Vec<f64>>,
    t_grid: &[f64],
    l_max: usize,
    window: Option<(f64, f64)>,
    bound_tol: f64,
    opts: &CensusOptions,
) -> Result<CorrelateOutcome, CliError> {
    let d = rep.dim();
    let dependence = if d >= 2 {
        Some(detect_dependence(rep, DEFAULT_PROBE_DEPTH, DEPENDENCE_TOL)?)
    } else {
        None
    };
    let direction = match direction {
        Some(v) => v,
        None => dependence
            .as_ref()
            .and_then(midpoint_direction)
            .ok_or_else(|| CliError::Schema("correlate needs `direction` unless the representation has two factors".into()))?,
    };
    let widths = widths.unwrap_or_else(|| vec![1.0; d]);
    let census = census_box(rep, &direction, &widths, t_grid, l_max, None, opts)?;
    // narrow boxes come in bursts separated by empty stretches, so the rate
    // is read off the running sum, which grows at the same rate
    let fit = fit_growth(&census.series.running_sum(), window, Some(predicted_alpha(census.series.kind, d)))?;
    let step = if t_grid.len() > 1 { t_grid[1] - t_grid[0] } else { 0.25 };
    let factor_fits = factor_exponents(rep, l_max, step, opts)?;
    let deltas: Vec<f64> = factor_fits.iter().map(|f| f.delta_hat).collect();
    let bounds = check_correlation_bounds(fit.delta_hat, &deltas, &direction, bound_tol);
    Ok(CorrelateOutcome {
        dependence,
        direction,
        widths,
        census,
        fit,
        factor_fits,
        bounds,
    })
}

// ---------------------------------------------------------------------------
// Output

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or(String::new(), |v| format!("{v}"))
}

/// CSV: `T,count,trusted,kind,region_id`.
pub fn series_csv(series: &CountSeries) -> String {
    let mut s = String::from("T,count,trusted,kind,region_id\n");
    for i in 0..series.len() {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            series.t_grid[i],
            series.counts[i],
            u8::from(series.is_trusted(i)),
            series.kind.as_str(),
            series.region
        );
    }
    s
}

/// One row per item: canonical word, coordinates and holonomy angles with
/// 15 significant digits.
pub fn spectra_csv(records: &[SpectrumRecord], d: usize) -> String {
    let mut s = String::from("word");
    for i in 1..=d {
        let _ = write!(s, ",x{i}");
    }
    for i in 1..=d {
        let _ = write!(s, ",theta{i}");
    }
    s.push('\n');
    for r in records {
        s.push_str(&r.word.to_string());
        for x in &r.coords {
            let _ = write!(s, ",{x:.14e}");
        }
        for h in &r.holonomies {
            match h {
                Some(a) => {
                    let _ = write!(s, ",{a:.14e}");
                }
                None => s.push(','),
            }
        }
        s.push('\n');
    }
    s
}

pub fn fit_csv(rows: &[(String, &FitResult)]) -> String {
    let mut s = String::from("label,delta_hat,alpha_hat,log_c_hat,alpha_fixed,t_lo,t_hi,rms_residual,n_points\n");
    for (label, f) in rows {
        let _ = writeln!(
            s,
            "{label},{},{},{},{},{},{},{},{}",
            f.delta_hat,
            f.alpha_hat,
            f.log_c_hat,
            u8::from(f.alpha_fixed),
            f.window.0,
            f.window.1,
            f.rms_residual,
            f.n_points
        );
    }
    s
}

pub fn ladder_csv(ladders: &[LadderResult]) -> String {
    let mut s = String::from("source,epsilon,delta_hat,extrapolated\n");
    for l in ladders {
        for (e, d) in l.epsilons.iter().zip(&l.delta_hats) {
            let _ = writeln!(s, "{},{e},{d},{}", l.source.as_str(), l.extrapolated);
        }
    }
    s
}

pub fn bounds_csv(b: &BoundReport) -> String {
    format!(
        "delta_rho_v,slack_min,slack_mean,tol,upper_pass,strict_pass\n{},{},{},{},{},{}\n",
        b.delta_rho_v,
        b.slack_min,
        b.slack_mean,
        b.tol,
        u8::from(b.upper_pass),
        b.strict_pass.map_or(String::new(), |p| u8::from(p).to_string())
    )
}

pub fn ratio_csv(r: &RatioReport) -> String {
    let mut s = String::from("T,ratio,model\n");
    for (t, x) in &r.ratios {
        let _ = writeln!(s, "{t},{x},{}", r.slope * t + r.intercept);
    }
    s
}

pub fn holonomy_csv(census: &BoxCensus) -> String {
    let mut s = String::from("T,factor,sector_lo,sector_hi,count\n");
    if let Some(rows) = &census.holonomy {
        for (ti, hs) in rows.iter().enumerate() {
            for h in hs {
                for (j, c) in h.counts.iter().enumerate() {
                    let _ = writeln!(
                        s,
                        "{},{},{},{},{c}",
                        census.series.t_grid[ti],
                        h.factor + 1,
                        h.sector_edges[j],
                        h.sector_edges[j + 1]
                    );
                }
            }
        }
    }
    s
}

/// Data that can be written as whitespace-separated plot columns.
pub enum PlotData<'a> {
    /// Columns `T N(T) trusted`.
    Series(&'a CountSeries),
    /// Columns `T N(T) model(T)` over the fit window.
    Fit(&'a CountSeries, &'a FitResult),
    /// Columns `epsilon delta_hat`.
    Ladder(&'a LadderResult),
}

pub fn plot_text(data: &PlotData<'_>) -> String {
    let mut s = String::new();
    match data {
        PlotData::Series(series) => {
            s.push_str("# T N trusted\n");
            for i in 0..series.len() {
                let _ = writeln!(s, "{} {} {}", series.t_grid[i], series.counts[i], u8::from(series.is_trusted(i)));
            }
        }
        PlotData::Fit(series, fit) => {
            s.push_str("# T N model\n");
            for i in 0..series.len() {
                let t = series.t_grid[i];
                if t >= fit.window.0 && t <= fit.window.1 {
                    let _ = writeln!(s, "{t} {} {}", series.counts[i], fit.model(t));
                }
            }
        }
        PlotData::Ladder(l) => {
            s.push_str("# epsilon delta_hat\n");
            for (e, d) in l.epsilons.iter().zip(&l.delta_hats) {
                let _ = writeln!(s, "{e} {d}");
            }
        }
    }
    s
}

/// Writes gnuplot-ready columns with a one-line header comment.
pub fn emit_plot_data(data: &PlotData<'_>, path: &Path) -> Result<(), CliError> {
    fs::write(path, plot_text(data)).map_err(io_err(path))
}

struct Artifacts {
    dir: PathBuf,
    files: Vec<String>,
    report: String,
    t_trust: Option<f64>,
    c_min_hat: Option<f64>,
    extra: serde_json::Map<String, Value>,
}

impl Artifacts {
    fn new(dir: PathBuf) -> Result<Self, CliError> {
        fs::create_dir_all(&dir).map_err(io_err(&dir))?;
        Ok(Self {
            dir,
            files: Vec::new(),
            report: String::new(),
            t_trust: None,
            c_min_hat: None,
            extra: serde_json::Map::new(),
        })
    }

    fn write(&mut self, name: &str, text: &str) -> Result<(), CliError> {
        let path = self.dir.join(name);
        fs::write(&path, text).map_err(io_err(&path))?;
        self.files.push(name.to_string());
        Ok(())
    }

    fn plot(&mut self, name: &str, data: &PlotData<'_>) -> Result<(), CliError> {
        let text = plot_text(data);
        self.write(name, &text)
    }

    fn json(&mut self, name: &str, value: &impl Serialize) -> Result<(), CliError> {
        let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Schema(e.to_string()))?;
        self.write(name, &(text + "\n"))
    }

    fn line(&mut self, text: impl AsRef<str>) {
        self.report.push_str(text.as_ref());
        self.report.push('\n');
    }

    fn horizon(&mut self, series: &CountSeries) {
        self.t_trust = Some(self.t_trust.map_or(series.t_trust, |t| t.min(series.t_trust)));
        self.c_min_hat = Some(self.c_min_hat.map_or(series.c_min_hat, |c| c.min(series.c_min_hat)));
    }
}

fn describe_fit(label: &str, f: &FitResult) -> String {
    format!(
        "{label}: delta = {:.6}, alpha = {:.4}{}, log c = {:.4}, window [{:.3}, {:.3}], {} points, rms {:.4}",
        f.delta_hat,
        f.alpha_hat,
        if f.alpha_fixed { " (fixed)" } else { "" },
        f.log_c_hat,
        f.window.0,
        f.window.1,
        f.n_points,
        f.rms_residual
    )
}

fn describe_series(a: &mut Artifacts, s: &CountSeries) {
    a.line(format!(
        "{} in {}: {} items enumerated up to length {}, c_min = {:.6}, T_trust = {:.4}",
        s.kind.as_str(),
        s.region,
        s.items,
        s.l_max,
        s.c_min_hat,
        s.t_trust
    ));
    let last = s.trusted_len();
    if last > 0 {
        a.line(format!("  N({}) = {} (last trusted point)", s.t_grid[last - 1], s.counts[last - 1]));
    } else {
        a.line("  no grid point lies inside the trusted range");
    }
}

fn census_opts(cfg: &ExperimentConfig, dump: bool) -> CensusOptions {
    CensusOptions {
        workers: cfg.workers,
        dump_spectra: dump,
        ..CensusOptions::default()
    }
}

fn run_validate(cfg: &ExperimentConfig, a: &mut Artifacts) -> Result<(), CliError> {
    let doc_force = ExperimentConfig {
        force: true,
        ..cfg.clone()
    };
    let rep = doc_force.load_representation()?;
    let reports = validate_all(&rep, DEFAULT_TOL)?;
    for r in &reports {
        a.line(format!(
            "factor {}: ping-pong {} (margin {:.6} rad)",
            r.factor + 1,
            if r.pass { "pass" } else { "FAIL" },
            r.margin
        ));
    }
    a.json("validation.json", &reports)?;
    let mut csv = String::from("factor,pass,margin\n");
    for r in &reports {
        let _ = writeln!(csv, "{},{},{}", r.factor + 1, u8::from(r.pass), r.margin);
    }
    a.write("validation.csv", &csv)?;
    if let Some(bad) = reports.iter().find(|r| !r.pass) {
        if !cfg.force {
            return Err(RepError::PingPongFailure { margin: bad.margin }.into());
        }
    }
    Ok(())
}

fn write_census(a: &mut Artifacts, series: &CountSeries, spectra: Option<&[SpectrumRecord]>, d: usize, fix_alpha: Option<f64>, window: Option<(f64, f64)>) -> Result<(), CliError> {
    a.horizon(series);
    a.write("series.csv", &series_csv(series))?;
    a.plot("series.dat", &PlotData::Series(series))?;
    describe_series(a, series);
    if let Some(records) = spectra {
        a.write("spectra.csv", &spectra_csv(records, d))?;
    }
    let alpha = fix_alpha.unwrap_or_else(|| predicted_alpha(series.kind, d));
    match fit_growth(series, window, Some(alpha)) {
        Ok(fit) => {
            a.write("fit.csv", &fit_csv(&[("fixed-alpha".into(), &fit)]))?;
            a.plot("fit.dat", &PlotData::Fit(series, &fit))?;
            a.line(describe_fit("fit", &fit));
            a.extra.insert("delta_hat".into(), json!(fit.delta_hat));
        }
        Err(e) => a.line(format!("fit skipped: {e}")),
    }
    Ok(())
}

fn run_census_jordan(cfg: &ExperimentConfig, a: &mut Artifacts, dump: bool) -> Result<(), CliError> {
    let rep = cfg.load_representation()?;
    let region = cfg.region_for(&rep)?;
    let out = census_jordan(&rep, &region, &cfg.grid()?, cfg.l_max()?, cfg.primitive_only, &census_opts(cfg, dump))?;
    write_census(a, &out.series, out.spectra.as_deref(), rep.dim(), cfg.fix_alpha, cfg.window())
}

fn run_census_cartan(cfg: &ExperimentConfig, a: &mut Artifacts, dump: bool) -> Result<(), CliError> {
    let rep = cfg.load_representation()?;
    let region = cfg.region_for(&rep)?;
    let out = census_cartan(&rep, &region, &cfg.grid()?, cfg.l_max()?, &census_opts(cfg, dump))?;
    write_census(a, &out.series, out.spectra.as_deref(), rep.dim(), cfg.fix_alpha, cfg.window())
}

fn run_census_box(cfg: &ExperimentConfig, a: &mut Artifacts, dump: bool) -> Result<(), CliError> {
    let rep = cfg.load_representation()?;
    let d = rep.dim();
    let v = cfg.require(&cfg.direction, "direction")?;
    cfg.check_vector(v, "direction", d)?;
    let widths = cfg.widths.clone().unwrap_or_else(|| vec![1.0; d]);
    cfg.check_vector(&widths, "widths", d)?;
    let edges = cfg.sectors.as_ref().map(SectorSpec::edges);
    let out = census_box(&rep, v, &widths, &cfg.grid()?, cfg.l_max()?, edges.as_deref(), &census_opts(cfg, dump))?;
    write_census(a, &out.series, out.spectra.as_deref(), d, cfg.fix_alpha, cfg.window())?;
    if out.holonomy.is_some() {
        a.write("holonomy.csv", &holonomy_csv(&out))?;
    }
    Ok(())
}

fn run_ladder(cfg: &ExperimentConfig, a: &mut Artifacts) -> Result<(), CliError> {
    let rep = cfg.load_representation()?;
    let d = rep.dim();
    let v = match &cfg.direction {
        Some(v) => v.clone(),
        None => midpoint_direction(&detect_dependence(&rep, DEFAULT_PROBE_DEPTH, DEPENDENCE_TOL)?)
            .ok_or_else(|| CliError::Schema("ladder requires field `direction`".into()))?,
    };
    cfg.check_vector(&v, "direction", d)?;
    let epsilons = cfg.require(&cfg.epsilons, "epsilons")?;
    let sources = cfg.sources.clone().unwrap_or_else(|| LadderSource::ALL.to_vec());
    let grid = cfg.grid()?;
    let l_max = cfg.l_max()?;
    let opts = LadderOptions {
        census: census_opts(cfg, false),
        window: cfg.window(),
    };
    let mut ladders = Vec::new();
    for source in sources {
        let l = growth_indicator_ladder(&rep, &v, epsilons, &grid, l_max, source, &opts)?;
        a.line(format!(
            "{}: delta_hats {:?}, extrapolated {:.6}",
            source.as_str(),
            l.delta_hats,
            l.extrapolated
        ));
        a.plot(&format!("ladder_{}.dat", source.as_str()), &PlotData::Ladder(&l))?;
        ladders.push(l);
    }
    a.write("ladder.csv", &ladder_csv(&ladders))?;
    a.extra.insert("direction".into(), json!(v));
    Ok(())
}

fn run_correlate(cfg: &ExperimentConfig, a: &mut Artifacts) -> Result<(), CliError> {
    let rep = cfg.load_representation()?;
    let d = rep.dim();
    if let Some(v) = &cfg.direction {
        cfg.check_vector(v, "direction", d)?;
    }
    if let Some(w) = &cfg.widths {
        cfg.check_vector(w, "widths", d)?;
    }
    let out = correlate(
        &rep,
        cfg.direction.clone(),
        cfg.widths.clone(),
        &cfg.grid()?,
        cfg.l_max()?,
        cfg.window(),
        cfg.bound_tol.unwrap_or(DEFAULT_BOUND_TOL),
        &census_opts(cfg, false),
    )?;
    if let Some(dep) = &out.dependence {
        a.line(format!(
            "dependence probe (length {}): rank {} of {}, stretch range [{}, {}]",
            dep.probe_depth,
            dep.rank,
            d,
            fmt_opt(dep.stretch_min),
            fmt_opt(dep.stretch_max)
        ));
        a.json("dependence.json", dep)?;
    }
    a.line(format!("direction v = {:?}, widths = {:?}", out.direction, out.widths));
    a.horizon(&out.census.series);
    describe_series(a, &out.census.series);
    a.write("series.csv", &series_csv(&out.census.series))?;
    a.plot("series.dat", &PlotData::Series(&out.census.series))?;
    a.plot("fit.dat", &PlotData::Fit(&out.census.series.running_sum(), &out.fit))?;
    a.line(describe_fit("box rate (running sum)", &out.fit));
    let mut rows = vec![("box".to_string(), &out.fit)];
    for (i, f) in out.factor_fits.iter().enumerate() {
        a.line(describe_fit(&format!("factor {}", i + 1), f));
        rows.push((format!("factor-{}", i + 1), f));
    }
    a.write("fit.csv", &fit_csv(&rows))?;
    a.write("bounds.csv", &bounds_csv(&out.bounds))?;
    a.line(format!(
        "bounds: min slack {:.6} ({}), mean slack {:.6} ({})",
        out.bounds.slack_min,
        if out.bounds.upper_pass { "pass" } else { "FAIL" },
        out.bounds.slack_mean,
        match out.bounds.strict_pass {
            Some(true) => "pass",
            Some(false) => "FAIL",
            None => "n/a",
        }
    ));
    a.extra.insert("delta_hat".into(), json!(out.fit.delta_hat));
    a.extra.insert("direction".into(), json!(out.direction));
    Ok(())
}

fn run_ratio(cfg: &ExperimentConfig, a: &mut Artifacts) -> Result<(), CliError> {
    let rep = cfg.load_representation()?;
    let region = cfg.region_for(&rep)?;
    if !region.is_cumulative() {
        return Err(CliError::Schema("ratio needs a cumulative region".into()));
    }
    let grid = cfg.grid()?;
    let l_max = cfg.l_max()?;
    let opts = census_opts(cfg, false);
    let cartan = census_cartan(&rep, &region, &grid, l_max, &opts)?.series;
    let jordan = census_jordan(&rep, &region, &grid, l_max, false, &opts)?.series;
    a.horizon(&cartan);
    a.horizon(&jordan);
    describe_series(a, &cartan);
    describe_series(a, &jordan);
    a.write("cartan.csv", &series_csv(&cartan))?;
    a.write("jordan.csv", &series_csv(&jordan))?;
    let r = jordan_cartan_ratio(&cartan, &jordan, cfg.window())?;
    a.write("ratio.csv", &ratio_csv(&r))?;
    a.line(format!(
        "ratio fit: slope {:.6}, intercept {:.6}, R^2 {:.4} over [{:.3}, {:.3}]",
        r.slope, r.intercept, r.r_squared, r.window.0, r.window.1
    ));
    a.extra.insert("slope".into(), json!(r.slope));
    a.extra.insert("r_squared".into(), json!(r.r_squared));
    Ok(())
}

fn run_report(cfg: &ExperimentConfig, a: &mut Artifacts) -> Result<(), CliError> {
    let rep = cfg.load_representation()?;
    let l_max = cfg.l_max()?;
    let opts = census_opts(cfg, false);
    a.line(format!("rank {}, {} factor(s), fields {:?}", rep.rank(), rep.dim(), rep.fields()));
    for r in validate_all(&rep, DEFAULT_TOL)? {
        a.line(format!("factor {}: ping-pong margin {:.6}", r.factor + 1, r.margin));
    }
    if rep.dim() >= 2 {
        let dep = detect_dependence(&rep, cfg.probe_depth.unwrap_or(DEFAULT_PROBE_DEPTH), DEPENDENCE_TOL)?;
        a.line(format!(
            "span rank {} ({}), singular values {:?}",
            dep.rank,
            if dep.dependent { "dependent" } else { "independent" },
            dep.singular_values
        ));
        a.json("dependence.json", &dep)?;
    }
    let (tj, cj) = completeness_horizon(&rep, l_max, HorizonKind::Jordan, &opts)?;
    let (tc, cc) = completeness_horizon(&rep, l_max, HorizonKind::Cartan, &opts)?;
    a.line(format!("Jordan horizon: c_min = {cj:.6}, T_trust = {tj:.4}"));
    a.line(format!("Cartan horizon: c_min = {cc:.6}, T_trust = {tc:.4}"));
    a.t_trust = Some(tj.min(tc));
    a.c_min_hat = Some(cj.min(cc));
    let step = cfg.t_grid.map_or(0.25, |g| g.step);
    let fits = factor_exponents(&rep, l_max, step, &opts)?;
    let rows: Vec<(String, &FitResult)> = fits.iter().enumerate().map(|(i, f)| (format!("factor-{}", i + 1), f)).collect();
    for (label, f) in &rows {
        a.line(describe_fit(label, f));
    }
    a.write("fit.csv", &fit_csv(&rows))?;
    Ok(())
}

/// Runs one experiment, writing artifacts into `out`. Errors are returned
/// after `error.json` has been written.
pub fn run(kind: ExperimentKind, cfg: &ExperimentConfig, out: &Path, dump_spectra: bool) -> Result<PathBuf, CliError> {
    let start = Instant::now();
    let result = (|| {
        if let Some(k) = cfg.experiment {
            if k != kind {
                return Err(CliError::Schema(format!(
                    "config is for `{}`, not `{}`",
                    k.as_str(),
                    kind.as_str()
                )));
            }
        }
        let mut a = Artifacts::new(out.to_path_buf())?;
        match kind {
            ExperimentKind::Validate => run_validate(cfg, &mut a)?,
            ExperimentKind::CensusJordan => run_census_jordan(cfg, &mut a, dump_spectra)?,
            ExperimentKind::CensusCartan => run_census_cartan(cfg, &mut a, dump_spectra)?,
            ExperimentKind::CensusBox => run_census_box(cfg, &mut a, dump_spectra)?,
            ExperimentKind::Ladder => run_ladder(cfg, &mut a)?,
            ExperimentKind::Correlate => run_correlate(cfg, &mut a)?,
            ExperimentKind::Ratio => run_ratio(cfg, &mut a)?,
            ExperimentKind::Report => run_report(cfg, &mut a)?,
        }
        Ok(a)
    })();
    match result {
        Ok(mut a) => {
            let report = std::mem::take(&mut a.report);
            a.write("report.txt", &report)?;
            let manifest = json!({
                "experiment": kind.as_str(),
                "config": cfg,
                "version": env!("CARGO_PKG_VERSION"),
                "c_min_hat": a.c_min_hat,
                "t_trust": a.t_trust,
                "wall_time_s": start.elapsed().as_secs_f64(),
                "files": a.files,
                "results": a.extra,
            });
            let path = out.join("MANIFEST.json");
            fs::write(&path, serde_json::to_string_pretty(&manifest).unwrap_or_default() + "\n").map_err(io_err(&path))?;
            Ok(path)
        }
        Err(e) => {
            write_error(out, &e);
            Err(e)
        }
    }
}

fn write_error(out: &Path, e: &CliError) {
    let record = json!({ "code": e.code(), "message": e.to_string() });
    if fs::create_dir_all(out).is_ok() {
        let _ = fs::write(out.join("error.json"), record.to_string() + "\n");
    }
}

// ---------------------------------------------------------------------------
// Command line

#[derive(Parser, Debug)]
#[command(name = "spectra-census", version, about = "Spectral counting experiments for Schottky groups and their self-joinings")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct CommonArgs {
    /// Experiment config (JSON).
    #[arg(long)]
    pub config: PathBuf,
    /// Worker threads for the census.
    #[arg(long)]
    pub workers: Option<usize>,
    /// Skip the ping-pong gate.
    #[arg(long)]
    pub force: bool,
    /// Also write every enumerated spectrum vector.
    #[arg(long)]
    pub dump_spectra: bool,
    /// Output directory (default: config `out`, else `out`).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Ping-pong validation of every factor.
    Validate(CommonArgs),
    /// Conjugacy classes counted by Jordan projection.
    CensusJordan(CommonArgs),
    /// Group elements counted by Cartan projection.
    CensusCartan(CommonArgs),
    /// Classes in moving boxes, optionally by holonomy sector.
    CensusBox(CommonArgs),
    /// Growth-indicator ladders from tube and cone counts.
    Ladder(CommonArgs),
    /// Box rate against factor rates and the correlation bounds.
    Correlate(CommonArgs),
    /// Linear fit of the Cartan/Jordan count ratio.
    Ratio(CommonArgs),
    /// Summary of a representation: validation, dependence, horizons, rates.
    Report(CommonArgs),
}

impl Command {
    pub fn parts(&self) -> (ExperimentKind, &CommonArgs) {
        match self {
            Command::Validate(a) => (ExperimentKind::Validate, a),
            Command::CensusJordan(a) => (ExperimentKind::CensusJordan, a),
            Command::CensusCartan(a) => (ExperimentKind::CensusCartan, a),
            Command::CensusBox(a) => (ExperimentKind::CensusBox, a),
            Command::Ladder(a) => (ExperimentKind::Ladder, a),
            Command::Correlate(a) => (ExperimentKind::Correlate, a),
            Command::Ratio(a) => (ExperimentKind::Ratio, a),
            Command::Report(a) => (ExperimentKind::Report, a),
        }
    }
}

/// Parses arguments, runs the experiment and returns the exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let (kind, args) = cli.command.parts();
    let loaded = ExperimentConfig::from_path(&args.config);
    let out = args
        .out
        .clone()
        .or_else(|| loaded.as_ref().ok().and_then(|c| c.out.clone()))
        .unwrap_or_else(|| PathBuf::from("out"));
    let mut cfg = match loaded {
        Ok(c) => c,
        Err(e) => {
            write_error(&out, &e);
            eprintln!("error [{}]: {e}", e.code());
            return 1;
        }
    };
    if args.workers.is_some() {
        cfg.workers = args.workers;
    }
    cfg.force |= args.force;
    match run(kind, &cfg, &out, args.dump_spectra) {
        Ok(manifest) => {
            if let Ok(text) = fs::read_to_string(out.join("report.txt")) {
                print!("{text}");
            }
            eprintln!("wrote {}", manifest.display());
            0
        }
        Err(e) => {
            eprintln!("error [{}]: {e}", e.code());
            1
        }
    }
}

pub fn main() -> i32 {
    main_with_args(std::env::args_os())
}
