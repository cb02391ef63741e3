//! Growth-law regression on count series.
//!
//! Counts are modelled as `N(T) ≈ c·e^{δT}/T^α`, fitted by linear least
//! squares on `log N`. Rates are usually extracted with `α` pinned, since
//! over short windows the `log T` column is nearly collinear with the
//! constant.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use thiserror::Error;

use crate::census::{census_cartan, census_jordan, CensusError, CensusOptions, CountKind, CountSeries, SpectrumModel};
use crate::regions::{ConeSpec, RegionFamily, TubeSpec};

/// Ratio of extreme singular values below which a design is rejected.
const CONDITION_LIMIT: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FitError {
    #[error("no grid points in window [{lo}, {hi}]")]
    EmptyWindow { lo: f64, hi: f64 },
    #[error("zero count at T = {t}")]
    ZeroCounts { t: f64 },
    #[error("ill-conditioned fit: {0}")]
    IllConditioned(String),
    #[error("window [{lo}, {hi}] is not inside the trusted range T <= {t_trust}")]
    UntrustedWindow { lo: f64, hi: f64, t_trust: f64 },
    #[error("zero Jordan count at T = {t}")]
    DivisionByZeroCount { t: f64 },
    #[error("series are on different grids")]
    GridMismatch,
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Census(#[from] CensusError),
}

/// Fitted `(δ, α, log c)` with residual diagnostics.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FitResult {
    pub delta_hat: f64,
    pub alpha_hat: f64,
    pub log_c_hat: f64,
    pub alpha_fixed: bool,
    pub window: (f64, f64),
    pub rms_residual: f64,
    pub n_points: usize,
}

impl FitResult {
    /// Model count at `t`.
    pub fn model(&self, t: f64) -> f64 {
        (self.log_c_hat + self.delta_hat * t - self.alpha_hat * t.ln()).exp()
    }
}

/// The polynomial exponent the asymptotics predict for a `d`-dimensional
/// count: `(d+1)/2` for conjugacy classes, `(d−1)/2` for group elements.
pub fn predicted_alpha(kind: CountKind, d: usize) -> f64 {
    match kind {
        CountKind::JordanClasses | CountKind::JordanPrimitiveClasses => (d as f64 + 1.0) / 2.0,
        CountKind::CartanElements => (d as f64 - 1.0) / 2.0,
    }
}

/// `[0.5·T_trust, T_trust]`.
pub fn default_window(series: &CountSeries) -> (f64, f64) {
    (0.5 * series.t_trust, series.t_trust)
}

fn window_indices(series: &CountSeries, window: (f64, f64)) -> Result<Vec<usize>, FitError> {
    let (lo, hi) = window;
    if !(lo.is_finite() && hi.is_finite()) || lo > hi {
        return Err(FitError::EmptyWindow { lo, hi });
    }
    if hi > series.t_trust {
        return Err(FitError::UntrustedWindow {
            lo,
            hi,
            t_trust: series.t_trust,
        });
    }
    let idx: Vec<usize> = (0..series.len())
        .filter(|&i| series.t_grid[i] >= lo && series.t_grid[i] <= hi)
        .collect();
    if idx.is_empty() {
        return Err(FitError::EmptyWindow { lo, hi });
    }
    Ok(idx)
}

/// Least-squares solution with a conditioning check on the column-scaled
/// design.
fn least_squares(a: DMatrix<f64>, y: DVector<f64>) -> Result<DVector<f64>, FitError> {
    let scales: Vec<f64> = a
        .column_iter()
        .map(|c| {
            let n = c.norm();
            if n > 0.0 {
                n
            } else {
                1.0
            }
        })
        .collect();
    let mut scaled = a.clone();
    for (j, s) in scales.iter().enumerate() {
        scaled.column_mut(j).unscale_mut(*s);
    }
    let svd = scaled.svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if !(smin > CONDITION_LIMIT * smax) {
        return Err(FitError::IllConditioned(format!(
            "singular value ratio {:.3e}",
            smin / smax
        )));
    }
    let mut x = svd
        .solve(&y, 0.0)
        .map_err(|e| FitError::IllConditioned(e.to_string()))?;
    for (j, s) in scales.iter().enumerate() {
        x[j] /= s;
    }
    Ok(x)
}

fn fit_points(ts: &[f64], ns: &[f64], window: (f64, f64), fix_alpha: Option<f64>) -> Result<FitResult, FitError> {
    let m = ts.len();
    let need = if fix_alpha.is_some() { 3 } else { 4 };
    if m < need {
        return Err(FitError::IllConditioned(format!("{m} points, need {need}")));
    }
    let uses_log = fix_alpha.is_none_or(|a| a != 0.0);
    if uses_log && ts.iter().any(|&t| t <= 0.0) {
        return Err(FitError::IllConditioned("log T needs T > 0".into()));
    }
    let log_n: Vec<f64> = ns.iter().map(|n| n.ln()).collect();
    let (delta, alpha, log_c) = match fix_alpha {
        Some(alpha) => {
            let a = DMatrix::from_fn(m, 2, |i, j| if j == 0 { ts[i] } else { 1.0 });
            let y = DVector::from_fn(m, |i, _| {
                log_n[i] + if alpha != 0.0 { alpha * ts[i].ln() } else { 0.0 }
            });
            let x = least_squares(a, y)?;
            (x[0], alpha, x[1])
        }
        None => {
            let a = DMatrix::from_fn(m, 3, |i, j| match j {
                0 => ts[i],
                1 => -ts[i].ln(),
                _ => 1.0,
            });
            let y = DVector::from_column_slice(&log_n);
            let x = least_squares(a, y)?;
            (x[0], x[1], x[2])
        }
    };
    let ss: f64 = ts
        .iter()
        .zip(&log_n)
        .map(|(&t, &ln)| {
            let pred = log_c + delta * t - if alpha != 0.0 { alpha * t.ln() } else { 0.0 };
            (ln - pred).powi(2)
        })
        .sum();
    Ok(FitResult {
        delta_hat: delta,
        alpha_hat: alpha,
        log_c_hat: log_c,
        alpha_fixed: fix_alpha.is_some(),
        window,
        rms_residual: (ss / m as f64).sqrt(),
        n_points: m,
    })
}

/// Fits `log N(T) = δT − α·log T + log c` over the grid points of `window`
/// (default `[0.5·T_trust, T_trust]`), with `α` pinned when `fix_alpha` is
/// given.
pub fn fit_growth(series: &CountSeries, window: Option<(f64, f64)>, fix_alpha: Option<f64>) -> Result<FitResult, FitError> {
    let window = window.unwrap_or_else(|| default_window(series));
    let idx = window_indices(series, window)?;
    if let Some(&i) = idx.iter().find(|&&i| series.counts[i] == 0) {
        return Err(FitError::ZeroCounts { t: series.t_grid[i] });
    }
    let ts: Vec<f64> = idx.iter().map(|&i| series.t_grid[i]).collect();
    let ns: Vec<f64> = idx.iter().map(|&i| series.counts[i] as f64).collect();
    fit_points(&ts, &ns, window, fix_alpha)
}

/// Sums of the counts over `blocks` equal consecutive pieces of `window`.
pub fn block_sums(series: &CountSeries, window: (f64, f64), blocks: usize) -> Vec<u64> {
    let (lo, hi) = window;
    let width = (hi - lo) / blocks as f64;
    let mut sums = vec![0u64; blocks];
    for (t, c) in series.t_grid.iter().zip(&series.counts) {
        if *t < lo || *t > hi {
            continue;
        }
        let b = (((t - lo) / width) as usize).min(blocks - 1);
        sums[b] += c;
    }
    sums
}

/// Which census feeds a ladder.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LadderSource {
    CartanTube,
    JordanTube,
    JordanCone,
}

impl LadderSource {
    pub const ALL: [LadderSource; 3] = [LadderSource::CartanTube, LadderSource::JordanTube, LadderSource::JordanCone];

    pub fn as_str(self) -> &'static str {
        match self {
            LadderSource::CartanTube => "cartan-tube",
            LadderSource::JordanTube => "jordan-tube",
            LadderSource::JordanCone => "jordan-cone",
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct LadderOptions {
    pub census: CensusOptions,
    /// Fit window shared by every rung; default is each rung's own
    /// `[0.5·T_trust, T_trust]`.
    pub window: Option<(f64, f64)>,
}

/// Per-ε rates. An ε whose window holds no counts at all gets `−∞`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LadderResult {
    pub source: LadderSource,
    pub epsilons: Vec<f64>,
    pub delta_hats: Vec<f64>,
    pub fits: Vec<Option<FitResult>>,
    pub extrapolated: f64,
}

/// Mean of the last two finite rates, or the last one if only one exists.
pub fn extrapolate(delta_hats: &[f64]) -> f64 {
    let finite: Vec<f64> = delta_hats.iter().copied().filter(|d| d.is_finite()).collect();
    match finite.as_slice() {
        [] => f64::NEG_INFINITY,
        [x] => *x,
        [.., a, b] => 0.5 * (a + b),
    }
}

fn ladder_series<M: SpectrumModel>(
    model: &M,
    v: &[f64],
    eps: f64,
    t_grid: &[f64],
    l_max: usize,
    source: LadderSource,
    opts: &LadderOptions,
) -> Result<CountSeries, FitError> {
    let out = match source {
        LadderSource::CartanTube => {
            let fam = RegionFamily::Tube(TubeSpec::new(v.to_vec(), eps, None).map_err(CensusError::from)?);
            census_cartan(model, &fam, t_grid, l_max, &opts.census)?
        }
        LadderSource::JordanTube => {
            let fam = RegionFamily::Tube(TubeSpec::new(v.to_vec(), eps, None).map_err(CensusError::from)?);
            census_jordan(model, &fam, t_grid, l_max, false, &opts.census)?
        }
        LadderSource::JordanCone => {
            // a cone whose cross-section at the top of the window has radius ε
            let t_hi = opts.window.map_or(t_grid[t_grid.len() - 1], |w| w.1);
            let fam = RegionFamily::Cone(ConeSpec::new(v.to_vec(), (eps / t_hi).atan()).map_err(CensusError::from)?);
            census_jordan(model, &fam, t_grid, l_max, false, &opts.census)?
        }
    };
    Ok(out.series)
}

fn ladder_rung(series: &CountSeries, window: Option<(f64, f64)>) -> Result<Option<FitResult>, FitError> {
    let window = window.unwrap_or_else(|| default_window(series));
    let idx = window_indices(series, window)?;
    if idx.iter().all(|&i| series.counts[i] == 0) {
        return Ok(None);
    }
    // drop the empty start of the window
    let start = idx.iter().rposition(|&i| series.counts[i] == 0).map_or(0, |p| p + 1);
    let idx = &idx[start..];
    if idx.len() < 3 {
        return Err(FitError::UntrustedWindow {
            lo: window.0,
            hi: window.1,
            t_trust: series.t_trust,
        });
    }
    let ts: Vec<f64> = idx.iter().map(|&i| series.t_grid[i]).collect();
    let ns: Vec<f64> = idx.iter().map(|&i| series.counts[i] as f64).collect();
    fit_points(&ts, &ns, (ts[0], ts[ts.len() - 1]), Some(0.0)).map(Some)
}

/// Rates of tube (or cone) counts around `v` for a decreasing sequence of
/// widths, each fitted with `α = 0`.
pub fn growth_indicator_ladder<M: SpectrumModel>(
    model: &M,
    v: &[f64],
    epsilons: &[f64],
    t_grid: &[f64],
    l_max: usize,
    source: LadderSource,
    opts: &LadderOptions,
) -> Result<LadderResult, FitError> {
    if epsilons.is_empty() || epsilons.iter().any(|e| !(*e > 0.0)) {
        return Err(FitError::InvalidInput("epsilons must be positive".into()));
    }
    if epsilons.windows(2).any(|w| w[0] <= w[1]) {
        return Err(FitError::InvalidInput("epsilons must decrease".into()));
    }
    if t_grid.is_empty() {
        return Err(CensusError::InvalidGrid("empty grid".into()).into());
    }
    let mut fits = Vec::with_capacity(epsilons.len());
    for &eps in epsilons {
        let series = ladder_series(model, v, eps, t_grid, l_max, source, opts)?;
        fits.push(ladder_rung(&series, opts.window)?);
    }
    let delta_hats: Vec<f64> = fits
        .iter()
        .map(|f| f.as_ref().map_or(f64::NEG_INFINITY, |f| f.delta_hat))
        .collect();
    Ok(LadderResult {
        source,
        epsilons: epsilons.to_vec(),
        extrapolated: extrapolate(&delta_hats),
        delta_hats,
        fits,
    })
}

/// Rate of the displacement count `#{γ : μᵢ(γ) ≤ T}` of factor `i`
/// (zero-based), fitted with `α = 0`.
pub fn factor_critical_exponent<M: SpectrumModel>(
    model: &M,
    i: usize,
    t_grid: &[f64],
    l_max: usize,
    opts: &CensusOptions,
) -> Result<FitResult, FitError> {
    if i >= model.dim() {
        return Err(FitError::InvalidInput(format!("factor {i} out of range for dimension {}", model.dim())));
    }
    let out = census_cartan(model, &RegionFamily::Coordinate { index: i }, t_grid, l_max, opts)?;
    fit_growth(&out.series, None, Some(0.0))
}

/// Slack of an estimated correlated rate against the factor rates.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub delta_rho_v: f64,
    pub deltas: Vec<f64>,
    pub v: Vec<f64>,
    /// `minᵢ δᵢvᵢ − δ̂`.
    pub slack_min: f64,
    /// `(1/d)·Σ δᵢvᵢ − δ̂`.
    pub slack_mean: f64,
    pub tol: f64,
    /// `slack_min ≥ −tol`.
    pub upper_pass: bool,
    /// `slack_mean > −tol`; `None` when `d < 2`.
    pub strict_pass: Option<bool>,
}

pub const DEFAULT_BOUND_TOL: f64 = 0.1;

pub fn check_correlation_bounds(delta_rho_v: f64, deltas: &[f64], v: &[f64], tol: f64) -> BoundReport {
    let products: Vec<f64> = deltas.iter().zip(v).map(|(d, x)| d * x).collect();
    let min = products.iter().copied().fold(f64::INFINITY, f64::min);
    let mean = products.iter().sum::<f64>() / products.len() as f64;
    let slack_min = min - delta_rho_v;
    let slack_mean = mean - delta_rho_v;
    BoundReport {
        delta_rho_v,
        deltas: deltas.to_vec(),
        v: v.to_vec(),
        slack_min,
        slack_mean,
        tol,
        upper_pass: slack_min >= -tol,
        strict_pass: (products.len() >= 2).then_some(slack_mean > -tol),
    }
}

/// Linear fit of the pointwise count ratio `N_cartan/N_jordan`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RatioReport {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub window: (f64, f64),
    pub n_points: usize,
    /// `(T, r(T))` over the window.
    pub ratios: Vec<(f64, f64)>,
}

pub fn jordan_cartan_ratio(
    cartan: &CountSeries,
    jordan: &CountSeries,
    window: Option<(f64, f64)>,
) -> Result<RatioReport, FitError> {
    if cartan.t_grid != jordan.t_grid {
        return Err(FitError::GridMismatch);
    }
    let t_trust = cartan.t_trust.min(jordan.t_trust);
    let window = window.unwrap_or((0.5 * t_trust, t_trust));
    let idx = window_indices(jordan, window)?;
    window_indices(cartan, window)?;
    let mut ratios = Vec::with_capacity(idx.len());
    for &i in &idx {
        let t = jordan.t_grid[i];
        if jordan.counts[i] == 0 {
            return Err(FitError::DivisionByZeroCount { t });
        }
        ratios.push((t, cartan.counts[i] as f64 / jordan.counts[i] as f64));
    }
    let m = ratios.len();
    if m < 3 {
        return Err(FitError::IllConditioned(format!("{m} points, need 3")));
    }
    let a = DMatrix::from_fn(m, 2, |i, j| if j == 0 { ratios[i].0 } else { 1.0 });
    let y = DVector::from_fn(m, |i, _| ratios[i].1);
    let x = least_squares(a, y)?;
    let mean = ratios.iter().map(|r| r.1).sum::<f64>() / m as f64;
    let ss_tot: f64 = ratios.iter().map(|r| (r.1 - mean).powi(2)).sum();
    let ss_res: f64 = ratios.iter().map(|r| (r.1 - x[0] * r.0 - x[1]).powi(2)).sum();
    let r_squared = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    Ok(RatioReport {
        slope: x[0],
        intercept: x[1],
        r_squared,
        window,
        n_points: m,
        ratios,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::census::WordMetric;

    fn synthetic(f: impl Fn(f64) -> f64, lo: f64, hi: f64, step: f64) -> CountSeries {
        let n = ((hi - lo) / step).round() as usize;
        let ts: Vec<f64> = (0..=n).map(|i| lo + step * i as f64).collect();
        let ns = ts.iter().map(|&t| f(t).round() as u64).collect();
        CountSeries::from_counts(ts, ns, CountKind::JordanClasses)
    }

    #[test]
    fn free_fit_recovers_shape() {
        let s = synthetic(|t| (2.0 * t).exp() / t.powf(1.5), 8.0, 16.0, 0.25);
        let f = fit_growth(&s, Some((8.0, 16.0)), None).unwrap();
        assert!((f.delta_hat - 2.0).abs() < 0.04, "{f:?}");
        assert!((f.alpha_hat - 1.5).abs() < 0.3, "{f:?}");
    }

    #[test]
    fn pure_exponential_and_constant() {
        let s = synthetic(f64::exp, 8.0, 16.0, 0.5);
        let f = fit_growth(&s, Some((8.0, 16.0)), Some(0.0)).unwrap();
        assert!((f.delta_hat - 1.0).abs() < 0.01);
        let c = synthetic(|_| 42.0, 1.0, 10.0, 1.0);
        let f = fit_growth(&c, Some((1.0, 10.0)), Some(0.0)).unwrap();
        assert!(f.delta_hat.abs() < 0.01);
        assert!(f.rms_residual < 1e-12);
    }

    #[test]
    fn scaling_counts_moves_only_the_constant() {
        let s = synthetic(|t| (1.3 * t).exp() / t, 5.0, 12.0, 0.5);
        let mut s7 = s.clone();
        s7.counts.iter_mut().for_each(|c| *c *= 7);
        let a = fit_growth(&s, Some((5.0, 12.0)), None).unwrap();
        let b = fit_growth(&s7, Some((5.0, 12.0)), None).unwrap();
        assert!((a.delta_hat - b.delta_hat).abs() < 1e-9);
        assert!((a.alpha_hat - b.alpha_hat).abs() < 1e-9);
        assert!((b.log_c_hat - a.log_c_hat - 7f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn fit_errors() {
        let s = synthetic(|t| t, 0.0, 10.0, 1.0);
        assert!(matches!(fit_growth(&s, Some((0.0, 3.0)), Some(0.0)), Err(FitError::ZeroCounts { .. })));
        assert!(matches!(fit_growth(&s, Some((3.2, 3.8)), None), Err(FitError::EmptyWindow { .. })));
        assert!(matches!(fit_growth(&s, Some((2.0, 4.0)), None), Err(FitError::IllConditioned(_))));
        let mut u = s.clone();
        u.t_trust = 5.0;
        assert!(matches!(fit_growth(&u, Some((2.0, 8.0)), None), Err(FitError::UntrustedWindow { .. })));
    }

    #[test]
    fn bounds_arithmetic() {
        let v = [1.0 / 2f64.sqrt(); 2];
        let r = check_correlation_bounds(0.3, &[1.0, 1.0], &v, DEFAULT_BOUND_TOL);
        assert!((r.slack_min - 0.40710678).abs() < 1e-6);
        assert!((r.slack_mean - 0.40710678).abs() < 1e-6);
        assert!(r.upper_pass && r.strict_pass == Some(true));
        let bad = check_correlation_bounds(0.9, &[1.0, 1.0], &v, DEFAULT_BOUND_TOL);
        assert!(!bad.upper_pass);
        assert_eq!(check_correlation_bounds(0.1, &[1.0], &[1.0], 0.1).strict_pass, None);
    }

    #[test]
    fn ratio_of_synthetic_pair() {
        let c = synthetic(f64::exp, 6.0, 14.0, 0.5);
        let j = synthetic(|t| t.exp() / t, 6.0, 14.0, 0.5);
        let r = jordan_cartan_ratio(&c, &j, Some((6.0, 14.0))).unwrap();
        assert!((r.slope - 1.0).abs() < 0.05, "{r:?}");
        assert!(r.r_squared > 0.99);
        let same = jordan_cartan_ratio(&j, &j, Some((6.0, 14.0))).unwrap();
        assert!(same.slope.abs() < 1e-12);
        let z = synthetic(|t| if t < 8.0 { 0.0 } else { t }, 6.0, 14.0, 0.5);
        assert!(matches!(
            jordan_cartan_ratio(&c, &z, Some((6.0, 14.0))),
            Err(FitError::DivisionByZeroCount { .. })
        ));
    }

    #[test]
    fn extrapolation_rule() {
        assert_eq!(extrapolate(&[1.0, 0.8, 0.6]), 0.7);
        assert_eq!(extrapolate(&[1.0, f64::NEG_INFINITY]), 1.0);
        assert_eq!(extrapolate(&[f64::NEG_INFINITY]), f64::NEG_INFINITY);
    }

    #[test]
    fn rank_one_ladder_is_flat() {
        let toy = WordMetric::uniform(2, 1.0);
        let grid: Vec<f64> = (0..=40).map(|i| 0.5 + 0.25 * i as f64).collect();
        let opts = LadderOptions::default();
        let r = growth_indicator_ladder(&toy, &[1.0], &[2.0, 1.0, 0.5], &grid, 10, LadderSource::JordanTube, &opts).unwrap();
        assert!(r.delta_hats.windows(2).all(|w| w[0] == w[1]), "{r:?}");
        assert!(matches!(
            growth_indicator_ladder(&toy, &[1.0], &[0.5, 1.0], &grid, 10, LadderSource::JordanTube, &opts),
            Err(FitError::InvalidInput(_))
        ));
    }

    #[test]
    fn toy_factor_exponent() {
        let s = 2.0;
        let toy = WordMetric::uniform(2, s);
        let grid: Vec<f64> = (1..=56).map(|i| 0.5 * i as f64).collect();
        let f = factor_critical_exponent(&toy, 0, &grid, 14, &CensusOptions::default()).unwrap();
        assert!((f.delta_hat - 3f64.ln() / s).abs() < 0.05, "{f:?}");
    }
}
