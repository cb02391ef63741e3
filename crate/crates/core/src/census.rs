//! Spectrum censuses over conjugacy classes and group elements.
//!
//! Words are generated by a depth-first walk whose path products are
//! extended one letter at a time, so each node costs one multiplication per
//! factor. The walk is split into subtrees rooted at a fixed prefix depth;
//! each subtree owns private counters and the partial tallies are merged in
//! shard order. Counts are integer sums, the minimal-stretch estimate is a
//! minimum, and every path product is computed by the same sequence of
//! multiplications whatever the worker count, so results are bit-identical
//! across thread counts.
//!
//! Each spectrum vector is classified against the whole `T`-grid at once:
//! the set of grid points whose region contains the vector is an interval,
//! found by binary search, and recorded in a difference array.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{AlgebraError, Field, RenormMatrix, DEFAULT_TOL};
use crate::group::{
    projected_classes, projected_words, reduced_word_count, GroupError, Letter, ShardRoot, WalkMode, Walker,
    Word,
};
use crate::regions::{BoxShape, RegionError, RegionFamily};
use crate::reps::Representation;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CensusError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Region(#[from] RegionError),
    #[error("factor {factor} is not loxodromic on class {word}: {source}")]
    NonLoxodromic {
        factor: usize,
        word: String,
        #[source]
        source: AlgebraError,
    },
    #[error("invalid T-grid: {0}")]
    InvalidGrid(String),
    #[error("invalid sectors: {0}")]
    InvalidSectors(String),
    #[error("no items enumerated")]
    InsufficientData,
    #[error("worker pool: {0}")]
    Pool(String),
}

/// A source of spectrum vectors along a word walk.
pub trait SpectrumModel: Sync {
    /// Product state of a path.
    type State: Clone + Send;

    fn rank(&self) -> usize;

    fn dim(&self) -> usize;

    /// `true` for factors that carry a holonomy angle.
    fn holonomy_factors(&self) -> Vec<bool>;

    fn identity(&self) -> Self::State;

    /// `out = parent · letter`.
    fn extend(&self, parent: &Self::State, letter: Letter, out: &mut Self::State);

    /// Jordan vector of the class of a cyclically reduced path.
    fn jordan(&self, state: &Self::State, coords: &mut [f64], holonomy: &mut [Option<f64>]) -> Result<(), (usize, AlgebraError)>;

    /// Cartan vector of the path element.
    fn cartan(&self, state: &Self::State, coords: &mut [f64]);
}

impl SpectrumModel for Representation {
    type State = Vec<RenormMatrix>;

    fn rank(&self) -> usize {
        Representation::rank(self)
    }

    fn dim(&self) -> usize {
        Representation::dim(self)
    }

    fn holonomy_factors(&self) -> Vec<bool> {
        self.fields().into_iter().map(|f| f == Field::Complex).collect()
    }

    fn identity(&self) -> Self::State {
        self.factors().iter().map(|f| RenormMatrix::identity(f.field())).collect()
    }

    #[inline]
    fn extend(&self, parent: &Self::State, letter: Letter, out: &mut Self::State) {
        for ((o, p), f) in out.iter_mut().zip(parent).zip(self.factors()) {
            *o = p.mul(f.image(letter));
        }
    }

    fn jordan(&self, state: &Self::State, coords: &mut [f64], holonomy: &mut [Option<f64>]) -> Result<(), (usize, AlgebraError)> {
        for (i, g) in state.iter().enumerate() {
            coords[i] = g.jordan_length(DEFAULT_TOL).map_err(|e| (i, e))?;
            holonomy[i] = match g.field() {
                Field::Real => None,
                Field::Complex => Some(g.holonomy_angle(DEFAULT_TOL).map_err(|e| (i, e))?),
            };
        }
        Ok(())
    }

    fn cartan(&self, state: &Self::State, coords: &mut [f64]) {
        for (c, g) in coords.iter_mut().zip(state) {
            *c = g.cartan_length();
        }
    }
}

/// Combinatorial spectrum in which every letter adds a fixed weight per
/// coordinate, like translation lengths on a tree. Both projections of a
/// cyclically reduced word equal the sum of its letter weights, which makes
/// it an exact baseline for counting: with equal weights `s` in rank `k`
/// the element count grows like `(2k−1)^{T/s}`.
#[derive(Clone, Debug, PartialEq)]
pub struct WordMetric {
    rank: usize,
    // weights[factor][generator]
    weights: Vec<Vec<f64>>,
}

impl WordMetric {
    pub fn new(rank: usize, weights: Vec<Vec<f64>>) -> Self {
        assert!(weights.iter().all(|w| w.len() == rank), "one weight per generator");
        Self { rank, weights }
    }

    /// One coordinate, same weight for every generator.
    pub fn uniform(rank: usize, weight: f64) -> Self {
        Self::new(rank, vec![vec![weight; rank]])
    }
}

impl SpectrumModel for WordMetric {
    type State = Vec<f64>;

    fn rank(&self) -> usize {
        self.rank
    }

    fn dim(&self) -> usize {
        self.weights.len()
    }

    fn holonomy_factors(&self) -> Vec<bool> {
        vec![false; self.weights.len()]
    }

    fn identity(&self) -> Self::State {
        vec![0.0; self.weights.len()]
    }

    fn extend(&self, parent: &Self::State, letter: Letter, out: &mut Self::State) {
        for ((o, p), w) in out.iter_mut().zip(parent).zip(&self.weights) {
            *o = p + w[letter.generator()];
        }
    }

    fn jordan(&self, state: &Self::State, coords: &mut [f64], holonomy: &mut [Option<f64>]) -> Result<(), (usize, AlgebraError)> {
        coords.copy_from_slice(state);
        holonomy.iter_mut().for_each(|h| *h = None);
        Ok(())
    }

    fn cartan(&self, state: &Self::State, coords: &mut [f64]) {
        coords.copy_from_slice(state);
    }
}

/// Worker and budget settings.
#[derive(Clone, Debug, PartialEq)]
pub struct CensusOptions {
    /// Worker threads; `None` uses the ambient rayon pool.
    pub workers: Option<usize>,
    /// Prefix depth of shard roots; `None` picks one from the rank.
    pub shard_depth: Option<usize>,
    /// Maximum projected number of enumerated words.
    pub budget: u64,
    /// Keep every spectrum vector.
    pub dump_spectra: bool,
}

impl Default for CensusOptions {
    fn default() -> Self {
        Self {
            workers: None,
            shard_depth: None,
            budget: crate::group::default_budget(),
            dump_spectra: false,
        }
    }
}

impl CensusOptions {
    pub fn with_workers(workers: usize) -> Self {
        Self {
            workers: Some(workers),
            ..Self::default()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CountKind {
    JordanClasses,
    JordanPrimitiveClasses,
    CartanElements,
}

impl CountKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CountKind::JordanClasses => "jordan-classes",
            CountKind::JordanPrimitiveClasses => "jordan-primitive-classes",
            CountKind::CartanElements => "cartan-elements",
        }
    }
}

/// Counts over a `T`-grid with a completeness horizon.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CountSeries {
    pub t_grid: Vec<f64>,
    pub counts: Vec<u64>,
    pub kind: CountKind,
    pub region: String,
    /// Whether regions grow with `T` (false for moving boxes).
    pub cumulative: bool,
    pub l_max: usize,
    /// Counts at `T ≤ t_trust` include every item of the infinite group.
    pub t_trust: f64,
    pub c_min_hat: f64,
    /// Items enumerated.
    pub items: u64,
}

impl CountSeries {
    /// Wraps externally produced counts; the whole grid is trusted.
    pub fn from_counts(t_grid: Vec<f64>, counts: Vec<u64>, kind: CountKind) -> Self {
        let t_trust = t_grid.last().copied().unwrap_or(f64::NEG_INFINITY);
        Self {
            t_grid,
            counts,
            kind,
            region: "external".into(),
            cumulative: true,
            l_max: 0,
            t_trust,
            c_min_hat: f64::NAN,
            items: 0,
        }
    }

    pub fn is_trusted(&self, i: usize) -> bool {
        self.t_grid[i] <= self.t_trust
    }

    pub fn len(&self) -> usize {
        self.t_grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t_grid.is_empty()
    }

    /// Running sums `S(Tⱼ) = Σ_{i ≤ j} N(Tᵢ)`. For a moving-box series this
    /// is a positive cumulative series growing at the same exponential
    /// rate, which smooths out the bursts of a narrow box.
    pub fn running_sum(&self) -> CountSeries {
        let mut acc = 0u64;
        CountSeries {
            counts: self
                .counts
                .iter()
                .map(|c| {
                    acc += c;
                    acc
                })
                .collect(),
            cumulative: true,
            region: format!("sum:{}", self.region),
            ..self.clone()
        }
    }

    /// Index range of trusted grid points.
    pub fn trusted_len(&self) -> usize {
        self.t_grid.partition_point(|&t| t <= self.t_trust)
    }
}

/// Per-sector counts of one complex factor at one grid point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HolonomyHistogram {
    pub factor: usize,
    pub sector_edges: Vec<f64>,
    pub counts: Vec<u64>,
}

/// One enumerated item.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumRecord {
    pub word: Word,
    pub coords: Vec<f64>,
    pub holonomies: Vec<Option<f64>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CensusOutput {
    pub series: CountSeries,
    pub spectra: Option<Vec<SpectrumRecord>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoxCensus {
    pub series: CountSeries,
    /// Indexed by grid point, then by complex factor.
    pub holonomy: Option<Vec<Vec<HolonomyHistogram>>>,
    pub spectra: Option<Vec<SpectrumRecord>>,
}

/// `n` equal sectors of `[0, π]`.
pub fn equal_sectors(n: usize) -> Vec<f64> {
    (0..=n).map(|i| if i == n { PI } else { PI * i as f64 / n as f64 }).collect()
}

fn check_grid(grid: &[f64]) -> Result<(), CensusError> {
    if grid.is_empty() {
        return Err(CensusError::InvalidGrid("empty grid".into()));
    }
    if grid.iter().any(|t| !t.is_finite()) {
        return Err(CensusError::InvalidGrid("non-finite grid point".into()));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CensusError::InvalidGrid("grid must be strictly increasing".into()));
    }
    Ok(())
}

fn check_sectors(edges: &[f64]) -> Result<(), CensusError> {
    if edges.len() < 2 {
        return Err(CensusError::InvalidSectors("need at least one sector".into()));
    }
    if edges[0] != 0.0 || edges[edges.len() - 1] < PI {
        return Err(CensusError::InvalidSectors("edges must span [0, π]".into()));
    }
    if edges.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CensusError::InvalidSectors("edges must increase".into()));
    }
    Ok(())
}

fn sector_of(angle: f64, edges: &[f64]) -> usize {
    let n = edges.len() - 1;
    edges.partition_point(|&e| e <= angle).saturating_sub(1).min(n - 1)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Projection {
    Jordan { primitive_only: bool },
    Cartan,
}

struct Plan<'a> {
    family: &'a RegionFamily,
    grid: &'a [f64],
    projection: Projection,
    // complex factor indices and sector edges
    sectors: Option<(Vec<usize>, &'a [f64])>,
    dump: bool,
}

struct Tally {
    diff: Vec<i64>,
    // [complex factor][sector][grid diff]
    sector_diff: Vec<Vec<Vec<i64>>>,
    c_min: f64,
    items: u64,
    spectra: Vec<SpectrumRecord>,
}

impl Tally {
    fn new(plan: &Plan<'_>) -> Self {
        let g = plan.grid.len() + 1;
        let sector_diff = match &plan.sectors {
            Some((factors, edges)) => vec![vec![vec![0; g]; edges.len() - 1]; factors.len()],
            None => Vec::new(),
        };
        Self {
            diff: vec![0; g],
            sector_diff,
            c_min: f64::INFINITY,
            items: 0,
            spectra: Vec::new(),
        }
    }

    fn merge(&mut self, other: Tally) {
        for (a, b) in self.diff.iter_mut().zip(other.diff) {
            *a += b;
        }
        for (fa, fb) in self.sector_diff.iter_mut().zip(other.sector_diff) {
            for (sa, sb) in fa.iter_mut().zip(fb) {
                for (a, b) in sa.iter_mut().zip(sb) {
                    *a += b;
                }
            }
        }
        self.c_min = self.c_min.min(other.c_min);
        self.items += other.items;
        self.spectra.extend(other.spectra);
    }
}

fn prefix_sum(diff: &[i64], n: usize) -> Vec<u64> {
    let mut acc = 0i64;
    diff[..n]
        .iter()
        .map(|d| {
            acc += d;
            acc as u64
        })
        .collect()
}

struct Scratch {
    coords: Vec<f64>,
    holonomy: Vec<Option<f64>>,
}

fn visit_node<M: SpectrumModel>(
    model: &M,
    plan: &Plan<'_>,
    state: &M::State,
    path: &[u8],
    class_period: Option<usize>,
    scratch: &mut Scratch,
    tally: &mut Tally,
) -> Result<(), CensusError> {
    let depth = path.len();
    match plan.projection {
        Projection::Jordan { primitive_only } => {
            let Some(period) = class_period else {
                return Ok(());
            };
            model
                .jordan(state, &mut scratch.coords, &mut scratch.holonomy)
                .map_err(|(factor, source)| CensusError::NonLoxodromic {
                    factor,
                    word: Word::from_codes_unchecked(path).to_string(),
                    source,
                })?;
            tally.c_min = tally.c_min.min(plan.family.order_value(&scratch.coords) / depth as f64);
            tally.items += 1;
            if primitive_only && period != depth {
                return Ok(());
            }
        }
        Projection::Cartan => {
            model.cartan(state, &mut scratch.coords);
            tally.c_min = tally.c_min.min(plan.family.order_value(&scratch.coords) / depth as f64);
            tally.items += 1;
        }
    }
    let (lo, hi) = plan.family.grid_span(&scratch.coords, plan.grid);
    if lo < hi {
        tally.diff[lo] += 1;
        tally.diff[hi] -= 1;
        if let Some((factors, edges)) = &plan.sectors {
            for (slot, &f) in factors.iter().enumerate() {
                if let Some(angle) = scratch.holonomy[f] {
                    let s = sector_of(angle, edges);
                    tally.sector_diff[slot][s][lo] += 1;
                    tally.sector_diff[slot][s][hi] -= 1;
                }
            }
        }
    }
    if plan.dump {
        tally.spectra.push(SpectrumRecord {
            word: Word::from_codes_unchecked(path),
            coords: scratch.coords.clone(),
            holonomies: scratch.holonomy.clone(),
        });
    }
    Ok(())
}

fn walk_tally<M: SpectrumModel>(
    model: &M,
    plan: &Plan<'_>,
    mut walker: Walker,
    root: Option<&ShardRoot>,
    l_max: usize,
) -> Result<Tally, CensusError> {
    let mut tally = Tally::new(plan);
    let mut states: Vec<M::State> = vec![model.identity(); l_max + 1];
    if let Some(root) = root {
        for (t, l) in root.word().letters().iter().enumerate() {
            let (head, tail) = states.split_at_mut(t + 1);
            model.extend(&head[t], *l, &mut tail[0]);
        }
    }
    let d = model.dim();
    let mut scratch = Scratch {
        coords: vec![0.0; d],
        holonomy: vec![None; d],
    };
    let floor = root.map_or(0, |r| r.word().len());
    while let Some(node) = walker.next_node() {
        let t = node.depth;
        if t > floor {
            let (head, tail) = states.split_at_mut(t);
            model.extend(&head[t - 1], node.letter, &mut tail[0]);
        }
        visit_node(model, plan, &states[t], walker.path(), node.class_period, &mut scratch, &mut tally)?;
    }
    Ok(tally)
}

fn default_shard_depth(k: usize, l_max: usize) -> usize {
    let mut s = 1;
    while reduced_word_count(k, s) < 64 && s < l_max {
        s += 1;
    }
    s.min(l_max)
}

fn run_census<M: SpectrumModel>(
    model: &M,
    plan: &Plan<'_>,
    l_max: usize,
    opts: &CensusOptions,
) -> Result<Tally, CensusError> {
    let k = model.rank();
    if k == 0 || k > 26 {
        return Err(GroupError::InvalidRank(k).into());
    }
    if l_max == 0 {
        return Err(GroupError::InvalidLength.into());
    }
    let mode = match plan.projection {
        Projection::Jordan { .. } => WalkMode::Necklace,
        Projection::Cartan => WalkMode::Reduced,
    };
    let projected = match mode {
        WalkMode::Necklace => projected_classes(k, l_max),
        WalkMode::Reduced => projected_words(k, l_max),
    };
    if projected > opts.budget {
        return Err(GroupError::CapacityExceeded {
            projected,
            budget: opts.budget,
        }
        .into());
    }
    let depth = opts.shard_depth.unwrap_or_else(|| default_shard_depth(k, l_max)).clamp(1, l_max);
    let roots = Walker::shard_roots(k, depth, mode);
    let job = || -> Result<Tally, CensusError> {
        let mut total = if depth > 1 {
            walk_tally(model, plan, Walker::new(k, depth - 1, mode), None, l_max)?
        } else {
            Tally::new(plan)
        };
        let parts: Vec<Result<Tally, CensusError>> = roots
            .par_iter()
            .map(|root| walk_tally(model, plan, Walker::subtree(k, l_max, mode, root), Some(root), l_max))
            .collect();
        for part in parts {
            total.merge(part?);
        }
        Ok(total)
    };
    let mut tally = match opts.workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| CensusError::Pool(e.to_string()))?
            .install(job)?,
        None => job()?,
    };
    if plan.dump {
        tally
            .spectra
            .sort_by(|a, b| (a.word.len(), a.word.letters()).cmp(&(b.word.len(), b.word.letters())));
    }
    Ok(tally)
}

/// `T_trust = ĉ·(L_max − 1) − ĉ`, with `ĉ` the minimal observed ratio of
/// spectrum size to word length.
pub fn trust_horizon(c_min_hat: f64, l_max: usize) -> f64 {
    c_min_hat * (l_max as f64 - 1.0) - c_min_hat
}

fn build_series(
    plan: &Plan<'_>,
    tally: &Tally,
    kind: CountKind,
    l_max: usize,
) -> Result<CountSeries, CensusError> {
    if tally.items == 0 {
        return Err(CensusError::InsufficientData);
    }
    let n = plan.grid.len();
    Ok(CountSeries {
        t_grid: plan.grid.to_vec(),
        counts: prefix_sum(&tally.diff, n),
        kind,
        region: plan.family.id(),
        cumulative: plan.family.is_cumulative(),
        l_max,
        t_trust: plan.family.horizon(trust_horizon(tally.c_min, l_max)),
        c_min_hat: tally.c_min,
        items: tally.items,
    })
}

fn prepare(model_dim: usize, family: &RegionFamily, grid: &[f64]) -> Result<(), CensusError> {
    check_grid(grid)?;
    family.check_dim(model_dim)?;
    Ok(())
}

/// Counts conjugacy classes of core length `≤ l_max` whose Jordan vector lies
/// in `family(T)` for each `T` of the grid.
pub fn census_jordan<M: SpectrumModel>(
    model: &M,
    family: &RegionFamily,
    t_grid: &[f64],
    l_max: usize,
    primitive_only: bool,
    opts: &CensusOptions,
) -> Result<CensusOutput, CensusError> {
    prepare(model.dim(), family, t_grid)?;
    let plan = Plan {
        family,
        grid: t_grid,
        projection: Projection::Jordan { primitive_only },
        sectors: None,
        dump: opts.dump_spectra,
    };
    let tally = run_census(model, &plan, l_max, opts)?;
    let kind = if primitive_only {
        CountKind::JordanPrimitiveClasses
    } else {
        CountKind::JordanClasses
    };
    let series = build_series(&plan, &tally, kind, l_max)?;
    Ok(CensusOutput {
        series,
        spectra: opts.dump_spectra.then_some(tally.spectra),
    })
}

/// Counts reduced words of length `≤ l_max` whose Cartan vector lies in
/// `family(T)`.
pub fn census_cartan<M: SpectrumModel>(
    model: &M,
    family: &RegionFamily,
    t_grid: &[f64],
    l_max: usize,
    opts: &CensusOptions,
) -> Result<CensusOutput, CensusError> {
    prepare(model.dim(), family, t_grid)?;
    let plan = Plan {
        family,
        grid: t_grid,
        projection: Projection::Cartan,
        sectors: None,
        dump: opts.dump_spectra,
    };
    let tally = run_census(model, &plan, l_max, opts)?;
    let series = build_series(&plan, &tally, CountKind::CartanElements, l_max)?;
    Ok(CensusOutput {
        series,
        spectra: opts.dump_spectra.then_some(tally.spectra),
    })
}

/// Counts classes whose Jordan vector lies in the moving box
/// `∏[vᵢT, vᵢT + εᵢ]`, optionally split by holonomy sector for every
/// complex factor.
pub fn census_box<M: SpectrumModel>(
    model: &M,
    direction: &[f64],
    widths: &[f64],
    t_grid: &[f64],
    l_max: usize,
    sectors: Option<&[f64]>,
    opts: &CensusOptions,
) -> Result<BoxCensus, CensusError> {
    let family = RegionFamily::Box(BoxShape::new(direction.to_vec(), widths.to_vec())?);
    prepare(model.dim(), &family, t_grid)?;
    if let Some(edges) = sectors {
        check_sectors(edges)?;
    }
    let complex: Vec<usize> = model
        .holonomy_factors()
        .iter()
        .enumerate()
        .filter_map(|(i, &c)| c.then_some(i))
        .collect();
    let plan = Plan {
        family: &family,
        grid: t_grid,
        projection: Projection::Jordan { primitive_only: false },
        sectors: sectors.map(|e| (complex.clone(), e)),
        dump: opts.dump_spectra,
    };
    let tally = run_census(model, &plan, l_max, opts)?;
    let series = build_series(&plan, &tally, CountKind::JordanClasses, l_max)?;
    let holonomy = sectors.map(|edges| {
        let per_factor: Vec<Vec<Vec<u64>>> = tally
            .sector_diff
            .iter()
            .map(|f| f.iter().map(|s| prefix_sum(s, t_grid.len())).collect())
            .collect();
        (0..t_grid.len())
            .map(|ti| {
                complex
                    .iter()
                    .enumerate()
                    .map(|(slot, &factor)| HolonomyHistogram {
                        factor,
                        sector_edges: edges.to_vec(),
                        counts: per_factor[slot].iter().map(|s| s[ti]).collect(),
                    })
                    .collect()
            })
            .collect()
    });
    Ok(BoxCensus {
        series,
        holonomy,
        spectra: opts.dump_spectra.then_some(tally.spectra),
    })
}

/// Which enumeration a completeness horizon refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HorizonKind {
    Jordan,
    Cartan,
}

/// `(T_trust, ĉ_min)` for Euclidean-norm counting up to `l_max`.
pub fn completeness_horizon<M: SpectrumModel>(
    model: &M,
    l_max: usize,
    kind: HorizonKind,
    opts: &CensusOptions,
) -> Result<(f64, f64), CensusError> {
    let family = RegionFamily::Ball;
    let plan = Plan {
        family: &family,
        grid: &[],
        projection: match kind {
            HorizonKind::Jordan => Projection::Jordan { primitive_only: false },
            HorizonKind::Cartan => Projection::Cartan,
        },
        sectors: None,
        dump: false,
    };
    let tally = run_census(model, &plan, l_max, opts)?;
    if tally.items == 0 {
        return Err(CensusError::InsufficientData);
    }
    Ok((trust_horizon(tally.c_min, l_max), tally.c_min))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{cyclically_reduced_count, enumerate_conjugacy_classes};
    use crate::regions::{ConeSpec, TubeSpec};
    use crate::reps::{schottky_pair, SchottkyParams};

    fn grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
        let n = ((hi - lo) / step).round() as usize;
        (0..=n).map(|i| lo + step * i as f64).collect()
    }

    #[test]
    fn huge_t_counts_everything() {
        let rep = schottky_pair(&SchottkyParams::real(3.0, 2.0)).unwrap();
        let g = [1.0, 1e6];
        let opts = CensusOptions::default();
        let c = census_cartan(&rep, &RegionFamily::Ball, &g, 6, &opts).unwrap();
        assert_eq!(c.series.counts[1], projected_words(2, 6));
        let j = census_jordan(&rep, &RegionFamily::Ball, &g, 6, false, &opts).unwrap();
        let classes = enumerate_conjugacy_classes(2, 6, u64::MAX).unwrap().count() as u64;
        assert_eq!(j.series.counts[1], classes);
        assert_eq!(j.series.counts[0], 0, "below the shortest class");
    }

    #[test]
    fn word_metric_horizon_is_exact() {
        let s = 2.0 * 3f64.ln();
        let toy = WordMetric::uniform(2, s);
        let opts = CensusOptions::default();
        let (t_trust, c) = completeness_horizon(&toy, 7, HorizonKind::Cartan, &opts).unwrap();
        assert_eq!(c, s);
        assert!((t_trust - 5.0 * s).abs() < 1e-12);
        let (t8, _) = completeness_horizon(&toy, 8, HorizonKind::Jordan, &opts).unwrap();
        assert!(t8 > t_trust);
    }

    #[test]
    fn word_metric_class_counts() {
        // every cyclically reduced word of length n has length n
        let toy = WordMetric::uniform(2, 1.0);
        let g: Vec<f64> = (1..=6).map(|n| n as f64).collect();
        let out = census_jordan(&toy, &RegionFamily::Ball, &g, 6, false, &CensusOptions::default()).unwrap();
        let mut expect = 0;
        for n in 1..=6 {
            expect += enumerate_conjugacy_classes(2, n, u64::MAX)
                .unwrap()
                .filter(|c| c.len() == n)
                .count() as u64;
            assert_eq!(out.series.counts[n - 1], expect);
        }
        assert!(cyclically_reduced_count(2, 6) > 0);
    }

    #[test]
    fn shard_depth_and_workers_do_not_change_counts() {
        let rep = schottky_pair(&SchottkyParams::real(3.0, 2.5)).unwrap();
        let g = grid(1.0, 20.0, 0.5);
        let fam = RegionFamily::Ball;
        let base = census_jordan(&rep, &fam, &g, 8, false, &CensusOptions::with_workers(1)).unwrap();
        for (workers, depth) in [(2, Some(1)), (8, Some(3)), (3, Some(8)), (4, None)] {
            let opts = CensusOptions {
                workers: Some(workers),
                shard_depth: depth,
                ..CensusOptions::default()
            };
            let other = census_jordan(&rep, &fam, &g, 8, false, &opts).unwrap();
            assert_eq!(base.series, other.series);
        }
    }

    #[test]
    fn box_sectors_partition_the_count() {
        let rep = schottky_pair(&SchottkyParams {
            twist_b: Some(2.1),
            ..SchottkyParams::complex(3.0, 2.5, 0.7)
        })
        .unwrap();
        let g = grid(2.0, 16.0, 1.0);
        let edges = equal_sectors(8);
        let out = census_box(&rep, &[1.0], &[2.0], &g, 7, Some(&edges), &CensusOptions::default()).unwrap();
        let hol = out.holonomy.unwrap();
        for (ti, rows) in hol.iter().enumerate() {
            assert_eq!(rows.len(), 1);
            assert_eq!(rows[0].counts.iter().sum::<u64>(), out.series.counts[ti]);
        }
        assert!(!out.series.cumulative);
    }

    #[test]
    fn dimension_and_grid_errors() {
        let rep = schottky_pair(&SchottkyParams::real(3.0, 2.5)).unwrap();
        let opts = CensusOptions::default();
        let bad = census_box(&rep, &[0.6, 0.8], &[1.0, 1.0], &[1.0, 2.0], 4, None, &opts);
        assert!(matches!(bad, Err(CensusError::Region(RegionError::DimensionMismatch { .. }))));
        let tube = RegionFamily::Tube(TubeSpec::new(vec![1.0], 1.0, None).unwrap());
        assert!(matches!(
            census_cartan(&rep, &tube, &[2.0, 1.0], 4, &opts),
            Err(CensusError::InvalidGrid(_))
        ));
        let small = CensusOptions {
            budget: 10,
            ..CensusOptions::default()
        };
        assert!(matches!(
            census_cartan(&rep, &RegionFamily::Ball, &[1.0], 6, &small),
            Err(CensusError::Group(GroupError::CapacityExceeded { .. }))
        ));
        let cone = RegionFamily::Cone(ConeSpec::new(vec![1.0], 0.1).unwrap());
        assert!(census_jordan(&rep, &cone, &[1.0, 5.0], 3, true, &opts).is_ok());
    }
}
