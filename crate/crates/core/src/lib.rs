//! Counting laboratory for Schottky subgroups of `SL₂(ℝ)` and `SL₂(ℂ)` and
//! their self-joinings.
//!
//! A representation of a free group `F_k` into a product of `d` rank-one
//! factors assigns every conjugacy class a Jordan vector `λ ∈ ℝ^d` (twice the
//! log of the top eigenvalue in each factor) and every element a Cartan
//! vector `μ` (displacement of the basepoint of `ℍ³`). The crate enumerates
//! classes and elements up to a word length, counts their vectors in tubes,
//! cones and moving boxes over a grid of `T`, and fits `c·e^{δT}/T^α` to the
//! counts inside a certified completeness horizon.
//!
//! * [`algebra`]: renormalized 2×2 matrices and the three projections.
//! * [`group`]: reduced words, necklace enumeration of conjugacy classes.
//! * [`reps`]: representations, Schottky builders, ping-pong validation.
//! * [`regions`]: tubes, cones, boxes and truncated tubes.
//! * [`census`]: sharded parallel counting.
//! * [`fitting`]: growth-rate regression and diagnostics.
//! * [`cli`]: JSON experiment configs and CSV artifacts.

pub mod algebra;
pub mod census;
pub mod cli;
pub mod fitting;
pub mod group;
pub mod regions;
pub mod reps;

pub use algebra::{Field, RenormMatrix};
pub use census::{
    census_box, census_cartan, census_jordan, completeness_horizon, CensusOptions, CountKind, CountSeries,
    SpectrumModel, WordMetric,
};
pub use fitting::{fit_growth, growth_indicator_ladder, FitResult, LadderSource};
pub use group::{CyclicWord, Letter, Word};
pub use regions::RegionFamily;
pub use reps::{schottky_pair, Representation, SchottkyParams};
