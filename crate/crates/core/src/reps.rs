//! Representations of `F_k` into products of `SL₂(ℝ)` / `SL₂(ℂ)` factors.
//!
//! Ping-pong validation uses isometric circles relative to the basepoint
//! `o` (the point fixed by `SU(2)`), drawn on the boundary sphere `Ĉ`. For a
//! generator `g` with top singular value `σ₁`, the set where `g` expands the
//! chordal metric is a spherical cap of angular radius `2·atan(1/σ₁)`
//! centred at the image of the bottom right-singular vector. `g` maps the
//! complement of its cap onto the cap of `g⁻¹`, so `2k` pairwise disjoint
//! caps certify a free, discrete, convex cocompact image. Working on the
//! sphere rather than in an affine chart means no generator needs special
//! handling for fixing `∞`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::algebra::{AlgebraError, Field, RenormMatrix, DEFAULT_TOL};
use crate::group::{enumerate_conjugacy_classes, GroupError, Letter, Word};
use crate::group::CyclicWord;

/// Relative determinant tolerance accepted when loading matrices.
pub const UNIMODULAR_TOL: f64 = 1e-9;

/// Relative singular-value cutoff used by [`detect_dependence`].
pub const DEPENDENCE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RepError {
    #[error("schema error: {0}")]
    Schema(String),
    #[error("factor {factor}, generator {generator}: determinant {det} is not 1")]
    NotUnimodular { factor: usize, generator: usize, det: Complex64 },
    #[error("ping-pong validation failed (margin {margin:.6})")]
    PingPongFailure { margin: f64 },
    #[error("factor {factor}, generator {generator} fixes the basepoint; no isometric circle")]
    NotApplicable { factor: usize, generator: usize },
    #[error("factor {factor} is not loxodromic on class {word}: {source}")]
    NonLoxodromic {
        factor: usize,
        word: String,
        #[source]
        source: AlgebraError,
    },
    #[error("need at least {needed} classes, found {found}")]
    InsufficientData { needed: usize, found: usize },
    #[error("{0}")]
    Group(#[from] GroupError),
}

/// One factor `ρᵢ`: generator images over a fixed field.
#[derive(Clone, Debug, PartialEq)]
pub struct Factor {
    field: Field,
    generators: Vec<RenormMatrix>,
    // indexed by letter code: g1, g1^-1, g2, g2^-1, ...
    images: Vec<RenormMatrix>,
}

impl Factor {
    pub fn new(field: Field, generators: Vec<RenormMatrix>) -> Self {
        let images = generators.iter().flat_map(|g| [*g, g.inverse()]).collect();
        Self {
            field,
            generators,
            images,
        }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn generators(&self) -> &[RenormMatrix] {
        &self.generators
    }

    #[inline]
    pub fn image(&self, letter: Letter) -> &RenormMatrix {
        &self.images[letter.code() as usize]
    }

    /// `h ρᵢ h⁻¹`.
    pub fn conjugated(&self, h: &RenormMatrix) -> Self {
        Self::new(
            if h.field() == Field::Complex { Field::Complex } else { self.field },
            self.generators.iter().map(|g| g.conjugate_by(h)).collect(),
        )
    }
}

/// A tuple `ρ = (ρ₁, …, ρ_d)` of representations of `F_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct Representation {
    rank: usize,
    factors: Vec<Factor>,
}

impl Representation {
    pub fn new(rank: usize, factors: Vec<Factor>) -> Result<Self, RepError> {
        if rank == 0 || rank > 26 {
            return Err(RepError::Schema(format!("rank must be in 1..=26, got {rank}")));
        }
        if factors.is_empty() {
            return Err(RepError::Schema("at least one factor is required".into()));
        }
        for (i, f) in factors.iter().enumerate() {
            if f.generators.len() != rank {
                return Err(RepError::Schema(format!(
                    "factor {i} has {} generators, rank is {rank}",
                    f.generators.len()
                )));
            }
            for (j, g) in f.generators.iter().enumerate() {
                let det = g.det();
                if (det - 1.0).norm() > UNIMODULAR_TOL {
                    return Err(RepError::NotUnimodular {
                        factor: i,
                        generator: j,
                        det,
                    });
                }
            }
        }
        Ok(Self { rank, factors })
    }

    /// Self-joining of several representations of the same group.
    pub fn join(parts: &[Representation]) -> Result<Self, RepError> {
        let rank = parts
            .first()
            .map(|r| r.rank)
            .ok_or_else(|| RepError::Schema("nothing to join".into()))?;
        if parts.iter().any(|r| r.rank != rank) {
            return Err(RepError::Schema("joined representations must share the rank".into()));
        }
        Self::new(rank, parts.iter().flat_map(|r| r.factors.iter().cloned()).collect())
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn dim(&self) -> usize {
        self.factors.len()
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn factor(&self, i: usize) -> &Factor {
        &self.factors[i]
    }

    pub fn fields(&self) -> Vec<Field> {
        self.factors.iter().map(|f| f.field).collect()
    }

    /// One-factor representation holding factor `i`.
    pub fn single(&self, i: usize) -> Representation {
        Representation {
            rank: self.rank,
            factors: vec![self.factors[i].clone()],
        }
    }

    /// Conjugates every factor by `h`.
    pub fn conjugated(&self, h: &RenormMatrix) -> Representation {
        Representation {
            rank: self.rank,
            factors: self.factors.iter().map(|f| f.conjugated(h)).collect(),
        }
    }

    /// Per-factor image of a word.
    pub fn evaluate(&self, w: &Word) -> ProductElement {
        let factors = self
            .factors
            .iter()
            .map(|f| {
                w.letters()
                    .iter()
                    .fold(RenormMatrix::identity(f.field), |acc, &l| acc.mul(f.image(l)))
            })
            .collect();
        ProductElement { factors }
    }

    /// Jordan vector with holonomies of complex factors.
    pub fn lambda_vector(&self, c: &CyclicWord) -> Result<SpectrumVector, RepError> {
        self.lambda_vector_of_word(c.word())
    }

    /// Jordan vector of the class of `w`.
    pub fn lambda_vector_of_word(&self, w: &Word) -> Result<SpectrumVector, RepError> {
        let p = self.evaluate(w);
        let mut coords = Vec::with_capacity(self.dim());
        let mut holonomies = Vec::with_capacity(self.dim());
        for (i, g) in p.factors.iter().enumerate() {
            let lox = g.loxodata(DEFAULT_TOL).map_err(|source| RepError::NonLoxodromic {
                factor: i,
                word: w.to_string(),
                source,
            })?;
            coords.push(lox.jordan);
            holonomies.push(lox.holonomy_angle);
        }
        Ok(SpectrumVector {
            coords,
            kind: SpectrumKind::Jordan,
            holonomies,
        })
    }

    /// Cartan vector of a group element.
    pub fn mu_vector(&self, w: &Word) -> SpectrumVector {
        let p = self.evaluate(w);
        SpectrumVector {
            coords: p.factors.iter().map(|g| g.cartan_length()).collect(),
            kind: SpectrumKind::Cartan,
            holonomies: vec![None; self.dim()],
        }
    }

    /// Serializes into the explicit configuration schema.
    pub fn to_document(&self) -> Value {
        let factors: Vec<FactorDoc> = self
            .factors
            .iter()
            .map(|f| FactorDoc::Explicit(ExplicitFactor {
                field: f.field,
                generators: f
                    .generators
                    .iter()
                    .map(|g| g.true_entries().map(|z| [z.re, z.im]))
                    .collect(),
                conjugate_by: None,
            }))
            .collect();
        serde_json::to_value(ExplicitDoc {
            rank: self.rank,
            factors,
        })
        .expect("representation serializes")
    }
}

/// Image of a word in every factor.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductElement {
    pub factors: Vec<RenormMatrix>,
}

impl ProductElement {
    pub fn mul(&self, other: &ProductElement) -> ProductElement {
        ProductElement {
            factors: self
                .factors
                .iter()
                .zip(&other.factors)
                .map(|(a, b)| a.mul(b))
                .collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpectrumKind {
    Jordan,
    Cartan,
}

/// A point of the positive chamber `ℝ₊^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumVector {
    pub coords: Vec<f64>,
    pub kind: SpectrumKind,
    /// `Some(angle)` for complex factors of Jordan vectors.
    pub holonomies: Vec<Option<f64>>,
}

impl SpectrumVector {
    pub fn norm(&self) -> f64 {
        self.coords.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

// ---------------------------------------------------------------------------
// Schottky builder and ping-pong

/// Parameters of the standard ping-pong pair: `g₁ = diag(s, 1/s)` and
/// `g₂ = h·diag(s_b, 1/s_b)·h⁻¹`, where `h` translates by `separation` along
/// the common perpendicular of the two axes. In the complex case the
/// eigenvalues are rotated by `e^{±i·twist}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchottkyParams {
    pub stretch: f64,
    /// Stretch of the second generator; defaults to `stretch`.
    #[serde(default)]
    pub stretch_b: Option<f64>,
    pub separation: f64,
    #[serde(default = "default_field")]
    pub field: Field,
    #[serde(default)]
    pub twist: Option<f64>,
    /// Twist of the second generator; defaults to `twist`.
    #[serde(default)]
    pub twist_b: Option<f64>,
}

fn default_field() -> Field {
    Field::Real
}

impl SchottkyParams {
    pub fn real(stretch: f64, separation: f64) -> Self {
        Self {
            stretch,
            stretch_b: None,
            separation,
            field: Field::Real,
            twist: None,
            twist_b: None,
        }
    }

    pub fn complex(stretch: f64, separation: f64, twist: f64) -> Self {
        Self {
            field: Field::Complex,
            twist: Some(twist),
            ..Self::real(stretch, separation)
        }
    }

    /// Builds the generators without validating them.
    pub fn build_unchecked(&self) -> Result<Representation, RepError> {
        let sb = self.stretch_b.unwrap_or(self.stretch);
        if !(self.stretch > 1.0 && sb > 1.0) {
            return Err(RepError::Schema("stretch must exceed 1".into()));
        }
        if !(self.separation > 0.0) || !self.separation.is_finite() {
            return Err(RepError::Schema("separation must be positive".into()));
        }
        let ta = match self.field {
            Field::Real => {
                if self.twist.is_some() || self.twist_b.is_some() {
                    return Err(RepError::Schema("twist requires a complex field".into()));
                }
                0.0
            }
            Field::Complex => self.twist.unwrap_or(0.0),
        };
        let tb = self.twist_b.unwrap_or(ta);
        let diag = |s: f64, t: f64| {
            RenormMatrix::diag(Complex64::from_polar(s, t), Complex64::from_polar(1.0 / s, -t), self.field)
        };
        let (sh, ch) = ((0.5 * self.separation).sinh(), (0.5 * self.separation).cosh());
        let h = RenormMatrix::from_complex(
            [ch, sh, sh, ch].map(|x| Complex64::new(x, 0.0)),
            self.field,
        );
        let g1 = diag(self.stretch, ta);
        let g2 = diag(sb, tb).conjugate_by(&h);
        Representation::new(2, vec![Factor::new(self.field, vec![g1, g2])])
    }
}

/// Builds a validated one-factor Schottky pair.
pub fn schottky_pair(params: &SchottkyParams) -> Result<Representation, RepError> {
    let rep = params.build_unchecked()?;
    let report = validate_ping_pong(&rep, DEFAULT_TOL)?;
    if !report.pass {
        return Err(RepError::PingPongFailure { margin: report.margin });
    }
    Ok(rep)
}

/// Expanding cap of a generator on the boundary sphere.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct IsometricCap {
    /// Generator index; `inverse` marks the cap of its inverse.
    pub generator: usize,
    pub inverse: bool,
    /// Unit vector in `ℝ³`.
    pub center: [f64; 3],
    /// Angular radius in radians.
    pub radius: f64,
}

impl IsometricCap {
    /// Centre as a point of `Ĉ` (`None` for `∞`).
    pub fn center_in_plane(&self) -> Option<Complex64> {
        let [x, y, z] = self.center;
        if z >= 1.0 - 1e-15 {
            None
        } else {
            Some(Complex64::new(x, y) / (1.0 - z))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationReport {
    pub factor: usize,
    pub pass: bool,
    /// Smallest gap between two caps, in radians; negative when they overlap.
    pub margin: f64,
    pub caps: Vec<IsometricCap>,
}

fn sphere_point(x: Complex64, y: Complex64) -> [f64; 3] {
    let n = x.norm_sqr() + y.norm_sqr();
    let xy = x * y.conj();
    [2.0 * xy.re / n, 2.0 * xy.im / n, (x.norm_sqr() - y.norm_sqr()) / n]
}

fn sphere_angle(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    let dot = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    let cx = a[1] * b[2] - a[2] * b[1];
    let cy = a[2] * b[0] - a[0] * b[2];
    let cz = a[0] * b[1] - a[1] * b[0];
    (cx * cx + cy * cy + cz * cz).sqrt().atan2(dot)
}

/// Cap where `g` expands the chordal metric, or `None` if `g` fixes `o`.
fn expanding_cap(g: &RenormMatrix, tol: f64) -> Option<([f64; 3], f64)> {
    let mu = g.cartan_length();
    if mu <= tol {
        return None;
    }
    let m = g.entries();
    // M*M = [[p, q], [conj(q), r]]
    let p = m[0].norm_sqr() + m[2].norm_sqr();
    let r = m[1].norm_sqr() + m[3].norm_sqr();
    let q = m[0].conj() * m[1] + m[2].conj() * m[3];
    let half_gap = ((0.5 * (p - r)).powi(2) + q.norm_sqr()).sqrt();
    let top = 0.5 * (p + r) + half_gap;
    let v1 = (q, Complex64::new(top - p, 0.0));
    let v2 = (Complex64::new(top - r, 0.0), q.conj());
    let n1 = v1.0.norm_sqr() + v1.1.norm_sqr();
    let n2 = v2.0.norm_sqr() + v2.1.norm_sqr();
    let (x, y) = if n1 >= n2 { v1 } else { v2 };
    // bottom singular vector is orthogonal to the top one
    let (bx, by) = (-y.conj(), x.conj());
    let sigma = (0.5 * mu).exp();
    Some((sphere_point(bx, by), 2.0 * (1.0 / sigma).atan()))
}

/// Ping-pong check of one factor.
pub fn validate_factor(rep: &Representation, factor: usize, tol: f64) -> Result<ValidationReport, RepError> {
    let f = rep.factor(factor);
    let mut caps = Vec::with_capacity(2 * rep.rank());
    for (j, g) in f.generators().iter().enumerate() {
        for (inverse, m) in [(false, *g), (true, g.inverse())] {
            let (center, radius) =
                expanding_cap(&m, tol).ok_or(RepError::NotApplicable { factor, generator: j })?;
            caps.push(IsometricCap {
                generator: j,
                inverse,
                center,
                radius,
            });
        }
    }
    let mut margin = PI;
    for i in 0..caps.len() {
        for j in i + 1..caps.len() {
            let gap = sphere_angle(&caps[i].center, &caps[j].center) - caps[i].radius - caps[j].radius;
            margin = margin.min(gap);
        }
    }
    Ok(ValidationReport {
        factor,
        pass: margin > tol,
        margin,
        caps,
    })
}

/// Ping-pong check of a one-factor representation.
pub fn validate_ping_pong(rep: &Representation, tol: f64) -> Result<ValidationReport, RepError> {
    if rep.dim() != 1 {
        return Err(RepError::Schema(format!(
            "ping-pong validation expects one factor, got {}",
            rep.dim()
        )));
    }
    validate_factor(rep, 0, tol)
}

/// Validates every factor.
pub fn validate_all(rep: &Representation, tol: f64) -> Result<Vec<ValidationReport>, RepError> {
    (0..rep.dim()).map(|i| validate_factor(rep, i, tol)).collect()
}

// ---------------------------------------------------------------------------
// Dependence

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DependenceReport {
    pub probe_depth: usize,
    pub classes: usize,
    pub singular_values: Vec<f64>,
    pub rank: usize,
    pub dependent: bool,
    /// `min ℓ₂/ℓ₁` over the probed classes (two factors only).
    pub stretch_min: Option<f64>,
    /// `max ℓ₂/ℓ₁` over the probed classes (two factors only).
    pub stretch_max: Option<f64>,
}

/// Numerical rank of the span of Jordan vectors of classes up to `probe_depth`.
pub fn detect_dependence(rep: &Representation, probe_depth: usize, tol: f64) -> Result<DependenceReport, RepError> {
    let d = rep.dim();
    if d < 2 {
        return Err(RepError::Schema("dependence detection needs at least two factors".into()));
    }
    let mut rows: Vec<f64> = Vec::new();
    let mut ratios = (f64::INFINITY, f64::NEG_INFINITY);
    let mut n = 0usize;
    for class in enumerate_conjugacy_classes(rep.rank(), probe_depth, u64::MAX)? {
        let v = rep.lambda_vector(&class)?;
        if d == 2 {
            let r = v.coords[1] / v.coords[0];
            ratios = (ratios.0.min(r), ratios.1.max(r));
        }
        rows.extend_from_slice(&v.coords);
        n += 1;
    }
    if n < d + 3 {
        return Err(RepError::InsufficientData { needed: d + 3, found: n });
    }
    let m = DMatrix::from_row_slice(n, d, &rows);
    let mut singular_values: Vec<f64> = m.singular_values().iter().copied().collect();
    singular_values.sort_by(|a, b| b.total_cmp(a));
    let top = singular_values[0];
    let rank = singular_values.iter().filter(|&&s| s > tol * top).count();
    let (stretch_min, stretch_max) = if d == 2 {
        (Some(ratios.0), Some(ratios.1))
    } else {
        (None, None)
    };
    Ok(DependenceReport {
        probe_depth,
        classes: n,
        singular_values,
        rank,
        dependent: rank < d,
        stretch_min,
        stretch_max,
    })
}

// ---------------------------------------------------------------------------
// Configuration documents

type EntryDoc = [[f64; 2]; 4];

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BuilderDoc {
    builder: String,
    #[serde(flatten)]
    params: SchottkyParams,
    #[serde(default)]
    conjugate_by: Option<EntryDoc>,
    #[serde(default)]
    force: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExplicitFactor {
    field: Field,
    generators: Vec<EntryDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    conjugate_by: Option<EntryDoc>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum FactorDoc {
    Explicit(ExplicitFactor),
    Builder(BuilderDoc),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExplicitDoc {
    rank: usize,
    factors: Vec<FactorDoc>,
}

fn matrix_from_doc(e: &EntryDoc, field: Field) -> RenormMatrix {
    RenormMatrix::from_complex(e.map(|[re, im]| Complex64::new(re, im)), field)
}

fn check_unimodular(m: &RenormMatrix, factor: usize, generator: usize) -> Result<(), RepError> {
    let det = m.det();
    if (det - 1.0).norm() > UNIMODULAR_TOL {
        return Err(RepError::NotUnimodular { factor, generator, det });
    }
    Ok(())
}

fn factor_from_doc(doc: &FactorDoc, index: usize, force: bool) -> Result<(usize, Factor), RepError> {
    let (rank, factor, conj) = match doc {
        FactorDoc::Explicit(e) => {
            if e.field == Field::Real
                && e.generators.iter().flatten().any(|[_, im]| *im != 0.0)
            {
                return Err(RepError::Schema(format!(
                    "factor {index} is real but has complex entries"
                )));
            }
            let gens = e
                .generators
                .iter()
                .enumerate()
                .map(|(j, g)| {
                    let m = matrix_from_doc(g, e.field);
                    check_unimodular(&m, index, j).map(|_| m)
                })
                .collect::<Result<Vec<_>, _>>()?;
            (gens.len(), Factor::new(e.field, gens), e.conjugate_by)
        }
        FactorDoc::Builder(b) => {
            if b.builder != "schottky_pair" {
                return Err(RepError::Schema(format!("unknown builder {:?}", b.builder)));
            }
            let rep = if b.force || force {
                b.params.build_unchecked()?
            } else {
                schottky_pair(&b.params)?
            };
            (2, rep.factors[0].clone(), b.conjugate_by)
        }
    };
    let factor = match conj {
        Some(h) => {
            let field = if h.iter().any(|[_, im]| *im != 0.0) {
                Field::Complex
            } else {
                factor.field()
            };
            let h = matrix_from_doc(&h, field);
            check_unimodular(&h, index, usize::MAX)?;
            factor.conjugated(&h)
        }
        None => factor,
    };
    Ok((rank, factor))
}

/// Parses a representation document: either the explicit schema
/// `{rank, factors: [{field, generators: [[[re, im]; 4], ...]}]}` or a
/// builder shorthand `{builder: "schottky_pair", stretch, separation, ...}`.
/// Factors of an explicit document may themselves be builder shorthands.
pub fn load_representation(document: &Value) -> Result<Representation, RepError> {
    load_representation_with(document, false)
}

/// As [`load_representation`]; `force` builds shorthand pairs without the
/// ping-pong check.
pub fn load_representation_with(document: &Value, force: bool) -> Result<Representation, RepError> {
    if document.get("builder").is_some() {
        let doc: FactorDoc = serde_json::from_value(document.clone())
            .map_err(|e| RepError::Schema(e.to_string()))?;
        let (rank, factor) = factor_from_doc(&doc, 0, force)?;
        return Representation::new(rank, vec![factor]);
    }
    let doc: ExplicitDoc =
        serde_json::from_value(document.clone()).map_err(|e| RepError::Schema(e.to_string()))?;
    let mut factors = Vec::with_capacity(doc.factors.len());
    for (i, f) in doc.factors.iter().enumerate() {
        let (rank, factor) = factor_from_doc(f, i, force)?;
        if rank != doc.rank {
            return Err(RepError::Schema(format!(
                "factor {i} has {rank} generators, rank is {}",
                doc.rank
            )));
        }
        factors.push(factor);
    }
    Representation::new(doc.rank, factors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{canonical_rep, conjugacy_class};
    use serde_json::json;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn schottky_pair_validates() {
        let rep = schottky_pair(&SchottkyParams::real(4.0, 3.0)).unwrap();
        let report = validate_ping_pong(&rep, DEFAULT_TOL).unwrap();
        assert!(report.pass && report.margin > 0.0);
        assert_eq!(report.caps.len(), 4);
    }

    #[test]
    fn small_separation_fails() {
        let err = schottky_pair(&SchottkyParams::real(4.0, 0.01)).unwrap_err();
        assert!(matches!(err, RepError::PingPongFailure { margin } if margin < 0.0));
    }

    #[test]
    fn same_axis_pair_fails() {
        let g = RenormMatrix::from_real([[3.0, 0.0], [0.0, 1.0 / 3.0]]).conjugate_by(&RenormMatrix::rotation(0.3));
        let rep = Representation::new(2, vec![Factor::new(Field::Real, vec![g, g.mul(&g)])]).unwrap();
        assert!(!validate_ping_pong(&rep, DEFAULT_TOL).unwrap().pass);
    }

    #[test]
    fn identity_generator_never_passes() {
        let g = RenormMatrix::from_real([[3.0, 0.0], [0.0, 1.0 / 3.0]]);
        let rep = Representation::new(2, vec![Factor::new(Field::Real, vec![g, RenormMatrix::identity(Field::Real)])])
            .unwrap();
        assert!(matches!(
            validate_ping_pong(&rep, DEFAULT_TOL),
            Err(RepError::NotApplicable { generator: 1, .. })
        ));
    }

    #[test]
    fn caps_of_diagonal_generator() {
        let g = RenormMatrix::from_real([[4.0, 0.0], [0.0, 0.25]]);
        let (c, r) = expanding_cap(&g, DEFAULT_TOL).unwrap();
        assert!((c[2] + 1.0).abs() < 1e-15, "cap of g is centred at 0");
        // boundary circle |z| = 1/4
        assert!(((0.5 * r).tan() - 0.25).abs() < 1e-14);
        let (c, _) = expanding_cap(&g.inverse(), DEFAULT_TOL).unwrap();
        assert!((c[2] - 1.0).abs() < 1e-15, "cap of g^-1 is centred at infinity");
    }

    #[test]
    fn complex_twist_sets_generator_holonomy() {
        let rep = schottky_pair(&SchottkyParams::complex(4.0, 3.0, 0.7)).unwrap();
        let v = rep.lambda_vector(&canonical_rep(&w("a")).unwrap()).unwrap();
        assert!((v.holonomies[0].unwrap() - 0.7).abs() < 1e-12);
        assert!((v.coords[0] - 2.0 * 4f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn lambda_vector_examples() {
        let rep = schottky_pair(&SchottkyParams::real(3.0, 3.0)).unwrap();
        let a = rep.lambda_vector(&canonical_rep(&w("a")).unwrap()).unwrap();
        let aa = rep.lambda_vector(&canonical_rep(&w("aa")).unwrap()).unwrap();
        assert!((a.coords[0] - 2.0 * 3f64.ln()).abs() < 1e-14);
        assert!((aa.coords[0] - 2.0 * a.coords[0]).abs() < 1e-12);
        assert_eq!(a.holonomies, vec![None]);
        let mu = rep.mu_vector(&w("a"));
        assert!((mu.coords[0] - a.coords[0]).abs() < 1e-14);
    }

    #[test]
    fn mu_is_inverse_invariant_and_dominates_lambda() {
        let rep = schottky_pair(&SchottkyParams::real(3.0, 2.0)).unwrap();
        for s in ["abAB", "aab", "bAbb", "abbbA"] {
            let word = w(s);
            let m1 = rep.mu_vector(&word).coords[0];
            let m2 = rep.mu_vector(&word.inverse()).coords[0];
            assert!((m1 - m2).abs() < 1e-9);
            let l = rep.lambda_vector(&conjugacy_class(&word).unwrap()).unwrap().coords[0];
            assert!(m1 >= l - 1e-9);
        }
    }

    #[test]
    fn evaluate_is_a_homomorphism() {
        let rep = schottky_pair(&SchottkyParams::real(3.0, 2.0)).unwrap();
        let (u, v) = (w("abA"), w("BBa"));
        let lhs = rep.evaluate(&u.concat(&v));
        let rhs = rep.evaluate(&u).mul(&rep.evaluate(&v));
        let (x, y) = (lhs.factors[0].true_entries(), rhs.factors[0].true_entries());
        for k in 0..4 {
            assert!((x[k] - y[k]).norm() < 1e-9 * (1.0 + x[k].norm()));
        }
        let a = rep.evaluate(&w("a"));
        assert_eq!(a.factors[0], rep.factor(0).generators()[0]);
    }

    #[test]
    fn load_two_factor_document() {
        let doc = json!({
            "rank": 2,
            "factors": [
                {"field": "real", "generators": [
                    [[2.0, 0.0], [0.0, 0.0], [0.0, 0.0], [0.5, 0.0]],
                    [[1.25, 0.0], [0.75, 0.0], [0.75, 0.0], [1.25, 0.0]]
                ]},
                {"field": "real", "generators": [
                    [[2.0, 0.0], [0.0, 0.0], [0.0, 0.0], [0.5, 0.0]],
                    [[1.25, 0.0], [0.75, 0.0], [0.75, 0.0], [1.25, 0.0]]
                ], "conjugate_by": [[1.0, 0.0], [1.0, 0.0], [0.0, 0.0], [1.0, 0.0]]}
            ]
        });
        let rep = load_representation(&doc).unwrap();
        assert_eq!((rep.dim(), rep.rank()), (2, 2));
    }

    #[test]
    fn load_rejects_non_unimodular() {
        let doc = json!({"rank": 1, "factors": [{"field": "real", "generators": [
            [[1.01, 0.0], [0.0, 0.0], [0.0, 0.0], [1.0, 0.0]]
        ]}]});
        assert!(matches!(
            load_representation(&doc),
            Err(RepError::NotUnimodular { factor: 0, generator: 0, .. })
        ));
        let bad = json!({"rank": 2, "factors": "nope"});
        assert!(matches!(load_representation(&bad), Err(RepError::Schema(_))));
    }

    #[test]
    fn builder_shorthand_loads() {
        let rep = load_representation(&json!({
            "builder": "schottky_pair", "stretch": 4.0, "separation": 3.0, "field": "real"
        }))
        .unwrap();
        assert_eq!(rep.dim(), 1);
        let err = load_representation(&json!({
            "builder": "schottky_pair", "stretch": 4.0, "separation": 0.01, "field": "real"
        }))
        .unwrap_err();
        assert!(matches!(err, RepError::PingPongFailure { .. }));
    }

    #[test]
    fn dependence_of_self_pair() {
        let rep = schottky_pair(&SchottkyParams::real(3.0, 3.0)).unwrap();
        let pair = Representation::join(&[rep.clone(), rep]).unwrap();
        let r = detect_dependence(&pair, 5, DEPENDENCE_TOL).unwrap();
        assert!(r.dependent);
        assert_eq!(r.rank, 1);
        assert!((r.stretch_min.unwrap() - 1.0).abs() < 1e-12);
        assert!((r.stretch_max.unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dependence_needs_data() {
        let rep = schottky_pair(&SchottkyParams::real(3.0, 3.0)).unwrap();
        let pair = Representation::join(&[rep.clone(), rep.clone()]).unwrap();
        assert_eq!(
            detect_dependence(&pair, 1, DEPENDENCE_TOL),
            Err(RepError::InsufficientData { needed: 5, found: 4 })
        );
        assert!(detect_dependence(&rep, 4, DEPENDENCE_TOL).is_err());
    }
}
