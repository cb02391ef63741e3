//! Tubes, cones, truncated tubes and moving boxes in the positive chamber
//! `ℝ₊^d`, with the Euclidean norm throughout.
//!
//! Tubes and boxes are closed, cones are open. Cross-sections of truncated
//! tubes live in the orthogonal complement `v^⊥`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RegionError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid region: {0}")]
    Invalid(String),
}

fn check_dim(x: &[f64], d: usize) -> Result<(), RegionError> {
    if x.len() != d {
        return Err(RegionError::DimensionMismatch {
            expected: d,
            got: x.len(),
        });
    }
    Ok(())
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn in_chamber(x: &[f64]) -> bool {
    x.iter().all(|&c| c >= 0.0)
}

/// Scales a positive vector to unit length.
pub fn normalize(v: &[f64]) -> Result<Vec<f64>, RegionError> {
    let n = norm(v);
    if v.is_empty() || !n.is_finite() || n == 0.0 {
        return Err(RegionError::Invalid("direction must be a nonzero finite vector".into()));
    }
    Ok(v.iter().map(|x| x / n).collect())
}

fn check_direction(v: &[f64]) -> Result<(), RegionError> {
    if v.is_empty() {
        return Err(RegionError::Invalid("empty direction".into()));
    }
    if (norm(v) - 1.0).abs() > 1e-12 {
        return Err(RegionError::Invalid("direction must be a unit vector".into()));
    }
    if v.iter().any(|&c| !(c > 0.0)) {
        return Err(RegionError::Invalid("direction must lie in the open chamber".into()));
    }
    Ok(())
}

/// Distance from `y` to the line `ℝv` for unit `v`.
fn distance_to_line(y: &[f64], v: &[f64]) -> f64 {
    let t = dot(y, v);
    y.iter()
        .zip(v)
        .map(|(a, b)| (a - t * b).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Angle between `x` and the unit vector `v`.
pub fn angle_to(x: &[f64], v: &[f64]) -> f64 {
    distance_to_line(x, v).atan2(dot(x, v))
}

/// `{x ∈ ℝ₊^d : dist(x − w, ℝv) ≤ ε}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TubeSpec {
    pub direction: Vec<f64>,
    pub radius: f64,
    #[serde(default)]
    pub offset: Vec<f64>,
}

impl TubeSpec {
    pub fn new(direction: Vec<f64>, radius: f64, offset: Option<Vec<f64>>) -> Result<Self, RegionError> {
        check_direction(&direction)?;
        if !(radius > 0.0) {
            return Err(RegionError::Invalid("tube radius must be positive".into()));
        }
        let offset = offset.unwrap_or_else(|| vec![0.0; direction.len()]);
        check_dim(&offset, direction.len())?;
        Ok(Self {
            direction,
            radius,
            offset,
        })
    }

    pub fn dim(&self) -> usize {
        self.direction.len()
    }

    /// Distance from `x − w` to the axis.
    pub fn distance(&self, x: &[f64]) -> f64 {
        let y: Vec<f64> = x.iter().zip(&self.offset).map(|(a, b)| a - b).collect();
        distance_to_line(&y, &self.direction)
    }
}

pub fn in_tube(x: &[f64], spec: &TubeSpec) -> Result<bool, RegionError> {
    check_dim(x, spec.dim())?;
    Ok(in_chamber(x) && spec.distance(x) <= spec.radius)
}

/// Open cone `{x ≠ 0 : angle(x, v) < θ}` inside the chamber.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConeSpec {
    pub direction: Vec<f64>,
    pub half_angle: f64,
}

impl ConeSpec {
    pub fn new(direction: Vec<f64>, half_angle: f64) -> Result<Self, RegionError> {
        check_direction(&direction)?;
        if !(half_angle > 0.0 && half_angle < std::f64::consts::FRAC_PI_2) {
            return Err(RegionError::Invalid("half angle must lie in (0, π/2)".into()));
        }
        Ok(Self {
            direction,
            half_angle,
        })
    }

    pub fn dim(&self) -> usize {
        self.direction.len()
    }
}

pub fn in_cone(x: &[f64], spec: &ConeSpec) -> Result<bool, RegionError> {
    check_dim(x, spec.dim())?;
    if !in_chamber(x) || x.iter().all(|&c| c == 0.0) {
        return Ok(false);
    }
    Ok(angle_to(x, &spec.direction) < spec.half_angle)
}

/// Shape of a moving box `∏[vᵢT, vᵢT + εᵢ]` without its time.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxShape {
    pub direction: Vec<f64>,
    pub widths: Vec<f64>,
}

impl BoxShape {
    pub fn new(direction: Vec<f64>, widths: Vec<f64>) -> Result<Self, RegionError> {
        check_dim(&widths, direction.len())?;
        if direction.is_empty() || direction.iter().any(|&c| !(c > 0.0)) {
            return Err(RegionError::Invalid("box direction must be strictly positive".into()));
        }
        if widths.iter().any(|&e| !(e > 0.0)) {
            return Err(RegionError::Invalid("box widths must be positive".into()));
        }
        Ok(Self { direction, widths })
    }

    pub fn dim(&self) -> usize {
        self.direction.len()
    }

    pub fn at(&self, time: f64) -> BoxWindow {
        BoxWindow {
            shape: self.clone(),
            time,
        }
    }

    #[inline]
    pub(crate) fn lower_ok(&self, x: &[f64], time: f64) -> bool {
        self.direction.iter().zip(x).all(|(&v, &c)| v * time <= c)
    }

    #[inline]
    pub(crate) fn upper_ok(&self, x: &[f64], time: f64) -> bool {
        self.direction
            .iter()
            .zip(&self.widths)
            .zip(x)
            .all(|((&v, &e), &c)| c <= v * time + e)
    }

    /// Largest Euclidean norm gained over `time·|v|` inside the box.
    pub fn width_norm(&self) -> f64 {
        norm(&self.widths)
    }
}

/// Closed box `∏[vᵢT, vᵢT + εᵢ]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxWindow {
    pub shape: BoxShape,
    pub time: f64,
}

pub fn in_box_window(x: &[f64], spec: &BoxWindow) -> Result<bool, RegionError> {
    check_dim(x, spec.shape.dim())?;
    Ok(spec.shape.lower_ok(x, spec.time) && spec.shape.upper_ok(x, spec.time))
}

/// Cross-section `K ⊂ v^⊥` of a truncated tube.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum CrossSection {
    /// Product of intervals along an orthonormal basis of `v^⊥`.
    AxisBox {
        basis: Vec<Vec<f64>>,
        intervals: Vec<(f64, f64)>,
    },
    /// Orthogonal shadow of the box `∏[0, εᵢ]`.
    BoxShadow { widths: Vec<f64> },
}

impl CrossSection {
    /// Builds an axis box using the Gram–Schmidt basis of `v^⊥` obtained
    /// from the standard basis vectors `e₂, …, e_d`.
    pub fn axis_box(direction: &[f64], intervals: Vec<(f64, f64)>) -> Result<Self, RegionError> {
        let d = direction.len();
        if intervals.len() + 1 != d {
            return Err(RegionError::DimensionMismatch {
                expected: d.saturating_sub(1),
                got: intervals.len(),
            });
        }
        if intervals.iter().any(|(a, b)| !(a < b)) {
            return Err(RegionError::Invalid("cross-section intervals must have nonempty interior".into()));
        }
        Ok(CrossSection::AxisBox {
            basis: complement_basis(direction),
            intervals,
        })
    }

    fn contains(&self, u: &[f64], direction: &[f64]) -> bool {
        match self {
            CrossSection::AxisBox { basis, intervals } => basis
                .iter()
                .zip(intervals)
                .all(|(e, &(lo, hi))| {
                    let c = dot(u, e);
                    lo <= c && c <= hi
                }),
            CrossSection::BoxShadow { widths } => {
                let (lo, hi) = shadow_range(u, direction, widths);
                lo <= hi
            }
        }
    }

    /// Upper bound on `‖u‖` over the cross-section.
    fn radius_bound(&self) -> f64 {
        match self {
            CrossSection::AxisBox { intervals, .. } => intervals
                .iter()
                .map(|&(a, b)| a.abs().max(b.abs()).powi(2))
                .sum::<f64>()
                .sqrt(),
            CrossSection::BoxShadow { widths } => norm(widths),
        }
    }
}

/// Orthonormal basis of `v^⊥`.
pub fn complement_basis(direction: &[f64]) -> Vec<Vec<f64>> {
    let d = direction.len();
    let mut basis: Vec<Vec<f64>> = vec![direction.to_vec()];
    for k in 0..d {
        if basis.len() == d {
            break;
        }
        let mut e = vec![0.0; d];
        e[k] = 1.0;
        for b in &basis {
            let t = dot(&e, b);
            for (x, y) in e.iter_mut().zip(b) {
                *x -= t * y;
            }
        }
        let n = norm(&e);
        if n > 1e-8 {
            basis.push(e.into_iter().map(|x| x / n).collect());
        }
    }
    basis.remove(0);
    basis
}

/// Parameter range `[lo, hi]` of `t` with `u + t·v ∈ ∏[0, εᵢ]`.
fn shadow_range(u: &[f64], direction: &[f64], widths: &[f64]) -> (f64, f64) {
    let mut lo = f64::NEG_INFINITY;
    let mut hi = f64::INFINITY;
    for ((&c, &v), &e) in u.iter().zip(direction).zip(widths) {
        lo = lo.max(-c / v);
        hi = hi.min((e - c) / v);
    }
    (lo, hi)
}

/// Height offset `b(u)` of a truncated tube.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Cap {
    Constant { value: f64 },
    /// `base + gradient · u` with `gradient` in ambient coordinates.
    Affine { base: f64, gradient: Vec<f64> },
    /// Far faces of `∏[0, εᵢ]`: `b(u) = max{t : u + t·v ∈ box}`.
    BoxFar { widths: Vec<f64> },
    /// Near faces of `∏[0, εᵢ]`: `b(u) = min{t : u + t·v ∈ box}`.
    BoxNear { widths: Vec<f64> },
}

impl Cap {
    fn eval(&self, u: &[f64], direction: &[f64]) -> f64 {
        match self {
            Cap::Constant { value } => *value,
            Cap::Affine { base, gradient } => base + dot(gradient, u),
            Cap::BoxFar { widths } => shadow_range(u, direction, widths).1,
            Cap::BoxNear { widths } => shadow_range(u, direction, widths).0,
        }
    }

    fn max_bound(&self, section: &CrossSection) -> f64 {
        match self {
            Cap::Constant { value } => *value,
            Cap::Affine { base, gradient } => base + norm(gradient) * section.radius_bound(),
            Cap::BoxFar { widths } | Cap::BoxNear { widths } => norm(widths),
        }
    }
}

/// `{t·v + u : u ∈ K, 0 ≤ t ≤ T + b(u)} ∩ ℝ₊^d`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruncatedTubeSpec {
    pub direction: Vec<f64>,
    pub cross_section: CrossSection,
    pub height: f64,
    pub cap: Cap,
}

impl TruncatedTubeSpec {
    pub fn new(direction: Vec<f64>, cross_section: CrossSection, height: f64, cap: Cap) -> Result<Self, RegionError> {
        check_direction(&direction)?;
        let d = direction.len();
        match &cross_section {
            CrossSection::AxisBox { basis, intervals } => {
                if basis.len() != intervals.len() || basis.iter().any(|b| b.len() != d) {
                    return Err(RegionError::Invalid("cross-section basis does not match direction".into()));
                }
            }
            CrossSection::BoxShadow { widths } => check_dim(widths, d)?,
        }
        match &cap {
            Cap::Affine { gradient, .. } => check_dim(gradient, d)?,
            Cap::BoxFar { widths } | Cap::BoxNear { widths } => check_dim(widths, d)?,
            Cap::Constant { .. } => {}
        }
        Ok(Self {
            direction,
            cross_section,
            height,
            cap,
        })
    }

    pub fn dim(&self) -> usize {
        self.direction.len()
    }

    pub fn with_height(&self, height: f64) -> Self {
        Self {
            height,
            ..self.clone()
        }
    }

    /// `(t, u)` with `x = t·v + u`, `u ⊥ v`.
    pub fn decompose(&self, x: &[f64]) -> (f64, Vec<f64>) {
        let t = dot(x, &self.direction);
        let u = x.iter().zip(&self.direction).map(|(a, b)| a - t * b).collect();
        (t, u)
    }

    /// Membership with the height condition replaced by `t ≤ height`.
    pub(crate) fn member_at(&self, x: &[f64], height: f64) -> bool {
        if !in_chamber(x) {
            return false;
        }
        let (t, u) = self.decompose(x);
        if !self.cross_section.contains(&u, &self.direction) {
            return false;
        }
        0.0 <= t && t <= height + self.cap.eval(&u, &self.direction)
    }

    /// Upper bound on `‖x‖ − height` over members.
    pub fn norm_offset(&self) -> f64 {
        self.cap.max_bound(&self.cross_section).max(0.0) + self.cross_section.radius_bound()
    }
}

pub fn in_truncated_tube(x: &[f64], spec: &TruncatedTubeSpec) -> Result<bool, RegionError> {
    check_dim(x, spec.dim())?;
    Ok(spec.member_at(x, spec.height))
}

/// The two truncated tubes whose difference is the box `T·v + ∏[0, εᵢ]`
/// (up to its near faces, which the difference leaves out).
pub fn box_as_tube_difference(
    direction: &[f64],
    widths: &[f64],
    time: f64,
) -> Result<(TruncatedTubeSpec, TruncatedTubeSpec), RegionError> {
    check_dim(widths, direction.len())?;
    let section = CrossSection::BoxShadow {
        widths: widths.to_vec(),
    };
    let far = TruncatedTubeSpec::new(
        direction.to_vec(),
        section.clone(),
        time,
        Cap::BoxFar {
            widths: widths.to_vec(),
        },
    )?;
    let near = TruncatedTubeSpec::new(
        direction.to_vec(),
        section,
        time,
        Cap::BoxNear {
            widths: widths.to_vec(),
        },
    )?;
    Ok((far, near))
}

/// A one-parameter family of regions indexed by `T`, as used by the census.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum RegionFamily {
    /// `{‖x‖ ≤ T}`.
    Ball,
    /// `{x ∈ tube : ‖x‖ ≤ T}`.
    Tube(TubeSpec),
    /// `{x ∈ cone : ‖x‖ ≤ T}`.
    Cone(ConeSpec),
    /// Truncated tube of height `T`.
    Truncated(TruncatedTubeSpec),
    /// Moving box at time `T`.
    Box(BoxShape),
    /// `{xᵢ ≤ T}` for one coordinate.
    Coordinate { index: usize },
}

impl RegionFamily {
    /// Dimension constraint, if the family carries one.
    pub fn dim(&self) -> Option<usize> {
        match self {
            RegionFamily::Ball | RegionFamily::Coordinate { .. } => None,
            RegionFamily::Tube(s) => Some(s.dim()),
            RegionFamily::Cone(s) => Some(s.dim()),
            RegionFamily::Truncated(s) => Some(s.dim()),
            RegionFamily::Box(s) => Some(s.dim()),
        }
    }

    pub fn check_dim(&self, d: usize) -> Result<(), RegionError> {
        match self {
            RegionFamily::Coordinate { index } if *index >= d => Err(RegionError::Invalid(format!(
                "coordinate {index} out of range for dimension {d}"
            ))),
            _ => match self.dim() {
                Some(k) if k != d => Err(RegionError::DimensionMismatch { expected: d, got: k }),
                _ => Ok(()),
            },
        }
    }

    /// Whether membership is upward closed in `T`.
    pub fn is_cumulative(&self) -> bool {
        !matches!(self, RegionFamily::Box(_))
    }

    /// Short identifier used in CSV output.
    pub fn id(&self) -> String {
        let fmt = |v: &[f64]| v.iter().map(|x| format!("{x}")).collect::<Vec<_>>().join(":");
        match self {
            RegionFamily::Ball => "ball".into(),
            RegionFamily::Tube(s) => format!("tube[{};r={}]", fmt(&s.direction), s.radius),
            RegionFamily::Cone(s) => format!("cone[{};a={}]", fmt(&s.direction), s.half_angle),
            RegionFamily::Truncated(s) => format!("truncated[{}]", fmt(&s.direction)),
            RegionFamily::Box(s) => format!("box[{};w={}]", fmt(&s.direction), fmt(&s.widths)),
            RegionFamily::Coordinate { index } => format!("coord[{index}]"),
        }
    }

    /// The quantity a completeness horizon is measured in.
    pub fn order_value(&self, x: &[f64]) -> f64 {
        match self {
            RegionFamily::Coordinate { index } => x[*index],
            _ => norm(x),
        }
    }

    /// Bound on `order_value − T` over members at parameter `T`, for
    /// families whose direction has unit length.
    pub fn order_offset(&self) -> f64 {
        match self {
            RegionFamily::Truncated(s) => s.norm_offset(),
            RegionFamily::Box(s) => s.width_norm(),
            _ => 0.0,
        }
    }

    /// Largest `T` whose region only holds points with `order_value ≤ h`.
    pub fn horizon(&self, h: f64) -> f64 {
        match self {
            RegionFamily::Box(s) => (h - s.width_norm()) / norm(&s.direction),
            _ => h - self.order_offset(),
        }
    }

    /// Re-checks a deserialized family through its constructor, scaling
    /// tube and cone directions to unit length.
    pub fn validated(self) -> Result<Self, RegionError> {
        Ok(match self {
            RegionFamily::Ball | RegionFamily::Coordinate { .. } => self,
            RegionFamily::Tube(s) => RegionFamily::Tube(TubeSpec::new(
                normalize(&s.direction)?,
                s.radius,
                (!s.offset.is_empty()).then_some(s.offset),
            )?),
            RegionFamily::Cone(s) => RegionFamily::Cone(ConeSpec::new(normalize(&s.direction)?, s.half_angle)?),
            RegionFamily::Truncated(s) => {
                RegionFamily::Truncated(TruncatedTubeSpec::new(s.direction, s.cross_section, s.height, s.cap)?)
            }
            RegionFamily::Box(s) => RegionFamily::Box(BoxShape::new(s.direction, s.widths)?),
        })
    }

    /// Membership of `x` in the region at parameter `t`.
    pub fn contains(&self, x: &[f64], t: f64) -> bool {
        match self {
            RegionFamily::Ball => norm(x) <= t,
            RegionFamily::Tube(s) => in_chamber(x) && s.distance(x) <= s.radius && norm(x) <= t,
            RegionFamily::Cone(s) => {
                in_chamber(x)
                    && x.iter().any(|&c| c != 0.0)
                    && angle_to(x, &s.direction) < s.half_angle
                    && norm(x) <= t
            }
            RegionFamily::Truncated(s) => s.member_at(x, t),
            RegionFamily::Box(s) => s.lower_ok(x, t) && s.upper_ok(x, t),
            RegionFamily::Coordinate { index } => x[*index] <= t,
        }
    }

    /// Grid indices `[lo, hi)` at which `x` is a member. Membership is
    /// evaluated with [`RegionFamily::contains`] itself, so the result is
    /// exactly the pointwise classification.
    pub fn grid_span(&self, x: &[f64], grid: &[f64]) -> (usize, usize) {
        match self {
            RegionFamily::Box(s) => {
                let lo = grid.partition_point(|&t| !s.upper_ok(x, t));
                let hi = grid.partition_point(|&t| s.lower_ok(x, t));
                (lo, hi.max(lo))
            }
            _ => {
                let static_ok = match self {
                    RegionFamily::Tube(s) => in_chamber(x) && s.distance(x) <= s.radius,
                    RegionFamily::Cone(s) => {
                        in_chamber(x)
                            && x.iter().any(|&c| c != 0.0)
                            && angle_to(x, &s.direction) < s.half_angle
                    }
                    _ => true,
                };
                if !static_ok {
                    return (grid.len(), grid.len());
                }
                (grid.partition_point(|&t| !self.contains(x, t)), grid.len())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(v: &[f64]) -> Vec<f64> {
        normalize(v).unwrap()
    }

    #[test]
    fn tube_examples() {
        let v = unit(&[3.0, 4.0]);
        let spec = TubeSpec::new(v.clone(), 0.5, None).unwrap();
        let on_axis: Vec<f64> = v.iter().map(|c| 5.0 * c).collect();
        assert!(in_tube(&on_axis, &spec).unwrap());
        assert!(in_tube(&on_axis, &TubeSpec::new(v.clone(), 1e-300, None).unwrap()).unwrap());
        // closed boundary: radius equal to the point's own distance
        let x = [3.4, 3.7];
        let edge = TubeSpec::new(v.clone(), spec.distance(&x), None).unwrap();
        assert!(in_tube(&x, &edge).unwrap());
        assert!(!in_tube(&[-0.1, 5.0], &TubeSpec::new(v.clone(), 10.0, None).unwrap()).unwrap());
        assert!(matches!(
            in_tube(&[1.0], &spec),
            Err(RegionError::DimensionMismatch { expected: 2, got: 1 })
        ));
        assert!(TubeSpec::new(vec![1.0, 0.0], 1.0, None).is_err());
    }

    #[test]
    fn cone_examples() {
        let v = unit(&[1.0, 2.0]);
        let spec = ConeSpec::new(v.clone(), 0.2).unwrap();
        assert!(in_cone(&[3.0 * v[0], 3.0 * v[1]], &spec).unwrap());
        assert!(!in_cone(&[0.0, 0.0], &spec).unwrap());
        let x = [1.0, 1.5];
        let edge = ConeSpec::new(v.clone(), angle_to(&x, &v)).unwrap();
        assert!(!in_cone(&x, &edge).unwrap(), "cones are open");
    }

    #[test]
    fn box_examples() {
        let shape = BoxShape::new(vec![0.6, 0.8], vec![1.0, 0.5]).unwrap();
        let win = shape.at(10.0);
        assert!(in_box_window(&[6.0, 8.0], &win).unwrap());
        assert!(!in_box_window(&[6.0 - 1e-9, 8.0], &win).unwrap());
        assert!(in_box_window(&[7.0, 8.5], &win).unwrap());
        assert!(!in_box_window(&[7.0, 8.5 + 1e-9], &win).unwrap());
        let one = BoxShape::new(vec![1.0], vec![0.5]).unwrap().at(3.0);
        assert!(in_box_window(&[3.2], &one).unwrap() && !in_box_window(&[3.6], &one).unwrap());
    }

    #[test]
    fn truncated_tube_examples() {
        let v = unit(&[1.0, 1.0]);
        let section = CrossSection::axis_box(&v, vec![(-1.0, 1.0)]).unwrap();
        let spec = TruncatedTubeSpec::new(v.clone(), section, 10.0, Cap::Constant { value: 0.5 }).unwrap();
        let half: Vec<f64> = v.iter().map(|c| 5.0 * c).collect();
        assert!(in_truncated_tube(&half, &spec).unwrap());
        let top: Vec<f64> = v.iter().map(|c| (10.5 + 1e-6) * c).collect();
        assert!(!in_truncated_tube(&top, &spec).unwrap());
        let below: Vec<f64> = v.iter().map(|c| (10.5 - 1e-6) * c).collect();
        assert!(in_truncated_tube(&below, &spec).unwrap());
    }

    #[test]
    fn complement_basis_is_orthonormal() {
        let v = unit(&[1.0, 2.0, 3.0]);
        let b = complement_basis(&v);
        assert_eq!(b.len(), 2);
        for (i, e) in b.iter().enumerate() {
            assert!(dot(e, &v).abs() < 1e-14);
            assert!((norm(e) - 1.0).abs() < 1e-14);
            for f in &b[i + 1..] {
                assert!(dot(e, f).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn grid_span_matches_pointwise() {
        let grid: Vec<f64> = (0..40).map(|i| 0.5 * i as f64).collect();
        let v = unit(&[1.0, 1.3]);
        let families = [
            RegionFamily::Ball,
            RegionFamily::Tube(TubeSpec::new(v.clone(), 1.0, None).unwrap()),
            RegionFamily::Cone(ConeSpec::new(v.clone(), 0.3).unwrap()),
            RegionFamily::Box(BoxShape::new(v.clone(), vec![1.0, 2.0]).unwrap()),
            RegionFamily::Coordinate { index: 1 },
        ];
        for fam in &families {
            for i in 0..30 {
                for j in 0..30 {
                    let x = [0.37 * i as f64, 0.41 * j as f64];
                    let (lo, hi) = fam.grid_span(&x, &grid);
                    for (k, &t) in grid.iter().enumerate() {
                        assert_eq!(fam.contains(&x, t), (lo..hi).contains(&k), "{fam:?} {x:?} {t}");
                    }
                }
            }
        }
    }
}
