//! 2×2 unimodular matrices over ℝ and ℂ with overflow-free products.
//!
//! A [`RenormMatrix`] stores `entries` whose largest magnitude lies in
//! `[2^-1/2, 2^1/2]` together with an integer power-of-two exponent, so the
//! true matrix is `2^exp2 · entries`. Rescaling by powers of two is exact in
//! binary floating point, which keeps long products reproducible bit for bit.
//!
//! Jordan and Cartan projections are reported in hyperbolic length units:
//! `ℓ(g) = 2·log|λ_max(g)|` and `μ(g) = 2·log σ₁(g)`, with the basepoint
//! normalization `cosh μ(g) = ‖g‖²_F / 2`.

use std::f64::consts::{LN_2, PI};
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default loxodromy tolerance.
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AlgebraError {
    #[error("element is not loxodromic (|tr| = {trace_abs:.6e})")]
    NonLoxodromic { trace_abs: f64 },
    #[error("holonomy is only defined for complex factors")]
    RealFactor,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Real,
    Complex,
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Real => f.write_str("real"),
            Field::Complex => f.write_str("complex"),
        }
    }
}

/// A 2×2 matrix `2^exp2 · entries` with renormalized entries.
///
/// The determinant of the true matrix is carried alongside the entries and
/// multiplied through products. Once a product is long enough that its
/// smaller singular value drops below `ε·σ₁`, the determinant can no longer
/// be recovered from the rounded entries, so it is tracked instead.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RenormMatrix {
    entries: [Complex64; 4],
    exp2: i64,
    det: Complex64,
    field: Field,
}

#[inline]
fn pow2(e: i64) -> f64 {
    // exponents here are bounded by a few units after renormalization
    2f64.powi(e as i32)
}

impl RenormMatrix {
    /// Builds from row-major complex entries.
    pub fn from_complex(entries: [Complex64; 4], field: Field) -> Self {
        let det = entries[0] * entries[3] - entries[1] * entries[2];
        let entries = match field {
            Field::Real => entries.map(|z| Complex64::new(z.re, 0.0)),
            Field::Complex => entries,
        };
        let det = match field {
            Field::Real => Complex64::new(det.re, 0.0),
            Field::Complex => det,
        };
        let mut m = Self {
            entries,
            exp2: 0,
            det,
            field,
        };
        m.renormalize();
        m
    }

    /// Builds a real matrix from rows.
    pub fn from_real(rows: [[f64; 2]; 2]) -> Self {
        Self::from_complex(
            [
                Complex64::new(rows[0][0], 0.0),
                Complex64::new(rows[0][1], 0.0),
                Complex64::new(rows[1][0], 0.0),
                Complex64::new(rows[1][1], 0.0),
            ],
            Field::Real,
        )
    }

    pub fn identity(field: Field) -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Self {
            entries: [one, zero, zero, one],
            exp2: 0,
            det: one,
            field,
        }
    }

    pub fn diag(a: Complex64, d: Complex64, field: Field) -> Self {
        let zero = Complex64::new(0.0, 0.0);
        Self::from_complex([a, zero, zero, d], field)
    }

    /// Rotation by `angle` in SO(2).
    pub fn rotation(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self::from_real([[c, -s], [s, c]])
    }

    fn renormalize(&mut self) {
        let max = self
            .entries
            .iter()
            .map(|z| z.norm())
            .fold(0.0f64, f64::max);
        if max == 0.0 || !max.is_finite() {
            return;
        }
        let e = max.log2().round() as i64;
        if e != 0 {
            let s = pow2(-e);
            for z in &mut self.entries {
                *z *= s;
            }
            self.exp2 += e;
        }
    }

    pub fn entries(&self) -> &[Complex64; 4] {
        &self.entries
    }

    pub fn field(&self) -> Field {
        self.field
    }

    /// Natural log of the scale factor: true matrix = `exp(log_scale) · entries`.
    pub fn log_scale(&self) -> f64 {
        self.exp2 as f64 * LN_2
    }

    /// Power-of-two exponent of the scale factor.
    pub fn exp2(&self) -> i64 {
        self.exp2
    }

    /// Determinant of the true matrix (tracked multiplicatively).
    pub fn det(&self) -> Complex64 {
        self.det
    }

    /// Determinant recomputed from the stored entries and scale. Only
    /// meaningful while the product is well conditioned.
    pub fn det_from_entries(&self) -> Complex64 {
        let e = &self.entries;
        (e[0] * e[3] - e[1] * e[2]) * (2.0 * self.log_scale()).exp()
    }

    /// Entries of the true matrix. Overflows for very long products.
    pub fn true_entries(&self) -> [Complex64; 4] {
        let s = self.log_scale().exp();
        self.entries.map(|z| z * s)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let a = &self.entries;
        let b = &other.entries;
        let field = if self.field == Field::Complex || other.field == Field::Complex {
            Field::Complex
        } else {
            Field::Real
        };
        let mut m = Self {
            entries: [
                a[0] * b[0] + a[1] * b[2],
                a[0] * b[1] + a[1] * b[3],
                a[2] * b[0] + a[3] * b[2],
                a[2] * b[1] + a[3] * b[3],
            ],
            exp2: self.exp2 + other.exp2,
            det: self.det * other.det,
            field,
        };
        m.renormalize();
        m
    }

    /// Matrix inverse, `adj(g) / det(g)`.
    pub fn inverse(&self) -> Self {
        let e = &self.entries;
        let inv_det = self.det.inv();
        let mut m = Self {
            entries: [e[3] * inv_det, -e[1] * inv_det, -e[2] * inv_det, e[0] * inv_det],
            exp2: self.exp2,
            det: inv_det,
            field: self.field,
        };
        if m.field == Field::Real {
            for z in &mut m.entries {
                z.im = 0.0;
            }
            m.det.im = 0.0;
        }
        m.renormalize();
        m
    }

    /// `h · self · h⁻¹`.
    pub fn conjugate_by(&self, h: &Self) -> Self {
        h.mul(self).mul(&h.inverse())
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::identity(self.field);
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// Trace of the stored entries (scale not applied).
    fn entry_trace(&self) -> Complex64 {
        self.entries[0] + self.entries[3]
    }

    /// Larger-modulus eigenvalue of the entries, `λ_max(true) = 2^exp2 · x`.
    fn scaled_top_eigenvalue(&self) -> Complex64 {
        let tau = self.entry_trace();
        let det_scaled = self.det * pow2(-2 * self.exp2);
        let disc = (tau * tau - det_scaled * 4.0).sqrt();
        // pick the root without cancellation
        if (tau.conj() * disc).re >= 0.0 {
            (tau + disc) * 0.5
        } else {
            (tau - disc) * 0.5
        }
    }

    /// `log|tr g|` of the true matrix.
    pub fn log_trace_abs(&self) -> f64 {
        self.entry_trace().norm().ln() + self.log_scale()
    }

    /// `log|λ_max(g)|` of the true matrix.
    pub fn log_top_eigenvalue_abs(&self) -> f64 {
        self.scaled_top_eigenvalue().norm().ln() + self.log_scale()
    }

    /// `log ‖g‖²_F` of the true matrix.
    pub fn log_frobenius_sq(&self) -> f64 {
        let f2: f64 = self.entries.iter().map(|z| z.norm_sqr()).sum();
        f2.ln() + 2.0 * self.log_scale()
    }

    /// Real case: `|tr g| > 2 + tol`. Complex case: `|λ_max| > 1 + tol`.
    pub fn is_loxodromic(&self, tol: f64) -> bool {
        match self.field {
            Field::Real => self.log_trace_abs() > (2.0 + tol).ln(),
            Field::Complex => self.log_top_eigenvalue_abs() > (1.0 + tol).ln(),
        }
    }

    fn non_loxodromic(&self) -> AlgebraError {
        AlgebraError::NonLoxodromic {
            trace_abs: self.log_trace_abs().exp(),
        }
    }

    /// Translation length `2·log|λ_max|`.
    pub fn jordan_length(&self, tol: f64) -> Result<f64, AlgebraError> {
        if !self.is_loxodromic(tol) {
            return Err(self.non_loxodromic());
        }
        Ok(2.0 * self.log_top_eigenvalue_abs())
    }

    /// Displacement `2·log σ₁` of the basepoint, `cosh μ = ‖g‖²_F / 2`.
    pub fn cartan_length(&self) -> f64 {
        let f2: f64 = self.entries.iter().map(|z| z.norm_sqr()).sum();
        let two_det = 2.0 * self.det.norm() * pow2(-2 * self.exp2);
        let gap = ((f2 - two_det) * (f2 + two_det)).max(0.0).sqrt();
        let sigma_sq = 0.5 * (f2 + gap);
        (sigma_sq.ln() + 2.0 * self.log_scale()).max(0.0)
    }

    /// Argument of the larger eigenvalue reduced into `[0, π)`.
    pub fn holonomy_angle(&self, tol: f64) -> Result<f64, AlgebraError> {
        if self.field == Field::Real {
            return Err(AlgebraError::RealFactor);
        }
        if !self.is_loxodromic(tol) {
            return Err(self.non_loxodromic());
        }
        Ok(reduce_mod_pi(self.scaled_top_eigenvalue().arg()))
    }

    /// All projections at once.
    pub fn loxodata(&self, tol: f64) -> Result<Loxodata, AlgebraError> {
        let jordan = self.jordan_length(tol)?;
        let holonomy_angle = match self.field {
            Field::Real => None,
            Field::Complex => Some(self.holonomy_angle(tol)?),
        };
        Ok(Loxodata {
            jordan,
            cartan: self.cartan_length(),
            holonomy_angle,
            trace_abs: self.log_trace_abs().exp(),
        })
    }
}

/// Reduces an angle into `[0, π)`.
pub fn reduce_mod_pi(angle: f64) -> f64 {
    let r = angle.rem_euclid(PI);
    if r >= PI {
        0.0
    } else {
        r
    }
}

/// Conjugacy data of a loxodromic element.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Loxodata {
    pub jordan: f64,
    pub cartan: f64,
    /// Only complex factors carry a holonomy.
    pub holonomy_angle: Option<f64>,
    /// Saturates to infinity for very long products.
    pub trace_abs: f64,
}
