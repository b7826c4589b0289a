//! Complex quaternions `H(C)`.
//!
//! An element is `a = a0 i0 + a1 i1 + a2 i2 + a3 i3` with complex
//! coefficients. The complex unit commutes with every `i_k`, and
//! `i1 i2 = i3 = -i2 i1` (cyclic), `i_k^2 = -1` for `k = 1, 2, 3`.
//!
//! `H(C)` has zero divisors, so `norm_sq` is complex-valued and may vanish
//! for a nonzero argument.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Complex scalar coefficient.
pub type CScalar = Complex64;

pub const C_ZERO: CScalar = CScalar::new(0.0, 0.0);
pub const C_ONE: CScalar = CScalar::new(1.0, 0.0);
pub const C_I: CScalar = CScalar::new(0.0, 1.0);

/// Default absolute/relative tolerance for [`CQuat::approx_eq`].
pub const DEFAULT_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CQuat {
    /// Coefficients of `i0, i1, i2, i3`.
    pub c: [CScalar; 4],
}

impl CQuat {
    pub const ZERO: CQuat = CQuat { c: [C_ZERO; 4] };
    pub const ONE: CQuat = CQuat::basis(0);
    pub const I1: CQuat = CQuat::basis(1);
    pub const I2: CQuat = CQuat::basis(2);
    pub const I3: CQuat = CQuat::basis(3);

    pub const fn new(a0: CScalar, a1: CScalar, a2: CScalar, a3: CScalar) -> Self {
        Self { c: [a0, a1, a2, a3] }
    }

    /// Real-coefficient quaternion.
    pub const fn real(a0: f64, a1: f64, a2: f64, a3: f64) -> Self {
        Self::new(CScalar::new(a0, 0.0), CScalar::new(a1, 0.0), CScalar::new(a2, 0.0), CScalar::new(a3, 0.0))
    }

    /// The unit `i_k`, with `i_0 = 1`.
    pub const fn basis(k: usize) -> Self {
        let mut c = [C_ZERO; 4];
        c[k] = C_ONE;
        Self { c }
    }

    pub const fn scalar(a0: CScalar) -> Self {
        Self::new(a0, C_ZERO, C_ZERO, C_ZERO)
    }

    /// Purely vectorial quaternion `v1 i1 + v2 i2 + v3 i3`.
    pub const fn vector(v: [CScalar; 3]) -> Self {
        Self::new(C_ZERO, v[0], v[1], v[2])
    }

    pub fn vector_part(&self) -> [CScalar; 3] {
        [self.c[1], self.c[2], self.c[3]]
    }

    /// `Sc(a)` as a quaternion.
    pub fn sc(&self) -> CQuat {
        CQuat::scalar(self.c[0])
    }

    /// `Vec(a)`.
    pub fn vec(&self) -> CQuat {
        CQuat::vector(self.vector_part())
    }

    /// `a0 - Vec(a)`. Coefficients are not complex-conjugated.
    pub fn conj(&self) -> CQuat {
        CQuat::new(self.c[0], -self.c[1], -self.c[2], -self.c[3])
    }

    /// `a * conj(a) = a0^2 + a1^2 + a2^2 + a3^2` (complex).
    pub fn norm_sq(&self) -> CScalar {
        self.c.iter().map(|x| x * x).sum()
    }

    pub fn is_vectorial(&self) -> bool {
        self.c[0] == C_ZERO
    }

    pub fn scale(&self, s: CScalar) -> CQuat {
        CQuat { c: self.c.map(|x| x * s) }
    }

    /// `ab + ba`.
    pub fn anticommutator(&self, other: &CQuat) -> CQuat {
        *self * *other + *other * *self
    }

    /// Euclidean length of the 8 real components. Always real and
    /// nonnegative, unlike [`CQuat::norm_sq`].
    pub fn magnitude(&self) -> f64 {
        self.c.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Componentwise comparison with `|a_k - b_k| <= tol * max(1, |a_k|, |b_k|)`.
    pub fn approx_eq(&self, other: &CQuat, tol: f64) -> bool {
        self.c.iter().zip(other.c.iter()).all(|(a, b)| {
            let scale = 1f64.max(a.norm()).max(b.norm());
            (a - b).norm() <= tol * scale
        })
    }
}

/// Bilinear inner product `<a, b>` of complex 3-vectors (no conjugation).
pub fn dot3(a: &[CScalar; 3], b: &[CScalar; 3]) -> CScalar {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn cross3(a: &[CScalar; 3], b: &[CScalar; 3]) -> [CScalar; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

impl Mul for CQuat {
    type Output = CQuat;

    // Straight from the unit table.
    fn mul(self, rhs: CQuat) -> CQuat {
        let [a0, a1, a2, a3] = self.c;
        let [b0, b1, b2, b3] = rhs.c;
        CQuat::new(
            a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
            a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2,
            a0 * b2 + a2 * b0 + a3 * b1 - a1 * b3,
            a0 * b3 + a3 * b0 + a1 * b2 - a2 * b1,
        )
    }
}

impl Mul<CScalar> for CQuat {
    type Output = CQuat;
    fn mul(self, rhs: CScalar) -> CQuat {
        self.scale(rhs)
    }
}

impl Mul<f64> for CQuat {
    type Output = CQuat;
    fn mul(self, rhs: f64) -> CQuat {
        CQuat { c: self.c.map(|x| x * rhs) }
    }
}

impl Add for CQuat {
    type Output = CQuat;
    fn add(self, rhs: CQuat) -> CQuat {
        CQuat { c: std::array::from_fn(|k| self.c[k] + rhs.c[k]) }
    }
}

impl AddAssign for CQuat {
    fn add_assign(&mut self, rhs: CQuat) {
        *self = *self + rhs;
    }
}

impl Sub for CQuat {
    type Output = CQuat;
    fn sub(self, rhs: CQuat) -> CQuat {
        CQuat { c: std::array::from_fn(|k| self.c[k] - rhs.c[k]) }
    }
}

impl Neg for CQuat {
    type Output = CQuat;
    fn neg(self) -> CQuat {
        CQuat { c: self.c.map(|x| -x) }
    }
}

impl std::iter::Sum for CQuat {
    fn sum<I: Iterator<Item = CQuat>>(iter: I) -> CQuat {
        iter.fold(CQuat::ZERO, |acc, q| acc + q)
    }
}

impl From<CScalar> for CQuat {
    fn from(s: CScalar) -> Self {
        CQuat::scalar(s)
    }
}

impl fmt::Display for CQuat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) + ({})i1 + ({})i2 + ({})i3", self.c[0], self.c[1], self.c[2], self.c[3])
    }
}
