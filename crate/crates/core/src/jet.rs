//! Second-order forward-mode differentiation in three variables.
//!
//! A [`Jet2`] carries the value, gradient and Hessian of a complex scalar
//! at one point. Arithmetic and elementary functions propagate all three
//! exactly (no truncation), so derivative-based residuals only see
//! roundoff.

use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

use crate::cquat::{CScalar, C_ONE, C_ZERO};

/// Smallest `|b.val|` accepted by division, `recip`, `log`, `sqrt`.
pub const DIVISION_FLOOR: f64 = 1e-30;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum JetError {
    #[error("division by a value of magnitude {magnitude:e} (below floor {floor:e})")]
    DivisionNearZero { magnitude: f64, floor: f64 },
    #[error("{func} is not defined at {value}")]
    DomainError { func: &'static str, value: CScalar },
}

pub type Grad = [CScalar; 3];
pub type Hess = [[CScalar; 3]; 3];

const ZERO_GRAD: Grad = [C_ZERO; 3];
const ZERO_HESS: Hess = [[C_ZERO; 3]; 3];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet2 {
    pub val: CScalar,
    pub grad: Grad,
    pub hess: Hess,
}

/// Fill a symmetric Hessian from its upper triangle.
fn sym(entry: impl Fn(usize, usize) -> CScalar) -> Hess {
    let mut h = ZERO_HESS;
    for i in 0..3 {
        for j in i..3 {
            let e = entry(i, j);
            h[i][j] = e;
            h[j][i] = e;
        }
    }
    h
}

impl Jet2 {
    pub fn constant(val: CScalar) -> Self {
        Self { val, grad: ZERO_GRAD, hess: ZERO_HESS }
    }

    /// Seed for the coordinate `x_axis` evaluated at `value`.
    pub fn seed(axis: usize, value: f64) -> Self {
        let mut grad = ZERO_GRAD;
        grad[axis] = C_ONE;
        Self { val: CScalar::new(value, 0.0), grad, hess: ZERO_HESS }
    }

    /// Seeds for all three coordinates at `p`.
    pub fn seeds(p: [f64; 3]) -> [Jet2; 3] {
        [Self::seed(0, p[0]), Self::seed(1, p[1]), Self::seed(2, p[2])]
    }

    pub fn laplacian(&self) -> CScalar {
        self.hess[0][0] + self.hess[1][1] + self.hess[2][2]
    }

    /// Bitwise symmetry check (NaN entries compare by bit pattern).
    pub fn hess_is_symmetric(&self) -> bool {
        (0..3).all(|i| {
            (0..3).all(|j| {
                let (a, b) = (self.hess[i][j], self.hess[j][i]);
                a.re.to_bits() == b.re.to_bits() && a.im.to_bits() == b.im.to_bits()
            })
        })
    }

    pub fn scale(&self, s: CScalar) -> Jet2 {
        Jet2 { val: self.val * s, grad: self.grad.map(|g| g * s), hess: self.hess.map(|row| row.map(|h| h * s)) }
    }

    /// Chain rule through order two for a univariate `f` with
    /// `f(a), f'(a), f''(a)` already evaluated.
    pub fn chain(&self, f0: CScalar, f1: CScalar, f2: CScalar) -> Jet2 {
        let g = self.grad;
        let h = self.hess;
        Jet2 { val: f0, grad: g.map(|gi| f1 * gi), hess: sym(|i, j| f2 * g[i] * g[j] + f1 * h[i][j]) }
    }

    pub fn checked_div(&self, rhs: &Jet2) -> Result<Jet2, JetError> {
        Ok(*self * rhs.recip()?)
    }

    pub fn recip(&self) -> Result<Jet2, JetError> {
        let a = self.val;
        if a.norm() < DIVISION_FLOOR {
            return Err(JetError::DivisionNearZero { magnitude: a.norm(), floor: DIVISION_FLOOR });
        }
        let r = a.inv();
        Ok(self.chain(r, -r * r, 2.0 * r * r * r))
    }

    pub fn exp(&self) -> Jet2 {
        let e = self.val.exp();
        self.chain(e, e, e)
    }

    /// Principal-branch logarithm.
    pub fn ln(&self) -> Result<Jet2, JetError> {
        let a = self.val;
        if a.norm() < DIVISION_FLOOR {
            return Err(JetError::DomainError { func: "log", value: a });
        }
        let r = a.inv();
        Ok(self.chain(a.ln(), r, -r * r))
    }

    pub fn sin(&self) -> Jet2 {
        let (s, c) = (self.val.sin(), self.val.cos());
        self.chain(s, c, -s)
    }

    pub fn cos(&self) -> Jet2 {
        let (s, c) = (self.val.sin(), self.val.cos());
        self.chain(c, -s, -c)
    }

    pub fn tanh(&self) -> Jet2 {
        let t = self.val.tanh();
        let d1 = C_ONE - t * t;
        self.chain(t, d1, -2.0 * t * d1)
    }

    pub fn sqrt(&self) -> Result<Jet2, JetError> {
        let a = self.val;
        if a.norm() < DIVISION_FLOOR {
            return Err(JetError::DomainError { func: "sqrt", value: a });
        }
        let s = a.sqrt();
        let d1 = 0.5 / s;
        Ok(self.chain(s, d1, -0.5 * d1 / a))
    }

    /// `a^p`. Nonnegative integer exponents are defined everywhere; other
    /// exponents use the principal branch and need `|a|` above the floor.
    pub fn powc(&self, p: CScalar) -> Result<Jet2, JetError> {
        let a = self.val;
        let is_nonneg_int = p.im == 0.0 && p.re >= 0.0 && p.re.fract() == 0.0;
        if is_nonneg_int {
            let n = p.re as i32;
            let f0 = a.powi(n);
            let f1 = if n >= 1 { a.powi(n - 1) * n as f64 } else { C_ZERO };
            let f2 = if n >= 2 { a.powi(n - 2) * (n * (n - 1)) as f64 } else { C_ZERO };
            return Ok(self.chain(f0, f1, f2));
        }
        if a.norm() < DIVISION_FLOOR {
            return Err(JetError::DomainError { func: "pow", value: a });
        }
        let f0 = a.powc(p);
        let f1 = p * f0 / a;
        let f2 = p * (p - C_ONE) * f0 / (a * a);
        Ok(self.chain(f0, f1, f2))
    }
}

impl Add for Jet2 {
    type Output = Jet2;
    fn add(self, b: Jet2) -> Jet2 {
        Jet2 {
            val: self.val + b.val,
            grad: std::array::from_fn(|i| self.grad[i] + b.grad[i]),
            hess: sym(|i, j| self.hess[i][j] + b.hess[i][j]),
        }
    }
}

impl Sub for Jet2 {
    type Output = Jet2;
    fn sub(self, b: Jet2) -> Jet2 {
        Jet2 {
            val: self.val - b.val,
            grad: std::array::from_fn(|i| self.grad[i] - b.grad[i]),
            hess: sym(|i, j| self.hess[i][j] - b.hess[i][j]),
        }
    }
}

impl Mul for Jet2 {
    type Output = Jet2;
    fn mul(self, b: Jet2) -> Jet2 {
        let (u, v) = (self, b);
        Jet2 {
            val: u.val * v.val,
            grad: std::array::from_fn(|i| u.grad[i] * v.val + u.val * v.grad[i]),
            hess: sym(|i, j| {
                u.hess[i][j] * v.val + u.val * v.hess[i][j] + u.grad[i] * v.grad[j] + u.grad[j] * v.grad[i]
            }),
        }
    }
}

impl Neg for Jet2 {
    type Output = Jet2;
    fn neg(self) -> Jet2 {
        self.scale(-C_ONE)
    }
}
