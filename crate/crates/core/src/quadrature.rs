//! Adaptive Gauss-Kronrod (7/15) quadrature for scalar and jet-valued
//! integrands.

use thiserror::Error;

use crate::cquat::CScalar;
use crate::jet::Jet2;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadratureError {
    #[error("no convergence on [{a}, {b}] (estimated error {error:e})")]
    QuadratureFailure { a: f64, b: f64, error: f64 },
    #[error("integrand failed at {x}: {message}")]
    Integrand { x: f64, message: String },
}

pub const DEFAULT_QUAD_TOL: f64 = 1e-10;
const MAX_DEPTH: u32 = 40;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

/// Values that can be integrated: a real vector space with a max-norm.
pub trait QuadValue: Copy {
    fn zero() -> Self;
    /// `self + a * x`
    fn axpy(self, a: f64, x: Self) -> Self;
    fn max_abs(&self) -> f64;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn axpy(self, a: f64, x: Self) -> Self {
        self + a * x
    }
    fn max_abs(&self) -> f64 {
        self.abs()
    }
}

impl QuadValue for CScalar {
    fn zero() -> Self {
        CScalar::new(0.0, 0.0)
    }
    fn axpy(self, a: f64, x: Self) -> Self {
        self + x * a
    }
    fn max_abs(&self) -> f64 {
        self.re.abs().max(self.im.abs())
    }
}

impl QuadValue for Jet2 {
    fn zero() -> Self {
        Jet2::constant(CScalar::new(0.0, 0.0))
    }
    fn axpy(self, a: f64, x: Self) -> Self {
        self + x.scale(CScalar::new(a, 0.0))
    }
    fn max_abs(&self) -> f64 {
        let mut m = self.val.max_abs();
        for i in 0..3 {
            m = m.max(self.grad[i].max_abs());
            for j in 0..3 {
                m = m.max(self.hess[i][j].max_abs());
            }
        }
        m
    }
}

fn gk15<T: QuadValue, F: Fn(f64) -> Result<T, String>>(f: &F, a: f64, b: f64) -> Result<(T, f64), QuadratureError> {
    let c = 0.5 * (a + b);
    let hw = 0.5 * (b - a);
    let eval = |x: f64| f(x).map_err(|message| QuadratureError::Integrand { x, message });
    let fc = eval(c)?;
    let mut kron = T::zero().axpy(WGK[7], fc);
    let mut gauss = T::zero().axpy(WG[3], fc);
    for (i, &x) in XGK[..7].iter().enumerate() {
        let f1 = eval(c - hw * x)?;
        let f2 = eval(c + hw * x)?;
        kron = kron.axpy(WGK[i], f1).axpy(WGK[i], f2);
        if i % 2 == 1 {
            let w = WG[i / 2];
            gauss = gauss.axpy(w, f1).axpy(w, f2);
        }
    }
    let kron = T::zero().axpy(hw, kron);
    let gauss = T::zero().axpy(hw, gauss);
    let err = kron.axpy(-1.0, gauss).max_abs();
    Ok((kron, err))
}

/// `int_a^b f(x) dx` to absolute-or-relative tolerance `tol`.
/// Reversed limits give the negated integral.
pub fn integrate<T, F>(f: F, a: f64, b: f64, tol: f64) -> Result<T, QuadratureError>
where
    T: QuadValue,
    F: Fn(f64) -> Result<T, String>,
{
    if a == b {
        return Ok(T::zero());
    }
    if a > b {
        return integrate(f, b, a, tol).map(|v| T::zero().axpy(-1.0, v));
    }
    let (whole, _) = gk15(&f, a, b)?;
    let scale_tol = tol.max(tol * whole.max_abs());
    adapt(&f, a, b, scale_tol, 0)
}

fn adapt<T: QuadValue, F: Fn(f64) -> Result<T, String>>(
    f: &F,
    a: f64,
    b: f64,
    tol: f64,
    depth: u32,
) -> Result<T, QuadratureError> {
    let (value, err) = gk15(f, a, b)?;
    if err <= tol {
        return Ok(value);
    }
    if depth >= MAX_DEPTH {
        return Err(QuadratureError::QuadratureFailure { a, b, error: err });
    }
    let m = 0.5 * (a + b);
    let left = adapt(f, a, m, 0.5 * tol, depth + 1)?;
    let right = adapt(f, m, b, 0.5 * tol, depth + 1)?;
    Ok(left.axpy(1.0, right))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_and_transcendental() {
        let v: f64 = integrate(|x| Ok(x * x * x - 2.0 * x), 0.0, 2.0, 1e-12).unwrap();
        assert!((v - 0.0).abs() < 1e-13);
        let v: f64 = integrate(|x: f64| Ok(x.exp()), 0.0, 1.0, 1e-12).unwrap();
        assert!((v - (std::f64::consts::E - 1.0)).abs() < 1e-13);
        let v: f64 = integrate(|x: f64| Ok(1.0 / x), 0.01, 1.0, 1e-11).unwrap();
        assert!((v - 100f64.ln()).abs() < 1e-10);
    }

    #[test]
    fn reversed_limits_negate() {
        let fwd: f64 = integrate(|x: f64| Ok(x.sin()), 0.0, 1.0, 1e-12).unwrap();
        let back: f64 = integrate(|x: f64| Ok(x.sin()), 1.0, 0.0, 1e-12).unwrap();
        assert_eq!(fwd, -back);
    }

    #[test]
    fn non_integrable_singularity_fails() {
        let r: Result<f64, _> = integrate(|x: f64| Ok(1.0 / (x * x)), 0.0, 1.0, 1e-10);
        assert!(r.is_err());
    }
}
