//! Scalar, vector and quaternion fields over a region of R^3, and the
//! differential operators acting on them: grad, div, rot, the Laplacian,
//! the Moisil-Theodoresco operator `D = sum_k i_k d_k` and the logarithmic
//! derivative `u^{-1} D u`.
//!
//! Fields are immutable expression trees over the coordinate seeds.
//! Evaluation returns a [`Jet2`], so every operator is exact up to
//! roundoff. Partial derivatives are themselves fields (see
//! [`ScalarField::partial`]); this is what lets `D` be applied to a field
//! that is already a derivative without losing order.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use thiserror::Error;

use crate::cquat::{CQuat, CScalar, C_ONE, C_ZERO};
use crate::jet::{Jet2, JetError};
use crate::ode::OdeError;
use crate::quadrature::QuadratureError;

pub type Point = [f64; 3];

/// Exclusion margin used by the convenience constructors on [`Region`].
pub const DEFAULT_EXCLUSION_MARGIN: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FieldError {
    #[error("point {point:?} is outside the region or in an excluded set")]
    EvalOutsideRegion { point: Point },
    #[error("at {point:?}: {source}")]
    Jet {
        point: Point,
        #[source]
        source: JetError,
    },
    #[error("pole of the solution family at {point:?}: |w - 1| = {magnitude:e}")]
    PoleOfFamily { point: Point, magnitude: f64 },
    #[error("query {point:?} is farther than half a spacing from every grid node")]
    QueryOffNode { point: Point },
    #[error("grid node {index:?} has no interior stencil")]
    BoundaryNode { index: [usize; 3] },
    #[error("invalid region bounds: {0}")]
    InvalidRegion(String),
    #[error(transparent)]
    Ode(#[from] OdeError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

impl FieldError {
    pub fn at(point: Point) -> impl Fn(JetError) -> FieldError {
        move |source| FieldError::Jet { point, source }
    }
}

/// Predicate marking points that must not be sampled or evaluated.
#[derive(Clone)]
pub struct Exclusion {
    pub label: String,
    pred: Arc<dyn Fn(Point) -> bool + Send + Sync>,
}

impl Exclusion {
    pub fn new(label: impl Into<String>, pred: impl Fn(Point) -> bool + Send + Sync + 'static) -> Self {
        Self { label: label.into(), pred: Arc::new(pred) }
    }

    pub fn excludes(&self, p: Point) -> bool {
        (self.pred)(p)
    }
}

impl fmt::Debug for Exclusion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Exclusion({})", self.label)
    }
}

/// An axis-aligned box with excluded subsets.
#[derive(Clone, Debug)]
pub struct Region {
    lo: Point,
    hi: Point,
    exclusions: Vec<Exclusion>,
}

impl Region {
    pub fn new(lo: Point, hi: Point) -> Result<Self, FieldError> {
        for k in 0..3 {
            if !(lo[k] < hi[k]) || !lo[k].is_finite() || !hi[k].is_finite() {
                return Err(FieldError::InvalidRegion(format!("axis {}: [{}, {}]", k + 1, lo[k], hi[k])));
            }
        }
        Ok(Self { lo, hi, exclusions: Vec::new() })
    }

    pub fn cube(a: f64, b: f64) -> Result<Self, FieldError> {
        Self::new([a; 3], [b; 3])
    }

    pub fn lo(&self) -> Point {
        self.lo
    }

    pub fn hi(&self) -> Point {
        self.hi
    }

    pub fn exclusions(&self) -> &[Exclusion] {
        &self.exclusions
    }

    pub fn with_exclusion(mut self, exclusion: Exclusion) -> Self {
        self.exclusions.push(exclusion);
        self
    }

    /// Excludes the slab `|x_axis| < margin`.
    pub fn excluding_plane(self, axis: usize, margin: f64) -> Self {
        let label = format!("|x{}| < {margin}", axis + 1);
        self.with_exclusion(Exclusion::new(label, move |p| p[axis].abs() < margin))
    }

    /// Excludes the max-norm cube `|x|_inf < margin`.
    pub fn excluding_origin(self, margin: f64) -> Self {
        let label = format!("|x|_inf < {margin}");
        self.with_exclusion(Exclusion::new(label, move |p| p.iter().fold(0f64, |m, x| m.max(x.abs())) < margin))
    }

    /// Keeps only the spherical shell `r_in <= |x| <= r_out`.
    pub fn shell(self, r_in: f64, r_out: f64) -> Self {
        let label = format!("outside {r_in} <= |x| <= {r_out}");
        self.with_exclusion(Exclusion::new(label, move |p| {
            let r = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
            r < r_in || r > r_out
        }))
    }

    pub fn in_box(&self, p: Point) -> bool {
        (0..3).all(|k| p[k] >= self.lo[k] && p[k] <= self.hi[k])
    }

    pub fn contains(&self, p: Point) -> bool {
        self.in_box(p) && !self.exclusions.iter().any(|e| e.excludes(p))
    }

    pub fn check(&self, p: Point) -> Result<(), FieldError> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(FieldError::EvalOutsideRegion { point: p })
        }
    }
}

/// A field whose jets come from outside the expression language
/// (ODE solutions, quadratures, grids).
pub trait JetSource: Send + Sync {
    fn jet(&self, p: Point) -> Result<Jet2, FieldError>;
    /// The partial derivative along `axis`, as another field.
    fn partial(&self, axis: usize) -> ScalarField;
    fn describe(&self) -> String;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Exp,
    Log,
    Sin,
    Cos,
    Tanh,
    Sqrt,
    Recip,
}

enum Node {
    Const(CScalar),
    Coord(usize),
    Add(ScalarField, ScalarField),
    Sub(ScalarField, ScalarField),
    Mul(ScalarField, ScalarField),
    Div(ScalarField, ScalarField),
    Neg(ScalarField),
    Func(Func, ScalarField),
    Pow(ScalarField, CScalar),
    Restrict(Arc<Region>, ScalarField),
    Source(Arc<dyn JetSource>),
}

/// A complex scalar field with exact second-order jets.
#[derive(Clone)]
pub struct ScalarField(Arc<Node>);

impl ScalarField {
    fn node(n: Node) -> Self {
        ScalarField(Arc::new(n))
    }

    pub fn constant(c: CScalar) -> Self {
        Self::node(Node::Const(c))
    }

    pub fn real(x: f64) -> Self {
        Self::constant(CScalar::new(x, 0.0))
    }

    pub fn zero() -> Self {
        Self::constant(C_ZERO)
    }

    pub fn one() -> Self {
        Self::constant(C_ONE)
    }

    /// The coordinate `x_{axis+1}`.
    pub fn coord(axis: usize) -> Self {
        assert!(axis < 3, "axis out of range: {axis}");
        Self::node(Node::Coord(axis))
    }

    pub fn x1() -> Self {
        Self::coord(0)
    }

    pub fn x2() -> Self {
        Self::coord(1)
    }

    pub fn x3() -> Self {
        Self::coord(2)
    }

    /// `|x|`.
    pub fn radius() -> Self {
        let [x1, x2, x3] = [Self::x1(), Self::x2(), Self::x3()];
        (x1.clone() * x1 + x2.clone() * x2 + x3.clone() * x3).sqrt()
    }

    pub fn from_source(src: Arc<dyn JetSource>) -> Self {
        Self::node(Node::Source(src))
    }

    pub fn func(&self, f: Func) -> Self {
        Self::node(Node::Func(f, self.clone()))
    }

    pub fn exp(&self) -> Self {
        self.func(Func::Exp)
    }

    pub fn ln(&self) -> Self {
        self.func(Func::Log)
    }

    pub fn sin(&self) -> Self {
        self.func(Func::Sin)
    }

    pub fn cos(&self) -> Self {
        self.func(Func::Cos)
    }

    pub fn tanh(&self) -> Self {
        self.func(Func::Tanh)
    }

    pub fn sqrt(&self) -> Self {
        self.func(Func::Sqrt)
    }

    pub fn recip(&self) -> Self {
        self.func(Func::Recip)
    }

    pub fn powc(&self, p: CScalar) -> Self {
        Self::node(Node::Pow(self.clone(), p))
    }

    pub fn powf(&self, p: f64) -> Self {
        self.powc(CScalar::new(p, 0.0))
    }

    /// The same field, failing with `EvalOutsideRegion` off `region`.
    pub fn restrict(&self, region: &Region) -> Self {
        Self::node(Node::Restrict(Arc::new(region.clone()), self.clone()))
    }

    pub fn as_constant(&self) -> Option<CScalar> {
        match &*self.0 {
            Node::Const(c) => Some(*c),
            _ => None,
        }
    }

    fn is_zero(&self) -> bool {
        self.as_constant() == Some(C_ZERO)
    }

    fn is_one(&self) -> bool {
        self.as_constant() == Some(C_ONE)
    }

    pub fn eval(&self, p: Point) -> Result<Jet2, FieldError> {
        let at = FieldError::at(p);
        Ok(match &*self.0 {
            Node::Const(c) => Jet2::constant(*c),
            Node::Coord(k) => Jet2::seed(*k, p[*k]),
            Node::Add(a, b) => a.eval(p)? + b.eval(p)?,
            Node::Sub(a, b) => a.eval(p)? - b.eval(p)?,
            Node::Mul(a, b) => a.eval(p)? * b.eval(p)?,
            Node::Div(a, b) => a.eval(p)?.checked_div(&b.eval(p)?).map_err(at)?,
            Node::Neg(a) => -a.eval(p)?,
            Node::Func(f, a) => {
                let j = a.eval(p)?;
                match f {
                    Func::Exp => j.exp(),
                    Func::Log => j.ln().map_err(at)?,
                    Func::Sin => j.sin(),
                    Func::Cos => j.cos(),
                    Func::Tanh => j.tanh(),
                    Func::Sqrt => j.sqrt().map_err(at)?,
                    Func::Recip => j.recip().map_err(at)?,
                }
            }
            Node::Pow(a, e) => a.eval(p)?.powc(*e).map_err(at)?,
            Node::Restrict(region, a) => {
                region.check(p)?;
                a.eval(p)?
            }
            Node::Source(src) => src.jet(p)?,
        })
    }

    /// Value only.
    pub fn value(&self, p: Point) -> Result<CScalar, FieldError> {
        Ok(self.eval(p)?.val)
    }

    /// `d/dx_{axis+1}` of this field, as a field.
    pub fn partial(&self, axis: usize) -> ScalarField {
        assert!(axis < 3, "axis out of range: {axis}");
        match &*self.0 {
            Node::Const(_) => Self::zero(),
            Node::Coord(k) => {
                if *k == axis {
                    Self::one()
                } else {
                    Self::zero()
                }
            }
            Node::Add(a, b) => a.partial(axis) + b.partial(axis),
            Node::Sub(a, b) => a.partial(axis) - b.partial(axis),
            Node::Mul(a, b) => a.partial(axis) * b.clone() + a.clone() * b.partial(axis),
            Node::Div(a, b) => {
                let (da, db) = (a.partial(axis), b.partial(axis));
                if db.is_zero() {
                    da / b.clone()
                } else {
                    (da * b.clone() - a.clone() * db) / (b.clone() * b.clone())
                }
            }
            Node::Neg(a) => -a.partial(axis),
            Node::Func(f, a) => {
                let da = a.partial(axis);
                if da.is_zero() {
                    return Self::zero();
                }
                match f {
                    Func::Exp => self.clone() * da,
                    Func::Log => da / a.clone(),
                    Func::Sin => a.cos() * da,
                    Func::Cos => -(a.sin() * da),
                    Func::Tanh => (Self::one() - self.clone() * self.clone()) * da,
                    Func::Sqrt => da / (self.clone() * 2.0),
                    Func::Recip => -(da * self.clone() * self.clone()),
                }
            }
            Node::Pow(a, e) => {
                let da = a.partial(axis);
                if da.is_zero() {
                    return Self::zero();
                }
                let lowered = if *e == C_ONE + C_ONE { a.clone() } else { a.powc(e - C_ONE) };
                Self::constant(*e) * lowered * da
            }
            Node::Restrict(region, a) => Self::node(Node::Restrict(region.clone(), a.partial(axis))),
            Node::Source(src) => src.partial(axis),
        }
    }

    /// `grad u` as a vector field.
    pub fn gradient(&self) -> VectorField {
        VectorField::new([self.partial(0), self.partial(1), self.partial(2)])
    }

    /// `Δu` as a field.
    pub fn laplacian_field(&self) -> ScalarField {
        (0..3).map(|k| self.partial(k).partial(k)).fold(Self::zero(), |acc, t| acc + t)
    }
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &*self.0 {
            Node::Const(c) if c.im == 0.0 => write!(f, "{}", c.re),
            Node::Const(c) => write!(f, "({c})"),
            Node::Coord(k) => write!(f, "x{}", k + 1),
            Node::Add(a, b) => write!(f, "({a} + {b})"),
            Node::Sub(a, b) => write!(f, "({a} - {b})"),
            Node::Mul(a, b) => write!(f, "{a}*{b}"),
            Node::Div(a, b) => write!(f, "{a}/{b}"),
            Node::Neg(a) => write!(f, "-{a}"),
            Node::Func(func, a) => write!(f, "{}({a})", format!("{func:?}").to_lowercase()),
            Node::Pow(a, e) if e.im == 0.0 => write!(f, "{a}^{}", e.re),
            Node::Pow(a, e) => write!(f, "{a}^({e})"),
            Node::Restrict(_, a) => write!(f, "{a}"),
            Node::Source(src) => write!(f, "{}", src.describe()),
        }
    }
}

impl Add for ScalarField {
    type Output = ScalarField;
    fn add(self, rhs: ScalarField) -> ScalarField {
        if self.is_zero() {
            rhs
        } else if rhs.is_zero() {
            self
        } else {
            Self::node(Node::Add(self, rhs))
        }
    }
}

impl Sub for ScalarField {
    type Output = ScalarField;
    fn sub(self, rhs: ScalarField) -> ScalarField {
        if rhs.is_zero() {
            self
        } else if self.is_zero() {
            -rhs
        } else {
            Self::node(Node::Sub(self, rhs))
        }
    }
}

impl Mul for ScalarField {
    type Output = ScalarField;
    fn mul(self, rhs: ScalarField) -> ScalarField {
        if self.is_zero() || rhs.is_zero() {
            Self::zero()
        } else if self.is_one() {
            rhs
        } else if rhs.is_one() {
            self
        } else {
            Self::node(Node::Mul(self, rhs))
        }
    }
}

impl Div for ScalarField {
    type Output = ScalarField;
    fn div(self, rhs: ScalarField) -> ScalarField {
        if rhs.is_one() {
            self
        } else {
            Self::node(Node::Div(self, rhs))
        }
    }
}

impl Neg for ScalarField {
    type Output = ScalarField;
    fn neg(self) -> ScalarField {
        match self.as_constant() {
            Some(c) => Self::constant(-c),
            None => Self::node(Node::Neg(self)),
        }
    }
}

impl Add<f64> for ScalarField {
    type Output = ScalarField;
    fn add(self, rhs: f64) -> ScalarField {
        self + ScalarField::real(rhs)
    }
}

impl Sub<f64> for ScalarField {
    type Output = ScalarField;
    fn sub(self, rhs: f64) -> ScalarField {
        self - ScalarField::real(rhs)
    }
}

impl Mul<f64> for ScalarField {
    type Output = ScalarField;
    fn mul(self, rhs: f64) -> ScalarField {
        ScalarField::real(rhs) * self
    }
}

impl Mul<ScalarField> for f64 {
    type Output = ScalarField;
    fn mul(self, rhs: ScalarField) -> ScalarField {
        ScalarField::real(self) * rhs
    }
}

impl Div<f64> for ScalarField {
    type Output = ScalarField;
    fn div(self, rhs: f64) -> ScalarField {
        ScalarField::real(1.0 / rhs) * self
    }
}

impl From<f64> for ScalarField {
    fn from(x: f64) -> Self {
        ScalarField::real(x)
    }
}

impl From<CScalar> for ScalarField {
    fn from(c: CScalar) -> Self {
        ScalarField::constant(c)
    }
}

/// A purely vectorial quaternion field `c1 i1 + c2 i2 + c3 i3`.
#[derive(Clone, Debug)]
pub struct VectorField {
    pub c: [ScalarField; 3],
}

impl VectorField {
    pub fn new(c: [ScalarField; 3]) -> Self {
        Self { c }
    }

    pub fn zero() -> Self {
        Self::new([ScalarField::zero(), ScalarField::zero(), ScalarField::zero()])
    }

    /// Constant field with the given vector coefficients.
    pub fn constant(v: [CScalar; 3]) -> Self {
        Self::new(v.map(ScalarField::constant))
    }

    /// `i_{axis+1}` as a constant field.
    pub fn unit(axis: usize) -> Self {
        let mut v = [C_ZERO; 3];
        v[axis] = C_ONE;
        Self::constant(v)
    }

    /// The position field `x1 i1 + x2 i2 + x3 i3`.
    pub fn position() -> Self {
        Self::new([ScalarField::x1(), ScalarField::x2(), ScalarField::x3()])
    }

    pub fn eval(&self, p: Point) -> Result<[Jet2; 3], FieldError> {
        Ok([self.c[0].eval(p)?, self.c[1].eval(p)?, self.c[2].eval(p)?])
    }

    pub fn value(&self, p: Point) -> Result<CQuat, FieldError> {
        let j = self.eval(p)?;
        Ok(CQuat::vector([j[0].val, j[1].val, j[2].val]))
    }

    pub fn scale(&self, s: ScalarField) -> VectorField {
        VectorField::new(self.c.clone().map(|c| s.clone() * c))
    }

    /// Bilinear `<F, G>` as a scalar field.
    pub fn dot(&self, other: &VectorField) -> ScalarField {
        (0..3).fold(ScalarField::zero(), |acc, k| acc + self.c[k].clone() * other.c[k].clone())
    }

    pub fn restrict(&self, region: &Region) -> VectorField {
        VectorField::new(self.c.clone().map(|c| c.restrict(region)))
    }

    pub fn to_quat(&self) -> QuatField {
        let [c1, c2, c3] = self.c.clone();
        QuatField::new([ScalarField::zero(), c1, c2, c3])
    }
}

impl Add for VectorField {
    type Output = VectorField;
    fn add(self, rhs: VectorField) -> VectorField {
        let [a1, a2, a3] = self.c;
        let [b1, b2, b3] = rhs.c;
        VectorField::new([a1 + b1, a2 + b2, a3 + b3])
    }
}

impl Sub for VectorField {
    type Output = VectorField;
    fn sub(self, rhs: VectorField) -> VectorField {
        let [a1, a2, a3] = self.c;
        let [b1, b2, b3] = rhs.c;
        VectorField::new([a1 - b1, a2 - b2, a3 - b3])
    }
}

/// A full quaternion field `c0 + c1 i1 + c2 i2 + c3 i3`.
#[derive(Clone, Debug)]
pub struct QuatField {
    pub c: [ScalarField; 4],
}

impl QuatField {
    pub fn new(c: [ScalarField; 4]) -> Self {
        Self { c }
    }

    pub fn scalar(u: ScalarField) -> Self {
        Self::new([u, ScalarField::zero(), ScalarField::zero(), ScalarField::zero()])
    }

    pub fn eval(&self, p: Point) -> Result<[Jet2; 4], FieldError> {
        Ok([self.c[0].eval(p)?, self.c[1].eval(p)?, self.c[2].eval(p)?, self.c[3].eval(p)?])
    }

    pub fn value(&self, p: Point) -> Result<CQuat, FieldError> {
        let j = self.eval(p)?;
        Ok(CQuat::new(j[0].val, j[1].val, j[2].val, j[3].val))
    }

    /// `u * g` for a scalar field `u`.
    pub fn scale(&self, u: &ScalarField) -> QuatField {
        QuatField::new(self.c.clone().map(|c| u.clone() * c))
    }
}

/// Quaternion assembled from component jets: value, `d_k` for each axis,
/// `d_k d_l` for each pair.
pub(crate) fn jets_value(j: &[Jet2]) -> CQuat {
    quat_from(j, |x| x.val)
}

pub(crate) fn jets_partial(j: &[Jet2], k: usize) -> CQuat {
    quat_from(j, |x| x.grad[k])
}

pub(crate) fn jets_second(j: &[Jet2], k: usize, l: usize) -> CQuat {
    quat_from(j, |x| x.hess[k][l])
}

fn quat_from(j: &[Jet2], f: impl Fn(&Jet2) -> CScalar) -> CQuat {
    match j.len() {
        3 => CQuat::vector([f(&j[0]), f(&j[1]), f(&j[2])]),
        4 => CQuat::new(f(&j[0]), f(&j[1]), f(&j[2]), f(&j[3])),
        n => unreachable!("quaternion from {n} jets"),
    }
}

/// `sum_k i_k * q_k` where `q_k` is the `k`-th partial.
pub(crate) fn dirac_of_partials(partial: impl Fn(usize) -> CQuat) -> CQuat {
    (0..3).map(|k| CQuat::basis(k + 1) * partial(k)).sum()
}

/// `Du = grad u` for scalar `u`.
pub fn grad(u: &ScalarField, p: Point) -> Result<CQuat, FieldError> {
    Ok(CQuat::vector(u.eval(p)?.grad))
}

pub fn div(f: &VectorField, p: Point) -> Result<CScalar, FieldError> {
    let j = f.eval(p)?;
    Ok(j[0].grad[0] + j[1].grad[1] + j[2].grad[2])
}

pub fn rot(f: &VectorField, p: Point) -> Result<CQuat, FieldError> {
    let j = f.eval(p)?;
    Ok(CQuat::vector([j[2].grad[1] - j[1].grad[2], j[0].grad[2] - j[2].grad[0], j[1].grad[0] - j[0].grad[1]]))
}

pub fn laplacian(u: &ScalarField, p: Point) -> Result<CScalar, FieldError> {
    Ok(u.eval(p)?.laplacian())
}

/// `Dg = sum_k i_k d_k g`, by quaternion multiplication of the units with
/// the partials of `g`.
pub fn dirac(g: &QuatField, p: Point) -> Result<CQuat, FieldError> {
    let j = g.eval(p)?;
    Ok(dirac_of_partials(|k| jets_partial(&j, k)))
}

/// `D` of a purely vectorial field.
pub fn dirac_vector(f: &VectorField, p: Point) -> Result<CQuat, FieldError> {
    let j = f.eval(p)?;
    Ok(dirac_of_partials(|k| jets_partial(&j, k)))
}

/// Logarithmic derivative `u^{-1} D u = grad u / u`. Nonvanishing of `u` is
/// checked wherever the result is evaluated.
pub fn log_deriv(u: &ScalarField) -> VectorField {
    VectorField::new(std::array::from_fn(|k| u.partial(k) / u.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn re(x: f64) -> CScalar {
        CScalar::new(x, 0.0)
    }

    fn x() -> [ScalarField; 3] {
        [ScalarField::x1(), ScalarField::x2(), ScalarField::x3()]
    }

    #[test]
    fn grad_examples() {
        let [x1, x2, _] = x();
        let u = x1.clone() * x2;
        assert_eq!(grad(&u, [1.0, 2.0, 0.0]).unwrap(), CQuat::real(0.0, 2.0, 1.0, 0.0));
        assert_eq!(grad(&ScalarField::real(7.0), [0.3, 0.1, 0.2]).unwrap(), CQuat::ZERO);
        let r2 = {
            let [a, b, c] = x();
            a.clone() * a + b.clone() * b + c.clone() * c
        };
        assert_eq!(grad(&r2, [1.0, 0.0, 0.0]).unwrap(), CQuat::real(0.0, 2.0, 0.0, 0.0));
    }

    #[test]
    fn dirac_examples() {
        let [x1, x2, _] = x();
        let z = ScalarField::zero();
        let g = QuatField::new([z.clone(), z.clone(), x1.clone(), z.clone()]);
        assert_eq!(dirac(&g, [0.2, -0.4, 1.0]).unwrap(), CQuat::I3);
        let g = QuatField::new([z.clone(), x1, z.clone(), z.clone()]);
        assert_eq!(dirac(&g, [0.2, -0.4, 1.0]).unwrap(), -CQuat::ONE);
        let g = QuatField::scalar(x2);
        assert_eq!(dirac(&g, [0.2, -0.4, 1.0]).unwrap(), CQuat::I2);
    }

    #[test]
    fn log_derivative_examples() {
        let [x1, _, _] = x();
        let p = [0.7, -0.3, 0.4];
        let f = log_deriv(&x1.exp());
        assert!(f.value(p).unwrap().approx_eq(&CQuat::I1, 1e-15));

        let f = log_deriv(&x1);
        assert!(f.value(p).unwrap().approx_eq(&CQuat::real(0.0, 1.0 / 0.7, 0.0, 0.0), 1e-15));

        let phi = (4.0 * std::f64::consts::PI * ScalarField::radius()).recip();
        let f = log_deriv(&phi);
        let r2 = p.iter().map(|c| c * c).sum::<f64>();
        let expect = CQuat::real(0.0, -p[0] / r2, -p[1] / r2, -p[2] / r2);
        assert!(f.value(p).unwrap().approx_eq(&expect, 1e-14));
    }

    #[test]
    fn log_derivative_rejects_zero() {
        let f = log_deriv(&ScalarField::x1());
        let err = f.value([0.0, 1.0, 1.0]).unwrap_err();
        assert!(matches!(err, FieldError::Jet { source: JetError::DivisionNearZero { .. }, .. }));
    }

    #[test]
    fn div_rot_laplacian() {
        let p = [0.3, 0.5, -0.9];
        assert_eq!(div(&VectorField::position(), p).unwrap(), re(3.0));
        let [x1, x2, x3] = x();
        let u = (x1.clone() * x2.clone()).sin() * x3.exp() + x1.clone() / (x2 + 2.0);
        let r = rot(&u.gradient(), p).unwrap();
        assert!(r.magnitude() < 1e-14);
        let phi = (4.0 * std::f64::consts::PI * ScalarField::radius()).recip();
        assert!(laplacian(&phi, p).unwrap().norm() < 1e-14);
    }

    #[test]
    fn symbolic_partials_agree_with_jets() {
        let [x1, x2, x3] = x();
        let u = (x1.clone() * x3.clone()).tanh() / (x2.clone() * x2 + 1.5) + x3.sqrt().ln();
        let p = [0.4, -1.1, 0.8];
        let j = u.eval(p).unwrap();
        for k in 0..3 {
            let d = u.partial(k).eval(p).unwrap();
            assert!((d.val - j.grad[k]).norm() < 1e-14);
            for l in 0..3 {
                assert!((d.grad[l] - j.hess[k][l]).norm() < 1e-13);
            }
        }
        let lap = u.laplacian_field().value(p).unwrap();
        assert!((lap - j.laplacian()).norm() < 1e-13);
    }

    #[test]
    fn restricted_fields_refuse_outside_points() {
        let region = Region::cube(-1.0, 1.0).unwrap().excluding_plane(0, 0.1);
        let u = ScalarField::x1().restrict(&region);
        assert!(u.eval([0.5, 0.0, 0.0]).is_ok());
        assert!(matches!(u.eval([0.05, 0.0, 0.0]), Err(FieldError::EvalOutsideRegion { .. })));
        assert!(matches!(u.eval([2.0, 0.0, 0.0]), Err(FieldError::EvalOutsideRegion { .. })));
        assert!(matches!(grad(&u, [2.0, 0.0, 0.0]), Err(FieldError::EvalOutsideRegion { .. })));
    }

    #[test]
    fn region_validation() {
        assert!(Region::new([0.0; 3], [1.0, 0.0, 1.0]).is_err());
        let shell = Region::cube(-2.0, 2.0).unwrap().shell(0.5, 2.0);
        assert!(shell.contains([1.0, 0.0, 0.0]));
        assert!(!shell.contains([0.1, 0.1, 0.1]));
        assert!(!shell.contains([1.9, 1.9, 0.0]));
    }
}
