//! Solution recipes for `Df + f^2 = v`.
//!
//! Each constructor validates its preconditions on a quasi-random sample of
//! the region and returns a [`RiccatiPair`]. The pair is not verified here;
//! that is the job of [`crate::verify`].

use std::sync::Arc;

use thiserror::Error;

use crate::cquat::{CScalar, C_ONE};
use crate::fields::{log_deriv, Exclusion, FieldError, JetSource, Point, Region, ScalarField, VectorField};
use crate::jet::{Jet2, DIVISION_FLOOR};
use crate::ode::{solve_dense, DenseSolution, OdeError, OdeOptions};
use crate::quadrature::{integrate, DEFAULT_QUAD_TOL};
use crate::sampling::{SampleSet, SamplingError, DEFAULT_SAMPLES, DEFAULT_SEED};
use crate::verify;

/// Default tolerance for sampled precondition checks.
pub const DEFAULT_CHECK_TOL: f64 = 1e-8;
/// Default `|w - 1|` floor for the two-solution family.
pub const DEFAULT_POLE_MARGIN: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConstructError {
    #[error("Δφ + vφ = 0 fails: sup residual {residual:e} > {tol:e}")]
    NotASchrodingerSolution { residual: f64, tol: f64 },
    #[error("{which} is not harmonic: sup |Δ| = {residual:e} > {tol:e}")]
    NotHarmonic { which: &'static str, residual: f64, tol: f64 },
    #[error("seed {which} does not solve the equation: sup residual {residual:e} > {tol:e}")]
    SeedNotASolution { which: &'static str, residual: f64, tol: f64 },
    #[error("Ψ does not solve the transport equation: sup residual {residual:e} > {tol:e}")]
    NotATransportSolution { residual: f64, tol: f64 },
    #[error("{which} nearly vanishes at {point:?} (|value| = {magnitude:e})")]
    DivisionNearZero { which: &'static str, point: Point, magnitude: f64 },
    #[error("one-dimensional Riccati problem on axis {axis} blows up near x = {location}")]
    BlowUp { axis: usize, location: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Sampling(#[from] SamplingError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("axis {axis}: {source}")]
    Ode {
        axis: usize,
        #[source]
        source: OdeError,
    },
}

/// How preconditions are checked: `samples` quasi-random points drawn with
/// `seed`, each residual compared against `tol` in the sup norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckOptions {
    pub samples: usize,
    pub seed: u64,
    pub tol: f64,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self { samples: DEFAULT_SAMPLES, seed: DEFAULT_SEED, tol: DEFAULT_CHECK_TOL }
    }
}

impl CheckOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self { tol, ..Self::default() }
    }

    fn points(&self, region: &Region) -> Result<SampleSet, SamplingError> {
        SampleSet::quasi_random(region, self.samples, self.seed)
    }
}

/// A candidate solution `f` of `Df + f^2 = v` on `valid_region`.
#[derive(Clone, Debug)]
pub struct RiccatiPair {
    pub f: VectorField,
    pub v: ScalarField,
    pub valid_region: Region,
    /// Names the construction that produced the pair.
    pub provenance: String,
}

impl RiccatiPair {
    /// Wraps fields without any precondition check. The fields are
    /// restricted to `region`.
    pub fn unchecked(f: VectorField, v: ScalarField, region: Region, provenance: impl Into<String>) -> Self {
        Self { f: f.restrict(&region), v: v.restrict(&region), valid_region: region, provenance: provenance.into() }
    }
}

fn ensure_nonvanishing(which: &'static str, u: &ScalarField, pts: &SampleSet) -> Result<(), ConstructError> {
    for &p in &pts.points {
        let magnitude = u.value(p)?.norm();
        if magnitude < DIVISION_FLOOR {
            return Err(ConstructError::DivisionNearZero { which, point: p, magnitude });
        }
    }
    Ok(())
}

fn ensure_harmonic(which: &'static str, u: &ScalarField, pts: &SampleSet, tol: f64) -> Result<(), ConstructError> {
    let residual = verify::harmonic_defect(u, pts)?;
    if residual > tol {
        return Err(ConstructError::NotHarmonic { which, residual, tol });
    }
    Ok(())
}

fn ensure_seed(
    which: &'static str,
    xi: &ScalarField,
    v: &ScalarField,
    pts: &SampleSet,
    tol: f64,
) -> Result<(), ConstructError> {
    let residual = verify::scalar_form_residual(xi, v, pts)?.sup_norm;
    if residual > tol {
        return Err(ConstructError::SeedNotASolution { which, residual, tol });
    }
    Ok(())
}

/// `f = ∂̌φ` for a solution `φ` of `Δφ + vφ = 0`.
pub fn from_schrodinger(
    phi: &ScalarField,
    v: &ScalarField,
    region: &Region,
    checks: &CheckOptions,
) -> Result<RiccatiPair, ConstructError> {
    let pts = checks.points(region)?;
    let residual = verify::schrodinger_residual(phi, v, &pts)?.sup_norm;
    if residual > checks.tol {
        return Err(ConstructError::NotASchrodingerSolution { residual, tol: checks.tol });
    }
    ensure_nonvanishing("φ", phi, &pts)?;
    Ok(RiccatiPair::unchecked(log_deriv(phi), v.clone(), region.clone(), "from_schrodinger"))
}

/// `f = ∂̌φ`, `v = 0` for harmonic `φ`.
pub fn harmonic_to_homogeneous(
    phi: &ScalarField,
    region: &Region,
    checks: &CheckOptions,
) -> Result<RiccatiPair, ConstructError> {
    let pts = checks.points(region)?;
    ensure_harmonic("φ", phi, &pts, checks.tol)?;
    ensure_nonvanishing("φ", phi, &pts)?;
    Ok(RiccatiPair::unchecked(log_deriv(phi), ScalarField::zero(), region.clone(), "harmonic_to_homogeneous"))
}

/// One axis of a separable problem: `y' = -y^2 - v(x_axis)`, `y(x0) = y0`.
#[derive(Clone, Debug)]
pub struct AxisProblem {
    /// Must depend on its own coordinate only, and be real.
    pub potential: ScalarField,
    pub y0: f64,
    pub x0: f64,
}

impl AxisProblem {
    pub fn new(potential: ScalarField, y0: f64, x0: f64) -> Self {
        Self { potential, y0, x0 }
    }
}

/// The integrated solution `y_k(x_k)` of one axis, as a field.
#[derive(Clone)]
struct RiccatiAxis {
    axis: usize,
    solution: Arc<DenseSolution>,
    potential: ScalarField,
}

impl RiccatiAxis {
    fn field(&self) -> ScalarField {
        ScalarField::from_source(Arc::new(self.clone()))
    }
}

impl JetSource for RiccatiAxis {
    // y' and y'' follow from the ODE itself, so the jet is as exact as y.
    fn jet(&self, p: Point) -> Result<Jet2, FieldError> {
        let k = self.axis;
        let y = CScalar::new(self.solution.eval(p[k])?, 0.0);
        let v = self.potential.eval(p)?;
        let dy = -y * y - v.val;
        let mut jet = Jet2::constant(y);
        jet.grad[k] = dy;
        jet.hess[k][k] = -2.0 * y * dy - v.grad[k];
        Ok(jet)
    }

    fn partial(&self, axis: usize) -> ScalarField {
        if axis != self.axis {
            return ScalarField::zero();
        }
        let y = self.field();
        -(y.clone() * y) - self.potential.clone()
    }

    fn describe(&self) -> String {
        format!("y{}(x{})", self.axis + 1, self.axis + 1)
    }
}

/// `f = Σ y_k(x_k) i_k` with each `y_k` solving `y' + y^2 = -v_k`, for the
/// separable potential `v = v_1(x_1) + v_2(x_2) + v_3(x_3)`.
pub fn separable(
    axes: [AxisProblem; 3],
    region: &Region,
    ode: &OdeOptions,
    checks: &CheckOptions,
) -> Result<RiccatiPair, ConstructError> {
    let pts = checks.points(region)?;
    let (lo, hi) = (region.lo(), region.hi());
    let mut components = Vec::with_capacity(3);
    for (k, prob) in axes.iter().enumerate() {
        for &p in &pts.points {
            let j = prob.potential.eval(p)?;
            let cross = (0..3).filter(|&l| l != k).map(|l| j.grad[l].norm()).fold(0f64, f64::max);
            if cross > checks.tol || j.val.im.abs() > checks.tol {
                return Err(ConstructError::InvalidInput(format!(
                    "potential v{} must be real and depend on x{} only (at {p:?})",
                    k + 1,
                    k + 1
                )));
            }
        }
        let a = lo[k].min(prob.x0);
        let b = hi[k].max(prob.x0);
        let centre: Point = std::array::from_fn(|l| 0.5 * (lo[l] + hi[l]));
        let potential = prob.potential.clone();
        let rhs = |x: f64, y: f64| {
            let mut q = centre;
            q[k] = x;
            let v = potential.value(q).map_err(|e| e.to_string())?;
            Ok(-y * y - v.re)
        };
        let solution = solve_dense(rhs, prob.x0, prob.y0, a, b, ode).map_err(|source| match source {
            OdeError::BlowUp { location, .. } => ConstructError::BlowUp { axis: k + 1, location },
            source => ConstructError::Ode { axis: k + 1, source },
        })?;
        let axis = RiccatiAxis { axis: k, solution: Arc::new(solution), potential: prob.potential.clone() };
        components.push(axis.field());
    }
    let [y1, y2, y3]: [ScalarField; 3] = components.try_into().expect("three axes");
    let [v1, v2, v3] = axes.map(|a| a.potential);
    Ok(RiccatiPair::unchecked(VectorField::new([y1, y2, y3]), v1 + v2 + v3, region.clone(), "separable"))
}

/// `f = ∂̌φ1 + ∂̌φ2`, `v = -2<∂̌φ1, ∂̌φ2>` for harmonic `φ1, φ2`.
pub fn anticommutator_potential(
    phi1: &ScalarField,
    phi2: &ScalarField,
    region: &Region,
    checks: &CheckOptions,
) -> Result<RiccatiPair, ConstructError> {
    let pts = checks.points(region)?;
    ensure_harmonic("φ1", phi1, &pts, checks.tol)?;
    ensure_harmonic("φ2", phi2, &pts, checks.tol)?;
    ensure_nonvanishing("φ1", phi1, &pts)?;
    ensure_nonvanishing("φ2", phi2, &pts)?;
    let (f1, f2) = (log_deriv(phi1), log_deriv(phi2));
    let v = -2.0 * f1.dot(&f2);
    Ok(RiccatiPair::unchecked(f1 + f2, v, region.clone(), "anticommutator_potential"))
}

/// `I(x) = int_{anchor}^{x1} g(s, x2, x3) ds`, differentiated exactly in
/// `x1` and under the integral sign in `x2, x3`.
#[derive(Clone)]
struct AxisIntegral {
    integrand: ScalarField,
    anchor: f64,
    tol: f64,
}

impl JetSource for AxisIntegral {
    fn jet(&self, p: Point) -> Result<Jet2, FieldError> {
        let along = |s: f64| self.integrand.eval([s, p[1], p[2]]).map_err(|e| e.to_string());
        let int: Jet2 = integrate(along, self.anchor, p[0], self.tol)?;
        let g = self.integrand.eval(p)?;
        let mut jet = int;
        jet.grad[0] = g.val;
        jet.hess[0][0] = g.grad[0];
        for j in 1..3 {
            jet.hess[0][j] = g.grad[j];
            jet.hess[j][0] = g.grad[j];
        }
        Ok(jet)
    }

    fn partial(&self, axis: usize) -> ScalarField {
        if axis == 0 {
            self.integrand.clone()
        } else {
            ScalarField::from_source(Arc::new(AxisIntegral { integrand: self.integrand.partial(axis), ..self.clone() }))
        }
    }

    fn describe(&self) -> String {
        format!("int_{}^x1 ({}) ds", self.anchor, self.integrand)
    }
}

/// Outcome of the `φ1 = x1` recipe: the candidate `φ2`, how far it is from
/// harmonic, and the pair when it is harmonic within tolerance.
#[derive(Clone, Debug)]
pub struct AxisPairOutcome {
    pub phi2: ScalarField,
    pub harmonic_defect: f64,
    pub pair: Option<RiccatiPair>,
}

/// `φ2 = A(x2, x3) exp(-1/2 int v x1 dx1)`, the integral anchored at the
/// region's lower `x1` bound. When `φ2` is harmonic, `f = i1/x1 + ∂̌φ2`
/// solves the equation with potential `v`.
pub fn axis_pair(
    v: &ScalarField,
    a: &ScalarField,
    region: &Region,
    checks: &CheckOptions,
    quad_tol: f64,
) -> Result<AxisPairOutcome, ConstructError> {
    let pts = checks.points(region)?;
    for &p in &pts.points {
        if a.eval(p)?.grad[0].norm() > checks.tol {
            return Err(ConstructError::InvalidInput(format!("A must not depend on x1 (at {p:?})")));
        }
    }
    let integral = AxisIntegral { integrand: v.clone() * ScalarField::x1(), anchor: region.lo()[0], tol: quad_tol };
    let phi2 = a.clone() * (-0.5 * ScalarField::from_source(Arc::new(integral))).exp();
    let harmonic_defect = verify::harmonic_defect(&phi2, &pts)?;
    let pair = if harmonic_defect <= checks.tol {
        ensure_nonvanishing("φ2", &phi2, &pts)?;
        let f = log_deriv(&ScalarField::x1()) + log_deriv(&phi2);
        Some(RiccatiPair::unchecked(f, v.clone(), region.clone(), "axis_pair"))
    } else {
        None
    };
    Ok(AxisPairOutcome { phi2, harmonic_defect, pair })
}

/// Default quadrature tolerance for [`axis_pair`].
pub const AXIS_PAIR_QUAD_TOL: f64 = DEFAULT_QUAD_TOL;

/// `f = 2∂̌φ`, `v = 2(∂̌φ)^2 = -2<∂̌φ, ∂̌φ>` for harmonic `φ`.
pub fn eikonal_solution(
    phi: &ScalarField,
    region: &Region,
    checks: &CheckOptions,
) -> Result<RiccatiPair, ConstructError> {
    let pts = checks.points(region)?;
    ensure_harmonic("φ", phi, &pts, checks.tol)?;
    ensure_nonvanishing("φ", phi, &pts)?;
    let g = log_deriv(phi);
    let v = -2.0 * g.dot(&g);
    Ok(RiccatiPair::unchecked(g.scale(ScalarField::real(2.0)), v, region.clone(), "eikonal_solution"))
}

/// Linearisation around a known solution `grad ξ`: `f = ∂̌Ψ + grad ξ` for
/// `Ψ` solving `ΔΨ + 2<∇ξ, ∇Ψ> = 0`.
pub fn euler_one(
    xi: &ScalarField,
    v: &ScalarField,
    psi: &ScalarField,
    region: &Region,
    checks: &CheckOptions,
) -> Result<RiccatiPair, ConstructError> {
    let pts = checks.points(region)?;
    ensure_seed("grad ξ", xi, v, &pts, checks.tol)?;
    let residual = verify::transport_residual(xi, psi, &pts)?.sup_norm;
    if residual > checks.tol {
        return Err(ConstructError::NotATransportSolution { residual, tol: checks.tol });
    }
    ensure_nonvanishing("Ψ", psi, &pts)?;
    Ok(RiccatiPair::unchecked(log_deriv(psi) + xi.gradient(), v.clone(), region.clone(), "euler_one"))
}

/// Evaluates `w - 1`, refusing points where it is smaller than `floor`.
struct PoleGuard {
    inner: ScalarField,
    floor: f64,
}

impl JetSource for PoleGuard {
    fn jet(&self, p: Point) -> Result<Jet2, FieldError> {
        let j = self.inner.eval(p)?;
        let magnitude = j.val.norm();
        if magnitude < self.floor {
            return Err(FieldError::PoleOfFamily { point: p, magnitude });
        }
        Ok(j)
    }

    fn partial(&self, axis: usize) -> ScalarField {
        self.inner.partial(axis)
    }

    fn describe(&self) -> String {
        format!("{}", self.inner)
    }
}

/// The one-parameter family through two known solutions `grad ξ1`,
/// `grad ξ2`: `f = (w grad ξ1 - grad ξ2) / (w - 1)`, `w = A e^{ξ1 - ξ2}`.
/// The returned region excludes `|w - 1| < pole_margin`.
pub fn euler_two(
    xi1: &ScalarField,
    xi2: &ScalarField,
    v: &ScalarField,
    a: CScalar,
    region: &Region,
    checks: &CheckOptions,
    pole_margin: f64,
) -> Result<RiccatiPair, ConstructError> {
    let pts = checks.points(region)?;
    ensure_seed("grad ξ1", xi1, v, &pts, checks.tol)?;
    ensure_seed("grad ξ2", xi2, v, &pts, checks.tol)?;

    let w = ScalarField::constant(a) * (xi1.clone() - xi2.clone()).exp();
    let w_minus_one = w.clone() - ScalarField::constant(C_ONE);
    let guard = ScalarField::from_source(Arc::new(PoleGuard { inner: w_minus_one.clone(), floor: pole_margin }));
    let (h1, h2) = (xi1.gradient(), xi2.gradient());
    let f = VectorField::new(std::array::from_fn(|k| (w.clone() * h1.c[k].clone() - h2.c[k].clone()) / guard.clone()));

    let label = format!("|w - 1| < {pole_margin:e}");
    let valid = region.clone().with_exclusion(Exclusion::new(label, move |p| match w_minus_one.value(p) {
        Ok(d) => d.norm() < pole_margin,
        Err(_) => true,
    }));
    Ok(RiccatiPair::unchecked(f, v.clone(), valid, "euler_two"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cquat::CQuat;
    use crate::verify::riccati_residual;

    fn x() -> [ScalarField; 3] {
        [ScalarField::x1(), ScalarField::x2(), ScalarField::x3()]
    }

    fn re(x: f64) -> CScalar {
        CScalar::new(x, 0.0)
    }

    fn sup_residual(pair: &RiccatiPair, n: usize) -> f64 {
        let pts = SampleSet::quasi_random(&pair.valid_region, n, 5).unwrap();
        riccati_residual(pair, &pts).unwrap().sup_norm
    }

    fn positive_box() -> Region {
        Region::new([0.5, 0.5, 0.5], [2.0, 2.0, 2.0]).unwrap()
    }

    fn fundamental() -> ScalarField {
        (4.0 * std::f64::consts::PI * ScalarField::radius()).recip()
    }

    #[test]
    fn schrodinger_examples() {
        let [x1, _, _] = x();
        let region = Region::cube(-1.0, 1.0).unwrap();
        let pair = from_schrodinger(&x1.exp(), &ScalarField::real(-1.0), &region, &CheckOptions::default()).unwrap();
        assert!(pair.f.value([0.3, 0.2, 0.1]).unwrap().approx_eq(&CQuat::I1, 1e-15));
        assert!(sup_residual(&pair, 100) < 1e-14);

        let slab = Region::new([0.1, -1.0, -1.0], [std::f64::consts::PI - 0.1, 1.0, 1.0]).unwrap();
        let pair = from_schrodinger(&x1.sin(), &ScalarField::real(1.0), &slab, &CheckOptions::default()).unwrap();
        let p = [1.1, 0.0, 0.0];
        let cot = 1.1f64.cos() / 1.1f64.sin();
        assert!(pair.f.value(p).unwrap().approx_eq(&CQuat::real(0.0, cot, 0.0, 0.0), 1e-14));
        assert!(sup_residual(&pair, 100) < 1e-12);

        let shell = Region::cube(-2.0, 2.0).unwrap().shell(0.5, 2.0);
        let pair = from_schrodinger(&fundamental(), &ScalarField::zero(), &shell, &CheckOptions::default()).unwrap();
        assert!(sup_residual(&pair, 100) < 1e-12);
    }

    #[test]
    fn schrodinger_precondition() {
        let [x1, _, _] = x();
        let region = Region::cube(-1.0, 1.0).unwrap();
        let err = from_schrodinger(&x1.exp(), &ScalarField::real(1.0), &region, &CheckOptions::default()).unwrap_err();
        assert!(matches!(err, ConstructError::NotASchrodingerSolution { .. }));
    }

    #[test]
    fn homogeneous_examples() {
        let [x1, x2, _] = x();
        let region = positive_box();
        let pair = harmonic_to_homogeneous(&x1, &region, &CheckOptions::default()).unwrap();
        assert!(sup_residual(&pair, 100) < 1e-14);

        let pair = harmonic_to_homogeneous(&(x1.clone() * x2.clone()), &region, &CheckOptions::default()).unwrap();
        let p = [0.7, 1.3, 1.9];
        let expect = CQuat::real(0.0, 1.0 / 0.7, 1.0 / 1.3, 0.0);
        assert!(pair.f.value(p).unwrap().approx_eq(&expect, 1e-14));
        assert!(sup_residual(&pair, 100) < 1e-13);

        let phi = x1.clone() * x1.clone() - x2.clone() * x2.clone();
        let region = Region::new([1.5, -1.0, -1.0], [3.0, 1.0, 1.0]).unwrap();
        let pair = harmonic_to_homogeneous(&phi, &region, &CheckOptions::default()).unwrap();
        assert!(sup_residual(&pair, 200) < 1e-10);

        let err = harmonic_to_homogeneous(&(x1.clone() * x1), &region, &CheckOptions::default()).unwrap_err();
        assert!(matches!(err, ConstructError::NotHarmonic { .. }));
    }

    #[test]
    fn zero_in_region_is_a_division_error() {
        let region = Region::cube(-1.0, 1.0).unwrap();
        let pts = SampleSet::from_points(vec![[0.0, 0.3, 0.3]]);
        assert!(matches!(
            ensure_nonvanishing("φ", &ScalarField::x1(), &pts),
            Err(ConstructError::DivisionNearZero { .. })
        ));
        let pair = harmonic_to_homogeneous(&ScalarField::x1(), &region, &CheckOptions::default()).unwrap();
        assert!(pair.f.value([0.0, 0.3, 0.3]).is_err());
    }

    #[test]
    fn separable_tanh() {
        let region = Region::cube(-1.0, 1.0).unwrap();
        let axes = std::array::from_fn(|_| AxisProblem::new(ScalarField::real(-1.0), 0.0, 0.0));
        let pair = separable(axes, &region, &OdeOptions::default(), &CheckOptions::default()).unwrap();
        let pts = SampleSet::quasi_random(&region, 200, 9).unwrap();
        for &p in &pts.points {
            let f = pair.f.value(p).unwrap();
            let expect = CQuat::real(0.0, p[0].tanh(), p[1].tanh(), p[2].tanh());
            assert!(f.approx_eq(&expect, 1e-8));
            assert_eq!(pair.v.value(p).unwrap(), re(-3.0));
        }
        assert!(riccati_residual(&pair, &pts).unwrap().sup_norm <= 1e-8);
    }

    #[test]
    fn separable_homogeneous_and_embedded() {
        let region = Region::cube(-0.5, 1.0).unwrap();
        let axes = std::array::from_fn(|_| AxisProblem::new(ScalarField::zero(), 1.0, 0.0));
        let pair = separable(axes, &region, &OdeOptions::default(), &CheckOptions::default()).unwrap();
        let p = [0.25, -0.4, 0.9];
        let expect = CQuat::real(0.0, 1.0 / 1.25, 1.0 / 0.6, 1.0 / 1.9);
        assert!(pair.f.value(p).unwrap().approx_eq(&expect, 1e-9));

        let axes = [
            AxisProblem::new(ScalarField::real(-1.0), 0.0, 0.0),
            AxisProblem::new(ScalarField::zero(), 0.0, 0.0),
            AxisProblem::new(ScalarField::zero(), 0.0, 0.0),
        ];
        let pair = separable(axes, &region, &OdeOptions::default(), &CheckOptions::default()).unwrap();
        let f = pair.f.value(p).unwrap();
        assert_eq!(f.c[2], re(0.0));
        assert_eq!(f.c[3], re(0.0));
        assert!((f.c[1] - re(0.25f64.tanh())).norm() < 1e-9);
        assert_eq!(pair.v.value(p).unwrap(), re(-1.0));
    }

    #[test]
    fn separable_blow_up_and_bad_potential() {
        let region = Region::cube(-2.0, 1.0).unwrap();
        let axes = std::array::from_fn(|_| AxisProblem::new(ScalarField::zero(), 1.0, 0.0));
        let err = separable(axes, &region, &OdeOptions::default(), &CheckOptions::default()).unwrap_err();
        assert!(matches!(err, ConstructError::BlowUp { axis: 1, .. }), "{err:?}");

        let [x1, x2, _] = x();
        let axes = [
            AxisProblem::new(x1 * x2, 0.0, 0.0),
            AxisProblem::new(ScalarField::zero(), 0.0, 0.0),
            AxisProblem::new(ScalarField::zero(), 0.0, 0.0),
        ];
        let err = separable(axes, &region, &OdeOptions::default(), &CheckOptions::default()).unwrap_err();
        assert!(matches!(err, ConstructError::InvalidInput(_)));
    }

    #[test]
    fn anticommutator_examples() {
        let [x1, x2, _] = x();
        let region = positive_box();
        let chk = CheckOptions::default();
        let p = [0.8, 1.6, 1.2];

        let pair = anticommutator_potential(&x1, &x2, &region, &chk).unwrap();
        assert_eq!(pair.v.value(p).unwrap(), re(0.0));
        assert!(sup_residual(&pair, 100) < 1e-13);

        let pair = anticommutator_potential(&x1, &x1, &region, &chk).unwrap();
        assert!((pair.v.value(p).unwrap() - re(-2.0 / 0.64)).norm() < 1e-14);
        assert!(pair.f.value(p).unwrap().approx_eq(&CQuat::real(0.0, 2.0 / 0.8, 0.0, 0.0), 1e-15));
        assert!(sup_residual(&pair, 100) < 1e-13);

        let pair = anticommutator_potential(&x1, &(x1.clone() * x2), &region, &chk).unwrap();
        assert!((pair.v.value(p).unwrap() - re(-2.0 / 0.64)).norm() < 1e-14);
        let expect = CQuat::real(0.0, 2.0 / 0.8, 1.0 / 1.6, 0.0);
        assert!(pair.f.value(p).unwrap().approx_eq(&expect, 1e-15));
        assert!(sup_residual(&pair, 100) < 1e-13);
    }

    #[test]
    fn axis_pair_examples() {
        let [x1, x2, _] = x();
        let region = positive_box();
        let chk = CheckOptions::default();
        let v = -2.0 * (x1.clone() * x1.clone()).recip();
        let p = [1.3, 0.9, 1.7];

        let out = axis_pair(&v, &ScalarField::one(), &region, &chk, AXIS_PAIR_QUAD_TOL).unwrap();
        // anchored at x1 = 0.5: φ2 = x1 / 0.5
        assert!((out.phi2.value(p).unwrap() - re(1.3 / 0.5)).norm() < 1e-10);
        assert!(out.harmonic_defect < 1e-8);
        let pair = out.pair.expect("harmonic");
        assert!(pair.f.value(p).unwrap().approx_eq(&CQuat::real(0.0, 2.0 / 1.3, 0.0, 0.0), 1e-10));
        assert!(sup_residual(&pair, 100) < 1e-8);

        let out = axis_pair(&v, &x2, &region, &chk, AXIS_PAIR_QUAD_TOL).unwrap();
        let pair = out.pair.expect("harmonic");
        let expect = CQuat::real(0.0, 2.0 / 1.3, 1.0 / 0.9, 0.0);
        assert!(pair.f.value(p).unwrap().approx_eq(&expect, 1e-10));

        let out = axis_pair(&ScalarField::real(-2.0), &ScalarField::one(), &region, &chk, AXIS_PAIR_QUAD_TOL).unwrap();
        assert!(out.pair.is_none());
        // Δφ2 = (1 + x1^2) φ2 with φ2 = exp((x1^2 - 0.25) / 2)
        let j = out.phi2.eval(p).unwrap();
        let expect = (1.0 + 1.3 * 1.3) * ((1.3f64 * 1.3 - 0.25) / 2.0).exp();
        assert!((j.laplacian() - re(expect)).norm() < 1e-8 * expect);
        assert!(out.harmonic_defect > 1.0);
    }

    #[test]
    fn eikonal_examples() {
        let chk = CheckOptions::default();
        let shell = Region::cube(-2.0, 2.0).unwrap().shell(0.5, 2.0);
        let pair = eikonal_solution(&fundamental(), &shell, &chk).unwrap();
        let p = [0.6, -0.4, 0.9];
        let r2: f64 = p.iter().map(|c| c * c).sum();
        let expect = CQuat::real(0.0, -2.0 * p[0] / r2, -2.0 * p[1] / r2, -2.0 * p[2] / r2);
        assert!(pair.f.value(p).unwrap().approx_eq(&expect, 1e-14));
        assert!((pair.v.value(p).unwrap() - re(-2.0 / r2)).norm() < 1e-14);
        assert!(sup_residual(&pair, 200) < 1e-12);

        let region = positive_box();
        let a = eikonal_solution(&ScalarField::x1(), &region, &chk).unwrap();
        let b = anticommutator_potential(&ScalarField::x1(), &ScalarField::x1(), &region, &chk).unwrap();
        let pts = SampleSet::quasi_random(&region, 50, 2).unwrap();
        for &p in &pts.points {
            assert!(a.f.value(p).unwrap().approx_eq(&b.f.value(p).unwrap(), 1e-15));
            assert!((a.v.value(p).unwrap() - b.v.value(p).unwrap()).norm() < 1e-14);
        }

        let c = eikonal_solution(&ScalarField::one(), &region, &chk).unwrap();
        assert_eq!(c.f.value([1.0; 3]).unwrap(), CQuat::ZERO);
        assert_eq!(c.v.value([1.0; 3]).unwrap(), re(0.0));
    }

    #[test]
    fn euler_one_examples() {
        let [x1, x2, _] = x();
        let chk = CheckOptions::default();
        let minus_one = ScalarField::real(-1.0);
        let region = Region::cube(-1.0, 1.0).unwrap().excluding_plane(1, 0.1);
        let p = [0.3, 0.6, -0.2];

        let pair = euler_one(&x1, &minus_one, &(-2.0 * x1.clone()).exp(), &region, &chk).unwrap();
        assert!(pair.f.value(p).unwrap().approx_eq(&-CQuat::I1, 1e-15));
        assert!(sup_residual(&pair, 200) <= 1e-12);

        let pair = euler_one(&x1, &minus_one, &x2, &region, &chk).unwrap();
        assert!(pair.f.value(p).unwrap().approx_eq(&CQuat::real(0.0, 1.0, 1.0 / 0.6, 0.0), 1e-15));
        assert!(sup_residual(&pair, 200) <= 1e-12);

        let pair = euler_one(&x1, &minus_one, &ScalarField::one(), &region, &chk).unwrap();
        assert_eq!(pair.f.value(p).unwrap(), CQuat::I1);

        let err = euler_one(&x1, &ScalarField::real(1.0), &x2, &region, &chk).unwrap_err();
        assert!(matches!(err, ConstructError::SeedNotASolution { .. }));
        let err = euler_one(&x1, &minus_one, &(2.0 * x1.clone()).exp(), &region, &chk).unwrap_err();
        assert!(matches!(err, ConstructError::NotATransportSolution { .. }));
    }

    #[test]
    fn euler_two_family() {
        let [x1, x2, _] = x();
        let chk = CheckOptions::default();
        let minus_one = ScalarField::real(-1.0);
        let region = Region::cube(-1.0, 1.0).unwrap();
        let p = [0.4, -0.3, 0.8];

        let pair = euler_two(&x1, &x2, &minus_one, re(2.0), &region, &chk, 0.1).unwrap();
        let w = 2.0 * (0.4f64 + 0.3).exp();
        let expect = CQuat::real(0.0, w / (w - 1.0), -1.0 / (w - 1.0), 0.0);
        assert!(pair.f.value(p).unwrap().approx_eq(&expect, 1e-14));
        assert!(sup_residual(&pair, 200) <= 1e-10);

        let small = euler_two(&x1, &x2, &minus_one, re(1e-14), &region, &chk, 1e-6).unwrap();
        assert!(small.f.value(p).unwrap().approx_eq(&CQuat::I2, 1e-12));
        let large = euler_two(&x1, &x2, &minus_one, re(1e14), &region, &chk, 1e-6).unwrap();
        assert!(large.f.value(p).unwrap().approx_eq(&CQuat::I1, 1e-12));

        let collapsed = euler_two(&x1, &x1, &minus_one, re(2.0), &region, &chk, 1e-6).unwrap();
        assert!(collapsed.f.value(p).unwrap().approx_eq(&CQuat::I1, 1e-15));
    }

    #[test]
    fn euler_two_pole_and_bad_seed() {
        let [x1, x2, _] = x();
        let chk = CheckOptions::default();
        let minus_one = ScalarField::real(-1.0);
        let region = Region::cube(-1.0, 1.0).unwrap();
        // A = 1: pole on the plane x1 = x2
        let pair = euler_two(&x1, &x2, &minus_one, re(1.0), &region, &chk, 1e-6).unwrap();
        let on_pole = [0.2, 0.2, 0.0];
        assert!(!pair.valid_region.contains(on_pole));
        let err = pair.f.c[0].clone().eval(on_pole).unwrap_err();
        assert!(matches!(err, FieldError::EvalOutsideRegion { .. }));

        let err = euler_two(&x1, &(x1.clone() * x2), &minus_one, re(2.0), &region, &chk, 1e-6).unwrap_err();
        assert!(matches!(err, ConstructError::SeedNotASolution { which: "grad ξ2", .. }));
    }

    #[test]
    fn pole_guard_reports_pole_of_family() {
        let g = PoleGuard { inner: ScalarField::x1() - 1.0, floor: 1e-6 };
        assert!(matches!(g.jet([1.0, 0.0, 0.0]), Err(FieldError::PoleOfFamily { .. })));
        assert!(g.jet([1.5, 0.0, 0.0]).is_ok());
    }
}
