//! Residual oracles.
//!
//! Every check evaluates the defining equation pointwise from jets and
//! reports sup and l2 norms of the defect. Nothing here reuses how a pair
//! was built: the only input is the pair's fields.

use serde::{Deserialize, Serialize};

use crate::constructors::RiccatiPair;
use crate::cquat::{dot3, CQuat, CScalar};
use crate::fields::{
    dirac_of_partials, jets_partial, jets_second, jets_value, FieldError, Point, QuatField, ScalarField, VectorField,
};
use crate::sampling::SampleSet;

/// Norms of a defect `r` over a sample set. The pointwise size of a
/// complex-quaternion defect is the Euclidean length of its 8 real
/// components; scalar and vector parts are reported separately.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub sup_norm: f64,
    pub l2_norm: f64,
    pub n_points: usize,
    pub scalar_part_sup: f64,
    pub vector_part_sup: f64,
    pub worst_point: Point,
    pub provenance: String,
    pub seed: Option<u64>,
}

impl ResidualReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.sup_norm <= tol
    }
}

fn finite_or_inf(x: f64) -> f64 {
    if x.is_nan() {
        f64::INFINITY
    } else {
        x
    }
}

/// Accumulates `(scalar defect, vector defect)` pairs in point order.
struct ReportBuilder {
    sup: f64,
    sum_sq: f64,
    scalar_sup: f64,
    vector_sup: f64,
    worst: Point,
    n: usize,
}

impl ReportBuilder {
    fn new() -> Self {
        Self { sup: 0.0, sum_sq: 0.0, scalar_sup: 0.0, vector_sup: 0.0, worst: [f64::NAN; 3], n: 0 }
    }

    fn push(&mut self, p: Point, scalar: f64, vector: f64) {
        let (s, v) = (finite_or_inf(scalar), finite_or_inf(vector));
        let total = (s * s + v * v).sqrt();
        if self.n == 0 || total > self.sup {
            self.sup = total;
            self.worst = p;
        }
        self.sum_sq += total * total;
        self.scalar_sup = self.scalar_sup.max(s);
        self.vector_sup = self.vector_sup.max(v);
        self.n += 1;
    }

    fn push_quat(&mut self, p: Point, r: &CQuat) {
        let vector = r.vec().magnitude();
        self.push(p, r.c[0].norm(), vector);
    }

    fn finish(self, provenance: &str, seed: Option<u64>) -> ResidualReport {
        ResidualReport {
            sup_norm: self.sup,
            l2_norm: self.sum_sq.sqrt(),
            n_points: self.n,
            scalar_part_sup: self.scalar_sup,
            vector_part_sup: self.vector_sup,
            worst_point: self.worst,
            provenance: provenance.to_string(),
            seed,
        }
    }
}

/// `Df + f^2 - v` at one point.
pub fn riccati_defect_at(f: &VectorField, v: &ScalarField, p: Point) -> Result<CQuat, FieldError> {
    let j = f.eval(p)?;
    let fv = jets_value(&j);
    let df = dirac_of_partials(|k| jets_partial(&j, k));
    Ok(df + fv * fv - CQuat::scalar(v.value(p)?))
}

/// Residual of `Df + f^2 = v` over `points`, which must lie in the pair's
/// valid region. Scalar part: `-div f + f^2 - v`; vector part: `rot f`.
pub fn riccati_residual(pair: &RiccatiPair, points: &SampleSet) -> Result<ResidualReport, FieldError> {
    let mut b = ReportBuilder::new();
    for &p in &points.points {
        pair.valid_region.check(p)?;
        b.push_quat(p, &riccati_defect_at(&pair.f, &pair.v, p)?);
    }
    Ok(b.finish(&pair.provenance, points.seed))
}

/// `|Δφ + <∇φ, ∇φ> + v|`: the Riccati equation for `f = grad φ` written as
/// one scalar elliptic equation.
pub fn scalar_form_residual(
    phi: &ScalarField,
    v: &ScalarField,
    points: &SampleSet,
) -> Result<ResidualReport, FieldError> {
    let mut b = ReportBuilder::new();
    for &p in &points.points {
        let j = phi.eval(p)?;
        let r = j.laplacian() + dot3(&j.grad, &j.grad) + v.value(p)?;
        b.push(p, r.norm(), 0.0);
    }
    Ok(b.finish("scalar_form", points.seed))
}

/// `|Δφ + vφ|`.
pub fn schrodinger_residual(
    phi: &ScalarField,
    v: &ScalarField,
    points: &SampleSet,
) -> Result<ResidualReport, FieldError> {
    let mut b = ReportBuilder::new();
    for &p in &points.points {
        let j = phi.eval(p)?;
        let r = j.laplacian() + v.value(p)? * j.val;
        b.push(p, r.norm(), 0.0);
    }
    Ok(b.finish("schrodinger", points.seed))
}

/// `|ΔΨ + 2<∇ξ, ∇Ψ>|`.
pub fn transport_residual(
    xi: &ScalarField,
    psi: &ScalarField,
    points: &SampleSet,
) -> Result<ResidualReport, FieldError> {
    let mut b = ReportBuilder::new();
    for &p in &points.points {
        let (jx, jp) = (xi.eval(p)?, psi.eval(p)?);
        let r = jp.laplacian() + 2.0 * dot3(&jx.grad, &jp.grad);
        b.push(p, r.norm(), 0.0);
    }
    Ok(b.finish("transport", points.seed))
}

/// Sup over `points` of `|(D + M^f)(D - M^f) g - (-Δg - v g)|` with
/// `M^f q = q f`.
///
/// With `q = Dg - g f` the left side is `Dq + q f`, and
/// `d_k q = sum_l i_l d_k d_l g - (d_k g) f - g (d_k f)`, so only the
/// Hessian of `g` and the gradient of `f` are needed.
///
/// The identity holds for scalar-valued `g` whenever `f` solves the
/// equation. For quaternion-valued `g` the difference of the two sides is
/// `sum_k (g i_k - i_k g) d_k f`, so it also needs `f` constant.
pub fn factorization_check(pair: &RiccatiPair, g: &QuatField, points: &SampleSet) -> Result<f64, FieldError> {
    let mut sup = 0f64;
    for &p in &points.points {
        pair.valid_region.check(p)?;
        sup = sup.max(finite_or_inf(factorization_defect_at(&pair.f, &pair.v, g, p)?.magnitude()));
    }
    Ok(sup)
}

pub fn factorization_defect_at(f: &VectorField, v: &ScalarField, g: &QuatField, p: Point) -> Result<CQuat, FieldError> {
    let jg = g.eval(p)?;
    let jf = f.eval(p)?;
    let (gv, fv) = (jets_value(&jg), jets_value(&jf));

    let dg = dirac_of_partials(|k| jets_partial(&jg, k));
    let q = dg - gv * fv;
    let dq_k = |k: usize| {
        let d_dg: CQuat = (0..3).map(|l| CQuat::basis(l + 1) * jets_second(&jg, k, l)).sum();
        d_dg - jets_partial(&jg, k) * fv - gv * jets_partial(&jf, k)
    };
    let lhs = dirac_of_partials(dq_k) + q * fv;

    let lap_g: CQuat = (0..3).map(|k| jets_second(&jg, k, k)).sum();
    let rhs = -lap_g - gv * v.value(p)?;
    Ok(lhs - rhs)
}

/// Sup of `|Δu|` over `points`.
pub fn harmonic_defect(u: &ScalarField, points: &SampleSet) -> Result<f64, FieldError> {
    let zero = ScalarField::constant(CScalar::new(0.0, 0.0));
    Ok(schrodinger_residual(u, &zero, points)?.sup_norm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::Region;

    fn x() -> [ScalarField; 3] {
        [ScalarField::x1(), ScalarField::x2(), ScalarField::x3()]
    }

    fn box_points(n: usize) -> SampleSet {
        let region = Region::cube(-1.0, 1.0).unwrap();
        SampleSet::quasi_random(&region, n, 11).unwrap()
    }

    fn pair(f: VectorField, v: f64) -> RiccatiPair {
        RiccatiPair::unchecked(f, ScalarField::real(v), Region::cube(-1.0, 1.0).unwrap(), "test")
    }

    #[test]
    fn constant_unit_solves_with_minus_one() {
        let rep = riccati_residual(&pair(VectorField::unit(0), -1.0), &box_points(20)).unwrap();
        assert_eq!(rep.sup_norm, 0.0);
        assert_eq!(rep.n_points, 20);
    }

    #[test]
    fn wrong_sign_potential_has_defect_two() {
        let rep = riccati_residual(&pair(VectorField::unit(0), 1.0), &box_points(20)).unwrap();
        assert_eq!(rep.sup_norm, 2.0);
        assert_eq!(rep.scalar_part_sup, 2.0);
        assert_eq!(rep.vector_part_sup, 0.0);
        assert!(rep.l2_norm <= rep.sup_norm * (rep.n_points as f64).sqrt() + 1e-12);
    }

    #[test]
    fn points_outside_valid_region_are_rejected() {
        let pts = SampleSet::from_points(vec![[3.0, 0.0, 0.0]]);
        let err = riccati_residual(&pair(VectorField::unit(0), -1.0), &pts).unwrap_err();
        assert!(matches!(err, FieldError::EvalOutsideRegion { .. }));
    }

    #[test]
    fn scalar_form_examples() {
        let [x1, _, _] = x();
        let pts = box_points(30);
        let r = scalar_form_residual(&x1, &ScalarField::real(-1.0), &pts).unwrap();
        assert_eq!(r.sup_norm, 0.0);

        // Euler-I potential: xi + log psi with xi = x1, psi = e^{-2 x1}
        let psi = (-2.0 * x1.clone()).exp();
        let r = scalar_form_residual(&(x1.clone() + psi.ln()), &ScalarField::real(-1.0), &pts).unwrap();
        assert!(r.sup_norm < 1e-14);

        // |2 + 4 x1^2| >= 2
        let r = scalar_form_residual(&(x1.clone() * x1), &ScalarField::zero(), &pts).unwrap();
        assert!(r.sup_norm >= 2.0);
        let worst = r.worst_point[0];
        assert!((r.sup_norm - (2.0 + 4.0 * worst * worst)).abs() < 1e-13);
    }

    #[test]
    fn schrodinger_examples() {
        let [x1, x2, _] = x();
        let pts = box_points(30);
        let r = schrodinger_residual(&x1.exp(), &ScalarField::real(-1.0), &pts).unwrap();
        assert!(r.sup_norm < 1e-15);
        let phi = x1.sin() * x2.sin();
        let r = schrodinger_residual(&phi, &ScalarField::real(2.0), &pts).unwrap();
        assert!(r.sup_norm <= 1e-12);
    }

    #[test]
    fn factorization_for_constant_unit() {
        let [_, x2, _] = x();
        let z = ScalarField::zero();
        let g = QuatField::new([z.clone(), z.clone(), z, x2]);
        let d = factorization_check(&pair(VectorField::unit(0), -1.0), &g, &box_points(30)).unwrap();
        assert!(d <= 1e-12);
    }

    #[test]
    fn factorization_negative_control() {
        let [x1, x2, x3] = x();
        let f = VectorField::new([x1.clone(), ScalarField::zero(), ScalarField::zero()]);
        let g = QuatField::new([x1 * x2.clone(), x2.clone(), x3 * x2, ScalarField::one()]);
        let d = factorization_check(&pair(f, -1.0), &g, &box_points(30)).unwrap();
        assert!(d >= 1e-2);
    }
}
