use proptest::prelude::*;
use qriccati::cquat::{dot3, CQuat, CScalar};
use qriccati::fields::{dirac, grad, log_deriv, rot};
use qriccati::{QuatField, ScalarField};

fn scalar() -> impl Strategy<Value = CScalar> {
    (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(re, im)| CScalar::new(re, im))
}

fn cquat() -> impl Strategy<Value = CQuat> {
    [scalar(), scalar(), scalar(), scalar()].prop_map(|[a, b, c, d]| CQuat::new(a, b, c, d))
}

fn point() -> impl Strategy<Value = [f64; 3]> {
    [-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64]
}

/// `c0 + c1 sin(a . x) + c2 exp(b . x)` with complex coefficients.
fn field() -> impl Strategy<Value = ScalarField> {
    (scalar(), scalar(), scalar(), point(), point()).prop_map(|(c0, c1, c2, a, b)| {
        let lin = |w: [f64; 3]| w[0] * ScalarField::x1() + w[1] * ScalarField::x2() + w[2] * ScalarField::x3();
        ScalarField::constant(c0)
            + ScalarField::constant(c1) * lin(a).sin()
            + ScalarField::constant(c2) * (0.5 * lin(b)).exp()
    })
}

fn close(a: CQuat, b: CQuat, scale: f64) -> bool {
    (a - b).magnitude() <= 1e-12 * scale.max(1.0)
}

proptest! {
    #[test]
    fn product_is_associative(a in cquat(), b in cquat(), c in cquat()) {
        prop_assert!(close((a * b) * c, a * (b * c), a.magnitude() * b.magnitude() * c.magnitude()));
    }

    #[test]
    fn conjugation_reverses_products(a in cquat(), b in cquat()) {
        prop_assert!(close((a * b).conj(), b.conj() * a.conj(), a.magnitude() * b.magnitude()));
    }

    #[test]
    fn norm_sq_is_multiplicative(a in cquat(), b in cquat()) {
        let lhs = (a * b).norm_sq();
        let rhs = a.norm_sq() * b.norm_sq();
        prop_assert!((lhs - rhs).norm() <= 1e-12 * (a.magnitude() * b.magnitude()).powi(2).max(1.0));
    }

    #[test]
    fn vectors_anticommute_to_minus_twice_dot(a in cquat(), b in cquat()) {
        let (a, b) = (a.vec(), b.vec());
        let anti = CQuat::scalar(-2.0 * dot3(&a.vector_part(), &b.vector_part()));
        prop_assert!(close(a * b + b * a, anti, a.magnitude() * b.magnitude()));
    }

    #[test]
    fn leibniz_rule(u in field(), g0 in field(), g1 in field(), g3 in field(), p in point()) {
        let g = QuatField::new([g0, g1, ScalarField::zero(), g3]);
        let lhs = dirac(&g.scale(&u), p).unwrap();
        let (gu, gv, dg, uv) = (grad(&u, p).unwrap(), g.value(p).unwrap(), dirac(&g, p).unwrap(), u.value(p).unwrap());
        prop_assert!(close(lhs, gu * gv + dg.scale(uv), gu.magnitude() * gv.magnitude() + uv.norm() * dg.magnitude()));
    }

    #[test]
    fn log_derivative_is_additive(u in field(), w in field(), p in point()) {
        let (u, w) = (u.exp(), w.exp());
        let lhs = log_deriv(&(u.clone() * w.clone())).value(p).unwrap();
        let (a, b) = (log_deriv(&u).value(p).unwrap(), log_deriv(&w).value(p).unwrap());
        prop_assert!(close(lhs, a + b, a.magnitude() + b.magnitude()));
    }

    #[test]
    fn gradients_are_irrotational_with_symmetric_hessians(u in field(), p in point()) {
        let j = u.sin().eval(p).unwrap();
        prop_assert!(j.hess_is_symmetric());
        prop_assert!(rot(&u.gradient(), p).unwrap().magnitude() <= 1e-11 * j.val.norm().max(1.0));
    }
}
