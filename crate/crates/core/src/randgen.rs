//! Seeded random inputs for property checks: complex quaternions,
//! composite scalar fields and polynomial quaternion fields.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cquat::{CQuat, CScalar};
use crate::fields::{QuatField, ScalarField};

pub struct RandomInputs {
    rng: ChaCha8Rng,
}

impl RandomInputs {
    pub fn new(seed: u64) -> Self {
        Self { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn uniform(&mut self, a: f64, b: f64) -> f64 {
        a + (b - a) * self.rng.random::<f64>()
    }

    pub fn scalar(&mut self) -> CScalar {
        CScalar::new(self.uniform(-1.0, 1.0), self.uniform(-1.0, 1.0))
    }

    /// Components with real and imaginary parts uniform in `[-1, 1]`.
    pub fn cquat(&mut self) -> CQuat {
        CQuat::new(self.scalar(), self.scalar(), self.scalar(), self.scalar())
    }

    pub fn vector(&mut self) -> CQuat {
        CQuat::vector([self.scalar(), self.scalar(), self.scalar()])
    }

    fn linear(&mut self) -> ScalarField {
        let mut u = ScalarField::real(self.uniform(-0.5, 0.5));
        for k in 0..3 {
            u = u + self.uniform(-1.0, 1.0) * ScalarField::coord(k);
        }
        u
    }

    /// A smooth composite of depth `depth` built from linear forms with
    /// `sin`, `cos`, `exp`, `tanh`, products and sums. Complex coefficients
    /// appear at the top level.
    pub fn composite(&mut self, depth: usize) -> ScalarField {
        let inner = if depth == 0 { self.linear() } else { self.composite(depth - 1) };
        let u = match self.rng.random_range(0..6) {
            0 => inner.sin(),
            1 => inner.cos(),
            2 => (0.5 * inner).exp(),
            3 => inner.tanh(),
            4 => inner * self.linear(),
            _ => inner + self.linear().sin(),
        };
        ScalarField::constant(self.scalar() + CScalar::new(1.0, 0.0)) * u
    }

    /// `exp` of a composite: never vanishes.
    pub fn nonvanishing(&mut self, depth: usize) -> ScalarField {
        (0.5 * self.composite(depth)).exp()
    }

    /// Cubic polynomial with complex coefficients in each of four
    /// components.
    pub fn cubic_quat(&mut self) -> QuatField {
        QuatField::new(std::array::from_fn(|_| self.cubic()))
    }

    pub fn cubic(&mut self) -> ScalarField {
        let x = [ScalarField::x1(), ScalarField::x2(), ScalarField::x3()];
        let mut u = ScalarField::constant(self.scalar());
        for a in 0..3 {
            u = u + ScalarField::constant(self.scalar()) * x[a].clone();
            for b in a..3 {
                let ab = x[a].clone() * x[b].clone();
                u = u + ScalarField::constant(self.scalar()) * ab.clone();
                for c in b..3 {
                    u = u + ScalarField::constant(self.scalar()) * (ab.clone() * x[c].clone());
                }
            }
        }
        u
    }

    pub fn point_in(&mut self, lo: f64, hi: f64) -> [f64; 3] {
        std::array::from_fn(|_| self.uniform(lo, hi))
    }
}
