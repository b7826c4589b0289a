//! Seeded low-discrepancy point sets over a [`Region`].
//!
//! Points come from the 3-D Halton sequence (bases 2, 3, 5) with a
//! Cranley-Patterson rotation drawn from the seed, so different seeds give
//! different but equally uniform sets and a fixed seed is reproducible.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::fields::{Point, Region};

/// Default number of points per check.
pub const DEFAULT_SAMPLES: usize = 200;
pub const DEFAULT_SEED: u64 = 20_240_601;

const MAX_ATTEMPTS_PER_POINT: usize = 1000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SamplingError {
    #[error("only {found} of {wanted} points fell inside the region after {attempts} draws")]
    RegionTooSparse { wanted: usize, found: usize, attempts: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    pub points: Vec<Point>,
    /// `None` for hand-picked point lists.
    pub seed: Option<u64>,
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += f * (i % base) as f64;
        i /= base;
        f *= inv;
    }
    r
}

impl SampleSet {
    pub fn from_points(points: Vec<Point>) -> Self {
        Self { points, seed: None }
    }

    pub fn quasi_random(region: &Region, n: usize, seed: u64) -> Result<Self, SamplingError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let shift: [f64; 3] = std::array::from_fn(|_| rng.random::<f64>());
        let (lo, hi) = (region.lo(), region.hi());
        let mut points = Vec::with_capacity(n);
        let max_attempts = n.max(1) * MAX_ATTEMPTS_PER_POINT;
        let mut i = 0u64;
        while points.len() < n {
            if i as usize >= max_attempts {
                return Err(SamplingError::RegionTooSparse { wanted: n, found: points.len(), attempts: max_attempts });
            }
            i += 1;
            let u = [radical_inverse(i, 2), radical_inverse(i, 3), radical_inverse(i, 5)];
            let p: Point = std::array::from_fn(|k| {
                let t = (u[k] + shift[k]).fract();
                lo[k] + t * (hi[k] - lo[k])
            });
            if region.contains(p) {
                points.push(p);
            }
        }
        Ok(Self { points, seed: Some(seed) })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproducible_and_seed_dependent() {
        let region = Region::cube(-1.0, 1.0).unwrap().excluding_plane(0, 0.1);
        let a = SampleSet::quasi_random(&region, 50, 3).unwrap();
        let b = SampleSet::quasi_random(&region, 50, 3).unwrap();
        let c = SampleSet::quasi_random(&region, 50, 4).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.points, c.points);
        assert!(a.points.iter().all(|p| region.contains(*p)));
    }

    #[test]
    fn empty_region_is_reported() {
        let region = Region::cube(0.0, 1.0).unwrap().excluding_origin(5.0);
        assert!(matches!(
            SampleSet::quasi_random(&region, 10, 1),
            Err(SamplingError::RegionTooSparse { found: 0, .. })
        ));
    }

    #[test]
    fn radical_inverse_base_two() {
        assert_eq!(radical_inverse(1, 2), 0.5);
        assert_eq!(radical_inverse(2, 2), 0.25);
        assert_eq!(radical_inverse(3, 2), 0.75);
    }
}
