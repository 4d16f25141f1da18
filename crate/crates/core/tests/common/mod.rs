#![allow(dead_code)]

use pfaffamp_core::{PauliBasis, SiteAngles};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_angles(rng: &mut ChaCha8Rng) -> SiteAngles {
    SiteAngles::new(rng.random_range(0.0..TWO_PI), rng.random_range(0.0..TWO_PI), rng.random_range(0.0..TWO_PI))
}

pub fn random_basis(l: usize, rng: &mut ChaCha8Rng) -> PauliBasis {
    PauliBasis::per_site((0..l).map(|_| random_angles(rng)).collect())
}

/// Largest |a - b|.
pub fn max_diff(a: &[pfaffamp_core::Complex64], b: &[pfaffamp_core::Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}
