//! Seeded point samplers used by the randomized audits.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::geometry::{dot, norm, Vec3};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform point in the open ball of the given radius (rejection from the cube).
pub fn in_ball<R: Rng>(rng: &mut R, radius: f64) -> Vec3 {
    loop {
        let v = [
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        ];
        if dot(&v, &v) < 1.0 {
            return [radius * v[0], radius * v[1], radius * v[2]];
        }
    }
}

/// Uniform direction on the unit sphere.
pub fn on_sphere<R: Rng>(rng: &mut R) -> Vec3 {
    loop {
        let v = in_ball(rng, 1.0);
        let n = norm(&v);
        if n > 1e-3 {
            return [v[0] / n, v[1] / n, v[2] / n];
        }
    }
}
