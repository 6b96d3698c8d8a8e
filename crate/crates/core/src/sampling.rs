//! Seeded, order-independent sampling on spheres.
//!
//! Every sample index gets its own SplitMix64 stream derived from the run
//! seed and the index, so a sample set is identical no matter how many
//! worker threads produce it.

use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;
use rand_xoshiro::SplitMix64;

use crate::sphere_geom::SpherePoint;

/// Default seed used wherever the caller does not supply one.
pub const DEFAULT_SEED: u64 = 0x5EED_6A1B_2024_0001;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// Independent generator for sample `index` of the stream `seed`.
///
/// Both inputs go through a full 64-bit mixer; a linear combination of seed
/// and index would give streams that are shifted copies of each other,
/// since SplitMix64 itself steps its state by a constant.
pub fn stream(seed: u64, index: u64) -> SplitMix64 {
    SplitMix64::seed_from_u64(mix64(seed ^ mix64(index.wrapping_add(GOLDEN_GAMMA))))
}

fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a sub-seed, used to give separate phases of a computation
/// disjoint streams.
pub fn subseed(seed: u64, tag: u64) -> u64 {
    let mut rng = stream(seed.rotate_left(17), tag);
    rng.random()
}

/// Uniform point on `S^dim` (Gaussian vector, normalized).
pub fn uniform_sphere_point<R: Rng>(rng: &mut R, dim: usize) -> SpherePoint {
    loop {
        let v: Vec<f64> = (0..=dim).map(|_| rng.sample(StandardNormal)).collect();
        let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return SpherePoint::from_unit(v.into_iter().map(|c| c / norm).collect());
        }
    }
}

/// The `index`-th uniform sample of `S^dim` for the given seed.
pub fn sphere_sample(seed: u64, dim: usize, index: u64) -> SpherePoint {
    uniform_sphere_point(&mut stream(seed, index), dim)
}

/// `count` uniform samples of `S^dim`.
pub fn sphere_samples(seed: u64, dim: usize, count: usize) -> Vec<SpherePoint> {
    use rayon::prelude::*;
    (0..count as u64)
        .into_par_iter()
        .map(|i| sphere_sample(seed, dim, i))
        .collect()
}

/// Uniform sample of the closed upper hemisphere of `S^dim`, obtained by
/// reflecting the last coordinate of a uniform sphere sample.
pub fn hemisphere_sample(seed: u64, dim: usize, index: u64) -> SpherePoint {
    let p = sphere_sample(seed, dim, index);
    if p.coords()[dim] < 0.0 {
        let mut c = p.into_coords();
        c[dim] = -c[dim];
        SpherePoint::from_unit(c)
    } else {
        p
    }
}
