//! Seeded inputs shared by the benches.

use gzz_forge::{BitMatrix, HollowSymmetric};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_real(n: usize, rng: &mut impl Rng) -> HollowSymmetric {
    HollowSymmetric::from_fn(n, |_, _| rng.gen_range(-1.0..1.0))
}

pub fn random_binary(n: usize, rng: &mut impl Rng) -> HollowSymmetric {
    HollowSymmetric::from_fn(n, |_, _| rng.gen_range(0..2) as f64)
}

pub fn random_lower(n: usize, rng: &mut impl Rng) -> BitMatrix {
    let mut b = BitMatrix::identity(n);
    for i in 0..n {
        for j in 0..i {
            b.set(i, j, rng.gen_bool(0.5));
        }
    }
    b
}

/// Phase table of `2ⁿ` uniform values in `[0, 1)`.
pub fn random_table(n: usize, rng: &mut impl Rng) -> Vec<f64> {
    (0..1 << n).map(|_| rng.gen_range(0.0..1.0)).collect()
}
