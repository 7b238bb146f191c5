//! The single seeded generator every randomized routine draws from.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::group::{normalize_set, GroupSpec};

pub type ApcRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> ApcRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Each element kept independently with probability `density`; never empty.
pub fn random_subset(rng: &mut ApcRng, g: &GroupSpec, density: f64) -> Vec<usize> {
    let mut a: Vec<usize> = g.elements().filter(|_| rng.gen::<f64>() < density).collect();
    if a.is_empty() {
        a.push(rng.gen_range(0..g.size()));
    }
    a
}

/// Uniform subset of `from` with exactly min(k, |from|) elements.
pub fn sample_subset(rng: &mut ApcRng, from: &[usize], k: usize) -> Vec<usize> {
    let picked = rand::seq::index::sample(rng, from.len(), k.min(from.len()));
    normalize_set(picked.into_iter().map(|i| from[i]).collect())
}
