//! Shared fixtures for the criterion benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ringcode::{GRElement, GrsCode, TowerContext};

/// GR(4,3) over Z4 with the modulus whose class of x generates the
/// Teichmuller units; the configuration the repair path is tuned for.
pub fn worked_tower() -> TowerContext {
    TowerContext::with_modulus(2, 2, 1, 3, &[3, 1, 2, 1]).expect("tower builds")
}

pub fn worked_code(k: usize) -> GrsCode {
    GrsCode::full_length(worked_tower(), k).expect("code builds")
}

pub fn random_elements(code: &GrsCode, count: usize, seed: u64) -> Vec<GRElement> {
    let ring = code.ring();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| ring.element_from_index(rng.gen_range(0..ring.size())))
        .collect()
}

pub fn random_messages(code: &GrsCode, count: usize, seed: u64) -> Vec<Vec<GRElement>> {
    let k = code.pseudo_dimension();
    random_elements(code, count * k, seed)
        .chunks(k)
        .map(<[GRElement]>::to_vec)
        .collect()
}
