#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use symdyn::{Potential, ShiftSpace};

/// Seeded primitive SFT on `k` symbols that is not a full shift.
pub fn random_primitive(k: usize, seed: u64) -> ShiftSpace {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let m: Vec<Vec<u8>> = (0..k).map(|_| (0..k).map(|_| rng.gen_bool(0.6) as u8).collect()).collect();
        if let Ok(s) = ShiftSpace::from_matrix(k, m) {
            if s.k() == k && s.is_primitive() && !s.is_full_shift() {
                return s;
            }
        }
    }
}

pub fn test_shifts() -> Vec<(&'static str, ShiftSpace)> {
    vec![
        ("golden-mean", ShiftSpace::golden_mean()),
        ("full-2", ShiftSpace::full(2)),
        ("full-3", ShiftSpace::full(3)),
        ("random-4", random_primitive(4, 2024)),
    ]
}

pub fn indicator_one(s: &ShiftSpace) -> Potential {
    Potential::indicator(s, 1)
}
