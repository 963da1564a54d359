//! Shared fixtures for the criterion benchmarks.

use branchhull::proj::HyperbolaBranch;
use branchhull::{make_instance, ProblemInstance};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

/// A batch of projection cases, roughly half infeasible.
pub fn projection_cases(count: usize, seed: u64) -> Vec<(HyperbolaBranch, (f64, f64, f64))> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let y: f64 = rng.random_range(-2.0..2.0);
            let y = if y.abs() < 0.05 { 0.5 } else { y };
            let t = if rng.random::<bool>() { 1.0 } else { -1.0 };
            let point = (
                rng.random_range(-3.0..3.0),
                rng.random_range(-3.0..3.0),
                rng.random_range(-3.0..3.0),
            );
            (HyperbolaBranch::new(y, t).unwrap(), point)
        })
        .collect()
}

/// A mid-sized noiseless instance (the phase-portrait regime).
pub fn phase_instance() -> ProblemInstance {
    make_instance(100, 100, 140, 5, 42).unwrap()
}
