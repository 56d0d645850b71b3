//! Seeded inputs shared by the kernel benchmarks.

use lesioncam::cam::{ClassWeights, FeatureTensor};
use lesioncam::synth::{blob_map, Blob};
use lesioncam::{ActivationMap, BinaryMask};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub const SEED: u64 = 0x1e51;

pub fn rng() -> StdRng {
    StdRng::seed_from_u64(SEED)
}

/// A square map of `n` random blobs, normalized.
pub fn blobs(side: usize, n: usize) -> ActivationMap {
    let mut rng = rng();
    let s = side as f64;
    let list: Vec<Blob> = (0..n)
        .map(|_| Blob {
            cx: rng.random_range(0.0..s),
            cy: rng.random_range(0.0..s),
            sigma: rng.random_range(s / 40.0..s / 12.0),
        })
        .collect();
    blob_map(side, side, &list)
}

/// Foreground of a blob map at `level`, a realistic mask for morphology and labeling.
pub fn blob_mask(side: usize, n: usize, level: f64) -> BinaryMask {
    let map = blobs(side, n);
    BinaryMask::from_fn(side, side, |x, y| map.get(x, y) >= level)
}

/// Salt noise at the given foreground density; worst case for labeling.
pub fn noise_mask(side: usize, density: f64) -> BinaryMask {
    let mut rng = rng();
    let bits = (0..side * side).map(|_| rng.random_bool(density)).collect();
    BinaryMask::from_bits(side, side, bits)
}

/// Backbone-sized activations: `c` channels over an `hw` x `hw` grid.
pub fn features(c: usize, hw: usize) -> (FeatureTensor, ClassWeights) {
    let mut rng = rng();
    let values = (0..c * hw * hw)
        .map(|_| rng.random_range(0.0..4.0))
        .collect();
    let weights = (0..c).map(|_| rng.random_range(-0.1..0.1)).collect();
    (
        FeatureTensor::new(c, hw, hw, values).expect("valid shape"),
        ClassWeights::new(weights).expect("non-empty"),
    )
}
