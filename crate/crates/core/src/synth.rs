//! Synthetic activation maps for tests, benches and demos.

use crate::cam::{normalize, ActivationMap};
use crate::mask::BinaryMask;

/// Isotropic Gaussian bump with unit peak.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Blob {
    pub cx: f64,
    pub cy: f64,
    pub sigma: f64,
}

impl Blob {
    pub fn value(&self, x: f64, y: f64) -> f64 {
        let d2 = (x - self.cx).powi(2) + (y - self.cy).powi(2);
        (-d2 / (2.0 * self.sigma * self.sigma)).exp()
    }
}

/// Pointwise maximum of the blobs, min-max normalized.
pub fn blob_map(height: usize, width: usize, blobs: &[Blob]) -> ActivationMap {
    let values = (0..height)
        .flat_map(|y| (0..width).map(move |x| (x as f64, y as f64)))
        .map(|(x, y)| blobs.iter().map(|b| b.value(x, y)).fold(0.0, f64::max))
        .collect();
    normalize(&ActivationMap::new(height, width, values).expect("non-empty map"))
}

/// Pixels where `blob` reaches at least `level` of its peak.
pub fn blob_support(height: usize, width: usize, blob: &Blob, level: f64) -> BinaryMask {
    BinaryMask::from_fn(width, height, |x, y| {
        blob.value(x as f64, y as f64) >= level
    })
}
