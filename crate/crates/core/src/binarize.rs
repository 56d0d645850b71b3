//! Activation map to lesion mask: Otsu level combined with a fixed floor.

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::cam::ActivationMap;
use crate::error::ConfigError;
use crate::mask::BinaryMask;
use crate::morphology::morph_open;

pub type Histogram = [u64; 256];

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdConfig {
    t_floor: f64,
    open_kernel: usize,
    open_iterations: usize,
}

impl Default for ThresholdConfig {
    fn default() -> Self {
        Self {
            t_floor: 0.2,
            open_kernel: 3,
            open_iterations: 3,
        }
    }
}

impl ThresholdConfig {
    pub fn new(
        t_floor: f64,
        open_kernel: usize,
        open_iterations: usize,
    ) -> Result<Self, ConfigError> {
        if !(0.0..=1.0).contains(&t_floor) {
            return Err(ConfigError::OutOfRange {
                field: "t_floor",
                value: t_floor,
                range: "[0, 1]",
            });
        }
        if open_kernel == 0 || open_kernel % 2 == 0 {
            return Err(ConfigError::EvenKernel(open_kernel));
        }
        Ok(Self {
            t_floor,
            open_kernel,
            open_iterations,
        })
    }

    pub fn t_floor(&self) -> f64 {
        self.t_floor
    }

    pub fn open_kernel(&self) -> usize {
        self.open_kernel
    }

    pub fn open_iterations(&self) -> usize {
        self.open_iterations
    }
}

/// 8-bit level of a normalized value: `round(v * 255)`.
pub fn quantize(v: f64) -> u8 {
    (v.clamp(0.0, 1.0) * 255.0).round() as u8
}

pub fn histogram(map: &ActivationMap) -> Histogram {
    let mut hist = [0u64; 256];
    for &v in map.values() {
        hist[quantize(v) as usize] += 1;
    }
    hist
}

/// Otsu level of a 256-bin histogram.
///
/// Classes are `{q <= T}` and `{q > T}`. Between-class variance is compared
/// exactly as the rational `(N*s0 - n0*S)^2 / (n0*n1)`, which is
/// proportional to `w0*w1*(mu0 - mu1)^2`, so ties resolve to the lowest `T`
/// without rounding noise. A histogram with one occupied bin returns that bin.
pub fn otsu_level(hist: &Histogram) -> u8 {
    let occupied: Vec<usize> = (0..256).filter(|&i| hist[i] > 0).collect();
    match occupied.as_slice() {
        [] => return 0,
        [only] => return *only as u8,
        _ => {}
    }

    let total: u64 = hist.iter().sum();
    let total_sum: u128 = hist
        .iter()
        .enumerate()
        .map(|(i, &h)| i as u128 * h as u128)
        .sum();

    let mut n0: u64 = 0;
    let mut s0: u128 = 0;
    let mut best: Option<(BigUint, BigUint)> = None;
    let mut best_level = 0u8;
    for (level, &count) in hist.iter().enumerate() {
        n0 += count;
        s0 += level as u128 * count as u128;
        let n1 = total - n0;
        if n0 == 0 {
            continue;
        }
        if n1 == 0 {
            break;
        }
        let diff = (total as i128 * s0 as i128 - n0 as i128 * total_sum as i128).unsigned_abs();
        let num = BigUint::from(diff).pow(2);
        let den = BigUint::from(n0 as u128 * n1 as u128);
        let better = match &best {
            None => true,
            Some((bn, bd)) => &num * bd > bn * &den,
        };
        if better {
            best = Some((num, den));
            best_level = level as u8;
        }
    }
    best_level
}

pub fn otsu_threshold(map: &ActivationMap) -> u8 {
    otsu_level(&histogram(map))
}

/// Foreground iff `quantize(v) > T_otsu` and `v >= t_floor`.
pub fn threshold(map: &ActivationMap, t_floor: f64) -> BinaryMask {
    let level = otsu_threshold(map);
    let bits = map
        .values()
        .iter()
        .map(|&v| quantize(v) > level && v >= t_floor)
        .collect();
    BinaryMask::from_bits(map.width(), map.height(), bits)
}

/// Thresholds a normalized map and cleans it with a morphological opening.
pub fn binarize(map: &ActivationMap, cfg: &ThresholdConfig) -> BinaryMask {
    let raw = threshold(map, cfg.t_floor);
    morph_open(&raw, cfg.open_kernel, cfg.open_iterations)
}
