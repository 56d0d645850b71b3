//! Class activation maps from exported feature tensors.
//!
//! The map for class `c` is the weighted channel sum `L = sum_k w_k * A_k`.
//! For GradCAM the weights are the spatial means of the class-score
//! gradients with respect to each feature channel.

use thiserror::Error;

use crate::io::{CamtTensor, Dtype};

#[derive(Debug, Error, PartialEq)]
pub enum CamError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("non-finite value at flat index {index}")]
    NonFinite { index: usize },
    #[error("unexpected tensor layout: {0}")]
    Layout(String),
}

fn check_finite(values: &[f64]) -> Result<(), CamError> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(index) => Err(CamError::NonFinite { index }),
        None => Ok(()),
    }
}

fn f32_payload(t: &CamtTensor, what: &str) -> Result<Vec<f64>, CamError> {
    match t.dtype() {
        Dtype::F32 => Ok(t.as_f32().unwrap().iter().map(|&v| v as f64).collect()),
        Dtype::U8 => Err(CamError::Layout(format!("{what} must be f32, got u8"))),
    }
}

/// Drops leading unit axes until at most `rank` remain.
fn squeeze_leading(dims: &[usize], rank: usize) -> Option<&[usize]> {
    let mut d = dims;
    while d.len() > rank && d[0] == 1 {
        d = &d[1..];
    }
    (d.len() == rank).then_some(d)
}

/// `C x H x W` stack of real-valued planes.
#[derive(Clone, Debug, PartialEq)]
struct Planes {
    channels: usize,
    height: usize,
    width: usize,
    values: Vec<f64>,
}

impl Planes {
    fn new(
        channels: usize,
        height: usize,
        width: usize,
        values: Vec<f64>,
    ) -> Result<Self, CamError> {
        if channels == 0 || height == 0 || width == 0 {
            return Err(CamError::ShapeMismatch(format!(
                "empty tensor {channels}x{height}x{width}"
            )));
        }
        if values.len() != channels * height * width {
            return Err(CamError::ShapeMismatch(format!(
                "{} values for a {channels}x{height}x{width} tensor",
                values.len()
            )));
        }
        check_finite(&values)?;
        Ok(Self {
            channels,
            height,
            width,
            values,
        })
    }

    fn from_camt(t: &CamtTensor, what: &str) -> Result<Self, CamError> {
        let dims = squeeze_leading(t.dims(), 3).ok_or_else(|| {
            CamError::Layout(format!("{what} must be C x H x W, got dims {:?}", t.dims()))
        })?;
        Self::new(dims[0], dims[1], dims[2], f32_payload(t, what)?)
    }

    fn to_camt(&self) -> CamtTensor {
        CamtTensor::from_f32(
            vec![self.channels, self.height, self.width],
            self.values.iter().map(|&v| v as f32).collect(),
        )
        .expect("validated shape")
    }

    fn channel(&self, k: usize) -> &[f64] {
        let n = self.height * self.width;
        &self.values[k * n..(k + 1) * n]
    }
}

macro_rules! plane_accessors {
    ($ty:ident, $what:literal) => {
        impl $ty {
            pub fn new(
                channels: usize,
                height: usize,
                width: usize,
                values: Vec<f64>,
            ) -> Result<Self, CamError> {
                Planes::new(channels, height, width, values).map(Self)
            }

            /// Accepts `[C, H, W]` or `[1, C, H, W]` f32 tensors.
            pub fn from_camt(t: &CamtTensor) -> Result<Self, CamError> {
                Planes::from_camt(t, $what).map(Self)
            }

            pub fn to_camt(&self) -> CamtTensor {
                self.0.to_camt()
            }

            pub fn channels(&self) -> usize {
                self.0.channels
            }

            pub fn height(&self) -> usize {
                self.0.height
            }

            pub fn width(&self) -> usize {
                self.0.width
            }

            pub fn values(&self) -> &[f64] {
                &self.0.values
            }

            /// Row-major `H x W` plane of channel `k`.
            pub fn channel(&self, k: usize) -> &[f64] {
                self.0.channel(k)
            }
        }
    };
}

/// Convolutional activations `A`, one `H x W` plane per channel.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureTensor(Planes);

/// Gradients of the class score with respect to each feature activation.
#[derive(Clone, Debug, PartialEq)]
pub struct GradientTensor(Planes);

plane_accessors!(FeatureTensor, "features");
plane_accessors!(GradientTensor, "gradients");

/// Per-channel importance weights for one class.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassWeights(Vec<f64>);

impl ClassWeights {
    pub fn new(values: Vec<f64>) -> Result<Self, CamError> {
        if values.is_empty() {
            return Err(CamError::ShapeMismatch("empty weight vector".into()));
        }
        check_finite(&values)?;
        Ok(Self(values))
    }

    /// Accepts `[C]` or `[1, C]` f32 tensors.
    pub fn from_camt(t: &CamtTensor) -> Result<Self, CamError> {
        squeeze_leading(t.dims(), 1).ok_or_else(|| {
            CamError::Layout(format!("weights must be a vector, got dims {:?}", t.dims()))
        })?;
        Self::new(f32_payload(t, "weights")?)
    }

    pub fn to_camt(&self) -> CamtTensor {
        CamtTensor::from_f32(
            vec![self.0.len()],
            self.0.iter().map(|&v| v as f32).collect(),
        )
        .expect("validated shape")
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }
}

/// Row-major `H x W` class evidence map.
///
/// A map flagged `normalized` has every value in `[0, 1]` with maximum 1,
/// or is identically zero.
#[derive(Clone, Debug, PartialEq)]
pub struct ActivationMap {
    height: usize,
    width: usize,
    values: Vec<f64>,
    normalized: bool,
}

impl ActivationMap {
    /// Builds an unnormalized map.
    pub fn new(height: usize, width: usize, values: Vec<f64>) -> Result<Self, CamError> {
        if height == 0 || width == 0 {
            return Err(CamError::ShapeMismatch(format!(
                "empty map {height}x{width}"
            )));
        }
        if values.len() != height * width {
            return Err(CamError::ShapeMismatch(format!(
                "{} values for a {height}x{width} map",
                values.len()
            )));
        }
        check_finite(&values)?;
        Ok(Self {
            height,
            width,
            values,
            normalized: false,
        })
    }

    /// Accepts `[H, W]`, `[1, H, W]` or `[1, 1, H, W]` f32 tensors. The
    /// result is flagged unnormalized regardless of its value range.
    pub fn from_camt(t: &CamtTensor) -> Result<Self, CamError> {
        let dims = squeeze_leading(t.dims(), 2).ok_or_else(|| {
            CamError::Layout(format!("map must be H x W, got dims {:?}", t.dims()))
        })?;
        Self::new(dims[0], dims[1], f32_payload(t, "map")?)
    }

    pub fn to_camt(&self) -> CamtTensor {
        CamtTensor::from_f32(
            vec![self.height, self.width],
            self.values.iter().map(|&v| v as f32).collect(),
        )
        .expect("validated shape")
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.values[y * self.width + x]
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }
}

/// Weighted channel sum `L[y][x] = sum_k w_k * A[k][y][x]`, optionally
/// clamped at zero.
pub fn compute_cam(
    features: &FeatureTensor,
    weights: &ClassWeights,
    relu: bool,
) -> Result<ActivationMap, CamError> {
    if weights.len() != features.channels() {
        return Err(CamError::ShapeMismatch(format!(
            "{} weights for {} feature channels",
            weights.len(),
            features.channels()
        )));
    }
    let mut out = vec![0.0; features.height() * features.width()];
    for (k, &w) in weights.values().iter().enumerate() {
        for (acc, &a) in out.iter_mut().zip(features.channel(k)) {
            *acc += w * a;
        }
    }
    if relu {
        for v in &mut out {
            *v = v.max(0.0);
        }
    }
    ActivationMap::new(features.height(), features.width(), out)
}

/// GradCAM channel weights: the spatial mean of each gradient plane.
pub fn gradcam_weights(grads: &GradientTensor) -> ClassWeights {
    let n = (grads.height() * grads.width()) as f64;
    let weights = (0..grads.channels())
        .map(|k| grads.channel(k).iter().sum::<f64>() / n)
        .collect();
    ClassWeights(weights)
}

/// Min-max rescale to `[0, 1]`. A constant map becomes all zeros.
pub fn normalize(map: &ActivationMap) -> ActivationMap {
    let (min, max) = map
        .values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    let range = max - min;
    let values = if range > 0.0 {
        map.values.iter().map(|&v| (v - min) / range).collect()
    } else {
        vec![0.0; map.values.len()]
    };
    ActivationMap {
        height: map.height,
        width: map.width,
        values,
        normalized: true,
    }
}

/// Source coordinate and blend weight along one axis for output index `d`.
fn source_coord(d: usize, in_len: usize, out_len: usize) -> (usize, usize, f64) {
    let s = (d as f64 + 0.5) * (in_len as f64 / out_len as f64) - 0.5;
    let s = s.clamp(0.0, (in_len - 1) as f64);
    let i0 = s.floor() as usize;
    let i1 = (i0 + 1).min(in_len - 1);
    (i0, i1, s - i0 as f64)
}

/// Bilinear resampling with pixel-center alignment and edge clamping.
///
/// The result is flagged unnormalized: interior extrema of the source need
/// not land on an output sample.
///
/// # Panics
///
/// If `out_h` or `out_w` is zero.
pub fn upsample_bilinear(map: &ActivationMap, out_h: usize, out_w: usize) -> ActivationMap {
    assert!(out_h > 0 && out_w > 0, "output size must be non-zero");
    let cols: Vec<_> = (0..out_w)
        .map(|x| source_coord(x, map.width, out_w))
        .collect();
    let mut values = Vec::with_capacity(out_h * out_w);
    for y in 0..out_h {
        let (y0, y1, fy) = source_coord(y, map.height, out_h);
        let row0 = &map.values[y0 * map.width..(y0 + 1) * map.width];
        let row1 = &map.values[y1 * map.width..(y1 + 1) * map.width];
        for &(x0, x1, fx) in &cols {
            let top = row0[x0] + (row0[x1] - row0[x0]) * fx;
            let bottom = row1[x0] + (row1[x1] - row1[x0]) * fx;
            values.push(top + (bottom - top) * fy);
        }
    }
    ActivationMap {
        height: out_h,
        width: out_w,
        values,
        normalized: false,
    }
}

/// Upsample to the classifier input resolution, then min-max normalize.
pub fn finalize_map(map: &ActivationMap, out_h: usize, out_w: usize) -> ActivationMap {
    normalize(&upsample_bilinear(map, out_h, out_w))
}
