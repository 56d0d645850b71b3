//! End-to-end chains shared by the CLI, the benches and the tests.

use serde::{Deserialize, Serialize};

use crate::binarize::{binarize, ThresholdConfig};
use crate::cam::{
    compute_cam, finalize_map, gradcam_weights, ActivationMap, CamError, ClassWeights,
    FeatureTensor, GradientTensor,
};
use crate::error::ConfigError;
use crate::io::BoxRecord;
use crate::regions::{connected_components, filter_boxes, score_boxes, SizeFilter};

/// Classifier input resolution the maps are resampled to.
pub const DEFAULT_MAP_SIZE: usize = 224;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MapSize {
    pub height: usize,
    pub width: usize,
}

impl Default for MapSize {
    fn default() -> Self {
        Self {
            height: DEFAULT_MAP_SIZE,
            width: DEFAULT_MAP_SIZE,
        }
    }
}

impl MapSize {
    pub fn new(height: usize, width: usize) -> Result<Self, ConfigError> {
        if height == 0 || width == 0 {
            return Err(ConfigError::EmptyOutput { width, height });
        }
        Ok(Self { height, width })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DetectConfig {
    pub threshold: ThresholdConfig,
    pub size_filter: SizeFilter,
}

/// Weighted-sum CAM, resampled to `size` and min-max normalized.
pub fn cam_map(
    features: &FeatureTensor,
    weights: &ClassWeights,
    relu: bool,
    size: MapSize,
) -> Result<ActivationMap, CamError> {
    let cam = compute_cam(features, weights, relu)?;
    Ok(finalize_map(&cam, size.height, size.width))
}

/// GradCAM: channel weights from mean gradients, then as [`cam_map`].
pub fn gradcam_map(
    features: &FeatureTensor,
    grads: &GradientTensor,
    relu: bool,
    size: MapSize,
) -> Result<ActivationMap, CamError> {
    if (grads.channels(), grads.height(), grads.width())
        != (features.channels(), features.height(), features.width())
    {
        return Err(CamError::ShapeMismatch(format!(
            "gradients {}x{}x{} vs features {}x{}x{}",
            grads.channels(),
            grads.height(),
            grads.width(),
            features.channels(),
            features.height(),
            features.width()
        )));
    }
    cam_map(features, &gradcam_weights(grads), relu, size)
}

/// Threshold, open, label, size-filter and score one map.
///
/// The map is min-max normalized first; this is a no-op for maps that are
/// already normalized.
pub fn detect(map: &ActivationMap, image_id: &str, cfg: &DetectConfig) -> Vec<BoxRecord> {
    let map = crate::cam::normalize(map);
    let mask = binarize(&map, &cfg.threshold);
    let regions = connected_components(&mask);
    let image_area = (map.width() * map.height()) as u64;
    let kept = filter_boxes(&regions, &cfg.size_filter, image_area);
    score_boxes(&kept, &map, image_id).expect("regions come from a mask of the map's size")
}
