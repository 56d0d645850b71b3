//! Lesion detection from class activation maps.
//!
//! The pipeline turns classifier evidence into boxes:
//!
//! 1. [`cam`]: weighted channel sum of exported feature tensors (CAM or
//!    GradCAM weights), bilinear resampling to input resolution and min-max
//!    normalization.
//! 2. [`binarize`]: Otsu level combined with a fixed floor, then a
//!    morphological opening ([`morphology`]).
//! 3. [`regions`]: 8-connected components, enclosing rectangles, size
//!    filtering and scoring.
//! 4. [`eval`]: average precision at an IoU threshold and the coverage
//!    success rate.
//!
//! File formats live in [`io`].

pub mod binarize;
pub mod cam;
pub mod error;
pub mod eval;
pub mod io;
pub mod mask;
pub mod morphology;
pub mod pipeline;
pub mod regions;
pub mod synth;

pub use binarize::{otsu_threshold, ThresholdConfig};
pub use cam::{
    compute_cam, gradcam_weights, normalize, upsample_bilinear, ActivationMap, CamError,
    ClassWeights, FeatureTensor, GradientTensor,
};
pub use error::ConfigError;
pub use eval::{average_precision, evaluate, iou, success_rate, EvalConfig, EvalError, EvalReport};
pub use io::{BBox, BoxRecord};
pub use mask::BinaryMask;
pub use morphology::morph_open;
pub use pipeline::{detect, DetectConfig, MapSize};
pub use regions::{
    connected_components, filter_boxes, mask_to_gt_boxes, score_boxes, Region, SizeFilter,
};
