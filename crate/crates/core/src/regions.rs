//! Lesion regions: 8-connected components of a mask and their enclosing
//! rectangles.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cam::ActivationMap;
use crate::error::ConfigError;
use crate::io::{BBox, BoxRecord};
use crate::mask::BinaryMask;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Region {
    /// Dense component id starting at 1.
    pub label: u32,
    pub pixel_count: usize,
    pub bbox: BBox,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SizeFilter {
    min_area_px: u64,
    max_area_frac: f64,
}

impl Default for SizeFilter {
    fn default() -> Self {
        Self {
            min_area_px: 25,
            max_area_frac: 1.0,
        }
    }
}

impl SizeFilter {
    pub fn new(min_area_px: u64, max_area_frac: f64) -> Result<Self, ConfigError> {
        if !(max_area_frac > 0.0 && max_area_frac <= 1.0) {
            return Err(ConfigError::OutOfRange {
                field: "max_area_frac",
                value: max_area_frac,
                range: "(0, 1]",
            });
        }
        Ok(Self {
            min_area_px,
            max_area_frac,
        })
    }

    pub fn min_area_px(&self) -> u64 {
        self.min_area_px
    }

    pub fn max_area_frac(&self) -> f64 {
        self.max_area_frac
    }

    pub fn keeps(&self, bbox: &BBox, image_area: u64) -> bool {
        let area = bbox.area();
        area >= self.min_area_px && area as f64 <= self.max_area_frac * image_area as f64
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum RegionError {
    #[error("box {bbox:?} exceeds the {width}x{height} map")]
    OutOfBounds {
        bbox: BBox,
        width: usize,
        height: usize,
    },
    #[error("scoring requires a normalized activation map")]
    NotNormalized,
}

/// Per-pixel component labels (0 = background) plus region summaries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Labeling {
    pub width: usize,
    pub height: usize,
    pub labels: Vec<u32>,
    pub regions: Vec<Region>,
}

fn find(parent: &mut [u32], mut x: u32) -> u32 {
    while parent[x as usize] != x {
        let grand = parent[parent[x as usize] as usize];
        parent[x as usize] = grand;
        x = grand;
    }
    x
}

fn union(parent: &mut [u32], a: u32, b: u32) {
    let (ra, rb) = (find(parent, a), find(parent, b));
    if ra != rb {
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        parent[hi as usize] = lo;
    }
}

/// Two-pass 8-connected labeling with union-find.
///
/// Final labels are assigned in raster order of each component's first
/// pixel, so regions come out sorted by `(min_row, min_col)` of that pixel.
pub fn label_components(mask: &BinaryMask) -> Labeling {
    let (w, h) = (mask.width(), mask.height());
    let mut labels = vec![0u32; w * h];
    // provisional label 0 is reserved for background
    let mut parent: Vec<u32> = vec![0];

    for y in 0..h {
        for x in 0..w {
            if !mask.get(x, y) {
                continue;
            }
            let mut neighbors = [0u32; 4];
            if x > 0 {
                neighbors[0] = labels[y * w + x - 1];
            }
            if y > 0 {
                let up = (y - 1) * w;
                if x > 0 {
                    neighbors[1] = labels[up + x - 1];
                }
                neighbors[2] = labels[up + x];
                if x + 1 < w {
                    neighbors[3] = labels[up + x + 1];
                }
            }
            let first = neighbors.iter().copied().find(|&l| l != 0);
            let label = match first {
                Some(l) => {
                    for &n in &neighbors {
                        if n != 0 && n != l {
                            union(&mut parent, l, n);
                        }
                    }
                    l
                }
                None => {
                    let l = parent.len() as u32;
                    parent.push(l);
                    l
                }
            };
            labels[y * w + x] = label;
        }
    }

    let mut dense = vec![0u32; parent.len()];
    let mut regions: Vec<Region> = Vec::new();
    for y in 0..h {
        for x in 0..w {
            let idx = y * w + x;
            if labels[idx] == 0 {
                continue;
            }
            let root = find(&mut parent, labels[idx]) as usize;
            if dense[root] == 0 {
                regions.push(Region {
                    label: regions.len() as u32 + 1,
                    pixel_count: 0,
                    bbox: BBox::new(x as u32, y as u32, x as u32 + 1, y as u32 + 1).unwrap(),
                });
                dense[root] = regions.len() as u32;
            }
            let label = dense[root];
            labels[idx] = label;
            let r = &mut regions[label as usize - 1];
            r.pixel_count += 1;
            let b = r.bbox;
            r.bbox = BBox::new(
                b.x_min().min(x as u32),
                b.y_min(),
                b.x_max().max(x as u32 + 1),
                y as u32 + 1,
            )
            .unwrap();
        }
    }

    Labeling {
        width: w,
        height: h,
        labels,
        regions,
    }
}

pub fn connected_components(mask: &BinaryMask) -> Vec<Region> {
    label_components(mask).regions
}

/// Keeps regions whose bbox area lies in `[min_area_px, max_area_frac * image_area]`.
pub fn filter_boxes(regions: &[Region], filter: &SizeFilter, image_area: u64) -> Vec<Region> {
    regions
        .iter()
        .filter(|r| filter.keeps(&r.bbox, image_area))
        .cloned()
        .collect()
}

/// One unscored box per 8-connected lesion component, in scan order.
pub fn mask_to_gt_boxes(mask: &BinaryMask, image_id: &str) -> Vec<BoxRecord> {
    connected_components(mask)
        .into_iter()
        .map(|r| BoxRecord::ground_truth(image_id, r.bbox))
        .collect()
}

/// Scores each region with the maximum map value inside its box.
pub fn score_boxes(
    regions: &[Region],
    map: &ActivationMap,
    image_id: &str,
) -> Result<Vec<BoxRecord>, RegionError> {
    if !map.is_normalized() {
        return Err(RegionError::NotNormalized);
    }
    regions
        .iter()
        .map(|r| {
            let b = r.bbox;
            if b.x_max() as usize > map.width() || b.y_max() as usize > map.height() {
                return Err(RegionError::OutOfBounds {
                    bbox: b,
                    width: map.width(),
                    height: map.height(),
                });
            }
            let mut score = f64::NEG_INFINITY;
            for y in b.y_min() as usize..b.y_max() as usize {
                let row = &map.values()[y * map.width()..(y + 1) * map.width()];
                for &v in &row[b.x_min() as usize..b.x_max() as usize] {
                    score = score.max(v);
                }
            }
            Ok(BoxRecord::detection(image_id, b, score))
        })
        .collect()
}
