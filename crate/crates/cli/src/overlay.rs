//! Box outlines drawn over a grayscale base image.

use lesioncam::io::{BBox, GrayImage, RgbImage};

pub const GT_COLOR: [u8; 3] = [0, 255, 0];
pub const PRED_COLOR: [u8; 3] = [255, 0, 0];

/// One-pixel outline of the half-open box, clipped to the image.
pub fn draw_outline(image: &mut RgbImage, bbox: &BBox, color: [u8; 3]) {
    let (w, h) = (image.width() as u32, image.height() as u32);
    if bbox.x_min() >= w || bbox.y_min() >= h {
        return;
    }
    let (x0, y0) = (bbox.x_min(), bbox.y_min());
    let (x_last, y_last) = (bbox.x_max() - 1, bbox.y_max() - 1);
    for x in x0..=x_last.min(w - 1) {
        image.put(x as usize, y0 as usize, color);
        if y_last < h {
            image.put(x as usize, y_last as usize, color);
        }
    }
    for y in y0..=y_last.min(h - 1) {
        image.put(x0 as usize, y as usize, color);
        if x_last < w {
            image.put(x_last as usize, y as usize, color);
        }
    }
}

/// Ground truth first, predictions on top.
pub fn render(base: &GrayImage, gts: &[BBox], preds: &[BBox]) -> RgbImage {
    let mut out = RgbImage::from_gray(base);
    for b in gts {
        draw_outline(&mut out, b, GT_COLOR);
    }
    for b in preds {
        draw_outline(&mut out, b, PRED_COLOR);
    }
    out
}
