//! Binary erosion, dilation and opening with a solid square structuring
//! element. Pixels outside the raster count as background for both
//! operations.
//!
//! Each pass is separable: a horizontal window test followed by a vertical
//! one, using running counts so the cost does not depend on kernel size.

use crate::mask::BinaryMask;

#[derive(Clone, Copy)]
enum Op {
    Erode,
    Dilate,
}

/// One 1-D pass over `len` samples read through `get`, written through `put`.
fn window_pass(
    len: usize,
    radius: usize,
    op: Op,
    get: impl Fn(usize) -> bool,
    mut put: impl FnMut(usize, bool),
) {
    let k = 2 * radius + 1;
    // count of set samples in [i - radius, i + radius] clipped to the raster
    let mut count = (0..radius.min(len)).filter(|&j| get(j)).count();
    for i in 0..len {
        let incoming = i + radius;
        if incoming < len && get(incoming) {
            count += 1;
        }
        if i > radius && get(i - radius - 1) {
            count -= 1;
        }
        let value = match op {
            // a window that leaves the raster contains background
            Op::Erode => count == k,
            Op::Dilate => count > 0,
        };
        put(i, value);
    }
}

fn apply(mask: &BinaryMask, kernel: usize, op: Op) -> BinaryMask {
    let (w, h) = (mask.width(), mask.height());
    let radius = kernel / 2;
    let src = mask.bits();

    let mut horizontal = vec![false; w * h];
    for y in 0..h {
        let row = &src[y * w..(y + 1) * w];
        let out = &mut horizontal[y * w..(y + 1) * w];
        window_pass(w, radius, op, |x| row[x], |x, v| out[x] = v);
    }

    let mut bits = vec![false; w * h];
    for x in 0..w {
        window_pass(
            h,
            radius,
            op,
            |y| horizontal[y * w + x],
            |y, v| bits[y * w + x] = v,
        );
    }
    BinaryMask::from_bits(w, h, bits)
}

fn check_kernel(kernel: usize) {
    assert!(kernel % 2 == 1, "kernel size must be odd, got {kernel}");
}

/// A pixel survives iff its whole `kernel x kernel` neighborhood lies inside
/// the raster and is foreground.
///
/// # Panics
///
/// If `kernel` is even.
pub fn erode(mask: &BinaryMask, kernel: usize) -> BinaryMask {
    check_kernel(kernel);
    apply(mask, kernel, Op::Erode)
}

/// A pixel is set iff any pixel of its `kernel x kernel` neighborhood is.
///
/// # Panics
///
/// If `kernel` is even.
pub fn dilate(mask: &BinaryMask, kernel: usize) -> BinaryMask {
    check_kernel(kernel);
    apply(mask, kernel, Op::Dilate)
}

/// `iterations` erosions followed by `iterations` dilations.
///
/// # Panics
///
/// If `kernel` is even.
pub fn morph_open(mask: &BinaryMask, kernel: usize, iterations: usize) -> BinaryMask {
    check_kernel(kernel);
    let mut out = mask.clone();
    for _ in 0..iterations {
        out = apply(&out, kernel, Op::Erode);
    }
    for _ in 0..iterations {
        out = apply(&out, kernel, Op::Dilate);
    }
    out
}
