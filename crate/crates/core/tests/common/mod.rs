//! Reference implementations used as oracles. Each one recomputes its
//! answer from first principles and shares no code path with the library
//! beyond the public data types.

#![allow(dead_code)]

use std::collections::HashMap;

use lesioncam::io::{BBox, BoxRecord};
use lesioncam::{ActivationMap, BinaryMask};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

// ---------------------------------------------------------------- generators

/// Random map with values in [0, 1]; `levels` > 0 restricts it to that many
/// distinct values so histograms have gaps and exact ties.
pub fn random_map(rng: &mut StdRng, h: usize, w: usize) -> ActivationMap {
    let levels: usize = rng.random_range(0..6);
    let values = (0..h * w)
        .map(|_| {
            if levels == 0 {
                rng.random::<f64>()
            } else {
                rng.random_range(0..=levels) as f64 / levels as f64
            }
        })
        .collect();
    ActivationMap::new(h, w, values).unwrap()
}

pub fn random_mask(rng: &mut StdRng, w: usize, h: usize) -> BinaryMask {
    let density: f64 = rng.random_range(0.1..0.9);
    let bits = (0..w * h).map(|_| rng.random::<f64>() < density).collect();
    BinaryMask::from_bits(w, h, bits)
}

// ---------------------------------------------------------------- cam

/// Direct per-pixel dot product over channels.
pub fn cam_oracle(c: usize, h: usize, w: usize, a: &[f64], weights: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(h * w);
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for k in 0..c {
                acc += weights[k] * a[(k * h + y) * w + x];
            }
            out.push(acc);
        }
    }
    out
}

/// Arithmetic mean of each channel, summed by explicit (y, x) loops.
pub fn mean_gradient_oracle(c: usize, h: usize, w: usize, g: &[f64]) -> Vec<f64> {
    (0..c)
        .map(|k| {
            let mut s = 0.0;
            for y in 0..h {
                for x in 0..w {
                    s += g[(k * h + y) * w + x];
                }
            }
            s / (h * w) as f64
        })
        .collect()
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

// ---------------------------------------------------------------- otsu

fn quantize_oracle(v: f64) -> i64 {
    (v * 255.0).round() as i64
}

/// Exhaustive Otsu: for each T in 0..=255, rebuild both classes from the
/// raw pixels and evaluate w0*w1*(mu0-mu1)^2 in exact rational arithmetic.
/// First (lowest) maximum wins; a single occupied level returns itself.
pub fn otsu_oracle(map: &ActivationMap) -> u8 {
    let q: Vec<i64> = map.values().iter().map(|&v| quantize_oracle(v)).collect();
    let first = q[0];
    if q.iter().all(|&v| v == first) {
        return first as u8;
    }
    let n = BigInt::from(q.len());
    let mut best: Option<BigRational> = None;
    let mut best_t = 0u8;
    for t in 0..=255i64 {
        let (mut n0, mut s0, mut n1, mut s1) = (0i64, 0i64, 0i64, 0i64);
        for &v in &q {
            if v <= t {
                n0 += 1;
                s0 += v;
            } else {
                n1 += 1;
                s1 += v;
            }
        }
        let sigma = if n0 == 0 || n1 == 0 {
            BigRational::from_integer(0.into())
        } else {
            let w0 = BigRational::new(BigInt::from(n0), n.clone());
            let w1 = BigRational::new(BigInt::from(n1), n.clone());
            let mu0 = BigRational::new(BigInt::from(s0), BigInt::from(n0));
            let mu1 = BigRational::new(BigInt::from(s1), BigInt::from(n1));
            let d = mu0 - mu1;
            w0 * w1 * d.clone() * d
        };
        if best.as_ref().is_none_or(|b| sigma > *b) {
            best = Some(sigma);
            best_t = t as u8;
        }
    }
    best_t
}

// ---------------------------------------------------------------- morphology

fn window_all(m: &BinaryMask, x: usize, y: usize, r: usize) -> bool {
    let (w, h) = (m.width() as isize, m.height() as isize);
    let r = r as isize;
    for dy in -r..=r {
        for dx in -r..=r {
            let (xx, yy) = (x as isize + dx, y as isize + dy);
            if xx < 0 || yy < 0 || xx >= w || yy >= h || !m.get(xx as usize, yy as usize) {
                return false;
            }
        }
    }
    true
}

fn window_any(m: &BinaryMask, x: usize, y: usize, r: usize) -> bool {
    let (w, h) = (m.width() as isize, m.height() as isize);
    let r = r as isize;
    for dy in -r..=r {
        for dx in -r..=r {
            let (xx, yy) = (x as isize + dx, y as isize + dy);
            if xx >= 0 && yy >= 0 && xx < w && yy < h && m.get(xx as usize, yy as usize) {
                return true;
            }
        }
    }
    false
}

pub fn erode_oracle(m: &BinaryMask, k: usize) -> BinaryMask {
    BinaryMask::from_fn(m.width(), m.height(), |x, y| window_all(m, x, y, k / 2))
}

pub fn dilate_oracle(m: &BinaryMask, k: usize) -> BinaryMask {
    BinaryMask::from_fn(m.width(), m.height(), |x, y| window_any(m, x, y, k / 2))
}

pub fn open_oracle(m: &BinaryMask, k: usize, iters: usize) -> BinaryMask {
    let mut out = m.clone();
    for _ in 0..iters {
        out = erode_oracle(&out, k);
    }
    for _ in 0..iters {
        out = dilate_oracle(&out, k);
    }
    out
}

// ---------------------------------------------------------------- components

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct OracleComponent {
    pub first_pixel: (usize, usize), // (row, col)
    pub pixel_count: usize,
    pub bbox: (u32, u32, u32, u32),
    pub pixels: Vec<(usize, usize)>,
}

/// Explicit-stack 8-connected flood fill seeded in raster order.
pub fn flood_fill_oracle(m: &BinaryMask) -> Vec<OracleComponent> {
    let (w, h) = (m.width(), m.height());
    let mut seen = vec![false; w * h];
    let mut out = Vec::new();
    for y in 0..h {
        for x in 0..w {
            if !m.get(x, y) || seen[y * w + x] {
                continue;
            }
            let mut stack = vec![(x, y)];
            seen[y * w + x] = true;
            let mut pixels = Vec::new();
            while let Some((px, py)) = stack.pop() {
                pixels.push((px, py));
                for dy in -1isize..=1 {
                    for dx in -1isize..=1 {
                        let (nx, ny) = (px as isize + dx, py as isize + dy);
                        if nx < 0 || ny < 0 || nx >= w as isize || ny >= h as isize {
                            continue;
                        }
                        let (nx, ny) = (nx as usize, ny as usize);
                        if m.get(nx, ny) && !seen[ny * w + nx] {
                            seen[ny * w + nx] = true;
                            stack.push((nx, ny));
                        }
                    }
                }
            }
            let x0 = pixels.iter().map(|p| p.0).min().unwrap() as u32;
            let x1 = pixels.iter().map(|p| p.0).max().unwrap() as u32 + 1;
            let y0 = pixels.iter().map(|p| p.1).min().unwrap() as u32;
            let y1 = pixels.iter().map(|p| p.1).max().unwrap() as u32 + 1;
            pixels.sort();
            out.push(OracleComponent {
                first_pixel: (y, x),
                pixel_count: pixels.len(),
                bbox: (x0, y0, x1, y1),
                pixels,
            });
        }
    }
    out
}

pub fn bbox_tuple(b: &BBox) -> (u32, u32, u32, u32) {
    (b.x_min(), b.y_min(), b.x_max(), b.y_max())
}

// ---------------------------------------------------------------- evaluation

fn iou_oracle(a: &BBox, b: &BBox) -> f64 {
    let ix = (a.x_max().min(b.x_max()) as i64 - a.x_min().max(b.x_min()) as i64).max(0);
    let iy = (a.y_max().min(b.y_max()) as i64 - a.y_min().max(b.y_min()) as i64).max(0);
    let inter = (ix * iy) as f64;
    let ua = ((a.x_max() - a.x_min()) * (a.y_max() - a.y_min())) as f64;
    let ub = ((b.x_max() - b.x_min()) * (b.y_max() - b.y_min())) as f64;
    inter / (ua + ub - inter)
}

/// Materializes the full precision/recall table and integrates the
/// precision envelope over every distinct recall level.
pub fn ap_oracle(preds: &[BoxRecord], gts: &[BoxRecord], thr: f64) -> f64 {
    let mut order: Vec<usize> = (0..preds.len()).collect();
    // insertion sort by descending score keeps equal scores in input order
    for i in 1..order.len() {
        let mut j = i;
        while j > 0 && preds[order[j - 1]].score.unwrap() < preds[order[j]].score.unwrap() {
            order.swap(j - 1, j);
            j -= 1;
        }
    }
    let mut used = vec![false; gts.len()];
    let mut table: Vec<(f64, f64)> = Vec::new(); // (recall, precision)
    let mut tp = 0usize;
    for (rank, &pi) in order.iter().enumerate() {
        let p = &preds[pi];
        let mut best: Option<(usize, f64)> = None;
        for (gi, g) in gts.iter().enumerate() {
            if used[gi] || g.image_id != p.image_id {
                continue;
            }
            let o = iou_oracle(&p.bbox, &g.bbox);
            if o > 0.0 && best.is_none_or(|(_, b)| o > b) {
                best = Some((gi, o));
            }
        }
        if let Some((gi, o)) = best {
            if o >= thr {
                used[gi] = true;
                tp += 1;
            }
        }
        table.push((tp as f64 / gts.len() as f64, tp as f64 / (rank + 1) as f64));
    }
    let mut levels: Vec<f64> = table.iter().map(|r| r.0).filter(|&r| r > 0.0).collect();
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    let mut prev = 0.0;
    let mut area = 0.0;
    for r in levels {
        let env = table
            .iter()
            .filter(|row| row.0 >= r)
            .map(|row| row.1)
            .fold(0.0, f64::max);
        area += (r - prev) * env;
        prev = r;
    }
    area
}

pub fn success_oracle(preds: &[BoxRecord], gts: &[BoxRecord], frac: f64) -> f64 {
    let mut by_image: HashMap<&str, Vec<&BBox>> = HashMap::new();
    for p in preds {
        by_image.entry(&p.image_id).or_default().push(&p.bbox);
    }
    let mut hit = 0;
    for g in gts {
        let area = g.bbox.area() as f64;
        let covered = by_image.get(g.image_id.as_str()).is_some_and(|ps| {
            ps.iter().any(|p| {
                let mut inside = 0u64;
                for y in g.bbox.y_min()..g.bbox.y_max() {
                    for x in g.bbox.x_min()..g.bbox.x_max() {
                        if p.contains_point(x, y) {
                            inside += 1;
                        }
                    }
                }
                inside as f64 / area >= frac
            })
        });
        if covered {
            hit += 1;
        }
    }
    hit as f64 / gts.len() as f64
}

pub fn random_box(rng: &mut StdRng, extent: u32) -> BBox {
    let x0 = rng.random_range(0..extent - 1);
    let y0 = rng.random_range(0..extent - 1);
    let x1 = rng.random_range(x0 + 1..=extent);
    let y1 = rng.random_range(y0 + 1..=extent);
    BBox::new(x0, y0, x1, y1).unwrap()
}

/// Up to 4 images with up to 6 GT and 6 predictions each. Scores are drawn
/// from a coarse grid so ties occur.
pub fn random_instance(rng: &mut StdRng) -> (Vec<BoxRecord>, Vec<BoxRecord>) {
    let mut preds = Vec::new();
    let mut gts = Vec::new();
    let images = rng.random_range(1..=4);
    for i in 0..images {
        let id = format!("img{i}");
        for _ in 0..rng.random_range(0..=6) {
            gts.push(BoxRecord::ground_truth(&id, random_box(rng, 16)));
        }
        for _ in 0..rng.random_range(0..=6) {
            let score = rng.random_range(0..=10) as f64 / 10.0;
            preds.push(BoxRecord::detection(&id, random_box(rng, 16), score));
        }
    }
    if gts.is_empty() {
        gts.push(BoxRecord::ground_truth("img0", random_box(rng, 16)));
    }
    (preds, gts)
}
