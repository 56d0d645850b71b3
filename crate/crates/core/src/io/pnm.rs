//! Binary netpbm: PGM (P5) input, PGM/PPM (P5/P6) output. 8-bit only.

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PnmError {
    #[error("bad header: {0}")]
    BadHeader(String),
    #[error("truncated data: need {expected} bytes, have {found}")]
    TruncatedData { expected: usize, found: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl GrayImage {
    /// Panics if `pixels.len() != width * height`.
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Self {
        assert_eq!(pixels.len(), width * height, "pixel buffer size");
        Self {
            width,
            height,
            pixels,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.pixels[y * self.width + x]
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RgbImage {
    width: usize,
    height: usize,
    pixels: Vec<[u8; 3]>,
}

impl RgbImage {
    pub fn from_gray(gray: &GrayImage) -> Self {
        Self {
            width: gray.width,
            height: gray.height,
            pixels: gray.pixels.iter().map(|&v| [v, v, v]).collect(),
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn get(&self, x: usize, y: usize) -> [u8; 3] {
        self.pixels[y * self.width + x]
    }

    pub fn put(&mut self, x: usize, y: usize, rgb: [u8; 3]) {
        self.pixels[y * self.width + x] = rgb;
    }
}

/// Splits off the next whitespace-delimited header token, skipping `#` comments.
fn next_token<'a>(data: &'a [u8], pos: &mut usize) -> Option<&'a [u8]> {
    loop {
        while *pos < data.len() && data[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        if *pos < data.len() && data[*pos] == b'#' {
            while *pos < data.len() && data[*pos] != b'\n' {
                *pos += 1;
            }
            continue;
        }
        break;
    }
    let start = *pos;
    while *pos < data.len() && !data[*pos].is_ascii_whitespace() && data[*pos] != b'#' {
        *pos += 1;
    }
    (start < *pos).then(|| &data[start..*pos])
}

fn parse_field(data: &[u8], pos: &mut usize, name: &str) -> Result<usize, PnmError> {
    let token =
        next_token(data, pos).ok_or_else(|| PnmError::BadHeader(format!("missing {name}")))?;
    std::str::from_utf8(token)
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .ok_or_else(|| {
            PnmError::BadHeader(format!(
                "{name} is not an integer: {:?}",
                String::from_utf8_lossy(token)
            ))
        })
}

pub fn read_pgm(bytes: &[u8]) -> Result<GrayImage, PnmError> {
    let mut pos = 0;
    match next_token(bytes, &mut pos) {
        Some(b"P5") => {}
        Some(other) => {
            return Err(PnmError::BadHeader(format!(
                "unsupported magic {:?} (only binary P5 is accepted)",
                String::from_utf8_lossy(other)
            )))
        }
        None => return Err(PnmError::BadHeader("empty file".into())),
    }
    let width = parse_field(bytes, &mut pos, "width")?;
    let height = parse_field(bytes, &mut pos, "height")?;
    let maxval = parse_field(bytes, &mut pos, "maxval")?;
    if width == 0 || height == 0 {
        return Err(PnmError::BadHeader(format!(
            "zero dimension {width}x{height}"
        )));
    }
    if maxval != 255 {
        return Err(PnmError::BadHeader(format!(
            "maxval {maxval} unsupported (must be 255)"
        )));
    }
    // exactly one whitespace byte separates the header from the raster
    if pos >= bytes.len() || !bytes[pos].is_ascii_whitespace() {
        return Err(PnmError::BadHeader("missing separator after maxval".into()));
    }
    pos += 1;

    let expected = width
        .checked_mul(height)
        .ok_or_else(|| PnmError::BadHeader("dimensions overflow".into()))?;
    let raster = &bytes[pos..];
    if raster.len() < expected {
        return Err(PnmError::TruncatedData {
            expected,
            found: raster.len(),
        });
    }
    Ok(GrayImage::new(width, height, raster[..expected].to_vec()))
}

pub fn write_pgm(image: &GrayImage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", image.width, image.height).into_bytes();
    out.extend_from_slice(&image.pixels);
    out
}

pub fn write_ppm(image: &RgbImage) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", image.width, image.height).into_bytes();
    out.reserve(image.pixels.len() * 3);
    for px in &image.pixels {
        out.extend_from_slice(px);
    }
    out
}
