//! Axis-aligned boxes and the box annotation CSV format.
//!
//! ```text
//! image_id,x_min,y_min,x_max,y_max,score
//! leaf_001,3,2,8,6,
//! leaf_001,10,4,30,22,0.93
//! ```
//!
//! Coordinates are half-open pixel intervals `[x_min, x_max) x [y_min, y_max)`.
//! The score column is empty (or absent) for ground truth.

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const CSV_HEADER: [&str; 6] = ["image_id", "x_min", "y_min", "x_max", "y_max", "score"];

/// Half-open pixel rectangle with `x_min < x_max` and `y_min < y_max`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BBox {
    x_min: u32,
    y_min: u32,
    x_max: u32,
    y_max: u32,
}

impl BBox {
    /// Returns `None` for empty or inverted boxes.
    pub fn new(x_min: u32, y_min: u32, x_max: u32, y_max: u32) -> Option<Self> {
        (x_min < x_max && y_min < y_max).then_some(Self {
            x_min,
            y_min,
            x_max,
            y_max,
        })
    }

    pub fn x_min(&self) -> u32 {
        self.x_min
    }

    pub fn y_min(&self) -> u32 {
        self.y_min
    }

    pub fn x_max(&self) -> u32 {
        self.x_max
    }

    pub fn y_max(&self) -> u32 {
        self.y_max
    }

    pub fn width(&self) -> u32 {
        self.x_max - self.x_min
    }

    pub fn height(&self) -> u32 {
        self.y_max - self.y_min
    }

    pub fn area(&self) -> u64 {
        self.width() as u64 * self.height() as u64
    }

    pub fn contains_point(&self, x: u32, y: u32) -> bool {
        (self.x_min..self.x_max).contains(&x) && (self.y_min..self.y_max).contains(&y)
    }

    pub fn intersection(&self, other: &BBox) -> Option<BBox> {
        BBox::new(
            self.x_min.max(other.x_min),
            self.y_min.max(other.y_min),
            self.x_max.min(other.x_max),
            self.y_max.min(other.y_max),
        )
    }

    pub fn intersection_area(&self, other: &BBox) -> u64 {
        self.intersection(other).map_or(0, |b| b.area())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxRecord {
    pub image_id: String,
    pub bbox: BBox,
    /// Detection confidence in `[0, 1]`; `None` for ground truth.
    pub score: Option<f64>,
}

impl BoxRecord {
    pub fn ground_truth(image_id: impl Into<String>, bbox: BBox) -> Self {
        Self {
            image_id: image_id.into(),
            bbox,
            score: None,
        }
    }

    pub fn detection(image_id: impl Into<String>, bbox: BBox, score: f64) -> Self {
        Self {
            image_id: image_id.into(),
            bbox,
            score: Some(score),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BoxCsvError {
    #[error("missing header line (expected {})", CSV_HEADER.join(","))]
    MissingHeader,
    #[error("line {line}: malformed record: {reason}")]
    MalformedLine { line: u64, reason: String },
    #[error("line {line}: inverted or empty box")]
    InvertedBox { line: u64 },
    #[error("image id {0:?} contains a comma or line break")]
    InvalidImageId(String),
}

fn malformed(line: u64, reason: impl Into<String>) -> BoxCsvError {
    BoxCsvError::MalformedLine {
        line,
        reason: reason.into(),
    }
}

fn parse_coord(field: &str, name: &str, line: u64) -> Result<u32, BoxCsvError> {
    field.parse::<u32>().map_err(|_| {
        malformed(
            line,
            format!("{name} {field:?} is not a non-negative integer"),
        )
    })
}

pub fn read_boxes(text: &str) -> Result<Vec<BoxRecord>, BoxCsvError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut records = reader.records();

    let header = match records.next() {
        Some(Ok(h)) => h,
        Some(Err(e)) => return Err(malformed(1, e.to_string())),
        None => return Err(BoxCsvError::MissingHeader),
    };
    let names: Vec<&str> = header.iter().collect();
    if !(names == CSV_HEADER || names == CSV_HEADER[..5]) {
        return Err(BoxCsvError::MissingHeader);
    }

    let mut out = Vec::new();
    for rec in records {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            malformed(line, e.to_string())
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != 5 && rec.len() != 6 {
            return Err(malformed(
                line,
                format!("expected 5 or 6 fields, got {}", rec.len()),
            ));
        }
        let image_id = &rec[0];
        if image_id.is_empty() {
            return Err(malformed(line, "empty image_id"));
        }
        let x_min = parse_coord(&rec[1], "x_min", line)?;
        let y_min = parse_coord(&rec[2], "y_min", line)?;
        let x_max = parse_coord(&rec[3], "x_max", line)?;
        let y_max = parse_coord(&rec[4], "y_max", line)?;
        let bbox =
            BBox::new(x_min, y_min, x_max, y_max).ok_or(BoxCsvError::InvertedBox { line })?;
        let score = match rec.get(5) {
            None | Some("") => None,
            Some(s) => {
                let v: f64 = s
                    .parse()
                    .map_err(|_| malformed(line, format!("score {s:?} is not a number")))?;
                if !(0.0..=1.0).contains(&v) {
                    return Err(malformed(line, format!("score {v} outside [0, 1]")));
                }
                Some(v)
            }
        };
        out.push(BoxRecord {
            image_id: image_id.to_string(),
            bbox,
            score,
        });
    }
    Ok(out)
}

/// Serializes records with the full six-column header. Scores use the
/// shortest representation that parses back to the same `f64`.
pub fn write_boxes(records: &[BoxRecord]) -> Result<String, BoxCsvError> {
    let mut out = CSV_HEADER.join(",");
    out.push('\n');
    for r in records {
        if r.image_id.is_empty() || r.image_id.contains([',', '\n', '\r', '"']) {
            return Err(BoxCsvError::InvalidImageId(r.image_id.clone()));
        }
        let b = &r.bbox;
        let score = r.score.map(|s| s.to_string()).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.image_id, b.x_min, b.y_min, b.x_max, b.y_max, score
        ));
    }
    Ok(out)
}
