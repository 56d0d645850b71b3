//! Detection metrics: IoU, single-class average precision and the coverage
//! success rate.
//!
//! Average precision uses greedy score-ordered matching (each ground-truth
//! box is matched at most once) and all-points interpolation of the
//! precision envelope. The success rate counts a ground-truth box as
//! captured when some prediction in the same image covers at least
//! `coverage_frac` of its area; one prediction may capture many boxes.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::ConfigError;
use crate::io::{BBox, BoxRecord};

#[derive(Debug, Error, PartialEq)]
pub enum EvalError {
    #[error("no ground-truth boxes to evaluate against")]
    NoGroundTruth,
    #[error("prediction {index} has no valid score")]
    MissingScore { index: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    iou_threshold: f64,
    coverage_frac: f64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            iou_threshold: 0.001,
            coverage_frac: 1.0,
        }
    }
}

impl EvalConfig {
    pub fn new(iou_threshold: f64, coverage_frac: f64) -> Result<Self, ConfigError> {
        if !(iou_threshold > 0.0 && iou_threshold <= 1.0) {
            return Err(ConfigError::OutOfRange {
                field: "iou_threshold",
                value: iou_threshold,
                range: "(0, 1]",
            });
        }
        if !(coverage_frac > 0.0 && coverage_frac <= 1.0) {
            return Err(ConfigError::OutOfRange {
                field: "coverage_frac",
                value: coverage_frac,
                range: "(0, 1]",
            });
        }
        Ok(Self {
            iou_threshold,
            coverage_frac,
        })
    }

    pub fn iou_threshold(&self) -> f64 {
        self.iou_threshold
    }

    pub fn coverage_frac(&self) -> f64 {
        self.coverage_frac
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Outcome {
    Tp,
    Fp,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatchRecord {
    pub image_id: String,
    /// Index into the prediction list as given.
    pub pred_index: usize,
    /// Index into the ground-truth list of the best unmatched candidate, if
    /// any overlapped.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gt_index: Option<usize>,
    pub iou: f64,
    pub outcome: Outcome,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub ap: f64,
    pub success_rate: f64,
    pub n_gt: usize,
    pub n_pred: usize,
    pub iou_threshold: f64,
    pub coverage_frac: f64,
    /// Match records in descending score order.
    pub matches: Vec<MatchRecord>,
}

pub fn iou(a: &BBox, b: &BBox) -> f64 {
    let inter = a.intersection_area(b);
    if inter == 0 {
        return 0.0;
    }
    let union = a.area() + b.area() - inter;
    inter as f64 / union as f64
}

fn gt_by_image(gts: &[BoxRecord]) -> HashMap<&str, Vec<usize>> {
    let mut map: HashMap<&str, Vec<usize>> = HashMap::new();
    for (i, g) in gts.iter().enumerate() {
        map.entry(g.image_id.as_str()).or_default().push(i);
    }
    map
}

fn scores(preds: &[BoxRecord]) -> Result<Vec<f64>, EvalError> {
    preds
        .iter()
        .enumerate()
        .map(|(index, p)| match p.score {
            Some(s) if !s.is_nan() => Ok(s),
            _ => Err(EvalError::MissingScore { index }),
        })
        .collect()
}

/// Greedy matching in descending score order (stable for ties).
pub fn match_detections(
    preds: &[BoxRecord],
    gts: &[BoxRecord],
    iou_threshold: f64,
) -> Result<Vec<MatchRecord>, EvalError> {
    let scores = scores(preds)?;
    let mut order: Vec<usize> = (0..preds.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));

    let by_image = gt_by_image(gts);
    let mut matched = vec![false; gts.len()];
    let mut records = Vec::with_capacity(preds.len());
    for pi in order {
        let pred = &preds[pi];
        let mut best: Option<(usize, f64)> = None;
        if let Some(candidates) = by_image.get(pred.image_id.as_str()) {
            for &gi in candidates {
                if matched[gi] {
                    continue;
                }
                let overlap = iou(&pred.bbox, &gts[gi].bbox);
                if overlap > 0.0 && best.is_none_or(|(_, b)| overlap > b) {
                    best = Some((gi, overlap));
                }
            }
        }
        let outcome = match best {
            Some((gi, overlap)) if overlap >= iou_threshold => {
                matched[gi] = true;
                Outcome::Tp
            }
            _ => Outcome::Fp,
        };
        records.push(MatchRecord {
            image_id: pred.image_id.clone(),
            pred_index: pi,
            gt_index: best.map(|(gi, _)| gi),
            iou: best.map_or(0.0, |(_, o)| o),
            outcome,
        });
    }
    Ok(records)
}

/// All-points interpolated AP of a ranked TP/FP sequence against `n_gt`
/// ground-truth boxes.
///
/// Recall rises by `1 / n_gt` exactly at each TP, so the envelope area is the
/// mean over TPs of the best precision at that rank or later.
pub fn ap_from_outcomes(outcomes: &[Outcome], n_gt: usize) -> Result<f64, EvalError> {
    if n_gt == 0 {
        return Err(EvalError::NoGroundTruth);
    }
    let mut tp = 0usize;
    let precision: Vec<f64> = outcomes
        .iter()
        .enumerate()
        .map(|(rank, o)| {
            if *o == Outcome::Tp {
                tp += 1;
            }
            tp as f64 / (rank + 1) as f64
        })
        .collect();

    let mut envelope = 0.0f64;
    let mut area = 0.0;
    for (o, p) in outcomes.iter().zip(&precision).rev() {
        envelope = envelope.max(*p);
        if *o == Outcome::Tp {
            area += envelope;
        }
    }
    Ok(area / n_gt as f64)
}

pub fn average_precision(
    preds: &[BoxRecord],
    gts: &[BoxRecord],
    iou_threshold: f64,
) -> Result<f64, EvalError> {
    if gts.is_empty() {
        return Err(EvalError::NoGroundTruth);
    }
    let outcomes: Vec<Outcome> = match_detections(preds, gts, iou_threshold)?
        .into_iter()
        .map(|m| m.outcome)
        .collect();
    ap_from_outcomes(&outcomes, gts.len())
}

/// True when `pred` covers at least `coverage_frac` of `gt`'s area.
pub fn covers(pred: &BBox, gt: &BBox, coverage_frac: f64) -> bool {
    pred.intersection_area(gt) as f64 / gt.area() as f64 >= coverage_frac
}

pub fn success_rate(
    preds: &[BoxRecord],
    gts: &[BoxRecord],
    coverage_frac: f64,
) -> Result<f64, EvalError> {
    if gts.is_empty() {
        return Err(EvalError::NoGroundTruth);
    }
    let mut preds_by_image: HashMap<&str, Vec<&BBox>> = HashMap::new();
    for p in preds {
        preds_by_image
            .entry(p.image_id.as_str())
            .or_default()
            .push(&p.bbox);
    }
    let captured = gts
        .iter()
        .filter(|g| {
            preds_by_image
                .get(g.image_id.as_str())
                .is_some_and(|ps| ps.iter().any(|p| covers(p, &g.bbox, coverage_frac)))
        })
        .count();
    Ok(captured as f64 / gts.len() as f64)
}

pub fn evaluate(
    preds: &[BoxRecord],
    gts: &[BoxRecord],
    config: &EvalConfig,
) -> Result<EvalReport, EvalError> {
    if gts.is_empty() {
        return Err(EvalError::NoGroundTruth);
    }
    let matches = match_detections(preds, gts, config.iou_threshold)?;
    let outcomes: Vec<Outcome> = matches.iter().map(|m| m.outcome).collect();
    Ok(EvalReport {
        ap: ap_from_outcomes(&outcomes, gts.len())?,
        success_rate: success_rate(preds, gts, config.coverage_frac)?,
        n_gt: gts.len(),
        n_pred: preds.len(),
        iou_threshold: config.iou_threshold,
        coverage_frac: config.coverage_frac,
        matches,
    })
}

impl EvalReport {
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("report fields are TOML-representable")
    }
}

impl fmt::Display for EvalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tp = self
            .matches
            .iter()
            .filter(|m| m.outcome == Outcome::Tp)
            .count();
        writeln!(f, "{:<16}{:>12}", "metric", "value")?;
        writeln!(f, "{:<16}{:>12.6}", "ap", self.ap)?;
        writeln!(f, "{:<16}{:>12.6}", "success_rate", self.success_rate)?;
        writeln!(f, "{:<16}{:>12}", "n_gt", self.n_gt)?;
        writeln!(f, "{:<16}{:>12}", "n_pred", self.n_pred)?;
        writeln!(f, "{:<16}{:>12}", "true_positives", tp)?;
        writeln!(f, "{:<16}{:>12}", "iou_threshold", self.iou_threshold)?;
        writeln!(f, "{:<16}{:>12}", "coverage_frac", self.coverage_frac)
    }
}
