//! Pixel metrics and true-positive instance metrics.
//!
//! Pixel scores are micro-averaged: confusion counts are summed over the
//! dataset before any ratio is taken. Instance metrics pool every matched
//! pair across images and average Jaccard / Dice over the pool.

use std::cmp::Ordering;
use std::ops::{Add, AddAssign};

use serde::{Deserialize, Serialize};

use crate::raster::{BinaryMask, InstanceMask};

pub const DEFAULT_MATCH_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MetricsError {
    #[error("dimension mismatch: {left:?} vs {right:?}")]
    DimensionMismatch { left: (u32, u32), right: (u32, u32) },
    #[error("nothing to aggregate")]
    EmptyInput,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub tp: u64,
    pub fp: u64,
    pub fn_: u64,
    pub tn: u64,
}

impl ConfusionCounts {
    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.fn_ + self.tn
    }
}

impl Add for ConfusionCounts {
    type Output = ConfusionCounts;

    fn add(self, o: ConfusionCounts) -> ConfusionCounts {
        ConfusionCounts {
            tp: self.tp + o.tp,
            fp: self.fp + o.fp,
            fn_: self.fn_ + o.fn_,
            tn: self.tn + o.tn,
        }
    }
}

impl AddAssign for ConfusionCounts {
    fn add_assign(&mut self, o: ConfusionCounts) {
        *self = *self + o;
    }
}

/// Precision, recall, IoU and F1, as percentages.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PixelScores {
    pub precision: f64,
    pub recall: f64,
    pub iou: f64,
    pub f1: f64,
}

/// One matched (true-positive) instance pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchedPair {
    pub pred_id: u32,
    pub gt_id: u32,
    /// Jaccard index, as a fraction.
    pub iou: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MatchResult {
    pub pairs: Vec<MatchedPair>,
    pub unmatched_pred: Vec<u32>,
    pub unmatched_gt: Vec<u32>,
}

/// Per-pair Jaccard and Dice for the matched pairs of one image.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairScore {
    pub jaccard: f64,
    pub dice: f64,
}

/// Everything scored for one image, ready to aggregate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImageEvaluation {
    pub image_id: String,
    pub counts: ConfusionCounts,
    pub matches: MatchResult,
    pub pair_scores: Vec<PairScore>,
}

impl ImageEvaluation {
    /// Scores `pred` against `gt`: pixel counts on the scene masks, instance
    /// matching on the labelled instances.
    pub fn evaluate(
        image_id: impl Into<String>,
        pred_mask: &BinaryMask,
        gt_mask: &BinaryMask,
        pred: &[InstanceMask],
        gt: &[InstanceMask],
        threshold: f64,
    ) -> Result<Self, MetricsError> {
        let counts = pixel_confusion(pred_mask, gt_mask)?;
        let matches = match_instances(pred, gt, threshold);
        let pair_scores = pair_scores(&matches, pred, gt);
        Ok(ImageEvaluation {
            image_id: image_id.into(),
            counts,
            matches,
            pair_scores,
        })
    }

    /// This image on its own.
    pub fn report(&self) -> MetricsReport {
        aggregate(std::slice::from_ref(self)).expect("one image")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub precision: f64,
    pub recall: f64,
    pub iou: f64,
    pub f1: f64,
    pub tp_iou: f64,
    pub tp_f1: f64,
    /// False when no pair matched anywhere; `tp_iou` and `tp_f1` are then 0.
    pub tp_defined: bool,
    pub counts: ConfusionCounts,
    pub per_image: Vec<ImageEvaluation>,
}

impl MetricsReport {
    pub fn columns(&self) -> [f64; 6] {
        [
            self.precision,
            self.recall,
            self.iou,
            self.f1,
            self.tp_iou,
            self.tp_f1,
        ]
    }
}

/// Pixelwise OR of equally sized masks.
pub fn merge_instance_outputs(
    width: u32,
    height: u32,
    masks: &[BinaryMask],
) -> Result<BinaryMask, MetricsError> {
    let mut bits = vec![false; width as usize * height as usize];
    for m in masks {
        if m.dims() != (width, height) {
            return Err(MetricsError::DimensionMismatch {
                left: (width, height),
                right: m.dims(),
            });
        }
        for (acc, &b) in bits.iter_mut().zip(m.bits()) {
            *acc |= b;
        }
    }
    Ok(BinaryMask::new(width, height, bits).expect("dims checked by caller"))
}

pub fn pixel_confusion(
    pred: &BinaryMask,
    gt: &BinaryMask,
) -> Result<ConfusionCounts, MetricsError> {
    if pred.dims() != gt.dims() {
        return Err(MetricsError::DimensionMismatch {
            left: pred.dims(),
            right: gt.dims(),
        });
    }
    let mut c = ConfusionCounts::default();
    for (&p, &g) in pred.bits().iter().zip(gt.bits()) {
        match (p, g) {
            (true, true) => c.tp += 1,
            (true, false) => c.fp += 1,
            (false, true) => c.fn_ += 1,
            (false, false) => c.tn += 1,
        }
    }
    Ok(c)
}

/// Percent scores from confusion counts.
///
/// A 0/0 ratio is 100 when the scene and prediction are both empty
/// (tp = fp = fn = 0) and 0 otherwise.
pub fn scores(c: &ConfusionCounts) -> PixelScores {
    let all_empty = c.tp == 0 && c.fp == 0 && c.fn_ == 0;
    let ratio = |num: u64, den: u64| {
        if den == 0 {
            if all_empty {
                100.0
            } else {
                0.0
            }
        } else {
            100.0 * num as f64 / den as f64
        }
    };
    PixelScores {
        precision: ratio(c.tp, c.tp + c.fp),
        recall: ratio(c.tp, c.tp + c.fn_),
        iou: ratio(c.tp, c.tp + c.fp + c.fn_),
        f1: ratio(2 * c.tp, 2 * c.tp + c.fp + c.fn_),
    }
}

/// Jaccard index of two instances, as a fraction.
pub fn instance_iou(a: &InstanceMask, b: &InstanceMask) -> f64 {
    if !boxes_intersect(a, b) {
        return 0.0;
    }
    let inter = a.overlap(b);
    inter as f64 / (a.len() + b.len() - inter) as f64
}

fn boxes_intersect(a: &InstanceMask, b: &InstanceMask) -> bool {
    let (p, q) = (a.bbox(), b.bbox());
    p.x_min < q.x_max && q.x_min < p.x_max && p.y_min < q.y_max && q.y_min < p.y_max
}

/// Greedy one-to-one matching in descending pair-IoU order.
///
/// Ties go to the smaller prediction id, then the smaller ground-truth id.
/// Pairs below `threshold` are never matched.
pub fn match_instances(pred: &[InstanceMask], gt: &[InstanceMask], threshold: f64) -> MatchResult {
    let mut candidates: Vec<MatchedPair> = Vec::new();
    for p in pred {
        for g in gt {
            let iou = instance_iou(p, g);
            if iou > 0.0 && iou >= threshold {
                candidates.push(MatchedPair {
                    pred_id: p.id(),
                    gt_id: g.id(),
                    iou,
                });
            }
        }
    }
    candidates.sort_by(|a, b| {
        b.iou
            .partial_cmp(&a.iou)
            .unwrap_or(Ordering::Equal)
            .then(a.pred_id.cmp(&b.pred_id))
            .then(a.gt_id.cmp(&b.gt_id))
    });

    let mut used_pred = std::collections::HashSet::new();
    let mut used_gt = std::collections::HashSet::new();
    let mut pairs = Vec::new();
    for c in candidates {
        if !used_pred.contains(&c.pred_id) && !used_gt.contains(&c.gt_id) {
            used_pred.insert(c.pred_id);
            used_gt.insert(c.gt_id);
            pairs.push(c);
        }
    }
    MatchResult {
        pairs,
        unmatched_pred: pred
            .iter()
            .map(|p| p.id())
            .filter(|id| !used_pred.contains(id))
            .collect(),
        unmatched_gt: gt
            .iter()
            .map(|g| g.id())
            .filter(|id| !used_gt.contains(id))
            .collect(),
    }
}

/// Jaccard and Dice of each matched pair, counted from the pixel sets.
pub fn pair_scores(
    matches: &MatchResult,
    pred: &[InstanceMask],
    gt: &[InstanceMask],
) -> Vec<PairScore> {
    let find = |set: &'_ [InstanceMask], id: u32| set.iter().find(|i| i.id() == id).cloned();
    matches
        .pairs
        .iter()
        .filter_map(|pair| {
            let p = find(pred, pair.pred_id)?;
            let g = find(gt, pair.gt_id)?;
            let inter = p.overlap(&g) as f64;
            let (a, b) = (p.len() as f64, g.len() as f64);
            Some(PairScore {
                jaccard: inter / (a + b - inter),
                dice: 2.0 * inter / (a + b),
            })
        })
        .collect()
}

/// Mean Jaccard and mean Dice over matched pairs, as percentages, and
/// whether any pair existed.
pub fn tp_metrics(
    matches: &MatchResult,
    pred: &[InstanceMask],
    gt: &[InstanceMask],
) -> (f64, f64, bool) {
    mean_pair_scores(&pair_scores(matches, pred, gt))
}

fn mean_pair_scores(scores: &[PairScore]) -> (f64, f64, bool) {
    if scores.is_empty() {
        return (0.0, 0.0, false);
    }
    let n = scores.len() as f64;
    let j: f64 = scores.iter().map(|s| s.jaccard).sum();
    let d: f64 = scores.iter().map(|s| s.dice).sum();
    (100.0 * j / n, 100.0 * d / n, true)
}

/// Dataset-level report: summed confusion counts, pooled matched pairs.
pub fn aggregate(per_image: &[ImageEvaluation]) -> Result<MetricsReport, MetricsError> {
    if per_image.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    let counts = per_image
        .iter()
        .fold(ConfusionCounts::default(), |acc, e| acc + e.counts);
    let px = scores(&counts);
    let pooled: Vec<PairScore> = per_image
        .iter()
        .flat_map(|e| e.pair_scores.iter().copied())
        .collect();
    let (tp_iou, tp_f1, tp_defined) = mean_pair_scores(&pooled);
    Ok(MetricsReport {
        precision: px.precision,
        recall: px.recall,
        iou: px.iou,
        f1: px.f1,
        tp_iou,
        tp_f1,
        tp_defined,
        counts,
        per_image: per_image.to_vec(),
    })
}
