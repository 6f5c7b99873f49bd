//! Prompting strategies: instance mask in, prompt out.

mod generate;
mod strategy;

pub use generate::{
    gen_bbox, gen_negative_points, gen_random_points, gen_single_point, gen_skeleton_points,
    generate, instance_seed, GeneratedPrompt,
};
pub use strategy::{NegativeMode, StrategyKind, StrategySpec};

use serde::{Deserialize, Serialize};

use crate::raster::{BoundingBox, Point};

/// The unit handed to a segmenter.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prompt {
    pub positive_points: Vec<Point>,
    pub negative_points: Vec<Point>,
    #[serde(rename = "box")]
    pub bbox: Option<BoundingBox>,
}

impl Prompt {
    pub fn points(points: Vec<Point>) -> Self {
        Prompt {
            positive_points: points,
            ..Default::default()
        }
    }

    pub fn boxed(bbox: BoundingBox) -> Self {
        Prompt {
            bbox: Some(bbox),
            ..Default::default()
        }
    }

    /// Field-wise union; points keep their order, `other`'s box wins only if
    /// `self` has none.
    pub fn merge(mut self, other: Prompt) -> Self {
        self.positive_points.extend(other.positive_points);
        self.negative_points.extend(other.negative_points);
        self.bbox = self.bbox.or(other.bbox);
        self
    }

    pub fn is_usable(&self) -> bool {
        !self.positive_points.is_empty() || self.bbox.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PromptError {
    #[error("no candidate pixels for negative points ({mode:?} mode)")]
    EmptyCandidateRegion { mode: NegativeMode },
    #[error("scene mask is {scene:?}, instance needs at least {needed:?}")]
    SceneTooSmall {
        scene: (u32, u32),
        needed: (u32, u32),
    },
}
