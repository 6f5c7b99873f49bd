use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// One experiment row of the prompting grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrategyKind {
    SinglePoint,
    SinglePointPlusNegative,
    SkeletonMultiPoint,
    RandomMultiPoint,
    RandomMultiPlusSingle,
    RandomMultiPlusNegative,
    #[serde(rename = "bbox")]
    BBox,
    #[serde(rename = "bbox_plus_single")]
    BBoxPlusSingle,
    #[serde(rename = "bbox_plus_multi")]
    BBoxPlusMulti,
}

impl StrategyKind {
    /// All kinds in report row order.
    pub const ALL: [StrategyKind; 9] = [
        StrategyKind::SinglePoint,
        StrategyKind::SinglePointPlusNegative,
        StrategyKind::SkeletonMultiPoint,
        StrategyKind::RandomMultiPoint,
        StrategyKind::RandomMultiPlusSingle,
        StrategyKind::RandomMultiPlusNegative,
        StrategyKind::BBox,
        StrategyKind::BBoxPlusSingle,
        StrategyKind::BBoxPlusMulti,
    ];

    /// Row label used in reports.
    pub fn label(self) -> &'static str {
        match self {
            StrategyKind::SinglePoint => "Single-point",
            StrategyKind::SinglePointPlusNegative => "Single-point + Negative-point",
            StrategyKind::SkeletonMultiPoint => "Skeleton Multiple-points",
            StrategyKind::RandomMultiPoint => "Random Multiple-points",
            StrategyKind::RandomMultiPlusSingle => "Random Multiple-points + Single-point",
            StrategyKind::RandomMultiPlusNegative => "Random Multiple-points + Negative-point",
            StrategyKind::BBox => "Bounding-box",
            StrategyKind::BBoxPlusSingle => "Bounding-box + Single-point",
            StrategyKind::BBoxPlusMulti => "Bounding-box + Multiple-points",
        }
    }

    /// Identifier used in file names and on the command line.
    pub fn slug(self) -> &'static str {
        match self {
            StrategyKind::SinglePoint => "single_point",
            StrategyKind::SinglePointPlusNegative => "single_point_plus_negative",
            StrategyKind::SkeletonMultiPoint => "skeleton_multi_point",
            StrategyKind::RandomMultiPoint => "random_multi_point",
            StrategyKind::RandomMultiPlusSingle => "random_multi_plus_single",
            StrategyKind::RandomMultiPlusNegative => "random_multi_plus_negative",
            StrategyKind::BBox => "bbox",
            StrategyKind::BBoxPlusSingle => "bbox_plus_single",
            StrategyKind::BBoxPlusMulti => "bbox_plus_multi",
        }
    }

    pub fn uses_negatives(self) -> bool {
        matches!(
            self,
            StrategyKind::SinglePointPlusNegative | StrategyKind::RandomMultiPlusNegative
        )
    }

    pub fn uses_box(self) -> bool {
        matches!(
            self,
            StrategyKind::BBox | StrategyKind::BBoxPlusSingle | StrategyKind::BBoxPlusMulti
        )
    }
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown strategy {0:?}")]
pub struct UnknownStrategy(pub String);

impl FromStr for StrategyKind {
    type Err = UnknownStrategy;

    /// Accepts either the slug or the report label, case-insensitively.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        StrategyKind::ALL
            .into_iter()
            .find(|k| k.slug().eq_ignore_ascii_case(s) || k.label().eq_ignore_ascii_case(s))
            .ok_or_else(|| UnknownStrategy(s.to_string()))
    }
}

/// Where negative points are drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NegativeMode {
    /// Any pixel off the predicted scene mask.
    Background,
    /// Pixels inside the instance's box but off the instance.
    InsideBox,
}

/// A fully parameterised strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StrategySpec {
    pub kind: StrategyKind,
    #[serde(default = "default_k_points")]
    pub k_points: usize,
    #[serde(default = "default_n_negative")]
    pub n_negative: usize,
    /// `None` picks `InsideBox` when the prompt carries a box, `Background` otherwise.
    #[serde(default)]
    pub negative_mode: Option<NegativeMode>,
    #[serde(default)]
    pub seed: u64,
}

fn default_k_points() -> usize {
    5
}

fn default_n_negative() -> usize {
    1
}

impl StrategySpec {
    pub fn new(kind: StrategyKind) -> Self {
        StrategySpec {
            kind,
            k_points: default_k_points(),
            n_negative: default_n_negative(),
            negative_mode: None,
            seed: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn label(&self) -> &'static str {
        self.kind.label()
    }

    /// The negative-point mode actually used for this strategy.
    pub fn effective_negative_mode(&self) -> NegativeMode {
        self.negative_mode.unwrap_or(if self.kind.uses_box() {
            NegativeMode::InsideBox
        } else {
            NegativeMode::Background
        })
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.k_points == 0 {
            return Err(format!("{}: k_points must be positive", self.kind.slug()));
        }
        Ok(())
    }
}
