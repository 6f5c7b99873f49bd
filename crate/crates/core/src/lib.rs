//! Prompt generation, segmentation and scoring for building-footprint masks.
//!
//! A CNN's predicted building mask is split into instances, each instance is
//! turned into a prompt (points, negative points, a box or a mix), a
//! promptable segmenter refines it, and the merged output is scored against
//! ground truth with pixel metrics and true-positive instance metrics.
//!
//! Modules, bottom-up:
//! - [`raster`]: labelling, distance transform, representative point, skeleton
//! - [`prompt`]: the nine prompting strategies
//! - [`segmenter`]: the segmenter contract, test doubles and the HTTP client
//! - [`metrics`]: confusion counts, instance matching, aggregation
//! - [`runner`]: dataset ingestion, experiment grid, reports and overlays

pub mod fixtures;
pub mod metrics;
pub mod prompt;
pub mod raster;
pub mod runner;
pub mod segmenter;

pub use metrics::{ConfusionCounts, MatchResult, MetricsReport};
pub use prompt::{NegativeMode, Prompt, StrategyKind, StrategySpec};
pub use raster::{BinaryMask, BoundingBox, ImageRaster, InstanceMask, Point};
pub use runner::{ExperimentConfig, SceneRecord};
pub use segmenter::{Segmenter, SegmenterError, SegmenterRequest, SegmenterResponse};
