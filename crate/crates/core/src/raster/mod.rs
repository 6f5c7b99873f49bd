//! Binary-mask raster algorithms.

mod distance;
mod label;
mod points;
mod skeleton;
mod types;

pub use distance::{distance_transform, DistanceMap};
pub use label::label_components;
pub use points::{bounding_box, centroid, nearest_pixel, representative_point};
pub use skeleton::skeletonize;
pub use types::{BinaryMask, BoundingBox, ImageRaster, InstanceMask, Point};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RasterError {
    #[error("raster dimensions must be at least 1x1")]
    ZeroDimension,
    #[error("expected {expected} pixels, got {actual}")]
    PixelCount { expected: usize, actual: usize },
    #[error("rows of unequal length")]
    RaggedRows,
    #[error("instance has no pixels")]
    EmptyInstance,
    #[error("instance ids start at 1")]
    ZeroInstanceId,
    #[error("instance {id} is not 8-connected")]
    Disconnected { id: u32 },
    #[error("pixel ({x}, {y}) lies outside the raster")]
    OutOfBounds { x: u32, y: u32 },
}
