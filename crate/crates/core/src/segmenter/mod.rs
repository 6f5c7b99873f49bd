//! The promptable-segmenter contract and its implementations.
//!
//! [`OracleSegmenter`] and [`DilatingSegmenter`] are deterministic stand-ins
//! that resolve prompts against known instances; [`RemoteSegmenter`] talks
//! to a model server over the JSON protocol in [`wire`].

mod oracle;
mod remote;
pub mod wire;

pub use oracle::{DilatingSegmenter, OracleSegmenter};
pub use remote::{RemoteConfig, RemoteSegmenter};

use crate::prompt::Prompt;
use crate::raster::{BinaryMask, ImageRaster};

pub struct SegmenterRequest<'a> {
    pub image: &'a ImageRaster,
    pub prompt: &'a Prompt,
    pub image_id: &'a str,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SegmenterResponse {
    pub mask: BinaryMask,
    pub score: f64,
}

#[derive(Debug, thiserror::Error)]
pub enum SegmenterError {
    #[error("backend unavailable: {0}")]
    BackendUnavailable(String),
    #[error("protocol error: {0}")]
    ProtocolError(String),
    #[error("invalid request: {0}")]
    InvalidRequest(String),
}

/// Something that turns a prompt on an image into one mask.
///
/// Implementations must be callable from many threads at once.
pub trait Segmenter: Send + Sync {
    fn segment(&self, req: &SegmenterRequest<'_>) -> Result<SegmenterResponse, SegmenterError>;

    fn name(&self) -> &str;
}

impl<T: Segmenter + ?Sized> Segmenter for std::sync::Arc<T> {
    fn segment(&self, req: &SegmenterRequest<'_>) -> Result<SegmenterResponse, SegmenterError> {
        (**self).segment(req)
    }

    fn name(&self) -> &str {
        (**self).name()
    }
}

/// Checks that every prompt coordinate lies on the image.
pub fn validate_request(req: &SegmenterRequest<'_>) -> Result<(), SegmenterError> {
    let (w, h) = (req.image.width(), req.image.height());
    for p in req
        .prompt
        .positive_points
        .iter()
        .chain(&req.prompt.negative_points)
    {
        if !req.image.in_bounds(*p) {
            return Err(SegmenterError::InvalidRequest(format!(
                "point ({}, {}) outside {}x{} image",
                p.x, p.y, w, h
            )));
        }
    }
    if let Some(b) = req.prompt.bbox {
        if b.x_min >= b.x_max || b.y_min >= b.y_max || b.x_max > w || b.y_max > h {
            return Err(SegmenterError::InvalidRequest(format!(
                "box {:?} invalid for {w}x{h} image",
                b.as_array()
            )));
        }
    }
    if !req.prompt.is_usable() {
        return Err(SegmenterError::InvalidRequest(
            "prompt has neither positive points nor a box".into(),
        ));
    }
    Ok(())
}
