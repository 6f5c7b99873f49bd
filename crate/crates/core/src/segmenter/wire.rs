//! JSON-over-HTTP protocol spoken to a model server.
//!
//! ```text
//! POST {endpoint}/segment
//!   {"image_id", "image_png_b64", "points": [{"x","y","label"}], "box": [x0,y0,x1,y1] | null, "multimask": false}
//!   200 {"mask_png_b64", "score"}
//!   4xx/5xx {"error"}
//! GET {endpoint}/health
//!   200 {"status": "ok", "model"}
//! ```
//!
//! Images travel as base64 PNG (8-bit RGB), masks as base64 PNG (8-bit
//! grayscale, 0 or 255). Boxes are half-open, `label` is 1 for positive
//! points and 0 for negative ones.

use std::io::Cursor;

use base64::engine::general_purpose::STANDARD;
use base64::Engine;
use image::{GrayImage, ImageFormat, RgbImage};
use serde::{Deserialize, Serialize};

use crate::prompt::Prompt;
use crate::raster::{BinaryMask, BoundingBox, ImageRaster, Point};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WirePoint {
    pub x: u32,
    pub y: u32,
    pub label: u8,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SegmentRequest {
    pub image_id: String,
    pub image_png_b64: String,
    pub points: Vec<WirePoint>,
    #[serde(rename = "box")]
    pub bbox: Option<[u32; 4]>,
    pub multimask: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentResponse {
    pub mask_png_b64: String,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HealthResponse {
    pub status: String,
    pub model: String,
}

#[derive(Debug, thiserror::Error)]
pub enum WireError {
    #[error("base64: {0}")]
    Base64(#[from] base64::DecodeError),
    #[error("png: {0}")]
    Png(#[from] image::ImageError),
    #[error("mask is {got:?}, expected {expected:?}")]
    Dimensions {
        got: (u32, u32),
        expected: (u32, u32),
    },
    #[error("box {0:?} is not a valid half-open box")]
    BadBox([u32; 4]),
    #[error("point label {0} is neither 0 nor 1")]
    BadLabel(u8),
}

impl SegmentRequest {
    pub fn from_prompt(image_id: &str, image_png_b64: String, prompt: &Prompt) -> Self {
        let label = |label| {
            move |p: &Point| WirePoint {
                x: p.x,
                y: p.y,
                label,
            }
        };
        SegmentRequest {
            image_id: image_id.to_string(),
            image_png_b64,
            points: prompt
                .positive_points
                .iter()
                .map(label(1))
                .chain(prompt.negative_points.iter().map(label(0)))
                .collect(),
            bbox: prompt.bbox.map(|b| b.as_array()),
            multimask: false,
        }
    }

    /// The prompt carried by this request.
    pub fn prompt(&self) -> Result<Prompt, WireError> {
        let mut prompt = Prompt::default();
        for p in &self.points {
            match p.label {
                1 => prompt.positive_points.push(Point::new(p.x, p.y)),
                0 => prompt.negative_points.push(Point::new(p.x, p.y)),
                other => return Err(WireError::BadLabel(other)),
            }
        }
        if let Some(b) = self.bbox {
            if b[0] >= b[2] || b[1] >= b[3] {
                return Err(WireError::BadBox(b));
            }
            prompt.bbox = Some(BoundingBox::new(b[0], b[1], b[2], b[3]));
        }
        Ok(prompt)
    }
}

pub fn encode_image_png(image: &ImageRaster) -> Result<Vec<u8>, WireError> {
    let raw: Vec<u8> = image.pixels().iter().flatten().copied().collect();
    let buf = RgbImage::from_raw(image.width(), image.height(), raw)
        .expect("raster length checked on construction");
    let mut out = Cursor::new(Vec::new());
    buf.write_to(&mut out, ImageFormat::Png)?;
    Ok(out.into_inner())
}

pub fn decode_image_png(bytes: &[u8]) -> Result<ImageRaster, WireError> {
    let img = image::load_from_memory_with_format(bytes, ImageFormat::Png)?.to_rgb8();
    let (w, h) = img.dimensions();
    let pixels = img.pixels().map(|p| p.0).collect();
    ImageRaster::new(w, h, pixels).map_err(|_| WireError::Dimensions {
        got: (w, h),
        expected: (w.max(1), h.max(1)),
    })
}

pub fn encode_mask_png(mask: &BinaryMask) -> Result<Vec<u8>, WireError> {
    let raw: Vec<u8> = mask
        .bits()
        .iter()
        .map(|&b| if b { 255 } else { 0 })
        .collect();
    let buf = GrayImage::from_raw(mask.width(), mask.height(), raw)
        .expect("mask length checked on construction");
    let mut out = Cursor::new(Vec::new());
    buf.write_to(&mut out, ImageFormat::Png)?;
    Ok(out.into_inner())
}

/// Decodes a mask PNG, binarizing at > 127. Colour PNGs are converted to
/// luma first.
pub fn decode_mask_png(bytes: &[u8]) -> Result<BinaryMask, WireError> {
    let img = image::load_from_memory_with_format(bytes, ImageFormat::Png)?.to_luma8();
    let (w, h) = img.dimensions();
    let bits = img.pixels().map(|p| p.0[0] > 127).collect();
    BinaryMask::new(w, h, bits).map_err(|_| WireError::Dimensions {
        got: (w, h),
        expected: (w.max(1), h.max(1)),
    })
}

pub fn to_b64(bytes: &[u8]) -> String {
    STANDARD.encode(bytes)
}

pub fn from_b64(s: &str) -> Result<Vec<u8>, WireError> {
    Ok(STANDARD.decode(s)?)
}

/// Decodes a response mask and checks it against the request image size.
pub fn decode_response_mask(
    resp: &SegmentResponse,
    expected: (u32, u32),
) -> Result<BinaryMask, WireError> {
    let mask = decode_mask_png(&from_b64(&resp.mask_png_b64)?)?;
    if mask.dims() != expected {
        return Err(WireError::Dimensions {
            got: mask.dims(),
            expected,
        });
    }
    Ok(mask)
}
