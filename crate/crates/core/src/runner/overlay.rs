use std::path::{Path, PathBuf};

use image::{Rgb, RgbImage};

use super::RunError;
use crate::prompt::Prompt;
use crate::raster::{BinaryMask, BoundingBox, ImageRaster, Point};

pub const POSITIVE: [u8; 3] = [0, 255, 0];
pub const NEGATIVE: [u8; 3] = [255, 0, 0];
pub const BOX: [u8; 3] = [0, 128, 255];
pub const BOUNDARY: [u8; 3] = [255, 255, 0];
pub const DISC_RADIUS: i64 = 3;

/// Scene with the output mask outline, prompt boxes and prompt points drawn
/// on top, in that order.
pub fn draw_overlay(image: &ImageRaster, prompts: &[Prompt], mask: &BinaryMask) -> RgbImage {
    let (w, h) = (image.width(), image.height());
    let mut canvas = RgbImage::from_fn(w, h, |x, y| Rgb(image.get(x, y)));

    if mask.dims() == (w, h) {
        for p in mask.ones() {
            let (x, y) = (p.x as i64, p.y as i64);
            let edge = [(0, -1), (1, 0), (0, 1), (-1, 0)]
                .iter()
                .any(|(dx, dy)| !mask.get_signed(x + dx, y + dy));
            if edge {
                canvas.put_pixel(p.x, p.y, Rgb(BOUNDARY));
            }
        }
    }
    for prompt in prompts {
        if let Some(b) = prompt.bbox {
            draw_box(&mut canvas, b);
        }
    }
    for prompt in prompts {
        for &p in &prompt.positive_points {
            draw_disc(&mut canvas, p, POSITIVE);
        }
        for &p in &prompt.negative_points {
            draw_disc(&mut canvas, p, NEGATIVE);
        }
    }
    canvas
}

/// One-pixel outline; the right and bottom edges sit on `x_max - 1` and
/// `y_max - 1`.
fn draw_box(canvas: &mut RgbImage, b: BoundingBox) {
    let (w, h) = canvas.dimensions();
    let (x1, y1) = (b.x_max.min(w) - 1, b.y_max.min(h) - 1);
    for x in b.x_min..=x1 {
        canvas.put_pixel(x, b.y_min, Rgb(BOX));
        canvas.put_pixel(x, y1, Rgb(BOX));
    }
    for y in b.y_min..=y1 {
        canvas.put_pixel(b.x_min, y, Rgb(BOX));
        canvas.put_pixel(x1, y, Rgb(BOX));
    }
}

fn draw_disc(canvas: &mut RgbImage, c: Point, rgb: [u8; 3]) {
    let (w, h) = canvas.dimensions();
    for dy in -DISC_RADIUS..=DISC_RADIUS {
        for dx in -DISC_RADIUS..=DISC_RADIUS {
            if dx * dx + dy * dy > DISC_RADIUS * DISC_RADIUS {
                continue;
            }
            let (x, y) = (c.x as i64 + dx, c.y as i64 + dy);
            if x >= 0 && y >= 0 && x < w as i64 && y < h as i64 {
                canvas.put_pixel(x as u32, y as u32, Rgb(rgb));
            }
        }
    }
}

/// Writes `out_dir/overlays/{image_id}_{strategy}.png`.
pub fn render_overlay(
    image: &ImageRaster,
    prompts: &[Prompt],
    mask: &BinaryMask,
    out_dir: &Path,
    image_id: &str,
    strategy: &str,
) -> Result<PathBuf, RunError> {
    let dir = out_dir.join("overlays");
    std::fs::create_dir_all(&dir).map_err(|e| RunError::io(&dir, e))?;
    let path = dir.join(format!("{image_id}_{strategy}.png"));
    draw_overlay(image, prompts, mask)
        .save(&path)
        .map_err(|e| RunError::io(&path, std::io::Error::other(e)))?;
    Ok(path)
}
