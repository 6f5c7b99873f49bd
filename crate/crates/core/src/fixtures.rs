//! Synthetic building scenes for tests, benchmarks and demos.
//!
//! Each scene is a grid of cells; a cell holds at most one rectilinear
//! building (rectangle, L or U) inset by a margin, so neighbouring buildings
//! are at least `2 * MARGIN` pixels apart.

use std::path::Path;

use image::{GrayImage, Luma, Rgb, RgbImage};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::raster::{BinaryMask, BoundingBox, ImageRaster};
use crate::runner::SceneRecord;

pub const CELL: u32 = 32;
pub const MARGIN: u32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    Rect,
    L,
    U,
}

#[derive(Debug, Clone, Copy)]
pub struct FixtureOptions {
    pub count: usize,
    /// Cells per side; the scene is `grid * CELL` pixels square.
    pub grid: u32,
    pub seed: u64,
    /// When set, each prediction misses one building and gains one spurious
    /// blob, like an imperfect CNN. Otherwise the prediction equals the
    /// ground truth.
    pub degrade: bool,
}

impl Default for FixtureOptions {
    fn default() -> Self {
        FixtureOptions {
            count: 24,
            grid: 3,
            seed: 7,
            degrade: false,
        }
    }
}

/// Pixels of a building of `shape` inside a `w` x `h` box at (x0, y0).
pub fn shape_pixels(shape: Shape, x0: u32, y0: u32, w: u32, h: u32, arm: u32) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    for dy in 0..h {
        for dx in 0..w {
            let keep = match shape {
                Shape::Rect => true,
                // notch in the top-right corner
                Shape::L => dx < arm || dy >= h - arm,
                // notch in the middle of the top edge
                Shape::U => dx < arm || dx >= w - arm || dy >= h - arm,
            };
            if keep {
                out.push((x0 + dx, y0 + dy));
            }
        }
    }
    out
}

fn random_building(rng: &mut ChaCha8Rng, cx: u32, cy: u32) -> (Shape, Vec<(u32, u32)>) {
    let room = CELL - 2 * MARGIN;
    let shape = match rng.random_range(0..3) {
        0 => Shape::Rect,
        1 => Shape::L,
        _ => Shape::U,
    };
    let (min_w, min_h) = match shape {
        Shape::Rect => (10, 10),
        Shape::L => (12, 12),
        Shape::U => (14, 12),
    };
    let w = rng.random_range(min_w..=room);
    let h = rng.random_range(min_h..=room);
    let arm = match shape {
        Shape::Rect => 0,
        Shape::L => rng.random_range(4..=(w.min(h) - 4).min(8)),
        Shape::U => rng.random_range(4..=((w - 4) / 2).min(8)),
    };
    let x0 = cx * CELL + MARGIN + rng.random_range(0..=room - w);
    let y0 = cy * CELL + MARGIN + rng.random_range(0..=room - h);
    (shape, shape_pixels(shape, x0, y0, w, h, arm))
}

/// Deterministic synthetic scenes named `scene_000`, `scene_001`, ...
///
/// `opts.grid` must be at least 2.
pub fn synthetic_scenes(opts: &FixtureOptions) -> Vec<SceneRecord> {
    assert!(opts.grid >= 2, "fixture grid needs at least 2x2 cells");
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let size = opts.grid * CELL;
    (0..opts.count)
        .map(|i| {
            let cells: Vec<(u32, u32)> = (0..opts.grid)
                .flat_map(|y| (0..opts.grid).map(move |x| (x, y)))
                .collect();
            // every scene gets at least two buildings and one empty cell
            let mut occupied: Vec<bool> = cells.iter().map(|_| rng.random_bool(0.7)).collect();
            occupied[0] = true;
            occupied[cells.len() - 1] = true;
            occupied[cells.len() / 2 - 1] = false;
            let buildings: Vec<(Shape, Vec<(u32, u32)>)> = cells
                .iter()
                .zip(&occupied)
                .filter(|(_, &o)| o)
                .map(|(&(cx, cy), _)| random_building(&mut rng, cx, cy))
                .collect();

            let mut gt = BinaryMask::empty(size, size).expect("non-zero grid");
            for (_, px) in &buildings {
                for &(x, y) in px {
                    gt.set(x, y, true);
                }
            }
            let mut pred = gt.clone();
            if opts.degrade {
                let dropped = rng.random_range(0..buildings.len());
                for &(x, y) in &buildings[dropped].1 {
                    pred.set(x, y, false);
                }
                let free: Vec<(u32, u32)> = cells
                    .iter()
                    .zip(&occupied)
                    .filter(|(_, &o)| !o)
                    .map(|(c, _)| *c)
                    .collect();
                let (cx, cy) = free[rng.random_range(0..free.len())];
                let blob = BoundingBox::new(
                    cx * CELL + 14,
                    cy * CELL + 14,
                    cx * CELL + 18,
                    cy * CELL + 18,
                );
                for p in blob.points() {
                    pred.set(p.x, p.y, true);
                }
            }
            let image = render_scene(&gt, &mut rng);
            SceneRecord {
                image_id: format!("scene_{i:03}"),
                image,
                gt_mask: Some(gt),
                pred_mask: pred,
            }
        })
        .collect()
}

fn render_scene(gt: &BinaryMask, rng: &mut ChaCha8Rng) -> ImageRaster {
    let roof: [u8; 3] = [
        rng.random_range(150..220),
        rng.random_range(60..120),
        rng.random_range(40..90),
    ];
    let pixels = gt
        .bits()
        .iter()
        .map(|&b| {
            let n: i16 = rng.random_range(-12..=12);
            let base = if b { roof } else { [70, 110, 60] };
            base.map(|c| (c as i16 + n).clamp(0, 255) as u8)
        })
        .collect();
    ImageRaster::new(gt.width(), gt.height(), pixels).expect("dims from mask")
}

/// Writes scenes in the `images/`, `gt/`, `pred/` layout.
pub fn write_dataset(scenes: &[SceneRecord], root: &Path) -> std::io::Result<()> {
    for sub in ["images", "gt", "pred"] {
        std::fs::create_dir_all(root.join(sub))?;
    }
    for s in scenes {
        let (w, h) = (s.image.width(), s.image.height());
        let img = RgbImage::from_fn(w, h, |x, y| Rgb(s.image.get(x, y)));
        img.save(root.join("images").join(format!("{}.png", s.image_id)))
            .map_err(std::io::Error::other)?;
        if let Some(gt) = &s.gt_mask {
            mask_image(gt)
                .save(root.join("gt").join(format!("{}.png", s.image_id)))
                .map_err(std::io::Error::other)?;
        }
        mask_image(&s.pred_mask)
            .save(root.join("pred").join(format!("{}.png", s.image_id)))
            .map_err(std::io::Error::other)?;
    }
    Ok(())
}

fn mask_image(mask: &BinaryMask) -> GrayImage {
    GrayImage::from_fn(mask.width(), mask.height(), |x, y| {
        Luma([if mask.get(x, y) { 255 } else { 0 }])
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::label_components;

    #[test]
    fn shapes_are_connected_and_shaped() {
        let l = shape_pixels(Shape::L, 0, 0, 6, 6, 2);
        assert_eq!(l.len(), 6 * 6 - 4 * 4);
        let u = shape_pixels(Shape::U, 0, 0, 8, 6, 2);
        assert_eq!(u.len(), 8 * 6 - 4 * 4);
    }

    #[test]
    fn scenes_are_deterministic_and_separated() {
        let opts = FixtureOptions::default();
        let a = synthetic_scenes(&opts);
        assert_eq!(a, synthetic_scenes(&opts));
        for s in &a {
            let gt = s.gt_mask.as_ref().unwrap();
            let n = label_components(gt).len();
            assert!(n >= 2, "{} has {n} buildings", s.image_id);
            assert_eq!(s.pred_mask, *gt);
        }
    }

    #[test]
    fn degraded_predictions_differ() {
        let scenes = synthetic_scenes(&FixtureOptions {
            degrade: true,
            ..Default::default()
        });
        for s in &scenes {
            let gt_n = label_components(s.gt_mask.as_ref().unwrap()).len();
            let pred_n = label_components(&s.pred_mask).len();
            // one building dropped, one blob added
            assert_eq!(gt_n, pred_n);
            assert_ne!(s.pred_mask, *s.gt_mask.as_ref().unwrap());
        }
    }
}
