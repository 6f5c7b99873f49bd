//! Dataset layout: `root/{images,gt,pred}/<stem>.png`.
//!
//! Images are read as 8-bit RGB, masks as 8-bit grayscale binarized at
//! > 127. Scenes pair up by file stem and come back in lexicographic order.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::RunError;
use crate::raster::{BinaryMask, ImageRaster};

/// One scene: the RGB tile, its ground truth and the CNN prediction.
#[derive(Debug, Clone, PartialEq)]
pub struct SceneRecord {
    pub image_id: String,
    pub image: ImageRaster,
    /// `None` when ingested without ground truth.
    pub gt_mask: Option<BinaryMask>,
    pub pred_mask: BinaryMask,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IngestMode {
    /// images, gt and pred all required.
    Evaluate,
    /// gt is neither required nor read.
    PromptOnly,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestWarning {
    pub image_id: String,
    pub reason: String,
}

#[derive(Debug, Clone)]
pub struct Dataset {
    pub scenes: Vec<SceneRecord>,
    pub warnings: Vec<IngestWarning>,
}

const SUBDIRS: [&str; 3] = ["images", "gt", "pred"];

fn stems(dir: &Path) -> Result<BTreeSet<String>, RunError> {
    let mut out = BTreeSet::new();
    if !dir.is_dir() {
        return Ok(out);
    }
    let entries = std::fs::read_dir(dir).map_err(|e| RunError::io(dir, e))?;
    for entry in entries {
        let path = entry.map_err(|e| RunError::io(dir, e))?.path();
        let is_png = path
            .extension()
            .and_then(|e| e.to_str())
            .is_some_and(|e| e.eq_ignore_ascii_case("png"));
        if is_png {
            if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
                out.insert(stem.to_string());
            }
        }
    }
    Ok(out)
}

fn scene_path(root: &Path, sub: &str, stem: &str) -> PathBuf {
    root.join(sub).join(format!("{stem}.png"))
}

pub fn load_image(path: &Path) -> Result<ImageRaster, String> {
    let img = image::open(path)
        .map_err(|e| format!("{}: {e}", path.display()))?
        .to_rgb8();
    let (w, h) = img.dimensions();
    ImageRaster::new(w, h, img.pixels().map(|p| p.0).collect())
        .map_err(|e| format!("{}: {e}", path.display()))
}

pub fn load_mask(path: &Path) -> Result<BinaryMask, String> {
    let img = image::open(path)
        .map_err(|e| format!("{}: {e}", path.display()))?
        .to_luma8();
    let (w, h) = img.dimensions();
    BinaryMask::new(w, h, img.pixels().map(|p| p.0[0] > 127).collect())
        .map_err(|e| format!("{}: {e}", path.display()))
}

/// Reads every complete scene under `root`.
///
/// Incomplete or unreadable scenes, and scenes whose rasters disagree in
/// size, are skipped with a warning. No usable scene at all is an error.
pub fn ingest(root: &Path, mode: IngestMode) -> Result<Dataset, RunError> {
    if !root.is_dir() {
        return Err(RunError::io(
            root,
            std::io::Error::new(std::io::ErrorKind::NotFound, "data root is not a directory"),
        ));
    }
    let required: &[&str] = match mode {
        IngestMode::Evaluate => &SUBDIRS,
        IngestMode::PromptOnly => &["images", "pred"],
    };
    let per_dir: Vec<BTreeSet<String>> = required
        .iter()
        .map(|sub| stems(&root.join(sub)))
        .collect::<Result<_, _>>()?;
    let all: BTreeSet<&String> = per_dir.iter().flatten().collect();

    let mut scenes = Vec::new();
    let mut warnings = Vec::new();
    for stem in all {
        let missing: Vec<&str> = required
            .iter()
            .zip(&per_dir)
            .filter(|(_, set)| !set.contains(stem))
            .map(|(sub, _)| *sub)
            .collect();
        if !missing.is_empty() {
            warnings.push(IngestWarning {
                image_id: stem.clone(),
                reason: format!("missing {}", missing.join(", ")),
            });
            continue;
        }
        match load_scene(root, stem, mode) {
            Ok(scene) => scenes.push(scene),
            Err(reason) => warnings.push(IngestWarning {
                image_id: stem.clone(),
                reason,
            }),
        }
    }
    for w in &warnings {
        log::warn!("skipping scene {}: {}", w.image_id, w.reason);
    }
    if scenes.is_empty() {
        return Err(RunError::EmptyDataset(root.to_path_buf()));
    }
    Ok(Dataset { scenes, warnings })
}

fn load_scene(root: &Path, stem: &str, mode: IngestMode) -> Result<SceneRecord, String> {
    let image = load_image(&scene_path(root, "images", stem))?;
    let pred_mask = load_mask(&scene_path(root, "pred", stem))?;
    let dims = (image.width(), image.height());
    if pred_mask.dims() != dims {
        return Err(format!(
            "dimension mismatch: image {:?} vs pred {:?}",
            dims,
            pred_mask.dims()
        ));
    }
    let gt_mask = match mode {
        IngestMode::Evaluate => {
            let gt = load_mask(&scene_path(root, "gt", stem))?;
            if gt.dims() != dims {
                return Err(format!(
                    "dimension mismatch: image {:?} vs gt {:?}",
                    dims,
                    gt.dims()
                ));
            }
            Some(gt)
        }
        IngestMode::PromptOnly => None,
    };
    Ok(SceneRecord {
        image_id: stem.to_string(),
        image,
        gt_mask,
        pred_mask,
    })
}
