use super::{validate_request, Segmenter, SegmenterError, SegmenterRequest, SegmenterResponse};
use crate::prompt::Prompt;
use crate::raster::{BinaryMask, InstanceMask};

/// Resolves a prompt to one of a fixed set of reference instances.
///
/// Built over ground-truth instances it is a perfect segmenter; built over
/// the predicted instances it hands the CNN's own mask back (pass-through).
///
/// Resolution: the instance containing the first positive point; failing
/// that, the instance with the largest pixel overlap with the box (ties to
/// the lower id); failing that, an empty mask. A resolved instance that
/// contains any negative point yields an empty mask.
#[derive(Debug, Clone)]
pub struct OracleSegmenter {
    instances: Vec<InstanceMask>,
    name: String,
}

impl OracleSegmenter {
    pub fn new(instances: Vec<InstanceMask>) -> Self {
        Self::named(instances, "oracle")
    }

    pub fn named(instances: Vec<InstanceMask>, name: impl Into<String>) -> Self {
        OracleSegmenter {
            instances,
            name: name.into(),
        }
    }

    pub fn instances(&self) -> &[InstanceMask] {
        &self.instances
    }

    pub fn resolve(&self, prompt: &Prompt) -> Option<&InstanceMask> {
        let by_point = prompt
            .positive_points
            .first()
            .and_then(|p| self.instances.iter().find(|i| i.contains(*p)));
        let resolved = by_point.or_else(|| {
            let bbox = prompt.bbox?;
            let mut best: Option<(&InstanceMask, usize)> = None;
            for inst in &self.instances {
                let overlap = inst.pixels().iter().filter(|p| bbox.contains(**p)).count();
                let better = best.is_none_or(|(b_inst, b)| {
                    overlap > b || (overlap == b && inst.id() < b_inst.id())
                });
                if overlap > 0 && better {
                    best = Some((inst, overlap));
                }
            }
            best.map(|(i, _)| i)
        })?;
        if prompt.negative_points.iter().any(|p| resolved.contains(*p)) {
            return None;
        }
        Some(resolved)
    }
}

impl Segmenter for OracleSegmenter {
    fn segment(&self, req: &SegmenterRequest<'_>) -> Result<SegmenterResponse, SegmenterError> {
        validate_request(req)?;
        let (w, h) = (req.image.width(), req.image.height());
        let mask = match self.resolve(req.prompt) {
            Some(inst) => inst.to_mask(w, h).map_err(|e| {
                SegmenterError::InvalidRequest(format!(
                    "reference instance does not fit image: {e}"
                ))
            })?,
            None => BinaryMask::empty(w, h).expect("image dims are non-zero"),
        };
        Ok(SegmenterResponse { mask, score: 1.0 })
    }

    fn name(&self) -> &str {
        &self.name
    }
}

/// Oracle resolution followed by dilation with a Euclidean disc.
///
/// Radius 0 is the oracle itself; larger radii over-segment in a controlled
/// way.
#[derive(Debug, Clone)]
pub struct DilatingSegmenter {
    oracle: OracleSegmenter,
    radius: u32,
}

impl DilatingSegmenter {
    pub fn new(instances: Vec<InstanceMask>, radius: u32) -> Self {
        DilatingSegmenter {
            oracle: OracleSegmenter::named(instances, "dilating_mock"),
            radius,
        }
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }
}

impl Segmenter for DilatingSegmenter {
    fn segment(&self, req: &SegmenterRequest<'_>) -> Result<SegmenterResponse, SegmenterError> {
        let resp = self.oracle.segment(req)?;
        Ok(SegmenterResponse {
            mask: dilate(&resp.mask, self.radius),
            score: resp.score,
        })
    }

    fn name(&self) -> &str {
        "dilating_mock"
    }
}

/// Binary dilation by the disc `dx² + dy² <= radius²`, clipped to the raster.
pub fn dilate(mask: &BinaryMask, radius: u32) -> BinaryMask {
    if radius == 0 {
        return mask.clone();
    }
    let r = radius as i64;
    let offsets: Vec<(i64, i64)> = (-r..=r)
        .flat_map(|dy| (-r..=r).map(move |dx| (dx, dy)))
        .filter(|(dx, dy)| dx * dx + dy * dy <= r * r)
        .collect();
    let (w, h) = mask.dims();
    let mut out = BinaryMask::empty(w, h).expect("non-zero dims");
    for p in mask.ones() {
        for (dx, dy) in &offsets {
            let (x, y) = (p.x as i64 + dx, p.y as i64 + dy);
            if x >= 0 && y >= 0 && x < w as i64 && y < h as i64 {
                out.set(x as u32, y as u32, true);
            }
        }
    }
    out
}
