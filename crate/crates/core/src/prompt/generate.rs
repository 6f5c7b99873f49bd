use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{NegativeMode, Prompt, PromptError, StrategyKind, StrategySpec};
use crate::raster::{
    bounding_box, centroid, representative_point, skeletonize, BinaryMask, InstanceMask, Point,
};

const RANDOM_STREAM: u64 = 0x52414e44;
const NEGATIVE_STREAM: u64 = 0x4e454741;

/// A prompt plus the fallback taken while building it, if any.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratedPrompt {
    pub prompt: Prompt,
    /// Set when negatives were requested but could not be placed; the prompt
    /// then carries no negatives.
    pub fallback: Option<PromptError>,
}

/// The representative point as the sole positive point.
pub fn gen_single_point(inst: &InstanceMask) -> Prompt {
    Prompt::points(vec![representative_point(inst)])
}

/// Up to `k` distinct instance pixels drawn uniformly without replacement.
pub fn gen_random_points(inst: &InstanceMask, k: usize, seed: u64) -> Prompt {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let amount = k.min(inst.len());
    let points = index::sample(&mut rng, inst.len(), amount)
        .into_iter()
        .map(|i| inst.pixels()[i])
        .collect();
    Prompt::points(points)
}

/// Centroid first, then farthest-point sampling over the skeleton.
///
/// Each further point is the skeleton pixel whose nearest already-chosen
/// point is farthest away; ties go to the smallest (row, col). A skeleton
/// with no unchosen pixel left (a solid square thins to its centre) hands
/// over to the same sampling over the whole instance, so fewer than `k`
/// points come back only when the instance itself runs out.
pub fn gen_skeleton_points(inst: &InstanceMask, k: usize) -> Prompt {
    let mut chosen = vec![centroid(inst)];
    if k > 1 {
        farthest_points(&skeletonize(inst), &mut chosen, k);
        farthest_points(inst.pixels(), &mut chosen, k);
    }
    Prompt::points(chosen)
}

fn farthest_points(candidates: &[Point], chosen: &mut Vec<Point>, k: usize) {
    let mut nearest: Vec<u64> = candidates
        .iter()
        .map(|p| {
            chosen
                .iter()
                .map(|c| p.dist_sq(c))
                .min()
                .unwrap_or(u64::MAX)
        })
        .collect();
    while chosen.len() < k {
        let mut best: Option<usize> = None;
        for (i, &d) in nearest.iter().enumerate() {
            if d > 0 && best.is_none_or(|b| d > nearest[b]) {
                best = Some(i);
            }
        }
        let Some(b) = best else { break };
        let pick = candidates[b];
        chosen.push(pick);
        for (d, p) in nearest.iter_mut().zip(candidates) {
            *d = (*d).min(p.dist_sq(&pick));
        }
    }
}

/// The tight box and nothing else.
pub fn gen_bbox(inst: &InstanceMask) -> Prompt {
    Prompt::boxed(bounding_box(inst))
}

/// `n` distinct negative points sampled without replacement.
///
/// `Background` draws from pixels off `scene_mask`; `InsideBox` from the
/// instance's box minus the instance. Instance pixels are never returned.
/// Fewer than `n` candidates yields all of them.
pub fn gen_negative_points(
    inst: &InstanceMask,
    scene_mask: &BinaryMask,
    mode: NegativeMode,
    n: usize,
    seed: u64,
) -> Result<Vec<Point>, PromptError> {
    let bbox = inst.bbox();
    if bbox.x_max > scene_mask.width() || bbox.y_max > scene_mask.height() {
        return Err(PromptError::SceneTooSmall {
            scene: scene_mask.dims(),
            needed: (bbox.x_max, bbox.y_max),
        });
    }
    let candidates: Vec<Point> = match mode {
        NegativeMode::Background => scene_mask
            .bits()
            .iter()
            .enumerate()
            .filter(|(_, &b)| !b)
            .map(|(i, _)| {
                let w = scene_mask.width() as usize;
                Point::new((i % w) as u32, (i / w) as u32)
            })
            .filter(|p| !inst.contains(*p))
            .collect(),
        NegativeMode::InsideBox => bbox.points().filter(|p| !inst.contains(*p)).collect(),
    };
    if candidates.is_empty() {
        return Err(PromptError::EmptyCandidateRegion { mode });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let amount = n.min(candidates.len());
    Ok(index::sample(&mut rng, candidates.len(), amount)
        .into_iter()
        .map(|i| candidates[i])
        .collect())
}

/// Builds the prompt for one instance under `spec`.
///
/// Sampling is seeded per instance from `spec.seed`, `image_id` and the
/// instance id, so results do not depend on processing order.
pub fn generate(
    inst: &InstanceMask,
    scene_mask: &BinaryMask,
    spec: &StrategySpec,
    image_id: &str,
) -> GeneratedPrompt {
    let seed = instance_seed(spec.seed, image_id, inst.id());
    let random = || gen_random_points(inst, spec.k_points, mix(seed ^ RANDOM_STREAM));

    let prompt = match spec.kind {
        StrategyKind::SinglePoint | StrategyKind::SinglePointPlusNegative => gen_single_point(inst),
        StrategyKind::SkeletonMultiPoint => gen_skeleton_points(inst, spec.k_points),
        StrategyKind::RandomMultiPoint | StrategyKind::RandomMultiPlusNegative => random(),
        StrategyKind::RandomMultiPlusSingle => random().merge(gen_single_point(inst)),
        StrategyKind::BBox => gen_bbox(inst),
        StrategyKind::BBoxPlusSingle => gen_bbox(inst).merge(gen_single_point(inst)),
        StrategyKind::BBoxPlusMulti => gen_bbox(inst).merge(random()),
    };

    if !spec.kind.uses_negatives() || spec.n_negative == 0 {
        return GeneratedPrompt {
            prompt,
            fallback: None,
        };
    }
    match gen_negative_points(
        inst,
        scene_mask,
        spec.effective_negative_mode(),
        spec.n_negative,
        mix(seed ^ NEGATIVE_STREAM),
    ) {
        Ok(negatives) => GeneratedPrompt {
            prompt: Prompt {
                negative_points: negatives,
                ..prompt
            },
            fallback: None,
        },
        Err(e) => GeneratedPrompt {
            prompt,
            fallback: Some(e),
        },
    }
}

/// Stable per-instance seed: FNV-1a over the image id, folded with the base
/// seed and instance id through splitmix64.
pub fn instance_seed(base: u64, image_id: &str, instance_id: u32) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for b in image_id.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    mix(mix(base ^ h) ^ instance_id as u64)
}

fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}
