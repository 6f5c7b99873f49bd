use std::path::Path;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::BackendKind;
use super::ingest::{ingest, IngestMode, IngestWarning, SceneRecord};
use super::overlay::render_overlay;
use super::{ExperimentConfig, RunError};
use crate::metrics::{
    aggregate, merge_instance_outputs, ImageEvaluation, MetricsError, MetricsReport,
};
use crate::prompt::{generate, Prompt, StrategyKind, StrategySpec};
use crate::raster::{label_components, BinaryMask, InstanceMask};
use crate::segmenter::{
    DilatingSegmenter, OracleSegmenter, RemoteSegmenter, Segmenter, SegmenterError,
    SegmenterRequest,
};

/// Where masks come from for each scene.
#[derive(Clone)]
pub enum Backend {
    Oracle,
    Dilating(u32),
    PassThrough,
    /// One segmenter shared by every scene.
    Shared(Arc<dyn Segmenter>),
}

impl Backend {
    /// Builds the backend named in `cfg`. A remote backend must answer its
    /// health check.
    pub fn from_config(cfg: &ExperimentConfig) -> Result<Self, RunError> {
        Ok(match cfg.segmenter_backend {
            BackendKind::Oracle => Backend::Oracle,
            BackendKind::DilatingMock => Backend::Dilating(cfg.dilate_radius),
            BackendKind::PassThrough => Backend::PassThrough,
            BackendKind::Remote => {
                let remote_cfg = cfg
                    .remote_config()
                    .ok_or_else(|| RunError::Config("remote backend needs an endpoint".into()))?;
                let remote = RemoteSegmenter::new(remote_cfg);
                let health = remote.health().map_err(|e| match e {
                    SegmenterError::BackendUnavailable(m) => RunError::BackendUnavailable(m),
                    other => RunError::BackendUnavailable(other.to_string()),
                })?;
                log::info!("remote backend up: model {}", health.model);
                Backend::Shared(Arc::new(remote))
            }
        })
    }

    /// The segmenter for one scene with the given labelled instances.
    pub fn for_scene(&self, gt: &[InstanceMask], pred: &[InstanceMask]) -> Box<dyn Segmenter> {
        match self {
            Backend::Oracle => Box::new(OracleSegmenter::new(gt.to_vec())),
            Backend::Dilating(r) => Box::new(DilatingSegmenter::new(gt.to_vec(), *r)),
            Backend::PassThrough => Box::new(OracleSegmenter::named(pred.to_vec(), "pass_through")),
            Backend::Shared(seg) => Box::new(seg.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkipRecord {
    pub image_id: String,
    pub experiment: String,
    pub reason: String,
    pub backend_unavailable: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FallbackRecord {
    pub image_id: String,
    pub experiment: String,
    pub instance_id: u32,
    pub reason: String,
}

/// One report row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRow {
    pub label: String,
    /// `None` for the baseline row.
    pub spec: Option<StrategySpec>,
    /// `None` when every scene was skipped.
    pub report: Option<MetricsReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentOutcome {
    /// Strategy rows in report order, then the baseline row.
    pub rows: Vec<ExperimentRow>,
    pub skips: Vec<SkipRecord>,
    pub fallbacks: Vec<FallbackRecord>,
    pub ingest_warnings: Vec<IngestWarning>,
    pub scenes: usize,
}

impl ExperimentOutcome {
    pub fn row(&self, label: &str) -> Option<&ExperimentRow> {
        self.rows.iter().find(|r| r.label == label)
    }
}

/// Prompts for every predicted instance of a scene. Never reads ground truth.
pub fn scene_prompts(
    scene: &SceneRecord,
    spec: &StrategySpec,
) -> Vec<(u32, Prompt, Option<String>)> {
    label_components(&scene.pred_mask)
        .iter()
        .map(|inst| {
            let g = generate(inst, &scene.pred_mask, spec, &scene.image_id);
            (inst.id(), g.prompt, g.fallback.map(|e| e.to_string()))
        })
        .collect()
}

struct SceneOutcome {
    baseline: Result<ImageEvaluation, SkipRecord>,
    strategies: Vec<Result<ImageEvaluation, SkipRecord>>,
    fallbacks: Vec<FallbackRecord>,
}

/// Ingests `cfg.data_root` and runs the full grid.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutcome, RunError> {
    cfg.validate()?;
    let dataset = ingest(&cfg.data_root, IngestMode::Evaluate)?;
    let backend = Backend::from_config(cfg)?;
    let mut outcome = run_on_scenes(cfg, &dataset.scenes, &backend)?;
    outcome.ingest_warnings = dataset.warnings;
    Ok(outcome)
}

/// Runs every configured strategy over in-memory scenes.
///
/// Scenes are processed in parallel on `cfg.parallelism` workers; results
/// are folded in scene order, so the outcome does not depend on the worker
/// count.
pub fn run_on_scenes(
    cfg: &ExperimentConfig,
    scenes: &[SceneRecord],
    backend: &Backend,
) -> Result<ExperimentOutcome, RunError> {
    cfg.validate()?;
    if scenes.is_empty() {
        return Err(RunError::EmptyDataset(cfg.data_root.clone()));
    }
    let mut specs = cfg.strategy_specs()?;
    // report order follows the strategy table; equal kinds keep config order
    specs.sort_by_key(|s| StrategyKind::ALL.iter().position(|k| *k == s.kind));
    let overlay_dir = cfg.emit_overlays.then_some(cfg.out_dir.as_path());

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.parallelism)
        .build()
        .map_err(|e| RunError::Config(format!("thread pool: {e}")))?;
    let per_scene: Vec<SceneOutcome> = pool.install(|| {
        scenes
            .par_iter()
            .map(|scene| process_scene(scene, &specs, backend, cfg, overlay_dir))
            .collect()
    });

    let mut skips = Vec::new();
    let mut fallbacks = Vec::new();
    let mut per_strategy: Vec<Vec<ImageEvaluation>> = vec![Vec::new(); specs.len()];
    let mut baseline = Vec::new();
    for scene in per_scene {
        fallbacks.extend(scene.fallbacks);
        match scene.baseline {
            Ok(e) => baseline.push(e),
            Err(s) => skips.push(s),
        }
        for (bucket, result) in per_strategy.iter_mut().zip(scene.strategies) {
            match result {
                Ok(e) => bucket.push(e),
                Err(s) => skips.push(s),
            }
        }
    }

    let mut rows: Vec<ExperimentRow> = specs
        .iter()
        .zip(per_strategy)
        .map(|(spec, evals)| ExperimentRow {
            label: spec.label().to_string(),
            spec: Some(*spec),
            report: aggregate(&evals).ok(),
        })
        .collect();
    rows.push(ExperimentRow {
        label: cfg.baseline_label.clone(),
        spec: None,
        report: aggregate(&baseline).ok(),
    });

    let strategy_skips: Vec<&SkipRecord> = skips
        .iter()
        .filter(|s| s.experiment != cfg.baseline_label)
        .collect();
    if !strategy_skips.is_empty()
        && strategy_skips.len() == specs.len() * scenes.len()
        && strategy_skips.iter().all(|s| s.backend_unavailable)
    {
        return Err(RunError::BackendUnavailable(
            strategy_skips[0].reason.clone(),
        ));
    }

    Ok(ExperimentOutcome {
        rows,
        skips,
        fallbacks,
        ingest_warnings: Vec::new(),
        scenes: scenes.len(),
    })
}

fn process_scene(
    scene: &SceneRecord,
    specs: &[StrategySpec],
    backend: &Backend,
    cfg: &ExperimentConfig,
    overlay_dir: Option<&Path>,
) -> SceneOutcome {
    let skip = |experiment: &str, reason: String, backend_unavailable: bool| SkipRecord {
        image_id: scene.image_id.clone(),
        experiment: experiment.to_string(),
        reason,
        backend_unavailable,
    };
    let Some(gt_mask) = scene.gt_mask.as_ref() else {
        let reason = "no ground truth".to_string();
        return SceneOutcome {
            baseline: Err(skip(&cfg.baseline_label, reason.clone(), false)),
            strategies: specs
                .iter()
                .map(|s| Err(skip(s.label(), reason.clone(), false)))
                .collect(),
            fallbacks: Vec::new(),
        };
    };
    let gt = label_components(gt_mask);
    let pred = label_components(&scene.pred_mask);
    let threshold = cfg.match_threshold;

    let baseline = ImageEvaluation::evaluate(
        &scene.image_id,
        &scene.pred_mask,
        gt_mask,
        &pred,
        &gt,
        threshold,
    )
    .map_err(|e| skip(&cfg.baseline_label, e.to_string(), false));

    let segmenter = backend.for_scene(&gt, &pred);
    let mut fallbacks = Vec::new();
    let strategies = specs
        .iter()
        .map(|spec| {
            let run = segment_scene(scene, &pred, &gt, spec, segmenter.as_ref(), threshold)
                .map_err(|e| {
                    let unavailable = matches!(
                        e,
                        SceneError::Segmenter(_, SegmenterError::BackendUnavailable(_))
                    );
                    skip(spec.label(), e.to_string(), unavailable)
                })?;
            fallbacks.extend(run.fallbacks);
            if let Some(dir) = overlay_dir {
                if let Err(e) = render_overlay(
                    &scene.image,
                    &run.prompts,
                    &run.merged,
                    dir,
                    &scene.image_id,
                    spec.kind.slug(),
                ) {
                    log::warn!("overlay for {} / {}: {e}", scene.image_id, spec.kind.slug());
                }
            }
            Ok(run.evaluation)
        })
        .collect();

    SceneOutcome {
        baseline,
        strategies,
        fallbacks,
    }
}

/// Prompts, merged output and score for one strategy on one scene.
#[derive(Debug, Clone)]
pub struct SceneRun {
    pub prompts: Vec<Prompt>,
    pub merged: BinaryMask,
    pub evaluation: ImageEvaluation,
    pub fallbacks: Vec<FallbackRecord>,
}

#[derive(Debug, thiserror::Error)]
pub enum SceneError {
    #[error("instance {0}: {1}")]
    Segmenter(u32, #[source] SegmenterError),
    #[error("segmenter returned {got:?} mask for {expected:?} scene")]
    MaskSize {
        got: (u32, u32),
        expected: (u32, u32),
    },
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

/// Prompts every predicted instance, segments each prompt, OR-merges the
/// outputs and scores the merge against `gt`.
pub fn segment_scene(
    scene: &SceneRecord,
    pred: &[InstanceMask],
    gt: &[InstanceMask],
    spec: &StrategySpec,
    segmenter: &dyn Segmenter,
    threshold: f64,
) -> Result<SceneRun, SceneError> {
    let dims = (scene.image.width(), scene.image.height());
    let mut prompts = Vec::with_capacity(pred.len());
    let mut outputs = Vec::with_capacity(pred.len());
    let mut fallbacks = Vec::new();
    for inst in pred {
        let g = generate(inst, &scene.pred_mask, spec, &scene.image_id);
        if let Some(e) = g.fallback {
            fallbacks.push(FallbackRecord {
                image_id: scene.image_id.clone(),
                experiment: spec.label().to_string(),
                instance_id: inst.id(),
                reason: e.to_string(),
            });
        }
        let resp = segmenter
            .segment(&SegmenterRequest {
                image: &scene.image,
                prompt: &g.prompt,
                image_id: &scene.image_id,
            })
            .map_err(|e| SceneError::Segmenter(inst.id(), e))?;
        if resp.mask.dims() != dims {
            return Err(SceneError::MaskSize {
                got: resp.mask.dims(),
                expected: dims,
            });
        }
        prompts.push(g.prompt);
        outputs.push(resp.mask);
    }
    let merged = merge_instance_outputs(dims.0, dims.1, &outputs)?;
    let out_instances = label_components(&merged);
    let empty;
    let gt_mask = match scene.gt_mask.as_ref() {
        Some(m) => m,
        None => {
            empty = BinaryMask::empty(dims.0, dims.1).expect("non-zero dims");
            &empty
        }
    };
    let evaluation = ImageEvaluation::evaluate(
        &scene.image_id,
        &merged,
        gt_mask,
        &out_instances,
        gt,
        threshold,
    )?;
    Ok(SceneRun {
        prompts,
        merged,
        evaluation,
        fallbacks,
    })
}
