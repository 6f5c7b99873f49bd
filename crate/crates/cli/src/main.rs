use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};

use promptseg::fixtures::{synthetic_scenes, write_dataset, FixtureOptions};
use promptseg::raster::label_components;
use promptseg::runner::{
    emit_reports, ingest, render_overlay, results_markdown, run_experiment, scene_prompts,
    segment_scene, Backend, BackendKind, ExperimentConfig, IngestMode, RunError, SceneError,
};
use promptseg::segmenter::SegmenterError;
use promptseg::{StrategyKind, StrategySpec};

#[derive(Parser)]
#[command(
    name = "promptseg",
    version,
    about = "Prompt a segmenter with CNN building masks and score the result"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the strategy grid and write results.csv, results.md and run_meta.json.
    Run(RunArgs),
    /// Check the images/, gt/, pred/ layout under a data root.
    ValidateData {
        #[arg(long)]
        data_root: PathBuf,
    },
    /// Render one overlay for one scene and strategy.
    Render {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        scene: String,
        #[arg(long)]
        strategy: String,
    },
    /// Dump the prompts of one strategy as JSON without reading ground truth.
    Prompts {
        #[arg(long)]
        data_root: PathBuf,
        #[arg(long)]
        strategy: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a synthetic dataset in the expected layout.
    Synth {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 24)]
        count: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Make predictions imperfect (one missed building, one false blob per scene).
        #[arg(long)]
        degrade: bool,
    },
}

#[derive(Args)]
struct CommonArgs {
    /// JSON experiment config.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    data_root: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// oracle, dilating_mock, pass_through or remote.
    #[arg(long)]
    backend: Option<String>,
    #[arg(long)]
    endpoint: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long)]
    parallelism: Option<usize>,
    /// Comma-separated strategy names or labels.
    #[arg(long)]
    strategies: Option<String>,
    #[arg(long)]
    overlays: bool,
}

impl CommonArgs {
    fn config(&self) -> Result<ExperimentConfig, RunError> {
        let mut cfg = match (&self.config, &self.data_root) {
            (Some(path), _) => ExperimentConfig::load(path)?,
            (None, Some(root)) => ExperimentConfig::new(root),
            (None, None) => return Err(RunError::Config("need --config or --data-root".into())),
        };
        if let Some(root) = &self.data_root {
            cfg.data_root = root.clone();
        }
        if let Some(out) = &self.out {
            cfg.out_dir = out.clone();
        }
        if let Some(b) = &self.backend {
            cfg.segmenter_backend = b.parse::<BackendKind>().map_err(RunError::Config)?;
        }
        if let Some(e) = &self.endpoint {
            cfg.endpoint = Some(e.clone());
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        Ok(cfg)
    }
}

fn run(args: RunArgs) -> Result<(), RunError> {
    let mut cfg = args.common.config()?;
    if let Some(p) = args.parallelism {
        cfg.parallelism = p;
    }
    if let Some(list) = &args.strategies {
        cfg.set_strategies_from_list(list)?;
    }
    cfg.emit_overlays |= args.overlays;
    cfg.validate()?;

    let outcome = run_experiment(&cfg)?;
    let paths = emit_reports(&outcome, &cfg, &cfg.out_dir)?;
    print!("{}", results_markdown(&outcome));
    if !outcome.skips.is_empty() {
        eprintln!(
            "{} scene/strategy pairs skipped; see {}",
            outcome.skips.len(),
            paths.meta.display()
        );
    }
    eprintln!("wrote {}", paths.csv.display());
    Ok(())
}

fn validate_data(root: PathBuf) -> Result<(), RunError> {
    let dataset = ingest(&root, IngestMode::Evaluate)?;
    for w in &dataset.warnings {
        println!("skip {}: {}", w.image_id, w.reason);
    }
    println!(
        "{} usable scenes, {} skipped",
        dataset.scenes.len(),
        dataset.warnings.len()
    );
    Ok(())
}

fn render(common: CommonArgs, scene_id: String, strategy: String) -> Result<(), RunError> {
    let cfg = common.config()?;
    cfg.validate()?;
    let kind: StrategyKind = strategy
        .parse()
        .map_err(|e| RunError::Config(format!("{e}")))?;
    let spec = StrategySpec::new(kind).with_seed(cfg.seed);
    let dataset = ingest(&cfg.data_root, IngestMode::Evaluate)?;
    let scene = dataset
        .scenes
        .iter()
        .find(|s| s.image_id == scene_id)
        .ok_or_else(|| {
            RunError::Config(format!(
                "scene {scene_id:?} not found under {}",
                cfg.data_root.display()
            ))
        })?;

    let backend = Backend::from_config(&cfg)?;
    let gt = label_components(scene.gt_mask.as_ref().expect("evaluate mode"));
    let pred = label_components(&scene.pred_mask);
    let segmenter = backend.for_scene(&gt, &pred);
    let run = segment_scene(
        scene,
        &pred,
        &gt,
        &spec,
        segmenter.as_ref(),
        cfg.match_threshold,
    )
    .map_err(|e| match e {
        SceneError::Segmenter(_, SegmenterError::BackendUnavailable(m)) => {
            RunError::BackendUnavailable(m)
        }
        other => RunError::Config(other.to_string()),
    })?;
    let path = render_overlay(
        &scene.image,
        &run.prompts,
        &run.merged,
        &cfg.out_dir,
        &scene.image_id,
        kind.slug(),
    )?;
    let report = run.evaluation.report();
    println!(
        "{} on {}: IoU {:.2}, F1 {:.2}, TP-IoU {:.2}",
        kind.label(),
        scene.image_id,
        report.iou,
        report.f1,
        report.tp_iou
    );
    println!("wrote {}", path.display());
    Ok(())
}

fn prompts(root: PathBuf, strategy: String, seed: u64, out: Option<PathBuf>) -> anyhow::Result<()> {
    let kind: StrategyKind = strategy.parse()?;
    let spec = StrategySpec::new(kind).with_seed(seed);
    let dataset = ingest(&root, IngestMode::PromptOnly)?;
    let dump: Vec<serde_json::Value> = dataset
        .scenes
        .iter()
        .map(|scene| {
            let instances: Vec<serde_json::Value> = scene_prompts(scene, &spec)
                .into_iter()
                .map(|(id, prompt, fallback)| serde_json::json!({"instance_id": id, "prompt": prompt, "fallback": fallback}))
                .collect();
            serde_json::json!({"image_id": scene.image_id, "instances": instances})
        })
        .collect();
    let text = serde_json::to_string_pretty(
        &serde_json::json!({"strategy": kind.label(), "scenes": dump}),
    )?;
    match out {
        Some(path) => {
            std::fs::write(&path, text + "\n").with_context(|| path.display().to_string())?
        }
        None => println!("{text}"),
    }
    Ok(())
}

fn synth(out: PathBuf, count: usize, seed: u64, degrade: bool) -> anyhow::Result<()> {
    let scenes = synthetic_scenes(&FixtureOptions {
        count,
        seed,
        degrade,
        ..Default::default()
    });
    write_dataset(&scenes, &out).with_context(|| out.display().to_string())?;
    println!("wrote {} scenes to {}", scenes.len(), out.display());
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result: anyhow::Result<()> = match cli.command {
        Command::Run(args) => run(args).map_err(Into::into),
        Command::ValidateData { data_root } => validate_data(data_root).map_err(Into::into),
        Command::Render {
            common,
            scene,
            strategy,
        } => render(common, scene, strategy).map_err(Into::into),
        Command::Prompts {
            data_root,
            strategy,
            seed,
            out,
        } => prompts(data_root, strategy, seed, out),
        Command::Synth {
            out,
            count,
            seed,
            degrade,
        } => synth(out, count, seed, degrade),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = e.downcast_ref::<RunError>().map_or(1, RunError::exit_code);
            ExitCode::from(code as u8)
        }
    }
}
