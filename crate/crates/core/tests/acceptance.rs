//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
//! failure.

mod common;

use std::time::{Duration, Instant};

use promptseg::fixtures::{synthetic_scenes, write_dataset, FixtureOptions};
use promptseg::metrics::{match_instances, pair_scores, pixel_confusion, scores, MatchedPair};
use promptseg::raster::{
    distance_transform, label_components, representative_point, BinaryMask, InstanceMask,
};
use promptseg::runner::{
    emit_reports, results_csv, run_experiment, run_on_scenes, segment_scene, Backend, BackendKind,
    ExperimentConfig,
};
use promptseg::{MatchResult, StrategyKind, StrategySpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

const TABLE_LABELS: [&str; 9] = [
    "Single-point",
    "Single-point + Negative-point",
    "Skeleton Multiple-points",
    "Random Multiple-points",
    "Random Multiple-points + Single-point",
    "Random Multiple-points + Negative-point",
    "Bounding-box",
    "Bounding-box + Single-point",
    "Bounding-box + Multiple-points",
];

fn oracle_fixed_point() -> Outcome {
    let scenes = synthetic_scenes(&FixtureOptions::default());
    if scenes.len() < 20 {
        return Err(format!("only {} scenes", scenes.len()));
    }
    let shapes_seen = scenes
        .iter()
        .flat_map(|s| label_components(s.gt_mask.as_ref().unwrap()))
        .count();
    let cfg = ExperimentConfig::new("in-memory");
    let start = Instant::now();
    let outcome = run_on_scenes(&cfg, &scenes, &Backend::Oracle).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let csv = results_csv(&outcome);
    let mut rows = 0;
    for row in &outcome.rows {
        let report = row
            .report
            .as_ref()
            .ok_or_else(|| format!("{}: no report", row.label))?;
        if report.columns().iter().any(|&v| v != 100.0) {
            return Err(format!("{}: {:?}", row.label, report.columns()));
        }
        rows += 1;
    }
    for line in csv.lines().skip(1) {
        if !line.ends_with(",100.00,100.00,100.00,100.00,100.00,100.00") {
            return Err(format!("csv row {line}"));
        }
    }
    if elapsed >= Duration::from_secs(10) {
        return Err(format!("took {elapsed:?}"));
    }
    Ok(format!(
        "{} scenes, {shapes_seen} buildings, {rows} rows all 100.00 in {elapsed:.2?}",
        scenes.len()
    ))
}

fn representative_point_property() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED_0001);
    let mut small = 0;
    for trial in 0..1000 {
        let n = if trial < 10 {
            trial + 1
        } else {
            rng.random_range(1..=2000)
        };
        let pixels = common::random_blob(&mut rng, n, 1);
        let mask = common::blob_mask(&pixels, 1);
        let inst = InstanceMask::new(1, pixels).map_err(|e| e.to_string())?;
        let rep = representative_point(&inst);
        if !inst.contains(rep) {
            return Err(format!("trial {trial}: {rep:?} outside a {n}-pixel blob"));
        }
        let bb = inst.bbox();
        if bb.width() <= 32 && bb.height() <= 32 {
            small += 1;
            let want = common::brute_representative(&inst, mask.width(), mask.height());
            if rep != want {
                return Err(format!("trial {trial}: got {rep:?}, brute force {want:?}"));
            }
        }
    }
    if small < 100 {
        return Err(format!("only {small} blobs fit in 32x32"));
    }
    Ok(format!(
        "1000 blobs inside, {small} match brute-force argmax"
    ))
}

fn distance_transform_exact() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED_0002);
    let mut checked = 0u64;
    for trial in 0..200 {
        let w = rng.random_range(1..=32);
        let h = rng.random_range(1..=32);
        let fill = rng.random_range(0.2..0.95);
        let mask = common::random_mask(&mut rng, w, h, fill);
        for inst in label_components(&mask) {
            let dt = distance_transform(&inst);
            for &p in inst.pixels() {
                let got = dt
                    .squared(p)
                    .ok_or_else(|| format!("trial {trial}: {p:?} missing"))?;
                let want = common::brute_distance_sq(&inst, w, h, p);
                if got != want {
                    return Err(format!("trial {trial} ({w}x{h}) at {p:?}: {got} != {want}"));
                }
                checked += 1;
            }
        }
    }
    Ok(format!("200 rasters, {checked} pixels bit-exact"))
}

fn ccl_matches_flood_fill() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED_0003);
    let mut components = 0;
    for trial in 0..200 {
        let w = rng.random_range(1..=64);
        let h = rng.random_range(1..=64);
        let fill = rng.random_range(0.05..0.7);
        let mask = common::random_mask(&mut rng, w, h, fill);
        let got = label_components(&mask);
        let want = common::flood_fill_components(&mask);
        if got.len() != want.len() {
            return Err(format!(
                "trial {trial}: {} components, flood fill {}",
                got.len(),
                want.len()
            ));
        }
        for (i, (g, w)) in got.iter().zip(&want).enumerate() {
            if g.id() != i as u32 + 1 || g.pixels() != w.as_slice() {
                return Err(format!("trial {trial}: component {} differs", i + 1));
            }
        }
        components += got.len();
    }
    Ok(format!("200 rasters, {components} components identical"))
}

fn metric_fixtures() -> Outcome {
    let pred = BinaryMask::from_rows(&["##..", "##..", "##..", "##.."]).unwrap();
    let gt = BinaryMask::from_rows(&["####", "####", "....", "...."]).unwrap();
    let c = pixel_confusion(&pred, &gt).map_err(|e| e.to_string())?;
    if (c.tp, c.fp, c.fn_, c.tn) != common::brute_confusion(&pred, &gt) {
        return Err(format!("counts {c:?}"));
    }
    let s = scores(&c);
    let shown = [s.precision, s.recall, s.iou, s.f1].map(|v| format!("{v:.2}"));
    if shown != ["50.00", "50.00", "33.33", "50.00"] {
        return Err(format!("fixture scored {shown:?}"));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED_0004);
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let (na, nb) = (rng.random_range(1..=60), rng.random_range(1..=60));
        let a = common::random_blob(&mut rng, na, 0);
        let shift = (rng.random_range(0..4), rng.random_range(0..4));
        let b: Vec<_> = common::random_blob(&mut rng, nb, 0)
            .into_iter()
            .map(|p| promptseg::Point::new(p.x + shift.0, p.y + shift.1))
            .collect();
        let a = InstanceMask::new(1, a).unwrap();
        let b = InstanceMask::new(1, b).unwrap();
        let matches = MatchResult {
            pairs: vec![MatchedPair {
                pred_id: 1,
                gt_id: 1,
                iou: common::brute_iou(&a, &b),
            }],
            ..Default::default()
        };
        let ps = pair_scores(&matches, std::slice::from_ref(&a), std::slice::from_ref(&b))[0];
        let err = (ps.dice - 2.0 * ps.jaccard / (1.0 + ps.jaccard)).abs();
        worst = worst.max(err);
    }
    if worst > 1e-12 {
        return Err(format!("Dice-Jaccard residual {worst:e}"));
    }
    Ok(format!(
        "fixture 50.00/50.00/33.33/50.00, 10^4 pairs max residual {worst:e}"
    ))
}

fn matching_is_optimal() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED_0005);
    let mut trials = 0;
    let mut matched = 0;
    while trials < 500 {
        let w = rng.random_range(8..=20);
        let h = rng.random_range(8..=20);
        let rects = rng.random_range(0..=6);
        let gt_mask = common::random_rect_scene(&mut rng, w, h, rects);
        // predictions: the ground truth with random pixel flips
        let mut pred_mask = gt_mask.clone();
        for _ in 0..rng.random_range(0..(w * h / 3)) {
            let (x, y) = (rng.random_range(0..w), rng.random_range(0..h));
            pred_mask.set(x, y, !pred_mask.get(x, y));
        }
        let gt = label_components(&gt_mask);
        let pred = label_components(&pred_mask);
        if gt.len() > 6 || pred.len() > 6 {
            continue;
        }
        trials += 1;
        let result = match_instances(&pred, &gt, 0.5);
        let mut got: Vec<(u32, u32)> = result.pairs.iter().map(|p| (p.pred_id, p.gt_id)).collect();
        got.sort();
        let want = common::exhaustive_matching(&pred, &gt, 0.5);
        if got != want {
            return Err(format!(
                "trial {trials}: greedy {got:?}, exhaustive {want:?}"
            ));
        }
        let unmatched = result.unmatched_pred.len() + got.len() == pred.len()
            && result.unmatched_gt.len() + got.len() == gt.len();
        if !unmatched {
            return Err(format!("trial {trials}: unmatched lists inconsistent"));
        }
        matched += got.len();
    }
    Ok(format!(
        "500 scenes, {matched} pairs identical to exhaustive search"
    ))
}

fn degradation_ordering() -> Outcome {
    let scenes = synthetic_scenes(&FixtureOptions {
        degrade: true,
        ..Default::default()
    });
    let mut checks = 0;
    for scene in &scenes {
        let gt = label_components(scene.gt_mask.as_ref().unwrap());
        let pred = label_components(&scene.pred_mask);
        for kind in StrategyKind::ALL {
            let spec = StrategySpec::new(kind);
            let mut last_iou = f64::INFINITY;
            for r in 0..=2 {
                let seg = Backend::Dilating(r).for_scene(&gt, &pred);
                let run = segment_scene(scene, &pred, &gt, &spec, seg.as_ref(), 0.5)
                    .map_err(|e| e.to_string())?;
                let rep = run.evaluation.report();
                let ctx = format!("{} / {} / r={r}", scene.image_id, kind.label());
                if rep.iou >= last_iou {
                    return Err(format!("{ctx}: IoU {} not below {last_iou}", rep.iou));
                }
                if rep.tp_iou < rep.iou {
                    return Err(format!("{ctx}: TP-IoU {} < IoU {}", rep.tp_iou, rep.iou));
                }
                last_iou = rep.iou;
                checks += 1;
            }
        }
    }
    Ok(format!(
        "{} scenes x 9 strategies x r in 0..=2, {checks} checks",
        scenes.len()
    ))
}

fn determinism() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let data = tmp.path().join("data");
    let scenes = synthetic_scenes(&FixtureOptions {
        degrade: true,
        ..Default::default()
    });
    write_dataset(&scenes, &data).map_err(|e| e.to_string())?;
    let mut outputs = Vec::new();
    for parallelism in [1, 8] {
        let mut cfg = ExperimentConfig::new(&data);
        cfg.parallelism = parallelism;
        cfg.segmenter_backend = BackendKind::DilatingMock;
        cfg.seed = 42;
        let out = tmp.path().join(format!("out{parallelism}"));
        let outcome = run_experiment(&cfg).map_err(|e| e.to_string())?;
        let paths = emit_reports(&outcome, &cfg, &out).map_err(|e| e.to_string())?;
        outputs.push(std::fs::read(&paths.csv).map_err(|e| e.to_string())?);
    }
    if outputs[0] != outputs[1] {
        return Err("results.csv differs between parallelism 1 and 8".into());
    }
    Ok(format!(
        "results.csv identical ({} bytes)",
        outputs[0].len()
    ))
}

fn grid_completeness() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let data = tmp.path().join("data");
    let scenes = synthetic_scenes(&FixtureOptions {
        count: 3,
        ..Default::default()
    });
    write_dataset(&scenes, &data).map_err(|e| e.to_string())?;
    let cfg = ExperimentConfig::new(&data);
    let outcome = run_experiment(&cfg).map_err(|e| e.to_string())?;
    let paths = emit_reports(&outcome, &cfg, &tmp.path().join("out")).map_err(|e| e.to_string())?;
    let md = std::fs::read_to_string(&paths.markdown).map_err(|e| e.to_string())?;
    let labels: Vec<&str> = md
        .lines()
        .skip(2)
        .map(|l| l.trim_start_matches("| ").split(" | ").next().unwrap_or(""))
        .collect();
    let mut want: Vec<&str> = TABLE_LABELS.to_vec();
    want.push("baseline U-Net-based CNN");
    if labels != want {
        return Err(format!("rows {labels:?}"));
    }
    Ok("nine strategy rows plus baseline, labels verbatim".into())
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("oracle fixed point", oracle_fixed_point),
        ("representative point", representative_point_property),
        ("distance transform", distance_transform_exact),
        ("connected components", ccl_matches_flood_fill),
        ("metric fixtures", metric_fixtures),
        ("instance matching", matching_is_optimal),
        ("degradation ordering", degradation_ordering),
        ("determinism", determinism),
        ("strategy grid", grid_completeness),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        match result {
            Ok(detail) => println!("PASS {name} [{elapsed:.1?}]: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name} [{elapsed:.1?}]: {detail}");
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
