use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::experiment::{ExperimentOutcome, ExperimentRow, FallbackRecord, SkipRecord};
use super::ingest::IngestWarning;
use super::{ExperimentConfig, RunError};

pub const CSV_HEADER: &str = "experiment,precision,recall,iou,f1,tp_iou,tp_f1";
const MD_HEADER: &str = "| Experiment | Precision | Recall | IoU | F1 | TP-IoU | TP-F1 |";
const MD_RULE: &str = "|---|---|---|---|---|---|---|";

#[derive(Debug, Clone)]
pub struct ReportPaths {
    pub csv: PathBuf,
    pub markdown: PathBuf,
    pub meta: PathBuf,
}

fn cells(row: &ExperimentRow) -> Vec<String> {
    match &row.report {
        Some(r) => r.columns().iter().map(|v| format!("{v:.2}")).collect(),
        None => vec!["NA".to_string(); 6],
    }
}

pub fn results_csv(outcome: &ExperimentOutcome) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for row in &outcome.rows {
        let _ = writeln!(out, "{},{}", csv_field(&row.label), cells(row).join(","));
    }
    out
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn results_markdown(outcome: &ExperimentOutcome) -> String {
    let mut out = format!("{MD_HEADER}\n{MD_RULE}\n");
    for row in &outcome.rows {
        let _ = writeln!(
            out,
            "| {} | {} |",
            row.label.replace('|', "\\|"),
            cells(row).join(" | ")
        );
    }
    out
}

#[derive(Serialize)]
struct RowMeta<'a> {
    label: &'a str,
    scenes_scored: usize,
    tp_defined: bool,
    matched_pairs: usize,
}

#[derive(Serialize)]
struct RunMeta<'a> {
    tool: &'static str,
    version: &'static str,
    seed: u64,
    config: &'a ExperimentConfig,
    scenes: usize,
    rows: Vec<RowMeta<'a>>,
    skips: &'a [SkipRecord],
    ingest_warnings: &'a [IngestWarning],
    fallbacks: &'a [FallbackRecord],
}

/// Writes `results.csv`, `results.md` and `run_meta.json` into `out_dir`.
pub fn emit_reports(
    outcome: &ExperimentOutcome,
    cfg: &ExperimentConfig,
    out_dir: &Path,
) -> Result<ReportPaths, RunError> {
    if outcome.rows.is_empty() {
        return Err(RunError::Config("no results to report".into()));
    }
    std::fs::create_dir_all(out_dir).map_err(|e| RunError::io(out_dir, e))?;
    let paths = ReportPaths {
        csv: out_dir.join("results.csv"),
        markdown: out_dir.join("results.md"),
        meta: out_dir.join("run_meta.json"),
    };
    let meta = RunMeta {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        seed: cfg.seed,
        config: cfg,
        scenes: outcome.scenes,
        rows: outcome
            .rows
            .iter()
            .map(|r| RowMeta {
                label: &r.label,
                scenes_scored: r.report.as_ref().map_or(0, |m| m.per_image.len()),
                tp_defined: r.report.as_ref().is_some_and(|m| m.tp_defined),
                matched_pairs: r.report.as_ref().map_or(0, |m| {
                    m.per_image.iter().map(|e| e.matches.pairs.len()).sum()
                }),
            })
            .collect(),
        skips: &outcome.skips,
        ingest_warnings: &outcome.ingest_warnings,
        fallbacks: &outcome.fallbacks,
    };
    let meta_json =
        serde_json::to_string_pretty(&meta).map_err(|e| RunError::Config(e.to_string()))?;

    for (path, body) in [
        (&paths.csv, results_csv(outcome)),
        (&paths.markdown, results_markdown(outcome)),
        (&paths.meta, meta_json + "\n"),
    ] {
        std::fs::write(path, body).map_err(|e| RunError::io(path, e))?;
    }
    Ok(paths)
}
