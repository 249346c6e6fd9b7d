//! Wall-clock benchmark over datasets, prefixes and algorithms.
//!
//! Every timed cell is verified (inverse BWT round trip) before its time is
//! reported. A cell that exceeds the timeout is reported as `> T s`; its
//! worker thread is left running in the background until the process exits.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::sync::mpsc;
use std::thread;
use std::time::{Duration, Instant};

use anyhow::{Context, Result};
use clap::Args;
use serde::Serialize;

use super::{io, EngineOpts, ReportFormat, RunConfig};
use crate::bwt::{sa_to_bwt, suffix_array, Algorithm};
use crate::engine::Engine;
use crate::oracle::inverse_bwt;
use crate::text::{BwtResult, Text};

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    /// Raw dataset files
    pub datasets: Vec<PathBuf>,
    /// Algorithms to run (repeatable or comma-separated)
    #[arg(long = "algorithm", value_delimiter = ',', default_values_t = [Algorithm::Pda, Algorithm::SmrTimsort])]
    pub algorithms: Vec<Algorithm>,
    /// Prefix sizes in bytes (repeatable; suffixes K, M, G); whole files when absent
    #[arg(long, value_name = "N", value_delimiter = ',', value_parser = super::parse_size)]
    pub max_bytes: Vec<u64>,
    #[command(flatten)]
    pub engine: EngineOpts,
    /// Per-cell timeout in seconds
    #[arg(long, value_name = "SECONDS")]
    pub timeout: Option<f64>,
    #[arg(long, value_enum, default_value = "text")]
    pub format: ReportFormat,
    /// Write the report here instead of stdout
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CellStatus {
    Ok,
    Timeout,
    Failed,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchRow {
    pub dataset: String,
    pub bytes: usize,
    pub algorithm: Algorithm,
    /// Construction wall time; present only for verified cells.
    pub wall_secs: Option<f64>,
    pub status: CellStatus,
    pub detail: Option<String>,
    pub rounds: Option<usize>,
    pub partitions: Option<usize>,
    pub workers: usize,
}

#[derive(Debug, Clone, Default, Serialize)]
#[serde(transparent)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
}

struct CellOutput {
    bwt: BwtResult,
    elapsed: Duration,
    rounds: Option<usize>,
    partitions: Option<usize>,
}

fn build_cell(config: &RunConfig, text: &Text, algorithm: Algorithm) -> Result<CellOutput> {
    let engine = Engine::new(config.engine_config())?;
    let start = Instant::now();
    let built = suffix_array(&engine, text, algorithm, config.k, config.partitions)?;
    let bwt = sa_to_bwt(&engine, built.sa.as_slice(), text)?;
    Ok(CellOutput {
        bwt,
        elapsed: start.elapsed(),
        rounds: built.rounds,
        partitions: built.partitions,
    })
}

/// Run one (text, algorithm) cell with an optional timeout.
pub fn run_cell(
    config: &RunConfig,
    dataset: &str,
    text: &Text,
    algorithm: Algorithm,
    timeout: Option<Duration>,
) -> BenchRow {
    let mut row = BenchRow {
        dataset: dataset.to_string(),
        bytes: text.payload().len(),
        algorithm,
        wall_secs: None,
        status: CellStatus::Failed,
        detail: None,
        rounds: None,
        partitions: None,
        workers: config.workers,
    };

    let (tx, rx) = mpsc::channel();
    let worker_config = config.clone();
    let worker_text = text.clone();
    thread::spawn(move || {
        let _ = tx.send(build_cell(&worker_config, &worker_text, algorithm));
    });
    let outcome = match timeout {
        Some(limit) => match rx.recv_timeout(limit) {
            Ok(out) => out,
            Err(mpsc::RecvTimeoutError::Timeout) => {
                row.status = CellStatus::Timeout;
                row.detail = Some(format!("> {} s", limit.as_secs_f64()));
                return row;
            }
            Err(mpsc::RecvTimeoutError::Disconnected) => Err(anyhow::anyhow!("worker panicked")),
        },
        None => rx.recv().unwrap_or_else(|_| Err(anyhow::anyhow!("worker panicked"))),
    };

    match outcome {
        Err(e) => row.detail = Some(format!("{e:#}")),
        Ok(out) => {
            row.rounds = out.rounds;
            row.partitions = out.partitions;
            match inverse_bwt(&out.bwt, text.char_order()) {
                Ok(decoded) if decoded == text.to_bytes_with_sentinel() => {
                    row.status = CellStatus::Ok;
                    row.wall_secs = Some(out.elapsed.as_secs_f64());
                }
                Ok(_) => row.detail = Some("round trip mismatch".into()),
                Err(e) => row.detail = Some(format!("round trip failed: {e}")),
            }
        }
    }
    row
}

fn time_cell(row: &BenchRow) -> String {
    match (row.status, row.wall_secs) {
        (CellStatus::Ok, Some(secs)) => format!("{secs:.3} s"),
        (CellStatus::Timeout, _) => row.detail.clone().unwrap_or_else(|| "timeout".into()),
        _ => "-".into(),
    }
}

fn opt(v: Option<usize>) -> String {
    v.map_or_else(|| "-".into(), |v| v.to_string())
}

impl BenchReport {
    pub fn to_table(&self) -> String {
        let header = ["dataset", "bytes", "algorithm", "time", "rounds", "partitions", "workers", "status"];
        let mut cells: Vec<[String; 8]> = vec![header.map(String::from)];
        for r in &self.rows {
            let status = match (r.status, &r.detail) {
                (CellStatus::Failed, Some(d)) => format!("failed: {d}"),
                (CellStatus::Failed, None) => "failed".into(),
                (CellStatus::Timeout, _) => "timeout".into(),
                (CellStatus::Ok, _) => "verified".into(),
            };
            cells.push([
                r.dataset.clone(),
                r.bytes.to_string(),
                r.algorithm.to_string(),
                time_cell(r),
                opt(r.rounds),
                opt(r.partitions),
                r.workers.to_string(),
                status,
            ]);
        }
        let widths: Vec<usize> = (0..8)
            .map(|c| cells.iter().map(|row| row[c].len()).max().unwrap_or(0))
            .collect();
        let mut out = String::new();
        for row in &cells {
            let line: Vec<String> = row
                .iter()
                .zip(&widths)
                .map(|(cell, w)| format!("{cell:<w$}"))
                .collect();
            let _ = writeln!(out, "{}", line.join("  ").trim_end());
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }
}

pub fn run_bench(args: &BenchArgs) -> Result<BenchReport> {
    let timeout = args.timeout.map(Duration::from_secs_f64);
    let prefixes: Vec<Option<u64>> = if args.max_bytes.is_empty() {
        vec![None]
    } else {
        args.max_bytes.iter().map(|&b| Some(b)).collect()
    };

    let mut report = BenchReport::default();
    for path in &args.datasets {
        for &prefix in &prefixes {
            let input = super::InputOpts {
                input: path.clone(),
                max_bytes: prefix,
            };
            let config = RunConfig::new(&input, &args.algorithms, &args.engine)?;
            let text = io::ingest(path, prefix, config.order)?;
            let name = path.file_name().map_or_else(
                || path.display().to_string(),
                |n| n.to_string_lossy().into_owned(),
            );
            let label = match prefix {
                Some(b) => format!("{name} ({b} B)"),
                None => name,
            };
            for &algorithm in &args.algorithms {
                report.rows.push(run_cell(&config, &label, &text, algorithm, timeout));
            }
        }
    }
    Ok(report)
}

pub fn cmd_bench(args: &BenchArgs) -> Result<bool> {
    let report = run_bench(args)?;
    let rendered = match args.format {
        ReportFormat::Text => report.to_table(),
        ReportFormat::Json => report.to_json() + "\n",
    };
    match &args.out {
        Some(path) => fs::write(path, rendered).with_context(|| format!("cannot write {}", path.display()))?,
        None => print!("{rendered}"),
    }
    Ok(report.rows.iter().all(|r| r.status != CellStatus::Failed))
}
