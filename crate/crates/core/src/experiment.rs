//! Batch experiments: grids of random instances solved one after another,
//! summarized per `(n, alpha, radius)` cell.
//!
//! Every run writes its instance and solution files and appends one JSON
//! line to `runs.jsonl` before the next run starts, so an interrupted
//! experiment loses at most the run in progress.

use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{BufRead, BufReader, Write};
use std::ops::Range;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::engine::{solve, SolveOutcome, SolveParams};
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::io::write_json;

/// One grid cell: `seeds` random instances of size `n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentCell {
    pub n: usize,
    pub alpha: f64,
    pub seeds: Range<u64>,
    pub radius: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub cells: Vec<ExperimentCell>,
    /// Per-run time limit in seconds.
    pub time_limit_secs: f64,
    pub out_dir: PathBuf,
}

impl ExperimentSpec {
    /// Full grid over `sizes x alphas`, each with the same seeds and radius.
    pub fn grid(
        sizes: &[usize],
        alphas: &[f64],
        seeds: Range<u64>,
        radius: f64,
        time_limit_secs: f64,
        out_dir: impl Into<PathBuf>,
    ) -> Self {
        let cells = sizes
            .iter()
            .flat_map(|&n| {
                let seeds = seeds.clone();
                alphas.iter().map(move |&alpha| ExperimentCell {
                    n,
                    alpha,
                    seeds: seeds.clone(),
                    radius,
                })
            })
            .collect();
        ExperimentSpec {
            cells,
            time_limit_secs,
            out_dir: out_dir.into(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.cells.is_empty() {
            return Err(Error::validation("cells", "the experiment has no cells"));
        }
        if !(self.time_limit_secs > 0.0 && self.time_limit_secs.is_finite()) {
            return Err(Error::validation("time_limit_secs", "must be positive and finite"));
        }
        for c in &self.cells {
            if c.seeds.is_empty() {
                return Err(Error::validation(
                    "seeds",
                    format!("empty seed range {}..{} for n={} alpha={}", c.seeds.start, c.seeds.end, c.n, c.alpha),
                ));
            }
        }
        Ok(())
    }

    pub fn num_runs(&self) -> usize {
        self.cells.iter().map(|c| (c.seeds.end - c.seeds.start) as usize).sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RunStatus {
    Optimal,
    Timeout,
    Infeasible,
}

/// Result of a single run, as stored in `runs.jsonl`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub n: usize,
    pub alpha: f64,
    pub radius: f64,
    pub seed: u64,
    pub status: RunStatus,
    pub objective: Option<f64>,
    pub gv_cost: Option<f64>,
    pub uav_cost: Option<f64>,
    pub gap: Option<f64>,
    pub sec_cuts: usize,
    pub two_matching_cuts: usize,
    pub nodes: usize,
    pub wall_time_secs: f64,
    /// Solution file relative to the output directory.
    pub solution_file: Option<String>,
}

/// Per-cell averages. Costs average over runs solved to optimality; the
/// search counters and the time average over all runs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub n: usize,
    pub alpha: f64,
    pub radius: f64,
    pub runs: usize,
    pub solved: usize,
    pub avg_cost: Option<f64>,
    pub avg_gv_cost: Option<f64>,
    pub avg_uav_cost: Option<f64>,
    pub avg_sec_cuts: f64,
    pub avg_nodes: f64,
    pub avg_time_secs: f64,
}

impl CellSummary {
    /// The summary with the time column zeroed; reruns agree on the rest.
    pub fn counters(&self) -> CellSummary {
        CellSummary {
            avg_time_secs: 0.0,
            ..self.clone()
        }
    }
}

pub const RUNS_FILE: &str = "runs.jsonl";
pub const SUMMARY_TEXT: &str = "summary.txt";
pub const SUMMARY_JSON: &str = "summary.json";

fn run_stem(n: usize, alpha: f64, radius: f64, seed: u64) -> String {
    format!("n{n}_a{alpha}_r{radius}_s{seed}")
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Solves one instance and writes its files under `out_dir`.
pub fn run_one(cell: &ExperimentCell, seed: u64, time_limit: Duration, out_dir: &Path) -> Result<RunRecord> {
    let inst = Instance::generate_random(cell.n, seed, cell.alpha, cell.radius)?;
    let stem = run_stem(cell.n, cell.alpha, cell.radius, seed);
    inst.save(&out_dir.join("instances").join(format!("{stem}.json")))?;
    let params = SolveParams {
        time_limit,
        ..SolveParams::default()
    };
    let res = solve(&inst, &params)?;
    let (status, gap) = match &res.outcome {
        SolveOutcome::Optimal => (RunStatus::Optimal, Some(0.0)),
        SolveOutcome::Timeout { gap } => (RunStatus::Timeout, *gap),
        SolveOutcome::Infeasible { .. } => (RunStatus::Infeasible, None),
    };
    let solution_file = match &res.solution {
        Some(sol) => {
            let mut sol = sol.clone();
            sol.stats = Some(res.stats.clone());
            let rel = format!("solutions/{stem}.json");
            sol.save(&out_dir.join(&rel))?;
            Some(rel)
        }
        None => None,
    };
    let sol = res.solution.as_ref();
    Ok(RunRecord {
        n: cell.n,
        alpha: cell.alpha,
        radius: cell.radius,
        seed,
        status,
        objective: sol.map(|s| s.objective),
        gv_cost: sol.map(|s| s.gv_cost),
        uav_cost: sol.map(|s| s.uav_cost),
        gap,
        sec_cuts: res.stats.sec_cuts,
        two_matching_cuts: res.stats.two_matching_cuts,
        nodes: res.stats.nodes_explored,
        wall_time_secs: res.stats.wall_time_secs,
        solution_file,
    })
}

/// Runs every cell in order, appending each record to `runs.jsonl` as soon
/// as it is known, then writes the text and JSON summaries.
pub fn run_experiment(spec: &ExperimentSpec, mut on_run: impl FnMut(&RunRecord)) -> Result<Vec<CellSummary>> {
    spec.validate()?;
    let out = &spec.out_dir;
    fs::create_dir_all(out).map_err(io_err(out))?;
    let runs_path = out.join(RUNS_FILE);
    let mut runs_file = File::create(&runs_path).map_err(io_err(&runs_path))?;
    let limit = Duration::from_secs_f64(spec.time_limit_secs);
    let mut records = Vec::with_capacity(spec.num_runs());
    for cell in &spec.cells {
        for seed in cell.seeds.clone() {
            let rec = run_one(cell, seed, limit, out)?;
            let line = serde_json::to_string(&rec).map_err(|e| Error::Contract(e.to_string()))?;
            writeln!(runs_file, "{line}").map_err(io_err(&runs_path))?;
            runs_file.flush().map_err(io_err(&runs_path))?;
            on_run(&rec);
            records.push(rec);
        }
    }
    let table = summarize(&records);
    write_summaries(out, &table)?;
    Ok(table)
}

pub fn write_summaries(out: &Path, table: &[CellSummary]) -> Result<()> {
    let text_path = out.join(SUMMARY_TEXT);
    fs::write(&text_path, render_table(table)).map_err(io_err(&text_path))?;
    write_json(&table, &out.join(SUMMARY_JSON))
}

/// Reads the records of a (possibly interrupted) experiment.
pub fn load_runs(out_dir: &Path) -> Result<Vec<RunRecord>> {
    let path = out_dir.join(RUNS_FILE);
    let file = File::open(&path).map_err(io_err(&path))?;
    let mut records = Vec::new();
    for (k, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(io_err(&path))?;
        if line.trim().is_empty() {
            continue;
        }
        let rec = serde_json::from_str(&line).map_err(|e| Error::Parse {
            path: path.clone(),
            line: k + 1,
            column: e.column(),
            message: e.to_string(),
        })?;
        records.push(rec);
    }
    Ok(records)
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, count) = values.fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    (count > 0).then(|| sum / count as f64)
}

/// Groups records by cell in order of first appearance and averages them.
pub fn summarize(records: &[RunRecord]) -> Vec<CellSummary> {
    let mut keys: Vec<(usize, f64, f64)> = Vec::new();
    for r in records {
        let key = (r.n, r.alpha, r.radius);
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    keys.into_iter()
        .map(|(n, alpha, radius)| {
            let runs: Vec<&RunRecord> = records
                .iter()
                .filter(|r| r.n == n && r.alpha == alpha && r.radius == radius)
                .collect();
            let solved: Vec<&&RunRecord> = runs.iter().filter(|r| r.status == RunStatus::Optimal).collect();
            CellSummary {
                n,
                alpha,
                radius,
                runs: runs.len(),
                solved: solved.len(),
                avg_cost: mean(solved.iter().filter_map(|r| r.objective)),
                avg_gv_cost: mean(solved.iter().filter_map(|r| r.gv_cost)),
                avg_uav_cost: mean(solved.iter().filter_map(|r| r.uav_cost)),
                avg_sec_cuts: mean(runs.iter().map(|r| r.sec_cuts as f64)).unwrap_or(0.0),
                avg_nodes: mean(runs.iter().map(|r| r.nodes as f64)).unwrap_or(0.0),
                avg_time_secs: mean(runs.iter().map(|r| r.wall_time_secs)).unwrap_or(0.0),
            }
        })
        .collect()
}

/// Aligned plain-text table, one row per cell.
pub fn render_table(table: &[CellSummary]) -> String {
    let header = [
        "n", "alpha", "R", "avg cost", "avg GV cost", "avg UAV cost", "SEC cuts", "B&C nodes", "solved", "avg time (s)",
    ];
    let opt = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |v| format!("{v:.2}"));
    let rows: Vec<Vec<String>> = table
        .iter()
        .map(|c| {
            vec![
                c.n.to_string(),
                format!("{}", c.alpha),
                format!("{}", c.radius),
                opt(c.avg_cost),
                opt(c.avg_gv_cost),
                opt(c.avg_uav_cost),
                format!("{:.1}", c.avg_sec_cuts),
                format!("{:.1}", c.avg_nodes),
                format!("{}/{}", c.solved, c.runs),
                format!("{:.2}", c.avg_time_secs),
            ]
        })
        .collect();
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for r in &rows {
        for (w, cell) in widths.iter_mut().zip(r) {
            *w = (*w).max(cell.len());
        }
    }
    let mut out = String::new();
    let line = |cells: &mut dyn Iterator<Item = &str>, out: &mut String| {
        let parts: Vec<String> = cells.zip(&widths).map(|(c, &w)| format!("{c:>w$}")).collect();
        let _ = writeln!(out, "{}", parts.join("  ").trim_end());
    };
    line(&mut header.iter().copied(), &mut out);
    for r in &rows {
        line(&mut r.iter().map(String::as_str), &mut out);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(n: usize, alpha: f64, seed: u64, status: RunStatus, obj: f64, nodes: usize) -> RunRecord {
        RunRecord {
            n,
            alpha,
            radius: 50.0,
            seed,
            status,
            objective: Some(obj),
            gv_cost: Some(obj - 1.0),
            uav_cost: Some(1.0),
            gap: None,
            sec_cuts: 2 * nodes,
            two_matching_cuts: 0,
            nodes,
            wall_time_secs: 0.5,
            solution_file: None,
        }
    }

    #[test]
    fn empty_seed_range_is_rejected() {
        let spec = ExperimentSpec::grid(&[5], &[0.1], 3..3, 50.0, 10.0, "unused");
        assert!(spec.validate().is_err());
    }

    #[test]
    fn no_cells_is_rejected() {
        let spec = ExperimentSpec::grid(&[], &[0.1], 0..3, 50.0, 10.0, "unused");
        assert!(spec.validate().is_err());
    }

    #[test]
    fn costs_average_over_solved_runs_only() {
        let recs = vec![
            record(10, 0.1, 0, RunStatus::Optimal, 100.0, 4),
            record(10, 0.1, 1, RunStatus::Timeout, 500.0, 8),
            record(10, 0.1, 2, RunStatus::Optimal, 200.0, 6),
            record(10, 0.2, 0, RunStatus::Optimal, 150.0, 1),
        ];
        let t = summarize(&recs);
        assert_eq!(t.len(), 2);
        assert_eq!(t[0].runs, 3);
        assert_eq!(t[0].solved, 2);
        assert_eq!(t[0].avg_cost, Some(150.0));
        assert_eq!(t[0].avg_uav_cost, Some(1.0));
        assert_eq!(t[0].avg_nodes, 6.0);
        assert_eq!(t[0].avg_sec_cuts, 12.0);
        assert_eq!(t[1].avg_cost, Some(150.0));
    }

    #[test]
    fn table_has_one_line_per_cell() {
        let recs = vec![
            record(10, 0.1, 0, RunStatus::Optimal, 100.0, 4),
            record(10, 0.2, 0, RunStatus::Timeout, 100.0, 4),
        ];
        let text = render_table(&summarize(&recs));
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[0].contains("SEC cuts") && lines[0].contains("B&C nodes"));
        assert!(lines[2].contains("0/1") && lines[2].contains(" - "));
    }
}
