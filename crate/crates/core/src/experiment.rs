//! Experiment orchestration shared by the CLI, the C ABI, and the
//! acceptance suite: batch runs with file emission, VQE runs, and the
//! resource comparison.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::analysis::{batch_stats, fidelity_report, BatchStats};
use crate::environment::{Observable, ShotSource};
use crate::error::Result;
use crate::io::{self, RunOutput, SCHEMA_VERSION};
use crate::agent::AgentUnitary;
use crate::rlsolver::{
    run_batch, run_stage, ProtocolOptions, RestartSchedule, RewardState, StageConfig,
};
use crate::vqe::{run_vqe, ShotMode, VqeRunRecord};

/// Environment variable bounding run parallelism.
pub const THREADS_ENV: &str = "EIGSOLVE_THREADS";

/// Offset folded into each run seed for the post-run P-estimation draws,
/// keeping them independent of the trajectory stream.
const ESTIMATE_SEED_SALT: u64 = 0xE571_3A7E_0000_0000;

/// Full configuration of one batch experiment.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// Preset name or observable file path.
    pub observable: String,
    /// None selects the per-preset default schedule.
    pub schedule: Option<RestartSchedule>,
    pub runs: usize,
    pub base_seed: u64,
    /// Shots for the per-run P-estimation.
    pub estimate_shots: usize,
    pub options: ProtocolOptions,
    pub out_dir: Option<PathBuf>,
}

/// Default reward schedule for each built-in observable.
pub fn default_schedule(label: &str) -> RestartSchedule {
    match label {
        "x-quarter-pi" | "xy-gap2" => RestartSchedule::single(0.9, 1.5 / 0.9),
        "nondeg-4" => RestartSchedule::inverse_rounds(&[0.6, 0.7, 0.8, 0.9]),
        _ => RestartSchedule::single(0.9, 1.0 / 0.9),
    }
}

/// Default VQE shots per optimizer step for each built-in observable.
pub fn default_vqe_shots(label: &str) -> usize {
    match label {
        "xy-gap2" => 800,
        "xx" => 300,
        "h2-0.2A" => 120,
        "nondeg-4" => 2000,
        _ => 500,
    }
}

/// Result of a batch experiment, before or after file emission.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentOutcome {
    pub outputs: Vec<RunOutput>,
    /// (metric, basis index, stats) rows for the summary CSV.
    pub stats_rows: Vec<(String, usize, BatchStats)>,
    /// Histogram source: overlap fidelity of basis state 0.
    pub histogram: BatchStats,
    pub non_converged_runs: usize,
}

/// Run the configured batch and, when an output directory is set, write
/// runs.jsonl, summary.csv, histogram.csv, and metadata.json.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutcome> {
    let o = io::load_observable(&config.observable)?;
    let schedule = config
        .schedule
        .clone()
        .unwrap_or_else(|| default_schedule(o.label()));

    let records = with_thread_bound(|| {
        run_batch(&o, &schedule, config.runs, config.base_seed, &config.options)
    })?;

    let mut outputs = Vec::with_capacity(records.len());
    let mut non_converged = 0usize;
    for (run_index, record) in records.into_iter().enumerate() {
        if !record.converged {
            non_converged += 1;
        }
        let mut est_src = ShotSource::from_seed(record.seed ^ ESTIMATE_SEED_SALT);
        let fidelities = fidelity_report(&o, &record.final_agent, config.estimate_shots, &mut est_src)?;
        outputs.push(RunOutput {
            schema_version: SCHEMA_VERSION.to_string(),
            run_index,
            record,
            fidelities,
        });
    }

    let dim = o.dim();
    let mut stats_rows = Vec::new();
    for basis in 0..dim {
        for (metric, pick) in [
            ("probability_fidelity", 0usize),
            ("overlap_fidelity", 1),
            ("fidelity_from_p0", 2),
        ] {
            let samples: Vec<(u64, f64)> = outputs
                .iter()
                .filter_map(|out| {
                    let entry = &out.fidelities.entries[basis];
                    let value = match pick {
                        0 => Some(entry.probability_fidelity),
                        1 => Some(entry.overlap_fidelity),
                        _ => entry.fidelity_from_p0,
                    };
                    value.map(|f| (out.record.total_iterations, f))
                })
                .collect();
            if !samples.is_empty() {
                stats_rows.push((metric.to_string(), basis, batch_stats(&samples)?));
            }
        }
    }
    let histogram_samples: Vec<(u64, f64)> = outputs
        .iter()
        .map(|out| {
            (
                out.record.total_iterations,
                out.fidelities.entries[0].overlap_fidelity,
            )
        })
        .collect();
    let histogram = batch_stats(&histogram_samples)?;

    let outcome = ExperimentOutcome {
        outputs,
        stats_rows,
        histogram,
        non_converged_runs: non_converged,
    };
    if let Some(dir) = &config.out_dir {
        write_outcome_files(&outcome, config, dir)?;
    }
    Ok(outcome)
}

fn write_outcome_files(
    outcome: &ExperimentOutcome,
    config: &ExperimentConfig,
    dir: &Path,
) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    io::write_jsonl(&outcome.outputs, &dir.join("runs.jsonl"))?;
    io::write_summary_csv(&outcome.stats_rows, &dir.join("summary.csv"))?;
    io::write_histogram_csv(&outcome.histogram, &dir.join("histogram.csv"))?;
    // Timestamps live here, outside the deterministic JSONL.
    let timestamp = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let metadata = serde_json::json!({
        "schema_version": SCHEMA_VERSION,
        "unix_timestamp": timestamp,
        "config": config,
    });
    std::fs::write(
        dir.join("metadata.json"),
        serde_json::to_string_pretty(&metadata)? + "\n",
    )?;
    Ok(())
}

fn with_thread_bound<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    match std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
    {
        Some(n) if n >= 1 => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .expect("thread pool")
            .install(f),
        _ => f(),
    }
}

/// One VQE run against a named observable.
pub fn run_vqe_experiment(
    observable: &str,
    shots_per_step: Option<usize>,
    seed: u64,
) -> Result<(Observable, VqeRunRecord)> {
    let o = io::load_observable(observable)?;
    let shots = shots_per_step.unwrap_or_else(|| default_vqe_shots(o.label()));
    let record = run_vqe(&o, ShotMode::Finite(shots), 1e-3, 500, seed)?;
    Ok((o, record))
}

/// Side-by-side single-shot budget of the RL loop and VQE.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CompareReport {
    pub observable: String,
    pub fidelity_threshold: f64,
    pub rl_total_shots: u64,
    pub rl_min_overlap_fidelity: f64,
    /// The RL record approximates every eigenvector of the observable.
    pub rl_eigenvector_count: usize,
    /// Schedule passes the RL loop needed to reach the threshold.
    pub rl_protocol_passes: usize,
    pub rl_meets_threshold: bool,
    pub vqe_total_shots: u64,
    pub vqe_ground_fidelity: f64,
    /// VQE yields the ground state only.
    pub vqe_eigenvector_count: usize,
    pub vqe_meets_threshold: bool,
    pub shot_ratio: f64,
}

pub const COMPARE_FIDELITY_THRESHOLD: f64 = 0.95;

/// Upper bound on RL schedule passes when chasing the threshold.
const COMPARE_MAX_PASSES: usize = 8;

/// Run both subsystems on the same observable and seed. The RL loop is a
/// stochastic refinement, so to compare at a matched fidelity bar it
/// repeats the restart schedule, carrying the agent over, until every
/// column reaches the threshold; all consumed shots are counted.
pub fn compare(observable: &str, seed: u64, vqe_shots: Option<usize>) -> Result<CompareReport> {
    let o = io::load_observable(observable)?;
    let schedule = default_schedule(o.label());
    let options = ProtocolOptions::default();
    let dim = o.dim();

    let mut agent = AgentUnitary::identity(dim)?;
    let mut src = ShotSource::from_seed(seed);
    let mut total_shots = 0u64;
    let mut passes = 0usize;
    let mut min_fidelity = 0.0f64;
    while passes < COMPARE_MAX_PASSES {
        for round in &schedule.rounds {
            for s in 0..dim - 1 {
                let cfg = StageConfig {
                    target_j: s,
                    allowed_outcomes: (s..dim).collect(),
                    w_threshold: options.w_threshold,
                    max_iterations: options.max_iterations_per_stage,
                };
                let rs = RewardState {
                    w: round.w_reset,
                    r: round.r,
                    p: round.p,
                };
                let (next, record) = run_stage(&o, agent, &cfg, rs, &mut src, &options)?;
                agent = next;
                total_shots += record.iterations + record.masked_errors;
            }
        }
        passes += 1;
        min_fidelity = 1.0;
        for j in 0..dim {
            let (f, _) = crate::analysis::exact_overlap_fidelity(&o, &agent, j)?;
            min_fidelity = min_fidelity.min(f);
        }
        if min_fidelity >= COMPARE_FIDELITY_THRESHOLD {
            break;
        }
    }

    let shots = vqe_shots.unwrap_or_else(|| default_vqe_shots(o.label()));
    let vqe = run_vqe(&o, ShotMode::Finite(shots), 1e-3, 500, seed)?;
    Ok(CompareReport {
        observable: o.label().to_string(),
        fidelity_threshold: COMPARE_FIDELITY_THRESHOLD,
        rl_total_shots: total_shots,
        rl_min_overlap_fidelity: min_fidelity,
        rl_eigenvector_count: dim,
        rl_protocol_passes: passes,
        rl_meets_threshold: min_fidelity >= COMPARE_FIDELITY_THRESHOLD,
        vqe_total_shots: vqe.total_shots,
        vqe_ground_fidelity: vqe.ground_fidelity,
        vqe_eigenvector_count: 1,
        vqe_meets_threshold: vqe.ground_fidelity >= COMPARE_FIDELITY_THRESHOLD,
        shot_ratio: vqe.total_shots as f64 / total_shots as f64,
    })
}
