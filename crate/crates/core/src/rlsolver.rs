//! The reinforcement-learning loop: reward/punishment range updates,
//! termination on the range amplitude, the (2ⁿ−1)-stage protocol with
//! masked outcomes, and the multi-round restart schedule.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::agent::{update_agent, AgentUnitary, RotationAngles};
use crate::environment::{
    measurement_flip_noise, outcome_distribution, single_shot, MeasurementDistribution, Observable,
    ShotSource,
};
use crate::error::Result;

/// Range amplitude with its reward and punishment ratios.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RewardState {
    /// Current range amplitude, in (0, 1].
    pub w: f64,
    /// Reward ratio, in (0, 1).
    pub r: f64,
    /// Punishment ratio, > 1.
    pub p: f64,
}

/// Shrink the range on a target hit, grow it otherwise. The amplitude is
/// clamped at 1.0: angles beyond ±π are redundant modulo 2π.
pub fn reward_update(rs: RewardState, outcome_m: usize, target_j: usize) -> RewardState {
    let w = if outcome_m == target_j {
        rs.w * rs.r
    } else {
        (rs.w * rs.p).min(1.0)
    };
    RewardState { w, ..rs }
}

/// Three independent uniform draws from w·[−π, π].
pub fn draw_angles(rs: RewardState, src: &mut ShotSource) -> RotationAngles {
    let mut draw = || (2.0 * src.next_uniform() - 1.0) * rs.w * PI;
    RotationAngles {
        theta: draw(),
        phi: draw(),
        lambda: draw(),
    }
}

/// One stage of the protocol: a fixed target and the outcomes still in play.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageConfig {
    pub target_j: usize,
    pub allowed_outcomes: Vec<usize>,
    pub w_threshold: f64,
    pub max_iterations: u64,
}

/// Tallies of masked-error outcomes, keyed by (stage index, outcome).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ErrorCounters {
    entries: Vec<ErrorTally>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorTally {
    pub stage: usize,
    pub outcome: usize,
    pub count: u64,
}

impl ErrorCounters {
    pub fn increment(&mut self, stage: usize, outcome: usize) {
        match self
            .entries
            .binary_search_by_key(&(stage, outcome), |e| (e.stage, e.outcome))
        {
            Ok(i) => self.entries[i].count += 1,
            Err(i) => self.entries.insert(
                i,
                ErrorTally {
                    stage,
                    outcome,
                    count: 1,
                },
            ),
        }
    }

    pub fn merge(&mut self, other: &ErrorCounters) {
        for e in &other.entries {
            for _ in 0..e.count {
                self.increment(e.stage, e.outcome);
            }
        }
    }

    pub fn get(&self, stage: usize, outcome: usize) -> u64 {
        self.entries
            .binary_search_by_key(&(stage, outcome), |e| (e.stage, e.outcome))
            .map(|i| self.entries[i].count)
            .unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.entries.iter().map(|e| e.count).sum()
    }

    pub fn entries(&self) -> &[ErrorTally] {
        &self.entries
    }
}

/// Outcome of a single stage run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub round: usize,
    pub stage: usize,
    /// Non-masked iterations in this stage.
    pub iterations: u64,
    /// Masked-error shots in this stage.
    pub masked_errors: u64,
    /// Per-outcome tallies of the masked errors.
    pub stage_errors: ErrorCounters,
    pub terminal_w: f64,
    pub converged: bool,
}

/// One full experiment: every round and stage, plus the final agent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub seed: u64,
    /// Total single-shot measurements, masked errors included.
    pub total_iterations: u64,
    /// Non-masked iterations per stage index, summed over rounds.
    pub stage_iterations: Vec<u64>,
    pub errors: ErrorCounters,
    pub stages: Vec<StageRecord>,
    pub converged: bool,
    pub final_agent: AgentUnitary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub outcome_history: Option<Vec<usize>>,
}

/// Ordered (r, p, w_reset) rounds; the agent carries over, w resets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RestartSchedule {
    pub rounds: Vec<Round>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Round {
    pub r: f64,
    pub p: f64,
    pub w_reset: f64,
}

impl RestartSchedule {
    pub fn single(r: f64, p: f64) -> Self {
        Self {
            rounds: vec![Round { r, p, w_reset: 1.0 }],
        }
    }

    /// One round per reward ratio, p = 1/r, w reset to 1.
    pub fn inverse_rounds(rs: &[f64]) -> Self {
        Self {
            rounds: rs
                .iter()
                .map(|&r| Round {
                    r,
                    p: 1.0 / r,
                    w_reset: 1.0,
                })
                .collect(),
        }
    }
}

/// Knobs shared by every run of a batch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProtocolOptions {
    pub w_threshold: f64,
    pub max_iterations_per_stage: u64,
    pub noise_eps: f64,
    pub record_history: bool,
}

impl Default for ProtocolOptions {
    fn default() -> Self {
        Self {
            w_threshold: 0.1,
            max_iterations_per_stage: 50_000,
            noise_eps: 0.0,
            record_history: false,
        }
    }
}

/// Run one stage with the default single-shot sampler.
pub fn run_stage(
    o: &Observable,
    d0: AgentUnitary,
    cfg: &StageConfig,
    rs0: RewardState,
    src: &mut ShotSource,
    options: &ProtocolOptions,
) -> Result<(AgentUnitary, StageRecord)> {
    run_stage_with_sampler(o, d0, cfg, rs0, src, options, 0, None, single_shot)
}

/// Stage loop with an injectable sampler, so tests can force outcomes.
#[allow(clippy::too_many_arguments)]
pub fn run_stage_with_sampler(
    o: &Observable,
    mut d: AgentUnitary,
    cfg: &StageConfig,
    mut rs: RewardState,
    src: &mut ShotSource,
    options: &ProtocolOptions,
    round: usize,
    mut history: Option<&mut Vec<usize>>,
    mut sampler: impl FnMut(&MeasurementDistribution, &mut ShotSource) -> usize,
) -> Result<(AgentUnitary, StageRecord)> {
    let mut iterations = 0u64;
    let mut masked = 0u64;
    let mut errors = ErrorCounters::default();
    let mut converged = true;
    while rs.w >= cfg.w_threshold {
        if iterations + masked >= cfg.max_iterations {
            converged = false;
            break;
        }
        let mut dist = outcome_distribution(o, &d, cfg.target_j)?;
        if options.noise_eps > 0.0 {
            dist = measurement_flip_noise(&dist, options.noise_eps)?;
        }
        let m = sampler(&dist, src);
        if let Some(h) = history.as_deref_mut() {
            h.push(m);
        }
        if !cfg.allowed_outcomes.contains(&m) {
            errors.increment(cfg.target_j, m);
            masked += 1;
            continue;
        }
        let angles = draw_angles(rs, src);
        d = update_agent(&d, m, cfg.target_j, angles)?;
        rs = reward_update(rs, m, cfg.target_j);
        iterations += 1;
    }
    Ok((
        d,
        StageRecord {
            round,
            stage: cfg.target_j,
            iterations,
            masked_errors: masked,
            stage_errors: errors,
            terminal_w: rs.w,
            converged,
        },
    ))
}

/// Run every round and stage of the protocol for one seed.
pub fn run_protocol(
    o: &Observable,
    schedule: &RestartSchedule,
    seed: u64,
    options: &ProtocolOptions,
) -> Result<RunRecord> {
    let dim = o.dim();
    let n_stages = dim - 1;
    let mut d = AgentUnitary::identity(dim)?;
    let mut src = ShotSource::from_seed(seed);
    let mut stages = Vec::new();
    let mut errors = ErrorCounters::default();
    let mut stage_iterations = vec![0u64; n_stages];
    let mut total = 0u64;
    let mut converged = true;
    let mut history = if options.record_history {
        Some(Vec::new())
    } else {
        None
    };
    for (round_idx, round) in schedule.rounds.iter().enumerate() {
        for s in 0..n_stages {
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
            let (next_d, record) = run_stage_with_sampler(
                o,
                d,
                &cfg,
                rs,
                &mut src,
                options,
                round_idx,
                history.as_mut(),
                single_shot,
            )?;
            d = next_d;
            stage_iterations[s] += record.iterations;
            total += record.iterations + record.masked_errors;
            converged &= record.converged;
            errors.merge(&record.stage_errors);
            stages.push(record);
        }
    }
    Ok(RunRecord {
        seed,
        total_iterations: total,
        stage_iterations,
        errors,
        stages,
        converged,
        final_agent: d,
        outcome_history: history,
    })
}

/// Seeded batch: run i uses seed base_seed + i; results keep run order.
pub fn run_batch(
    o: &Observable,
    schedule: &RestartSchedule,
    n_runs: usize,
    base_seed: u64,
    options: &ProtocolOptions,
) -> Result<Vec<RunRecord>> {
    (0..n_runs)
        .into_par_iter()
        .map(|i| run_protocol(o, schedule, base_seed + i as u64, options))
        .collect()
}
