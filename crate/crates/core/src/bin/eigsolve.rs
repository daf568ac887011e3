//! Command line front end for the eigensolver simulator.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use eigsolve::experiment::{compare, run_experiment, run_vqe_experiment, ExperimentConfig};
use eigsolve::io;
use eigsolve::presets::PRESET_NAMES;
use eigsolve::rlsolver::{ProtocolOptions, RestartSchedule, Round};

#[derive(Parser)]
#[command(name = "eigsolve", version, about = "Single-shot RL eigensolver simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run batches of the staged RL protocol and report fidelities.
    Run(RunArgs),
    /// Run the shot-counting VQE baseline.
    Vqe(VqeArgs),
    /// Compare RL and VQE single-shot budgets on one observable.
    Compare(CompareArgs),
    /// Write a preset observable to a JSON file.
    Export(ExportArgs),
}

#[derive(Args)]
struct ObservableArgs {
    /// Built-in observable name.
    #[arg(long, value_parser = PRESET_NAMES.to_vec(), conflicts_with = "observable_file")]
    preset: Option<String>,
    /// Path to an observable JSON file.
    #[arg(long)]
    observable_file: Option<PathBuf>,
}

impl ObservableArgs {
    fn spec(&self) -> Result<String, String> {
        match (&self.preset, &self.observable_file) {
            (Some(name), None) => Ok(name.clone()),
            (None, Some(path)) => Ok(path.display().to_string()),
            _ => Err("exactly one of --preset or --observable-file is required".to_string()),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum PMode {
    /// p = 1 / r
    Inverse,
    /// p = 1.5 / r
    #[value(name = "inverse-1.5")]
    Inverse15,
}

impl PMode {
    fn apply(self, r: f64) -> f64 {
        match self {
            PMode::Inverse => 1.0 / r,
            PMode::Inverse15 => 1.5 / r,
        }
    }
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    observable: ObservableArgs,
    /// Number of independent runs.
    #[arg(long, default_value_t = 1)]
    runs: usize,
    /// Base seed; run i uses seed + i.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Reward factor for a single-round schedule.
    #[arg(long)]
    r: Option<f64>,
    /// Punishment factor; overrides --p-mode.
    #[arg(long)]
    p: Option<f64>,
    /// Rule deriving p from r when --p is not given.
    #[arg(long, value_enum, default_value_t = PMode::Inverse)]
    p_mode: PMode,
    /// Range-width threshold ending a stage.
    #[arg(long, default_value_t = 0.1)]
    w_threshold: f64,
    /// Comma-separated r values, one restart round each.
    #[arg(long, value_delimiter = ',')]
    rounds: Option<Vec<f64>>,
    /// Per-stage iteration cap.
    #[arg(long, default_value_t = 50_000)]
    max_iters: u64,
    /// Per-bit readout flip probability.
    #[arg(long, default_value_t = 0.0)]
    noise_eps: f64,
    /// Shots for post-run probability estimation.
    #[arg(long, default_value_t = 1000)]
    shots_per_step: usize,
    /// Directory for runs.jsonl, summary.csv, histogram.csv, metadata.json.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Record the full measurement outcome history per run.
    #[arg(long)]
    history: bool,
}

impl RunArgs {
    fn schedule(&self) -> Result<Option<RestartSchedule>, String> {
        if !(0.0..1.0).contains(&self.w_threshold) {
            return Err("--w-threshold must be in [0, 1)".to_string());
        }
        if !(0.0..=0.5).contains(&self.noise_eps) {
            return Err("--noise-eps must be in [0, 0.5]".to_string());
        }
        let check_r = |r: f64| {
            if (0.0..1.0).contains(&r) && r > 0.0 {
                Ok(())
            } else {
                Err(format!("reward factor r = {r} must be in (0, 1)"))
            }
        };
        if let Some(rs) = &self.rounds {
            if self.r.is_some() || self.p.is_some() {
                return Err("--rounds conflicts with --r and --p".to_string());
            }
            if rs.is_empty() {
                return Err("--rounds needs at least one value".to_string());
            }
            let mut rounds = Vec::new();
            for &r in rs {
                check_r(r)?;
                rounds.push(Round {
                    r,
                    p: self.p_mode.apply(r),
                    w_reset: 1.0,
                });
            }
            return Ok(Some(RestartSchedule { rounds }));
        }
        if let Some(r) = self.r {
            check_r(r)?;
            let p = self.p.unwrap_or_else(|| self.p_mode.apply(r));
            if p <= 1.0 {
                return Err(format!("punishment factor p = {p} must exceed 1"));
            }
            return Ok(Some(RestartSchedule::single(r, p)));
        }
        if self.p.is_some() {
            return Err("--p requires --r".to_string());
        }
        Ok(None)
    }
}

#[derive(Args)]
struct VqeArgs {
    #[command(flatten)]
    observable: ObservableArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Measurement shots per optimizer evaluation.
    #[arg(long)]
    shots_per_step: Option<usize>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    observable: ObservableArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// VQE measurement shots per optimizer evaluation.
    #[arg(long)]
    shots_per_step: Option<usize>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Args)]
struct ExportArgs {
    /// Built-in observable name.
    #[arg(long, value_parser = PRESET_NAMES.to_vec())]
    preset: String,
    /// Directory receiving <preset>.json.
    #[arg(long)]
    out_dir: PathBuf,
}

const EXIT_OK: u8 = 0;
const EXIT_CONFIG: u8 = 1;
const EXIT_ITER_CAP: u8 = 2;

fn main() -> ExitCode {
    // Exit code 2 is reserved for hitting an iteration cap, so flag and
    // usage errors map to 1 instead of clap's default.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.exit_code() == 0 { EXIT_OK } else { EXIT_CONFIG };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(EXIT_CONFIG)
        }
    }
}

fn dispatch(cli: Cli) -> Result<u8, String> {
    match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Vqe(args) => cmd_vqe(args),
        Command::Compare(args) => cmd_compare(args),
        Command::Export(args) => cmd_export(args),
    }
}

fn cmd_run(args: RunArgs) -> Result<u8, String> {
    let spec = args.observable.spec()?;
    let schedule = args.schedule()?;
    if args.runs == 0 {
        return Err("--runs must be at least 1".to_string());
    }
    let config = ExperimentConfig {
        observable: spec,
        schedule,
        runs: args.runs,
        base_seed: args.seed,
        estimate_shots: args.shots_per_step,
        options: ProtocolOptions {
            w_threshold: args.w_threshold,
            max_iterations_per_stage: args.max_iters,
            noise_eps: args.noise_eps,
            record_history: args.history,
        },
        out_dir: args.out_dir,
    };
    let outcome = run_experiment(&config).map_err(|e| e.to_string())?;

    println!(
        "runs: {}  converged: {}",
        outcome.outputs.len(),
        outcome.outputs.len() - outcome.non_converged_runs
    );
    for (metric, basis, stats) in &outcome.stats_rows {
        println!(
            "{metric} j={basis}: mean {:.4}  std {:.4}  N mean {:.1}  N range [{}, {}]",
            stats.mean_fidelity,
            stats.std_fidelity,
            stats.mean_iterations,
            stats.min_iterations,
            stats.max_iterations
        );
    }
    if outcome.non_converged_runs > 0 {
        eprintln!(
            "{} run(s) hit the iteration cap before converging",
            outcome.non_converged_runs
        );
        return Ok(EXIT_ITER_CAP);
    }
    Ok(EXIT_OK)
}

fn cmd_vqe(args: VqeArgs) -> Result<u8, String> {
    let spec = args.observable.spec()?;
    let (_, record) =
        run_vqe_experiment(&spec, args.shots_per_step, args.seed).map_err(|e| e.to_string())?;
    println!(
        "energy: {:.6}  ground fidelity: {:.4}  evals: {}  total shots: {}",
        record.final_energy, record.ground_fidelity, record.optimizer_evals, record.total_shots
    );
    if let Some(dir) = args.out_dir {
        std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
        let json = serde_json::to_string_pretty(&record).map_err(|e| e.to_string())?;
        std::fs::write(dir.join("vqe.json"), json + "\n").map_err(|e| e.to_string())?;
    }
    if !record.converged {
        eprintln!("optimizer stopped at the evaluation cap");
        return Ok(EXIT_ITER_CAP);
    }
    Ok(EXIT_OK)
}

fn cmd_compare(args: CompareArgs) -> Result<u8, String> {
    let spec = args.observable.spec()?;
    let report = compare(&spec, args.seed, args.shots_per_step).map_err(|e| e.to_string())?;
    println!(
        "RL: {} shots, {} eigenvectors, min overlap fidelity {:.4} (threshold {} {})",
        report.rl_total_shots,
        report.rl_eigenvector_count,
        report.rl_min_overlap_fidelity,
        report.fidelity_threshold,
        if report.rl_meets_threshold { "met" } else { "missed" }
    );
    println!(
        "VQE: {} shots, {} eigenvector, ground fidelity {:.4} (threshold {} {})",
        report.vqe_total_shots,
        report.vqe_eigenvector_count,
        report.vqe_ground_fidelity,
        report.fidelity_threshold,
        if report.vqe_meets_threshold { "met" } else { "missed" }
    );
    println!("VQE / RL shot ratio: {:.2}", report.shot_ratio);
    if let Some(dir) = args.out_dir {
        std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
        let json = serde_json::to_string_pretty(&report).map_err(|e| e.to_string())?;
        std::fs::write(dir.join("compare.json"), json + "\n").map_err(|e| e.to_string())?;
    }
    Ok(EXIT_OK)
}

fn cmd_export(args: ExportArgs) -> Result<u8, String> {
    let o = io::load_observable(&args.preset).map_err(|e| e.to_string())?;
    std::fs::create_dir_all(&args.out_dir).map_err(|e| e.to_string())?;
    let path = args.out_dir.join(format!("{}.json", args.preset));
    io::write_observable(&o, &path).map_err(|e| e.to_string())?;
    println!("wrote {}", path.display());
    Ok(EXIT_OK)
}
