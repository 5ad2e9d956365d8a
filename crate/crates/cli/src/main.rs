//! `qube`: train the four phase agents, solve scrambles with them, evaluate
//! the full chain, and verify the move algebra against the brute-force
//! oracle.

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use qube_core::config::RunConfig;
use qube_core::cube::{solved, Phase};
use qube_core::ddqn::{train_phase, EarlyStop, PhaseConfig};
use qube_core::hamiltonian::CoefficientSet;
use qube_core::moves::group_property_report;
use qube_core::net::net_diagram;
use qube_core::neural;
use qube_core::notation::parse_sequence;
use qube_core::oracle::reachable_invariant_scan;
use qube_core::pipeline::{evaluate_full, solve, write_eval_csv, PhaseSet};

#[derive(Parser)]
#[command(name = "qube", about = "Four-phase Hamiltonian-reward cube solver", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train one phase agent and write its model and metrics.
    Train {
        /// Phase to train (1..=4).
        #[arg(long)]
        phase: u8,
        /// Key-value config file with hyperparameter overrides.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Output model file.
        #[arg(long)]
        out: PathBuf,
        /// Per-episode metrics CSV.
        #[arg(long)]
        metrics: Option<PathBuf>,
        /// Episode budget (defaults to the phase's configured budget).
        #[arg(long)]
        episodes: Option<usize>,
        /// Stop early once the moving success rate reaches this value.
        #[arg(long)]
        stop_at: Option<f64>,
    },
    /// Solve a scramble with the four trained agents.
    Solve {
        /// Directory holding phase1.mlp .. phase4.mlp.
        #[arg(long)]
        models: PathBuf,
        /// Scramble in move notation, e.g. "F U R2".
        #[arg(long)]
        scramble: String,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Print the cube net after every action.
        #[arg(long)]
        trace: bool,
    },
    /// Evaluate the full chain over random scrambles.
    Eval {
        #[arg(long)]
        models: PathBuf,
        #[arg(long, default_value_t = 1000)]
        episodes: usize,
        #[arg(long, default_value_t = 50)]
        max_scramble: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Per-scramble-length results CSV.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the move algebra and scan reachable states for invariant
    /// violations.
    Verify {
        /// Exit nonzero if any check fails.
        #[arg(long)]
        strict: bool,
        /// Breadth-first scan depth over the twelve fundamental moves.
        #[arg(long, default_value_t = 4)]
        depth: usize,
    },
}

fn load_config(path: &Option<PathBuf>) -> Result<RunConfig> {
    match path {
        None => Ok(RunConfig::empty()),
        Some(p) => RunConfig::load(p).with_context(|| format!("loading config {}", p.display())),
    }
}

fn load_phase_set(dir: &Path, config: &RunConfig) -> Result<PhaseSet> {
    let mut models = Vec::with_capacity(4);
    let mut cfgs = Vec::with_capacity(4);
    for phase in Phase::ALL {
        let path = dir.join(format!("phase{}.mlp", phase.index()));
        let model = neural::load(&path, Some(phase.index()))
            .with_context(|| format!("loading model {}", path.display()))?;
        models.push(model);
        cfgs.push(config.phase_config(phase)?);
    }
    Ok(PhaseSet {
        models: models.try_into().map_err(|_| anyhow::anyhow!("expected 4 models"))?,
        cfgs: cfgs.try_into().map_err(|_| anyhow::anyhow!("expected 4 configs"))?,
    })
}

fn cmd_train(
    phase: u8,
    config: &Option<PathBuf>,
    seed: u64,
    out: &Path,
    metrics: &Option<PathBuf>,
    episodes: Option<usize>,
    stop_at: Option<f64>,
) -> Result<bool> {
    let phase = Phase::from_index(phase)?;
    let config = load_config(config)?;
    let cfg: PhaseConfig = config.phase_config(phase)?;
    let coeffs: CoefficientSet = config.coefficient_set()?;
    let budget = episodes.unwrap_or(cfg.episodes);
    let early = stop_at.map(|target| EarlyStop { target });

    eprintln!(
        "training phase {} ({:?}): dims {:?}, {} episodes, scrambles {}..={}, seed {}",
        phase.index(),
        phase,
        cfg.dims,
        budget,
        cfg.scramble_min,
        cfg.scramble_max,
        seed
    );
    let t0 = std::time::Instant::now();
    let (model, outcome) = train_phase(cfg, coeffs, seed, budget, early)?;
    let elapsed = t0.elapsed();
    neural::save(&model, out)?;
    if let Some(metrics_path) = metrics {
        qube_core::ddqn::write_metrics_csv(metrics_path, &outcome.stats)?;
    }
    println!(
        "phase {} trained: {} episodes in {:.1?}, final moving success {:.3}{}",
        phase.index(),
        outcome.stats.len(),
        elapsed,
        outcome.final_moving_success(),
        if outcome.stopped_early {
            " (stopped early)"
        } else {
            ""
        }
    );
    Ok(true)
}

fn cmd_solve(models: &Path, scramble: &str, config: &Option<PathBuf>, trace: bool) -> Result<bool> {
    let config = load_config(config)?;
    let set = load_phase_set(models, &config)?;
    let coeffs = config.coefficient_set()?;
    let seq = parse_sequence(scramble)?;
    if seq.is_empty() {
        bail!("empty scramble");
    }
    let start = seq.apply(&solved());
    println!("scramble: {seq}");
    if trace {
        println!("{}", net_diagram(&start));
    }
    let mut observer = |phase: Phase, step: usize, label: &str, state: &qube_core::CubeState| {
        println!("phase {} step {:>3}: {label}", phase.index(), step + 1);
        println!("{}", net_diagram(state));
    };
    let result = solve(
        &start,
        seq.len(),
        &set,
        &coeffs,
        if trace { Some(&mut observer) } else { None },
    )?;
    for p in &result.phases {
        println!(
            "phase {} ({:?}): {} in {} moves{}",
            p.phase.index(),
            p.phase,
            if p.success { "solved" } else { "FAILED" },
            p.actions.len(),
            if p.actions.is_empty() {
                String::new()
            } else {
                format!(": {}", p.action_labels.join(" "))
            }
        );
    }
    if result.solved {
        println!("solved in {} actions", result.total_moves);
    } else {
        println!(
            "failed at phase {}",
            result.failure_phase.map(|p| p.index()).unwrap_or(0)
        );
    }
    Ok(result.solved)
}

fn cmd_eval(
    models: &Path,
    episodes: usize,
    max_scramble: usize,
    seed: u64,
    config: &Option<PathBuf>,
    out: &Option<PathBuf>,
) -> Result<bool> {
    let config = load_config(config)?;
    let set = load_phase_set(models, &config)?;
    let coeffs = config.coefficient_set()?;
    let report = evaluate_full(&set, &coeffs, episodes, max_scramble, seed)?;
    println!(
        "episodes: {}   total success: {:.3}",
        report.episodes,
        report.total_rate()
    );
    for phase in Phase::ALL {
        println!(
            "  phase {} success (conditional): {:.3}",
            phase.index(),
            report.phase_rate(phase)
        );
    }
    if let Some(path) = out {
        write_eval_csv(path, &report)?;
        println!("per-length results written to {}", path.display());
    }
    Ok(true)
}

fn cmd_verify(strict: bool, depth: usize) -> Result<bool> {
    let report = group_property_report();
    print!("{report}");
    let scan = reachable_invariant_scan(depth, &CoefficientSet::default());
    print!("{scan}");
    let ok = report.all_passed() && scan.clean();
    if !ok && strict {
        return Ok(false);
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Train {
            phase,
            config,
            seed,
            out,
            metrics,
            episodes,
            stop_at,
        } => cmd_train(*phase, config, *seed, out, metrics, *episodes, *stop_at),
        Command::Solve {
            models,
            scramble,
            config,
            trace,
        } => cmd_solve(models, scramble, config, *trace),
        Command::Eval {
            models,
            episodes,
            max_scramble,
            seed,
            config,
            out,
        } => cmd_eval(models, *episodes, *max_scramble, *seed, config, out),
        Command::Verify { strict, depth } => cmd_verify(*strict, *depth),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
