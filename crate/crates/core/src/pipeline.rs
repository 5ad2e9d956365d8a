//! The full solver: chain the four trained agents, each running greedily
//! against its own Hamiltonian until ground or step cap, and the evaluation
//! harness that scores the chain over random scrambles with an exact replay
//! check on every reported success.

use crate::cube::{CubeState, Phase};
use crate::ddqn::{select_action, PhaseConfig};
use crate::hamiltonian::{is_ground, CoefficientSet};
use crate::moves::{phase_actions, scramble, MoveSequence, PhaseAction};
use crate::neural::{MlpModel, NeuralError};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::io::Write;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Neural(#[from] NeuralError),
    #[error("model for phase {phase} has dims {got:?}, config expects {want:?}")]
    ModelMismatch {
        phase: u8,
        want: [usize; 4],
        got: [usize; 4],
    },
    #[error("replay of a reported success did not reach the solved state (episode {episode})")]
    ReplayMismatch { episode: usize },
}

/// The four trained agents and their configs, in phase order.
pub struct PhaseSet {
    pub models: [MlpModel; 4],
    pub cfgs: [PhaseConfig; 4],
}

impl PhaseSet {
    pub fn validate(&self) -> Result<(), PipelineError> {
        for (model, cfg) in self.models.iter().zip(&self.cfgs) {
            if model.dims != cfg.dims || model.phase != cfg.phase.index() {
                return Err(PipelineError::ModelMismatch {
                    phase: cfg.phase.index(),
                    want: cfg.dims,
                    got: model.dims,
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct PhaseOutcome {
    pub phase: Phase,
    pub success: bool,
    /// Actions taken, one per step (macros count as one action).
    pub actions: MoveSequence,
    pub action_labels: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub phases: Vec<PhaseOutcome>,
    pub solved: bool,
    /// Total actions across all phases.
    pub total_moves: usize,
    pub failure_phase: Option<Phase>,
    pub final_state: CubeState,
}

impl SolveResult {
    /// All actions across phases, concatenated in application order.
    pub fn concatenated(&self) -> MoveSequence {
        MoveSequence(
            self.phases
                .iter()
                .flat_map(|p| p.actions.0.iter().cloned())
                .collect(),
        )
    }
}

/// Observer invoked after every applied action; used by the CLI trace mode.
pub type StepObserver<'a> = &'a mut dyn FnMut(Phase, usize, &str, &CubeState);

/// Runs the four phases in order on `state`, greedily under each model and
/// capped by each phase's step rule evaluated at `scramble_len`. A phase
/// that hits its cap without reaching its ground marks the failure and stops
/// the chain.
pub fn solve(
    state: &CubeState,
    scramble_len: usize,
    set: &PhaseSet,
    coeffs: &CoefficientSet,
    mut observer: Option<StepObserver>,
) -> Result<SolveResult, PipelineError> {
    set.validate()?;
    let mut current = *state;
    let mut phases = Vec::with_capacity(4);
    let mut failure_phase = None;
    let mut total_moves = 0;

    for (model, cfg) in set.models.iter().zip(&set.cfgs) {
        let actions = phase_actions(cfg.phase);
        let h = cfg.hamiltonian();
        let mut outcome = PhaseOutcome {
            phase: cfg.phase,
            success: is_ground(&current, h, coeffs),
            actions: MoveSequence::default(),
            action_labels: Vec::new(),
        };
        if !outcome.success {
            let cap = cfg.step_rule.cap(scramble_len);
            let mut dummy_rng = ChaCha8Rng::seed_from_u64(0);
            for step in 0..cap {
                let q = model.forward(&current.observe(cfg.phase))?;
                let a = select_action(&q, 0.0, &mut dummy_rng);
                current = actions[a].compiled.apply(&current);
                outcome.actions.0.push(actions[a].mv.clone());
                outcome.action_labels.push(actions[a].label.clone());
                if let Some(obs) = observer.as_mut() {
                    obs(cfg.phase, step, &actions[a].label, &current);
                }
                if is_ground(&current, h, coeffs) {
                    outcome.success = true;
                    break;
                }
            }
        }
        total_moves += outcome.actions.len();
        let success = outcome.success;
        phases.push(outcome);
        if !success {
            failure_phase = Some(cfg.phase);
            break;
        }
    }

    Ok(SolveResult {
        solved: failure_phase.is_none() && current.is_solved(),
        phases,
        total_moves,
        failure_phase,
        final_state: current,
    })
}

/// Per-scramble-length success tallies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LenBin {
    pub len: usize,
    pub episodes: usize,
    /// Successes of each phase among episodes that reached it.
    pub phase_success: [usize; 4],
    /// Episodes that reached each phase.
    pub phase_attempts: [usize; 4],
    pub total_success: usize,
}

#[derive(Debug, Clone)]
pub struct EvalReport {
    pub bins: Vec<LenBin>,
    pub episodes: usize,
    pub total_success: usize,
}

impl EvalReport {
    pub fn total_rate(&self) -> f64 {
        self.total_success as f64 / self.episodes as f64
    }

    /// Success rate of one phase conditional on reaching it.
    pub fn phase_rate(&self, phase: Phase) -> f64 {
        let idx = (phase.index() - 1) as usize;
        let (mut s, mut n) = (0, 0);
        for b in &self.bins {
            s += b.phase_success[idx];
            n += b.phase_attempts[idx];
        }
        if n == 0 {
            0.0
        } else {
            s as f64 / n as f64
        }
    }
}

/// Scores the chained solver over `episodes` scrambles drawn from the twelve
/// fundamental moves with lengths uniform in 1..=`max_scramble`. Every
/// reported success is replayed move by move from the scrambled state and
/// must land exactly on the solved cube.
pub fn evaluate_full(
    set: &PhaseSet,
    coeffs: &CoefficientSet,
    episodes: usize,
    max_scramble: usize,
    seed: u64,
) -> Result<EvalReport, PipelineError> {
    set.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fundamental: Vec<PhaseAction> = phase_actions(Phase::OrientEdges);
    let mut bins: Vec<LenBin> = (1..=max_scramble)
        .map(|len| LenBin {
            len,
            episodes: 0,
            phase_success: [0; 4],
            phase_attempts: [0; 4],
            total_success: 0,
        })
        .collect();
    let mut total_success = 0;

    for episode in 0..episodes {
        let len = rng.random_range(1..=max_scramble);
        let (start, _) = scramble(&mut rng, &fundamental, len);
        let result = solve(&start, len, set, coeffs, None)?;
        let bin = &mut bins[len - 1];
        bin.episodes += 1;
        for p in &result.phases {
            let idx = (p.phase.index() - 1) as usize;
            bin.phase_attempts[idx] += 1;
            if p.success {
                bin.phase_success[idx] += 1;
            }
        }
        if result.solved {
            // Exact replay check.
            let replayed = result.concatenated().apply(&start);
            if replayed != result.final_state || !replayed.is_solved() {
                return Err(PipelineError::ReplayMismatch { episode });
            }
            bin.total_success += 1;
            total_success += 1;
        }
    }

    Ok(EvalReport {
        bins,
        episodes,
        total_success,
    })
}

/// Writes the evaluation report as CSV, one row per scramble length.
pub fn write_eval_csv(path: &Path, report: &EvalReport) -> std::io::Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(
        out,
        "scramble_len,episodes,phase1,phase2,phase3,phase4,total"
    )?;
    for b in &report.bins {
        let rate = |s: usize, n: usize| {
            if n == 0 {
                String::from("")
            } else {
                format!("{}", s as f64 / n as f64)
            }
        };
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            b.len,
            b.episodes,
            rate(b.phase_success[0], b.phase_attempts[0]),
            rate(b.phase_success[1], b.phase_attempts[1]),
            rate(b.phase_success[2], b.phase_attempts[2]),
            rate(b.phase_success[3], b.phase_attempts[3]),
            rate(b.total_success, b.episodes),
        )?;
    }
    out.flush()
}
