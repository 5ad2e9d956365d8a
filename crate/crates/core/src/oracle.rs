//! Brute-force ground truth: breadth-first search over an action set, plus an
//! exhaustive scan of the reachable state space to bounded depth that checks
//! every structural invariant the environment relies on.
//!
//! The scan is the independent referee for the move semantics: it confirms
//! edge-flip parity, the mod-3 corner twist sum, that displacements are a
//! function of (cubie, slot) alone, that zero energy coincides with the
//! ground predicates, and that every generator acts bijectively on each BFS
//! layer.

use crate::cube::{solved, CubeState, SlotId, CUBIE_COUNT};
use crate::hamiltonian::{energy, is_ground, total_energy, CoefficientSet, PhaseHamiltonian};
use crate::moves::{MoveSequence, PhaseAction};
use crate::notation::parse_move;
use std::collections::hash_map::Entry;
use std::collections::HashMap;

/// Outcome of a bounded breadth-first search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BfsOutcome {
    /// A minimum-length action sequence reaching the target.
    Solved(MoveSequence),
    /// Exhausted the depth bound without reaching the target.
    NotFoundWithinDepth,
    /// The frontier outgrew the node budget before the depth bound.
    BudgetExceeded { nodes: usize },
}

/// Shortest path from `start` to any state satisfying `target`, searching
/// compositions of `actions` up to `max_depth` moves and at most
/// `node_budget` distinct states.
pub fn bfs_solve(
    start: &CubeState,
    actions: &[PhaseAction],
    max_depth: usize,
    node_budget: usize,
    target: impl Fn(&CubeState) -> bool,
) -> BfsOutcome {
    if target(start) {
        return BfsOutcome::Solved(MoveSequence::default());
    }
    // parent: state key -> (parent index in `frontier_states`, action index)
    let mut seen: HashMap<u128, usize> = HashMap::new();
    let mut states: Vec<CubeState> = vec![*start];
    let mut parents: Vec<(usize, usize)> = vec![(usize::MAX, usize::MAX)];
    seen.insert(start.canonical_key(), 0);

    let mut layer_start = 0;
    for _depth in 0..max_depth {
        let layer_end = states.len();
        if layer_start == layer_end {
            return BfsOutcome::NotFoundWithinDepth;
        }
        for idx in layer_start..layer_end {
            let state = states[idx];
            for (ai, action) in actions.iter().enumerate() {
                let next = action.compiled.apply(&state);
                let key = next.canonical_key();
                if let Entry::Vacant(slot) = seen.entry(key) {
                    if target(&next) {
                        let mut moves = vec![actions[ai].mv.clone()];
                        let mut cursor = idx;
                        while parents[cursor].0 != usize::MAX {
                            let (p, a) = parents[cursor];
                            moves.push(actions[a].mv.clone());
                            cursor = p;
                        }
                        moves.reverse();
                        return BfsOutcome::Solved(MoveSequence(moves));
                    }
                    slot.insert(states.len());
                    states.push(next);
                    parents.push((idx, ai));
                    if states.len() > node_budget {
                        return BfsOutcome::BudgetExceeded {
                            nodes: states.len(),
                        };
                    }
                }
            }
        }
        layer_start = layer_end;
    }
    BfsOutcome::NotFoundWithinDepth
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ViolationKind {
    OddEdgeFlipParity,
    CornerTwistSum,
    DisplacementPathDependent,
    EnergyGroundMismatch,
    GeneratorNotInjective,
    OccupancyBroken,
}

#[derive(Debug, Clone)]
pub struct Violation {
    pub kind: ViolationKind,
    pub detail: String,
    /// Move sequence from the solved state to the offending state.
    pub witness: MoveSequence,
}

#[derive(Debug, Clone, Default)]
pub struct ScanReport {
    /// Distinct states found at each depth, starting from depth 0.
    pub layer_sizes: Vec<usize>,
    pub states_checked: usize,
    pub violations: Vec<Violation>,
}

impl ScanReport {
    pub fn clean(&self) -> bool {
        self.violations.is_empty()
    }
}

impl std::fmt::Display for ScanReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "reachable states by depth: {:?}", self.layer_sizes)?;
        writeln!(f, "states checked: {}", self.states_checked)?;
        if self.violations.is_empty() {
            writeln!(f, "invariants: all hold")
        } else {
            writeln!(f, "violations ({}):", self.violations.len())?;
            for v in &self.violations {
                writeln!(f, "  {:?}: {} (witness: {})", v.kind, v.detail, v.witness)?;
            }
            Ok(())
        }
    }
}

/// The twelve fundamental moves as an action set.
pub fn fundamental_actions() -> Vec<PhaseAction> {
    crate::moves::phase_actions(crate::cube::Phase::OrientEdges)
}

/// Enumerates every state reachable within `depth` fundamental moves and
/// checks the full invariant battery on each.
#[allow(clippy::needless_range_loop)]
pub fn reachable_invariant_scan(depth: usize, coeffs: &CoefficientSet) -> ScanReport {
    let actions = fundamental_actions();
    let mut report = ScanReport::default();

    let mut seen: HashMap<u128, usize> = HashMap::new();
    let mut states: Vec<CubeState> = vec![solved()];
    let mut parents: Vec<(usize, usize)> = vec![(usize::MAX, usize::MAX)];
    seen.insert(solved().canonical_key(), 0);
    report.layer_sizes.push(1);

    // (cubie, slot) -> displacement observed the first time the pair showed
    // up anywhere in the scan.
    let mut disp_by_slot: HashMap<(u8, u8), [i8; 3]> = HashMap::new();

    let witness = |parents: &Vec<(usize, usize)>, mut idx: usize| {
        let mut moves = Vec::new();
        while parents[idx].0 != usize::MAX {
            let (p, a) = parents[idx];
            moves.push(actions[a].mv.clone());
            idx = p;
        }
        moves.reverse();
        MoveSequence(moves)
    };

    let check_state = |state: &CubeState,
                           idx: usize,
                           parents: &Vec<(usize, usize)>,
                           disp_by_slot: &mut HashMap<(u8, u8), [i8; 3]>,
                           report: &mut ScanReport| {
        report.states_checked += 1;
        if let Err(e) = state.validate() {
            report.violations.push(Violation {
                kind: ViolationKind::OccupancyBroken,
                detail: e.to_string(),
                witness: witness(parents, idx),
            });
        }
        if !state.flipped_edge_count().is_multiple_of(2) {
            report.violations.push(Violation {
                kind: ViolationKind::OddEdgeFlipParity,
                detail: format!("{} flipped edges", state.flipped_edge_count()),
                witness: witness(parents, idx),
            });
        }
        if state.corner_twist_sum().rem_euclid(3) != 0 {
            report.violations.push(Violation {
                kind: ViolationKind::CornerTwistSum,
                detail: format!("twist sum {}", state.corner_twist_sum()),
                witness: witness(parents, idx),
            });
        }
        for slot_id in 1..=CUBIE_COUNT as u8 {
            let slot = SlotId::new(slot_id).unwrap();
            let cubie = state.occupant(slot);
            let d = state.disp(cubie);
            match disp_by_slot.entry((cubie.get(), slot_id)) {
                Entry::Vacant(v) => {
                    v.insert(d);
                }
                Entry::Occupied(o) => {
                    if *o.get() != d {
                        report.violations.push(Violation {
                            kind: ViolationKind::DisplacementPathDependent,
                            detail: format!(
                                "cubie {} in slot {slot_id}: {:?} vs {:?}",
                                cubie.get(),
                                o.get(),
                                d
                            ),
                            witness: witness(parents, idx),
                        });
                    }
                }
            }
            // The committed coordinate tables are the closed form of the
            // same function.
            if CubeState::expected_disp(cubie, slot) != d {
                report.violations.push(Violation {
                    kind: ViolationKind::DisplacementPathDependent,
                    detail: format!(
                        "cubie {} in slot {slot_id}: {:?} differs from coordinate table",
                        cubie.get(),
                        d
                    ),
                    witness: witness(parents, idx),
                });
            }
        }
        for h in PhaseHamiltonian::ALL {
            let e = energy(state, h, coeffs);
            if (e == 0.0) != is_ground(state, h, coeffs) {
                report.violations.push(Violation {
                    kind: ViolationKind::EnergyGroundMismatch,
                    detail: format!("{h:?}: energy {e} vs ground predicate"),
                    witness: witness(parents, idx),
                });
            }
        }
        if (total_energy(state, coeffs) == 0.0) != state.is_solved() {
            report.violations.push(Violation {
                kind: ViolationKind::EnergyGroundMismatch,
                detail: "total energy zero does not coincide with solved".into(),
                witness: witness(parents, idx),
            });
        }
    };

    check_state(&states[0], 0, &parents, &mut disp_by_slot, &mut report);

    let mut layer_start = 0;
    for _d in 0..depth {
        let layer_end = states.len();
        // Each generator must act injectively on the layer.
        for (ai, action) in actions.iter().enumerate() {
            let mut images: HashMap<u128, usize> = HashMap::new();
            for idx in layer_start..layer_end {
                let img = action.compiled.apply(&states[idx]).canonical_key();
                if let Some(prev) = images.insert(img, idx) {
                    report.violations.push(Violation {
                        kind: ViolationKind::GeneratorNotInjective,
                        detail: format!(
                            "{} collapses two depth-{} states (indices {prev}, {idx})",
                            actions[ai].label, _d
                        ),
                        witness: witness(&parents, idx),
                    });
                }
            }
        }
        for idx in layer_start..layer_end {
            let state = states[idx];
            for (ai, action) in actions.iter().enumerate() {
                let next = action.compiled.apply(&state);
                if let Entry::Vacant(slot) = seen.entry(next.canonical_key()) {
                    slot.insert(states.len());
                    states.push(next);
                    parents.push((idx, ai));
                    let new_idx = states.len() - 1;
                    check_state(
                        &states[new_idx],
                        new_idx,
                        &parents,
                        &mut disp_by_slot,
                        &mut report,
                    );
                }
            }
        }
        report.layer_sizes.push(states.len() - layer_end);
        layer_start = layer_end;
    }

    report
}

/// Convenience for tests: parse and apply a scramble in one go.
pub fn state_after(scramble: &str) -> CubeState {
    let seq = crate::notation::parse_sequence(scramble).expect("valid notation");
    seq.apply(&solved())
}

/// Parses one move, panicking on bad notation. Test helper.
pub fn mv(token: &str) -> crate::moves::Move {
    parse_move(token).expect("valid notation")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cube::Phase;
    use crate::moves::{phase_actions, scramble};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn bfs_finds_single_move_inverse() {
        let start = state_after("F");
        let actions = fundamental_actions();
        match bfs_solve(&start, &actions, 2, 1_000_000, CubeState::is_solved) {
            BfsOutcome::Solved(seq) => {
                assert_eq!(seq.len(), 1);
                assert_eq!(seq.to_string(), "F'");
                assert!(seq.apply(&start).is_solved());
            }
            other => panic!("unexpected outcome {other:?}"),
        }
    }

    #[test]
    fn bfs_on_commutator_of_commuting_moves_is_empty() {
        let start = state_after("U D U' D'");
        assert!(start.is_solved());
        let actions = fundamental_actions();
        match bfs_solve(&start, &actions, 1, 1_000, CubeState::is_solved) {
            BfsOutcome::Solved(seq) => assert!(seq.is_empty()),
            other => panic!("unexpected outcome {other:?}"),
        }
    }

    #[test]
    fn bfs_budget_exceeded_is_reported_not_fatal() {
        let start = state_after("F U R");
        let actions = fundamental_actions();
        match bfs_solve(&start, &actions, 3, 50, CubeState::is_solved) {
            BfsOutcome::BudgetExceeded { nodes } => assert!(nodes > 50),
            other => panic!("expected budget exhaustion, got {other:?}"),
        }
    }

    #[test]
    fn depth_k_scramble_solvable_within_depth_k() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let actions = fundamental_actions();
        for len in 1..=3usize {
            for _ in 0..4 {
                let (state, seq) = scramble(&mut rng, &actions, len);
                // The reversed scramble is a witness, so BFS at depth `len`
                // must succeed.
                assert!(seq.inverse().apply(&state).is_solved());
                match bfs_solve(&state, &actions, len, 10_000_000, CubeState::is_solved) {
                    BfsOutcome::Solved(sol) => {
                        assert!(sol.len() <= len);
                        assert!(sol.apply(&state).is_solved());
                    }
                    other => panic!("unexpected outcome {other:?}"),
                }
            }
        }
    }

    #[test]
    fn depth_one_layer_has_twelve_states() {
        let report = reachable_invariant_scan(1, &CoefficientSet::default());
        assert!(report.clean(), "\n{report}");
        assert_eq!(report.layer_sizes, vec![1, 12]);
    }

    #[test]
    fn scan_depth_two_holds_all_invariants() {
        let report = reachable_invariant_scan(2, &CoefficientSet::default());
        assert!(report.clean(), "\n{report}");
        assert_eq!(report.layer_sizes[..2], [1, 12]);
        assert!(report.layer_sizes[2] > 100);
    }

    #[test]
    fn phase4_actions_solve_a_cross_quartet_cycle() {
        // F U applied to solved mixes edges across slice quartets; reduce it
        // to a pure edge permutation by BFS-solving the other families first
        // is overkill — instead verify the phase-4 set can invert its own
        // conjugated cycles composed across axes.
        let actions = phase_actions(Phase::PositionEdges);
        let a = &actions[24]; // first conjugated macro
        let b = &actions[30]; // conjugated macro on another axis
        let state = b.compiled.apply(&a.compiled.apply(&solved()));
        match bfs_solve(&state, &actions, 2, 10_000_000, CubeState::is_solved) {
            BfsOutcome::Solved(sol) => {
                assert!(sol.len() <= 2);
                assert!(sol.apply(&state).is_solved());
            }
            other => panic!("unexpected outcome {other:?}"),
        }
    }
}
