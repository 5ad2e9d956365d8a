//! The Rubik's group as executable data: each face turn is a pair of 4-cycles
//! (one on edge slots, one on corner slots) where every cycle entry carries
//! the translation vector and spin action applied to the slot's occupant
//! before the occupants advance one step along the cycle.
//!
//! On top of the six generators sit three middle-slice moves (edge-only
//! 4-cycles, needed by the edge-cycling macros), the corner-twisting macro
//! used in phase 2, and the family of pure 3-edge-cycle macros used in
//! phase 4.

use crate::cube::{
    solved, CornerOrientation, CubeState, CubieId, Phase, CORNER_COUNT, CORNER_SLOT_COORD,
    EDGE_COUNT, EDGE_SLOT_COORD,
};
use rand::Rng;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MoveError {
    #[error("`{0}` is not a macro move")]
    NotMacro(String),
}

/// The six face quarter-turns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Generator {
    U,
    D,
    F,
    B,
    L,
    R,
}

impl Generator {
    pub const ALL: [Generator; 6] = [
        Generator::U,
        Generator::D,
        Generator::F,
        Generator::B,
        Generator::L,
        Generator::R,
    ];

    pub fn letter(self) -> char {
        match self {
            Generator::U => 'U',
            Generator::D => 'D',
            Generator::F => 'F',
            Generator::B => 'B',
            Generator::L => 'L',
            Generator::R => 'R',
        }
    }

    pub fn table(self) -> &'static MoveTable {
        match self {
            Generator::U => &TABLE_U,
            Generator::D => &TABLE_D,
            Generator::F => &TABLE_F,
            Generator::B => &TABLE_B,
            Generator::L => &TABLE_L,
            Generator::R => &TABLE_R,
        }
    }
}

/// Rotation axis of a middle-slice move.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn letter(self) -> char {
        match self {
            Axis::X => 'x',
            Axis::Y => 'y',
            Axis::Z => 'z',
        }
    }

    pub fn slice_table(self) -> &'static MoveTable {
        match self {
            Axis::X => &TABLE_MX,
            Axis::Y => &TABLE_MY,
            Axis::Z => &TABLE_MZ,
        }
    }

    /// The opposite-face pair perpendicular to this slice, in conventional
    /// order; the edge-cycling macros square one of the two.
    pub fn face_pair(self) -> (Generator, Generator) {
        match self {
            Axis::X => (Generator::U, Generator::D),
            Axis::Y => (Generator::U, Generator::D),
            Axis::Z => (Generator::F, Generator::B),
        }
    }

    /// Quarter-turn used to conjugate this axis's edge cycles out of the
    /// slice quartet. Must not flip edge spins, so only U/D/L/R qualify.
    pub fn bridge_conjugator(self) -> Generator {
        match self {
            Axis::X => Generator::D,
            Axis::Y => Generator::R,
            Axis::Z => Generator::R,
        }
    }
}

/// Spin operator attached to one slot of a move cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpinAction {
    Identity,
    /// Edge flip (involution).
    EdgeFlip,
    /// Clockwise corner twist (order three).
    CornerCw,
    /// Anticlockwise corner twist, inverse of `CornerCw`.
    CornerCcw,
}

impl SpinAction {
    pub fn inverse(self) -> Self {
        match self {
            SpinAction::Identity => SpinAction::Identity,
            SpinAction::EdgeFlip => SpinAction::EdgeFlip,
            SpinAction::CornerCw => SpinAction::CornerCcw,
            SpinAction::CornerCcw => SpinAction::CornerCw,
        }
    }
}

/// One slot of a move cycle: the occupant receives `translation` and `spin`,
/// then moves to the next entry's slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CycleEntry {
    pub slot: u8,
    pub translation: [i8; 3],
    pub spin: SpinAction,
}

const fn entry(slot: u8, translation: [i8; 3], spin: SpinAction) -> CycleEntry {
    CycleEntry {
        slot,
        translation,
        spin,
    }
}

/// A primitive move: an edge 4-cycle plus, for face turns, a corner 4-cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MoveTable {
    pub name: &'static str,
    pub edge_cycle: [CycleEntry; 4],
    pub corner_cycle: Option<[CycleEntry; 4]>,
}

use SpinAction::{CornerCcw, CornerCw, EdgeFlip, Identity};

pub static TABLE_D: MoveTable = MoveTable {
    name: "D",
    edge_cycle: [
        entry(1, [-1, -1, 0], Identity),
        entry(2, [1, -1, 0], Identity),
        entry(3, [1, 1, 0], Identity),
        entry(4, [-1, 1, 0], Identity),
    ],
    corner_cycle: Some([
        entry(13, [0, -1, 0], Identity),
        entry(14, [1, 0, 0], Identity),
        entry(15, [0, 1, 0], Identity),
        entry(16, [-1, 0, 0], Identity),
    ]),
};

pub static TABLE_U: MoveTable = MoveTable {
    name: "U",
    edge_cycle: [
        entry(5, [1, -1, 0], Identity),
        entry(6, [-1, -1, 0], Identity),
        entry(7, [-1, 1, 0], Identity),
        entry(8, [1, 1, 0], Identity),
    ],
    corner_cycle: Some([
        entry(17, [1, 0, 0], Identity),
        entry(18, [0, -1, 0], Identity),
        entry(19, [-1, 0, 0], Identity),
        entry(20, [0, 1, 0], Identity),
    ]),
};

pub static TABLE_L: MoveTable = MoveTable {
    name: "L",
    edge_cycle: [
        entry(4, [0, -1, 1], Identity),
        entry(10, [0, 1, 1], Identity),
        entry(6, [0, 1, -1], Identity),
        entry(9, [0, -1, -1], Identity),
    ],
    corner_cycle: Some([
        entry(15, [0, 0, 1], CornerCw),
        entry(19, [0, 1, 0], CornerCcw),
        entry(18, [0, 0, -1], CornerCw),
        entry(16, [0, -1, 0], CornerCcw),
    ]),
};

pub static TABLE_R: MoveTable = MoveTable {
    name: "R",
    edge_cycle: [
        entry(2, [0, 1, 1], Identity),
        entry(11, [0, -1, 1], Identity),
        entry(8, [0, -1, -1], Identity),
        entry(12, [0, 1, -1], Identity),
    ],
    corner_cycle: Some([
        entry(13, [0, 0, 1], CornerCw),
        entry(17, [0, -1, 0], CornerCcw),
        entry(20, [0, 0, -1], CornerCw),
        entry(14, [0, 1, 0], CornerCcw),
    ]),
};

pub static TABLE_F: MoveTable = MoveTable {
    name: "F",
    edge_cycle: [
        entry(1, [1, 0, 1], EdgeFlip),
        entry(9, [-1, 0, 1], EdgeFlip),
        entry(5, [-1, 0, -1], EdgeFlip),
        entry(11, [1, 0, -1], EdgeFlip),
    ],
    corner_cycle: Some([
        entry(13, [1, 0, 0], CornerCcw),
        entry(16, [0, 0, 1], CornerCw),
        entry(18, [-1, 0, 0], CornerCcw),
        entry(17, [0, 0, -1], CornerCw),
    ]),
};

pub static TABLE_B: MoveTable = MoveTable {
    name: "B",
    edge_cycle: [
        entry(3, [-1, 0, 1], EdgeFlip),
        entry(12, [1, 0, 1], EdgeFlip),
        entry(7, [1, 0, -1], EdgeFlip),
        entry(10, [-1, 0, -1], EdgeFlip),
    ],
    corner_cycle: Some([
        entry(14, [0, 0, 1], CornerCw),
        entry(20, [1, 0, 0], CornerCcw),
        entry(19, [0, 0, -1], CornerCw),
        entry(15, [-1, 0, 0], CornerCcw),
    ]),
};

// Middle-slice moves: edge-only 4-cycles on the slice quartets, spin-free.
// Translations are the slot-coordinate differences along the cycle, which a
// pure slice rotation forces (single-axis ±2 steps on this grid).

pub static TABLE_MX: MoveTable = MoveTable {
    name: "Mx",
    edge_cycle: [
        entry(1, [0, 0, 2], Identity),
        entry(5, [0, -2, 0], Identity),
        entry(7, [0, 0, -2], Identity),
        entry(3, [0, 2, 0], Identity),
    ],
    corner_cycle: None,
};

pub static TABLE_MY: MoveTable = MoveTable {
    name: "My",
    edge_cycle: [
        entry(2, [2, 0, 0], Identity),
        entry(4, [0, 0, 2], Identity),
        entry(6, [-2, 0, 0], Identity),
        entry(8, [0, 0, -2], Identity),
    ],
    corner_cycle: None,
};

pub static TABLE_MZ: MoveTable = MoveTable {
    name: "Mz",
    edge_cycle: [
        entry(9, [-2, 0, 0], Identity),
        entry(11, [0, -2, 0], Identity),
        entry(12, [2, 0, 0], Identity),
        entry(10, [0, 2, 0], Identity),
    ],
    corner_cycle: None,
};

/// Parameters of one pure 3-edge-cycle macro (the phase-4 action family).
///
/// The cycle is the commutator of a squared face with a perpendicular slice
/// quarter-turn: `P P M P P M⁻¹`. `swapped_pair` squares the second face of
/// the axis pair instead of the first, `mirrored` reverses the slice
/// direction, `inverse` swaps the commutator's two elements (yielding the
/// inverse cycle on the same three edges), and `conj` optionally conjugates
/// the whole macro by a spin-preserving quarter-turn so the cycle leaves the
/// slice quartet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EdgeCycleSpec {
    pub axis: Axis,
    pub swapped_pair: bool,
    pub mirrored: bool,
    pub inverse: bool,
    pub conj: Option<Conjugator>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Conjugator {
    pub gen: Generator,
    pub inv: bool,
}

/// A move: a primitive (face turn, inverse face turn, slice turn) or a named
/// macro expanding to a finite primitive sequence.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Move {
    Gen(Generator),
    GenInv(Generator),
    Square(Generator),
    Slice(Axis),
    SliceInv(Axis),
    /// `[A, B] = A B A⁻¹ B⁻¹`.
    Commutator(Box<Move>, Box<Move>),
    /// Phase-2 corner twisting macro: the squared R/D commutator.
    CornerTwist,
    CornerTwistInv,
    /// Phase-4 edge 3-cycle macro.
    EdgeCycle(EdgeCycleSpec),
}

impl Move {
    pub fn is_macro(&self) -> bool {
        !matches!(
            self,
            Move::Gen(_) | Move::GenInv(_) | Move::Slice(_) | Move::SliceInv(_)
        )
    }

    pub fn inverse(&self) -> Move {
        match self {
            Move::Gen(g) => Move::GenInv(*g),
            Move::GenInv(g) => Move::Gen(*g),
            Move::Square(g) => Move::Square(*g),
            Move::Slice(a) => Move::SliceInv(*a),
            Move::SliceInv(a) => Move::Slice(*a),
            Move::Commutator(a, b) => Move::Commutator(b.clone(), a.clone()),
            Move::CornerTwist => Move::CornerTwistInv,
            Move::CornerTwistInv => Move::CornerTwist,
            Move::EdgeCycle(spec) => Move::EdgeCycle(EdgeCycleSpec {
                inverse: !spec.inverse,
                ..*spec
            }),
        }
    }

    /// Flattens to the primitive moves realizing this move, in application
    /// order.
    pub fn flatten(&self) -> Vec<Move> {
        match self {
            Move::Gen(_) | Move::GenInv(_) | Move::Slice(_) | Move::SliceInv(_) => {
                vec![self.clone()]
            }
            Move::Square(g) => vec![Move::Gen(*g), Move::Gen(*g)],
            Move::Commutator(a, b) => {
                let mut out = a.flatten();
                out.extend(b.flatten());
                out.extend(a.inverse().flatten());
                out.extend(b.inverse().flatten());
                out
            }
            Move::CornerTwist => {
                let quarter = [
                    Move::Gen(Generator::R),
                    Move::Gen(Generator::D),
                    Move::GenInv(Generator::R),
                    Move::GenInv(Generator::D),
                ];
                quarter.iter().chain(quarter.iter()).cloned().collect()
            }
            Move::CornerTwistInv => {
                let quarter = [
                    Move::Gen(Generator::D),
                    Move::Gen(Generator::R),
                    Move::GenInv(Generator::D),
                    Move::GenInv(Generator::R),
                ];
                quarter.iter().chain(quarter.iter()).cloned().collect()
            }
            Move::EdgeCycle(spec) => edge_cycle_moves(spec),
        }
    }

    /// Expansion for macro moves; primitives are rejected.
    pub fn expand_macro(&self) -> Result<Vec<Move>, MoveError> {
        if !self.is_macro() {
            return Err(MoveError::NotMacro(format!("{self}")));
        }
        Ok(self.flatten())
    }

    pub fn apply(&self, state: &CubeState) -> CubeState {
        match self {
            Move::Gen(g) => apply_table(state, g.table(), false),
            Move::GenInv(g) => apply_table(state, g.table(), true),
            Move::Slice(a) => apply_table(state, a.slice_table(), false),
            Move::SliceInv(a) => apply_table(state, a.slice_table(), true),
            Move::Square(g) => {
                let once = apply_table(state, g.table(), false);
                apply_table(&once, g.table(), false)
            }
            _ => self
                .flatten()
                .iter()
                .fold(*state, |s, m| m.apply(&s)),
        }
    }
}

fn edge_cycle_moves(spec: &EdgeCycleSpec) -> Vec<Move> {
    let (first, second) = spec.axis.face_pair();
    let face = if spec.swapped_pair { second } else { first };
    let (m, m_inv) = if spec.mirrored {
        (Move::SliceInv(spec.axis), Move::Slice(spec.axis))
    } else {
        (Move::Slice(spec.axis), Move::SliceInv(spec.axis))
    };
    let g = Move::Gen(face);
    let mut core = if !spec.inverse {
        vec![g.clone(), g.clone(), m, g.clone(), g, m_inv]
    } else {
        vec![m, g.clone(), g.clone(), m_inv, g.clone(), g]
    };
    if let Some(c) = spec.conj {
        let open = if c.inv {
            Move::GenInv(c.gen)
        } else {
            Move::Gen(c.gen)
        };
        let mut out = vec![open.clone()];
        out.append(&mut core);
        out.push(open.inverse());
        out
    } else {
        core
    }
}

fn apply_table(state: &CubeState, table: &MoveTable, inverse: bool) -> CubeState {
    let mut out = *state;
    apply_cycle(&mut out, state, &table.edge_cycle, inverse);
    if let Some(cc) = &table.corner_cycle {
        apply_cycle(&mut out, state, cc, inverse);
    }
    out
}

fn apply_cycle(out: &mut CubeState, src: &CubeState, cycle: &[CycleEntry; 4], inverse: bool) {
    for k in 0..4 {
        let (from, to, t, spin) = if !inverse {
            (
                cycle[k].slot,
                cycle[(k + 1) % 4].slot,
                cycle[k].translation,
                cycle[k].spin,
            )
        } else {
            let t = cycle[k].translation;
            (
                cycle[(k + 1) % 4].slot,
                cycle[k].slot,
                [-t[0], -t[1], -t[2]],
                cycle[k].spin.inverse(),
            )
        };
        let cubie = src.occupancy[(from - 1) as usize];
        out.occupancy[(to - 1) as usize] = cubie;
        let d = &mut out.disp[(cubie - 1) as usize];
        d[0] += t[0];
        d[1] += t[1];
        d[2] += t[2];
        match spin {
            SpinAction::Identity => {}
            SpinAction::EdgeFlip => {
                let s = &mut out.edge_spin[(cubie - 1) as usize];
                *s = s.flipped();
            }
            SpinAction::CornerCw => {
                let s = &mut out.corner_spin[(cubie - 13) as usize];
                *s = s.twist_cw();
            }
            SpinAction::CornerCcw => {
                let s = &mut out.corner_spin[(cubie - 13) as usize];
                *s = s.twist_ccw();
            }
        }
    }
}

/// An ordered list of moves; application is left to right.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MoveSequence(pub Vec<Move>);

impl MoveSequence {
    pub fn new(moves: Vec<Move>) -> Self {
        MoveSequence(moves)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn apply(&self, state: &CubeState) -> CubeState {
        self.0.iter().fold(*state, |s, m| m.apply(&s))
    }

    /// Reversed order with each move inverted; applying a sequence and then
    /// its inverse is the identity transformation.
    pub fn inverse(&self) -> MoveSequence {
        MoveSequence(self.0.iter().rev().map(Move::inverse).collect())
    }
}

/// A move reduced to its net slot permutation, spin deltas, and (implied)
/// translations. Applying this is O(20) regardless of the underlying
/// primitive count, and two moves are equal as state transformations iff
/// their compiled forms are equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CompiledMove {
    /// Occupant of edge slot `i` (0-based) moves to edge slot `edge_perm[i]`.
    pub edge_perm: [u8; EDGE_COUNT],
    /// Occupant of edge slot `i` gets flipped.
    pub edge_flip: [bool; EDGE_COUNT],
    /// Occupant of corner slot `i` (0-based) moves to corner slot
    /// `corner_perm[i]`.
    pub corner_perm: [u8; CORNER_COUNT],
    /// Net clockwise twists (−1, 0, +1) applied to the occupant of corner
    /// slot `i`.
    pub corner_twist: [i8; CORNER_COUNT],
}

impl CompiledMove {
    pub fn identity() -> Self {
        let mut edge_perm = [0u8; EDGE_COUNT];
        for (i, p) in edge_perm.iter_mut().enumerate() {
            *p = i as u8;
        }
        let mut corner_perm = [0u8; CORNER_COUNT];
        for (i, p) in corner_perm.iter_mut().enumerate() {
            *p = i as u8;
        }
        CompiledMove {
            edge_perm,
            edge_flip: [false; EDGE_COUNT],
            corner_perm,
            corner_twist: [0; CORNER_COUNT],
        }
    }

    /// Extracts the net transformation by applying `moves` to the solved
    /// state. Valid because every move is a fixed composition of slot-indexed
    /// maps, so its net effect does not depend on the state it acts on.
    pub fn from_moves(moves: &[Move]) -> Self {
        let end = moves.iter().fold(solved(), |s, m| m.apply(&s));
        let mut cm = CompiledMove::identity();
        for slot in 0..EDGE_COUNT {
            let cubie = CubieId::new((slot + 1) as u8).unwrap();
            cm.edge_perm[slot] = end.slot_of(cubie).get() - 1;
            cm.edge_flip[slot] = end.edge_spin(cubie) == crate::cube::EdgeOrientation::Flipped;
        }
        for slot in 0..CORNER_COUNT {
            let cubie = CubieId::new((slot + 13) as u8).unwrap();
            cm.corner_perm[slot] = end.slot_of(cubie).get() - 13;
            cm.corner_twist[slot] = match end.corner_spin(cubie) {
                CornerOrientation::Zero => 0,
                CornerOrientation::Plus => 1,
                CornerOrientation::Minus => -1,
            };
        }
        cm
    }

    pub fn from_move(mv: &Move) -> Self {
        Self::from_moves(std::slice::from_ref(mv))
    }

    pub fn is_identity(&self) -> bool {
        *self == CompiledMove::identity()
    }

    #[allow(clippy::needless_range_loop)]
    pub fn apply(&self, state: &CubeState) -> CubeState {
        let mut out = *state;
        for slot in 0..EDGE_COUNT {
            let cubie = state.occupancy[slot] as usize;
            let dest = self.edge_perm[slot] as usize;
            out.occupancy[dest] = cubie as u8;
            let (src_c, dst_c) = (EDGE_SLOT_COORD[slot], EDGE_SLOT_COORD[dest]);
            let d = &mut out.disp[cubie - 1];
            d[0] += dst_c[0] - src_c[0];
            d[1] += dst_c[1] - src_c[1];
            d[2] += dst_c[2] - src_c[2];
            if self.edge_flip[slot] {
                let s = &mut out.edge_spin[cubie - 1];
                *s = s.flipped();
            }
        }
        for slot in 0..CORNER_COUNT {
            let cubie = state.occupancy[EDGE_COUNT + slot] as usize;
            let dest = self.corner_perm[slot] as usize;
            out.occupancy[EDGE_COUNT + dest] = cubie as u8;
            let (src_c, dst_c) = (CORNER_SLOT_COORD[slot], CORNER_SLOT_COORD[dest]);
            let d = &mut out.disp[cubie - 1];
            d[0] += dst_c[0] - src_c[0];
            d[1] += dst_c[1] - src_c[1];
            d[2] += dst_c[2] - src_c[2];
            let s = &mut out.corner_spin[cubie - 13];
            *s = match self.corner_twist[slot] {
                0 => *s,
                1 => s.twist_cw(),
                -1 => s.twist_ccw(),
                _ => unreachable!(),
            };
        }
        out
    }

    /// Count of edge slots whose occupant moves.
    pub fn moved_edges(&self) -> usize {
        self.edge_perm
            .iter()
            .enumerate()
            .filter(|(i, p)| **p as usize != *i)
            .count()
    }

    pub fn moved_corners(&self) -> usize {
        self.corner_perm
            .iter()
            .enumerate()
            .filter(|(i, p)| **p as usize != *i)
            .count()
    }

    pub fn touches_spins(&self) -> bool {
        self.edge_flip.contains(&true) || self.corner_twist.iter().any(|t| *t != 0)
    }
}

/// One entry of a phase's action set: the move, its display label (stable
/// across runs, used as the CLI trace vocabulary), and the precompiled
/// transformation used in training loops.
#[derive(Debug, Clone)]
pub struct PhaseAction {
    pub label: String,
    pub mv: Move,
    pub compiled: CompiledMove,
}

impl PhaseAction {
    pub fn from_move(mv: Move) -> Self {
        PhaseAction {
            label: mv.to_string(),
            compiled: CompiledMove::from_move(&mv),
            mv,
        }
    }
}

/// The action set each phase's agent selects from.
///
/// Phase 1: the twelve fundamental moves. Phase 2: the corner-twisting macro
/// plus U and D. Phase 3: U/D quarter-turns and the four remaining squares,
/// all of which preserve every spin. Phase 4: thirty-six pure 3-edge-cycle
/// macros (every 3-cycle of each slice quartet in both directions, plus
/// conjugated variants that let cycles cross between quartets), closed under
/// inversion.
pub fn phase_actions(phase: Phase) -> Vec<PhaseAction> {
    match phase {
        Phase::OrientEdges => {
            let mut out = Vec::with_capacity(12);
            for g in [
                Generator::U,
                Generator::D,
                Generator::B,
                Generator::F,
                Generator::L,
                Generator::R,
            ] {
                out.push(PhaseAction::from_move(Move::Gen(g)));
                out.push(PhaseAction::from_move(Move::GenInv(g)));
            }
            out
        }
        Phase::OrientCorners => vec![
            PhaseAction::from_move(Move::CornerTwist),
            PhaseAction::from_move(Move::Gen(Generator::U)),
            PhaseAction::from_move(Move::Gen(Generator::D)),
        ],
        Phase::PositionCorners => vec![
            PhaseAction::from_move(Move::Gen(Generator::U)),
            PhaseAction::from_move(Move::GenInv(Generator::U)),
            PhaseAction::from_move(Move::Gen(Generator::D)),
            PhaseAction::from_move(Move::GenInv(Generator::D)),
            PhaseAction::from_move(Move::Square(Generator::B)),
            PhaseAction::from_move(Move::Square(Generator::F)),
            PhaseAction::from_move(Move::Square(Generator::L)),
            PhaseAction::from_move(Move::Square(Generator::R)),
        ],
        Phase::PositionEdges => {
            let mut out = Vec::with_capacity(36);
            for axis in Axis::ALL {
                for inverse in [false, true] {
                    for swapped_pair in [false, true] {
                        for mirrored in [false, true] {
                            out.push(PhaseAction::from_move(Move::EdgeCycle(EdgeCycleSpec {
                                axis,
                                swapped_pair,
                                mirrored,
                                inverse,
                                conj: None,
                            })));
                        }
                    }
                }
            }
            for axis in Axis::ALL {
                for inverse in [false, true] {
                    for mirrored in [false, true] {
                        out.push(PhaseAction::from_move(Move::EdgeCycle(EdgeCycleSpec {
                            axis,
                            swapped_pair: false,
                            mirrored,
                            inverse,
                            conj: Some(Conjugator {
                                gen: axis.bridge_conjugator(),
                                inv: false,
                            }),
                        })));
                    }
                }
            }
            out
        }
    }
}

/// Scrambles the solved state with `length` uniform draws from `actions`.
pub fn scramble<R: Rng>(
    rng: &mut R,
    actions: &[PhaseAction],
    length: usize,
) -> (CubeState, MoveSequence) {
    assert!(length >= 1, "scramble length must be at least 1");
    assert!(!actions.is_empty(), "scramble needs a nonempty action set");
    let mut state = solved();
    let mut seq = Vec::with_capacity(length);
    for _ in 0..length {
        let a = &actions[rng.random_range(0..actions.len())];
        state = a.compiled.apply(&state);
        seq.push(a.mv.clone());
    }
    (state, MoveSequence(seq))
}

/// One verified property of the move algebra.
#[derive(Debug, Clone)]
pub struct GroupCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Default)]
pub struct GroupReport {
    pub checks: Vec<GroupCheck>,
}

impl GroupReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    fn push(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(GroupCheck {
            name: name.into(),
            passed,
            detail: detail.into(),
        });
    }
}

impl std::fmt::Display for GroupReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let width = self
            .checks
            .iter()
            .map(|c| c.name.len())
            .max()
            .unwrap_or(0);
        for c in &self.checks {
            writeln!(
                f,
                "{:<width$}  {}  {}",
                c.name,
                if c.passed { "PASS" } else { "FAIL" },
                c.detail,
                width = width
            )?;
        }
        let (pass, total) = (
            self.checks.iter().filter(|c| c.passed).count(),
            self.checks.len(),
        );
        writeln!(f, "{pass}/{total} checks passed")
    }
}

/// Verifies the structural properties of the generators and macros: order
/// four, inverses, zero-sum cycle translations, the orientation-preservation
/// classes, spin-preserving squares, and the 3-edge-cycle contract of the
/// phase-4 macros.
pub fn group_property_report() -> GroupReport {
    let mut report = GroupReport::default();

    for g in Generator::ALL {
        let cm = CompiledMove::from_move(&Move::Gen(g));
        let double = CompiledMove::from_moves(&[Move::Gen(g), Move::Gen(g)]);
        let quad = CompiledMove::from_moves(&vec![Move::Gen(g); 4]);
        let cancel = CompiledMove::from_moves(&[Move::Gen(g), Move::GenInv(g)]);

        report.push(
            format!("order({})=4", g.letter()),
            quad.is_identity() && !double.is_identity() && !cm.is_identity(),
            "fourth power is the identity, lower powers are not",
        );
        report.push(
            format!("{}∘{}⁻¹=id", g.letter(), g.letter()),
            cancel.is_identity(),
            "generator cancels against its inverse",
        );

        let table = g.table();
        let mut sums_ok = cycle_translation_sum(&table.edge_cycle) == [0, 0, 0];
        if let Some(cc) = &table.corner_cycle {
            sums_ok &= cycle_translation_sum(cc) == [0, 0, 0];
        }
        report.push(
            format!("translation-sum-zero({})", g.letter()),
            sums_ok,
            "per-cycle translation vectors sum to zero",
        );

        let flips = cm.edge_flip.iter().filter(|f| **f).count();
        let twists = cm.corner_twist.iter().filter(|t| **t != 0).count();
        let class_ok = match g {
            Generator::U | Generator::D => flips == 0 && twists == 0,
            Generator::L | Generator::R => flips == 0 && twists == 4,
            Generator::F | Generator::B => flips == 4 && twists == 4,
        };
        report.push(
            format!("orientation-class({})", g.letter()),
            class_ok,
            format!("{flips} edge flips, {twists} corner twists"),
        );

        report.push(
            format!("square-preserves-spins({}²)", g.letter()),
            !double.touches_spins(),
            "no flips or twists after a half-turn",
        );
    }

    let mut all_cycles_ok = true;
    let mut detail = String::new();
    for action in phase_actions(Phase::PositionEdges) {
        let cm = &action.compiled;
        let ok = cm.moved_edges() == 3 && cm.moved_corners() == 0 && !cm.touches_spins();
        if !ok {
            all_cycles_ok = false;
            detail = format!(
                "{} moves {} edges, {} corners, spins touched: {}",
                action.label,
                cm.moved_edges(),
                cm.moved_corners(),
                cm.touches_spins()
            );
            break;
        }
    }
    report.push(
        "edge-cycle-macros",
        all_cycles_ok,
        if all_cycles_ok {
            "all 36 macros cycle exactly 3 edges and fix everything else".to_string()
        } else {
            detail
        },
    );

    report
}

fn cycle_translation_sum(cycle: &[CycleEntry; 4]) -> [i8; 3] {
    let mut sum = [0i8; 3];
    for e in cycle {
        sum[0] += e.translation[0];
        sum[1] += e.translation[1];
        sum[2] += e.translation[2];
    }
    sum
}

/// CRC32 over a canonical serialization of the committed move tables; a
/// frozen constant in the tests guards against accidental edits.
pub fn table_checksum() -> u32 {
    let mut bytes = Vec::new();
    for table in [
        &TABLE_U, &TABLE_D, &TABLE_F, &TABLE_B, &TABLE_L, &TABLE_R, &TABLE_MX, &TABLE_MY,
        &TABLE_MZ,
    ] {
        bytes.extend_from_slice(table.name.as_bytes());
        let mut push_cycle = |cycle: &[CycleEntry; 4]| {
            for e in cycle {
                bytes.push(e.slot);
                bytes.extend_from_slice(&e.translation.map(|t| t as u8));
                bytes.push(match e.spin {
                    SpinAction::Identity => 0,
                    SpinAction::EdgeFlip => 1,
                    SpinAction::CornerCw => 2,
                    SpinAction::CornerCcw => 3,
                });
            }
        };
        push_cycle(&table.edge_cycle);
        if let Some(cc) = &table.corner_cycle {
            push_cycle(cc);
        }
    }
    crc32fast::hash(&bytes)
}
