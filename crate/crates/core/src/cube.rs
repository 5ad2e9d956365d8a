//! Cube state space: cubie identities, grid displacements, spins, and the
//! per-phase observation encodings fed to the Q-networks.
//!
//! Cubies are numbered 1..=12 (edges) and 13..=20 (corners); slot `i` is cubie
//! `i`'s home position. A corner can never occupy an edge slot or vice versa,
//! so the two families live on separate sublattices and are stored separately.

use thiserror::Error;

pub const EDGE_COUNT: usize = 12;
pub const CORNER_COUNT: usize = 8;
pub const CUBIE_COUNT: usize = 20;

/// Grid coordinates of the twelve edge slots, indexed by slot (id − 1).
///
/// Derived by integrating the generators' translation vectors around their
/// cycles; every face-turn translation is exactly the coordinate difference
/// between consecutive slots of its cycle, which is what makes displacements
/// path-independent.
pub const EDGE_SLOT_COORD: [[i8; 3]; EDGE_COUNT] = [
    [0, 0, 0],   // 1
    [-1, -1, 0], // 2
    [0, -2, 0],  // 3
    [1, -1, 0],  // 4
    [0, 0, 2],   // 5
    [1, -1, 2],  // 6
    [0, -2, 2],  // 7
    [-1, -1, 2], // 8
    [1, 0, 1],   // 9
    [1, -2, 1],  // 10
    [-1, 0, 1],  // 11
    [-1, -2, 1], // 12
];

/// Grid coordinates of the eight corner slots, indexed by slot (id − 13).
pub const CORNER_SLOT_COORD: [[i8; 3]; CORNER_COUNT] = [
    [0, 0, 0],   // 13
    [0, -1, 0],  // 14
    [1, -1, 0],  // 15
    [1, 0, 0],   // 16
    [0, 0, 1],   // 17
    [1, 0, 1],   // 18
    [1, -1, 1],  // 19
    [0, -1, 1],  // 20
];

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StateError {
    #[error("cubie id {0} outside 1..=20")]
    BadCubieId(u8),
    #[error("slot id {0} outside 1..=20")]
    BadSlotId(u8),
    #[error("invalid phase index {0}, expected 1..=4")]
    BadPhase(u8),
    #[error("occupancy is not a kind-preserving bijection: {0}")]
    BrokenOccupancy(String),
}

/// One of the twenty movable cubies. Ids 1..=12 are edges, 13..=20 corners.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CubieId(u8);

impl CubieId {
    pub fn new(id: u8) -> Result<Self, StateError> {
        if (1..=20).contains(&id) {
            Ok(CubieId(id))
        } else {
            Err(StateError::BadCubieId(id))
        }
    }

    pub fn get(self) -> u8 {
        self.0
    }

    pub fn is_edge(self) -> bool {
        self.0 <= 12
    }

    pub fn is_corner(self) -> bool {
        self.0 > 12
    }

    /// Index into edge-family arrays. Panics on corners.
    pub fn edge_index(self) -> usize {
        debug_assert!(self.is_edge());
        (self.0 - 1) as usize
    }

    /// Index into corner-family arrays. Panics on edges.
    pub fn corner_index(self) -> usize {
        debug_assert!(self.is_corner());
        (self.0 - 13) as usize
    }

    pub fn edges() -> impl Iterator<Item = CubieId> {
        (1..=12).map(CubieId)
    }

    pub fn corners() -> impl Iterator<Item = CubieId> {
        (13..=20).map(CubieId)
    }

    pub fn all() -> impl Iterator<Item = CubieId> {
        (1..=20).map(CubieId)
    }
}

/// A lattice position; slot `i` is the home of cubie `i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SlotId(u8);

impl SlotId {
    pub fn new(id: u8) -> Result<Self, StateError> {
        if (1..=20).contains(&id) {
            Ok(SlotId(id))
        } else {
            Err(StateError::BadSlotId(id))
        }
    }

    pub fn get(self) -> u8 {
        self.0
    }

    pub fn is_edge(self) -> bool {
        self.0 <= 12
    }

    pub fn is_corner(self) -> bool {
        self.0 > 12
    }

    pub fn coord(self) -> [i8; 3] {
        if self.is_edge() {
            EDGE_SLOT_COORD[(self.0 - 1) as usize]
        } else {
            CORNER_SLOT_COORD[(self.0 - 13) as usize]
        }
    }
}

/// Edge spin under the shifted observable: eigenvalue 0 when oriented, −1
/// when flipped. The squared eigenvalue {0, 1} is what the edge-spin
/// Hamiltonian consumes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum EdgeOrientation {
    #[default]
    Oriented,
    Flipped,
}

impl EdgeOrientation {
    pub fn eigenvalue(self) -> i8 {
        match self {
            EdgeOrientation::Oriented => 0,
            EdgeOrientation::Flipped => -1,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            EdgeOrientation::Oriented => EdgeOrientation::Flipped,
            EdgeOrientation::Flipped => EdgeOrientation::Oriented,
        }
    }
}

/// Corner spin: the three eigenstates of the corner orientation observable.
/// A clockwise twist sends Zero→Plus→Minus→Zero; anticlockwise is the
/// inverse. Three twists of either kind restore the state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum CornerOrientation {
    Plus,
    #[default]
    Zero,
    Minus,
}

impl CornerOrientation {
    pub fn eigenvalue(self) -> i8 {
        match self {
            CornerOrientation::Plus => 1,
            CornerOrientation::Zero => 0,
            CornerOrientation::Minus => -1,
        }
    }

    /// Clockwise twist (the three-cycle permutation matrix acting on basis
    /// vectors: |0⟩→|+⟩, |+⟩→|−⟩, |−⟩→|0⟩).
    pub fn twist_cw(self) -> Self {
        match self {
            CornerOrientation::Zero => CornerOrientation::Plus,
            CornerOrientation::Plus => CornerOrientation::Minus,
            CornerOrientation::Minus => CornerOrientation::Zero,
        }
    }

    /// Anticlockwise twist, inverse of [`Self::twist_cw`].
    pub fn twist_ccw(self) -> Self {
        match self {
            CornerOrientation::Zero => CornerOrientation::Minus,
            CornerOrientation::Minus => CornerOrientation::Plus,
            CornerOrientation::Plus => CornerOrientation::Zero,
        }
    }
}

/// The four solver phases, in training order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Phase {
    OrientEdges,
    OrientCorners,
    PositionCorners,
    PositionEdges,
}

impl Phase {
    pub const ALL: [Phase; 4] = [
        Phase::OrientEdges,
        Phase::OrientCorners,
        Phase::PositionCorners,
        Phase::PositionEdges,
    ];

    pub fn from_index(idx: u8) -> Result<Self, StateError> {
        match idx {
            1 => Ok(Phase::OrientEdges),
            2 => Ok(Phase::OrientCorners),
            3 => Ok(Phase::PositionCorners),
            4 => Ok(Phase::PositionEdges),
            other => Err(StateError::BadPhase(other)),
        }
    }

    pub fn index(self) -> u8 {
        match self {
            Phase::OrientEdges => 1,
            Phase::OrientCorners => 2,
            Phase::PositionCorners => 3,
            Phase::PositionEdges => 4,
        }
    }

    /// Observation vector length per phase (the input-neuron counts).
    ///
    /// Phase 2 uses 8 inputs, one per corner slot: smaller encodings cap
    /// the reachable success rate far below what the phase needs.
    pub fn observation_len(self) -> usize {
        match self {
            Phase::OrientEdges => 12,
            Phase::OrientCorners => 8,
            Phase::PositionCorners => 24,
            Phase::PositionEdges => 36,
        }
    }
}

/// The four corner slots whose occupants the phase-2 twisting macro adjusts
/// (three in the bottom layer, one in the top).
pub const TWIST_TARGET_SLOTS: [u8; 4] = [13, 14, 16, 20];

/// Full configuration of the cube: which cubie sits in each slot, every
/// cubie's accumulated grid displacement, and every cubie's spin.
///
/// Plain `Copy` value; all operations on it are pure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CubeState {
    /// Slot-indexed (slot id − 1): the cubie id occupying each slot.
    pub(crate) occupancy: [u8; CUBIE_COUNT],
    /// Cubie-indexed (cubie id − 1): grid steps from the home slot.
    pub(crate) disp: [[i8; 3]; CUBIE_COUNT],
    /// Cubie-indexed (edge id − 1).
    pub(crate) edge_spin: [EdgeOrientation; EDGE_COUNT],
    /// Cubie-indexed (corner id − 13).
    pub(crate) corner_spin: [CornerOrientation; CORNER_COUNT],
}

/// The solved configuration: identity occupancy, zero displacements, all
/// spins in the reference orientation.
pub fn solved() -> CubeState {
    let mut occupancy = [0u8; CUBIE_COUNT];
    for (i, slot) in occupancy.iter_mut().enumerate() {
        *slot = (i + 1) as u8;
    }
    CubeState {
        occupancy,
        disp: [[0; 3]; CUBIE_COUNT],
        edge_spin: [EdgeOrientation::Oriented; EDGE_COUNT],
        corner_spin: [CornerOrientation::Zero; CORNER_COUNT],
    }
}

impl CubeState {
    pub fn occupant(&self, slot: SlotId) -> CubieId {
        CubieId(self.occupancy[(slot.get() - 1) as usize])
    }

    pub fn slot_of(&self, cubie: CubieId) -> SlotId {
        let pos = self
            .occupancy
            .iter()
            .position(|&c| c == cubie.get())
            .expect("every cubie occupies exactly one slot");
        SlotId((pos + 1) as u8)
    }

    pub fn disp(&self, cubie: CubieId) -> [i8; 3] {
        self.disp[(cubie.get() - 1) as usize]
    }

    pub fn edge_spin(&self, cubie: CubieId) -> EdgeOrientation {
        self.edge_spin[cubie.edge_index()]
    }

    pub fn corner_spin(&self, cubie: CubieId) -> CornerOrientation {
        self.corner_spin[cubie.corner_index()]
    }

    /// True iff every displacement is zero and every spin is in the reference
    /// orientation; equivalently, the total Hamiltonian energy is zero.
    pub fn is_solved(&self) -> bool {
        self.disp.iter().all(|d| *d == [0, 0, 0])
            && self.edge_spin.iter().all(|s| *s == EdgeOrientation::Oriented)
            && self
                .corner_spin
                .iter()
                .all(|s| *s == CornerOrientation::Zero)
    }

    /// The displacement a cubie must carry when sitting in `slot`, from the
    /// slot-coordinate tables. Used by the oracle to check path independence.
    pub fn expected_disp(cubie: CubieId, slot: SlotId) -> [i8; 3] {
        debug_assert_eq!(cubie.is_edge(), slot.is_edge());
        let home = SlotId(cubie.get()).coord();
        let here = slot.coord();
        [here[0] - home[0], here[1] - home[1], here[2] - home[2]]
    }

    /// Phase-specific observation vector.
    ///
    /// Phases 1 and 2: spin eigenvalues in slot order (12 edge values, 8
    /// corner values). Slot-indexed spin patterns evolve as a deterministic
    /// function of themselves under every action, while cubie-indexed ones
    /// depend on the hidden occupancy; the slot view is what makes the
    /// orientation games Markov in their observations. Phase 3: the 8
    /// corners' displacement components in cubie order. Phase 4: the same
    /// for the 12 edges (displacements determine the occupancy, so these
    /// are complete as well).
    pub fn observe(&self, phase: Phase) -> Vec<f64> {
        match phase {
            Phase::OrientEdges => (1..=12)
                .map(|slot| self.edge_spin(self.occupant(SlotId(slot))).eigenvalue() as f64)
                .collect(),
            Phase::OrientCorners => (13..=20)
                .map(|slot| {
                    self.corner_spin(self.occupant(SlotId(slot))).eigenvalue() as f64
                })
                .collect(),
            Phase::PositionCorners => CubieId::corners()
                .flat_map(|c| self.disp(c).into_iter().map(|n| n as f64))
                .collect(),
            Phase::PositionEdges => CubieId::edges()
                .flat_map(|c| self.disp(c).into_iter().map(|n| n as f64))
                .collect(),
        }
    }

    /// Observation with a raw 1-based phase index; rejects anything outside
    /// 1..=4.
    pub fn observe_indexed(&self, phase: u8) -> Result<Vec<f64>, StateError> {
        Ok(self.observe(Phase::from_index(phase)?))
    }

    /// Checks the structural invariants that `apply` preserves by
    /// construction: kind-respecting bijective occupancy.
    pub fn validate(&self) -> Result<(), StateError> {
        let mut seen = [false; CUBIE_COUNT];
        for (i, &c) in self.occupancy.iter().enumerate() {
            if !(1..=20).contains(&c) {
                return Err(StateError::BrokenOccupancy(format!(
                    "slot {} holds invalid id {c}",
                    i + 1
                )));
            }
            let slot_is_edge = i < EDGE_COUNT;
            if slot_is_edge != (c <= 12) {
                return Err(StateError::BrokenOccupancy(format!(
                    "slot {} holds wrong-kind cubie {c}",
                    i + 1
                )));
            }
            if seen[(c - 1) as usize] {
                return Err(StateError::BrokenOccupancy(format!(
                    "cubie {c} appears twice"
                )));
            }
            seen[(c - 1) as usize] = true;
        }
        Ok(())
    }

    /// Copy with one edge spin replaced. Analysis helper: the result need
    /// not be reachable (single flips violate parity), but every energy is a
    /// total function.
    pub fn with_edge_spin(mut self, cubie: CubieId, spin: EdgeOrientation) -> Self {
        self.edge_spin[cubie.edge_index()] = spin;
        self
    }

    /// Copy with one corner spin replaced. Analysis helper.
    pub fn with_corner_spin(mut self, cubie: CubieId, spin: CornerOrientation) -> Self {
        self.corner_spin[cubie.corner_index()] = spin;
        self
    }

    /// Copy with one displacement replaced. Analysis helper.
    pub fn with_displacement(mut self, cubie: CubieId, disp: [i8; 3]) -> Self {
        self.disp[(cubie.get() - 1) as usize] = disp;
        self
    }

    /// Number of flipped edges — even for every reachable state.
    pub fn flipped_edge_count(&self) -> usize {
        self.edge_spin
            .iter()
            .filter(|s| **s == EdgeOrientation::Flipped)
            .count()
    }

    /// Sum of corner twist eigenvalues — ≡ 0 (mod 3) for every reachable
    /// state.
    pub fn corner_twist_sum(&self) -> i32 {
        self.corner_spin
            .iter()
            .map(|s| s.eigenvalue() as i32)
            .sum()
    }

    /// Packs occupancy and spins into a 128-bit key, injective on reachable
    /// states (displacements are a function of occupancy there).
    pub fn canonical_key(&self) -> u128 {
        let mut key: u128 = 0;
        for &c in &self.occupancy {
            key = (key << 5) | (c as u128);
        }
        for s in &self.edge_spin {
            key = (key << 1) | ((*s == EdgeOrientation::Flipped) as u128);
        }
        for s in &self.corner_spin {
            let bits = match s {
                CornerOrientation::Zero => 0u128,
                CornerOrientation::Plus => 1,
                CornerOrientation::Minus => 2,
            };
            key = (key << 2) | bits;
        }
        key
    }
}
