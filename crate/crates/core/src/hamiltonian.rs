//! The four Ising-style Hamiltonians and the energy-based reward.
//!
//! Position energies evaluate `J^{ij} δ^{lm} n_{il}² n_{jm}² + B^{il} n_{il}²`
//! over one cubie family, with `n` the integer grid displacements. Spin
//! energies swap the squared displacement components for squared spin
//! eigenvalues: the corner observable's {−1, 0, +1} or the shifted edge
//! observable's {0, −1}. With positive coefficients every energy is
//! nonnegative and vanishes exactly on its ground condition; the four ground
//! conditions jointly pin the solved state, their only common member.
//!
//! All eigenvalues are small integers, so energies are exact in f64 and the
//! ground test is `== 0.0` with no tolerance.

use crate::cube::{CubeState, CubieId, Phase, CORNER_COUNT, EDGE_COUNT};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum CoefficientError {
    #[error("J matrix for {family}: expected {want}×{want}, got {got} entries")]
    JDims {
        family: &'static str,
        want: usize,
        got: usize,
    },
    #[error("B for {family}: expected {want} entries, got {got}")]
    BDims {
        family: &'static str,
        want: usize,
        got: usize,
    },
    #[error("J matrix for {family} not symmetric at ({i},{j})")]
    NotSymmetric {
        family: &'static str,
        i: usize,
        j: usize,
    },
    #[error("{what} for {family} contains a negative or non-finite entry")]
    NotPositive {
        family: &'static str,
        what: &'static str,
    },
    #[error("B for {family} must be strictly positive everywhere")]
    ZeroB { family: &'static str },
}

/// The energy functions in the order the phases minimize them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PhaseHamiltonian {
    EdgeSpin,
    CornerSpin,
    CornerPosition,
    EdgePosition,
}

impl PhaseHamiltonian {
    pub const ALL: [PhaseHamiltonian; 4] = [
        PhaseHamiltonian::EdgeSpin,
        PhaseHamiltonian::CornerSpin,
        PhaseHamiltonian::CornerPosition,
        PhaseHamiltonian::EdgePosition,
    ];
}

impl From<Phase> for PhaseHamiltonian {
    fn from(p: Phase) -> Self {
        match p {
            Phase::OrientEdges => PhaseHamiltonian::EdgeSpin,
            Phase::OrientCorners => PhaseHamiltonian::CornerSpin,
            Phase::PositionCorners => PhaseHamiltonian::CornerPosition,
            Phase::PositionEdges => PhaseHamiltonian::EdgePosition,
        }
    }
}

/// Symmetric coupling matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Coupling {
    n: usize,
    data: Vec<f64>,
}

impl Coupling {
    pub fn diagonal(n: usize) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        Coupling { n, data }
    }

    pub fn uniform(n: usize) -> Self {
        Coupling {
            n,
            data: vec![1.0; n * n],
        }
    }

    pub fn from_rows(family: &'static str, n: usize, data: Vec<f64>) -> Result<Self, CoefficientError> {
        if data.len() != n * n {
            return Err(CoefficientError::JDims {
                family,
                want: n,
                got: data.len(),
            });
        }
        if data.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(CoefficientError::NotPositive { family, what: "J" });
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if data[i * n + j] != data[j * n + i] {
                    return Err(CoefficientError::NotSymmetric { family, i, j });
                }
            }
        }
        Ok(Coupling { n, data })
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.n).all(|i| {
            (0..self.n).all(|j| i == j || self.get(i, j) == 0.0)
        })
    }
}

fn check_b(family: &'static str, want: usize, b: &[f64]) -> Result<(), CoefficientError> {
    if b.len() != want {
        return Err(CoefficientError::BDims {
            family,
            want,
            got: b.len(),
        });
    }
    if b.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(CoefficientError::NotPositive { family, what: "B" });
    }
    if b.contains(&0.0) {
        return Err(CoefficientError::ZeroB { family });
    }
    Ok(())
}

/// The positive J and B tensors parameterizing the four Hamiltonians.
///
/// Default: diagonal J, all-ones B. That makes each energy a strictly
/// monotone function of defect count and size, which keeps the reward
/// landscape free of gratuitous local minima.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSet {
    pub j_edge_spin: Coupling,
    pub j_corner_spin: Coupling,
    pub j_edge_pos: Coupling,
    pub j_corner_pos: Coupling,
    /// Per-edge field for the spin Hamiltonian.
    pub b_edge_spin: Vec<f64>,
    pub b_corner_spin: Vec<f64>,
    /// Per-cubie, per-axis field for the position Hamiltonians, row-major
    /// cubie × axis.
    pub b_edge_pos: Vec<f64>,
    pub b_corner_pos: Vec<f64>,
}

impl Default for CoefficientSet {
    fn default() -> Self {
        CoefficientSet {
            j_edge_spin: Coupling::diagonal(EDGE_COUNT),
            j_corner_spin: Coupling::diagonal(CORNER_COUNT),
            j_edge_pos: Coupling::diagonal(EDGE_COUNT),
            j_corner_pos: Coupling::diagonal(CORNER_COUNT),
            b_edge_spin: vec![1.0; EDGE_COUNT],
            b_corner_spin: vec![1.0; CORNER_COUNT],
            b_edge_pos: vec![1.0; EDGE_COUNT * 3],
            b_corner_pos: vec![1.0; CORNER_COUNT * 3],
        }
    }
}

impl CoefficientSet {
    /// All couplings set to one (the fully connected variant).
    pub fn uniform() -> Self {
        CoefficientSet {
            j_edge_spin: Coupling::uniform(EDGE_COUNT),
            j_corner_spin: Coupling::uniform(CORNER_COUNT),
            j_edge_pos: Coupling::uniform(EDGE_COUNT),
            j_corner_pos: Coupling::uniform(CORNER_COUNT),
            ..CoefficientSet::default()
        }
    }

    pub fn validate(&self) -> Result<(), CoefficientError> {
        check_b("edge spin", EDGE_COUNT, &self.b_edge_spin)?;
        check_b("corner spin", CORNER_COUNT, &self.b_corner_spin)?;
        check_b("edge position", EDGE_COUNT * 3, &self.b_edge_pos)?;
        check_b("corner position", CORNER_COUNT * 3, &self.b_corner_pos)?;
        Ok(())
    }
}

#[allow(clippy::needless_range_loop)]
fn quadratic_energy(v: &[f64], j: &Coupling, b: &[f64]) -> f64 {
    let n = v.len();
    let mut e = 0.0;
    if j.is_diagonal() {
        for i in 0..n {
            e += j.get(i, i) * v[i] * v[i];
        }
    } else {
        for i in 0..n {
            if v[i] == 0.0 {
                continue;
            }
            for l in 0..n {
                e += j.get(i, l) * v[i] * v[l];
            }
        }
    }
    for i in 0..n {
        e += b[i] * v[i];
    }
    e
}

/// Energy of one phase Hamiltonian. Nonnegative for every valid coefficient
/// set; zero exactly when the phase's ground condition holds.
pub fn energy(state: &CubeState, which: PhaseHamiltonian, coeffs: &CoefficientSet) -> f64 {
    match which {
        PhaseHamiltonian::EdgeSpin => {
            // v_i = [S'_i]² ∈ {0, 1}
            let v: Vec<f64> = CubieId::edges()
                .map(|c| {
                    let s = state.edge_spin(c).eigenvalue() as f64;
                    s * s
                })
                .collect();
            quadratic_energy(&v, &coeffs.j_edge_spin, &coeffs.b_edge_spin)
        }
        PhaseHamiltonian::CornerSpin => {
            let v: Vec<f64> = CubieId::corners()
                .map(|c| {
                    let s = state.corner_spin(c).eigenvalue() as f64;
                    s * s
                })
                .collect();
            quadratic_energy(&v, &coeffs.j_corner_spin, &coeffs.b_corner_spin)
        }
        PhaseHamiltonian::CornerPosition => position_energy(
            state,
            CubieId::corners(),
            &coeffs.j_corner_pos,
            &coeffs.b_corner_pos,
        ),
        PhaseHamiltonian::EdgePosition => position_energy(
            state,
            CubieId::edges(),
            &coeffs.j_edge_pos,
            &coeffs.b_edge_pos,
        ),
    }
}

#[allow(clippy::needless_range_loop)]
fn position_energy(
    state: &CubeState,
    cubies: impl Iterator<Item = CubieId>,
    j: &Coupling,
    b: &[f64],
) -> f64 {
    // w[i][l] = n_{il}²; the J term contracts the component index with δ^{lm}.
    let w: Vec<[f64; 3]> = cubies
        .map(|c| {
            let d = state.disp(c);
            [
                (d[0] as f64) * (d[0] as f64),
                (d[1] as f64) * (d[1] as f64),
                (d[2] as f64) * (d[2] as f64),
            ]
        })
        .collect();
    let n = w.len();
    let mut e = 0.0;
    if j.is_diagonal() {
        for i in 0..n {
            let jii = j.get(i, i);
            for l in 0..3 {
                e += jii * w[i][l] * w[i][l];
            }
        }
    } else {
        for i in 0..n {
            for jdx in 0..n {
                let jij = j.get(i, jdx);
                if jij == 0.0 {
                    continue;
                }
                for l in 0..3 {
                    e += jij * w[i][l] * w[jdx][l];
                }
            }
        }
    }
    for i in 0..n {
        for l in 0..3 {
            e += b[i * 3 + l] * w[i][l];
        }
    }
    e
}

/// Sum of the four energies; zero iff the state is solved.
pub fn total_energy(state: &CubeState, coeffs: &CoefficientSet) -> f64 {
    PhaseHamiltonian::ALL
        .iter()
        .map(|h| energy(state, *h, coeffs))
        .sum()
}

/// True iff the phase's ground condition holds: all relevant spins in
/// reference orientation, or all relevant displacements zero. Independent of
/// the coefficient values (they only scale the defect terms).
pub fn is_ground(state: &CubeState, which: PhaseHamiltonian, _coeffs: &CoefficientSet) -> bool {
    match which {
        PhaseHamiltonian::EdgeSpin => {
            CubieId::edges().all(|c| state.edge_spin(c).eigenvalue() == 0)
        }
        PhaseHamiltonian::CornerSpin => {
            CubieId::corners().all(|c| state.corner_spin(c).eigenvalue() == 0)
        }
        PhaseHamiltonian::CornerPosition => CubieId::corners().all(|c| state.disp(c) == [0, 0, 0]),
        PhaseHamiltonian::EdgePosition => CubieId::edges().all(|c| state.disp(c) == [0, 0, 0]),
    }
}

/// Reward for landing in `next_state`: the negated phase energy, plus the
/// premium when the phase's ground state is reached. Never positive
/// otherwise.
pub fn reward(
    next_state: &CubeState,
    which: PhaseHamiltonian,
    coeffs: &CoefficientSet,
    premium: f64,
) -> f64 {
    let e = energy(next_state, which, coeffs);
    if e == 0.0 {
        premium
    } else {
        -e
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cube::{solved, EdgeOrientation, Phase};
    use crate::moves::{phase_actions, scramble, Generator, Move};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn solved_state_is_ground_for_everything() {
        let s = solved();
        let c = CoefficientSet::default();
        for h in PhaseHamiltonian::ALL {
            assert_eq!(energy(&s, h, &c), 0.0);
            assert!(is_ground(&s, h, &c));
        }
        assert_eq!(total_energy(&s, &c), 0.0);
    }

    #[test]
    fn one_flipped_edge_costs_two() {
        let mut s = solved();
        s.edge_spin[4] = EdgeOrientation::Flipped;
        let c = CoefficientSet::default();
        assert_eq!(energy(&s, PhaseHamiltonian::EdgeSpin, &c), 2.0);
        assert_eq!(reward(&s, PhaseHamiltonian::EdgeSpin, &c, 5000.0), -2.0);
    }

    #[test]
    fn one_displaced_corner_costs_two() {
        let mut s = solved();
        // A single quarter-turn step along x; occupancy detail irrelevant to
        // the energy.
        s.disp[12] = [1, 0, 0];
        let c = CoefficientSet::default();
        assert_eq!(energy(&s, PhaseHamiltonian::CornerPosition, &c), 2.0);
    }

    #[test]
    fn ground_reward_is_the_premium() {
        let s = solved();
        let c = CoefficientSet::default();
        assert_eq!(reward(&s, PhaseHamiltonian::EdgeSpin, &c, 5000.0), 5000.0);
    }

    #[test]
    fn u_turn_keeps_spin_grounds_but_not_position() {
        let s = Move::Gen(Generator::U).apply(&solved());
        let c = CoefficientSet::default();
        assert!(is_ground(&s, PhaseHamiltonian::EdgeSpin, &c));
        assert!(is_ground(&s, PhaseHamiltonian::CornerSpin, &c));
        assert!(!is_ground(&s, PhaseHamiltonian::CornerPosition, &c));
        assert!(!is_ground(&s, PhaseHamiltonian::EdgePosition, &c));
        assert_eq!(energy(&s, PhaseHamiltonian::EdgeSpin, &c), 0.0);
        assert_eq!(energy(&s, PhaseHamiltonian::CornerSpin, &c), 0.0);
        assert!(total_energy(&s, &c) > 0.0);
    }

    #[test]
    fn f_breaks_edge_spin_ground() {
        let s = Move::Gen(Generator::F).apply(&solved());
        let c = CoefficientSet::default();
        assert!(!is_ground(&s, PhaseHamiltonian::EdgeSpin, &c));
        // Four flipped edges, diagonal J and unit B.
        assert_eq!(energy(&s, PhaseHamiltonian::EdgeSpin, &c), 8.0);
    }

    #[test]
    fn single_move_scramble_relaxes_to_zero() {
        let c = CoefficientSet::default();
        let s = Move::Gen(Generator::U).apply(&solved());
        let e1 = total_energy(&s, &c);
        let back = Move::GenInv(Generator::U).apply(&s);
        assert!(e1 > 0.0);
        assert_eq!(total_energy(&back, &c), 0.0);
        assert!(back.is_solved());
    }

    #[test]
    fn energies_nonnegative_and_duality_holds_on_random_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let actions = phase_actions(Phase::OrientEdges);
        for coeffs in [CoefficientSet::default(), CoefficientSet::uniform()] {
            coeffs.validate().unwrap();
            for _ in 0..40 {
                let (s, _) = scramble(&mut rng, &actions, 30);
                for h in PhaseHamiltonian::ALL {
                    let e = energy(&s, h, &coeffs);
                    assert!(e >= 0.0);
                    assert_eq!(e == 0.0, is_ground(&s, h, &coeffs));
                    let r = reward(&s, h, &coeffs, 5000.0);
                    let residual = r + e;
                    assert!(residual == 0.0 || residual == 5000.0 + 0.0);
                }
                // The total has a unique ground state.
                assert_eq!(total_energy(&s, &coeffs) == 0.0, s.is_solved());
            }
        }
    }

    #[test]
    fn coefficient_validation_catches_bad_input() {
        let mut c = CoefficientSet::default();
        c.b_edge_spin[0] = 0.0;
        assert!(matches!(c.validate(), Err(CoefficientError::ZeroB { .. })));

        let asym = Coupling::from_rows("edge spin", 2, vec![1.0, 0.5, 0.25, 1.0]);
        assert!(matches!(asym, Err(CoefficientError::NotSymmetric { .. })));

        let neg = Coupling::from_rows("edge spin", 2, vec![1.0, -0.5, -0.5, 1.0]);
        assert!(matches!(neg, Err(CoefficientError::NotPositive { .. })));

        let wrong = Coupling::from_rows("edge spin", 3, vec![1.0; 4]);
        assert!(matches!(wrong, Err(CoefficientError::JDims { .. })));
    }
}
