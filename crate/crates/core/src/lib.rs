//! Lattice model of the Rubik's Cube and a four-phase deep double Q-network
//! solver driven purely by Hamiltonian-energy rewards.
//!
//! The cube is treated as 20 particles (12 edges, 8 corners) on a grid. Each
//! particle carries an integer displacement vector (steps from its home slot)
//! and a spin (two-state for edges, three-state for corners). Face turns are
//! permutation/translation/spin tables; four Ising-style Hamiltonians measure
//! how far the spins and displacements are from the solved configuration, and
//! one DDQN agent per Hamiltonian learns to drive its energy to zero.

pub mod config;
pub mod cube;
pub mod ddqn;
pub mod hamiltonian;
pub mod moves;
pub mod net;
pub mod neural;
pub mod notation;
pub mod oracle;
pub mod pipeline;

pub use cube::{CornerOrientation, CubeState, CubieId, EdgeOrientation, Phase, SlotId};
pub use hamiltonian::{CoefficientSet, PhaseHamiltonian};
pub use moves::{CompiledMove, Generator, Move, MoveSequence, PhaseAction};
pub use neural::MlpModel;
