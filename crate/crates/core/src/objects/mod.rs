//! States, POVMs and channels.

mod channel;
mod povm;
mod state;

pub(crate) use channel::{apply_choi_local, assemble_choi};
pub use channel::{compose, entanglement_breaking, quantum_to_classical, Channel, LinearMap, CHANNEL_TOL};
pub use povm::Povm;
pub use state::{DensityMatrix, PureState, STATE_TOL};

/// One side of a bipartite state `ρ_AB`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    A,
    B,
}

impl Side {
    /// Index of this side's factor in `[A, B]`.
    pub fn index(self) -> usize {
        match self {
            Side::A => 0,
            Side::B => 1,
        }
    }

    pub fn other(self) -> Side {
        match self {
            Side::A => Side::B,
            Side::B => Side::A,
        }
    }
}
