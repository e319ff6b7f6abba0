//! Weyl and Dirac quantum cellular automata on the body-centred cubic lattice.
//!
//! The crate rebuilds the two-component Weyl automata from their Gram-matrix
//! characterisation, checks every unitarity and isotropy identity, couples
//! two Weyl automata into the four-component Dirac families, and evolves
//! fields on a periodic lattice either by direct stencil application or in
//! momentum space.
//!
//! Modules, bottom-up:
//! - [`smallmat`]: 2×2 / 4×4 complex matrices, Pauli and Gamma bases, eigenphases.
//! - [`lattice`]: generating set, Brillouin zone, periodic lattice, momentum grid.
//! - [`automaton`]: transition sets, `A(k)`, constraint and isotropy checks.
//! - [`derivation`]: Gram matrices, admissible solutions, the twelve automata.
//! - [`dirac`]: the coupled four-component families `B(k, s)`.
//! - [`dynamics`]: field states, stencil and FFT evolution, wave packets.
//! - [`analysis`]: closed-form dispersions, spectrum checks, continuum limits.

// Negated comparisons reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod automaton;
pub mod derivation;
pub mod dirac;
pub mod dynamics;
pub mod error;
pub mod lattice;
pub mod smallmat;

pub use automaton::{ConstraintEntry, ConstraintReport, TransitionSet, WeylTransitionSet};
pub use derivation::{BMatrix, Family, SolutionLabel, WeylSolution};
pub use dirac::DiracTransitionSet;
pub use dynamics::{FieldState, WavePacketSpec};
pub use error::{Error, Result};
pub use lattice::{GeneratingSet, IntVec3, PeriodicLattice, WaveVector};
pub use smallmat::{CMat2, CMat4, C64};

/// Two-valued sign used for B-matrix labels, α branches, mass signs and bands.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl std::fmt::Display for Sign {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}
