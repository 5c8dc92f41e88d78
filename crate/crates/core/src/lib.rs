//! Entanglement analysis of two-qubit pure states written over
//! non-orthogonal component states.
//!
//! A state `mu |alpha>|beta> + nu |gamma>|delta>` with overlaps
//! `x = <delta|beta>` and `y = <alpha|gamma>` is embedded into an orthonormal
//! product basis, after which the Schmidt form, the CHSH Bell value, the
//! deviation from maximal violation, the concurrence and the entanglement
//! entropy follow. The [`kaon`] module applies this to the neutral-kaon pair
//! with CP violation.

pub mod bell;
pub mod error;
pub mod feasibility;
pub mod kaon;
pub mod linalg;
pub mod measures;
pub mod report;
pub mod sampling;
pub mod schmidt;
pub mod state;
pub mod sweep;
pub mod verify;

pub use error::{Error, Result};
pub use state::{make_state, NonorthogonalBipartiteState, ProductBasisVector, StateInput};
