//! Single-shot reinforcement-learning eigensolver simulator.
//!
//! The library models an agent-environment loop where the agent maintains
//! a unitary whose columns approximate the eigenvectors of a Hermitian
//! observable. Each iteration evolves one agent state under the
//! exponentiated observable, measures it with a single shot, and composes
//! a reward-scaled two-level rotation into the agent when the measurement
//! misses the target basis state. A staged protocol extends the loop to
//! multi-qubit observables, and a shot-counting VQE baseline provides a
//! resource comparison.

pub mod agent;
pub mod analysis;
pub mod environment;
pub mod error;
pub mod experiment;
pub mod io;
pub mod presets;
pub mod qcore;
pub mod rlsolver;
pub mod vqe;

pub use error::{Error, Result};
