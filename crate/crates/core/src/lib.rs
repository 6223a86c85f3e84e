//! Coherence-sensitive readout models for computational-basis measurement.
//!
//! Any CPTP channel `E` acting before a computational-basis measurement turns
//! the ideal outcome distribution into
//!
//! ```text
//! z = A x + C y
//! ```
//!
//! where `x` holds the populations of the ideal state, `y` the real and
//! imaginary parts of its coherences, `A` is the classical assignment matrix
//! and `C` the coherence-response matrix. `C = 0` exactly when every
//! effective POVM element `F_k = E^dagger(|k><k|)` is diagonal.
//!
//! Module map:
//! - [`linalg`]: dense complex matrices, Jacobi eigensolver, vectorization
//! - [`channels`]: Kraus channels, standard channels, superoperators
//! - [`povm`]: effective POVM, operator-valued kernel, diagonality defects
//! - [`state`]: density matrices and their `(x, y)` decomposition
//! - [`model`]: extraction of `(A, C)`, forward map, superoperator oracle
//! - [`solver`]: constrained mitigation of `z = [A C] v`
//! - [`sampling`]: reproducible finite-shot sampling
//! - [`io`]: JSON file formats

pub mod channels;
pub mod error;
pub mod io;
pub mod linalg;
pub mod model;
pub mod povm;
pub mod sampling;
pub mod solver;
pub mod state;

pub use channels::{KrausChannel, Superoperator};
pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, RealMatrix};
pub use model::{CoherenceNorm, ProbabilityVector, ReadoutModel};
pub use povm::Povm;
pub use solver::{MitigationProblem, MitigationResult, SolverOptions};
pub use state::{DensityMatrix, StateDecomposition};

/// Extracts the readout model of a channel: effective POVM, then `(A, C)`.
pub fn readout_model(ch: &KrausChannel) -> Result<ReadoutModel> {
    model::extract(&povm::effective_povm(ch)?)
}
