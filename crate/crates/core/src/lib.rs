//! Classical simulation of qubit circuits with Pauli measurements via
//! closed noncontextual phase-space points.
//!
//! * [`pauli`] — bit-level Pauli labels, symplectic form and `β`.
//! * [`phase_space`] — cnc sets, value assignments, catalogs.
//! * [`dynamics`] — measurement and Clifford updates of phase points.
//! * [`simulator`] — quasiprobability representations and sampling.
//! * [`decomposer`] — LPs for representability and robustness.
//! * [`oracle`] — dense-matrix reference implementation.
//! * [`verify`] — self-check suites.

pub mod decomposer;
pub mod dynamics;
pub mod error;
pub mod oracle;
pub mod pauli;
pub mod phase_space;
pub mod simulator;
pub mod verify;

pub use decomposer::{ExpectationVector, LpResult};
pub use dynamics::{CliffordTableau, Gate, UpdateBranch};
pub use error::{Error, Result};
pub use oracle::DenseOperator;
pub use pauli::{PauliLabel, SignedPauli, MAX_QUBITS};
pub use phase_space::{Catalog, CncSet, PhasePoint, ValueAssignment};
pub use simulator::{MeasurementProgram, Step, TrajectoryRecord, WRep};
