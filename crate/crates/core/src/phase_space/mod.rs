//! Closed noncontextual sets, value assignments and the phase points they form.

mod brute;
mod catalog;
mod cnc;
mod point;

pub use brute::{
    all_cnc_subsets, brute_force_cnc_check, closure, maximal_sets, structure_of, CncCheck, CncWitness,
    BRUTE_FORCE_MAX_ELEMENTS,
};
pub use catalog::{
    cache_path, enumerate_catalog, enumerate_catalog_with_cap, isotropic_subspaces, load_or_enumerate, Catalog,
    CountRow, DEFAULT_QUBIT_CAP, REBIT_CAP,
};
pub use cnc::{CncSet, CncSetRecord, Membership};
pub use point::{gamma_set, points_on, PhasePoint, PhasePointRecord, ValueAssignment};

pub(crate) use cnc::{canonicalize, Valued};

use crate::error::Result;
use crate::pauli::PauliLabel;

/// Validated construction of a cnc set from generators and representatives.
pub fn make_cnc(n: usize, isotropic_gens: &[PauliLabel], reps: &[PauliLabel]) -> Result<CncSet> {
    CncSet::new(n, isotropic_gens, reps)
}
