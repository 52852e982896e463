//! Fixed inputs shared by the criterion benchmarks.

use qwork_core::experiments::default_gaussian_process;
use qwork_core::gaussian::GaussianProcess;
use qwork_core::instances::{noncommuting_instance, Instance};

/// Seeded random process and state of the given dimension.
pub fn instance(dim: usize) -> Instance {
    noncommuting_instance(dim, 17, 0).expect("dimension >= 2")
}

/// Oscillator process at a given `beta * hbar`.
pub fn oscillator(beta_hbar: f64) -> GaussianProcess {
    default_gaussian_process().at_beta_hbar(beta_hbar).expect("positive beta * hbar")
}
