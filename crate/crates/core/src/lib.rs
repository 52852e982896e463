//! Quantum work-measurement schemes as explicit POVMs, with checkers for
//! average-energy conservation, trivial-process behaviour and the Jarzynski
//! equality, plus a Gaussian harmonic-oscillator classical-limit calculation.

pub mod error;
pub mod linops;
pub mod quantum;
pub mod schemes;
pub mod conditions;
pub mod theorems;
pub mod gaussian;
pub mod instances;
pub mod experiments;

pub use error::{Error, Result};
pub use linops::{
    eigh, expm, logm, matfun, operator_norm, sample_gue, sample_haar, sqrtm, CMatrix,
    HermitianOperator, SpectralDecomposition, UnitaryOperator,
};
pub use quantum::{
    average_work_unmeasured, delta_free_energy, gibbs, how_operator, omega_commutator,
    pi_to_process, relative_entropy, DensityMatrix, GibbsState, PiProcess, Process,
};
pub use schemes::{
    composite_scheme, distribution, fit_beta_hat, how_scheme, tpm_scheme, upsilon_operator, upsilon_scheme,
    BetaHatConfig, BetaHatFit, SchemeKind, WorkDistribution, WorkScheme,
};
pub use conditions::{
    check_a1, check_a2, check_b, check_b_rebuilt, check_thermal_average, je_class_validate, nondegenerate_checks,
    theorem2_trace_condition, Condition, ConditionReport, InstanceContext, Status,
};
pub use theorems::{
    golden_thompson_gap, ineq2_terms, majorization_check, relative_entropy_bound_check, scaling_analysis,
    upsilon_expansion_check, ScalingResult,
};
pub use gaussian::{
    correlation_matrices, fock_oracle, jarzynski_average_gaussian, kernel_coeffs, symplectic_eigenvalue, xi_matrix,
    z_work, GaussianKernel, GaussianProcess,
};
pub use instances::{commuting_instance, noncommuting_instance, pi_instance, stream_seed, Instance, PiInstance};
pub use experiments::{InstanceRecord, Summary, Tolerances};
