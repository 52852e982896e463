//! States, thermal ensembles, unitary processes and the Heisenberg operator
//! of work `Omega = U^dag H' U - H`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linops::{
    c, commutator, eigen_sorted, logm, max_abs, spectral_sum, trace_product, CMatrix,
    HermitianOperator, UnitaryOperator, I,
};

/// A positive-semidefinite, unit-trace Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    entries: CMatrix,
}

impl DensityMatrix {
    pub const TRACE_TOL: f64 = 1e-10;
    pub const POSITIVITY_TOL: f64 = 1e-10;

    pub fn new(entries: CMatrix) -> Result<Self> {
        let h = HermitianOperator::new(entries)?;
        let tr = h.matrix().trace().re;
        if (tr - 1.0).abs() > Self::TRACE_TOL {
            return Err(Error::NotDensity(format!("trace {tr}")));
        }
        let (values, _) = eigen_sorted(h.matrix());
        if values[0] < -Self::POSITIVITY_TOL {
            return Err(Error::NotDensity(format!("minimum eigenvalue {:e}", values[0])));
        }
        Ok(Self {
            entries: h.into_matrix(),
        })
    }

    /// Normalizes a positive-semidefinite matrix to unit trace.
    pub fn from_positive(m: &CMatrix) -> Result<Self> {
        let tr = m.trace().re;
        if !(tr > 0.0) {
            return Err(Error::NotDensity(format!("trace {tr} is not positive")));
        }
        Self::new(m / c(tr))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            entries: CMatrix::identity(dim, dim) * c(1.0 / dim as f64),
        }
    }

    pub fn from_diagonal(populations: &[f64]) -> Result<Self> {
        let n = populations.len();
        Self::new(CMatrix::from_fn(n, n, |i, j| {
            if i == j {
                c(populations[i])
            } else {
                c(0.0)
            }
        }))
    }

    /// `|psi><psi|` for a (not necessarily normalized) vector.
    pub fn pure(psi: &[Complex64]) -> Result<Self> {
        let n = psi.len();
        let m = CMatrix::from_fn(n, n, |i, j| psi[i] * psi[j].conj());
        Self::from_positive(&m)
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.entries
    }

    pub fn as_hermitian(&self) -> HermitianOperator {
        HermitianOperator::hermitize(self.entries.clone())
    }

    /// `tr(rho A)`.
    pub fn expectation(&self, a: &CMatrix) -> f64 {
        trace_product(&self.entries, a).re
    }

    pub fn evolved(&self, u: &UnitaryOperator) -> Self {
        Self {
            entries: crate::linops::hermitian_part(&(u.matrix() * &self.entries * u.matrix().adjoint())),
        }
    }
}

/// Thermal state `e^{-beta H} / Z` with its log-partition function.
#[derive(Debug, Clone)]
pub struct GibbsState {
    pub beta: f64,
    pub state: DensityMatrix,
    /// `ln Z_beta[H]`.
    pub log_partition: f64,
    /// `-ln Z / beta`; `None` at `beta = 0`.
    pub free_energy: Option<f64>,
    /// Populations of the eigenvectors of `H`, ascending energy order.
    pub populations: Vec<f64>,
}

fn check_beta_nonnegative(beta: f64) -> Result<()> {
    if !(beta.is_finite() && beta >= 0.0) {
        return Err(Error::Argument(format!(
            "inverse temperature must be finite and >= 0, got {beta}"
        )));
    }
    Ok(())
}

pub(crate) fn check_beta_positive(beta: f64) -> Result<()> {
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::Argument(format!(
            "inverse temperature must be finite and > 0, got {beta}"
        )));
    }
    Ok(())
}

/// Populations `e^{-beta E_i}/Z` and `ln Z`, computed with the ground energy
/// shifted out.
pub fn boltzmann(energies: &[f64], beta: f64) -> (Vec<f64>, f64) {
    let e0 = energies.iter().cloned().fold(f64::INFINITY, f64::min);
    let weights: Vec<f64> = energies.iter().map(|&e| (-beta * (e - e0)).exp()).collect();
    let z: f64 = weights.iter().sum();
    let pops = weights.iter().map(|w| w / z).collect();
    (pops, z.ln() - beta * e0)
}

pub fn gibbs(h: &HermitianOperator, beta: f64) -> Result<GibbsState> {
    check_beta_nonnegative(beta)?;
    let (energies, vectors) = eigen_sorted(h.matrix());
    let (populations, log_partition) = boltzmann(&energies, beta);
    let weights: Vec<Complex64> = populations.iter().map(|&p| c(p)).collect();
    let state = DensityMatrix {
        entries: crate::linops::hermitian_part(&spectral_sum(&vectors, &weights)),
    };
    Ok(GibbsState {
        beta,
        state,
        log_partition,
        free_energy: (beta > 0.0).then(|| -log_partition / beta),
        populations,
    })
}

/// `ln Z_beta[H]`.
pub fn log_partition(h: &HermitianOperator, beta: f64) -> f64 {
    let (energies, _) = eigen_sorted(h.matrix());
    boltzmann(&energies, beta).1
}

/// `F_beta[H'] - F_beta[H]`.
pub fn delta_free_energy(h: &HermitianOperator, hp: &HermitianOperator, beta: f64) -> Result<f64> {
    check_beta_positive(beta)?;
    Ok(-(log_partition(hp, beta) - log_partition(h, beta)) / beta)
}

/// A unitary process `(H, H', U)`.
#[derive(Debug, Clone)]
pub struct Process {
    pub h_initial: HermitianOperator,
    pub h_final: HermitianOperator,
    pub evolution: UnitaryOperator,
}

impl Process {
    pub fn new(
        h_initial: HermitianOperator,
        h_final: HermitianOperator,
        evolution: UnitaryOperator,
    ) -> Result<Self> {
        let d = h_initial.dim();
        for found in [h_final.dim(), evolution.dim()] {
            if found != d {
                return Err(Error::DimensionMismatch { expected: d, found });
            }
        }
        Ok(Self {
            h_initial,
            h_final,
            evolution,
        })
    }

    /// The untouched system: `H' = H`, `U = I`.
    pub fn trivial(h: &HermitianOperator) -> Self {
        Self {
            h_initial: h.clone(),
            h_final: h.clone(),
            evolution: UnitaryOperator::identity(h.dim()),
        }
    }

    pub fn dim(&self) -> usize {
        self.h_initial.dim()
    }

    /// `U^dag H' U`.
    pub fn heisenberg_final(&self) -> HermitianOperator {
        self.h_final.conjugated_by(&self.evolution)
    }

    /// `||[U^dag H' U, H]||` (max-abs).
    pub fn noncommutativity(&self) -> f64 {
        max_abs(&commutator(self.heisenberg_final().matrix(), self.h_initial.matrix()))
    }

    pub(crate) fn check_state(&self, rho: &DensityMatrix) -> Result<()> {
        if rho.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: rho.dim(),
            });
        }
        Ok(())
    }
}

/// `Omega = U^dag H' U - H`.
pub fn how_operator(p: &Process) -> HermitianOperator {
    HermitianOperator::hermitize(p.heisenberg_final().matrix() - p.h_initial.matrix())
}

/// `tr(rho Omega)`: final minus initial average energy of the unmeasured system.
pub fn average_work_unmeasured(p: &Process, rho: &DensityMatrix) -> Result<f64> {
    p.check_state(rho)?;
    Ok(rho.expectation(how_operator(p).matrix()))
}

/// Cyclic process `H' = H`, `U = exp(-i x h)`.
#[derive(Debug, Clone)]
pub struct PiProcess {
    pub h_initial: HermitianOperator,
    pub generator: HermitianOperator,
    pub strength: f64,
}

impl PiProcess {
    pub fn new(h_initial: HermitianOperator, generator: HermitianOperator, strength: f64) -> Result<Self> {
        if generator.dim() != h_initial.dim() {
            return Err(Error::DimensionMismatch {
                expected: h_initial.dim(),
                found: generator.dim(),
            });
        }
        Ok(Self {
            h_initial,
            generator,
            strength,
        })
    }

    pub fn with_strength(&self, strength: f64) -> Self {
        Self {
            strength,
            ..self.clone()
        }
    }
}

pub fn pi_to_process(pp: &PiProcess) -> Process {
    Process {
        h_initial: pp.h_initial.clone(),
        h_final: pp.h_initial.clone(),
        evolution: UnitaryOperator::from_generator(&pp.generator, pp.strength),
    }
}

/// `omega = i [h, H]`.
pub fn omega_commutator(pp: &PiProcess) -> HermitianOperator {
    i_commutator(&pp.generator, &pp.h_initial)
}

/// `i [A, B]`, Hermitian for Hermitian `A`, `B`.
pub fn i_commutator(a: &HermitianOperator, b: &HermitianOperator) -> HermitianOperator {
    HermitianOperator::hermitize(commutator(a.matrix(), b.matrix()) * I)
}

/// `S(rho || sigma) = tr rho (ln rho - ln sigma)` with `0 ln 0 = 0`.
pub fn relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: sigma.dim(),
        });
    }
    let log_sigma = logm(&sigma.as_hermitian())?;
    let (r, _) = eigen_sorted(rho.matrix());
    let entropy_term: f64 = r.iter().filter(|&&x| x > 0.0).map(|&x| x * x.ln()).sum();
    Ok(entropy_term - rho.expectation(log_sigma.matrix()))
}

/// `||[A, B]||` in max-abs entrywise norm; a cheap commutation test.
pub fn commutator_norm(a: &CMatrix, b: &CMatrix) -> f64 {
    max_abs(&commutator(a, b))
}
