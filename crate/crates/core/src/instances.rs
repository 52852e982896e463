//! Seeded random instances. Each instance draws from its own RNG stream,
//! derived by hashing `(seed, dim, index)`, so an instance does not depend on
//! which other instances are generated or in what order.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::conditions::InstanceContext;
use crate::error::{Error, Result};
use crate::linops::{gue_with, haar_with, operator_norm, seeded_rng, ginibre, CMatrix, HermitianOperator, UnitaryOperator};
use crate::quantum::{DensityMatrix, Process};

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// RNG seed for the `index`-th instance of dimension `dim` under `seed`.
pub fn stream_seed(seed: u64, dim: usize, index: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(seed) ^ dim as u64) ^ index)
}

/// GUE sample rescaled to unit operator norm.
pub fn unit_norm_gue<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> HermitianOperator {
    let g = gue_with(rng, dim);
    let n = operator_norm(&g);
    if n > 0.0 {
        g.scaled(1.0 / n)
    } else {
        g
    }
}

/// `G G^dag / tr(G G^dag)` for a Ginibre `G`: full rank, generically coherent
/// in any fixed basis.
pub fn ginibre_state<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Result<DensityMatrix> {
    let g = ginibre(rng, dim);
    DensityMatrix::from_positive(&(&g * g.adjoint()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InstanceKind {
    /// GUE `H`, `H'`, Haar `U`, Ginibre state.
    Noncommuting,
    /// Diagonal `H`, `H'`, `rho` and a diagonal-phase `U`.
    Commuting,
}

#[derive(Debug, Clone)]
pub struct Instance {
    pub kind: InstanceKind,
    pub dim: usize,
    pub seed: u64,
    pub index: u64,
    pub stream: u64,
    pub process: Process,
    pub state: DensityMatrix,
}

impl Instance {
    pub fn context(&self, beta: Option<f64>) -> InstanceContext {
        InstanceContext {
            dim: self.dim,
            seed: Some(self.seed),
            beta,
            x: None,
        }
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim < 2 {
        return Err(Error::Argument(format!("instances need dim >= 2, got {dim}")));
    }
    Ok(())
}

pub fn noncommuting_instance(dim: usize, seed: u64, index: u64) -> Result<Instance> {
    check_dim(dim)?;
    let stream = stream_seed(seed, dim, index);
    let mut rng = seeded_rng(stream);
    let h = unit_norm_gue(&mut rng, dim);
    let hp = unit_norm_gue(&mut rng, dim);
    let u = haar_with(&mut rng, dim);
    let state = ginibre_state(&mut rng, dim)?;
    Ok(Instance {
        kind: InstanceKind::Noncommuting,
        dim,
        seed,
        index,
        stream,
        process: Process::new(h, hp, u)?,
        state,
    })
}

fn uniform_levels<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<f64> {
    (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect()
}

/// Classical control: everything diagonal in one basis, so that
/// `[U^dag H' U, H] = 0` and `[rho, H] = 0`.
pub fn commuting_instance(dim: usize, seed: u64, index: u64) -> Result<Instance> {
    check_dim(dim)?;
    let stream = stream_seed(seed, dim, index);
    let mut rng = seeded_rng(stream);
    let h = HermitianOperator::from_real_diagonal(&uniform_levels(&mut rng, dim));
    let hp = HermitianOperator::from_real_diagonal(&uniform_levels(&mut rng, dim));
    let phases: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU)))
        .collect();
    let u = UnitaryOperator::new(CMatrix::from_diagonal(&nalgebra::DVector::from_vec(phases)))?;
    let pops: Vec<f64> = (0..dim).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = pops.iter().sum();
    let pops: Vec<f64> = pops.iter().map(|p| p / total).collect();
    Ok(Instance {
        kind: InstanceKind::Commuting,
        dim,
        seed,
        index,
        stream,
        process: Process::new(h, hp, u)?,
        state: DensityMatrix::from_diagonal(&pops)?,
    })
}

/// Cyclic-process draw: `H`, generator `h` (both unit-norm GUE) and a
/// Ginibre state.
#[derive(Debug, Clone)]
pub struct PiInstance {
    pub dim: usize,
    pub seed: u64,
    pub index: u64,
    pub stream: u64,
    pub h: HermitianOperator,
    pub generator: HermitianOperator,
    pub state: DensityMatrix,
}

pub fn pi_instance(dim: usize, seed: u64, index: u64) -> Result<PiInstance> {
    check_dim(dim)?;
    let stream = stream_seed(seed, dim, index);
    let mut rng = seeded_rng(stream);
    let h = unit_norm_gue(&mut rng, dim);
    let generator = unit_norm_gue(&mut rng, dim);
    let state = ginibre_state(&mut rng, dim)?;
    Ok(PiInstance {
        dim,
        seed,
        index,
        stream,
        h,
        generator,
        state,
    })
}
