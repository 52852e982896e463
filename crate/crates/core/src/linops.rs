//! Dense complex linear algebra: Hermitian eigendecomposition with
//! degeneracy grouping, spectral matrix functions, norms and seeded random
//! matrix ensembles.
//!
//! Every matrix function goes through the Hermitian eigendecomposition. The
//! eigensolver itself is nalgebra's tridiagonal QR (`SymmetricEigen`), which
//! handles complex Hermitian input.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

/// Max-abs entrywise tolerance on `A - A^dag` for Hermitian operators.
pub const TOL_HERM: f64 = 1e-12;
/// Max-abs entrywise tolerance on `U^dag U - I` for unitaries.
pub const TOL_UNIT: f64 = 1e-10;
/// Absolute tolerance for merging eigenvalues into one level.
pub const CLUSTER_TOL: f64 = 1e-8;

pub(crate) const I: Complex64 = Complex64::new(0.0, 1.0);

#[inline]
pub(crate) fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Largest entrywise modulus.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn dagger(m: &CMatrix) -> CMatrix {
    m.adjoint()
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

pub fn anticommutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b + b * a
}

pub fn trace(m: &CMatrix) -> Complex64 {
    m.trace()
}

/// `tr(A B)` without forming the product.
pub fn trace_product(a: &CMatrix, b: &CMatrix) -> Complex64 {
    let n = a.nrows();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

/// `(M + M^dag) / 2`.
pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * c(0.5)
}

fn check_square(m: &CMatrix) -> Result<usize> {
    if m.nrows() != m.ncols() || m.nrows() == 0 {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    Ok(m.nrows())
}

/// A dense Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    entries: CMatrix,
}

impl HermitianOperator {
    /// Validates Hermiticity at [`TOL_HERM`].
    pub fn new(entries: CMatrix) -> Result<Self> {
        check_square(&entries)?;
        let deviation = max_abs(&(&entries - entries.adjoint()));
        if deviation > TOL_HERM {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(Self::hermitize(entries))
    }

    /// Projects an arbitrary square matrix onto its Hermitian part. Used for
    /// results that are Hermitian in exact arithmetic.
    pub fn hermitize(entries: CMatrix) -> Self {
        Self {
            entries: hermitian_part(&entries),
        }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self {
            entries: CMatrix::from_fn(n, n, |i, j| if i == j { c(diag[i]) } else { c(0.0) }),
        }
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let n = rows.len();
        let m = CMatrix::from_fn(n, n, |i, j| c(rows[i][j]));
        Self::new(m)
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            entries: CMatrix::zeros(dim, dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            entries: CMatrix::identity(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_matrix(self) -> CMatrix {
        self.entries
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            entries: &self.entries * c(s),
        }
    }

    /// `A + c I`.
    pub fn shifted(&self, shift: f64) -> Self {
        let n = self.dim();
        Self {
            entries: &self.entries + CMatrix::identity(n, n) * c(shift),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            entries: &self.entries + &other.entries,
        }
    }

    /// Conjugation `V^dag A V` by a unitary.
    pub fn conjugated_by(&self, v: &UnitaryOperator) -> Self {
        Self::hermitize(v.matrix().adjoint() * &self.entries * v.matrix())
    }

    /// `tr(A B)` for Hermitian `A`, `B` (real up to rounding).
    pub fn trace_with(&self, other: &CMatrix) -> f64 {
        trace_product(&self.entries, other).re
    }
}

/// A dense unitary matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryOperator {
    entries: CMatrix,
}

impl UnitaryOperator {
    /// Validates `U^dag U = I` at [`TOL_UNIT`].
    pub fn new(entries: CMatrix) -> Result<Self> {
        let n = check_square(&entries)?;
        let deviation = max_abs(&(entries.adjoint() * &entries - CMatrix::identity(n, n)));
        if deviation > TOL_UNIT {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(Self { entries })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            entries: CMatrix::identity(dim, dim),
        }
    }

    /// `exp(-i t G)` for Hermitian generator `G`.
    pub fn from_generator(generator: &HermitianOperator, t: f64) -> Self {
        let (values, vectors) = eigen_sorted(generator.matrix());
        let phases: Vec<Complex64> = values.iter().map(|&e| (-I * c(t * e)).exp()).collect();
        Self {
            entries: spectral_sum(&vectors, &phases),
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.entries
    }

    pub fn adjoint(&self) -> Self {
        Self {
            entries: self.entries.adjoint(),
        }
    }

    pub fn compose(&self, other: &Self) -> Self {
        Self {
            entries: &self.entries * &other.entries,
        }
    }
}

/// Distinct eigenvalues with their orthogonal projectors.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    /// Strictly increasing cluster means.
    pub values: Vec<f64>,
    pub projectors: Vec<CMatrix>,
    pub degeneracies: Vec<usize>,
    /// All eigenvalues, ascending.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors as columns, in the order of `eigenvalues`.
    pub eigenvectors: CMatrix,
    /// Cluster index of every eigenvector.
    pub cluster_of: Vec<usize>,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn levels(&self) -> usize {
        self.values.len()
    }

    pub fn is_nondegenerate(&self) -> bool {
        self.degeneracies.iter().all(|&g| g == 1)
    }

    /// `sum_a values[a] P_a`.
    pub fn reconstruct(&self) -> CMatrix {
        let n = self.dim();
        self.values
            .iter()
            .zip(&self.projectors)
            .fold(CMatrix::zeros(n, n), |acc, (&v, p)| acc + p * c(v))
    }
}

/// Eigenvalues in ascending order with matching eigenvector columns.
/// The input is assumed Hermitian; only its Hermitian part is used.
pub fn eigen_sorted(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = hermitian_part(m).symmetric_eigen();
    let n = m.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = CMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    (values, vectors)
}

/// `sum_i f_i v_i v_i^dag` for eigenvector columns `v_i`.
pub(crate) fn spectral_sum(vectors: &CMatrix, weights: &[Complex64]) -> CMatrix {
    let mut scaled = vectors.clone();
    for (j, w) in weights.iter().enumerate() {
        for i in 0..scaled.nrows() {
            scaled[(i, j)] *= *w;
        }
    }
    scaled * vectors.adjoint()
}

/// Hermitian eigendecomposition with eigenvalues closer than `cluster_tol`
/// (single linkage on the sorted list) merged into one level.
pub fn eigh(a: &HermitianOperator, cluster_tol: f64) -> Result<SpectralDecomposition> {
    if !(cluster_tol >= 0.0) {
        return Err(Error::Argument(format!("cluster_tol must be >= 0, got {cluster_tol}")));
    }
    let n = a.dim();
    let (eigenvalues, eigenvectors) = eigen_sorted(a.matrix());

    let mut cluster_of = vec![0usize; n];
    let mut members: Vec<Vec<usize>> = vec![vec![0]];
    for k in 1..n {
        if eigenvalues[k] - eigenvalues[k - 1] <= cluster_tol {
            members.last_mut().unwrap().push(k);
        } else {
            members.push(vec![k]);
        }
        cluster_of[k] = members.len() - 1;
    }

    let mut values = Vec::with_capacity(members.len());
    let mut projectors = Vec::with_capacity(members.len());
    let mut degeneracies = Vec::with_capacity(members.len());
    for cluster in &members {
        let mean = cluster.iter().map(|&k| eigenvalues[k]).sum::<f64>() / cluster.len() as f64;
        let mut p = CMatrix::zeros(n, n);
        for &k in cluster {
            let v = eigenvectors.column(k);
            p += v * v.adjoint();
        }
        let p = hermitian_part(&p);
        let g = p.trace().re.round() as usize;
        values.push(mean);
        projectors.push(p);
        degeneracies.push(g);
    }

    Ok(SpectralDecomposition {
        values,
        projectors,
        degeneracies,
        eigenvalues,
        eigenvectors,
        cluster_of,
    })
}

/// `f(A) = sum_i f(lambda_i) v_i v_i^dag`. Fails if `f` is not finite at some
/// eigenvalue.
pub fn matfun<F>(a: &HermitianOperator, f: F) -> Result<HermitianOperator>
where
    F: Fn(f64) -> f64,
{
    matfun_named(a, "function", f)
}

pub(crate) fn matfun_named<F>(a: &HermitianOperator, name: &str, f: F) -> Result<HermitianOperator>
where
    F: Fn(f64) -> f64,
{
    let (values, vectors) = eigen_sorted(a.matrix());
    let mut weights = Vec::with_capacity(values.len());
    for &lambda in &values {
        let y = f(lambda);
        if !y.is_finite() {
            return Err(Error::Domain {
                function: name.to_string(),
                eigenvalue: lambda,
            });
        }
        weights.push(c(y));
    }
    Ok(HermitianOperator::hermitize(spectral_sum(&vectors, &weights)))
}

pub fn expm(a: &HermitianOperator) -> HermitianOperator {
    matfun_named(a, "exp", f64::exp).expect("exp is finite on a finite spectrum")
}

/// Matrix logarithm; requires a positive-definite argument.
pub fn logm(a: &HermitianOperator) -> Result<HermitianOperator> {
    matfun_named(a, "ln", |x| if x > 0.0 { x.ln() } else { f64::NAN })
}

/// Matrix square root; requires a positive-semidefinite argument.
pub fn sqrtm(a: &HermitianOperator) -> Result<HermitianOperator> {
    matfun_named(a, "sqrt", |x| if x >= 0.0 { x.sqrt() } else { f64::NAN })
}

/// `max |lambda|`.
pub fn operator_norm(a: &HermitianOperator) -> f64 {
    let (values, _) = eigen_sorted(a.matrix());
    values.iter().fold(0.0, |acc, v| acc.max(v.abs()))
}

/// Deterministic generator used for every seeded sample.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard complex Gaussian: real and imaginary parts i.i.d. N(0, 1/2),
/// so that `E|z|^2 = 1`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn ginibre<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> CMatrix {
    CMatrix::from_fn(dim, dim, |_, _| complex_gaussian(rng))
}

/// GUE sample `(G + G^dag) / 2`.
pub fn gue_with<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> HermitianOperator {
    assert!(dim >= 1, "dimension must be positive");
    HermitianOperator::hermitize(ginibre(rng, dim))
}

/// Haar unitary via QR of a Ginibre matrix, with the phases of `diag(R)`
/// moved into `Q`.
pub fn haar_with<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> UnitaryOperator {
    assert!(dim >= 1, "dimension must be positive");
    let qr = ginibre(rng, dim).qr();
    let q = qr.q();
    let r = qr.r();
    let mut u = q;
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { c(1.0) };
        for i in 0..dim {
            u[(i, j)] *= phase;
        }
    }
    UnitaryOperator { entries: u }
}

pub fn sample_gue(dim: usize, seed: u64) -> HermitianOperator {
    gue_with(&mut seeded_rng(seed), dim)
}

pub fn sample_haar(dim: usize, seed: u64) -> UnitaryOperator {
    haar_with(&mut seeded_rng(seed), dim)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn taylor_expm(a: &CMatrix) -> CMatrix {
        // scaling and squaring around a long Taylor series
        let n = a.nrows();
        let norm = max_abs(a) * n as f64;
        let squarings = (norm.max(1.0).log2().ceil() as i32 + 2).max(0);
        let scaled = a * c(0.5f64.powi(squarings));
        let mut term = CMatrix::identity(n, n);
        let mut sum = CMatrix::identity(n, n);
        for k in 1..30 {
            term = &term * &scaled * c(1.0 / k as f64);
            sum += &term;
        }
        for _ in 0..squarings {
            sum = &sum * &sum;
        }
        sum
    }

    #[test]
    fn eigh_diagonal_inputs() {
        let a = HermitianOperator::from_real_diagonal(&[0.0, 1.0]);
        let d = eigh(&a, 1e-8).unwrap();
        assert_eq!(d.values, vec![0.0, 1.0]);
        assert_eq!(d.degeneracies, vec![1, 1]);
        assert!((d.projectors[0][(0, 0)].re - 1.0).abs() < 1e-14);
        assert!(d.projectors[0][(1, 1)].norm() < 1e-14);
        assert!((d.projectors[1][(1, 1)].re - 1.0).abs() < 1e-14);

        let b = HermitianOperator::from_real_diagonal(&[0.0, 0.0, 1.0]);
        let d = eigh(&b, 1e-8).unwrap();
        assert_eq!(d.values.len(), 2);
        assert_eq!(d.degeneracies, vec![2, 1]);
    }

    #[test]
    fn eigh_merges_near_degenerate_levels() {
        let a = HermitianOperator::from_real_diagonal(&[0.0, 1e-10, 2e-10, 1.0]);
        let d = eigh(&a, 1e-8).unwrap();
        assert_eq!(d.degeneracies, vec![3, 1]);
        let exact = eigh(&a, 0.0).unwrap();
        assert_eq!(exact.degeneracies, vec![1, 1, 1, 1]);
    }

    #[test]
    fn eigh_reconstructs_gue() {
        let a = sample_gue(4, 11);
        let d = eigh(&a, CLUSTER_TOL).unwrap();
        assert!(max_abs(&(d.reconstruct() - a.matrix())) < 1e-9);
        let n = a.dim();
        let sum = d.projectors.iter().fold(CMatrix::zeros(n, n), |acc, p| acc + p);
        assert!(max_abs(&(sum - CMatrix::identity(n, n))) < 1e-10);
    }

    #[test]
    fn non_hermitian_rejected() {
        let m = CMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(0.0), c(0.0)]);
        assert!(matches!(HermitianOperator::new(m), Err(Error::NotHermitian { .. })));
        let m = CMatrix::zeros(2, 3);
        assert!(matches!(HermitianOperator::new(m), Err(Error::NotSquare { .. })));
    }

    #[test]
    fn matfun_examples() {
        let a = HermitianOperator::from_real_diagonal(&[0.0, 2f64.ln()]);
        let e = expm(&a);
        assert!((e.matrix()[(0, 0)].re - 1.0).abs() < 1e-14);
        assert!((e.matrix()[(1, 1)].re - 2.0).abs() < 1e-14);

        let neg = HermitianOperator::from_real_diagonal(&[1.0, -0.1]);
        match sqrtm(&neg) {
            Err(Error::Domain { eigenvalue, .. }) => assert!((eigenvalue + 0.1).abs() < 1e-14),
            other => panic!("expected domain error, got {other:?}"),
        }
        assert!(logm(&HermitianOperator::from_real_diagonal(&[1.0, 0.0])).is_err());
    }

    #[test]
    fn log_inverts_exp() {
        let mut rng = seeded_rng(5);
        let g = gue_with(&mut rng, 3);
        let a = g.scaled(1.0 / operator_norm(&g));
        let back = logm(&expm(&a)).unwrap();
        assert!(max_abs(&(back.matrix() - a.matrix())) < 1e-9);
    }

    #[test]
    fn exp_matches_taylor_reference() {
        for seed in 0..20 {
            let g = sample_gue(2 + (seed as usize % 6), seed);
            let a = g.scaled(5.0 / operator_norm(&g));
            let via_eigh = expm(&a);
            let reference = taylor_expm(a.matrix());
            let rel = max_abs(&(via_eigh.matrix() - &reference)) / max_abs(&reference);
            assert!(rel < 1e-8, "seed {seed}: relative error {rel:e}");
        }
    }

    #[test]
    fn operator_norm_examples() {
        assert_eq!(operator_norm(&HermitianOperator::from_real_diagonal(&[0.5, -2.0])), 2.0);
        assert_eq!(operator_norm(&HermitianOperator::zeros(3)), 0.0);
        let diff = HermitianOperator::from_real_diagonal(&[0.6 - 0.5, 0.4 - 0.5]);
        assert!((operator_norm(&diff) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn haar_is_unitary_with_unit_determinant_modulus() {
        let u = sample_haar(2, 3);
        let dev = max_abs(&(u.matrix().adjoint() * u.matrix() - CMatrix::identity(2, 2)));
        assert!(dev < 1e-12);
        let u4 = sample_haar(4, 9);
        let det = u4.matrix().determinant();
        assert!((det.norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn seeded_sampling_is_deterministic() {
        assert_eq!(sample_gue(3, 42), sample_gue(3, 42));
        assert_ne!(sample_gue(3, 42), sample_gue(3, 43));
        assert_eq!(sample_haar(3, 42), sample_haar(3, 42));
    }

    #[test]
    fn generator_exponential_is_unitary() {
        let h = sample_gue(4, 1);
        let u = UnitaryOperator::from_generator(&h, 0.7);
        assert!(UnitaryOperator::new(u.matrix().clone()).is_ok());
        let zero = UnitaryOperator::from_generator(&h, 0.0);
        assert!(max_abs(&(zero.matrix() - CMatrix::identity(4, 4))) < 1e-14);
    }
}
