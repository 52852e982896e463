//! Work-measurement schemes as explicit POVM elements with real outcomes,
//! and extraction of work distributions from them.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linops::{
    c, eigen_sorted, eigh, hermitian_part, logm, matfun, max_abs, operator_norm, trace_product,
    CMatrix, HermitianOperator, CLUSTER_TOL,
};
use crate::quantum::{check_beta_positive, gibbs, how_operator, DensityMatrix, Process};

/// A finite POVM `{M_W}` with an outcome `W` attached to every element.
#[derive(Debug, Clone)]
pub struct WorkScheme {
    pub elements: Vec<CMatrix>,
    pub outcomes: Vec<f64>,
    /// Index tuples addressing each element, e.g. `[a, k]` or `[a, b, c, k]`.
    pub labels: Option<Vec<Vec<usize>>>,
}

impl WorkScheme {
    pub const POSITIVITY_TOL: f64 = 1e-10;
    pub const COMPLETENESS_TOL: f64 = 1e-9;

    pub fn new(elements: Vec<CMatrix>, outcomes: Vec<f64>, labels: Option<Vec<Vec<usize>>>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::SchemeInvalid("no elements".into()));
        }
        if elements.len() != outcomes.len() {
            return Err(Error::SchemeInvalid(format!(
                "{} elements but {} outcomes",
                elements.len(),
                outcomes.len()
            )));
        }
        if let Some(l) = &labels {
            if l.len() != elements.len() {
                return Err(Error::SchemeInvalid(format!(
                    "{} elements but {} labels",
                    elements.len(),
                    l.len()
                )));
            }
        }
        let d = elements[0].nrows();
        for m in &elements {
            if m.nrows() != d || m.ncols() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: m.nrows().max(m.ncols()),
                });
            }
        }
        if let Some(w) = outcomes.iter().find(|w| !w.is_finite()) {
            return Err(Error::SchemeInvalid(format!("non-finite outcome {w}")));
        }
        Ok(Self {
            elements,
            outcomes,
            labels,
        })
    }

    pub fn dim(&self) -> usize {
        self.elements[0].nrows()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// `max |sum_W M_W - I|`.
    pub fn completeness_residual(&self) -> f64 {
        let d = self.dim();
        let sum = self
            .elements
            .iter()
            .fold(CMatrix::zeros(d, d), |acc, m| acc + m);
        max_abs(&(sum - CMatrix::identity(d, d)))
    }

    /// Smallest eigenvalue over all elements.
    pub fn min_element_eigenvalue(&self) -> f64 {
        self.elements
            .iter()
            .map(|m| eigen_sorted(m).0[0])
            .fold(f64::INFINITY, f64::min)
    }

    /// Checks positivity and completeness at the default tolerances.
    pub fn validate(&self) -> Result<()> {
        let min_eig = self.min_element_eigenvalue();
        if min_eig < -Self::POSITIVITY_TOL {
            return Err(Error::SchemeInvalid(format!("element eigenvalue {min_eig:e}")));
        }
        let res = self.completeness_residual();
        if res > Self::COMPLETENESS_TOL {
            return Err(Error::SchemeInvalid(format!("completeness residual {res:e}")));
        }
        Ok(())
    }

    /// Default outcome-merging tolerance: `1e-9 * max(span, 1)`.
    pub fn default_merge_tol(&self) -> f64 {
        let lo = self.outcomes.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = self.outcomes.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        1e-9 * (hi - lo).max(1.0)
    }
}

/// Distinct outcomes in ascending order with their probabilities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorkDistribution {
    pub outcomes: Vec<f64>,
    pub probabilities: Vec<f64>,
}

impl WorkDistribution {
    /// `sum_W p_W W`.
    pub fn mean(&self) -> f64 {
        self.outcomes
            .iter()
            .zip(&self.probabilities)
            .map(|(w, p)| w * p)
            .sum()
    }

    /// `sum_W p_W e^{-beta W}`.
    pub fn exp_average(&self, beta: f64) -> f64 {
        self.outcomes
            .iter()
            .zip(&self.probabilities)
            .map(|(w, p)| p * (-beta * w).exp())
            .sum()
    }

    /// Total probability on outcomes with `|W - center| <= tol`.
    pub fn mass_within(&self, center: f64, tol: f64) -> f64 {
        self.outcomes
            .iter()
            .zip(&self.probabilities)
            .filter(|(w, _)| (*w - center).abs() <= tol)
            .map(|(_, p)| p)
            .sum()
    }

    /// Total probability on outcomes with `|W| > threshold`.
    pub fn tail_mass(&self, threshold: f64) -> f64 {
        self.outcomes
            .iter()
            .zip(&self.probabilities)
            .filter(|(w, _)| w.abs() > threshold)
            .map(|(_, p)| p)
            .sum()
    }
}

pub const CLIP_TOL: f64 = 1e-9;
pub const RENORMALIZE_TOL: f64 = 1e-9;

/// Merges `(outcome, weight)` pairs whose outcomes lie within `merge_tol`
/// of their sorted neighbour; merged outcomes are weight-averaged.
pub(crate) fn merge_outcomes(pairs: &mut [(f64, f64)], merge_tol: f64) -> (Vec<f64>, Vec<f64>) {
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut outcomes = Vec::new();
    let mut probabilities = Vec::new();
    let mut start = 0;
    for k in 1..=pairs.len() {
        if k == pairs.len() || pairs[k].0 - pairs[k - 1].0 > merge_tol {
            let group = &pairs[start..k];
            let mass: f64 = group.iter().map(|g| g.1).sum();
            let center = if mass > 0.0 {
                group.iter().map(|g| g.0 * g.1).sum::<f64>() / mass
            } else {
                group.iter().map(|g| g.0).sum::<f64>() / group.len() as f64
            };
            outcomes.push(center);
            probabilities.push(mass);
            start = k;
        }
    }
    (outcomes, probabilities)
}

/// `p_W = tr(rho M_W)`, aggregated over outcomes within `merge_tol`.
pub fn distribution(s: &WorkScheme, rho: &DensityMatrix, merge_tol: f64) -> Result<WorkDistribution> {
    if rho.dim() != s.dim() {
        return Err(Error::DimensionMismatch {
            expected: s.dim(),
            found: rho.dim(),
        });
    }
    let mut pairs = Vec::with_capacity(s.len());
    for (m, &w) in s.elements.iter().zip(&s.outcomes) {
        let p = rho.expectation(m);
        if p < -CLIP_TOL {
            return Err(Error::SchemeInvalid(format!("probability {p:e} for outcome {w}")));
        }
        pairs.push((w, p.max(0.0)));
    }
    let total: f64 = pairs.iter().map(|p| p.1).sum();
    if (total - 1.0).abs() >= RENORMALIZE_TOL {
        return Err(Error::SchemeInvalid(format!("probabilities sum to {total}")));
    }
    for p in &mut pairs {
        p.1 /= total;
    }
    let (outcomes, probabilities) = merge_outcomes(&mut pairs, merge_tol);
    Ok(WorkDistribution {
        outcomes,
        probabilities,
    })
}

pub fn mean(d: &WorkDistribution) -> f64 {
    d.mean()
}

pub fn exp_average(d: &WorkDistribution, beta: f64) -> f64 {
    d.exp_average(beta)
}

/// Two-point measurement: `M_ak = P_a U^dag P'_k U P_a`, `W = E'_k - E_a`.
pub fn tpm_scheme(p: &Process, cluster_tol: f64) -> Result<WorkScheme> {
    let sd = eigh(&p.h_initial, cluster_tol)?;
    let sdp = eigh(&p.h_final, cluster_tol)?;
    let u = p.evolution.matrix();
    let mut elements = Vec::new();
    let mut outcomes = Vec::new();
    let mut labels = Vec::new();
    for (a, pa) in sd.projectors.iter().enumerate() {
        for (k, pk) in sdp.projectors.iter().enumerate() {
            let heis = u.adjoint() * pk * u;
            elements.push(hermitian_part(&(pa * heis * pa)));
            outcomes.push(sdp.values[k] - sd.values[a]);
            labels.push(vec![a, k]);
        }
    }
    WorkScheme::new(elements, outcomes, Some(labels))
}

/// Projective measurement of `Omega = U^dag H' U - H`.
pub fn how_scheme(p: &Process, cluster_tol: f64) -> Result<WorkScheme> {
    operator_scheme(&how_operator(p), cluster_tol)
}

/// Eigenprojectors and eigenvalues of a Hermitian operator as a scheme.
pub fn operator_scheme(op: &HermitianOperator, cluster_tol: f64) -> Result<WorkScheme> {
    let sd = eigh(op, cluster_tol)?;
    WorkScheme::new(sd.projectors, sd.values, None)
}

/// Ties between diagonal entries closer than this are broken by index.
pub const DIAGONAL_TIE_TOL: f64 = 1e-12;
/// `[rho, H]` below this (max-abs) counts as commuting: `R = I`.
pub const COMMUTING_TOL: f64 = 1e-12;

/// Unitary `R` with `R rho R^dag` diagonal in the eigenbasis of `H`, its
/// diagonal ordered like the diagonal of `rho` in that basis.
pub fn diagonalizing_rotation(h: &HermitianOperator, rho: &DensityMatrix) -> CMatrix {
    let n = h.dim();
    if crate::quantum::commutator_norm(rho.matrix(), h.matrix()) <= COMMUTING_TOL {
        return CMatrix::identity(n, n);
    }
    let (_, e) = eigen_sorted(h.matrix());
    let diag: Vec<f64> = (0..n)
        .map(|i| (e.column(i).adjoint() * rho.matrix() * e.column(i))[(0, 0)].re)
        .collect();
    // pos[j]: basis index holding the j-th largest diagonal entry.
    let mut pos: Vec<usize> = (0..n).collect();
    pos.sort_by(|&i, &j| {
        if (diag[i] - diag[j]).abs() <= DIAGONAL_TIE_TOL {
            i.cmp(&j)
        } else {
            diag[j].total_cmp(&diag[i])
        }
    });

    let (r_asc, v_asc) = eigen_sorted(rho.matrix());
    let r: Vec<f64> = r_asc.iter().rev().cloned().collect();
    let v = CMatrix::from_fn(n, n, |i, j| v_asc[(i, n - 1 - j)]);

    // Within each cluster of equal eigenvalues of rho, pick the basis whose
    // j-th vector has maximal overlap with e_{pos[j]}.
    let mut vectors = CMatrix::zeros(n, n);
    let mut start = 0;
    for k in 1..=n {
        if k < n && r[k - 1] - r[k] <= CLUSTER_TOL {
            continue;
        }
        let block = v.columns(start, k - start).into_owned();
        let proj = &block * block.adjoint();
        let mut chosen: Vec<nalgebra::DVector<Complex64>> = Vec::new();
        let mut fallback = 0;
        for j in start..k {
            let target = e.column(pos[j]).into_owned();
            let mut w = &proj * &target;
            gram_schmidt(&mut w, &chosen);
            while w.norm() < 1e-8 {
                w = block.column(fallback).into_owned();
                fallback += 1;
                gram_schmidt(&mut w, &chosen);
            }
            let overlap = target.dotc(&w);
            if overlap.norm() > 0.0 {
                w *= overlap.conj() / overlap.norm();
            }
            let norm = w.norm();
            w /= c(norm);
            chosen.push(w);
        }
        for (j, w) in (start..k).zip(chosen) {
            vectors.set_column(j, &w);
        }
        start = k;
    }

    let mut rot = CMatrix::zeros(n, n);
    for j in 0..n {
        rot += e.column(pos[j]) * vectors.column(j).adjoint();
    }
    rot
}

fn gram_schmidt(w: &mut nalgebra::DVector<Complex64>, basis: &[nalgebra::DVector<Complex64>]) {
    for b in basis {
        let coeff = b.dotc(w);
        *w -= b * coeff;
    }
}

/// State-dependent scheme combining a backward TPM from `rho` to a state
/// diagonal in `H` with a forward TPM from there to the final state.
///
/// Effective elements are `p^II_ck M^I_ab` with outcomes
/// `(E_b - E_a) + (E'_k - E_c)` and labels `[a, b, c, k]`.
pub fn composite_scheme(p: &Process, rho: &DensityMatrix, cluster_tol: f64) -> Result<WorkScheme> {
    p.check_state(rho)?;
    let sd = eigh(&p.h_initial, cluster_tol)?;
    let sdp = eigh(&p.h_final, cluster_tol)?;
    let r = diagonalizing_rotation(&p.h_initial, rho);
    let u = p.evolution.matrix();
    let rotated: Vec<CMatrix> = sd.projectors.iter().map(|pb| r.adjoint() * pb * &r).collect();
    let heis: Vec<CMatrix> = sdp.projectors.iter().map(|pk| u.adjoint() * pk * u).collect();

    let mut stage_two = Vec::new();
    for (cc, q) in rotated.iter().enumerate() {
        for (k, hk) in heis.iter().enumerate() {
            let m = q * hk * q;
            let prob = trace_product(rho.matrix(), &m).re.max(0.0);
            stage_two.push((cc, k, prob, sdp.values[k] - sd.values[cc]));
        }
    }

    let mut elements = Vec::new();
    let mut outcomes = Vec::new();
    let mut labels = Vec::new();
    for (a, pa) in sd.projectors.iter().enumerate() {
        for (b, q) in rotated.iter().enumerate() {
            let m1 = hermitian_part(&(q * pa * q));
            let w1 = sd.values[b] - sd.values[a];
            for &(cc, k, prob, w2) in &stage_two {
                elements.push(&m1 * c(prob));
                outcomes.push(w1 + w2);
                labels.push(vec![a, b, cc, k]);
            }
        }
    }
    WorkScheme::new(elements, outcomes, Some(labels))
}

/// Search settings for the best-fit inverse temperature of a state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaHatConfig {
    pub beta_min: f64,
    pub beta_max: f64,
    pub grid_points: usize,
    pub tolerance: f64,
    /// Below this the scheme falls back to the `beta -> 0` limit `Omega`.
    pub beta_floor: f64,
    pub cluster_tol: f64,
}

impl Default for BetaHatConfig {
    fn default() -> Self {
        Self {
            beta_min: 1e-6,
            beta_max: 1e3,
            grid_points: 60,
            tolerance: 1e-10,
            beta_floor: 1e-6,
            cluster_tol: CLUSTER_TOL,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaHatFit {
    pub beta: f64,
    /// `||rho - tau_beta||` at the returned `beta`.
    pub residual: f64,
    /// Minimum sits on the lower edge of the search interval.
    pub at_floor: bool,
}

/// `argmin_beta ||rho - tau_beta[H]||` over `[beta_min, beta_max]`.
pub fn fit_beta_hat(h: &HermitianOperator, rho: &DensityMatrix, cfg: &BetaHatConfig) -> Result<BetaHatFit> {
    if !(cfg.beta_min > 0.0 && cfg.beta_max > cfg.beta_min && cfg.grid_points >= 3) {
        return Err(Error::Argument(format!("invalid search settings {cfg:?}")));
    }
    if rho.dim() != h.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            found: rho.dim(),
        });
    }
    let distance = |beta: f64| -> Result<f64> {
        let tau = gibbs(h, beta)?;
        Ok(operator_norm(&HermitianOperator::hermitize(
            rho.matrix() - tau.state.matrix(),
        )))
    };
    let n = cfg.grid_points;
    let (lmin, lmax) = (cfg.beta_min.ln(), cfg.beta_max.ln());
    let grid: Vec<f64> = (0..n)
        .map(|i| (lmin + (lmax - lmin) * i as f64 / (n - 1) as f64).exp())
        .collect();
    let mut values = Vec::with_capacity(n);
    for &b in &grid {
        values.push(distance(b)?);
    }
    let best = (0..n).fold(0, |best, i| if values[i] < values[best] { i } else { best });
    if best == 0 {
        return Ok(BetaHatFit {
            beta: grid[0],
            residual: values[0],
            at_floor: true,
        });
    }
    if best == n - 1 {
        return Err(Error::Numeric(format!(
            "beta-hat minimum not bracketed: best grid point beta = {} (upper edge), distance {:e}",
            grid[best], values[best]
        )));
    }

    let (mut lo, mut hi) = (grid[best - 1], grid[best + 1]);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let mut f1 = distance(x1)?;
    let mut f2 = distance(x2)?;
    while hi - lo > cfg.tolerance {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = distance(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = distance(x2)?;
        }
    }
    let beta = 0.5 * (lo + hi);
    let mut fit = BetaHatFit {
        beta,
        residual: distance(beta)?,
        at_floor: false,
    };
    if values[best] < fit.residual {
        fit.beta = grid[best];
        fit.residual = values[best];
    }
    fit.at_floor = fit.beta < cfg.beta_floor;
    Ok(fit)
}

/// `Upsilon = -beta^{-1} ln[e^{beta H/2} e^{-beta U^dag H' U} e^{beta H/2}]`,
/// evaluated with both exponentials shifted to have spectra in `(0, 1]`.
pub fn upsilon_operator(p: &Process, beta: f64) -> Result<HermitianOperator> {
    check_beta_positive(beta)?;
    let k = p.heisenberg_final();
    let (e_vals, _) = eigen_sorted(p.h_initial.matrix());
    let (k_vals, _) = eigen_sorted(k.matrix());
    let e_max = *e_vals.last().expect("nonempty spectrum");
    let k_min = k_vals[0];
    let a = matfun(&p.h_initial, |e| (0.5 * beta * (e - e_max)).exp())?;
    let b = matfun(&k, |x| (-beta * (x - k_min)).exp())?;
    let m = HermitianOperator::hermitize(a.matrix() * b.matrix() * a.matrix());
    let log_m = logm(&m).map_err(|err| {
        Error::Numeric(format!(
            "symmetrized exponential product is not positive definite at beta = {beta}: {err}"
        ))
    })?;
    Ok(log_m.scaled(-1.0 / beta).shifted(k_min - e_max))
}

/// The operator scheme of `Upsilon` at the best-fit inverse temperature of
/// `rho`; the `beta -> 0` limit is the Heisenberg-operator scheme.
pub fn upsilon_scheme(p: &Process, rho: &DensityMatrix, cfg: &BetaHatConfig) -> Result<WorkScheme> {
    p.check_state(rho)?;
    let fit = fit_beta_hat(&p.h_initial, rho, cfg)?;
    if fit.at_floor {
        return how_scheme(p, cfg.cluster_tol);
    }
    operator_scheme(&upsilon_operator(p, fit.beta)?, cfg.cluster_tol)
}

/// The four schemes compared throughout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeKind {
    Tpm,
    How,
    Composite,
    Upsilon,
}

impl SchemeKind {
    pub const ALL: [SchemeKind; 4] = [Self::How, Self::Composite, Self::Tpm, Self::Upsilon];

    pub fn name(self) -> &'static str {
        match self {
            Self::Tpm => "tpm",
            Self::How => "how",
            Self::Composite => "composite",
            Self::Upsilon => "upsilon",
        }
    }

    /// Whether the elements depend on the measured state.
    pub fn state_dependent(self) -> bool {
        matches!(self, Self::Composite | Self::Upsilon)
    }

    pub fn build(self, p: &Process, rho: &DensityMatrix, cfg: &BetaHatConfig) -> Result<WorkScheme> {
        match self {
            Self::Tpm => tpm_scheme(p, cfg.cluster_tol),
            Self::How => how_scheme(p, cfg.cluster_tol),
            Self::Composite => composite_scheme(p, rho, cfg.cluster_tol),
            Self::Upsilon => upsilon_scheme(p, rho, cfg),
        }
    }
}

impl std::fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for SchemeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tpm" => Ok(Self::Tpm),
            "how" => Ok(Self::How),
            "composite" => Ok(Self::Composite),
            "upsilon" => Ok(Self::Upsilon),
            other => Err(Error::Argument(format!("unknown scheme '{other}'"))),
        }
    }
}
