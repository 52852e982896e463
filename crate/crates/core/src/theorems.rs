//! Numerical experiments on the inequalities, small-strength expansions and
//! scaling laws of the work schemes, and the two spectral properties of the
//! state-dependent operator `Upsilon`.

use serde::{Deserialize, Serialize};

use crate::conditions::jarzynski_rhs;
use crate::error::{Error, Result};
use crate::linops::{eigen_sorted, eigh, matfun, CMatrix, HermitianOperator, CLUSTER_TOL};
use crate::quantum::{
    check_beta_positive, gibbs, how_operator, i_commutator, omega_commutator, pi_to_process, relative_entropy,
    DensityMatrix, PiProcess, Process,
};
use crate::schemes::{distribution, how_scheme, upsilon_operator, WorkScheme};

/// `<e^{-beta Omega}>_tau - e^{-beta Delta F}`, with the average taken as
/// `tr(tau e^{-beta Omega})`.
pub fn golden_thompson_gap(p: &Process, beta: f64) -> Result<f64> {
    check_beta_positive(beta)?;
    let tau = gibbs(&p.h_initial, beta)?.state;
    let boltz = matfun(&how_operator(p), |w| (-beta * w).exp())?;
    Ok(tau.expectation(boltz.matrix()) - jarzynski_rhs(&p.h_initial, &p.h_final, beta))
}

/// Same gap computed from the work distribution of the Heisenberg-operator
/// scheme.
pub fn golden_thompson_gap_from_distribution(p: &Process, beta: f64) -> Result<f64> {
    check_beta_positive(beta)?;
    let tau = gibbs(&p.h_initial, beta)?.state;
    let s = how_scheme(p, CLUSTER_TOL)?;
    let d = distribution(&s, &tau, s.default_merge_tol())?;
    Ok(d.exp_average(beta) - jarzynski_rhs(&p.h_initial, &p.h_final, beta))
}

/// The two sides of `beta^2 <omega^2> >= beta <i[h, omega]>` on `tau_beta`,
/// by direct traces and by sums in the eigenbasis of `H`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ineq2Terms {
    pub lhs: f64,
    pub rhs: f64,
    pub lhs_eig: f64,
    pub rhs_eig: f64,
}

impl Ineq2Terms {
    /// Largest disagreement between the direct and eigenbasis evaluations.
    pub fn discrepancy(&self) -> f64 {
        (self.lhs - self.lhs_eig).abs().max((self.rhs - self.rhs_eig).abs())
    }
}

pub fn ineq2_terms(h: &HermitianOperator, gen: &HermitianOperator, beta: f64) -> Result<Ineq2Terms> {
    check_beta_positive(beta)?;
    let pp = PiProcess::new(h.clone(), gen.clone(), 0.0)?;
    let omega = omega_commutator(&pp);
    let second = i_commutator(gen, &omega);
    let g = gibbs(h, beta)?;
    let tau = &g.state;
    let lhs = beta * beta * tau.expectation(&(omega.matrix() * omega.matrix()));
    let rhs = beta * tau.expectation(second.matrix());

    let (energies, vectors) = eigen_sorted(h.matrix());
    let hk = vectors.adjoint() * gen.matrix() * &vectors;
    let p = &g.populations;
    let (mut lhs_eig, mut rhs_eig) = (0.0, 0.0);
    for k in 0..energies.len() {
        for j in k + 1..energies.len() {
            let delta = beta * (energies[j] - energies[k]);
            let w = hk[(k, j)].norm_sqr();
            lhs_eig += (p[k] + p[j]) * delta * delta * w;
            rhs_eig += 2.0 * (p[k] - p[j]) * delta * w;
        }
    }
    Ok(Ineq2Terms {
        lhs,
        rhs,
        lhs_eig,
        rhs_eig,
    })
}

/// A quantity sampled at decreasing strengths with its log-log slope.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingResult {
    pub xs: Vec<f64>,
    pub values: Vec<f64>,
    /// Slope over the three smallest strengths; `None` when any of those
    /// values is zero.
    pub fitted_exponent: Option<f64>,
    /// RMS residual of that fit.
    pub fit_residual: Option<f64>,
}

impl ScalingResult {
    pub fn fit(xs: &[f64], values: &[f64]) -> Self {
        let mut idx: Vec<usize> = (0..xs.len()).collect();
        idx.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
        let pts: Vec<(f64, f64)> = idx.iter().take(3).map(|&i| (xs[i], values[i])).collect();
        let usable = pts.len() >= 2 && pts.iter().all(|&(x, v)| x > 0.0 && v > 0.0 && v.is_finite());
        let (fitted_exponent, fit_residual) = if usable {
            let (slope, rms) = loglog_fit(&pts);
            (Some(slope), Some(rms))
        } else {
            (None, None)
        };
        Self {
            xs: xs.to_vec(),
            values: values.to_vec(),
            fitted_exponent,
            fit_residual,
        }
    }
}

/// Least-squares slope of `ln v` against `ln x` and the RMS residual.
pub fn loglog_fit(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    let lx: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = lx.iter().zip(&ly).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    (slope, (ss / n).sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingAnalysis {
    /// `|<W>|` from the scheme's distribution.
    pub mean: ScalingResult,
    /// Probability of `|W|` above half the smallest level spacing of `H`.
    pub tail_mass: ScalingResult,
    /// `|tr(rho Omega)|`.
    pub unmeasured: ScalingResult,
    pub tail_threshold: f64,
}

/// Mean work, tail mass and unmeasured average work of the cyclic process
/// `U = e^{-i x h}` for each strength in `xs`.
pub fn scaling_analysis<F>(
    factory: F,
    h: &HermitianOperator,
    gen: &HermitianOperator,
    rho: &DensityMatrix,
    xs: &[f64],
) -> Result<ScalingAnalysis>
where
    F: Fn(&Process, &DensityMatrix) -> Result<WorkScheme>,
{
    if xs.is_empty() || xs.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
        return Err(Error::Argument("strengths must be positive and finite".into()));
    }
    let base = PiProcess::new(h.clone(), gen.clone(), 0.0)?;
    let first_order = rho.expectation(omega_commutator(&base).matrix());
    let scale = crate::linops::operator_norm(h).max(1.0) * crate::linops::operator_norm(gen).max(1.0);
    if first_order.abs() <= 1e-10 * scale {
        return Err(Error::Degenerate(format!(
            "tr(rho [h, H]) vanishes ({first_order:e}): no first-order work"
        )));
    }
    let sd = eigh(h, CLUSTER_TOL)?;
    let min_gap = sd.values.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    let tail_threshold = if min_gap.is_finite() { 0.5 * min_gap } else { 0.5 };

    let mut means = Vec::with_capacity(xs.len());
    let mut tails = Vec::with_capacity(xs.len());
    let mut unmeasured = Vec::with_capacity(xs.len());
    for &x in xs {
        let p = pi_to_process(&base.with_strength(x));
        let s = factory(&p, rho)?;
        let d = distribution(&s, rho, s.default_merge_tol())?;
        means.push(d.mean().abs());
        tails.push(d.tail_mass(tail_threshold));
        unmeasured.push(rho.expectation(how_operator(&p).matrix()).abs());
    }
    Ok(ScalingAnalysis {
        mean: ScalingResult::fit(xs, &means),
        tail_mass: ScalingResult::fit(xs, &tails),
        unmeasured: ScalingResult::fit(xs, &unmeasured),
        tail_threshold,
    })
}

/// `|<W>(x) - x <omega> - (x^2/2) <i[h, omega]>|` for each strength, using
/// the unmeasured average work `tr(rho Omega(x))`.
pub fn work_expansion_remainders(
    h: &HermitianOperator,
    gen: &HermitianOperator,
    rho: &DensityMatrix,
    xs: &[f64],
) -> Result<Vec<f64>> {
    let base = PiProcess::new(h.clone(), gen.clone(), 0.0)?;
    let omega = omega_commutator(&base);
    let first = rho.expectation(omega.matrix());
    let second = rho.expectation(i_commutator(gen, &omega).matrix());
    xs.iter()
        .map(|&x| {
            let p = pi_to_process(&base.with_strength(x));
            let w = rho.expectation(how_operator(&p).matrix());
            Ok((w - x * first - 0.5 * x * x * second).abs())
        })
        .collect()
}

/// Strength at which the second-order coefficients are compared.
pub const COEFFICIENT_X: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpansionPoint {
    pub x: f64,
    /// `beta <Upsilon_tau>_tau`.
    pub beta_upsilon: f64,
    /// `beta <Omega>_tau`.
    pub beta_omega: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UpsilonExpansion {
    pub points: Vec<ExpansionPoint>,
    /// Eigenbasis sum `sum_{k<j} |h_kj|^2 (p_k - p_j)^2 (p_k + p_j) / (2 p_k p_j)`.
    pub upsilon_coefficient: f64,
    /// Eigenbasis sum `sum_{k<j} |h_kj|^2 (p_k - p_j) Delta_kj`.
    pub omega_coefficient: f64,
    /// `beta <Upsilon_tau> / x^2` at `COEFFICIENT_X`.
    pub upsilon_measured: f64,
    /// `beta <Omega> / x^2` at `COEFFICIENT_X`.
    pub omega_measured: f64,
}

impl UpsilonExpansion {
    /// Relative deviations of the measured coefficients from the sums.
    pub fn relative_errors(&self) -> (f64, f64) {
        let rel = |m: f64, c: f64| if c == 0.0 { m.abs() } else { ((m - c) / c).abs() };
        (
            rel(self.upsilon_measured, self.upsilon_coefficient),
            rel(self.omega_measured, self.omega_coefficient),
        )
    }
}

/// Thermal averages of `Upsilon_tau` and `Omega` along `U = e^{-i x h}`,
/// with the second-order coefficients predicted in the eigenbasis of `H`.
pub fn upsilon_expansion_check(
    h: &HermitianOperator,
    gen: &HermitianOperator,
    beta: f64,
    xs: &[f64],
) -> Result<UpsilonExpansion> {
    check_beta_positive(beta)?;
    let g = gibbs(h, beta)?;
    let tau = &g.state;
    let base = PiProcess::new(h.clone(), gen.clone(), 0.0)?;
    let point = |x: f64| -> Result<ExpansionPoint> {
        let p = pi_to_process(&base.with_strength(x));
        let ups = upsilon_operator(&p, beta)?;
        Ok(ExpansionPoint {
            x,
            beta_upsilon: beta * tau.expectation(ups.matrix()),
            beta_omega: beta * tau.expectation(how_operator(&p).matrix()),
        })
    };
    let points = xs.iter().map(|&x| point(x)).collect::<Result<Vec<_>>>()?;

    let (energies, vectors) = eigen_sorted(h.matrix());
    let hk = vectors.adjoint() * gen.matrix() * &vectors;
    let p = &g.populations;
    let (mut up, mut om) = (0.0, 0.0);
    for k in 0..energies.len() {
        for j in k + 1..energies.len() {
            let w = hk[(k, j)].norm_sqr();
            let delta = beta * (energies[j] - energies[k]);
            up += w * (p[k] - p[j]).powi(2) * (p[k] + p[j]) / (2.0 * p[k] * p[j]);
            om += w * (p[k] - p[j]) * delta;
        }
    }
    let at = point(COEFFICIENT_X)?;
    let x2 = COEFFICIENT_X * COEFFICIENT_X;
    Ok(UpsilonExpansion {
        points,
        upsilon_coefficient: up,
        omega_coefficient: om,
        upsilon_measured: at.beta_upsilon / x2,
        omega_measured: at.beta_omega / x2,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Majorization {
    /// Descending.
    pub upsilon_spectrum: Vec<f64>,
    /// Descending.
    pub omega_spectrum: Vec<f64>,
    /// `min_{k<d} (sum_{m<=k} Upsilon_m - sum_{m<=k} Omega_m)`; `None` for `d = 1`.
    pub min_partial_sum_gap: Option<f64>,
    /// `|tr Upsilon_tau - tr Omega|`.
    pub trace_difference: f64,
}

fn descending(m: &CMatrix) -> Vec<f64> {
    let mut v = eigen_sorted(m).0;
    v.reverse();
    v
}

/// Partial sums of the descending spectra of `Upsilon_tau` and `Omega`.
pub fn majorization_check(p: &Process, beta: f64) -> Result<Majorization> {
    let ups = descending(upsilon_operator(p, beta)?.matrix());
    let om = descending(how_operator(p).matrix());
    let d = ups.len();
    let mut gap: Option<f64> = None;
    let (mut su, mut so) = (0.0, 0.0);
    for k in 0..d.saturating_sub(1) {
        su += ups[k];
        so += om[k];
        gap = Some(gap.map_or(su - so, |g: f64| g.min(su - so)));
    }
    let trace_difference = (ups.iter().sum::<f64>() - om.iter().sum::<f64>()).abs();
    Ok(Majorization {
        upsilon_spectrum: ups,
        omega_spectrum: om,
        min_partial_sum_gap: gap,
        trace_difference,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelativeEntropyBound {
    /// `<Omega>_tau`.
    pub omega_average: f64,
    /// `<Upsilon_tau>_tau`.
    pub upsilon_average: f64,
    /// `S(tau || U^dag tau' U)`.
    pub relative_entropy: f64,
    pub delta_free_energy: f64,
}

impl RelativeEntropyBound {
    /// `beta^{-1} S - (<Omega> - <Upsilon>)`, nonnegative when the bound holds.
    pub fn bound_slack(&self, beta: f64) -> f64 {
        self.relative_entropy / beta - (self.omega_average - self.upsilon_average)
    }

    /// `<Upsilon> - Delta F`, nonnegative when the free-energy bound holds.
    pub fn free_energy_slack(&self) -> f64 {
        self.upsilon_average - self.delta_free_energy
    }
}

pub fn relative_entropy_bound_check(p: &Process, beta: f64) -> Result<RelativeEntropyBound> {
    check_beta_positive(beta)?;
    let tau = gibbs(&p.h_initial, beta)?.state;
    let tau_final = gibbs(&p.h_final, beta)?.state;
    let pulled_back = tau_final.evolved(&p.evolution.adjoint());
    Ok(RelativeEntropyBound {
        omega_average: tau.expectation(how_operator(p).matrix()),
        upsilon_average: tau.expectation(upsilon_operator(p, beta)?.matrix()),
        relative_entropy: relative_entropy(&tau, &pulled_back)?,
        delta_free_energy: crate::quantum::delta_free_energy(&p.h_initial, &p.h_final, beta)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linops::{c, operator_norm, sample_gue, sample_haar, UnitaryOperator};
    use crate::schemes::{composite_scheme, tpm_scheme};

    fn hadamard() -> UnitaryOperator {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        UnitaryOperator::new(CMatrix::from_row_slice(2, 2, &[c(s), c(s), c(s), c(-s)])).unwrap()
    }

    fn qubit() -> HermitianOperator {
        HermitianOperator::from_real_diagonal(&[0.0, 1.0])
    }

    fn sigma_x() -> HermitianOperator {
        HermitianOperator::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap()
    }

    fn unit(h: HermitianOperator) -> HermitianOperator {
        let n = operator_norm(&h);
        h.scaled(1.0 / n)
    }

    fn coherent_qubit() -> DensityMatrix {
        DensityMatrix::pure(&[c(0.8), num_complex::Complex64::new(0.36, 0.48)]).unwrap()
    }

    #[test]
    fn golden_thompson_examples() {
        let h = HermitianOperator::from_real_diagonal(&[0.0, 0.5, 1.2]);
        let hp = HermitianOperator::from_real_diagonal(&[0.3, -0.1, 0.8]);
        let p = Process::new(h, hp, UnitaryOperator::identity(3)).unwrap();
        assert!(golden_thompson_gap(&p, 1.0).unwrap().abs() < 1e-10);

        let p = Process::new(qubit(), qubit(), hadamard()).unwrap();
        let gap = golden_thompson_gap(&p, 1.0).unwrap();
        // Omega^2 = w^2 I with w = 1/sqrt(2), so e^{-Omega} = cosh w - sinh w Omega / w,
        // <Omega>_tau = (p0 - p1)/2 and Z'/Z = 1.
        let w = std::f64::consts::FRAC_1_SQRT_2;
        let p0 = 1.0 / (1.0 + (-1f64).exp());
        let expected = w.cosh() - w.sinh() * (2.0 * p0 - 1.0) / (2.0 * w) - 1.0;
        assert!((gap - expected).abs() < 1e-12, "gap {gap}");

        for seed in 0..10 {
            let p = Process::new(sample_gue(4, seed), sample_gue(4, seed + 9), sample_haar(4, seed)).unwrap();
            let a = golden_thompson_gap(&p, 0.7).unwrap();
            let b = golden_thompson_gap_from_distribution(&p, 0.7).unwrap();
            assert!((a - b).abs() < 1e-10);
            assert!(a > 0.0);
        }
    }

    #[test]
    fn ineq2_examples() {
        let zero = ineq2_terms(&qubit(), &HermitianOperator::from_real_diagonal(&[0.2, 0.9]), 1.0).unwrap();
        assert_eq!((zero.lhs, zero.rhs), (0.0, 0.0));

        // omega = i[sx, diag(0,1)] has |omega_01| = 1, so <omega^2> = 1 and
        // <i[h, omega]> = 2 (p0 - p1).
        let t = ineq2_terms(&qubit(), &sigma_x(), 1.0).unwrap();
        let p0 = 1.0 / (1.0 + (-1f64).exp());
        let p1 = 1.0 - p0;
        assert!((t.lhs - 1.0).abs() < 1e-14);
        assert!((t.rhs - 2.0 * (p0 - p1)).abs() < 1e-14);
        assert!(t.lhs > t.rhs);
        assert!(t.discrepancy() < 1e-12);
    }

    #[test]
    fn scaling_exponents_on_coherent_qubit() {
        let xs = [1e-1, 1e-2, 1e-3, 1e-4];
        let rho = coherent_qubit();
        let how = scaling_analysis(|p, _| how_scheme(p, CLUSTER_TOL), &qubit(), &sigma_x(), &rho, &xs).unwrap();
        assert!((how.mean.fitted_exponent.unwrap() - 1.0).abs() < 0.05);
        assert!((how.unmeasured.fitted_exponent.unwrap() - 1.0).abs() < 0.05);

        let tpm = scaling_analysis(|p, _| tpm_scheme(p, CLUSTER_TOL), &qubit(), &sigma_x(), &rho, &xs).unwrap();
        assert!((tpm.mean.fitted_exponent.unwrap() - 2.0).abs() < 0.1);
        assert!((tpm.tail_mass.fitted_exponent.unwrap() - 2.0).abs() < 0.1);

        let comp = scaling_analysis(composite_scheme_factory, &qubit(), &sigma_x(), &rho, &xs).unwrap();
        // exact A1: the mean follows tr(rho Omega)
        assert!((comp.mean.fitted_exponent.unwrap() - 1.0).abs() < 0.05);
        assert!(comp.tail_mass.values.iter().all(|&v| v > 1e-2));
    }

    fn composite_scheme_factory(p: &Process, rho: &DensityMatrix) -> Result<WorkScheme> {
        composite_scheme(p, rho, CLUSTER_TOL)
    }

    #[test]
    fn scaling_rejects_incoherent_state() {
        let rho = DensityMatrix::from_diagonal(&[0.7, 0.3]).unwrap();
        let err = scaling_analysis(|p, _| tpm_scheme(p, CLUSTER_TOL), &qubit(), &sigma_x(), &rho, &[0.1, 0.01]);
        assert!(matches!(err, Err(Error::Degenerate(_))));
    }

    #[test]
    fn loglog_fit_recovers_power() {
        let pts: Vec<(f64, f64)> = [1e-2, 1e-3, 1e-4].iter().map(|&x| (x, 3.0 * x * x)).collect();
        let (slope, rms) = loglog_fit(&pts);
        assert!((slope - 2.0).abs() < 1e-12);
        assert!(rms < 1e-12);
    }

    #[test]
    fn work_expansion_is_third_order() {
        let rho = coherent_qubit();
        let h = HermitianOperator::from_real_diagonal(&[0.0, 1.3]);
        let g = HermitianOperator::from_real_rows(&[&[0.4, 0.7], &[0.7, -0.2]]).unwrap();
        let xs = [1e-1, 5e-2, 2.5e-2];
        let r = work_expansion_remainders(&h, &g, &rho, &xs).unwrap();
        let (slope, _) = loglog_fit(&xs.iter().cloned().zip(r.iter().cloned()).collect::<Vec<_>>());
        assert!((slope - 3.0).abs() < 0.1, "slope {slope}");
    }

    #[test]
    fn upsilon_expansion_examples() {
        let e = upsilon_expansion_check(&qubit(), &HermitianOperator::from_real_diagonal(&[0.3, 1.0]), 1.0, &[1e-2]).unwrap();
        assert_eq!(e.upsilon_coefficient, 0.0);
        assert_eq!(e.omega_coefficient, 0.0);

        let e = upsilon_expansion_check(&qubit(), &sigma_x(), 1.0, &[1e-2]).unwrap();
        let p0 = 1.0 / (1.0 + (-1f64).exp());
        assert!((e.omega_coefficient - (2.0 * p0 - 1.0)).abs() < 1e-14);
        let (eu, eo) = e.relative_errors();
        assert!(eu < 0.05 && eo < 0.05, "{e:?}");
        assert!(e.points[0].beta_upsilon > e.points[0].beta_omega);
    }

    #[test]
    fn majorization_examples() {
        let h = HermitianOperator::from_real_diagonal(&[0.0, 0.5, 1.2]);
        let hp = HermitianOperator::from_real_diagonal(&[0.3, -0.1, 0.8]);
        let p = Process::new(h, hp, UnitaryOperator::identity(3)).unwrap();
        let m = majorization_check(&p, 1.0).unwrap();
        for (a, b) in m.upsilon_spectrum.iter().zip(&m.omega_spectrum) {
            assert!((a - b).abs() < 1e-9);
        }

        let p = Process::new(qubit(), qubit(), hadamard()).unwrap();
        let m = majorization_check(&p, 1.0).unwrap();
        assert!(m.min_partial_sum_gap.unwrap() > 1e-3);
        assert!(m.trace_difference < 1e-9);

        for seed in 0..10 {
            let dim = 2 + seed as usize % 5;
            let p = Process::new(unit(sample_gue(dim, seed)), unit(sample_gue(dim, seed + 3)), sample_haar(dim, seed)).unwrap();
            let m = majorization_check(&p, 1.0).unwrap();
            assert!(m.trace_difference < 1e-9);
            assert!(m.min_partial_sum_gap.unwrap() > -1e-8);
        }
    }

    #[test]
    fn relative_entropy_bound_examples() {
        let p = Process::trivial(&unit(sample_gue(3, 2)));
        let r = relative_entropy_bound_check(&p, 1.0).unwrap();
        assert!(r.upsilon_average.abs() < 1e-12);
        assert!(r.delta_free_energy.abs() < 1e-12);

        let p = Process::new(qubit(), qubit(), hadamard()).unwrap();
        let r = relative_entropy_bound_check(&p, 1.0).unwrap();
        assert!(r.bound_slack(1.0) > 1e-3);
        assert!(r.free_energy_slack() > 1e-3);

        let h = HermitianOperator::from_real_diagonal(&[0.0, 0.5, 1.2]);
        let hp = HermitianOperator::from_real_diagonal(&[0.3, -0.1, 0.8]);
        let p = Process::new(h, hp, UnitaryOperator::identity(3)).unwrap();
        let r = relative_entropy_bound_check(&p, 1.0).unwrap();
        assert!((r.omega_average - r.upsilon_average).abs() < 1e-10);
        assert!((r.bound_slack(1.0) - r.relative_entropy).abs() < 1e-10);
    }
}
