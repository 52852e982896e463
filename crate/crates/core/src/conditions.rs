//! Checkers for average-energy conservation (A1), zero work on the trivial
//! process (A2), the Jarzynski equality (B), and the structural
//! characterization of state-independent schemes satisfying B.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linops::{c, eigh, max_abs, trace_product, CMatrix, HermitianOperator, SpectralDecomposition, CLUSTER_TOL};
use crate::quantum::{
    average_work_unmeasured, check_beta_positive, gibbs, how_operator, log_partition, DensityMatrix, Process,
};
use crate::schemes::{distribution, merge_outcomes, tpm_scheme, WorkScheme};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Condition {
    A1,
    A2,
    B,
    #[serde(rename = "JEclass")]
    JeClass,
    Nondegenerate,
    Thm2,
    ThermalAverage,
    GoldenThompson,
    Ineq2,
    Scaling,
    UpsilonExpansion,
    Majorization,
    RelativeEntropyBound,
    GaussianLimit,
}

impl Condition {
    /// Serialized name.
    pub fn name(self) -> &'static str {
        match self {
            Self::A1 => "A1",
            Self::A2 => "A2",
            Self::B => "B",
            Self::JeClass => "JEclass",
            Self::Nondegenerate => "Nondegenerate",
            Self::Thm2 => "Thm2",
            Self::ThermalAverage => "ThermalAverage",
            Self::GoldenThompson => "GoldenThompson",
            Self::Ineq2 => "Ineq2",
            Self::Scaling => "Scaling",
            Self::UpsilonExpansion => "UpsilonExpansion",
            Self::Majorization => "Majorization",
            Self::RelativeEntropyBound => "RelativeEntropyBound",
            Self::GaussianLimit => "GaussianLimit",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

/// Identifies the instance a report was computed on.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct InstanceContext {
    pub dim: usize,
    pub seed: Option<u64>,
    pub beta: Option<f64>,
    pub x: Option<f64>,
}

impl InstanceContext {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub condition: Condition,
    pub scheme: Option<String>,
    pub status: Status,
    pub passed: bool,
    /// `None` only for skipped checks.
    pub residual: Option<f64>,
    pub tolerance: f64,
    pub context: InstanceContext,
    /// Indices of the worst violation, when it has a natural address.
    pub location: Option<Vec<usize>>,
    pub note: Option<String>,
}

impl ConditionReport {
    pub fn from_residual(condition: Condition, residual: f64, tolerance: f64, dim: usize) -> Self {
        let passed = residual <= tolerance;
        Self {
            condition,
            scheme: None,
            status: if passed { Status::Pass } else { Status::Fail },
            passed,
            residual: Some(residual),
            tolerance,
            context: InstanceContext::new(dim),
            location: None,
            note: None,
        }
    }

    pub fn skipped(condition: Condition, tolerance: f64, dim: usize, reason: impl Into<String>) -> Self {
        Self {
            condition,
            scheme: None,
            status: Status::Skipped,
            passed: false,
            residual: None,
            tolerance,
            context: InstanceContext::new(dim),
            location: None,
            note: Some(reason.into()),
        }
    }

    /// A structural failure that has no meaningful residual below tolerance.
    pub fn failed(condition: Condition, residual: f64, tolerance: f64, dim: usize, reason: impl Into<String>) -> Self {
        Self {
            status: Status::Fail,
            passed: false,
            note: Some(reason.into()),
            ..Self::from_residual(condition, residual, tolerance, dim)
        }
    }

    /// The check could not be evaluated; recorded as a failure without a
    /// residual.
    pub fn errored(condition: Condition, tolerance: f64, dim: usize, err: &Error) -> Self {
        Self {
            condition,
            scheme: None,
            status: Status::Fail,
            passed: false,
            residual: None,
            tolerance,
            context: InstanceContext::new(dim),
            location: None,
            note: Some(format!("error: {err}")),
        }
    }

    pub fn with_scheme(mut self, scheme: impl Into<String>) -> Self {
        self.scheme = Some(scheme.into());
        self
    }

    pub fn with_context(mut self, context: InstanceContext) -> Self {
        self.context = context;
        self
    }

    pub fn with_location(mut self, location: Vec<usize>) -> Self {
        self.location = Some(location);
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn is_skipped(&self) -> bool {
        self.status == Status::Skipped
    }
}

/// `|mean(distribution(s, rho)) - tr(rho Omega)|`.
pub fn check_a1(s: &WorkScheme, p: &Process, rho: &DensityMatrix, tol: f64) -> Result<ConditionReport> {
    let d = distribution(s, rho, s.default_merge_tol())?;
    let expected = average_work_unmeasured(p, rho)?;
    Ok(ConditionReport::from_residual(Condition::A1, (d.mean() - expected).abs(), tol, p.dim()))
}

/// `1 - P(|W| <= merge_tol)` for the scheme the factory builds on the
/// trivial process `H' = H`, `U = I`.
pub fn check_a2<F>(factory: F, h: &HermitianOperator, rho: &DensityMatrix, tol: f64) -> Result<ConditionReport>
where
    F: Fn(&Process, &DensityMatrix) -> Result<WorkScheme>,
{
    let p = Process::trivial(h);
    p.check_state(rho)?;
    let s = factory(&p, rho)?;
    let merge_tol = s.default_merge_tol();
    let d = distribution(&s, rho, merge_tol)?;
    let residual = (1.0 - d.mass_within(0.0, merge_tol)).max(0.0);
    Ok(ConditionReport::from_residual(Condition::A2, residual, tol, h.dim()))
}

/// `e^{-beta (F' - F)} = Z'/Z`.
pub fn jarzynski_rhs(h: &HermitianOperator, hp: &HermitianOperator, beta: f64) -> f64 {
    (log_partition(hp, beta) - log_partition(h, beta)).exp()
}

/// `|<e^{-beta W}>_{tau_beta} - e^{-beta Delta F}|` for a scheme already
/// built for the thermal state.
pub fn check_b(
    s: &WorkScheme,
    h: &HermitianOperator,
    hp: &HermitianOperator,
    beta: f64,
    tol: f64,
) -> Result<ConditionReport> {
    check_beta_positive(beta)?;
    let tau = gibbs(h, beta)?.state;
    let d = distribution(s, &tau, s.default_merge_tol())?;
    let residual = (d.exp_average(beta) - jarzynski_rhs(h, hp, beta)).abs();
    Ok(ConditionReport::from_residual(Condition::B, residual, tol, h.dim()))
}

/// Condition B for a possibly state-dependent scheme: the factory is invoked
/// on the thermal state itself.
pub fn check_b_rebuilt<F>(factory: F, p: &Process, beta: f64, tol: f64) -> Result<ConditionReport>
where
    F: Fn(&Process, &DensityMatrix) -> Result<WorkScheme>,
{
    check_beta_positive(beta)?;
    let tau = gibbs(&p.h_initial, beta)?.state;
    let s = factory(p, &tau)?;
    check_b(&s, &p.h_initial, &p.h_final, beta, tol)
}

/// Tolerance for matching an outcome against `E'_k - E_a`.
fn match_tol(sd: &SpectralDecomposition, sdp: &SpectralDecomposition) -> f64 {
    let lo = sd.values[0].min(sdp.values[0]);
    let hi = sd.values[sd.levels() - 1].max(sdp.values[sdp.levels() - 1]);
    1e-9 * (hi - lo).max(1.0)
}

/// Elements summed over outcomes that agree within `merge_tol`.
fn aggregate(s: &WorkScheme, merge_tol: f64) -> Vec<(f64, CMatrix)> {
    let mut order: Vec<usize> = (0..s.len()).collect();
    order.sort_by(|&i, &j| s.outcomes[i].total_cmp(&s.outcomes[j]));
    let mut pairs: Vec<(f64, f64)> = order.iter().map(|&i| (s.outcomes[i], 1.0)).collect();
    let (centers, _) = merge_outcomes(&mut pairs, merge_tol);
    let d = s.dim();
    let mut groups: Vec<(f64, CMatrix)> = centers.iter().map(|&w| (w, CMatrix::zeros(d, d))).collect();
    let mut g = 0;
    for (pos, &i) in order.iter().enumerate() {
        if pos > 0 && s.outcomes[i] - s.outcomes[order[pos - 1]] > merge_tol {
            g += 1;
        }
        groups[g].1 += &s.elements[i];
    }
    groups
}

fn nearest(values: &[f64], x: f64) -> (usize, f64) {
    values
        .iter()
        .enumerate()
        .map(|(i, v)| (i, (v - x).abs()))
        .fold((0, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best })
}

/// Lemma-1 structure: outcomes lie in `{E'_k - E_a}`, the thermal sum rule
/// per final level, and vanishing weight on unreachable final energies.
pub fn je_class_validate(
    s: &WorkScheme,
    h: &HermitianOperator,
    hp: &HermitianOperator,
    tol: f64,
) -> Result<ConditionReport> {
    let dim = h.dim();
    if s.dim() != dim || hp.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: if s.dim() != dim { s.dim() } else { hp.dim() },
        });
    }
    let sd = eigh(h, CLUSTER_TOL)?;
    let sdp = eigh(hp, CLUSTER_TOL)?;
    let mtol = match_tol(&sd, &sdp);
    let groups = aggregate(s, mtol);

    let differences: Vec<f64> = sd
        .values
        .iter()
        .flat_map(|ea| sdp.values.iter().map(move |ek| ek - ea))
        .collect();
    for (w, _) in &groups {
        let (_, dist) = nearest(&differences, *w);
        if dist > mtol {
            return Ok(ConditionReport::failed(
                Condition::JeClass,
                dist,
                tol,
                dim,
                format!("outcome {w} is not of the form E'_k - E_a"),
            ));
        }
    }

    let mut sums = vec![0.0; sdp.levels()];
    let mut worst = (0.0, None);
    for (w, m) in &groups {
        for (a, pa) in sd.projectors.iter().enumerate() {
            let t = trace_product(m, pa).re;
            let (k, dist) = nearest(&sdp.values, w + sd.values[a]);
            if dist <= mtol {
                sums[k] += t;
            } else if t.abs() > worst.0 {
                worst = (t.abs(), Some(vec![a]));
            }
        }
    }
    for (k, sum) in sums.iter().enumerate() {
        let v = (sum - sdp.degeneracies[k] as f64).abs();
        if v > worst.0 {
            worst = (v, Some(vec![k]));
        }
    }
    let mut report = ConditionReport::from_residual(Condition::JeClass, worst.0, tol, dim);
    if !report.passed {
        report.location = worst.1;
    }
    Ok(report)
}

/// Whether all differences `E'_k - E_a` are pairwise distinct.
fn differences_nondegenerate(sd: &SpectralDecomposition, sdp: &SpectralDecomposition) -> bool {
    let scale = sd
        .values
        .iter()
        .chain(&sdp.values)
        .fold(1.0f64, |m, v| m.max(v.abs()));
    let mut diffs: Vec<f64> = sd
        .values
        .iter()
        .flat_map(|ea| sdp.values.iter().map(move |ek| ek - ea))
        .collect();
    diffs.sort_by(f64::total_cmp);
    diffs.windows(2).all(|w| w[1] - w[0] > 1e-8 * scale)
}

/// Elements addressed as `M_ak` by matching each outcome to the unique
/// `E'_k - E_a`. Fails with the offending outcome if none matches.
fn address_elements(
    s: &WorkScheme,
    sd: &SpectralDecomposition,
    sdp: &SpectralDecomposition,
) -> std::result::Result<Vec<Vec<CMatrix>>, (f64, f64)> {
    let d = s.dim();
    let mtol = match_tol(sd, sdp);
    let mut out = vec![vec![CMatrix::zeros(d, d); sdp.levels()]; sd.levels()];
    for (m, &w) in s.elements.iter().zip(&s.outcomes) {
        let mut best = (0, 0, f64::INFINITY);
        for (a, ea) in sd.values.iter().enumerate() {
            for (k, ek) in sdp.values.iter().enumerate() {
                let dist = (ek - ea - w).abs();
                if dist < best.2 {
                    best = (a, k, dist);
                }
            }
        }
        if best.2 > mtol {
            return Err((w, best.2));
        }
        out[best.0][best.1] += m;
    }
    Ok(out)
}

/// `M_ak = P_a M_ak P_a` and `sum_a tr M_ak = tr P'_k`, valid when the set
/// of energy differences is nondegenerate.
pub fn nondegenerate_checks(
    s: &WorkScheme,
    h: &HermitianOperator,
    hp: &HermitianOperator,
    tol: f64,
) -> Result<ConditionReport> {
    let dim = h.dim();
    let sd = eigh(h, CLUSTER_TOL)?;
    let sdp = eigh(hp, CLUSTER_TOL)?;
    if !differences_nondegenerate(&sd, &sdp) {
        return Ok(ConditionReport::skipped(
            Condition::Nondegenerate,
            tol,
            dim,
            "energy differences E'_k - E_a are degenerate",
        ));
    }
    let m = match address_elements(s, &sd, &sdp) {
        Ok(m) => m,
        Err((w, dist)) => {
            return Ok(ConditionReport::failed(
                Condition::Nondegenerate,
                dist,
                tol,
                dim,
                format!("outcome {w} is not of the form E'_k - E_a"),
            ))
        }
    };
    let mut worst = (0.0, vec![]);
    for (a, pa) in sd.projectors.iter().enumerate() {
        for k in 0..sdp.levels() {
            let v = max_abs(&(&m[a][k] - pa * &m[a][k] * pa));
            if v > worst.0 {
                worst = (v, vec![a, k]);
            }
        }
    }
    let mut column = (0.0, vec![]);
    for k in 0..sdp.levels() {
        let total: f64 = (0..sd.levels()).map(|a| m[a][k].trace().re).sum();
        let v = (total - sdp.degeneracies[k] as f64).abs();
        if v > column.0 {
            column = (v, vec![k]);
        }
    }
    let (residual, location, note) = if worst.0 >= column.0 {
        (worst.0, worst.1, "M_ak leaves the a-th eigenspace of H")
    } else {
        (column.0, column.1, "sum_a tr M_ak differs from tr P'_k")
    };
    let mut report = ConditionReport::from_residual(Condition::Nondegenerate, residual, tol, dim);
    if !report.passed {
        report = report.with_location(location).with_note(note);
    }
    Ok(report)
}

/// `tr M_ak = tr(P_a U^dag P'_k U)`; for nondegenerate `H` additionally
/// `M_ak = M_ak^TPM` entrywise.
pub fn theorem2_trace_condition(s: &WorkScheme, p: &Process, tol: f64) -> Result<ConditionReport> {
    let dim = p.dim();
    let sd = eigh(&p.h_initial, CLUSTER_TOL)?;
    let sdp = eigh(&p.h_final, CLUSTER_TOL)?;
    if !differences_nondegenerate(&sd, &sdp) {
        return Ok(ConditionReport::skipped(
            Condition::Thm2,
            tol,
            dim,
            "energy differences E'_k - E_a are degenerate",
        ));
    }
    let m = match address_elements(s, &sd, &sdp) {
        Ok(m) => m,
        Err((w, dist)) => {
            return Ok(ConditionReport::failed(
                Condition::Thm2,
                dist,
                tol,
                dim,
                format!("outcome {w} is not of the form E'_k - E_a"),
            ))
        }
    };
    let u = p.evolution.matrix();
    let elementwise = sd.is_nondegenerate();
    let mut worst = (0.0, vec![]);
    for (a, pa) in sd.projectors.iter().enumerate() {
        for (k, pk) in sdp.projectors.iter().enumerate() {
            let tpm = pa * u.adjoint() * pk * u * pa;
            let mut v = (m[a][k].trace().re - tpm.trace().re).abs();
            if elementwise {
                v = v.max(max_abs(&(&m[a][k] - tpm)));
            }
            if v > worst.0 {
                worst = (v, vec![a, k]);
            }
        }
    }
    let mut report = ConditionReport::from_residual(Condition::Thm2, worst.0, tol, dim);
    if !report.passed {
        report.location = Some(worst.1);
    }
    if !elementwise {
        report.note = Some("H degenerate: trace condition only".into());
    }
    Ok(report)
}

/// Average work on thermal states, `sum_ak (E'_k - E_a) tr(tau M_ak)` against
/// `tr(tau Omega)`, with the elements held fixed while the final energies
/// are varied (eigenvectors of `H'` unchanged, order preserved).
///
/// `final_shifts` lists additive shifts of the distinct levels of `H'`; the
/// unshifted spectrum is always included.
pub fn check_thermal_average(
    s: &WorkScheme,
    p: &Process,
    betas: &[f64],
    final_shifts: &[Vec<f64>],
    tol: f64,
) -> Result<ConditionReport> {
    let dim = p.dim();
    let sd = eigh(&p.h_initial, CLUSTER_TOL)?;
    let sdp = eigh(&p.h_final, CLUSTER_TOL)?;
    let m = match address_elements(s, &sd, &sdp) {
        Ok(m) => m,
        Err((w, dist)) => {
            return Ok(ConditionReport::failed(
                Condition::ThermalAverage,
                dist,
                tol,
                dim,
                format!("outcome {w} is not of the form E'_k - E_a"),
            ))
        }
    };
    let mut variants = vec![vec![0.0; sdp.levels()]];
    for shift in final_shifts {
        if shift.len() != sdp.levels() {
            return Err(Error::DimensionMismatch {
                expected: sdp.levels(),
                found: shift.len(),
            });
        }
        variants.push(shift.clone());
    }
    let mut worst = (0.0, vec![]);
    for (vi, shift) in variants.iter().enumerate() {
        let levels: Vec<f64> = sdp.values.iter().zip(shift).map(|(e, s)| e + s).collect();
        let hp = sdp
            .projectors
            .iter()
            .zip(&levels)
            .fold(CMatrix::zeros(dim, dim), |acc, (pk, e)| acc + pk * c(*e));
        let variant = Process::new(
            p.h_initial.clone(),
            HermitianOperator::hermitize(hp),
            p.evolution.clone(),
        )?;
        let omega = how_operator(&variant);
        for (bi, &beta) in betas.iter().enumerate() {
            let tau = gibbs(&p.h_initial, beta)?.state;
            let mut measured = 0.0;
            for (a, ea) in sd.values.iter().enumerate() {
                for (k, ek) in levels.iter().enumerate() {
                    measured += (ek - ea) * tau.expectation(&m[a][k]);
                }
            }
            let v = (measured - tau.expectation(omega.matrix())).abs();
            if v > worst.0 {
                worst = (v, vec![vi, bi]);
            }
        }
    }
    let mut report = ConditionReport::from_residual(Condition::ThermalAverage, worst.0, tol, dim);
    if !report.passed {
        report = report
            .with_location(worst.1)
            .with_note("location is [final-spectrum variant, beta index]");
    }
    Ok(report)
}

/// For nondegenerate `H`: elements `(c_ak + shift[a][k]) P_a` where
/// `c_ak = tr(P_a U^dag P'_k U)` are the TPM weights.
pub fn reweighted_tpm(p: &Process, shift: &[Vec<f64>], cluster_tol: f64) -> Result<WorkScheme> {
    let sd = eigh(&p.h_initial, cluster_tol)?;
    if !sd.is_nondegenerate() {
        return Err(Error::Degenerate("reweighting requires nondegenerate H".into()));
    }
    let tpm = tpm_scheme(p, cluster_tol)?;
    let labels = tpm.labels.clone().expect("tpm elements are labeled");
    let mut elements = Vec::with_capacity(tpm.len());
    for (m, l) in tpm.elements.iter().zip(&labels) {
        let (a, k) = (l[0], l[1]);
        let delta = *shift
            .get(a)
            .and_then(|row| row.get(k))
            .ok_or_else(|| Error::Argument(format!("shift has no entry ({a}, {k})")))?;
        let weight = m.trace().re + delta;
        if weight < -1e-12 {
            return Err(Error::SchemeInvalid(format!("negative weight {weight:e} at ({a}, {k})")));
        }
        elements.push(&sd.projectors[a] * c(weight.max(0.0)));
    }
    WorkScheme::new(elements, tpm.outcomes, Some(labels))
}
