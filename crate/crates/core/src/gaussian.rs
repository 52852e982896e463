//! Harmonic oscillator `H = (q^2 + p^2)/2` driven by a Gaussian unitary to
//! `H' = z^T Lambda z`: closed-form `<e^{-beta Omega}>` on the thermal state
//! and a truncated Fock-space check of it.

use nalgebra::Matrix2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linops::{c, eigen_sorted, spectral_sum, CMatrix, I};

/// Symplectic `S` (Heisenberg picture `z' = S z`), final quadratic form
/// `Lambda`, inverse temperature and Planck constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianProcess {
    pub symplectic: Matrix2<f64>,
    pub lambda: Matrix2<f64>,
    pub beta: f64,
    pub hbar: f64,
}

impl GaussianProcess {
    pub const DET_TOL: f64 = 1e-12;
    pub const SYM_TOL: f64 = 1e-12;

    pub fn new(symplectic: Matrix2<f64>, lambda: Matrix2<f64>, beta: f64, hbar: f64) -> Result<Self> {
        let det = symplectic.determinant();
        if (det - 1.0).abs() >= Self::DET_TOL {
            return Err(Error::Argument(format!("det S = {det}, expected 1")));
        }
        if (lambda[(0, 1)] - lambda[(1, 0)]).abs() > Self::SYM_TOL {
            return Err(Error::Argument("Lambda is not symmetric".into()));
        }
        if !(lambda[(0, 0)] > 0.0 && lambda.determinant() > 0.0) {
            return Err(Error::Argument("Lambda is not positive definite".into()));
        }
        for (name, v) in [("beta", beta), ("hbar", hbar)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Argument(format!("{name} must be finite and > 0, got {v}")));
            }
        }
        Ok(Self {
            symplectic,
            lambda,
            beta,
            hbar,
        })
    }

    /// Same process at another value of `beta * hbar` (with `beta = 1`).
    pub fn at_beta_hbar(&self, beta_hbar: f64) -> Result<Self> {
        Self::new(self.symplectic, self.lambda, 1.0, beta_hbar)
    }

    pub fn beta_hbar(&self) -> f64 {
        self.beta * self.hbar
    }
}

/// Position-kernel coefficients of `exp(-A q^2 - A* qb^2 - 2 B q qb + C)`,
/// in the coordinate `q / sqrt(hbar)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianKernel {
    pub a_coef: Complex64,
    pub b_coef: f64,
    pub c_coef: f64,
}

/// `Xi = S^T Lambda S - I/2`, so that `Omega = z^T Xi z`.
pub fn xi_matrix(gp: &GaussianProcess) -> Matrix2<f64> {
    let m = gp.symplectic.transpose() * gp.lambda * gp.symplectic;
    let m = 0.5 * (m + m.transpose());
    m - 0.5 * Matrix2::identity()
}

fn check_positive_definite(name: &str, m: &Matrix2<f64>) -> Result<()> {
    let eig = m.symmetric_eigenvalues();
    let min = eig[0].min(eig[1]);
    if !(min > 0.0) {
        return Err(Error::Domain {
            function: name.to_string(),
            eigenvalue: min,
        });
    }
    Ok(())
}

/// `w = sqrt(det Xi)`; requires `Xi > 0` (spectrum of `Omega` bounded below).
pub fn symplectic_eigenvalue(xi: &Matrix2<f64>) -> Result<f64> {
    check_positive_definite("symplectic_eigenvalue", xi)?;
    Ok(xi.determinant().sqrt())
}

/// `Z_W = tr e^{-beta Omega} = 1 / (e^{beta hbar w} - e^{-beta hbar w})`.
pub fn z_work(beta_hbar: f64, w: f64) -> Result<f64> {
    let arg = beta_hbar * w;
    if !(arg >= 1e-12) {
        return Err(Error::Domain {
            function: "z_work".into(),
            eigenvalue: arg,
        });
    }
    Ok(0.5 / arg.sinh())
}

/// `x_qq = 2<q^2>`, `x_pp = 2<p^2>`, `x_qp = <{q, p}>` for the normalized
/// `e^{-beta Omega}` and for the initial thermal state.
pub fn correlation_matrices(gp: &GaussianProcess) -> Result<(Matrix2<f64>, Matrix2<f64>)> {
    let xi = xi_matrix(gp);
    let w = symplectic_eigenvalue(&xi)?;
    let bh = gp.beta_hbar();
    let inv = xi.try_inverse().ok_or_else(|| Error::Numeric("Xi is singular".into()))?;
    let xw = inv * (gp.hbar * w / (bh * w).tanh());
    let xh = Matrix2::identity() * (gp.hbar / (0.5 * bh).tanh());
    Ok((xw, xh))
}

pub fn kernel_coeffs(x: &Matrix2<f64>, hbar: f64) -> Result<GaussianKernel> {
    let xqq = x[(0, 0)];
    if !(xqq > 0.0) {
        return Err(Error::Domain {
            function: "kernel_coeffs".into(),
            eigenvalue: xqq,
        });
    }
    let d = x.determinant() / (hbar * hbar);
    let denom = 4.0 * xqq / hbar;
    Ok(GaussianKernel {
        a_coef: Complex64::new((1.0 + d) / denom, -x[(0, 1)] / (2.0 * xqq)),
        b_coef: (1.0 - d) / denom,
        c_coef: -(std::f64::consts::PI * xqq / hbar).sqrt().ln(),
    })
}

/// `int dq <q|k1|q'><q'|k2|q>` evaluated from the kernel coefficients as
/// `pi e^{C1 + C2} / sqrt(|A1* + A2|^2 - (B1 + B2)^2)`.
pub fn kernel_overlap(k1: &GaussianKernel, k2: &GaussianKernel) -> Result<f64> {
    let a = k1.a_coef.conj() + k2.a_coef;
    let b = k1.b_coef + k2.b_coef;
    let arg = a.norm_sqr() - b * b;
    if !(arg > 0.0) {
        return Err(Error::Numeric(format!("kernel overlap square-root argument {arg:e} <= 0")));
    }
    Ok(std::f64::consts::PI * (k1.c_coef + k2.c_coef).exp() / arg.sqrt())
}

/// Same overlap computed directly from the correlation matrices, with the
/// square-root argument factored to avoid cancellation for small `beta hbar`.
fn overlap_from_correlations(xw: &Matrix2<f64>, xh: &Matrix2<f64>, hbar: f64) -> Result<f64> {
    let (wq, hq) = (xw[(0, 0)], xh[(0, 0)]);
    let sum = hbar / (2.0 * wq) + hbar / (2.0 * hq);
    let diff = xw.determinant() / (2.0 * hbar * wq) + xh.determinant() / (2.0 * hbar * hq);
    let im = -xw[(0, 1)] / (2.0 * wq) + xh[(0, 1)] / (2.0 * hq);
    let arg = sum * diff + im * im;
    if !(arg > 0.0) {
        return Err(Error::Numeric(format!("kernel overlap square-root argument {arg:e} <= 0")));
    }
    let prefactor = hbar / (std::f64::consts::PI * (wq * hq).sqrt());
    Ok(std::f64::consts::PI * prefactor / arg.sqrt())
}

/// `<e^{-beta Omega}>_{tau_beta} = Z_W tr(kappa tau)`.
pub fn jarzynski_average_gaussian(gp: &GaussianProcess) -> Result<f64> {
    let xi = xi_matrix(gp);
    let w = symplectic_eigenvalue(&xi)?;
    let (xw, xh) = correlation_matrices(gp)?;
    Ok(z_work(gp.beta_hbar(), w)? * overlap_from_correlations(&xw, &xh, gp.hbar)?)
}

/// `Z'/Z` from classical phase-space integrals
/// `int dq dp e^{-beta z^T M z} = pi / (beta sqrt(det M))`.
pub fn classical_ratio(gp: &GaussianProcess) -> f64 {
    let gauss = |m: &Matrix2<f64>| std::f64::consts::PI / (gp.beta * m.determinant().sqrt());
    gauss(&gp.lambda) / gauss(&(0.5 * Matrix2::identity()))
}

/// Quantum `Z'/Z = sinh(beta hbar / 2) / sinh(beta hbar sqrt(det Lambda))`.
pub fn quantum_ratio(gp: &GaussianProcess) -> f64 {
    let bh = gp.beta_hbar();
    (0.5 * bh).sinh() / (bh * gp.lambda.determinant().sqrt()).sinh()
}

/// Largest tolerated weight on the top Fock level.
pub const FOCK_TAIL_TOL: f64 = 1e-10;

/// Brute-force `tr(e^{-beta H} e^{-beta Omega}) / tr e^{-beta H}` with
/// `Omega = z^T Xi z` on the first `cutoff` Fock states (`hbar = 1`, so
/// only `beta hbar` enters).
pub fn fock_oracle(gp: &GaussianProcess, cutoff: usize) -> Result<f64> {
    if cutoff < 2 {
        return Err(Error::Argument(format!("cutoff must be >= 2, got {cutoff}")));
    }
    let bh = gp.beta_hbar();
    let n = cutoff;
    let thermal_top = (-bh * (n - 1) as f64).exp() * (-(-bh).exp_m1()) / (-(-bh * n as f64).exp_m1());
    if thermal_top >= FOCK_TAIL_TOL {
        return Err(Error::Precision(format!(
            "thermal occupation {thermal_top:e} of level {} exceeds {FOCK_TAIL_TOL:e}",
            n - 1
        )));
    }

    // Build on two extra levels so the quadratic forms are exact on the kept block.
    let m = n + 2;
    let mut a = CMatrix::zeros(m, m);
    for k in 1..m {
        a[(k - 1, k)] = c((k as f64).sqrt());
    }
    let ad = a.adjoint();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let q = (&a + &ad) * c(s);
    let p = (&ad - &a) * (I * s);
    let xi = xi_matrix(gp);
    let omega_full = &q * &q * c(xi[(0, 0)]) + &p * &p * c(xi[(1, 1)]) + (&q * &p + &p * &q) * c(xi[(0, 1)]);
    let omega = omega_full.view((0, 0), (n, n)).into_owned();

    let (vals, vecs) = eigen_sorted(&omega);
    let shift = vals[0];
    let weights: Vec<Complex64> = vals.iter().map(|&v| c((-bh * (v - shift)).exp())).collect();
    let boltz = spectral_sum(&vecs, &weights);

    let thermal: Vec<f64> = (0..n).map(|k| (-bh * k as f64).exp()).collect();
    let z: f64 = thermal.iter().sum();
    let mut weighted = 0.0;
    for k in 0..n {
        weighted += thermal[k] * boltz[(k, k)].re;
    }
    let top = thermal[n - 1] * boltz[(n - 1, n - 1)].re / weighted;
    if top >= FOCK_TAIL_TOL {
        return Err(Error::Precision(format!(
            "top-level weight {top:e} of tau^(1/2) e^(-beta Omega) tau^(1/2) exceeds {FOCK_TAIL_TOL:e}"
        )));
    }
    Ok(weighted / z * (-bh * shift).exp())
}

/// Smallest cutoff (from a doubling sequence starting at 40, capped at
/// `max_cutoff`) for which the Fock check succeeds.
pub fn fock_oracle_auto(gp: &GaussianProcess, max_cutoff: usize) -> Result<(f64, usize)> {
    let mut cutoff = 40usize.min(max_cutoff);
    loop {
        match fock_oracle(gp, cutoff) {
            Ok(v) => return Ok((v, cutoff)),
            Err(Error::Precision(msg)) if cutoff >= max_cutoff => return Err(Error::Precision(msg)),
            Err(Error::Precision(_)) => cutoff = (cutoff * 2).min(max_cutoff),
            Err(e) => return Err(e),
        }
    }
}

/// `1 / (2 sqrt(det Lambda))`, the `beta hbar -> 0` value of the average.
pub fn classical_limit(gp: &GaussianProcess) -> f64 {
    0.5 / gp.lambda.determinant().sqrt()
}
