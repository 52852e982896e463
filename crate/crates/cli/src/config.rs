use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Args;
use qwork_core::experiments::Tolerances;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    /// A1/A2/B pass-fail matrix for HOW, composite, TPM and Upsilon
    Table1,
    /// Structural JE-class checks, thermal-average condition, TPM uniqueness
    JeClass,
    /// Small-x exponents of mean work and tail mass on cyclic processes
    Scaling,
    /// Majorization, entropy bounds and second-order expansion of Upsilon
    Upsilon,
    /// Harmonic-oscillator classical limit scan with Fock-space check
    GaussianLimit,
    /// Every command above
    All,
}

impl CommandKind {
    pub const EXPERIMENTS: [CommandKind; 5] =
        [Self::Table1, Self::JeClass, Self::Scaling, Self::Upsilon, Self::GaussianLimit];

    pub fn name(self) -> &'static str {
        match self {
            Self::Table1 => "table1",
            Self::JeClass => "je-class",
            Self::Scaling => "scaling",
            Self::Upsilon => "upsilon",
            Self::GaussianLimit => "gaussian-limit",
            Self::All => "all",
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Hilbert-space dimensions (>= 2)
    #[arg(long, num_args = 1..)]
    pub dims: Option<Vec<usize>>,
    /// Seeds; `a..b` (inclusive) and `a..=b` ranges expand
    #[arg(long, num_args = 1..)]
    pub seeds: Option<Vec<String>>,
    /// Inverse temperatures
    #[arg(long = "beta", alias = "betas", num_args = 1..)]
    pub betas: Option<Vec<f64>>,
    /// Coupling strengths for the scaling fits
    #[arg(long, num_args = 1..)]
    pub xs: Option<Vec<f64>>,
    /// Values of beta*hbar for the classical-limit scan
    #[arg(long = "beta-hbar", num_args = 1..)]
    pub beta_hbar: Option<Vec<f64>>,
    /// Residual at or below which a condition passes
    #[arg(long)]
    pub pass_tol: Option<f64>,
    /// Residual a predicted failure must reach on some instance
    #[arg(long)]
    pub fail_tol: Option<f64>,
    /// Tolerance for exactly satisfied structural and Jarzynski checks
    #[arg(long)]
    pub exact_tol: Option<f64>,
    /// Allowed deviation of fitted exponents
    #[arg(long)]
    pub exponent_tol: Option<f64>,
    /// Relative tolerance on second-order expansion coefficients
    #[arg(long)]
    pub coefficient_tol: Option<f64>,
    /// Closed form versus Fock-space tolerance
    #[arg(long)]
    pub oracle_tol: Option<f64>,
    /// Directory receiving `<command>.json` (and `gaussian-limit.csv`)
    #[arg(long, short, default_value = "qwork-reports")]
    pub output: PathBuf,
    /// Worker threads (default: all cores)
    #[arg(long)]
    pub threads: Option<usize>,
}

/// Fully resolved settings for one command; serialized into its report.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: CommandKind,
    pub dims: Vec<usize>,
    pub seeds: Vec<u64>,
    pub betas: Vec<f64>,
    pub xs: Vec<f64>,
    pub beta_hbar: Vec<f64>,
    pub tolerances: Tolerances,
    #[serde(skip)]
    pub output: PathBuf,
}

struct Defaults {
    dims: &'static [usize],
    seeds: &'static str,
    betas: &'static [f64],
}

fn defaults(command: CommandKind) -> Defaults {
    match command {
        CommandKind::Table1 => Defaults { dims: &[2, 3, 4], seeds: "1..50", betas: &[1.0] },
        CommandKind::JeClass => Defaults { dims: &[2, 3, 4], seeds: "1..20", betas: &[0.5, 1.0, 2.0] },
        CommandKind::Scaling => Defaults { dims: &[2], seeds: "1..10", betas: &[1.0] },
        CommandKind::Upsilon => Defaults { dims: &[2, 3, 4], seeds: "1..20", betas: &[1.0] },
        CommandKind::GaussianLimit | CommandKind::All => Defaults { dims: &[2], seeds: "1", betas: &[1.0] },
    }
}

pub fn parse_seeds(items: &[String]) -> Result<Vec<u64>> {
    let mut out = Vec::new();
    for item in items {
        let item = item.trim();
        if let Some((a, b)) = item.split_once("..") {
            let b = b.strip_prefix('=').unwrap_or(b);
            let lo: u64 = a.parse().with_context(|| format!("bad seed range start in '{item}'"))?;
            let hi: u64 = b.parse().with_context(|| format!("bad seed range end in '{item}'"))?;
            if hi < lo {
                bail!("empty seed range '{item}'");
            }
            out.extend(lo..=hi);
        } else {
            out.push(item.parse().with_context(|| format!("bad seed '{item}'"))?);
        }
    }
    Ok(out)
}

impl RunConfig {
    pub fn resolve(command: CommandKind, args: &RunArgs) -> Result<Self> {
        let d = defaults(command);
        let seeds = match &args.seeds {
            Some(s) => parse_seeds(s)?,
            None => parse_seeds(&[d.seeds.to_string()])?,
        };
        let base = Tolerances::default();
        let cfg = Self {
            command,
            dims: args.dims.clone().unwrap_or_else(|| d.dims.to_vec()),
            seeds,
            betas: args.betas.clone().unwrap_or_else(|| d.betas.to_vec()),
            xs: args.xs.clone().unwrap_or_else(|| vec![1e-1, 1e-2, 1e-3, 1e-4]),
            beta_hbar: args.beta_hbar.clone().unwrap_or_else(|| vec![1e-1, 1e-2, 1e-3, 1e-4]),
            tolerances: Tolerances {
                pass: args.pass_tol.unwrap_or(base.pass),
                fail: args.fail_tol.unwrap_or(base.fail),
                exact: args.exact_tol.unwrap_or(base.exact),
                exponent: args.exponent_tol.unwrap_or(base.exponent),
                coefficient: args.coefficient_tol.unwrap_or(base.coefficient),
                oracle: args.oracle_tol.unwrap_or(base.oracle),
            },
            output: args.output.clone(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        let lists = [
            ("dims", self.dims.is_empty()),
            ("seeds", self.seeds.is_empty()),
            ("beta", self.betas.is_empty()),
            ("xs", self.xs.is_empty()),
            ("beta-hbar", self.beta_hbar.is_empty()),
        ];
        if let Some((name, _)) = lists.iter().find(|(_, empty)| *empty) {
            bail!("--{name} must not be empty");
        }
        if let Some(d) = self.dims.iter().find(|&&d| d < 2) {
            bail!("dimension {d} < 2");
        }
        for (name, values) in [("beta", &self.betas), ("xs", &self.xs), ("beta-hbar", &self.beta_hbar)] {
            if let Some(v) = values.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
                bail!("--{name} values must be positive and finite, got {v}");
            }
        }
        let t = &self.tolerances;
        for (name, v) in [
            ("pass-tol", t.pass),
            ("fail-tol", t.fail),
            ("exact-tol", t.exact),
            ("exponent-tol", t.exponent),
            ("coefficient-tol", t.coefficient),
            ("oracle-tol", t.oracle),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                bail!("--{name} must be finite and nonnegative, got {v}");
            }
        }
        Ok(())
    }
}
