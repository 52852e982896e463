//! `qwork`: seeded experiment runner writing JSON reports (and a CSV for the
//! classical-limit scan). Exits 0 only when every observed pass/fail cell
//! matches the predicted pattern.

mod config;
mod run;

use std::process::ExitCode;

use clap::Parser;

use config::{CommandKind, RunArgs, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "qwork", version, about = "Quantum work-measurement scheme experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, clap::Subcommand)]
enum Command {
    /// A1/A2/B pass-fail matrix for HOW, composite, TPM and Upsilon
    Table1(RunArgs),
    /// Structural JE-class checks, thermal-average condition, TPM uniqueness
    JeClass(RunArgs),
    /// Small-x exponents of mean work and tail mass on cyclic processes
    Scaling(RunArgs),
    /// Majorization, entropy bounds and second-order expansion of Upsilon
    Upsilon(RunArgs),
    /// Harmonic-oscillator classical limit scan with Fock-space check
    GaussianLimit(RunArgs),
    /// Every command above
    All(RunArgs),
}

impl Command {
    fn split(&self) -> (CommandKind, &RunArgs) {
        match self {
            Self::Table1(a) => (CommandKind::Table1, a),
            Self::JeClass(a) => (CommandKind::JeClass, a),
            Self::Scaling(a) => (CommandKind::Scaling, a),
            Self::Upsilon(a) => (CommandKind::Upsilon, a),
            Self::GaussianLimit(a) => (CommandKind::GaussianLimit, a),
            Self::All(a) => (CommandKind::All, a),
        }
    }
}

fn execute(kind: CommandKind, args: &RunArgs) -> anyhow::Result<bool> {
    if let Some(n) = args.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    let kinds: Vec<CommandKind> = if kind == CommandKind::All {
        CommandKind::EXPERIMENTS.to_vec()
    } else {
        vec![kind]
    };
    let configs = kinds
        .into_iter()
        .map(|k| RunConfig::resolve(k, args))
        .collect::<anyhow::Result<Vec<_>>>()?;
    let mut all_matched = true;
    for cfg in &configs {
        let r = run::run_command(cfg)?;
        all_matched &= r.matched;
        let csv = r.csv_path.map(|p| format!(", {}", p.display())).unwrap_or_default();
        println!(
            "{}: {} ({} instances) -> {}{csv}",
            r.command.name(),
            if r.matched { "pattern matches" } else { "PATTERN MISMATCH" },
            r.instances,
            r.json_path.display()
        );
    }
    Ok(all_matched)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, args) = cli.command.split();
    match execute(kind, args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
