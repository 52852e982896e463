use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use qwork_core::conditions::{Condition, ConditionReport};
use qwork_core::experiments::{
    default_gaussian_process, gaussian_instance, gaussian_scan_record, gaussian_summary, je_class_instance,
    je_class_summary, scaling_instance, scaling_summary, table1_instance, table1_summary, upsilon_instance,
    upsilon_summary, GaussianRow, InstanceDescriptor, InstanceRecord, Summary,
};
use qwork_core::instances::{noncommuting_instance, pi_instance, stream_seed};
use qwork_core::schemes::BetaHatConfig;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{CommandKind, RunConfig};

#[derive(Debug, Serialize)]
pub struct Report<'a> {
    pub command: &'static str,
    pub config: &'a RunConfig,
    pub instances: Vec<InstanceRecord>,
    pub summary: Summary,
}

pub struct CommandResult {
    pub command: CommandKind,
    pub matched: bool,
    pub instances: usize,
    pub json_path: PathBuf,
    pub csv_path: Option<PathBuf>,
}

/// Record for an instance that could not be generated at all.
fn generation_failure(kind: &str, dim: usize, seed: u64, err: &qwork_core::Error) -> InstanceRecord {
    InstanceRecord {
        descriptor: InstanceDescriptor {
            kind: kind.into(),
            dim: Some(dim),
            seed: Some(seed),
            stream: Some(stream_seed(seed, dim, 0)),
            beta: None,
            beta_hbar: None,
        },
        reports: vec![ConditionReport::errored(Condition::A1, 0.0, dim, err).with_scheme("generation")],
    }
}

fn grid(cfg: &RunConfig) -> Vec<(usize, u64)> {
    cfg.dims
        .iter()
        .flat_map(|&d| cfg.seeds.iter().map(move |&s| (d, s)))
        .collect()
}

fn sorted(mut records: Vec<InstanceRecord>) -> Vec<InstanceRecord> {
    records.sort_by_key(|r| r.descriptor.sort_key());
    records
}

fn run_table1(cfg: &RunConfig) -> (Vec<InstanceRecord>, Summary) {
    let hat = BetaHatConfig::default();
    let tasks: Vec<(usize, u64, f64)> = grid(cfg)
        .into_iter()
        .flat_map(|(d, s)| cfg.betas.iter().map(move |&b| (d, s, b)))
        .collect();
    let records = sorted(
        tasks
            .par_iter()
            .map(|&(d, s, beta)| match noncommuting_instance(d, s, 0) {
                Ok(inst) => table1_instance(&inst, beta, &cfg.tolerances, &hat),
                Err(e) => generation_failure("noncommuting", d, s, &e),
            })
            .collect(),
    );
    let summary = table1_summary(&records, &cfg.tolerances);
    (records, summary)
}

fn run_je_class(cfg: &RunConfig) -> (Vec<InstanceRecord>, Summary) {
    let records = sorted(
        grid(cfg)
            .par_iter()
            .map(|&(d, s)| match noncommuting_instance(d, s, 0) {
                Ok(inst) => je_class_instance(&inst, &cfg.betas, &cfg.tolerances),
                Err(e) => generation_failure("noncommuting", d, s, &e),
            })
            .collect(),
    );
    let summary = je_class_summary(&records, &cfg.tolerances);
    (records, summary)
}

fn run_scaling(cfg: &RunConfig) -> (Vec<InstanceRecord>, Summary) {
    let hat = BetaHatConfig::default();
    let records = sorted(
        grid(cfg)
            .par_iter()
            .map(|&(d, s)| match pi_instance(d, s, 0) {
                Ok(inst) => scaling_instance(&inst, &cfg.xs, &cfg.tolerances, &hat),
                Err(e) => generation_failure("cyclic", d, s, &e),
            })
            .collect(),
    );
    let summary = scaling_summary(&records, &cfg.tolerances);
    (records, summary)
}

fn run_upsilon(cfg: &RunConfig) -> (Vec<InstanceRecord>, Summary) {
    let tasks: Vec<(usize, u64, f64)> = grid(cfg)
        .into_iter()
        .flat_map(|(d, s)| cfg.betas.iter().map(move |&b| (d, s, b)))
        .collect();
    let records = sorted(
        tasks
            .par_iter()
            .map(|&(d, s, beta)| match (noncommuting_instance(d, s, 0), pi_instance(d, s, 0)) {
                (Ok(inst), Ok(cyc)) => upsilon_instance(&inst, &cyc, beta, &cfg.tolerances),
                (Err(e), _) | (_, Err(e)) => generation_failure("noncommuting", d, s, &e),
            })
            .collect(),
    );
    let summary = upsilon_summary(&records, &cfg.tolerances);
    (records, summary)
}

fn run_gaussian(cfg: &RunConfig) -> (Vec<InstanceRecord>, Summary, Vec<GaussianRow>) {
    let gp = default_gaussian_process();
    let results: Vec<_> = cfg
        .beta_hbar
        .par_iter()
        .map(|&bh| gaussian_instance(&gp, bh, &cfg.tolerances))
        .collect();
    let mut rows = Vec::new();
    let mut records = Vec::new();
    for (row, rec) in results {
        rows.extend(row);
        records.push(rec);
    }
    rows.sort_by(|a, b| b.beta_hbar.total_cmp(&a.beta_hbar));
    records.push(gaussian_scan_record(&gp, &rows, &cfg.tolerances));
    let records = sorted(records);
    let summary = gaussian_summary(&records, &cfg.tolerances);
    (records, summary, rows)
}

pub fn csv_text(rows: &[GaussianRow]) -> String {
    let mut out = String::from("beta_hbar,closed_form,fock_oracle,classical_ratio,deviation\n");
    for r in rows {
        let oracle = r.fock_oracle.map(|v| v.to_string()).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.beta_hbar, r.closed_form, oracle, r.classical_ratio, r.deviation
        ));
    }
    out
}

/// Pretty JSON with two-space indentation and keys sorted at every level.
pub fn json_text<T: Serialize>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value).context("serializing report")?;
    let mut s = serde_json::to_string_pretty(&v).context("serializing report")?;
    s.push('\n');
    Ok(s)
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    let mut f = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
    f.write_all(text.as_bytes()).with_context(|| format!("writing {}", path.display()))
}

pub fn run_command(cfg: &RunConfig) -> Result<CommandResult> {
    fs::create_dir_all(&cfg.output).with_context(|| format!("creating {}", cfg.output.display()))?;
    let (records, summary, rows) = match cfg.command {
        CommandKind::Table1 => {
            let (r, s) = run_table1(cfg);
            (r, s, None)
        }
        CommandKind::JeClass => {
            let (r, s) = run_je_class(cfg);
            (r, s, None)
        }
        CommandKind::Scaling => {
            let (r, s) = run_scaling(cfg);
            (r, s, None)
        }
        CommandKind::Upsilon => {
            let (r, s) = run_upsilon(cfg);
            (r, s, None)
        }
        CommandKind::GaussianLimit => {
            let (r, s, rows) = run_gaussian(cfg);
            (r, s, Some(rows))
        }
        CommandKind::All => unreachable!("expanded by the caller"),
    };
    let matched = summary.matched;
    let n = records.len();
    let report = Report {
        command: cfg.command.name(),
        config: cfg,
        instances: records,
        summary,
    };
    let json_path = cfg.output.join(format!("{}.json", cfg.command.name()));
    write_file(&json_path, &json_text(&report)?)?;
    let csv_path = match rows {
        Some(rows) => {
            let p = cfg.output.join("gaussian-limit.csv");
            write_file(&p, &csv_text(&rows))?;
            Some(p)
        }
        None => None,
    };
    Ok(CommandResult {
        command: cfg.command,
        matched,
        instances: n,
        json_path,
        csv_path,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_leaves_missing_oracle_empty() {
        let rows = [GaussianRow {
            beta_hbar: 0.01,
            closed_form: 0.5,
            fock_oracle: None,
            classical_ratio: 0.25,
            deviation: 1e-5,
        }];
        let text = csv_text(&rows);
        assert_eq!(text.lines().nth(1).unwrap(), "0.01,0.5,,0.25,0.00001");
    }

    #[test]
    fn json_keys_are_sorted() {
        #[derive(Serialize)]
        struct T {
            zeta: u8,
            alpha: u8,
        }
        let s = json_text(&T { zeta: 1, alpha: 2 }).unwrap();
        assert!(s.find("alpha").unwrap() < s.find("zeta").unwrap());
        assert!(s.contains("\n  \"alpha\""));
    }
}
