//! Result files: CSV tables and the JSON run manifest.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use sddo_core::design::{InterimAction, OperatingCharacteristics};
use sddo_core::engine::ReplicateOutcome;
use serde::{Deserialize, Serialize};

use crate::config::digest;
use crate::error::{CliError, CliResult};

pub const SUMMARY_FILE: &str = "oc_summary.csv";
pub const REPLICATES_FILE: &str = "replicates.csv";
pub const MANIFEST_FILE: &str = "manifest.json";
/// The config after defaults are filled in.
pub const RESOLVED_CONFIG_FILE: &str = "resolved_config.toml";

pub const SUMMARY_HEADER: [&str; 13] = [
    "scenario",
    "branch",
    "n",
    "n_trigger_failed",
    "n_underrun",
    "optimal_dose_pct",
    "decision_pct",
    "positive_rate",
    "positive_rate_true_optimal",
    "expected_event_size",
    "expected_duration_months",
    "mean_adjusted_m2",
    "aa_supportable_pct",
];

pub const REPLICATE_HEADER: [&str; 17] = [
    "scenario",
    "replicate",
    "status",
    "selected_dose",
    "decision",
    "futility_prob",
    "significance_prob",
    "adjusted_m2",
    "ppos_at_adjusted",
    "aa_supportable",
    "endpoint",
    "final_z",
    "final_test_passed",
    "events_counted",
    "interim_time_months",
    "duration_months",
    "underrun",
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunManifest {
    pub config_path: String,
    pub seed: u64,
    pub n_reps: usize,
    pub workers: usize,
    pub output_dir: String,
    pub engine_version: String,
    pub config_digest: String,
    /// SHA-256 of each output file.
    pub outputs: BTreeMap<String, String>,
}

pub fn num(x: f64) -> String {
    format!("{x:.6}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// Results for one scenario.
pub struct ScenarioRun<'a> {
    pub name: &'a str,
    pub oc: &'a OperatingCharacteristics,
    pub reps: &'a [ReplicateOutcome],
}

fn csv_err(path: &Path, e: csv::Error) -> CliError {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => CliError::io(path, io),
        other => CliError::Config(format!("{}: {other:?}", path.display())),
    }
}

pub fn write_summary(path: &Path, runs: &[ScenarioRun]) -> CliResult<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    w.write_record(SUMMARY_HEADER).map_err(|e| csv_err(path, e))?;
    for run in runs {
        let oc = run.oc;
        let done: Vec<_> = run.reps.iter().filter_map(ReplicateOutcome::outcome).collect();
        let aa = |filter: &dyn Fn(InterimAction) -> bool| {
            let pool: Vec<_> = done.iter().filter(|o| filter(o.decision.action)).collect();
            if pool.is_empty() {
                String::new()
            } else {
                let k = pool.iter().filter(|o| o.decision.aa_supportable).count();
                num(100.0 * k as f64 / pool.len() as f64)
            }
        };
        let doses = oc.optimal_dose_pct.iter().map(|p| num(*p)).collect::<Vec<_>>().join(";");
        w.write_record([
            run.name.to_string(),
            "overall".into(),
            oc.n_replicates.to_string(),
            oc.n_trigger_failed.to_string(),
            oc.n_underrun.to_string(),
            doses,
            String::new(),
            num(oc.positive_rate_overall),
            num(oc.positive_rate_given_true_optimal),
            num(oc.expected_event_size),
            num(oc.expected_duration_months),
            opt(oc.mean_adjusted_m2),
            aa(&|_| true),
        ])
        .map_err(|e| csv_err(path, e))?;
        for action in InterimAction::ALL {
            let n = done.iter().filter(|o| o.decision.action == action).count();
            let underrun = done.iter().filter(|o| o.decision.action == action && o.underrun).count();
            let m2 = (action == InterimAction::ExpandPhaseIII).then_some(oc.mean_adjusted_m2).flatten();
            w.write_record([
                run.name.to_string(),
                action.label().into(),
                n.to_string(),
                String::new(),
                underrun.to_string(),
                String::new(),
                num(*oc.decision_pct.get(action)),
                opt(*oc.positive_rate_by_decision.get(action)),
                opt(*oc.positive_rate_given_true_optimal_by_decision.get(action)),
                opt(*oc.expected_event_size_by_decision.get(action)),
                opt(*oc.expected_duration_by_decision.get(action)),
                opt(m2),
                aa(&|a| a == action),
            ])
            .map_err(|e| csv_err(path, e))?;
        }
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

pub fn write_replicates(path: &Path, runs: &[ScenarioRun]) -> CliResult<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    w.write_record(REPLICATE_HEADER).map_err(|e| csv_err(path, e))?;
    for run in runs {
        for (r, rep) in run.reps.iter().enumerate() {
            let row: Vec<String> = match rep {
                ReplicateOutcome::TriggerFailed => {
                    let mut row = vec![run.name.to_string(), r.to_string(), "trigger_failed".into()];
                    row.resize(REPLICATE_HEADER.len(), String::new());
                    row
                }
                ReplicateOutcome::Completed(o) => vec![
                    run.name.to_string(),
                    r.to_string(),
                    "completed".into(),
                    (o.selected_dose + 1).to_string(),
                    o.decision.action.label().into(),
                    num(o.decision.futility_prob),
                    num(o.decision.significance_prob),
                    o.decision.adjusted_m2.map(|m| m.to_string()).unwrap_or_default(),
                    opt(o.decision.ppos_at_adjusted),
                    o.decision.aa_supportable.to_string(),
                    o.endpoint_used.label().into(),
                    opt(o.final_z),
                    o.final_test_passed.to_string(),
                    o.events_counted.to_string(),
                    num(o.interim_time_months),
                    num(o.duration_months),
                    o.underrun.to_string(),
                ],
            };
            w.write_record(&row).map_err(|e| csv_err(path, e))?;
        }
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

pub fn file_digests(dir: &Path, names: &[&str]) -> CliResult<BTreeMap<String, String>> {
    names
        .iter()
        .map(|name| {
            let path = dir.join(name);
            let bytes = std::fs::read(&path).map_err(|e| CliError::io(&path, e))?;
            Ok((name.to_string(), digest(&bytes)))
        })
        .collect()
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Config(e.to_string()))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

pub fn read_manifest(path: &Path) -> CliResult<RunManifest> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

/// Lists every reproducibility-relevant field where `now` differs from `then`.
pub fn manifest_differences(then: &RunManifest, now: &RunManifest) -> Vec<String> {
    let mut out = Vec::new();
    let mut check = |what: &str, a: &str, b: &str| {
        if a != b {
            out.push(format!("{what}: expected {a}, got {b}"));
        }
    };
    check("config_digest", &then.config_digest, &now.config_digest);
    check("seed", &then.seed.to_string(), &now.seed.to_string());
    check("n_reps", &then.n_reps.to_string(), &now.n_reps.to_string());
    check("engine_version", &then.engine_version, &now.engine_version);
    for (name, d) in &then.outputs {
        check(name, d, now.outputs.get(name).map(String::as_str).unwrap_or("<missing>"));
    }
    out
}

pub fn ensure_dir(dir: &Path) -> CliResult<PathBuf> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    Ok(dir.to_path_buf())
}
