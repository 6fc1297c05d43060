//! Batch campaigns: run one command over a grid, write data tables and a
//! JSON verdict.
//!
//! Exit status is 0 when every check passed, 1 when a check failed or a
//! numerical routine errored, and 2 for configuration or I/O problems.

mod config;
mod runs;
mod table;

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

pub use config::{
    parse_counts, parse_dims, parse_exponents, CampaignConfig, Command, ConfigLayer, ExponentSpec,
    OutputFormat, Tolerances,
};
pub use runs::{
    campaign_model, exponent_label, gap_subcritical, lemma_options, sample_points,
    sobolev_closed_form, trace_sobolev_closed_form, SolveRecord, BUBBLE_SAMPLES, BUBBLE_SCALES,
    CLOSED_FORM_TOL, SOLVE_RECORDS_FILE,
};
pub use table::{Cell, Table};

pub const VERDICT_FILE: &str = "verdict.json";

#[derive(Debug, thiserror::Error)]
pub enum CampaignError {
    #[error("config error: {0}")]
    Config(String),
    #[error("cannot write {path}: {message}")]
    Io { path: PathBuf, message: String },
}

impl CampaignError {
    pub fn exit_code(&self) -> i32 {
        2
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub dim: Option<usize>,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: String, dim: Option<usize>, passed: bool, detail: String) -> Check {
        Check {
            name,
            dim,
            passed,
            detail,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub command: Command,
    pub passed: usize,
    pub failed: usize,
    pub checks: Vec<Check>,
    /// Data files, relative to the output directory.
    pub files: Vec<String>,
}

impl Verdict {
    pub fn exit_code(&self) -> i32 {
        if self.failed == 0 {
            0
        } else {
            1
        }
    }
}

/// The tables and verdict of a campaign, before anything is written.
#[derive(Clone, Debug, PartialEq)]
pub struct CampaignResult {
    pub tables: Vec<Table>,
    /// Extra JSON documents `(file name, text)`.
    pub documents: Vec<(String, String)>,
    pub verdict: Verdict,
}

/// Runs the command without touching the file system.
pub fn evaluate(cfg: &CampaignConfig) -> Result<CampaignResult, CampaignError> {
    cfg.validate()?;
    let out = match cfg.command {
        Command::Constants => runs::constants(cfg),
        Command::Bubbles => runs::bubbles(cfg),
        Command::Identities => runs::identities(cfg),
        Command::Lemmas => runs::lemmas(cfg),
        Command::Thresholds => runs::thresholds(cfg),
        Command::Solve => runs::solve(cfg),
    };
    let failed = out.checks.iter().filter(|c| !c.passed).count();
    let ext = cfg.format.extension();
    let verdict = Verdict {
        command: cfg.command,
        passed: out.checks.len() - failed,
        failed,
        files: out
            .tables
            .iter()
            .map(|t| format!("{}.{ext}", t.name))
            .chain(out.documents.iter().map(|(name, _)| name.clone()))
            .collect(),
        checks: out.checks,
    };
    Ok(CampaignResult {
        tables: out.tables,
        documents: out.documents,
        verdict,
    })
}

fn write(path: &Path, text: &str) -> Result<(), CampaignError> {
    fs::write(path, text).map_err(|e| CampaignError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

/// Writes each table as `<name>.csv` or `<name>.json` and the verdict as
/// `verdict.json` under `dir`.
pub fn emit_report(
    result: &CampaignResult,
    dir: &Path,
    format: OutputFormat,
) -> Result<(), CampaignError> {
    fs::create_dir_all(dir).map_err(|e| CampaignError::Io {
        path: dir.to_path_buf(),
        message: e.to_string(),
    })?;
    for (table, file) in result.tables.iter().zip(&result.verdict.files) {
        let text = match format {
            OutputFormat::Csv => table.to_csv(),
            OutputFormat::Json => table.to_json(),
        };
        write(&dir.join(file), &text)?;
    }
    for (name, text) in &result.documents {
        write(&dir.join(name), text)?;
    }
    let mut verdict = serde_json::to_string_pretty(&result.verdict).expect("verdict serializes");
    verdict.push('\n');
    write(&dir.join(VERDICT_FILE), &verdict)
}

/// Evaluates and writes a campaign; returns the verdict.
pub fn run_campaign(cfg: &CampaignConfig) -> Result<Verdict, CampaignError> {
    let result = evaluate(cfg)?;
    emit_report(&result, &cfg.out_dir, cfg.format)?;
    Ok(result.verdict)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants_campaign_writes_files() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = CampaignConfig::for_command(Command::Constants).unwrap();
        cfg.dims = vec![3];
        cfg.out_dir = dir.path().to_path_buf();
        let v = run_campaign(&cfg).unwrap();
        assert_eq!(v.exit_code(), 0, "{:?}", v.checks);
        let csv = fs::read_to_string(dir.path().join("constants.csv")).unwrap();
        assert!(csv.starts_with("dim,S,S_T,c_inf"));
        assert_eq!(csv.lines().count(), 2);
        let back: Verdict =
            serde_json::from_str(&fs::read_to_string(dir.path().join(VERDICT_FILE)).unwrap())
                .unwrap();
        assert_eq!(back, v);
    }

    #[test]
    fn unwritable_output_is_an_io_error() {
        let dir = tempfile::tempdir().unwrap();
        let blocker = dir.path().join("file");
        fs::write(&blocker, "x").unwrap();
        let mut cfg = CampaignConfig::for_command(Command::Constants).unwrap();
        cfg.dims = vec![3];
        cfg.out_dir = blocker.join("sub");
        let err = run_campaign(&cfg).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }
}
