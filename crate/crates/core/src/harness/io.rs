//! On-disk layout of scenarios, traces and campaign results.
//!
//! ```text
//! <out>/scenarios/<campaign>/<index>.json
//! <out>/runs/<campaign>/<scenario>/baseline/trace.jsonl
//! <out>/runs/<campaign>/<scenario>/<fault>/verdict.json
//! <out>/runs/<campaign>/<scenario>/<fault>/trace.jsonl   (best faulty run)
//! <out>/report.csv
//! ```

use crate::error::{FadeError, Result};
use crate::fuzzer::{CampaignReport, DiffResult, Mode, RepeatRow, ReportRow};
use crate::scenario::{check_constraints, Scenario, SCHEMA_VERSION};
use crate::sim::Trace;
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::{Path, PathBuf};

pub const VERDICT_VERSION: u32 = 1;

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| FadeError::io(dir, e))
}

fn write(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|e| FadeError::io(path, e))
}

pub fn scenario_file(dir: &Path, index: usize) -> PathBuf {
    dir.join(format!("{index:04}.json"))
}

pub fn write_scenarios(dir: &Path, scenarios: &[Scenario]) -> Result<Vec<PathBuf>> {
    create_dir(dir)?;
    let mut out = Vec::with_capacity(scenarios.len());
    for (i, s) in scenarios.iter().enumerate() {
        let path = scenario_file(dir, i);
        write(&path, format!("{}\n", s.to_json()).as_bytes())?;
        out.push(path);
    }
    Ok(out)
}

/// Parses and checks one scenario file: schema version and the scenario
/// constraints.
pub fn load_scenario(path: &Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path).map_err(|e| FadeError::io(path, e))?;
    let perr = |line: usize, message: String| FadeError::Parse { path: path.display().to_string(), line, message };
    let s = Scenario::from_json(&text).map_err(|e| perr(e.line(), e.to_string()))?;
    if s.schema_version != SCHEMA_VERSION {
        return Err(perr(1, format!("unsupported schema_version {}", s.schema_version)));
    }
    let v = check_constraints(&s);
    if !v.ok() {
        return Err(perr(1, format!("scenario violates constraints: {v:?}")));
    }
    Ok(s)
}

/// Every `*.json` file in `dir`, in file-name order.
pub fn load_scenarios(dir: &Path) -> Result<Vec<Scenario>> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| FadeError::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(FadeError::Config(format!("no scenario files in {}", dir.display())));
    }
    files.iter().map(|p| load_scenario(p)).collect()
}

pub fn save_trace(path: &Path, trace: &Trace) -> Result<()> {
    if let Some(dir) = path.parent() {
        create_dir(dir)?;
    }
    let f = std::fs::File::create(path).map_err(|e| FadeError::io(path, e))?;
    let mut w = std::io::BufWriter::new(f);
    trace.write_jsonl(&mut w).and_then(|_| w.flush()).map_err(|e| FadeError::io(path, e))
}

pub fn load_trace(path: &Path) -> Result<Trace> {
    let f = std::fs::File::open(path).map_err(|e| FadeError::io(path, e))?;
    Trace::read_jsonl(std::io::BufReader::new(f), &path.display().to_string())
}

/// Contents of `verdict.json`: every evaluated run of one (fault, scenario) pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictFile {
    pub schema_version: u32,
    pub campaign: String,
    pub scenario: String,
    pub fault: String,
    pub mode: Mode,
    pub status: String,
    pub generations: usize,
    pub evaluations: usize,
    pub sv_count: usize,
    pub capable: bool,
    /// Index into `results` of the run whose trace is stored beside this file.
    pub best: Option<usize>,
    pub results: Vec<DiffResult>,
}

pub fn load_verdict(path: &Path) -> Result<VerdictFile> {
    let text = std::fs::read_to_string(path).map_err(|e| FadeError::io(path, e))?;
    let v: VerdictFile = serde_json::from_str(&text)
        .map_err(|e| FadeError::Parse { path: path.display().to_string(), line: e.line(), message: e.to_string() })?;
    if v.schema_version != VERDICT_VERSION {
        return Err(FadeError::Parse { path: path.display().to_string(), line: 1, message: format!("unsupported schema_version {}", v.schema_version) });
    }
    Ok(v)
}

pub fn runs_dir(out: &Path, campaign: &str) -> PathBuf {
    out.join("runs").join(campaign)
}

pub fn report_csv(rows: &[ReportRow]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| FadeError::Config(format!("report: {e}")))?;
    }
    w.into_inner().map_err(|e| FadeError::Config(format!("report: {e}")))
}

pub fn read_report(path: &Path) -> Result<Vec<ReportRow>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| FadeError::io(path, std::io::Error::other(e)))?;
    r.deserialize()
        .enumerate()
        .map(|(i, row)| row.map_err(|e| FadeError::Parse { path: path.display().to_string(), line: i + 2, message: e.to_string() }))
        .collect()
}

pub fn repeat_csv(rows: &[RepeatRow]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| FadeError::Config(format!("repeat report: {e}")))?;
    }
    w.into_inner().map_err(|e| FadeError::Config(format!("repeat report: {e}")))
}

/// Writes per-run directories, then `report.csv` as the final pass.
pub fn write_campaign(out: &Path, campaign: &str, report: &CampaignReport) -> Result<PathBuf> {
    let runs = runs_dir(out, campaign);
    for (id, b) in &report.baselines {
        if let Ok(b) = b {
            save_trace(&runs.join(id).join("baseline").join("trace.jsonl"), &b.trace)?;
        }
    }
    for (pair, row) in report.pairs.iter().zip(&report.rows) {
        let dir = runs.join(&pair.scenario_id).join(&row.fault);
        create_dir(&dir)?;
        let results = pair.outcome.as_ref().map(|o| o.results.clone()).unwrap_or_default();
        if let Some(t) = pair.best.and_then(|b| results[b].trace_f.clone()) {
            save_trace(&dir.join("trace.jsonl"), &t)?;
        }
        let v = VerdictFile {
            schema_version: VERDICT_VERSION,
            campaign: campaign.to_owned(),
            scenario: pair.scenario_id.clone(),
            fault: row.fault.clone(),
            mode: report.mode,
            status: row.status.clone(),
            generations: pair.outcome.as_ref().map_or(0, |o| o.generations),
            evaluations: row.evaluations,
            sv_count: row.sv_count,
            capable: row.capable,
            best: pair.best,
            results,
        };
        let json = serde_json::to_string_pretty(&v).expect("verdict serializes");
        write(&dir.join("verdict.json"), format!("{json}\n").as_bytes())?;
    }
    let path = out.join("report.csv");
    write(&path, &report_csv(&report.rows)?)?;
    Ok(path)
}
