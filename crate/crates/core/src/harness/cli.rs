//! The `fade` command line.

use super::config::{CampaignConfig, SEED_ENV};
use super::{io, replay};
use crate::ads::{AdsAdapter, ReferenceAds};
use crate::error::{FadeError, Result};
use crate::faults::{enumerate_cofaults, fault_catalog, find_model, CoFaultModel, FaultInstance, FaultModel, Injection};
use crate::fuzzer::{aggregate_repeats, episode_seed, evaluate, run_campaign, sample_individual, Baseline, FaultTarget, Individual};
use crate::oracle::SpecConfig;
use crate::rng;
use crate::scenario::{generate_scenarios, GenConfig};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

/// `println!` that tolerates a closed stdout (e.g. piping into `head`).
macro_rules! emit {
    ($($t:tt)*) => {{
        use std::io::Write as _;
        let _ = writeln!(std::io::stdout().lock(), $($t)*);
    }};
}

#[derive(Debug, Parser)]
#[command(name = "fade", version, about = "Fault-injection differential fuzzing for camera/LiDAR fusion driving stacks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fault model catalog.
    Faults {
        #[command(subcommand)]
        command: FaultsCommand,
    },
    /// Sample scenarios and write them as JSON files.
    Generate(GenerateArgs),
    /// Run one scenario fault-free, and optionally with a fault.
    Run(RunArgs),
    /// Fuzz every selected fault in every scenario.
    Campaign(CampaignArgs),
    /// Render a trace as a sequence of top-down PNG images.
    Replay(ReplayArgs),
}

#[derive(Debug, Subcommand)]
pub enum FaultsCommand {
    List {
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AdsChoice {
    Reference,
}

impl AdsChoice {
    fn build(self) -> Box<dyn AdsAdapter> {
        match self {
            AdsChoice::Reference => Box::new(ReferenceAds::default()),
        }
    }
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub num: u64,
    /// Defaults to $FADE_SEED, then 0.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    #[arg(long, default_value = "default")]
    pub campaign: String,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub scenario: PathBuf,
    #[arg(long, value_enum, default_value_t = AdsChoice::Reference)]
    pub ads: AdsChoice,
    /// Fault id, or `camera_id+lidar_id` for a co-fault.
    #[arg(long)]
    pub fault: Option<String>,
    /// Parameter values of a single fault, comma separated, in catalog order.
    /// Sampled from the seed when omitted.
    #[arg(long, value_delimiter = ',', requires = "fault")]
    pub values: Option<Vec<f64>>,
    #[arg(long, default_value_t = 0, requires = "values")]
    pub noise_seed: u64,
    /// Defaults to $FADE_SEED, then 0.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Directory for the traces and the verdict.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CampaignArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Run the campaign N times with derived seeds and aggregate the totals.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub repeat: u64,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    pub trace: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

pub fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                FadeError::Config(_) | FadeError::UnknownFault(_) | FadeError::InvalidInstance { .. } => ExitCode::from(2),
                _ => ExitCode::FAILURE,
            }
        }
    }
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Faults { command: FaultsCommand::List { format } } => cmd_faults(format),
        Command::Generate(a) => cmd_generate(&a),
        Command::Run(a) => cmd_run(&a),
        Command::Campaign(a) => cmd_campaign(&a),
        Command::Replay(a) => cmd_replay(&a),
    }
}

fn env_seed() -> Result<Option<u64>> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| FadeError::Config(format!("{SEED_ENV} must be an unsigned integer, got `{v}`"))),
        Err(_) => Ok(None),
    }
}

#[derive(Serialize)]
struct CatalogFile<'a> {
    schema_version: u32,
    models: &'a [FaultModel],
    cofaults: Vec<CoFaultModel>,
}

pub const CATALOG_VERSION: u32 = 1;

pub fn catalog_json() -> String {
    let c = CatalogFile { schema_version: CATALOG_VERSION, models: fault_catalog(), cofaults: enumerate_cofaults(fault_catalog()) };
    serde_json::to_string_pretty(&c).expect("catalog serializes")
}

fn cmd_faults(format: Format) -> Result<()> {
    match format {
        Format::Json => emit!("{}", catalog_json()),
        Format::Text => {
            for m in fault_catalog() {
                let params: Vec<String> = m.params.iter().map(|p| format!("{} [{}, {}] {}", p.name, p.lo, p.hi, p.unit)).collect();
                emit!("{:<26} {:<6} {:<8} {:<12} {}", m.id, m.sensor, format!("{:?}", m.category).to_lowercase(), m.pre.name(), params.join("; "));
            }
        }
    }
    Ok(())
}

pub fn cmd_generate(a: &GenerateArgs) -> Result<()> {
    let seed = a.seed.or(env_seed()?).unwrap_or(0);
    let scenarios = generate_scenarios(a.num as usize, &GenConfig::default(), seed)?;
    let dir = a.out.join("scenarios").join(&a.campaign);
    let files = io::write_scenarios(&dir, &scenarios)?;
    emit!("wrote {} scenarios to {}", files.len(), dir.display());
    Ok(())
}

fn build_individual(a: &RunArgs, seed: u64) -> Result<Option<Individual>> {
    let Some(label) = &a.fault else { return Ok(None) };
    let target = FaultTarget::parse(label)?;
    let ind = match (&a.values, &target) {
        (Some(values), FaultTarget::Single { model }) => {
            let inst = FaultInstance { model_id: model.clone(), values: values.clone(), noise_seed: a.noise_seed };
            find_model(model)?.validate(&inst)?;
            Individual { id: 0, chromosomes: vec![inst] }
        }
        (Some(_), FaultTarget::Co { .. }) => return Err(FadeError::Config("--values applies to single faults only".into())),
        (None, _) => sample_individual(&target, 0, rng::derive(seed, "run/fault", 0))?,
    };
    Ok(Some(ind))
}

#[derive(Serialize)]
struct RunSummary {
    schema_version: u32,
    scenario: String,
    seed: u64,
    baseline_steps: usize,
    baseline_collision: bool,
    baseline_clean: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    injection: Option<Injection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    result: Option<crate::fuzzer::DiffResult>,
}

fn cmd_run(a: &RunArgs) -> Result<()> {
    let scenario = io::load_scenario(&a.scenario)?;
    let seed = episode_seed(a.seed.or(env_seed()?).unwrap_or(0), &scenario.id);
    let choice = a.ads;
    let factory = move || choice.build();
    let spec = SpecConfig::default();
    let baseline = Baseline::run(&scenario, &factory, seed, &spec)?;
    let ind = build_individual(a, seed)?;
    let result = match &ind {
        Some(ind) => Some(evaluate(ind, 0, &scenario, &factory, &baseline, &spec)?),
        None => None,
    };
    if let Some(out) = &a.out {
        io::save_trace(&out.join("baseline.jsonl"), &baseline.trace)?;
        if let Some(t) = result.as_ref().and_then(|r| r.trace_f.clone()) {
            io::save_trace(&out.join("faulty.jsonl"), &t)?;
        }
    }
    let summary = RunSummary {
        schema_version: io::VERDICT_VERSION,
        scenario: scenario.id.clone(),
        seed,
        baseline_steps: baseline.trace.len(),
        baseline_collision: baseline.trace.collided(),
        baseline_clean: baseline.clean,
        injection: ind.as_ref().map(Individual::injection).transpose()?,
        result,
    };
    let json = serde_json::to_string_pretty(&summary).expect("summary serializes");
    if let Some(out) = &a.out {
        let p = out.join("verdict.json");
        std::fs::write(&p, format!("{json}\n")).map_err(|e| FadeError::io(&p, e))?;
    }
    emit!("{json}");
    Ok(())
}

/// Runs one campaign into `out` and returns the report.
pub fn run_configured(cfg: &CampaignConfig, seed: u64, out: &Path) -> Result<crate::fuzzer::CampaignReport> {
    let targets = cfg.faults.targets()?;
    let scenarios = cfg.load_scenarios()?;
    let factory = || -> Box<dyn AdsAdapter> { Box::new(ReferenceAds::default()) };
    let report = run_campaign(&targets, &scenarios, &factory, &cfg.fuzz, seed, cfg.parallelism)?;
    std::fs::create_dir_all(out).map_err(|e| FadeError::io(out, e))?;
    let effective = CampaignConfig { seed, ..cfg.clone() };
    let p = out.join("config.toml");
    std::fs::write(&p, effective.to_toml()?).map_err(|e| FadeError::io(&p, e))?;
    io::write_campaign(out, &cfg.name, &report)?;
    Ok(report)
}

fn cmd_campaign(a: &CampaignArgs) -> Result<()> {
    let mut cfg = CampaignConfig::load(&a.config)?;
    cfg.apply_env()?;
    if a.repeat == 1 {
        let report = run_configured(&cfg, cfg.seed, &cfg.output)?;
        emit!(
            "{} rows, {} violations, {} episodes; report in {}",
            report.rows.len(),
            report.sv_total(),
            report.episodes(),
            cfg.output.join("report.csv").display()
        );
        return Ok(());
    }
    let mut reports = Vec::new();
    for i in 0..a.repeat {
        let seed = rng::derive(cfg.seed, "repeat", i) & super::config::MAX_SEED;
        let out = cfg.output.join(format!("repeat-{i:02}"));
        let r = run_configured(&cfg, seed, &out)?;
        emit!("repeat {i}: {} violations", r.sv_total());
        reports.push(r);
    }
    let rows = aggregate_repeats(&reports);
    let p = cfg.output.join("repeat.csv");
    std::fs::write(&p, io::repeat_csv(&rows)?).map_err(|e| FadeError::io(&p, e))?;
    for r in &rows {
        emit!("{:<40} avg {:>7.2} min {:>4} md {:>6.1} max {:>4}", r.fault, r.avg, r.min, r.median, r.max);
    }
    Ok(())
}

fn cmd_replay(a: &ReplayArgs) -> Result<()> {
    let trace = io::load_trace(&a.trace)?;
    let files = replay::replay(&trace, &a.out)?;
    emit!("wrote {} frames to {}", files.len(), a.out.display());
    Ok(())
}
