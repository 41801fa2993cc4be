//! Campaign loop over fault targets × scenarios, the GA-vs-random ablation,
//! and aggregation across repeated campaigns.

use super::fuzz::{classify_capability, fuzz_fault_in_scenario, AdsFactory, Baseline, FuzzConfig, FuzzOutcome, Mode};
use super::individual::FaultTarget;
use crate::error::{FadeError, Result};
use crate::rng;
use crate::scenario::Scenario;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};

/// One line of `report.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub fault: String,
    pub scenario: String,
    pub evaluations: usize,
    pub sv_count: usize,
    pub capable: bool,
    #[serde(rename = "best_I")]
    pub best_i: Option<f64>,
    #[serde(rename = "best_L")]
    pub best_l: Option<f64>,
    /// `ok`, `skipped: ...` or `error: ...`.
    pub status: String,
}

#[derive(Debug, Clone)]
pub struct PairRun {
    pub target: FaultTarget,
    pub scenario_id: String,
    /// Absent when the pair failed; the error text is in the report row.
    pub outcome: Option<FuzzOutcome>,
    /// Index into `outcome.results` of the highest-(I, L) non-aborted run.
    /// Only this result keeps its faulty trace.
    pub best: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct CampaignReport {
    pub mode: Mode,
    pub rows: Vec<ReportRow>,
    pub pairs: Vec<PairRun>,
    /// Fault-free runs, one per scenario, in scenario order.
    pub baselines: Vec<(String, Result<Baseline, String>)>,
}

impl CampaignReport {
    /// Episodes executed: one fault-free run per scenario plus one per
    /// evaluated genome.
    pub fn episodes(&self) -> usize {
        self.baselines.iter().filter(|b| b.1.is_ok()).count() + self.rows.iter().map(|r| r.evaluations).sum::<usize>()
    }

    pub fn sv_total(&self) -> usize {
        self.rows.iter().map(|r| r.sv_count).sum()
    }

    pub fn sv_by_fault(&self) -> BTreeMap<String, usize> {
        let mut m = BTreeMap::new();
        for r in &self.rows {
            *m.entry(r.fault.clone()).or_insert(0) += r.sv_count;
        }
        m
    }
}

/// Seed of the paired episodes of one scenario.
pub fn episode_seed(seed: u64, scenario_id: &str) -> u64 {
    rng::derive(seed, &format!("episode/{scenario_id}"), 0)
}

/// Seed of the search for one (fault, scenario) pair.
pub fn pair_seed(seed: u64, fault: &str, scenario_id: &str) -> u64 {
    rng::derive(seed, &format!("fuzz/{fault}@{scenario_id}"), 0)
}

fn best_index(o: &FuzzOutcome) -> Option<usize> {
    o.results
        .iter()
        .enumerate()
        .filter(|(_, r)| r.aborted.is_none())
        .max_by(|(ia, a), (ib, b)| {
            a.objectives
                .i
                .total_cmp(&b.objectives.i)
                .then(a.objectives.l.total_cmp(&b.objectives.l))
                .then(ib.cmp(ia))
        })
        .map(|(i, _)| i)
}

fn pool(threads: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| FadeError::Config(format!("thread pool: {e}")))
}

/// Runs every target against every scenario. Per-pair failures are recorded
/// in the report and never abort the campaign.
pub fn run_campaign(targets: &[FaultTarget], scenarios: &[Scenario], ads: &AdsFactory, cfg: &FuzzConfig, seed: u64, threads: usize) -> Result<CampaignReport> {
    run_with_budgets(targets, scenarios, ads, cfg, seed, threads, &HashMap::new())
}

fn run_with_budgets(
    targets: &[FaultTarget],
    scenarios: &[Scenario],
    ads: &AdsFactory,
    cfg: &FuzzConfig,
    seed: u64,
    threads: usize,
    budgets: &HashMap<(String, String), usize>,
) -> Result<CampaignReport> {
    cfg.validate()?;
    let pool = pool(threads)?;
    pool.install(|| {
        let baselines: Vec<(String, Result<Baseline, String>)> = scenarios
            .par_iter()
            .map(|s| (s.id.clone(), Baseline::run(s, ads, episode_seed(seed, &s.id), &cfg.spec).map_err(|e| e.to_string())))
            .collect();
        let jobs: Vec<(usize, &FaultTarget)> = targets.iter().flat_map(|t| (0..scenarios.len()).map(move |i| (i, t))).collect();
        let pairs: Vec<(PairRun, ReportRow)> = jobs
            .par_iter()
            .map(|&(si, target)| {
                let s = &scenarios[si];
                let label = target.label();
                let mut row = ReportRow {
                    fault: label.clone(),
                    scenario: s.id.clone(),
                    evaluations: 0,
                    sv_count: 0,
                    capable: false,
                    best_i: None,
                    best_l: None,
                    status: "ok".into(),
                };
                let mut pair = PairRun { target: target.clone(), scenario_id: s.id.clone(), outcome: None, best: None };
                let baseline = match &baselines[si].1 {
                    Ok(b) => b,
                    Err(e) => {
                        row.status = format!("error: fault-free run failed: {e}");
                        return (pair, row);
                    }
                };
                let mut pc = cfg.clone();
                if let Some(&b) = budgets.get(&(label.clone(), s.id.clone())) {
                    pc.budget = Some(b);
                }
                match fuzz_fault_in_scenario(target, s, ads, baseline, &pc, pair_seed(seed, &label, &s.id)) {
                    Ok(mut o) => {
                        if let Some(reason) = &o.skipped {
                            row.status = format!("skipped: {reason}");
                        }
                        row.evaluations = o.results.len();
                        row.sv_count = o.sv_count();
                        row.capable = classify_capability(&o.results, cfg.m);
                        let best = best_index(&o);
                        if let Some(b) = best {
                            row.best_i = Some(o.results[b].objectives.i);
                            row.best_l = Some(o.results[b].objectives.l);
                        }
                        for (i, r) in o.results.iter_mut().enumerate() {
                            if Some(i) != best {
                                r.trace_f = None;
                            }
                        }
                        pair.best = best;
                        pair.outcome = Some(o);
                    }
                    Err(e) => row.status = format!("error: {e}"),
                }
                (pair, row)
            })
            .collect();
        let (pairs, rows) = pairs.into_iter().unzip();
        Ok(CampaignReport { mode: cfg.mode, rows, pairs, baselines })
    })
}

#[derive(Debug, Clone)]
pub struct Ablation {
    pub ga: CampaignReport,
    pub random: CampaignReport,
}

/// GA campaign, then a random-sampling campaign given exactly the GA's
/// evaluation count for each (fault, scenario) pair.
pub fn run_ablation(targets: &[FaultTarget], scenarios: &[Scenario], ads: &AdsFactory, cfg: &FuzzConfig, seed: u64, threads: usize) -> Result<Ablation> {
    let ga_cfg = FuzzConfig { mode: Mode::Ga, budget: None, ..cfg.clone() };
    let ga = run_campaign(targets, scenarios, ads, &ga_cfg, seed, threads)?;
    let budgets = ga
        .rows
        .iter()
        .filter(|r| r.evaluations > 0)
        .map(|r| ((r.fault.clone(), r.scenario.clone()), r.evaluations))
        .collect::<HashMap<_, _>>();
    let rnd_cfg = FuzzConfig { mode: Mode::Random, budget: None, ..cfg.clone() };
    // Pairs the GA skipped stay skipped: the fault-free runs are identical.
    let random = run_with_budgets(targets, scenarios, ads, &rnd_cfg, seed, threads, &budgets)?;
    Ok(Ablation { ga, random })
}

/// Per-fault statistics of total violations across repeated campaigns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepeatRow {
    pub fault: String,
    pub runs: usize,
    pub avg: f64,
    pub min: usize,
    pub median: f64,
    pub max: usize,
}

pub fn aggregate_repeats(reports: &[CampaignReport]) -> Vec<RepeatRow> {
    let mut per: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for r in reports {
        for (f, n) in r.sv_by_fault() {
            per.entry(f).or_default().push(n);
        }
    }
    per.into_iter()
        .map(|(fault, mut v)| {
            v.sort_unstable();
            let n = v.len();
            let median = if n % 2 == 1 { v[n / 2] as f64 } else { (v[n / 2 - 1] + v[n / 2]) as f64 / 2.0 };
            RepeatRow { fault, runs: n, avg: v.iter().sum::<usize>() as f64 / n as f64, min: v[0], median, max: v[n - 1] }
        })
        .collect()
}
