//! Differential fuzzing of one fault target in one scenario.

use super::individual::{initialize_population, sample_individual, FaultTarget, GenomeKey, Individual};
use super::pareto::pareto_select;
use super::variation::{crossover, mutate};
use crate::ads::AdsAdapter;
use crate::error::{FadeError, Result};
use crate::faults::Injection;
use crate::oracle::{evaluate_specs, objectives, svf, Objectives, SpecConfig, SpecVerdict, T_CAP};
use crate::rng;
use crate::scenario::Scenario;
use crate::sim::{run_episode, Trace};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

/// Builds one fresh adapter per episode.
pub type AdsFactory = dyn Fn() -> Box<dyn AdsAdapter> + Send + Sync;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    #[default]
    Ga,
    /// Non-elite slots are refilled with fresh uniform samples.
    Random,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FuzzConfig {
    pub population: usize,
    /// Elites kept per generation.
    pub k: usize,
    /// Capability threshold: more than `m` violations.
    pub m: usize,
    pub threshold_c: f64,
    pub threshold_m: f64,
    pub stall_generations: usize,
    pub max_generations: usize,
    pub mode: Mode,
    /// Exact number of evaluations; overrides the stall rule and the
    /// generation cap. Used to match budgets across modes.
    pub budget: Option<usize>,
    pub spec: SpecConfig,
}

impl Default for FuzzConfig {
    fn default() -> Self {
        Self {
            population: 8,
            k: 4,
            m: 5,
            threshold_c: 0.4,
            threshold_m: 0.3,
            stall_generations: 3,
            max_generations: 25,
            mode: Mode::Ga,
            budget: None,
            spec: SpecConfig::default(),
        }
    }
}

impl FuzzConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(FadeError::Config(m.to_owned()));
        if self.population == 0 {
            return bad("population must be positive");
        }
        if self.k == 0 || self.k > self.population {
            return bad("k must be in 1..=population");
        }
        if self.m == 0 {
            return bad("m must be at least 1");
        }
        for (name, t) in [("threshold_c", self.threshold_c), ("threshold_m", self.threshold_m)] {
            if !(t > 0.0 && t < 1.0) {
                return Err(FadeError::Config(format!("{name} must lie in (0, 1), got {t}")));
            }
        }
        if self.budget == Some(0) {
            return bad("budget must be positive");
        }
        Ok(())
    }
}

/// One faulty run compared against the fault-free run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiffResult {
    pub scenario_id: String,
    pub fault: String,
    pub individual: u64,
    pub generation: usize,
    pub injection: Injection,
    pub objectives: Objectives,
    pub verdict: SpecVerdict,
    pub svf: bool,
    /// Adapter failure in the faulty run; such runs get the worst fitness.
    pub aborted: Option<String>,
    #[serde(skip)]
    pub trace_f: Option<Arc<Trace>>,
}

/// The fault-free run of a scenario, computed once and shared.
#[derive(Debug, Clone)]
pub struct Baseline {
    pub trace: Arc<Trace>,
    /// Whether the fault-free run is itself free of violations.
    pub clean: bool,
}

impl Baseline {
    pub fn run(scenario: &Scenario, ads: &AdsFactory, seed: u64, spec: &SpecConfig) -> Result<Self> {
        let trace = run_episode(scenario, ads().as_mut(), None, seed)?;
        let clean = trace.header.aborted.is_none() && evaluate_specs(&trace, &trace, spec)?.phi_o;
        Ok(Self { trace: Arc::new(trace), clean })
    }
}

/// Runs the faulty episode for `ind` and scores it.
pub fn evaluate(ind: &Individual, generation: usize, scenario: &Scenario, ads: &AdsFactory, baseline: &Baseline, spec: &SpecConfig) -> Result<DiffResult> {
    let injection = ind.injection()?;
    let trace_o = &baseline.trace;
    let trace_f = run_episode(scenario, ads().as_mut(), Some(&injection), trace_o.header.seed)?;
    let verdict = evaluate_specs(&trace_f, trace_o, spec)?;
    let aborted = trace_f.header.aborted.clone();
    let (objectives, is_svf) = match aborted {
        Some(_) => (Objectives { i: -T_CAP, l: 0.0 }, false),
        None => (objectives(trace_o, &trace_f), svf(verdict.phi_f, verdict.phi_o)),
    };
    Ok(DiffResult {
        scenario_id: scenario.id.clone(),
        fault: injection.label(),
        individual: ind.id,
        generation,
        injection,
        objectives,
        verdict,
        svf: is_svf,
        aborted,
        trace_f: Some(Arc::new(trace_f)),
    })
}

#[derive(Debug, Clone)]
pub struct FuzzOutcome {
    /// Every distinct genome evaluated, in evaluation order.
    pub results: Vec<DiffResult>,
    pub generations: usize,
    /// Ids of the final elites.
    pub elites: Vec<u64>,
    /// Why the scenario was not fuzzed.
    pub skipped: Option<String>,
}

impl FuzzOutcome {
    pub fn sv_count(&self) -> usize {
        self.results.iter().filter(|r| r.svf).count()
    }
}

/// More than `m` attributable violations.
pub fn classify_capability(results: &[DiffResult], m: usize) -> bool {
    results.iter().filter(|r| r.svf).count() > m
}

struct Run<'a> {
    scenario: &'a Scenario,
    ads: &'a AdsFactory,
    baseline: &'a Baseline,
    cfg: &'a FuzzConfig,
    results: Vec<DiffResult>,
    by_genome: HashMap<GenomeKey, usize>,
    by_id: HashMap<u64, (Individual, Objectives)>,
}

impl Run<'_> {
    /// Evaluates genomes not seen before; returns the individuals that
    /// represent the batch (earlier twins replace repeats).
    fn evaluate_batch(&mut self, batch: Vec<Individual>, generation: usize) -> Result<Vec<u64>> {
        let mut fresh = Vec::new();
        let mut ids = Vec::new();
        let mut pending: HashMap<GenomeKey, u64> = HashMap::new();
        for ind in batch {
            let key = ind.genome_key();
            if let Some(&r) = self.by_genome.get(&key) {
                ids.push(self.results[r].individual);
            } else if let Some(&id) = pending.get(&key) {
                ids.push(id);
            } else {
                pending.insert(key, ind.id);
                ids.push(ind.id);
                fresh.push(ind);
            }
        }
        let (scenario, ads, baseline, spec) = (self.scenario, self.ads, self.baseline, &self.cfg.spec);
        let scored: Vec<Result<DiffResult>> = fresh.par_iter().map(|ind| evaluate(ind, generation, scenario, ads, baseline, spec)).collect();
        for (ind, r) in fresh.into_iter().zip(scored) {
            let r = r?;
            self.by_genome.insert(ind.genome_key(), self.results.len());
            self.by_id.insert(ind.id, (ind, r.objectives));
            self.results.push(r);
        }
        let mut seen = BTreeSet::new();
        ids.retain(|id| seen.insert(*id));
        Ok(ids)
    }

    fn select(&self, candidates: &[u64]) -> Vec<u64> {
        let points: Vec<Objectives> = candidates.iter().map(|id| self.by_id[id].1).collect();
        pareto_select(&points, candidates, self.cfg.k).into_iter().map(|i| candidates[i]).collect()
    }
}

/// Evolves instances of `target` against `scenario`. Returns every evaluated
/// result; a scenario whose fault-free run is not clean is skipped.
pub fn fuzz_fault_in_scenario(target: &FaultTarget, scenario: &Scenario, ads: &AdsFactory, baseline: &Baseline, cfg: &FuzzConfig, seed: u64) -> Result<FuzzOutcome> {
    cfg.validate()?;
    if !baseline.clean {
        return Ok(FuzzOutcome {
            results: Vec::new(),
            generations: 0,
            elites: Vec::new(),
            skipped: Some("fault-free run violates a safety specification".into()),
        });
    }
    let mut run = Run { scenario, ads, baseline, cfg, results: Vec::new(), by_genome: HashMap::new(), by_id: HashMap::new() };
    let budget_left = |run: &Run| cfg.budget.map(|b| b.saturating_sub(run.results.len()));

    let mut init = initialize_population(target, cfg.population, rng::derive(seed, "init", 0))?;
    if let Some(b) = cfg.budget {
        init.truncate(b);
    }
    let mut next_id = init.len() as u64;
    let ids = run.evaluate_batch(init, 0)?;
    let mut elites = run.select(&ids);
    let mut stall = 0;
    let mut generation = 0;
    // Hard stop for budgeted runs whose offspring keep repeating genomes.
    let cap = cfg.budget.map_or(cfg.max_generations, |b| 10 * b.max(1));
    loop {
        match budget_left(&run) {
            Some(0) => break,
            Some(_) => {}
            None if stall >= cfg.stall_generations => break,
            None => {}
        }
        if generation >= cap {
            break;
        }
        generation += 1;
        let mut rng = rng::derived_rng(seed, "variation", generation as u64);
        let want = budget_left(&run).map_or(cfg.population - elites.len(), |b| b.min(cfg.population - elites.len()).max(1));
        let mut offspring = Vec::with_capacity(want);
        match cfg.mode {
            Mode::Ga => {
                let parents: Vec<&Individual> = elites.iter().map(|id| &run.by_id[id].0).collect();
                let mut j = 0;
                while offspring.len() < want {
                    let (a, b) = (parents[j % parents.len()], parents[(j + 1) % parents.len()]);
                    let (x, y) = crossover(a, b, cfg.threshold_c, &mut rng)?;
                    for child in [x, y] {
                        if offspring.len() < want {
                            let mut c = mutate(&child, cfg.threshold_m, &mut rng)?;
                            c.id = next_id;
                            next_id += 1;
                            offspring.push(c);
                        }
                    }
                    j += 1;
                }
            }
            Mode::Random => {
                for _ in 0..want {
                    offspring.push(sample_individual(target, next_id, rng::derive(seed, "random", next_id))?);
                    next_id += 1;
                }
            }
        }
        let new_ids = run.evaluate_batch(offspring, generation)?;
        let mut union = elites.clone();
        union.extend(new_ids.into_iter().filter(|id| !elites.contains(id)));
        let next = run.select(&union);
        let same: BTreeSet<u64> = next.iter().copied().collect();
        stall = if same == elites.iter().copied().collect() { stall + 1 } else { 0 };
        elites = next;
    }
    Ok(FuzzOutcome { results: run.results, generations: generation, elites, skipped: None })
}
