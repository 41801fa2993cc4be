//! GA-guided differential fuzzer over fault instances.

pub mod campaign;
pub mod fuzz;
pub mod individual;
pub mod pareto;
pub mod variation;

pub use campaign::{aggregate_repeats, episode_seed, pair_seed, run_ablation, run_campaign, Ablation, CampaignReport, PairRun, RepeatRow, ReportRow};
pub use fuzz::{classify_capability, evaluate, fuzz_fault_in_scenario, AdsFactory, Baseline, DiffResult, FuzzConfig, FuzzOutcome, Mode};
pub use individual::{initialize_population, neutral_individual, sample_individual, FaultTarget, Individual};
pub use pareto::{crowding_distances, dominates, front_ranks, pareto_select};
pub use variation::{crossover, mutate, mutate_one, uniform_crossover};
