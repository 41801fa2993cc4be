//! Fuzzes one fault model in one scenario with the genetic search.

use fade::ads::{AdsAdapter, ReferenceAds};
use fade::fuzzer::{classify_capability, episode_seed, fuzz_fault_in_scenario, Baseline, FaultTarget, FuzzConfig};
use fade::scenario::obstacle_ahead;

fn main() {
    let fault = std::env::args().nth(1).unwrap_or_else(|| "lidar.deflection".into());
    let s = obstacle_ahead(0);
    let cfg = FuzzConfig::default();
    let ads = || -> Box<dyn AdsAdapter> { Box::new(ReferenceAds::default()) };
    let baseline = Baseline::run(&s, &ads, episode_seed(7, &s.id), &cfg.spec).unwrap();
    let target = FaultTarget::parse(&fault).unwrap();
    let out = fuzz_fault_in_scenario(&target, &s, &ads, &baseline, &cfg, 7).unwrap();
    for r in &out.results {
        println!(
            "gen {:>2} id {:>3} I {:>6.2} L {:>7.1} svf {:<5} {:?}",
            r.generation,
            r.individual,
            r.objectives.i,
            r.objectives.l,
            r.svf,
            r.injection.instances().iter().map(|i| &i.values).collect::<Vec<_>>()
        );
    }
    println!(
        "{} generations, {} evaluations, {} violations, capable: {}",
        out.generations,
        out.results.len(),
        out.sv_count(),
        classify_capability(&out.results, cfg.m)
    );
}
