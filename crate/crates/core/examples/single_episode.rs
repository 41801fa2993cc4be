//! One fault-free closed-loop episode of the reference stack.

use fade::ads::ReferenceAds;
use fade::oracle::{evaluate_specs, mettc, SpecConfig};
use fade::scenario::obstacle_ahead;
use fade::sim::run_episode;

fn main() {
    let s = obstacle_ahead(0);
    let trace = run_episode(&s, &mut ReferenceAds::default(), None, 1).expect("episode");
    let last = trace.steps.last().unwrap();
    println!("{} steps, collision: {:?}", trace.len(), trace.header.collision);
    println!("final speed {:.2} m/s, {:.1} m from destination", last.ego.speed, last.ego.position().distance(trace.header.destination));
    println!("METTC {:.2} s", mettc(&trace));
    let v = evaluate_specs(&trace, &trace, &SpecConfig::default()).unwrap();
    println!("violation-free: {}", v.phi_o);
}
