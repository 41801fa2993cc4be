//! Samples scenarios and checks them against the scenario constraints.

use fade::scenario::{check_constraints, generate_scenarios, GenConfig};

fn main() {
    let n = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(10);
    let scenarios = generate_scenarios(n, &GenConfig::default(), 2024).expect("generation");
    for s in &scenarios {
        let ok = check_constraints(s).ok();
        println!(
            "{} {:?} {:?} participants={} steps={} route={:.0} m constraints_ok={ok}",
            s.id,
            s.map.topology,
            s.weather,
            s.participants.len(),
            s.steps,
            s.ego.route.length()
        );
    }
}
