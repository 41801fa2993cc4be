//! Differential objectives and spec verdict for one faulty run.

use fade::ads::ReferenceAds;
use fade::faults::{find_model, Injection};
use fade::oracle::{evaluate_specs, mettc, objectives, SpecConfig};
use fade::scenario::obstacle_ahead;
use fade::sim::run_episode;

fn main() {
    let s = obstacle_ahead(0);
    let seed = 1;
    let trace_o = run_episode(&s, &mut ReferenceAds::default(), None, seed).unwrap();
    let model = find_model("lidar.deflection").unwrap();
    for eta in [0.0, 0.03, 0.08] {
        let mut inst = model.neutral_instance();
        inst.values[model.param_index("eta").unwrap()] = eta;
        let trace_f = run_episode(&s, &mut ReferenceAds::default(), Some(&Injection::Single(inst)), seed).unwrap();
        let obj = objectives(&trace_o, &trace_f);
        let v = evaluate_specs(&trace_f, &trace_o, &SpecConfig::default()).unwrap();
        println!(
            "eta {eta:.2}: METTC {:.2} -> {:.2}, I {:.2}, L {:.1}, Co {:?} TS {:?} TV {:?} TD {:?}, svf {}",
            mettc(&trace_o),
            mettc(&trace_f),
            obj.i,
            obj.l,
            v.co,
            v.ts,
            v.tv,
            v.td,
            fade::oracle::svf(v.phi_f, v.phi_o)
        );
    }
}
