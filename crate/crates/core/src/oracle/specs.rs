//! Safety specifications over traces: collision (Co), traffic slowdown (TS),
//! traffic-rule violation (TV) and destination failure (TD).
//!
//! Co and TV read one trace. TS and TD compare the faulty run against the
//! fault-free run of the same scenario and seed, aligned by step index.

use crate::error::{FadeError, Result};
use crate::scenario::{Approach, SignalPhase};
use crate::sim::{SignalState, Trace};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SpecConfig {
    /// TS: participant speed falls below this fraction of its fault-free speed.
    pub ts_speed_ratio: f64,
    /// TS: fault-free speeds below this are not considered slowed down.
    pub ts_min_speed: f64,
    /// TS: how long the slowdown must last, in seconds.
    pub ts_duration: f64,
    /// TS: participant must be within this distance of the ego.
    pub ts_radius: f64,
    /// TV: tolerated excess over the segment speed limit.
    pub tv_speed_margin: f64,
    /// TD: arrival radius around the destination.
    pub dest_radius: f64,
}

impl Default for SpecConfig {
    fn default() -> Self {
        Self { ts_speed_ratio: 0.5, ts_min_speed: 1.0, ts_duration: 2.0, ts_radius: 20.0, tv_speed_margin: 0.5, dest_radius: 5.0 }
    }
}

/// First violating step per predicate, plus the two run-level formulas.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SpecVerdict {
    pub co: Option<usize>,
    pub ts: Option<usize>,
    pub tv: Option<usize>,
    pub td: Option<usize>,
    /// Some predicate is eventually violated in the faulty run.
    pub phi_f: bool,
    /// The fault-free run never violates a predicate.
    pub phi_o: bool,
}

impl SpecVerdict {
    pub fn any(&self) -> bool {
        self.co.is_some() || self.ts.is_some() || self.tv.is_some() || self.td.is_some()
    }
}

/// Safety violation attributable to the fault.
pub fn svf(phi_f: bool, phi_o: bool) -> bool {
    phi_f && phi_o
}

pub fn collision_step(trace: &Trace) -> Option<usize> {
    trace.steps.iter().position(|s| {
        let e = s.ego.obb();
        s.participants.iter().any(|p| e.overlaps(&p.obb()))
    })
}

fn phase(sig: &SignalState, a: Approach) -> SignalPhase {
    match a {
        Approach::NorthSouth => sig.north_south,
        Approach::EastWest => sig.east_west,
    }
}

/// Speeding, or crossing a stop line whose approach showed red while the
/// ego was still behind it. Reported at the step after the crossing.
pub fn rule_violation_step(trace: &Trace, cfg: &SpecConfig) -> Option<usize> {
    for (k, s) in trace.steps.iter().enumerate() {
        if s.speed_limit.is_some_and(|v| s.ego.speed > v + cfg.tv_speed_margin) {
            return Some(k);
        }
        if k == 0 {
            continue;
        }
        let prev = &trace.steps[k - 1];
        let Some(sig) = prev.signal else { continue };
        let (a, b) = (prev.ego.position(), s.ego.position());
        if trace.header.stop_lines.iter().any(|l| l.crossed(a, b) && phase(&sig, l.approach) == SignalPhase::Red) {
            return Some(k);
        }
    }
    None
}

/// Step at which some participant has been slowed down near the ego for the
/// configured duration.
pub fn slowdown_step(trace_f: &Trace, trace_o: &Trace, cfg: &SpecConfig) -> Option<usize> {
    let need = (cfg.ts_duration / trace_f.header.dt).round().max(1.0) as usize;
    let n = trace_f.steps.first().map_or(0, |s| s.participants.len());
    let mut run = vec![0usize; n];
    for (k, (f, o)) in trace_f.steps.iter().zip(&trace_o.steps).enumerate() {
        for (j, r) in run.iter_mut().enumerate() {
            let (Some(pf), Some(po)) = (f.participants.get(j), o.participants.get(j)) else { continue };
            let slowed = po.speed >= cfg.ts_min_speed && pf.speed < cfg.ts_speed_ratio * po.speed;
            let near = pf.position().distance(f.ego.position()) <= cfg.ts_radius;
            *r = if slowed && near { *r + 1 } else { 0 };
            if *r >= need {
                return Some(k);
            }
        }
    }
    None
}

fn arrived(trace: &Trace, cfg: &SpecConfig) -> bool {
    trace.steps.last().is_some_and(|s| s.ego.position().distance(trace.header.destination) <= cfg.dest_radius)
}

/// TD is reported at the faulty run's final step.
pub fn destination_failure_step(trace_f: &Trace, trace_o: &Trace, cfg: &SpecConfig) -> Option<usize> {
    (arrived(trace_o, cfg) && !arrived(trace_f, cfg)).then(|| trace_f.steps.len().saturating_sub(1))
}

/// Verdicts for a faulty run against its fault-free counterpart.
pub fn evaluate_specs(trace_f: &Trace, trace_o: &Trace, cfg: &SpecConfig) -> Result<SpecVerdict> {
    let (hf, ho) = (&trace_f.header, &trace_o.header);
    if hf.scenario_id != ho.scenario_id || hf.seed != ho.seed {
        return Err(FadeError::ScenarioMismatch(
            format!("{}#{}", hf.scenario_id, hf.seed),
            format!("{}#{}", ho.scenario_id, ho.seed),
        ));
    }
    let co = collision_step(trace_f);
    let ts = slowdown_step(trace_f, trace_o, cfg);
    let tv = rule_violation_step(trace_f, cfg);
    let td = destination_failure_step(trace_f, trace_o, cfg);
    // Against itself TS and TD cannot fire, so the baseline is clean when it
    // neither collides nor breaks a rule.
    let phi_o = collision_step(trace_o).is_none() && rule_violation_step(trace_o, cfg).is_none();
    let mut v = SpecVerdict { co, ts, tv, td, phi_f: false, phi_o };
    v.phi_f = v.any();
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Vec2;
    use crate::scenario::{ActorKind, StopLine};
    use crate::sim::{ActorRecord, TraceHeader, TraceStep};

    fn actor(x: f64, y: f64, speed: f64) -> ActorRecord {
        ActorRecord { id: None, kind: ActorKind::Vehicle, x, y, heading: 0.0, speed, length: 4.0, width: 2.0, vx: speed, vy: 0.0, ax: 0.0, ay: 0.0 }
    }

    /// Ego drives along +x at `v`; one participant parked at (200, 5).
    fn straight(n: usize, v: f64) -> Trace {
        let header = TraceHeader {
            schema_version: 1,
            scenario_id: "t".into(),
            seed: 1,
            dt: 0.1,
            steps_planned: n,
            ads: "test".into(),
            injection: None,
            destination: Vec2::new(v * 0.1 * (n - 1) as f64, 0.0),
            stop_lines: vec![StopLine { approach: Approach::NorthSouth, point: Vec2::new(10.0, 0.0), heading: 0.0, half_width: 3.0 }],
            collision: None,
            aborted: None,
        };
        let steps = (0..n)
            .map(|k| TraceStep {
                step: k,
                t: k as f64 * 0.1,
                ego: actor(v * 0.1 * k as f64, 0.0, v),
                participants: vec![actor(200.0, 5.0, 0.0)],
                road_heading: 0.0,
                speed_limit: Some(12.0),
                signal: Some(SignalState { north_south: if k < 15 { SignalPhase::Green } else { SignalPhase::Red }, east_west: SignalPhase::Red }),
                command: None,
            })
            .collect();
        Trace { header, steps }
    }

    #[test]
    fn identical_clean_runs() {
        // 10 m/s crosses x = 10 between steps 9 and 10, during green.
        let t = straight(40, 10.0);
        let v = evaluate_specs(&t, &t, &SpecConfig::default()).unwrap();
        assert_eq!(v, SpecVerdict { phi_o: true, ..Default::default() });
        assert!(!svf(v.phi_f, v.phi_o));
    }

    #[test]
    fn red_light_crossing_is_flagged_at_the_crossing() {
        // 5 m/s: x_k = 0.5k, crosses x = 10 between k = 19 (9.5) and k = 20 (10.0).
        // The phase at k = 19 is red (red from k = 15).
        let o = straight(40, 10.0);
        let mut f = straight(40, 5.0);
        f.header.destination = o.header.destination;
        let v = evaluate_specs(&f, &o, &SpecConfig::default()).unwrap();
        assert_eq!(v.tv, Some(20));
        assert_eq!(v.td, Some(39));
        assert!(v.phi_f && v.phi_o);
    }

    #[test]
    fn speeding_needs_the_margin() {
        let cfg = SpecConfig::default();
        assert_eq!(rule_violation_step(&straight(5, 12.4), &cfg), None);
        assert_eq!(rule_violation_step(&straight(5, 12.6), &cfg), Some(0));
    }

    #[test]
    fn overlap_is_a_collision() {
        let o = straight(30, 10.0);
        let mut f = o.clone();
        f.steps[25].participants[0] = actor(f.steps[25].ego.x + 3.0, 0.5, 0.0);
        let v = evaluate_specs(&f, &o, &SpecConfig::default()).unwrap();
        assert_eq!(v.co, Some(25));
        // Collision checks are symmetric.
        let s = &f.steps[25];
        assert_eq!(s.ego.obb().overlaps(&s.participants[0].obb()), s.participants[0].obb().overlaps(&s.ego.obb()));
    }

    #[test]
    fn sustained_slowdown_near_the_ego() {
        let mut o = straight(60, 10.0);
        for s in &mut o.steps {
            s.participants[0] = actor(s.ego.x - 10.0, 0.0, 8.0);
        }
        let mut f = o.clone();
        for s in f.steps.iter_mut().skip(10) {
            s.participants[0].speed = 3.0;
        }
        let v = evaluate_specs(&f, &o, &SpecConfig::default()).unwrap();
        assert_eq!(v.ts, Some(29));
        let mut short = o.clone();
        for s in short.steps.iter_mut().skip(10).take(19) {
            s.participants[0].speed = 3.0;
        }
        assert_eq!(evaluate_specs(&short, &o, &SpecConfig::default()).unwrap().ts, None);
    }

    #[test]
    fn baseline_violation_blocks_attribution() {
        let mut o = straight(30, 10.0);
        o.steps[5].participants[0] = actor(o.steps[5].ego.x, 0.0, 0.0);
        let mut f = o.clone();
        f.steps[3].participants[0] = actor(f.steps[3].ego.x, 0.0, 0.0);
        let v = evaluate_specs(&f, &o, &SpecConfig::default()).unwrap();
        assert!(v.phi_f && !v.phi_o);
        assert!(!svf(v.phi_f, v.phi_o));
    }

    #[test]
    fn mismatched_scenarios_are_rejected() {
        let o = straight(5, 1.0);
        let mut f = o.clone();
        f.header.scenario_id = "other".into();
        assert!(matches!(evaluate_specs(&f, &o, &SpecConfig::default()), Err(FadeError::ScenarioMismatch(..))));
    }
}
