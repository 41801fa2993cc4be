#![allow(dead_code)]

use fade::ads::{AdsAdapter, ReferenceAds};
use fade::geometry::Vec2;
use fade::scenario::ActorKind;
use fade::sim::trace::TRACE_VERSION;
use fade::sim::{ActorRecord, Trace, TraceHeader, TraceStep};

pub fn reference() -> Box<dyn AdsAdapter> {
    Box::new(ReferenceAds::default())
}

#[derive(Debug, Clone, Copy)]
pub struct Body {
    pub p: (f64, f64),
    pub v: (f64, f64),
    pub a: (f64, f64),
    pub heading: f64,
    pub length: f64,
    pub width: f64,
}

impl Body {
    pub fn car(p: (f64, f64), heading: f64, v: (f64, f64), a: (f64, f64)) -> Self {
        Self { p, v, a, heading, length: 4.5, width: 1.8 }
    }

    pub fn record(&self, id: Option<usize>) -> ActorRecord {
        ActorRecord {
            id,
            kind: ActorKind::Vehicle,
            x: self.p.0,
            y: self.p.1,
            heading: self.heading,
            speed: self.v.0.hypot(self.v.1),
            length: self.length,
            width: self.width,
            vx: self.v.0,
            vy: self.v.1,
            ax: self.a.0,
            ay: self.a.1,
        }
    }

    /// Constant-acceleration position at time t.
    pub fn at(&self, t: f64) -> (f64, f64) {
        (self.p.0 + self.v.0 * t + 0.5 * self.a.0 * t * t, self.p.1 + self.v.1 * t + 0.5 * self.a.1 * t * t)
    }
}

pub fn header(scenario: &str, seed: u64) -> TraceHeader {
    TraceHeader {
        schema_version: TRACE_VERSION,
        scenario_id: scenario.into(),
        seed,
        dt: 0.1,
        steps_planned: 1,
        ads: "test".into(),
        injection: None,
        destination: Vec2::new(1000.0, 0.0),
        stop_lines: vec![],
        collision: None,
        aborted: None,
    }
}

/// Single-step trace holding the ego and one participant.
pub fn two_body_trace(ego: &Body, other: &Body, road_heading: f64) -> Trace {
    Trace {
        header: header("two-body", 0),
        steps: vec![TraceStep {
            step: 0,
            t: 0.0,
            ego: ego.record(None),
            participants: vec![other.record(Some(0))],
            road_heading,
            speed_limit: Some(30.0),
            signal: None,
            command: None,
        }],
    }
}

/// Half extent of a box along the unit direction at angle `axis`.
fn half_extent(b: &Body, axis: f64) -> f64 {
    let d = b.heading - axis;
    b.length / 2.0 * d.cos().abs() + b.width / 2.0 * d.sin().abs()
}

/// First time, sampled every `step` seconds up to `cap`, at which the two
/// footprints overlap on both road-aligned axes.
pub fn brute_closure(ego: &Body, other: &Body, road_heading: f64, step: f64, cap: f64) -> Option<f64> {
    let axes = [road_heading, road_heading + std::f64::consts::FRAC_PI_2];
    let reach: Vec<f64> = axes.iter().map(|&a| half_extent(ego, a) + half_extent(other, a)).collect();
    let n = (cap / step).round() as usize;
    (0..=n).map(|k| k as f64 * step).find(|&t| {
        let (e, o) = (ego.at(t), other.at(t));
        let d = (o.0 - e.0, o.1 - e.1);
        axes.iter().zip(&reach).all(|(&a, &r)| (d.0 * a.cos() + d.1 * a.sin()).abs() <= r)
    })
}
