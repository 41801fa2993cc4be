//! Admission constraints, checked on nominal trajectories:
//!
//! 1. every participant spawns within `d_max` of the ego;
//! 2. every participant's trajectory visits a road segment the ego also visits;
//! 3. participant speed changes stay within `a_max·dt`, speeds stay within the
//!    occupied segment's limit, and vehicles travel in the lane direction
//!    (pedestrians and junction interiors are exempt from the direction rule).

use super::{ActorKind, Scenario};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

/// Heading tolerance for the lane-direction rule.
pub const DIRECTION_TOLERANCE: f64 = 35.0 * std::f64::consts::PI / 180.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Constraint {
    SpawnRange,
    SharedSegment,
    Dynamics,
}

impl Constraint {
    pub fn number(self) -> u8 {
        match self {
            Constraint::SpawnRange => 1,
            Constraint::SharedSegment => 2,
            Constraint::Dynamics => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub constraint: Constraint,
    pub participant: usize,
    pub step: Option<usize>,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ConstraintVerdict {
    pub violations: Vec<Violation>,
}

impl ConstraintVerdict {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violated(&self) -> BTreeSet<Constraint> {
        self.violations.iter().map(|v| v.constraint).collect()
    }

    pub fn participants_violating(&self, c: Constraint) -> BTreeSet<usize> {
        self.violations
            .iter()
            .filter(|v| v.constraint == c)
            .map(|v| v.participant)
            .collect()
    }
}

pub fn check_constraints(s: &Scenario) -> ConstraintVerdict {
    let mut out = ConstraintVerdict::default();
    let ego = s.ego_nominal();
    let ego0 = s.ego.start();
    let ego_segments: BTreeSet<usize> = ego.iter().filter_map(|st| s.map.segment_at(st.position)).map(|g| g.id).collect();

    for p in &s.participants {
        let id = p.id;
        if !p.behavior.valid_for(p.kind) {
            out.violations.push(Violation {
                constraint: Constraint::Dynamics,
                participant: id,
                step: None,
                reason: format!("{:?} is not a {:?} behavior", p.behavior, p.kind),
            });
        }
        let d0 = p.initial_position().distance(ego0);
        if !(d0 <= s.d_max) {
            out.violations.push(Violation {
                constraint: Constraint::SpawnRange,
                participant: id,
                step: Some(0),
                reason: format!("spawned {d0:.2} m from ego, d_max {:.2}", s.d_max),
            });
        }

        let traj = s.participant_nominal(p);
        let mut shared = false;
        let mut dyn_violation: Option<(usize, String)> = None;
        for (t, st) in traj.iter().enumerate() {
            let seg = s.map.segment_at(st.position);
            if let Some(g) = seg {
                shared |= ego_segments.contains(&g.id);
            }
            if dyn_violation.is_some() {
                continue;
            }
            if t + 1 < traj.len() {
                let dv = (traj[t + 1].speed - st.speed).abs();
                if dv > p.speed.a_max * s.dt + 1e-9 {
                    dyn_violation = Some((t, format!("speed change {dv:.3} m/s in one step")));
                    continue;
                }
            }
            let Some(g) = seg else { continue };
            if st.speed > g.v_max + 1e-9 {
                dyn_violation = Some((t, format!("speed {:.2} above limit {:.2}", st.speed, g.v_max)));
            } else if p.kind == ActorKind::Vehicle && st.speed > 0.1 && !g.direction_ok(st.position, st.heading, DIRECTION_TOLERANCE) {
                dyn_violation = Some((t, format!("heading {:.2} against lane direction of segment {}", st.heading, g.id)));
            }
        }
        if !shared {
            out.violations.push(Violation {
                constraint: Constraint::SharedSegment,
                participant: id,
                step: None,
                reason: "never occupies a segment on the ego route".into(),
            });
        }
        if let Some((t, reason)) = dyn_violation {
            out.violations.push(Violation {
                constraint: Constraint::Dynamics,
                participant: id,
                step: Some(t),
                reason,
            });
        }
    }
    out
}
