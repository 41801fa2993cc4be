//! Fixed-step world: kinematic-bicycle ego plus path-following participants.
//! Vehicles run IDM against the nearest actor ahead and red/yellow stop
//! lines; pedestrians follow their speed profile open-loop.

use crate::geometry::{Obb, Vec2};
use crate::scenario::{ActorKind, Dimensions, Scenario, SignalPhase};
use serde::{Deserialize, Serialize};

pub const WHEELBASE: f64 = 2.8;
pub const MAX_STEER: f64 = 0.6;
pub const MAX_STEER_RATE: f64 = 1.0;
pub const ACCEL_MIN: f64 = -8.0;
pub const ACCEL_MAX: f64 = 3.0;

/// Ego actuation request.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ControlCommand {
    /// m/s², clamped to [-8, 3].
    pub accel: f64,
    /// rad/s, clamped to ±MAX_STEER_RATE.
    pub steer_rate: f64,
}

impl ControlCommand {
    pub fn clamped(self) -> Self {
        Self {
            accel: if self.accel.is_finite() { self.accel.clamp(ACCEL_MIN, ACCEL_MAX) } else { ACCEL_MIN },
            steer_rate: if self.steer_rate.is_finite() {
                self.steer_rate.clamp(-MAX_STEER_RATE, MAX_STEER_RATE)
            } else {
                0.0
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ActorState {
    pub kind: ActorKind,
    pub position: Vec2,
    pub heading: f64,
    pub speed: f64,
    pub dims: Dimensions,
    pub velocity: Vec2,
    pub accel: Vec2,
}

impl ActorState {
    pub fn obb(&self) -> Obb {
        Obb::new(self.position, self.heading, self.dims.length, self.dims.width)
    }
}

/// Path progress of one scripted participant.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Progress {
    station: f64,
}

#[derive(Debug, Clone)]
pub struct World {
    pub step: usize,
    pub time: f64,
    pub ego: ActorState,
    pub ego_steer: f64,
    pub actors: Vec<ActorState>,
    progress: Vec<Progress>,
}

const IDM_S0: f64 = 2.0;
const IDM_T: f64 = 1.2;
const IDM_B: f64 = 2.5;
const LOOKAHEAD: f64 = 60.0;

impl World {
    pub fn new(s: &Scenario) -> Self {
        let (p, h) = s.ego.route.sample(0.0);
        let v = s.ego.initial_speed;
        let ego = ActorState {
            kind: ActorKind::Vehicle,
            position: p,
            heading: h,
            speed: v,
            dims: s.ego.dims,
            velocity: Vec2::from_angle(h) * v,
            accel: Vec2::ZERO,
        };
        let actors = s
            .participants
            .iter()
            .map(|q| {
                let (p, h) = q.path.sample(0.0);
                let v = q.speed.initial_speed;
                ActorState {
                    kind: q.kind,
                    position: p,
                    heading: h,
                    speed: v,
                    dims: q.dims,
                    velocity: Vec2::from_angle(h) * v,
                    accel: Vec2::ZERO,
                }
            })
            .collect();
        Self {
            step: 0,
            time: 0.0,
            ego,
            ego_steer: 0.0,
            actors,
            progress: vec![Progress { station: 0.0 }; s.participants.len()],
        }
    }

    /// Index of the first participant whose box overlaps the ego box.
    pub fn collision(&self) -> Option<usize> {
        let e = self.ego.obb();
        self.actors.iter().position(|a| a.obb().overlaps(&e))
    }

    /// Advances every actor by `dt` under the ego command.
    pub fn step(&mut self, s: &Scenario, cmd: ControlCommand, dt: f64) {
        let cmd = cmd.clamped();
        let mut next = Vec::with_capacity(self.actors.len());
        for i in 0..self.actors.len() {
            next.push(self.advance_participant(s, i, dt));
        }
        // Ego: kinematic bicycle about the box center.
        let e = self.ego;
        self.ego_steer = (self.ego_steer + cmd.steer_rate * dt).clamp(-MAX_STEER, MAX_STEER);
        let v = (e.speed + cmd.accel * dt).max(0.0);
        let heading = e.heading + v * self.ego_steer.tan() / WHEELBASE * dt;
        let position = e.position + Vec2::from_angle(heading) * (v * dt);
        self.ego = kinematic(e, position, heading, v, dt);
        for (i, (st, a)) in next.into_iter().enumerate() {
            self.progress[i] = st;
            self.actors[i] = a;
        }
        self.step += 1;
        self.time = self.step as f64 * dt;
    }

    fn advance_participant(&self, s: &Scenario, i: usize, dt: f64) -> (Progress, ActorState) {
        let spec = &s.participants[i];
        let me = self.actors[i];
        let station = self.progress[i].station;
        let prof = spec.speed;
        let a_max = prof.a_max;
        let v = me.speed;
        let target = if self.time + 1e-9 < prof.start_time { 0.0 } else { prof.target_speed };
        let remaining = (spec.path.length() - station).max(0.0);
        let v_stop = (2.0 * a_max * remaining).sqrt();

        let mut acc = if spec.reactive() {
            let leader = self.leader_gap(s, i);
            idm(v, target, a_max, leader)
        } else {
            (target - v) / dt
        };
        acc = acc.min((v_stop - v) / dt).clamp(-a_max, a_max);
        let v_new = (v + acc * dt).max(0.0);
        let st = (station + v_new * dt).min(spec.path.length());
        let (p, h) = spec.path.sample(st);
        // Keep the stub heading for standing actors.
        let h = if spec.path.length() < 0.5 { me.heading } else { h };
        (Progress { station: st }, kinematic(me, p, h, v_new, dt))
    }

    /// Closest gap (and leader speed along our heading) to anything ahead:
    /// actors in our corridor and stop lines that currently demand a stop.
    fn leader_gap(&self, s: &Scenario, i: usize) -> Option<(f64, f64)> {
        let me = &self.actors[i];
        let dir = Vec2::from_angle(me.heading);
        let left = dir.perp();
        let mut best: Option<(f64, f64)> = None;
        let mut consider = |gap: f64, v: f64| {
            if best.is_none_or(|b| gap < b.0) {
                best = Some((gap, v));
            }
        };
        let others = std::iter::once(&self.ego).chain(self.actors.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, a)| a));
        for o in others {
            let rel = o.position - me.position;
            let long = rel.dot(dir);
            if long <= 0.0 || long > LOOKAHEAD {
                continue;
            }
            let lat = rel.dot(left).abs();
            if lat < (me.dims.width + o.dims.width) / 2.0 + 0.5 {
                let gap = long - (me.dims.length + o.dims.length) / 2.0;
                consider(gap, o.velocity.dot(dir).max(0.0));
            }
        }
        if let Some(sig) = &s.map.signal {
            for line in &s.map.stop_lines {
                let phase = sig.phase(line.approach, self.time);
                if phase == SignalPhase::Green || Vec2::from_angle(line.heading).dot(dir) < 0.8 || !line.covers(me.position) {
                    continue;
                }
                let d = line.distance_ahead(me.position) - me.dims.length / 2.0;
                if d < -0.5 || d > LOOKAHEAD {
                    continue;
                }
                if phase == SignalPhase::Yellow && me.speed * me.speed / (2.0 * d.max(0.1)) > 3.0 {
                    continue;
                }
                consider(d + IDM_S0 - 0.5, 0.0);
            }
        }
        best
    }
}

fn idm(v: f64, v0: f64, a: f64, leader: Option<(f64, f64)>) -> f64 {
    let free = if v0 < 0.05 { -a } else { a * (1.0 - (v / v0).powi(4)) };
    match leader {
        None => free,
        Some((gap, vl)) => {
            if gap <= 0.1 {
                return -a;
            }
            let dv = v - vl;
            let s_star = IDM_S0 + (v * IDM_T + v * dv / (2.0 * (a * IDM_B).sqrt())).max(0.0);
            free.min(a * (1.0 - (v / v0.max(0.05)).powi(4) - (s_star / gap).powi(2)))
        }
    }
}

fn kinematic(prev: ActorState, position: Vec2, heading: f64, speed: f64, dt: f64) -> ActorState {
    let velocity = Vec2::from_angle(heading) * speed;
    ActorState {
        position,
        heading,
        speed,
        velocity,
        accel: (velocity - prev.velocity) * (1.0 / dt),
        ..prev
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{generate_scenarios, GenConfig};

    fn scenario() -> Scenario {
        generate_scenarios(1, &GenConfig::default(), 2).unwrap().remove(0)
    }

    #[test]
    fn ego_constant_speed_kinematics() {
        let mut s = scenario();
        s.participants.clear();
        s.ego.initial_speed = 10.0;
        let mut w = World::new(&s);
        let start = w.ego.position;
        for _ in 0..10 {
            w.step(&s, ControlCommand::default(), 0.1);
        }
        assert!((w.ego.position.distance(start) - 10.0).abs() < 1e-9);
    }

    #[test]
    fn zero_speed_world_is_static() {
        let mut s = scenario();
        s.ego.initial_speed = 0.0;
        for p in &mut s.participants {
            p.speed.initial_speed = 0.0;
            p.speed.target_speed = 0.0;
        }
        let mut w = World::new(&s);
        let before = (w.ego, w.actors.clone());
        w.step(&s, ControlCommand::default(), 0.1);
        assert_eq!(w.ego.position, before.0.position);
        for (a, b) in w.actors.iter().zip(&before.1) {
            assert_eq!(a.position, b.position);
        }
    }

    #[test]
    fn command_clamping() {
        let c = ControlCommand { accel: -20.0, steer_rate: 5.0 }.clamped();
        assert_eq!(c.accel, ACCEL_MIN);
        assert_eq!(c.steer_rate, MAX_STEER_RATE);
    }
}
