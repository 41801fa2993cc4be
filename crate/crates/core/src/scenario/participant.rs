use crate::geometry::{Polyline, Vec2};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActorKind {
    Vehicle,
    Pedestrian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Behavior {
    FollowLane,
    ChangeLane,
    Cross,
    TurnAround,
    Overtake,
    Park,
    WalkAlong,
    WalkAcross,
    Stand,
}

impl Behavior {
    pub fn valid_for(self, kind: ActorKind) -> bool {
        use Behavior::*;
        match kind {
            ActorKind::Vehicle => matches!(self, FollowLane | ChangeLane | Cross | TurnAround | Overtake | Park),
            ActorKind::Pedestrian => matches!(self, WalkAlong | WalkAcross | Stand),
        }
    }
}

/// Footprint and height of an actor box, metres.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Dimensions {
    pub length: f64,
    pub width: f64,
    pub height: f64,
}

impl Dimensions {
    pub const CAR: Dimensions = Dimensions {
        length: 4.5,
        width: 1.8,
        height: 1.5,
    };
    pub const EGO: Dimensions = Dimensions {
        length: 4.6,
        width: 1.9,
        height: 1.5,
    };
    pub const PEDESTRIAN: Dimensions = Dimensions {
        length: 0.5,
        width: 0.5,
        height: 1.75,
    };
}

/// Nominal speed plan: hold still until `start_time`, then change speed
/// toward `target_speed` at `a_max`; brake to a stop at the path end.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpeedProfile {
    pub initial_speed: f64,
    pub target_speed: f64,
    pub start_time: f64,
    pub a_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Participant {
    pub id: usize,
    pub kind: ActorKind,
    pub behavior: Behavior,
    /// Path starting at the spawn point; station 0 is the initial position.
    pub path: Polyline,
    pub speed: SpeedProfile,
    pub dims: Dimensions,
}

impl Participant {
    pub fn initial_position(&self) -> Vec2 {
        self.path.start()
    }

    pub fn initial_heading(&self) -> f64 {
        self.path.heading_at(0.0)
    }

    /// Vehicles follow signals and keep gaps; pedestrians move open-loop.
    pub fn reactive(&self) -> bool {
        self.kind == ActorKind::Vehicle
    }
}

/// Ego start, route and destination.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EgoSpec {
    /// Lane-center route from the start pose through the destination.
    pub route: Polyline,
    pub initial_speed: f64,
    /// Station of the destination along `route`.
    pub destination_station: f64,
    pub dims: Dimensions,
}

impl EgoSpec {
    pub fn start(&self) -> Vec2 {
        self.route.start()
    }

    pub fn destination(&self) -> Vec2 {
        self.route.sample(self.destination_station).0
    }
}

/// One sample of a nominal trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NominalState {
    pub position: Vec2,
    pub heading: f64,
    pub speed: f64,
}

/// Integrates a speed profile along a path without interactions.
/// Speed is capped by `v_cap` and drops to zero at the end of the path.
pub fn nominal_trajectory(path: &Polyline, profile: &SpeedProfile, stop_station: f64, v_cap: f64, dt: f64, steps: usize) -> Vec<NominalState> {
    let mut out = Vec::with_capacity(steps + 1);
    let mut s = 0.0_f64;
    let mut v = profile.initial_speed.min(v_cap);
    for i in 0..=steps {
        let (p, h) = path.sample(s);
        out.push(NominalState {
            position: p,
            heading: h,
            speed: v,
        });
        let t = i as f64 * dt;
        let remaining = (stop_station - s).max(0.0);
        // Fastest speed from which the remaining distance still allows a stop.
        let v_stop = (2.0 * profile.a_max * remaining).sqrt();
        let target = if t + 1e-9 < profile.start_time { 0.0 } else { profile.target_speed.min(v_cap).min(v_stop) };
        let dv = (target - v).clamp(-profile.a_max * dt, profile.a_max * dt);
        v = (v + dv).max(0.0);
        s = (s + v * dt).min(stop_station);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn behavior_kinds() {
        assert!(Behavior::Park.valid_for(ActorKind::Vehicle));
        assert!(!Behavior::Park.valid_for(ActorKind::Pedestrian));
        assert!(Behavior::Stand.valid_for(ActorKind::Pedestrian));
    }

    #[test]
    fn nominal_respects_accel_and_cap() {
        let path = Polyline::new(vec![Vec2::new(0.0, 0.0), Vec2::new(200.0, 0.0)]);
        let prof = SpeedProfile {
            initial_speed: 0.0,
            target_speed: 15.0,
            start_time: 1.0,
            a_max: 2.0,
        };
        let tr = nominal_trajectory(&path, &prof, 200.0, 12.0, 0.1, 300);
        for w in tr.windows(2) {
            assert!((w[1].speed - w[0].speed).abs() <= 0.2 + 1e-12);
            assert!(w[1].speed <= 12.0);
        }
        assert_eq!(tr[5].speed, 0.0);
        assert!(tr.last().unwrap().position.x <= 200.0);
    }
}
