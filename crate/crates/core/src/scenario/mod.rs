//! Test scenarios: road templates, scripted participants, and the
//! admission constraints every generated scenario satisfies.

pub mod constraints;
pub mod generate;
pub mod participant;
pub mod road;

use crate::geometry::Vec2;
use serde::{Deserialize, Serialize};

pub use constraints::{check_constraints, Constraint, ConstraintVerdict, Violation};
pub use generate::{generate_scenarios, obstacle_ahead, GenConfig};
pub use participant::{nominal_trajectory, ActorKind, Behavior, Dimensions, EgoSpec, NominalState, Participant, SpeedProfile};
pub use road::{Approach, RoadMap, RoadSegment, SegmentKind, Signal, SignalPhase, StopLine, Topology};

pub const SCHEMA_VERSION: u32 = 1;

/// Ego acceleration assumed by the nominal (pre-simulation) ego trajectory.
pub const EGO_NOMINAL_ACCEL: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Weather {
    Clear,
    Rain,
    Snow,
    Fog,
    Sunset,
}

impl Weather {
    pub const ALL: [Weather; 5] = [Weather::Clear, Weather::Rain, Weather::Snow, Weather::Fog, Weather::Sunset];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub schema_version: u32,
    pub id: String,
    pub seed: u64,
    pub map: RoadMap,
    pub ego: EgoSpec,
    pub participants: Vec<Participant>,
    /// Episode length F in steps.
    pub steps: usize,
    pub dt: f64,
    /// Sensor range bounding initial participant distance.
    pub d_max: f64,
    /// Descriptive only; fault pairing does not depend on it.
    pub weather: Weather,
}

impl Scenario {
    pub fn duration(&self) -> f64 {
        self.steps as f64 * self.dt
    }

    pub fn destination(&self) -> Vec2 {
        self.ego.destination()
    }

    /// Speed limit along the ego route (minimum over the segments it visits).
    pub fn route_speed_limit(&self) -> f64 {
        let route = &self.ego.route;
        let n = (route.length() / 2.0).ceil() as usize;
        (0..=n)
            .filter_map(|i| self.map.segment_at(route.sample(i as f64 * 2.0).0))
            .map(|s| s.v_max)
            .fold(f64::INFINITY, f64::min)
            .min(40.0)
    }

    pub fn ego_nominal(&self) -> Vec<NominalState> {
        let prof = SpeedProfile {
            initial_speed: self.ego.initial_speed,
            target_speed: self.route_speed_limit(),
            start_time: 0.0,
            a_max: EGO_NOMINAL_ACCEL,
        };
        nominal_trajectory(&self.ego.route, &prof, self.ego.destination_station, f64::INFINITY, self.dt, self.steps)
    }

    pub fn participant_nominal(&self, p: &Participant) -> Vec<NominalState> {
        nominal_trajectory(&p.path, &p.speed, p.path.length(), f64::INFINITY, self.dt, self.steps)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }
}
