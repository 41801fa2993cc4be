//! Driving-stack interface and the reference camera/LiDAR fusion stack.

pub mod camera;
pub mod fusion;
pub mod lidar;
pub mod planner;
pub mod reference;
pub mod tracker;

use crate::error::Result;
use crate::geometry::{Polyline, Vec2};
use crate::scenario::RoadMap;
use crate::sensor::{CameraFrame, PointCloud};
use crate::sim::ControlCommand;
use serde::{Deserialize, Serialize};

pub use reference::ReferenceAds;

/// Static mission data available to the stack before the episode starts.
#[derive(Debug, Clone, PartialEq)]
pub struct RouteInfo {
    pub route: Polyline,
    pub destination_station: f64,
    pub map: RoadMap,
    pub dt: f64,
}

/// Ego pose and motion from odometry (not affected by sensor faults).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Odometry {
    pub position: Vec2,
    pub heading: f64,
    pub speed: f64,
    pub steer: f64,
}

pub struct SensorInput<'a> {
    pub step: usize,
    pub time: f64,
    pub frame: &'a CameraFrame,
    pub cloud: &'a PointCloud,
    pub odometry: Odometry,
}

/// A driving stack under test. Errors abort the episode and are recorded.
pub trait AdsAdapter: Send {
    fn name(&self) -> &str;
    fn reset(&mut self, route: &RouteInfo) -> Result<()>;
    fn step(&mut self, input: &SensorInput<'_>) -> Result<ControlCommand>;
}

/// Object classes the stack distinguishes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectClass {
    Vehicle,
    Pedestrian,
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Camera,
    Lidar,
    Fused,
}

/// Object hypothesis in the ego vehicle frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Detection {
    pub source: Source,
    pub class: ObjectClass,
    /// Bearing as seen from the detecting sensor, radians (left positive).
    pub bearing: f64,
    /// Half the angular width of the object around `bearing`.
    pub angular_half_width: f64,
    /// Position estimate, if the source provides range.
    pub position: Option<Vec2>,
    /// Footprint length/width estimate.
    pub extent: (f64, f64),
    pub confidence: f64,
}
