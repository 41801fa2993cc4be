use crate::geometry::MountPose;
use crate::sensor::{ScanGeometry, DEFAULT_HFOV};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CameraConfig {
    /// Horizontal field of view, radians.
    pub hfov: f64,
    pub width: usize,
    pub height: usize,
    pub mount: MountPose,
}

impl CameraConfig {
    pub fn focal(&self) -> f64 {
        self.width as f64 / 2.0 / (self.hfov / 2.0).tan()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LidarConfig {
    pub geometry: ScanGeometry,
    pub mount: MountPose,
    /// Whether rays hitting the road surface produce points.
    pub ground_returns: bool,
}

/// Sensor poses are in the ego vehicle frame (origin at the box center on
/// the ground, x forward, y left, z up).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensorRig {
    pub camera: CameraConfig,
    pub lidar: LidarConfig,
}

impl Default for SensorRig {
    fn default() -> Self {
        Self {
            camera: CameraConfig {
                hfov: DEFAULT_HFOV,
                width: 160,
                height: 120,
                mount: MountPose::at([1.5, 0.0, 1.4]),
            },
            lidar: LidarConfig {
                geometry: ScanGeometry::default(),
                mount: MountPose::at([1.0, 0.0, 1.9]),
                ground_returns: true,
            },
        }
    }
}
