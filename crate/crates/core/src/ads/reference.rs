use super::camera::{perceive_camera, SignalObservation};
use super::fusion::fuse;
use super::lidar::perceive_lidar;
use super::planner::Planner;
use super::tracker::Tracker;
use super::{AdsAdapter, Detection, RouteInfo, SensorInput};
use crate::error::{FadeError, Result};
use crate::geometry::Vec2;
use crate::sim::{ControlCommand, SensorRig};

/// Camera + LiDAR late-fusion stack. Perception assumes the nominal rig.
#[derive(Debug, Clone)]
pub struct ReferenceAds {
    rig: SensorRig,
    planner: Option<Planner>,
    tracker: Tracker,
    signal: Option<SignalObservation>,
    signal_line: Option<f64>,
    last: Vec<Detection>,
}

impl ReferenceAds {
    pub fn new(rig: SensorRig) -> Self {
        Self { rig, planner: None, tracker: Tracker::default(), signal: None, signal_line: None, last: Vec::new() }
    }

    /// Fused detections of the most recent step.
    pub fn last_detections(&self) -> &[Detection] {
        &self.last
    }

    pub fn tracker(&self) -> &Tracker {
        &self.tracker
    }
}

impl Default for ReferenceAds {
    fn default() -> Self {
        Self::new(SensorRig::default())
    }
}

impl AdsAdapter for ReferenceAds {
    fn name(&self) -> &str {
        "reference"
    }

    fn reset(&mut self, route: &RouteInfo) -> Result<()> {
        if !(route.dt > 0.0) || route.route.length() <= 0.0 {
            return Err(FadeError::Adapter("route must have positive length and dt".into()));
        }
        self.planner = Some(Planner::new(route));
        self.tracker.reset();
        self.signal = None;
        self.signal_line = None;
        self.last.clear();
        Ok(())
    }

    fn step(&mut self, input: &SensorInput<'_>) -> Result<ControlCommand> {
        let planner = self.planner.as_ref().ok_or_else(|| FadeError::Adapter("step before reset".into()))?;
        let cam = perceive_camera(input.frame, &self.rig.camera);
        let lidar = perceive_lidar(input.cloud, &self.rig.lidar.mount);
        let m = self.rig.camera.mount.translation;
        self.last = fuse(&cam.objects, &lidar, Vec2::new(m[0], m[1]));
        let odo = input.odometry;
        self.tracker.update(&self.last, &odo, planner.route_dt());

        // The last confident lamp reading holds until the ego passes its stop line.
        let s = planner.station(odo.position);
        let line = planner.next_stop_line(s);
        if line != self.signal_line {
            self.signal = None;
            self.signal_line = line;
        }
        if let Some(obs) = cam.signal.filter(|o| o.confidence > super::planner::SIGNAL_MIN_CONF) {
            self.signal = Some(obs);
        }
        let tracks: Vec<_> = self.tracker.confirmed().collect();
        Ok(planner.plan(&odo, &tracks, self.signal))
    }
}
