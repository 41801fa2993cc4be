//! Camera and LiDAR fault models: the parametric catalog and the pure
//! transform kernels that corrupt frames, clouds and sensor mounts.

pub mod camera;
pub mod catalog;
pub mod container;
pub mod lidar;
pub mod raindrop;
pub mod rotation;

use crate::error::{FadeError, Result};
use crate::rng;
use rand::Rng as _;
use serde::{Deserialize, Serialize};
use std::fmt;

pub use camera::{apply_camera_fault, apply_camera_fault_at};
pub use catalog::{enumerate_cofaults, fault_catalog, find_model, CoFaultModel};
pub use lidar::{apply_lidar_fault, apply_lidar_fault_at, displacement_offset, MountOffset};
pub use raindrop::{compose_raindrops, raindrop_mask, RaindropParams};
pub use rotation::{deflection_rotation, DeflectionParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sensor {
    Camera,
    Lidar,
}

impl Sensor {
    pub fn name(self) -> &'static str {
        match self {
            Sensor::Camera => "camera",
            Sensor::Lidar => "lidar",
        }
    }
}

impl fmt::Display for Sensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FaultCategory {
    /// Internal damage or malfunction of the sensor.
    Active,
    /// Interference from the environment.
    Passive,
}

/// Environmental precondition shared by co-occurring faults.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Precondition {
    None,
    BumpyRoad,
    StrongLight,
    Sleet,
    Humidity,
    Freezing,
    Sunset,
}

impl Precondition {
    pub fn name(self) -> &'static str {
        match self {
            Precondition::None => "none",
            Precondition::BumpyRoad => "bumpy_road",
            Precondition::StrongLight => "strong_light",
            Precondition::Sleet => "sleet",
            Precondition::Humidity => "humidity",
            Precondition::Freezing => "freezing",
            Precondition::Sunset => "sunset",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamSpec {
    pub name: String,
    pub unit: String,
    pub lo: f64,
    pub hi: f64,
    /// Value at which this parameter contributes no corruption.
    pub neutral: f64,
}

impl ParamSpec {
    pub fn new(name: &str, unit: &str, lo: f64, hi: f64, neutral: f64) -> Self {
        Self {
            name: name.to_owned(),
            unit: unit.to_owned(),
            lo,
            hi,
            neutral,
        }
    }

    pub fn contains(&self, v: f64) -> bool {
        v >= self.lo && v <= self.hi
    }

    pub fn clamp(&self, v: f64) -> f64 {
        v.clamp(self.lo, self.hi)
    }

    pub fn span(&self) -> f64 {
        self.hi - self.lo
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaultModel {
    pub id: String,
    pub sensor: Sensor,
    pub category: FaultCategory,
    pub pre: Precondition,
    pub params: Vec<ParamSpec>,
    pub description: String,
}

impl FaultModel {
    pub fn param_index(&self, name: &str) -> Option<usize> {
        self.params.iter().position(|p| p.name == name)
    }

    /// The instance that leaves every input untouched.
    pub fn neutral_instance(&self) -> FaultInstance {
        FaultInstance {
            model_id: self.id.clone(),
            values: self.params.iter().map(|p| p.neutral).collect(),
            noise_seed: 0,
        }
    }

    pub fn validate(&self, inst: &FaultInstance) -> Result<()> {
        if inst.model_id != self.id {
            return Err(FadeError::ModelMismatch(inst.model_id.clone(), self.id.clone()));
        }
        if inst.values.len() != self.params.len() {
            return Err(FadeError::InvalidInstance {
                model: self.id.clone(),
                reason: format!("expected {} values, got {}", self.params.len(), inst.values.len()),
            });
        }
        for (p, &v) in self.params.iter().zip(&inst.values) {
            if !p.contains(v) {
                return Err(FadeError::InvalidInstance {
                    model: self.id.clone(),
                    reason: format!("{} = {v} outside [{}, {}]", p.name, p.lo, p.hi),
                });
            }
        }
        Ok(())
    }
}

/// One concrete parameterization of a fault model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaultInstance {
    pub model_id: String,
    pub values: Vec<f64>,
    pub noise_seed: u64,
}

impl FaultInstance {
    pub fn value(&self, model: &FaultModel, name: &str) -> f64 {
        let i = model
            .param_index(name)
            .unwrap_or_else(|| panic!("{} has no parameter {name}", model.id));
        self.values[i]
    }

    pub fn sensor(&self) -> Result<Sensor> {
        Ok(find_model(&self.model_id)?.sensor)
    }
}

/// A camera fault and a LiDAR fault injected together under one precondition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoFault {
    pub members: Vec<FaultInstance>,
    pub pre: Precondition,
}

impl CoFault {
    pub fn new(camera: FaultInstance, lidar: FaultInstance) -> Result<Self> {
        let cm = find_model(&camera.model_id)?;
        let lm = find_model(&lidar.model_id)?;
        if cm.sensor != Sensor::Camera || lm.sensor != Sensor::Lidar {
            return Err(FadeError::InvalidInstance {
                model: format!("{}+{}", cm.id, lm.id),
                reason: "co-fault needs one camera and one LiDAR member".into(),
            });
        }
        if cm.pre != lm.pre || cm.pre == Precondition::None {
            return Err(FadeError::InvalidInstance {
                model: format!("{}+{}", cm.id, lm.id),
                reason: "co-fault members must share a precondition".into(),
            });
        }
        Ok(Self {
            pre: cm.pre,
            members: vec![camera, lidar],
        })
    }
}

/// What gets injected into one faulty run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Injection {
    Single(FaultInstance),
    Co(CoFault),
}

impl Injection {
    pub fn instances(&self) -> &[FaultInstance] {
        match self {
            Injection::Single(i) => std::slice::from_ref(i),
            Injection::Co(c) => &c.members,
        }
    }

    pub fn label(&self) -> String {
        self.instances()
            .iter()
            .map(|i| i.model_id.as_str())
            .collect::<Vec<_>>()
            .join("+")
    }
}

/// Uniform sample inside every parameter interval.
pub fn sample_instance(model: &FaultModel, seed: u64) -> FaultInstance {
    let mut rng = rng::rng(seed);
    let values = model
        .params
        .iter()
        .map(|p| p.lo + (p.hi - p.lo) * rng.gen::<f64>())
        .collect();
    FaultInstance {
        model_id: model.id.clone(),
        values,
        noise_seed: rng.gen(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sampling_is_deterministic() {
        let m = find_model("camera.raindrops").unwrap();
        assert_eq!(sample_instance(m, 7), sample_instance(m, 7));
        assert_ne!(sample_instance(m, 7), sample_instance(m, 8));
    }

    #[test]
    fn deflection_samples_stay_in_bounds() {
        let m = find_model("lidar.deflection").unwrap();
        for seed in 0..500 {
            let inst = sample_instance(m, seed);
            m.validate(&inst).unwrap();
        }
    }

    #[test]
    fn blur_sampling_mean_is_near_midpoint() {
        // Uniform-sampling oracle: E[U(lo,hi)] = (lo+hi)/2, within 5% of the interval.
        let m = find_model("camera.blur").unwrap();
        let n = 1000.0;
        let mut sums = vec![0.0; m.params.len()];
        for seed in 1..=1000 {
            let inst = sample_instance(m, seed);
            for (s, v) in sums.iter_mut().zip(&inst.values) {
                *s += v;
            }
        }
        for (p, s) in m.params.iter().zip(sums) {
            let mean = s / n;
            let mid = (p.lo + p.hi) / 2.0;
            assert!((mean - mid).abs() <= 0.05 * mid.abs().max(p.span() / 2.0), "{}: {mean} vs {mid}", p.name);
        }
    }

    #[test]
    fn validate_rejects_out_of_range() {
        let m = find_model("lidar.deflection").unwrap();
        let mut inst = m.neutral_instance();
        inst.values[0] = 5.0;
        assert!(m.validate(&inst).is_err());
    }

    #[test]
    fn cofault_requires_shared_precondition() {
        let cam = find_model("camera.overexposure").unwrap().neutral_instance();
        let lid = find_model("lidar.strong_light").unwrap().neutral_instance();
        assert!(CoFault::new(cam.clone(), lid).is_ok());
        let other = find_model("lidar.beam_loss").unwrap().neutral_instance();
        assert!(CoFault::new(cam, other).is_err());
    }
}
