//! LiDAR fault kernels. Mount faults (deflection, displacement) perturb the
//! scanner pose; the other six corrupt a finished cloud.
//!
//! Structural choices (which beams, which sectors, where ghost sources sit)
//! depend only on the noise seed so they persist across frames. Per-point
//! noise is redrawn for each frame index.

use super::rotation::{deflection_rotation, DeflectionParams};
use super::{find_model, FaultInstance, FaultModel, Sensor};
use crate::error::{FadeError, Result};
use crate::geometry::MountPose;
use crate::rng;
use crate::sensor::{LidarPoint, PointCloud};
use rand::seq::SliceRandom;
use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use std::collections::HashSet;

/// Rigid translation of a sensor mount, metres, in the sensor frame.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MountOffset {
    pub dx: f64,
    pub dy: f64,
    pub dz: f64,
}

impl MountOffset {
    pub fn is_zero(&self) -> bool {
        self.dx == 0.0 && self.dy == 0.0 && self.dz == 0.0
    }

    /// Moves the pose origin by the offset expressed in the sensor frame.
    pub fn apply_to_pose(&self, pose: &MountPose) -> MountPose {
        let d = pose.rotation.apply([self.dx, self.dy, self.dz]);
        MountPose {
            rotation: pose.rotation,
            translation: [
                pose.translation[0] + d[0],
                pose.translation[1] + d[1],
                pose.translation[2] + d[2],
            ],
        }
    }

    /// Re-expresses a cloud in the frame of a sensor shifted by the offset:
    /// every point moves by `-offset`.
    pub fn apply_to_cloud(&self, cloud: &PointCloud) -> PointCloud {
        let mut out = cloud.clone();
        for p in &mut out.points {
            p.x -= self.dx;
            p.y -= self.dy;
            p.z -= self.dz;
        }
        out
    }
}

/// Reads (dx, dy, dz) from a camera or LiDAR displacement instance.
pub fn displacement_offset(inst: &FaultInstance) -> Result<MountOffset> {
    let model = find_model(&inst.model_id)?;
    if !model.id.ends_with(".displacement") {
        return Err(FadeError::InvalidInstance {
            model: model.id.clone(),
            reason: "not a displacement model".into(),
        });
    }
    model.validate(inst)?;
    Ok(MountOffset {
        dx: inst.value(model, "dx"),
        dy: inst.value(model, "dy"),
        dz: inst.value(model, "dz"),
    })
}

fn lidar_model(inst: &FaultInstance) -> Result<&'static FaultModel> {
    let model = find_model(&inst.model_id)?;
    if model.sensor != Sensor::Lidar {
        return Err(FadeError::SensorMismatch {
            model: model.id.clone(),
            expected: "camera",
            actual: "lidar",
        });
    }
    model.validate(inst)?;
    Ok(model)
}

/// Pose actually used by the scanner under a mount fault. Non-mount faults
/// return the pose unchanged.
pub fn perturb_mount(pose: &MountPose, inst: &FaultInstance) -> Result<MountPose> {
    let model = lidar_model(inst)?;
    Ok(match model.id.as_str() {
        "lidar.deflection" => {
            let r = deflection_rotation(DeflectionParams::from_instance(model, inst));
            if r == crate::geometry::Mat3::IDENTITY {
                *pose
            } else {
                MountPose {
                    rotation: pose.rotation.mul(&r),
                    translation: pose.translation,
                }
            }
        }
        "lidar.displacement" => {
            let off = displacement_offset(inst)?;
            if off.is_zero() {
                *pose
            } else {
                off.apply_to_pose(pose)
            }
        }
        _ => *pose,
    })
}

pub fn apply_lidar_fault(cloud: &PointCloud, pose: &MountPose, inst: &FaultInstance) -> Result<(PointCloud, MountPose)> {
    apply_lidar_fault_at(cloud, pose, inst, 0)
}

pub fn apply_lidar_fault_at(
    cloud: &PointCloud,
    pose: &MountPose,
    inst: &FaultInstance,
    frame_index: u64,
) -> Result<(PointCloud, MountPose)> {
    let pose = perturb_mount(pose, inst)?;
    Ok((corrupt_cloud(cloud, inst, frame_index)?, pose))
}

/// Applies the cloud-level part of a LiDAR fault. Mount faults leave the cloud as is.
pub fn corrupt_cloud(cloud: &PointCloud, inst: &FaultInstance, frame_index: u64) -> Result<PointCloud> {
    let model = lidar_model(inst)?;
    let v = |n: &str| inst.value(model, n);
    let seed = inst.noise_seed;
    let frame_seed = rng::derive(seed, "lidar.frame", frame_index);
    Ok(match model.id.as_str() {
        "lidar.deflection" | "lidar.displacement" => cloud.clone(),
        "lidar.beam_loss" => {
            let lost = beam_subset(cloud.geometry.beams, v("fraction"), seed);
            drop_beams(cloud, &lost)
        }
        "lidar.line_fault" => line_fault(cloud, v("fraction"), v("bias"), v("sigma"), seed, frame_seed),
        "lidar.electromagnetic" => electromagnetic(cloud, v("rate"), v("magnitude"), frame_seed),
        "lidar.crosstalk" => crosstalk(cloud, count(v("sources")), v("range"), v("spread"), seed, frame_seed),
        "lidar.rain_snow_pollution" => pollution(cloud, count(v("sectors")), v("width"), seed),
        "lidar.strong_light" => strong_light(cloud, v("range_scale"), v("dropout"), frame_seed),
        other => return Err(FadeError::UnknownFault(other.to_owned())),
    })
}

fn count(v: f64) -> usize {
    v.round().max(0.0) as usize
}

/// The first `round(fraction * beams)` entries of a seeded beam permutation,
/// so larger fractions lose a superset of beams.
pub fn beam_subset(beams: u16, fraction: f64, seed: u64) -> HashSet<u16> {
    let n = (fraction * f64::from(beams)).round() as usize;
    if n == 0 {
        return HashSet::new();
    }
    let mut order: Vec<u16> = (0..beams).collect();
    order.shuffle(&mut rng::derived_rng(seed, "lidar.beams", 0));
    order.into_iter().take(n).collect()
}

pub fn drop_beams(cloud: &PointCloud, lost: &HashSet<u16>) -> PointCloud {
    if lost.is_empty() {
        return cloud.clone();
    }
    PointCloud {
        geometry: cloud.geometry,
        points: cloud.points.iter().filter(|p| !lost.contains(&p.beam)).copied().collect(),
    }
}

/// Moves a point along its own ray to a new range.
fn with_range(p: &LidarPoint, range: f64) -> LidarPoint {
    let r = p.range();
    if r <= 1e-9 {
        return *p;
    }
    let k = range.max(0.05) / r;
    LidarPoint {
        x: p.x * k,
        y: p.y * k,
        z: p.z * k,
        ..*p
    }
}

fn line_fault(cloud: &PointCloud, fraction: f64, bias: f64, sigma: f64, seed: u64, frame_seed: u64) -> PointCloud {
    let affected = beam_subset(cloud.geometry.beams, fraction, rng::derive(seed, "line_fault", 0));
    if affected.is_empty() {
        return cloud.clone();
    }
    let mut rng = rng::rng(rng::derive(frame_seed, "line_fault", 0));
    let mut out = cloud.clone();
    for p in &mut out.points {
        if affected.contains(&p.beam) {
            let z: f64 = StandardNormal.sample(&mut rng);
            *p = with_range(p, p.range() + bias + sigma * z);
        }
    }
    out
}

fn electromagnetic(cloud: &PointCloud, rate: f64, magnitude: f64, frame_seed: u64) -> PointCloud {
    if rate <= 0.0 {
        return cloud.clone();
    }
    let mut rng = rng::rng(rng::derive(frame_seed, "emi", 0));
    let mut out = cloud.clone();
    for p in &mut out.points {
        if rng.gen::<f64>() < rate {
            let jump = magnitude * (2.0 * rng.gen::<f64>() - 1.0);
            *p = with_range(p, p.range() + jump);
        }
    }
    // Spurious isolated returns on random rays.
    let g = cloud.geometry;
    let spurious = (rate * cloud.len() as f64 / 10.0).round() as usize;
    for _ in 0..spurious {
        let beam = rng.gen_range(0..g.beams.max(1));
        let az = g.azimuth(rng.gen_range(0..g.azimuth_bins.max(1)));
        let el = g.elevation(beam);
        let r = 1.0 + rng.gen::<f64>() * (g.max_range - 1.0).max(0.0);
        out.points.push(LidarPoint {
            x: r * el.cos() * az.cos(),
            y: r * el.cos() * az.sin(),
            z: r * el.sin(),
            intensity: rng.gen(),
            beam,
        });
    }
    out
}

/// Each interfering source paints a column of ghost returns, one per beam,
/// near a fixed bearing and range.
fn crosstalk(cloud: &PointCloud, sources: usize, range: f64, spread: f64, seed: u64, frame_seed: u64) -> PointCloud {
    if sources == 0 {
        return cloud.clone();
    }
    let g = cloud.geometry;
    let mut layout = rng::derived_rng(seed, "crosstalk", 0);
    let mut jitter = rng::rng(rng::derive(frame_seed, "crosstalk", 0));
    let mut out = cloud.clone();
    for _ in 0..sources {
        let bearing = layout.gen::<f64>() * std::f64::consts::TAU - std::f64::consts::PI;
        let r0 = range * (0.8 + 0.4 * layout.gen::<f64>());
        for beam in 0..g.beams {
            let el = g.elevation(beam);
            let az = bearing + spread * 0.1 * (2.0 * jitter.gen::<f64>() - 1.0);
            let r = (r0 + spread * (2.0 * jitter.gen::<f64>() - 1.0)).max(0.5);
            out.points.push(LidarPoint {
                x: r * el.cos() * az.cos(),
                y: r * el.cos() * az.sin(),
                z: r * el.sin(),
                intensity: 0.2 + 0.6 * jitter.gen::<f64>(),
                beam,
            });
        }
    }
    out
}

fn pollution(cloud: &PointCloud, sectors: usize, width: f64, seed: u64) -> PointCloud {
    if sectors == 0 {
        return cloud.clone();
    }
    let mut rng = rng::derived_rng(seed, "pollution", 0);
    let centers: Vec<f64> = (0..sectors)
        .map(|_| rng.gen::<f64>() * std::f64::consts::TAU - std::f64::consts::PI)
        .collect();
    PointCloud {
        geometry: cloud.geometry,
        points: cloud
            .points
            .iter()
            .filter(|p| {
                let a = p.azimuth();
                !centers
                    .iter()
                    .any(|&c| crate::geometry::wrap_angle(a - c).abs() <= width / 2.0)
            })
            .copied()
            .collect(),
    }
}

fn strong_light(cloud: &PointCloud, range_scale: f64, dropout: f64, frame_seed: u64) -> PointCloud {
    let cap = range_scale * cloud.geometry.max_range;
    let mut rng = rng::rng(rng::derive(frame_seed, "strong_light", 0));
    let points = cloud
        .points
        .iter()
        .filter(|p| {
            // Always draw so that the per-point stream does not depend on range_scale.
            let u = rng.gen::<f64>();
            (range_scale >= 1.0 || p.range() <= cap) && u >= dropout
        })
        .copied()
        .collect();
    PointCloud {
        geometry: cloud.geometry,
        points,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::faults::{fault_catalog, sample_instance};
    use crate::geometry::Mat3;
    use crate::sensor::ScanGeometry;

    pub(crate) fn random_cloud(n: usize, seed: u64) -> PointCloud {
        let g = ScanGeometry::default();
        let mut rng = rng::rng(seed);
        PointCloud {
            geometry: g,
            points: (0..n)
                .map(|_| LidarPoint {
                    x: rng.gen_range(-60.0..60.0),
                    y: rng.gen_range(-60.0..60.0),
                    z: rng.gen_range(-2.0..3.0),
                    intensity: rng.gen(),
                    beam: rng.gen_range(0..g.beams),
                })
                .collect(),
        }
    }

    fn inst(id: &str, values: &[(&str, f64)]) -> FaultInstance {
        let m = find_model(id).unwrap();
        let mut i = m.neutral_instance();
        for (n, v) in values {
            i.values[m.param_index(n).unwrap()] = *v;
        }
        i.noise_seed = 23;
        i
    }

    #[test]
    fn neutral_instances_are_identity() {
        let c = random_cloud(500, 1);
        let pose = MountPose::at([1.0, 0.0, 1.9]);
        for m in fault_catalog().iter().filter(|m| m.sensor == Sensor::Lidar) {
            let mut i = m.neutral_instance();
            i.noise_seed = 5;
            let (out, p) = apply_lidar_fault(&c, &pose, &i).unwrap();
            assert_eq!(out, c, "{}", m.id);
            assert_eq!(p, pose, "{}", m.id);
        }
    }

    #[test]
    fn drop_beams_filters_exactly() {
        let c = random_cloud(1000, 2);
        let lost: HashSet<u16> = [3, 7].into_iter().collect();
        let out = drop_beams(&c, &lost);
        let expect: Vec<_> = c.points.iter().filter(|p| p.beam != 3 && p.beam != 7).copied().collect();
        assert_eq!(out.points, expect);
    }

    #[test]
    fn beam_subsets_are_nested() {
        let a = beam_subset(32, 0.25, 9);
        let b = beam_subset(32, 0.5, 9);
        assert_eq!(a.len(), 8);
        assert!(a.is_subset(&b));
    }

    #[test]
    fn deflection_rotates_pose_only() {
        let c = random_cloud(100, 3);
        let pose = MountPose::at([1.0, 0.0, 1.9]);
        let i = inst("lidar.deflection", &[("xi", 0.02), ("eta", -0.05)]);
        let (out, p) = apply_lidar_fault(&c, &pose, &i).unwrap();
        assert_eq!(out, c);
        let r = Mat3::rot_y(-0.05).mul(&Mat3::rot_x(0.02));
        assert!(p.rotation.max_abs_diff(&r) < 1e-15);
        assert_eq!(p.translation, pose.translation);
    }

    #[test]
    fn displacement_offset_maps_values_and_translates_cloud() {
        let i = inst("lidar.displacement", &[("dx", 0.05), ("dz", 0.02)]);
        let off = displacement_offset(&i).unwrap();
        assert_eq!(off, MountOffset { dx: 0.05, dy: 0.0, dz: 0.02 });
        let c = random_cloud(50, 4);
        let moved = off.apply_to_cloud(&c);
        for (a, b) in c.points.iter().zip(&moved.points) {
            assert_eq!(b.x, a.x - 0.05);
            assert_eq!(b.y, a.y);
            assert_eq!(b.z, a.z - 0.02);
        }
    }

    #[test]
    fn sampled_faults_keep_finite_coordinates() {
        let c = random_cloud(400, 6);
        let pose = MountPose::at([1.0, 0.0, 1.9]);
        for m in fault_catalog().iter().filter(|m| m.sensor == Sensor::Lidar) {
            for seed in 0..4 {
                let i = sample_instance(m, seed);
                let (a, _) = apply_lidar_fault_at(&c, &pose, &i, 2).unwrap();
                assert!(a.is_valid(), "{}", m.id);
                assert_eq!(a, apply_lidar_fault_at(&c, &pose, &i, 2).unwrap().0);
            }
        }
    }

    #[test]
    fn strong_light_caps_range() {
        let c = random_cloud(500, 7);
        let out = corrupt_cloud(&c, &inst("lidar.strong_light", &[("range_scale", 0.5)]), 0).unwrap();
        assert!(out.points.iter().all(|p| p.range() <= 40.0));
        assert!(out.len() < c.len());
    }

    #[test]
    fn rejects_camera_models() {
        let c = random_cloud(5, 8);
        let i = find_model("camera.blur").unwrap().neutral_instance();
        assert!(matches!(
            apply_lidar_fault(&c, &MountPose::at([0.0; 3]), &i),
            Err(FadeError::SensorMismatch { .. })
        ));
    }
}
