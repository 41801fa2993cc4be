//! Ray-cast LiDAR over a flat ground plane and actor boxes.

use super::rig::LidarConfig;
use super::world::{ActorState, World};
use crate::geometry::{MountPose, Vec2};
use crate::scenario::ActorKind;
use crate::sensor::{LidarPoint, PointCloud, ScanGeometry};

const INTENSITY_GROUND: f64 = 0.2;
const INTENSITY_VEHICLE: f64 = 0.6;
const INTENSITY_PEDESTRIAN: f64 = 0.4;

/// Scanner bound to one (possibly perturbed) mount pose. Ray directions are
/// precomputed in both the sensor and the vehicle frame.
#[derive(Debug, Clone)]
pub struct Scanner {
    geometry: ScanGeometry,
    pose: MountPose,
    sensor_dirs: Vec<[f64; 3]>,
    vehicle_dirs: Vec<[f64; 3]>,
    /// Ground range per ray (infinite when the ray misses the ground).
    ground_hits: Vec<(f64, f64)>,
}

impl Scanner {
    pub fn new(cfg: &LidarConfig, pose: MountPose) -> Self {
        let g = cfg.geometry;
        let mut sensor_dirs = Vec::with_capacity(g.beams as usize * g.azimuth_bins as usize);
        for b in 0..g.beams {
            let el = g.elevation(b);
            for k in 0..g.azimuth_bins {
                let az = g.azimuth(k);
                sensor_dirs.push([el.cos() * az.cos(), el.cos() * az.sin(), el.sin()]);
            }
        }
        let vehicle_dirs: Vec<[f64; 3]> = sensor_dirs.iter().map(|d| pose.rotation.apply(*d)).collect();
        let o = pose.translation;
        let ground_hits = vehicle_dirs
            .iter()
            .map(|d| {
                let t = if cfg.ground_returns && o[2] > 0.0 && d[2] < -1e-9 { -o[2] / d[2] } else { f64::INFINITY };
                (if t <= g.max_range { t } else { f64::INFINITY }, INTENSITY_GROUND)
            })
            .collect();
        Self { geometry: g, pose, sensor_dirs, vehicle_dirs, ground_hits }
    }

    pub fn pose(&self) -> &MountPose {
        &self.pose
    }

    pub fn scan(&self, world: &World) -> PointCloud {
        let g = self.geometry;
        let bins = g.azimuth_bins as usize;
        let o = self.pose.translation;
        let mut hit = self.ground_hits.clone();
        let ego = &world.ego;
        for a in &world.actors {
            let local = to_vehicle_frame(ego, a);
            let Some((k0, k1)) = self.bin_span(&local) else { continue };
            let intensity = match a.kind {
                ActorKind::Vehicle => INTENSITY_VEHICLE,
                ActorKind::Pedestrian => INTENSITY_PEDESTRIAN,
            };
            for b in 0..g.beams as usize {
                for kk in k0..=k1 {
                    let i = b * bins + kk.rem_euclid(bins as i64) as usize;
                    if let Some(t) = local.ray(o, self.vehicle_dirs[i]) {
                        if t < hit[i].0 && t <= g.max_range {
                            hit[i] = (t, intensity);
                        }
                    }
                }
            }
        }
        let mut points = Vec::with_capacity(hit.len());
        for (i, &(t, intensity)) in hit.iter().enumerate() {
            if t.is_finite() {
                let d = self.sensor_dirs[i];
                points.push(LidarPoint {
                    x: d[0] * t,
                    y: d[1] * t,
                    z: d[2] * t,
                    intensity,
                    beam: (i / bins) as u16,
                });
            }
        }
        PointCloud { geometry: g, points }
    }

    /// Azimuth bins (possibly wrapping, unnormalized) that can see the box.
    fn bin_span(&self, b: &LocalBox) -> Option<(i64, i64)> {
        let g = self.geometry;
        let mut az = Vec::with_capacity(8);
        let mut min_range = f64::INFINITY;
        for c in b.corners() {
            for z in [0.0, b.height] {
                let s = self.pose.to_sensor([c.x, c.y, z]);
                min_range = min_range.min((s[0] * s[0] + s[1] * s[1]).sqrt());
                az.push(s[1].atan2(s[0]));
            }
        }
        let cs = self.pose.to_sensor([b.center.x, b.center.y, b.height / 2.0]);
        if (cs[0] * cs[0] + cs[1] * cs[1]).sqrt() - b.radius() > g.max_range {
            return None;
        }
        if b.contains(Vec2::new(self.pose.translation[0], self.pose.translation[1])) || min_range < 1e-6 {
            return Some((0, g.azimuth_bins as i64 - 1));
        }
        let mid = cs[1].atan2(cs[0]);
        let rel = az.iter().map(|a| crate::geometry::wrap_angle(a - mid));
        let (lo, hi) = rel.fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), r| (l.min(r), h.max(r)));
        let step = g.azimuth_step();
        let to_bin = |a: f64| ((a + std::f64::consts::PI) / step - 0.5).floor() as i64;
        let k0 = to_bin(mid + lo);
        let k1 = to_bin(mid + hi) + 1;
        Some((k0, k1.min(k0 + g.azimuth_bins as i64 - 1)))
    }
}

/// Actor box expressed in the ego vehicle frame.
struct LocalBox {
    center: Vec2,
    heading: f64,
    half_len: f64,
    half_wid: f64,
    height: f64,
}

impl LocalBox {
    fn corners(&self) -> [Vec2; 4] {
        let d = Vec2::from_angle(self.heading);
        let n = d.perp();
        let (l, w) = (d * self.half_len, n * self.half_wid);
        [self.center + l + w, self.center + l - w, self.center - l - w, self.center - l + w]
    }

    fn radius(&self) -> f64 {
        (self.half_len.powi(2) + self.half_wid.powi(2) + self.height.powi(2)).sqrt()
    }

    fn contains(&self, p: Vec2) -> bool {
        let r = (p - self.center).rotate(-self.heading);
        r.x.abs() <= self.half_len && r.y.abs() <= self.half_wid
    }

    /// Slab test; distance along the unit direction `d` from `o`.
    fn ray(&self, o: [f64; 3], d: [f64; 3]) -> Option<f64> {
        let (s, c) = self.heading.sin_cos();
        let (ox, oy) = (o[0] - self.center.x, o[1] - self.center.y);
        let lo = [c * ox + s * oy, -s * ox + c * oy, o[2]];
        let ld = [c * d[0] + s * d[1], -s * d[0] + c * d[1], d[2]];
        let bounds = [(-self.half_len, self.half_len), (-self.half_wid, self.half_wid), (0.0, self.height)];
        let (mut t0, mut t1) = (0.0_f64, f64::INFINITY);
        for k in 0..3 {
            if ld[k].abs() < 1e-12 {
                if lo[k] < bounds[k].0 || lo[k] > bounds[k].1 {
                    return None;
                }
            } else {
                let a = (bounds[k].0 - lo[k]) / ld[k];
                let b = (bounds[k].1 - lo[k]) / ld[k];
                t0 = t0.max(a.min(b));
                t1 = t1.min(a.max(b));
                if t0 > t1 {
                    return None;
                }
            }
        }
        (t0 > 0.0).then_some(t0)
    }
}

fn to_vehicle_frame(ego: &ActorState, a: &ActorState) -> LocalBox {
    LocalBox {
        center: (a.position - ego.position).rotate(-ego.heading),
        heading: a.heading - ego.heading,
        half_len: a.dims.length / 2.0,
        half_wid: a.dims.width / 2.0,
        height: a.dims.height,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::obstacle_ahead;
    use crate::sim::rig::SensorRig;

    fn world_with_box_at(distance: f64) -> World {
        let mut s = obstacle_ahead(0);
        s.participants.truncate(1);
        let mut w = World::new(&s);
        let ego = w.ego;
        w.actors[0].position = ego.position + Vec2::from_angle(ego.heading) * distance;
        w.actors[0].heading = ego.heading;
        w
    }

    #[test]
    fn box_returns_within_sensor_range() {
        let rig = SensorRig::default();
        let mut cfg = rig.lidar;
        cfg.ground_returns = false;
        let sc = Scanner::new(&cfg, cfg.mount);
        let cloud = sc.scan(&world_with_box_at(20.0));
        assert!(!cloud.is_empty());
        assert!(cloud.is_valid());
        // Rear face at 20 - 2.25 m from the ego center, sensor 1 m forward.
        for p in &cloud.points {
            let v = cfg.mount.to_vehicle([p.x, p.y, p.z]);
            assert!((v[0] - 17.75).abs() < 1e-6 || v[0] > 17.75, "{v:?}");
            assert!(v[2] >= -1e-9 && v[2] <= 1.5 + 1e-9);
        }
    }

    #[test]
    fn empty_world_without_ground_is_empty() {
        let mut s = obstacle_ahead(0);
        s.participants.clear();
        let w = World::new(&s);
        let mut cfg = SensorRig::default().lidar;
        cfg.ground_returns = false;
        assert!(Scanner::new(&cfg, cfg.mount).scan(&w).is_empty());
    }

    #[test]
    fn ground_points_lie_on_the_road_plane() {
        let mut s = obstacle_ahead(0);
        s.participants.clear();
        let w = World::new(&s);
        let cfg = SensorRig::default().lidar;
        let cloud = Scanner::new(&cfg, cfg.mount).scan(&w);
        assert!(cloud.len() > 1000);
        for p in &cloud.points {
            let v = cfg.mount.to_vehicle([p.x, p.y, p.z]);
            assert!(v[2].abs() < 1e-9);
        }
    }

    #[test]
    fn wrapping_span_behind_the_sensor() {
        let cfg = SensorRig::default().lidar;
        let sc = Scanner::new(&cfg, cfg.mount);
        let w = world_with_box_at(-15.0);
        let cloud = sc.scan(&w);
        assert!(cloud.points.iter().any(|p| p.intensity == INTENSITY_VEHICLE));
    }
}
