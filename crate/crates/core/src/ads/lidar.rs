//! LiDAR perception: fixed-height ground removal in the nominal vehicle
//! frame, then Euclidean clustering on a grid.

use super::{Detection, ObjectClass, Source};
use crate::geometry::{MountPose, Vec2};
use crate::sensor::PointCloud;
use std::collections::HashMap;

pub const GROUND_Z: f64 = 0.3;
pub const CEILING_Z: f64 = 3.0;
pub const CLUSTER_RADIUS: f64 = 0.8;
pub const MIN_POINTS: usize = 5;
/// Clusters larger than this are split into tiles.
const MAX_EXTENT: f64 = 10.0;
const TILE: f64 = 4.0;

/// Obstacle points in the vehicle frame (x, y), assuming the nominal mount.
pub fn obstacle_points(cloud: &PointCloud, mount: &MountPose) -> Vec<Vec2> {
    cloud
        .points
        .iter()
        .filter_map(|p| {
            let v = mount.to_vehicle([p.x, p.y, p.z]);
            let inside_ego = v[0].abs() < 2.5 && v[1].abs() < 1.1;
            (v[2] >= GROUND_Z && v[2] <= CEILING_Z && !inside_ego).then(|| Vec2::new(v[0], v[1]))
        })
        .collect()
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

/// Points are binned into `CELL` squares first; cells whose centroids lie
/// within `CLUSTER_RADIUS` are linked (single linkage).
const CELL: f64 = 0.4;

/// Clusters as point index lists.
pub fn cluster(points: &[Vec2]) -> Vec<Vec<usize>> {
    let key = |p: Vec2| ((p.x / CELL).floor() as i64, (p.y / CELL).floor() as i64);
    let mut index: HashMap<(i64, i64), usize> = HashMap::new();
    let mut cells: Vec<((i64, i64), Vec2, Vec<usize>)> = Vec::new();
    for (i, &p) in points.iter().enumerate() {
        let k = key(p);
        let c = *index.entry(k).or_insert_with(|| {
            cells.push((k, Vec2::ZERO, Vec::new()));
            cells.len() - 1
        });
        cells[c].1 = cells[c].1 + p;
        cells[c].2.push(i);
    }
    let centroids: Vec<Vec2> = cells.iter().map(|c| c.1 * (1.0 / c.2.len() as f64)).collect();
    let mut parent: Vec<usize> = (0..cells.len()).collect();
    let reach = (CLUSTER_RADIUS / CELL).ceil() as i64 + 1;
    let r2 = CLUSTER_RADIUS * CLUSTER_RADIUS;
    for (i, c) in cells.iter().enumerate() {
        let (kx, ky) = c.0;
        for dx in -reach..=reach {
            for dy in -reach..=reach {
                let Some(&j) = index.get(&(kx + dx, ky + dy)) else { continue };
                if j <= i {
                    continue;
                }
                let d = centroids[j] - centroids[i];
                if d.dot(d) <= r2 {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                    if a != b {
                        parent[a] = b;
                    }
                }
            }
        }
    }
    let mut groups: HashMap<usize, Vec<usize>> = HashMap::new();
    for (i, c) in cells.iter().enumerate() {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().extend_from_slice(&c.2);
    }
    let mut out: Vec<Vec<usize>> = groups.into_values().collect();
    for g in &mut out {
        g.sort_unstable();
    }
    out.sort_by_key(|g| g[0]);
    out
}

/// Point count expected from a car-sized target at `range`.
fn expected_points(cloud: &PointCloud, range: f64) -> f64 {
    let g = cloud.geometry;
    let r = range.max(1.0);
    let cols = 1.8 / r / g.azimuth_step();
    let rows = if g.elevation_step() > 0.0 { (1.5 / r / g.elevation_step()).min(f64::from(g.beams)) } else { 1.0 };
    (cols * rows).max(MIN_POINTS as f64)
}

fn detection(points: &[Vec2], idx: &[usize], cloud: &PointCloud, mount: &MountPose) -> Detection {
    let (mut lo, mut hi) = (Vec2::new(f64::INFINITY, f64::INFINITY), Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY));
    for &i in idx {
        let p = points[i];
        lo = Vec2::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Vec2::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    let center = (lo + hi) * 0.5;
    let origin = Vec2::new(mount.translation[0], mount.translation[1]);
    let rel = center - origin;
    let range = rel.norm();
    let extent = (hi.x - lo.x, hi.y - lo.y);
    Detection {
        source: Source::Lidar,
        class: ObjectClass::Unknown,
        bearing: rel.y.atan2(rel.x),
        angular_half_width: (extent.0.hypot(extent.1) / 2.0 / range.max(0.5)).atan(),
        position: Some(center),
        extent,
        confidence: (idx.len() as f64 / expected_points(cloud, range)).clamp(0.0, 1.0),
    }
}

pub fn perceive_lidar(cloud: &PointCloud, mount: &MountPose) -> Vec<Detection> {
    let points = obstacle_points(cloud, mount);
    let mut out = Vec::new();
    for group in cluster(&points) {
        if group.len() < MIN_POINTS {
            continue;
        }
        let (mut lo, mut hi) = (Vec2::new(f64::INFINITY, f64::INFINITY), Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY));
        for &i in &group {
            lo = Vec2::new(lo.x.min(points[i].x), lo.y.min(points[i].y));
            hi = Vec2::new(hi.x.max(points[i].x), hi.y.max(points[i].y));
        }
        if hi.x - lo.x <= MAX_EXTENT && hi.y - lo.y <= MAX_EXTENT {
            out.push(detection(&points, &group, cloud, mount));
            continue;
        }
        let mut tiles: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
        for &i in &group {
            let p = points[i];
            tiles.entry(((p.x / TILE).floor() as i64, (p.y / TILE).floor() as i64)).or_default().push(i);
        }
        let mut tiles: Vec<_> = tiles.into_iter().collect();
        tiles.sort_by_key(|t| t.0);
        for (_, idx) in tiles {
            if idx.len() >= MIN_POINTS {
                out.push(detection(&points, &idx, cloud, mount));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::obstacle_ahead;
    use crate::sim::{Scanner, SensorRig, World};

    fn scene(distance: f64) -> (PointCloud, MountPose) {
        let mut s = obstacle_ahead(0);
        s.participants.truncate(1);
        let mut w = World::new(&s);
        let ego = w.ego;
        w.actors[0].position = ego.position + crate::geometry::Vec2::from_angle(ego.heading) * distance;
        w.actors[0].heading = ego.heading;
        let cfg = SensorRig::default().lidar;
        (Scanner::new(&cfg, cfg.mount).scan(&w), cfg.mount)
    }

    #[test]
    fn single_box_gives_one_detection() {
        let (cloud, mount) = scene(20.0);
        let d = perceive_lidar(&cloud, &mount);
        assert_eq!(d.len(), 1, "{d:?}");
        let p = d[0].position.unwrap();
        assert!((p.y).abs() < 0.3);
        assert!(p.x > 17.0 && p.x < 20.5);
    }

    #[test]
    fn beam_loss_never_raises_confidence() {
        let (cloud, mount) = scene(20.0);
        let clean = perceive_lidar(&cloud, &mount)[0].confidence;
        let m = crate::faults::find_model("lidar.beam_loss").unwrap();
        let mut inst = m.neutral_instance();
        inst.values[m.param_index("fraction").unwrap()] = 0.5;
        let lost = crate::faults::lidar::corrupt_cloud(&cloud, &inst, 0).unwrap();
        let after = perceive_lidar(&lost, &mount);
        assert!(after.iter().all(|d| d.confidence <= clean + 1e-12));
    }

    #[test]
    fn clusters_split_at_radius() {
        let pts = vec![Vec2::new(0.0, 0.0), Vec2::new(0.7, 0.0), Vec2::new(1.6, 0.0)];
        let c = cluster(&pts);
        assert_eq!(c.len(), 2);
    }
}
