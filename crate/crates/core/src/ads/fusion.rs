//! Late fusion by bearing association between camera components and
//! LiDAR clusters.

use super::{Detection, ObjectClass, Source};
use crate::geometry::Vec2;

pub const BEARING_GATE: f64 = 3.0 * std::f64::consts::PI / 180.0;
/// Unmatched camera objects above this confidence are kept (monocular range).
pub const CAMERA_ONLY_MIN_CONF: f64 = 0.8;

/// Angular distance from `bearing` to a camera object's angular interval.
fn angular_gap(cam: &Detection, bearing: f64) -> f64 {
    let d = crate::geometry::wrap_angle(bearing - cam.bearing).abs();
    (d - cam.angular_half_width).max(0.0)
}

/// `camera_origin` is the camera position in the vehicle frame.
pub fn fuse(camera: &[Detection], lidar: &[Detection], camera_origin: Vec2) -> Vec<Detection> {
    let mut pairs = Vec::new();
    for (i, c) in camera.iter().enumerate() {
        for (j, l) in lidar.iter().enumerate() {
            let Some(p) = l.position else { continue };
            let rel = p - camera_origin;
            if rel.x <= 0.0 {
                continue;
            }
            let gap = angular_gap(c, rel.y.atan2(rel.x));
            if gap <= BEARING_GATE {
                let centered = crate::geometry::wrap_angle(rel.y.atan2(rel.x) - c.bearing).abs();
                pairs.push((gap, centered, i, j));
            }
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let mut cam_used = vec![false; camera.len()];
    let mut lid_used = vec![false; lidar.len()];
    let mut out = Vec::new();
    for (_, _, i, j) in pairs {
        if cam_used[i] || lid_used[j] {
            continue;
        }
        cam_used[i] = true;
        lid_used[j] = true;
        let (c, l) = (&camera[i], &lidar[j]);
        out.push(Detection {
            source: Source::Fused,
            class: c.class,
            confidence: 1.0 - (1.0 - c.confidence) * (1.0 - l.confidence),
            ..*l
        });
    }
    for (j, l) in lidar.iter().enumerate() {
        if !lid_used[j] {
            out.push(Detection { class: ObjectClass::Unknown, ..*l });
        }
    }
    for (i, c) in camera.iter().enumerate() {
        if !cam_used[i] && c.confidence > CAMERA_ONLY_MIN_CONF && c.position.is_some() {
            out.push(*c);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn det(source: Source, bearing: f64, position: Option<Vec2>, conf: f64) -> Detection {
        Detection {
            source,
            class: if source == Source::Camera { ObjectClass::Vehicle } else { ObjectClass::Unknown },
            bearing,
            angular_half_width: 0.0,
            position,
            extent: (4.5, 1.8),
            confidence: conf,
        }
    }

    #[test]
    fn matched_pair_combines_confidence() {
        let cam = [det(Source::Camera, 0.0, None, 0.6)];
        let lid = [det(Source::Lidar, 0.0, Some(Vec2::new(20.0, 0.5)), 0.5)];
        let f = fuse(&cam, &lid, Vec2::new(1.5, 0.0));
        assert_eq!(f.len(), 1);
        assert_eq!(f[0].source, Source::Fused);
        assert_eq!(f[0].class, ObjectClass::Vehicle);
        assert!((f[0].confidence - 0.8).abs() < 1e-12);
    }

    #[test]
    fn outside_gate_stays_separate() {
        let cam = [det(Source::Camera, 0.3, Some(Vec2::new(10.0, 3.0)), 0.9)];
        let lid = [det(Source::Lidar, 0.0, Some(Vec2::new(20.0, 0.0)), 0.5)];
        let f = fuse(&cam, &lid, Vec2::new(1.5, 0.0));
        assert_eq!(f.len(), 2);
    }

    #[test]
    fn weak_camera_only_dropped() {
        let cam = [det(Source::Camera, 0.3, Some(Vec2::new(10.0, 3.0)), 0.5)];
        assert!(fuse(&cam, &[], Vec2::new(1.5, 0.0)).is_empty());
    }
}
