//! World-frame nearest-neighbour tracker with three-frame confirmation and
//! constant-velocity coasting.

use super::{Detection, ObjectClass, Odometry};
use crate::geometry::Vec2;

pub const CONFIRM_HITS: u32 = 3;
pub const MAX_MISSES: u32 = 3;
pub const GATE: f64 = 2.0;
/// Hits after which the velocity estimate is trusted for prediction.
pub const SETTLED_HITS: u32 = 5;
const VELOCITY_GAIN: f64 = 0.5;
const MAX_SPEED: f64 = 30.0;

#[derive(Debug, Clone, PartialEq)]
pub struct Track {
    pub id: u64,
    pub class: ObjectClass,
    pub position: Vec2,
    pub velocity: Vec2,
    pub extent: (f64, f64),
    pub confidence: f64,
    pub hits: u32,
    pub misses: u32,
}

impl Track {
    pub fn confirmed(&self) -> bool {
        self.hits >= CONFIRM_HITS
    }
}

#[derive(Debug, Clone, Default)]
pub struct Tracker {
    tracks: Vec<Track>,
    next_id: u64,
}

fn to_world(odo: &Odometry, p: Vec2) -> Vec2 {
    odo.position + p.rotate(odo.heading)
}

impl Tracker {
    pub fn reset(&mut self) {
        self.tracks.clear();
        self.next_id = 0;
    }

    pub fn tracks(&self) -> &[Track] {
        &self.tracks
    }

    pub fn confirmed(&self) -> impl Iterator<Item = &Track> {
        self.tracks.iter().filter(|t| t.confirmed())
    }

    /// Detections are in the vehicle frame; those without range are ignored.
    pub fn update(&mut self, dets: &[Detection], odo: &Odometry, dt: f64) {
        let obs: Vec<(Vec2, &Detection)> = dets.iter().filter_map(|d| d.position.map(|p| (to_world(odo, p), d))).collect();
        let predicted: Vec<Vec2> = self.tracks.iter().map(|t| t.position + t.velocity * dt).collect();
        let mut pairs = Vec::new();
        for (ti, p) in predicted.iter().enumerate() {
            for (oi, (q, _)) in obs.iter().enumerate() {
                let d = p.distance(*q);
                if d <= GATE {
                    pairs.push((d, ti, oi));
                }
            }
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut t_used = vec![false; self.tracks.len()];
        let mut o_used = vec![false; obs.len()];
        for (_, ti, oi) in pairs {
            if t_used[ti] || o_used[oi] {
                continue;
            }
            t_used[ti] = true;
            o_used[oi] = true;
            let (q, d) = obs[oi];
            let t = &mut self.tracks[ti];
            let measured = (q - t.position) * (1.0 / dt);
            let v = if t.hits == 1 { measured } else { t.velocity * (1.0 - VELOCITY_GAIN) + measured * VELOCITY_GAIN };
            t.velocity = if v.norm() > MAX_SPEED { v.normalized() * MAX_SPEED } else { v };
            t.position = q;
            t.extent = d.extent;
            t.confidence = d.confidence;
            if d.class != ObjectClass::Unknown {
                t.class = d.class;
            }
            t.hits += 1;
            t.misses = 0;
        }
        for (ti, used) in t_used.iter().enumerate() {
            if !used {
                let t = &mut self.tracks[ti];
                t.misses += 1;
                t.position = predicted[ti];
            }
        }
        self.tracks.retain(|t| t.misses <= MAX_MISSES);
        for (oi, (q, d)) in obs.iter().enumerate() {
            if !o_used[oi] {
                self.tracks.push(Track {
                    id: self.next_id,
                    class: d.class,
                    position: *q,
                    velocity: Vec2::ZERO,
                    extent: d.extent,
                    confidence: d.confidence,
                    hits: 1,
                    misses: 0,
                });
                self.next_id += 1;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ads::Source;

    fn det(x: f64) -> Detection {
        Detection {
            source: Source::Lidar,
            class: ObjectClass::Unknown,
            bearing: 0.0,
            angular_half_width: 0.0,
            position: Some(Vec2::new(x, 0.0)),
            extent: (4.0, 2.0),
            confidence: 1.0,
        }
    }

    #[test]
    fn confirmation_and_coasting() {
        let odo = Odometry { position: Vec2::ZERO, heading: 0.0, speed: 0.0, steer: 0.0 };
        let mut t = Tracker::default();
        for k in 0..3 {
            assert_eq!(t.confirmed().count(), 0);
            t.update(&[det(20.0 + k as f64)], &odo, 0.1);
        }
        assert_eq!(t.confirmed().count(), 1);
        let v = t.tracks()[0].velocity.x;
        assert!(v > 0.0);
        for _ in 0..MAX_MISSES {
            t.update(&[], &odo, 0.1);
            assert_eq!(t.tracks().len(), 1);
        }
        t.update(&[], &odo, 0.1);
        assert!(t.tracks().is_empty());
    }
}
