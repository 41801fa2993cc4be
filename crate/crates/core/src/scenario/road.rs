use crate::geometry::{wrap_angle, Polyline, Vec2};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Topology {
    Highway,
    UrbanStreet,
    Intersection,
}

impl Topology {
    pub const ALL: [Topology; 3] = [Topology::Highway, Topology::UrbanStreet, Topology::Intersection];
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SegmentKind {
    Road,
    /// Square conflict area; traffic in any direction is allowed inside.
    Junction { half_width: f64 },
}

/// One directed road segment. Forward lanes lie to the right of the
/// centerline (negative lateral offset), backward lanes to the left.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoadSegment {
    pub id: usize,
    pub centerline: Polyline,
    pub lane_width: f64,
    pub lanes_forward: u8,
    pub lanes_backward: u8,
    pub shoulder: f64,
    pub v_max: f64,
    pub kind: SegmentKind,
}

impl RoadSegment {
    /// Lateral offset of a lane center. Forward lanes are numbered outward
    /// from the centerline starting at 0.
    pub fn lane_offset(&self, forward: bool, lane: u8) -> f64 {
        let o = (f64::from(lane) + 0.5) * self.lane_width;
        if forward {
            -o
        } else {
            o
        }
    }

    /// Lateral offset of the middle of the right (forward-side) shoulder.
    pub fn shoulder_offset(&self, forward: bool) -> f64 {
        let lanes = if forward { self.lanes_forward } else { self.lanes_backward };
        let o = f64::from(lanes) * self.lane_width + self.shoulder / 2.0;
        if forward {
            -o
        } else {
            o
        }
    }

    pub fn right_edge(&self) -> f64 {
        f64::from(self.lanes_forward) * self.lane_width + self.shoulder
    }

    pub fn left_edge(&self) -> f64 {
        f64::from(self.lanes_backward) * self.lane_width + if self.lanes_backward > 0 { self.shoulder } else { 0.0 }
    }

    pub fn contains(&self, p: Vec2) -> bool {
        match self.kind {
            SegmentKind::Junction { half_width } => {
                let c = self.centerline.sample(self.centerline.length() / 2.0).0;
                (p.x - c.x).abs() <= half_width + 1e-9 && (p.y - c.y).abs() <= half_width + 1e-9
            }
            SegmentKind::Road => {
                let pr = self.centerline.project(p);
                pr.station >= -1e-9
                    && pr.station <= self.centerline.length() + 1e-9
                    && pr.lateral <= self.left_edge() + 1e-9
                    && -pr.lateral <= self.right_edge() + 1e-9
            }
        }
    }

    /// Whether travelling with `heading` at `p` agrees with the lane direction
    /// within `tol` radians. Always true in junctions.
    pub fn direction_ok(&self, p: Vec2, heading: f64, tol: f64) -> bool {
        match self.kind {
            SegmentKind::Junction { .. } => true,
            SegmentKind::Road => {
                let pr = self.centerline.project(p);
                let lane_heading = if pr.lateral > 0.0 && self.lanes_backward > 0 {
                    wrap_angle(pr.heading + std::f64::consts::PI)
                } else {
                    pr.heading
                };
                wrap_angle(heading - lane_heading).abs() <= tol
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignalPhase {
    Green,
    Yellow,
    Red,
}

/// Which approach pair a stop line belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Approach {
    NorthSouth,
    EastWest,
}

/// Fixed-cycle two-phase signal. The north-south approach runs
/// green/yellow/red; east-west gets green and yellow inside the north-south red.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Signal {
    pub green: f64,
    pub yellow: f64,
    pub red: f64,
    pub offset: f64,
    /// Lamp housing position (x, y, z) in world coordinates.
    pub lamp: [f64; 3],
}

impl Signal {
    pub fn cycle(&self) -> f64 {
        self.green + self.yellow + self.red
    }

    pub fn phase(&self, approach: Approach, t: f64) -> SignalPhase {
        let c = (t + self.offset).rem_euclid(self.cycle());
        match approach {
            Approach::NorthSouth => {
                if c < self.green {
                    SignalPhase::Green
                } else if c < self.green + self.yellow {
                    SignalPhase::Yellow
                } else {
                    SignalPhase::Red
                }
            }
            Approach::EastWest => {
                let r = c - self.green - self.yellow;
                let ew_yellow = self.yellow.min(self.red);
                let ew_green = self.red - ew_yellow;
                if r < 0.0 {
                    SignalPhase::Red
                } else if r < ew_green {
                    SignalPhase::Green
                } else {
                    SignalPhase::Yellow
                }
            }
        }
    }
}

/// Stop line crossed by traffic moving along `heading`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StopLine {
    pub approach: Approach,
    pub point: Vec2,
    pub heading: f64,
    /// Half-length of the line across the travel direction.
    pub half_width: f64,
}

impl StopLine {
    /// Signed distance along the travel direction from `p` to the line
    /// (positive while the line is still ahead).
    pub fn distance_ahead(&self, p: Vec2) -> f64 {
        (self.point - p).dot(Vec2::from_angle(self.heading))
    }

    pub fn covers(&self, p: Vec2) -> bool {
        let n = Vec2::from_angle(self.heading).perp();
        (p - self.point).dot(n).abs() <= self.half_width
    }

    /// True when moving from `a` to `b` crosses the line in its direction.
    pub fn crossed(&self, a: Vec2, b: Vec2) -> bool {
        self.distance_ahead(a) > 0.0 && self.distance_ahead(b) <= 0.0 && (self.covers(a) || self.covers(b))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoadMap {
    pub topology: Topology,
    pub segments: Vec<RoadSegment>,
    /// Directed (from, to) links; `to` starts where `from` ends, or `to` is a
    /// junction whose boundary holds the end of `from`.
    pub connections: Vec<(usize, usize)>,
    pub signal: Option<Signal>,
    pub stop_lines: Vec<StopLine>,
}

impl RoadMap {
    /// The segment containing `p`, preferring junctions where areas overlap.
    pub fn segment_at(&self, p: Vec2) -> Option<&RoadSegment> {
        let mut road = None;
        for s in &self.segments {
            if s.contains(p) {
                if matches!(s.kind, SegmentKind::Junction { .. }) {
                    return Some(s);
                }
                road = road.or(Some(s));
            }
        }
        road
    }

    pub fn phase(&self, approach: Approach, t: f64) -> Option<SignalPhase> {
        self.signal.as_ref().map(|s| s.phase(approach, t))
    }

    pub fn check_connectivity(&self) -> Result<(), String> {
        for &(a, b) in &self.connections {
            let (sa, sb) = match (self.segments.get(a), self.segments.get(b)) {
                (Some(x), Some(y)) => (x, y),
                _ => return Err(format!("connection ({a}, {b}) references a missing segment")),
            };
            let end = sa.centerline.end();
            let ok = match (sa.kind, sb.kind) {
                (_, SegmentKind::Junction { .. }) => sb.contains(end),
                (SegmentKind::Junction { .. }, _) => sa.contains(sb.centerline.start()),
                _ => end.distance(sb.centerline.start()) <= 1e-6,
            };
            if !ok {
                return Err(format!("segment {a} does not connect to segment {b}"));
            }
        }
        if self.segments.iter().any(|s| !(s.v_max > 0.0)) {
            return Err("segment with non-positive speed limit".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn signal() -> Signal {
        Signal {
            green: 15.0,
            yellow: 3.0,
            red: 12.0,
            offset: 0.0,
            lamp: [0.0; 3],
        }
    }

    #[test]
    fn phase_schedule() {
        let s = signal();
        assert_eq!(s.phase(Approach::NorthSouth, 0.0), SignalPhase::Green);
        assert_eq!(s.phase(Approach::NorthSouth, 16.0), SignalPhase::Yellow);
        assert_eq!(s.phase(Approach::NorthSouth, 20.0), SignalPhase::Red);
        assert_eq!(s.phase(Approach::NorthSouth, 31.0), SignalPhase::Green);
        assert_eq!(s.phase(Approach::EastWest, 5.0), SignalPhase::Red);
        assert_eq!(s.phase(Approach::EastWest, 19.0), SignalPhase::Green);
        assert_eq!(s.phase(Approach::EastWest, 28.5), SignalPhase::Yellow);
    }

    #[test]
    fn conflicting_greens_never_overlap() {
        let s = Signal { offset: 7.3, ..signal() };
        for i in 0..600 {
            let t = i as f64 * 0.1;
            let ns = s.phase(Approach::NorthSouth, t);
            let ew = s.phase(Approach::EastWest, t);
            assert!(ns == SignalPhase::Red || ew == SignalPhase::Red, "t={t}");
        }
    }

    #[test]
    fn lanes_and_direction() {
        let seg = RoadSegment {
            id: 0,
            centerline: Polyline::new(vec![Vec2::new(0.0, 0.0), Vec2::new(100.0, 0.0)]),
            lane_width: 3.5,
            lanes_forward: 1,
            lanes_backward: 1,
            shoulder: 2.0,
            v_max: 12.0,
            kind: SegmentKind::Road,
        };
        assert!(seg.contains(Vec2::new(50.0, -5.4)));
        assert!(!seg.contains(Vec2::new(50.0, -5.6)));
        assert!(seg.direction_ok(Vec2::new(10.0, -1.75), 0.1, 0.6));
        assert!(!seg.direction_ok(Vec2::new(10.0, -1.75), std::f64::consts::PI, 0.6));
        assert!(seg.direction_ok(Vec2::new(10.0, 1.75), std::f64::consts::PI, 0.6));
    }

    #[test]
    fn stop_line_crossing() {
        let l = StopLine {
            approach: Approach::NorthSouth,
            point: Vec2::new(1.75, 99.0),
            heading: std::f64::consts::FRAC_PI_2,
            half_width: 1.75,
        };
        assert!(l.crossed(Vec2::new(1.75, 98.5), Vec2::new(1.75, 99.2)));
        assert!(!l.crossed(Vec2::new(1.75, 99.2), Vec2::new(1.75, 100.0)));
        assert!(!l.crossed(Vec2::new(-1.75, 98.5), Vec2::new(-1.75, 99.2)));
    }
}
