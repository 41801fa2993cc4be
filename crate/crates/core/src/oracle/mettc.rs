//! Minimal estimated time to collision over a trace.
//!
//! Each step is decomposed along the road-aligned longitudinal and lateral
//! axes under the ego. On each axis the relative centre offset follows the
//! recorded relative velocity and acceleration; the boxes' projections
//! overlap while that offset stays within the summed half extents. The
//! estimate is the first time at which both axes overlap.

use crate::geometry::Vec2;
use crate::sim::{ActorRecord, Trace, TraceStep};

/// Upper bound on reported values, in seconds.
pub const T_CAP: f64 = 20.0;
/// Relative speeds below this are treated as zero.
pub const EPS_V: f64 = 1e-3;
/// Relative accelerations below this are treated as zero.
pub const EPS_A: f64 = 1e-3;

/// Relative motion of two projected intervals along one axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisMotion {
    /// Centre offset (other minus ego).
    pub offset: f64,
    pub dv: f64,
    pub da: f64,
    /// Sum of both half extents.
    pub reach: f64,
}

impl AxisMotion {
    pub fn offset_at(&self, t: f64) -> f64 {
        let da = if self.da.abs() < EPS_A { 0.0 } else { self.da };
        let dv = if self.dv.abs() < EPS_V { 0.0 } else { self.dv };
        self.offset + dv * t + 0.5 * da * t * t
    }

    pub fn overlaps_at(&self, t: f64) -> bool {
        self.offset_at(t).abs() <= self.reach
    }

    /// Times in `(0, T_CAP)` where the offset crosses `±reach`.
    fn crossings(&self, out: &mut Vec<f64>) {
        let da = if self.da.abs() < EPS_A { 0.0 } else { self.da };
        let dv = if self.dv.abs() < EPS_V { 0.0 } else { self.dv };
        for target in [self.reach, -self.reach] {
            let c = self.offset - target;
            if da == 0.0 {
                if dv != 0.0 {
                    out.push(-c / dv);
                }
                continue;
            }
            let disc = dv * dv - 2.0 * da * c;
            if disc < 0.0 {
                continue;
            }
            let r = disc.sqrt();
            // Stable pair of roots of da/2·t² + dv·t + c.
            let q = -0.5 * (dv + if dv >= 0.0 { r } else { -r });
            if q != 0.0 {
                out.push(q / (0.5 * da));
                out.push(c / q);
            } else {
                out.push(0.0);
            }
        }
        out.retain(|t| *t > 0.0 && *t < T_CAP);
    }
}

fn axis(axis: Vec2, ego: &ActorRecord, other: &ActorRecord) -> AxisMotion {
    let (e0, e1) = ego.obb().project(axis);
    let (p0, p1) = other.obb().project(axis);
    AxisMotion {
        offset: (p0 + p1) / 2.0 - (e0 + e1) / 2.0,
        dv: (other.velocity() - ego.velocity()).dot(axis),
        da: (other.accel() - ego.accel()).dot(axis),
        reach: (e1 - e0) / 2.0 + (p1 - p0) / 2.0,
    }
}

/// Both axes of a pair in the frame given by `road_heading`.
pub fn pair_motion(ego: &ActorRecord, other: &ActorRecord, road_heading: f64) -> [AxisMotion; 2] {
    let lon = Vec2::from_angle(road_heading);
    [axis(lon, ego, other), axis(lon.perp(), ego, other)]
}

/// First time both axes overlap; infinite when that does not happen
/// before `T_CAP`.
pub fn joint_closure(axes: &[AxisMotion; 2]) -> f64 {
    if axes.iter().all(|a| a.overlaps_at(0.0)) {
        return 0.0;
    }
    let mut cuts = Vec::with_capacity(8);
    for a in axes {
        a.crossings(&mut cuts);
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut prev = 0.0;
    for &t in cuts.iter().chain(std::iter::once(&T_CAP)) {
        let mid = 0.5 * (prev + t);
        if axes.iter().all(|a| a.overlaps_at(mid)) {
            return prev;
        }
        prev = t;
    }
    f64::INFINITY
}

/// Uncapped estimate for one participant at one step.
pub fn pair_ettc(ego: &ActorRecord, other: &ActorRecord, road_heading: f64) -> f64 {
    joint_closure(&pair_motion(ego, other, road_heading))
}

/// Minimum over participants at one step, capped.
pub fn step_ettc(step: &TraceStep) -> f64 {
    step.participants
        .iter()
        .map(|p| pair_ettc(&step.ego, p, step.road_heading))
        .fold(T_CAP, f64::min)
}

/// METTC of a whole trace, in `[0, T_CAP]`.
pub fn mettc(trace: &Trace) -> f64 {
    trace.steps.iter().map(step_ettc).fold(T_CAP, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::ActorKind;

    fn rec(x: f64, y: f64, vx: f64, vy: f64) -> ActorRecord {
        ActorRecord {
            id: None,
            kind: ActorKind::Vehicle,
            x,
            y,
            heading: 0.0,
            speed: vx.hypot(vy),
            length: 4.0,
            width: 2.0,
            vx,
            vy,
            ax: 0.0,
            ay: 0.0,
        }
    }

    #[test]
    fn head_on_without_acceleration() {
        // 50 m between the boxes, closing at 10 m/s.
        let ego = rec(0.0, 0.0, 5.0, 0.0);
        let other = rec(54.0, 0.0, -5.0, 0.0);
        assert!((pair_ettc(&ego, &other, 0.0) - 5.0).abs() < 1e-12);
    }

    #[test]
    fn parallel_identical_motion_never_closes() {
        let mut ego = rec(0.0, 0.0, 10.0, 0.0);
        let mut other = rec(20.0, 3.5, 10.0, 0.0);
        ego.ax = 1.0;
        other.ax = 1.0;
        assert!(pair_ettc(&ego, &other, 0.0).is_infinite());
    }

    #[test]
    fn overlapping_boxes_score_zero() {
        let ego = rec(0.0, 0.0, 0.0, 0.0);
        let other = rec(1.0, 0.5, 0.0, 0.0);
        assert_eq!(pair_ettc(&ego, &other, 0.0), 0.0);
    }

    #[test]
    fn adjacent_lane_pass_is_not_a_collision() {
        let ego = rec(0.0, 0.0, 10.0, 0.0);
        let other = rec(-10.0, 3.6, 16.0, 0.0);
        assert!(pair_ettc(&ego, &other, 0.0).is_infinite());
    }

    #[test]
    fn braking_lead_is_reached() {
        // Gap 10 m at equal speed 10 m/s; the lead brakes at 2 m/s²:
        // 10 = t², so contact at t = √10.
        let ego = rec(0.0, 0.0, 10.0, 0.0);
        let mut lead = rec(14.0, 0.5, 10.0, 0.0);
        lead.ax = -2.0;
        assert!((pair_ettc(&ego, &lead, 0.0) - 10f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn decelerating_approach_that_stops_short() {
        // Gap 10, closing at 4 m/s while braking at 1 m/s²: stops after 8 m.
        let ego = rec(0.0, 0.0, 4.0, 0.0);
        let mut e = ego;
        e.ax = -1.0;
        assert!(pair_ettc(&e, &rec(14.0, 0.0, 0.0, 0.0), 0.0).is_infinite());
        // Gap 6 closes at t = 2.
        assert!((pair_ettc(&e, &rec(10.0, 0.0, 0.0, 0.0), 0.0) - 2.0).abs() < 1e-9);
    }

    #[test]
    fn crossing_paths_need_both_axes() {
        // Other crosses from the right at 5 m/s, 20 m ahead; the ego waits.
        let ego = rec(0.0, 0.0, 0.0, 0.0);
        let mut other = rec(20.0, -10.0, 0.0, 5.0);
        other.heading = std::f64::consts::FRAC_PI_2;
        assert!(pair_ettc(&ego, &other, 0.0).is_infinite());
        // Ego at 5 m/s: longitudinal window [17/5, 23/5] = [3.4, 4.6] and lateral
        // window [(10-3)/5, (10+3)/5] = [1.4, 2.6] miss each other.
        assert!(pair_ettc(&rec(0.0, 0.0, 5.0, 0.0), &other, 0.0).is_infinite());
        // Ego at 8 m/s: longitudinal from 17/8 = 2.125, lateral until 2.6.
        assert!((pair_ettc(&rec(0.0, 0.0, 8.0, 0.0), &other, 0.0) - 2.125).abs() < 1e-9);
    }
}
