//! Route-following planner: IDM longitudinal control against the tightest
//! of tracked obstacles, stop lines and the destination; pure-pursuit
//! lateral control.

use super::camera::SignalObservation;
use super::tracker::Track;
use super::{Odometry, RouteInfo};
use crate::geometry::{wrap_angle, Vec2};
use crate::scenario::SignalPhase;
use crate::sim::world::{ACCEL_MAX, ACCEL_MIN, MAX_STEER, MAX_STEER_RATE, WHEELBASE};
use crate::sim::ControlCommand;

pub const IDM_S0: f64 = 4.0;
pub const STOP_S0: f64 = 1.0;
pub const DEST_S0: f64 = 0.5;
const IDM_T: f64 = 1.5;
const IDM_A: f64 = 2.0;
const IDM_B: f64 = 3.0;
pub const RED_MAX_DECEL: f64 = 6.0;
pub const YELLOW_MAX_DECEL: f64 = 3.0;
pub const SIGNAL_MIN_CONF: f64 = 0.5;
const EGO_LENGTH: f64 = 4.6;
const EGO_HALF_WIDTH: f64 = 0.95;
const CORRIDOR_MARGIN: f64 = 0.4;
const HORIZON: f64 = 80.0;
const LIMIT_SAMPLE: f64 = 2.0;

/// Route data precomputed at reset.
#[derive(Debug, Clone)]
pub struct Planner {
    route: RouteInfo,
    /// Speed limit every `LIMIT_SAMPLE` metres along the route.
    limits: Vec<f64>,
    /// Route stations of stop lines that apply to the ego.
    stop_stations: Vec<f64>,
}

/// Something to stop behind: gap from the ego front, its speed along the
/// route, and the standstill distance to keep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Target {
    pub gap: f64,
    pub speed: f64,
    pub s0: f64,
}

pub fn idm_accel(v: f64, v0: f64, target: Option<Target>) -> f64 {
    let free = IDM_A * (1.0 - (v / v0.max(0.1)).powi(4));
    match target {
        None => free,
        Some(t) => {
            if t.gap <= 0.05 {
                return ACCEL_MIN;
            }
            let dv = v - t.speed;
            let s_star = t.s0 + (v * IDM_T + v * dv / (2.0 * (IDM_A * IDM_B).sqrt())).max(0.0);
            IDM_A * (1.0 - (v / v0.max(0.1)).powi(4) - (s_star / t.gap).powi(2))
        }
    }
}

impl Planner {
    pub fn new(route: &RouteInfo) -> Self {
        let r = &route.route;
        let n = (r.length() / LIMIT_SAMPLE).ceil() as usize + 1;
        let mut last = 13.9;
        let limits = (0..n)
            .map(|i| {
                if let Some(s) = route.map.segment_at(r.sample(i as f64 * LIMIT_SAMPLE).0) {
                    last = s.v_max;
                }
                last
            })
            .collect();
        let stop_stations = route
            .map
            .stop_lines
            .iter()
            .filter_map(|l| {
                let pr = r.project(l.point);
                let aligned = wrap_angle(pr.heading - l.heading).abs() < 0.5;
                (aligned && l.covers(r.sample(pr.station).0) && pr.lateral.abs() <= l.half_width).then_some(pr.station)
            })
            .collect();
        Self { route: route.clone(), limits, stop_stations }
    }

    fn limit_ahead(&self, s: f64, horizon: f64) -> f64 {
        let i0 = (s.max(0.0) / LIMIT_SAMPLE) as usize;
        let i1 = ((s + horizon).max(0.0) / LIMIT_SAMPLE) as usize;
        let hi = self.limits.len().saturating_sub(1);
        self.limits[i0.min(hi)..=i1.min(hi)].iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn route_dt(&self) -> f64 {
        self.route.dt
    }

    pub fn station(&self, p: Vec2) -> f64 {
        self.route.route.project(p).station
    }

    /// Station of the first stop line still ahead of the ego front.
    pub fn next_stop_line(&self, s_ego: f64) -> Option<f64> {
        self.stop_stations.iter().copied().filter(|&s| s - s_ego - EGO_LENGTH / 2.0 > -0.5).fold(None, |a: Option<f64>, s| Some(a.map_or(s, |a| a.min(s))))
    }

    pub fn plan(&self, odo: &Odometry, tracks: &[&Track], signal: Option<SignalObservation>) -> ControlCommand {
        let r = &self.route.route;
        let dt = self.route.dt;
        let pr = r.project(odo.position);
        let s = pr.station;
        let v = odo.speed;
        let v0 = 0.95 * self.limit_ahead(s, 10.0 + v * 2.0);

        let mut targets: Vec<Target> = Vec::new();
        targets.push(Target { gap: self.route.destination_station - s, speed: 0.0, s0: DEST_S0 });
        for t in tracks {
            if let Some(tg) = self.obstacle(t, s, pr.lateral) {
                targets.push(tg);
            }
        }
        if let (Some(line), Some(obs)) = (self.next_stop_line(s), signal) {
            let d = line - s - EGO_LENGTH / 2.0;
            if obs.confidence > SIGNAL_MIN_CONF && d < HORIZON {
                let need = v * v / (2.0 * (d - STOP_S0).max(0.1));
                let stop = match obs.phase {
                    SignalPhase::Red => need <= RED_MAX_DECEL,
                    SignalPhase::Yellow => need <= YELLOW_MAX_DECEL,
                    SignalPhase::Green => false,
                };
                if stop {
                    targets.push(Target { gap: d, speed: 0.0, s0: STOP_S0 });
                }
            }
        }
        let accel = targets
            .into_iter()
            .map(|t| idm_accel(v, v0, Some(t)))
            .fold(idm_accel(v, v0, None), f64::min)
            .clamp(ACCEL_MIN, ACCEL_MAX);

        // Pure pursuit on the route.
        let look = (0.8 * v).max(5.0);
        let (goal, _) = r.sample(s + look);
        let rel = (goal - odo.position).rotate(-odo.heading);
        let l2 = rel.dot(rel).max(1e-6);
        let kappa = 2.0 * rel.y / l2;
        let delta = (WHEELBASE * kappa).atan().clamp(-MAX_STEER, MAX_STEER);
        let steer_rate = ((delta - odo.steer) / dt).clamp(-MAX_STEER_RATE, MAX_STEER_RATE);
        ControlCommand { accel, steer_rate }
    }

    /// Whether a track ahead of the ego blocks its corridor now or within two
    /// seconds.
    fn obstacle(&self, t: &Track, s_ego: f64, lat_ego: f64) -> Option<Target> {
        let r = &self.route.route;
        let half_len = (t.extent.0.max(t.extent.1) / 2.0).clamp(0.25, 2.5);
        let half_wid = (t.extent.0.min(t.extent.1) / 2.0).clamp(0.25, 1.5);
        let corridor = EGO_HALF_WIDTH + half_wid + CORRIDOR_MARGIN;
        if r.project(t.position).station <= s_ego {
            return None;
        }
        let mut best: Option<Target> = None;
        for (k, horizon) in [0.0, 1.0, 2.0].into_iter().enumerate() {
            if k > 0 && (t.velocity.norm() < 0.5 || t.hits < super::tracker::SETTLED_HITS) {
                break;
            }
            let p = t.position + t.velocity * horizon;
            let q = r.project(p);
            let ahead = q.station - s_ego;
            if ahead <= 0.0 || ahead > HORIZON || (q.lateral - lat_ego).abs() > corridor {
                continue;
            }
            let gap = ahead - EGO_LENGTH / 2.0 - half_len;
            let speed = if k == 0 { t.velocity.dot(Vec2::from_angle(q.heading)).max(0.0) } else { 0.0 };
            let tg = Target { gap, speed, s0: IDM_S0 };
            if best.is_none_or(|b| tg.gap < b.gap) {
                best = Some(tg);
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stopped_obstacle_close_ahead_brakes_hard() {
        let a = idm_accel(10.0, 13.0, Some(Target { gap: 8.0, speed: 0.0, s0: IDM_S0 }));
        assert!(a.clamp(ACCEL_MIN, ACCEL_MAX) <= -4.0);
    }

    #[test]
    fn free_road_accelerates_below_limit() {
        assert!(idm_accel(5.0, 13.0, None) > 0.0);
        assert!(idm_accel(13.0, 13.0, None).abs() < 1e-12);
    }
}
