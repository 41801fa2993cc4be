//! Constraint-based scenario sampling over three road templates.

use super::participant::{ActorKind, Behavior, Dimensions, EgoSpec, Participant, SpeedProfile};
use super::road::{Approach, RoadMap, RoadSegment, SegmentKind, Signal, StopLine, Topology};
use super::{check_constraints, Constraint, Scenario, Weather, SCHEMA_VERSION};
use crate::error::{FadeError, Result};
use crate::geometry::{Polyline, Vec2};
use crate::rng::{self, Rng};
use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GenConfig {
    pub topologies: Vec<Topology>,
    pub min_participants: usize,
    pub max_participants: usize,
    pub duration: f64,
    pub dt: f64,
    pub d_max: f64,
    /// Minimum distance between any two spawn points, ego included.
    pub min_separation: f64,
    pub max_attempts: usize,
}

impl Default for GenConfig {
    fn default() -> Self {
        Self {
            topologies: Topology::ALL.to_vec(),
            min_participants: 1,
            max_participants: 4,
            duration: 30.0,
            dt: 0.1,
            d_max: 80.0,
            min_separation: 8.0,
            max_attempts: 1000,
        }
    }
}

impl GenConfig {
    fn validate(&self) -> Result<()> {
        if self.topologies.is_empty() {
            return Err(FadeError::Config("no road topologies selected".into()));
        }
        if self.min_participants == 0 || self.min_participants > self.max_participants {
            return Err(FadeError::Config("participant count range must satisfy 1 <= min <= max".into()));
        }
        if !(self.dt > 0.0) || !(self.duration > 0.0) || self.duration > 120.0 {
            return Err(FadeError::Config("duration must lie in (0, 120] s with dt > 0".into()));
        }
        if self.max_attempts == 0 {
            return Err(FadeError::Config("max_attempts must be positive".into()));
        }
        Ok(())
    }
}

/// Generates `num` scenarios; scenario `i` depends only on `(cfg, seed, i)`.
pub fn generate_scenarios(num: usize, cfg: &GenConfig, seed: u64) -> Result<Vec<Scenario>> {
    cfg.validate()?;
    (0..num).map(|i| generate_one(cfg, seed, i)).collect()
}

fn generate_one(cfg: &GenConfig, seed: u64, index: usize) -> Result<Scenario> {
    let mut last = None;
    for attempt in 0..cfg.max_attempts {
        let mut rng = rng::derived_rng(seed, &format!("scenario.{index}"), attempt as u64);
        let s = sample_scenario(cfg, &mut rng, seed, index);
        if check_constraints(&s).ok() {
            return Ok(s);
        }
        last = Some(s);
    }
    // Repair: drop participants that still violate, keep the rest.
    let mut s = last.expect("at least one attempt");
    let verdict = check_constraints(&s);
    let bad: std::collections::BTreeSet<usize> = verdict.violations.iter().map(|v| v.participant).collect();
    s.participants.retain(|p| !bad.contains(&p.id));
    if s.participants.len() >= cfg.min_participants && check_constraints(&s).ok() {
        return Ok(s);
    }
    let reason = if verdict.violated().contains(&Constraint::SpawnRange) && cfg.d_max < cfg.min_separation {
        format!(
            "d_max {} m is below the minimum spawn separation {} m",
            cfg.d_max, cfg.min_separation
        )
    } else {
        verdict
            .violations
            .first()
            .map(|v| v.reason.clone())
            .unwrap_or_else(|| "too few participants after repair".into())
    };
    Err(FadeError::Generation {
        attempts: cfg.max_attempts,
        reason,
    })
}

/// Route geometry shared by participant samplers.
struct Template {
    topology: Topology,
    map: RoadMap,
    ego: EgoSpec,
    /// Main road centerline (the ego travels along it in its forward lanes).
    main: Polyline,
    ego_station: f64,
    lanes_forward: u8,
    lanes_backward: u8,
    lane_width: f64,
    shoulder: f64,
    v_max: f64,
}

fn left(h: f64) -> Vec2 {
    Vec2::from_angle(h).perp()
}

/// Path along `center` from station `s0` to `s1` (either direction) at a
/// lateral offset given per station.
fn shifted_path(center: &Polyline, s0: f64, s1: f64, offset: impl Fn(f64) -> f64) -> Vec<Vec2> {
    let n = (((s1 - s0).abs() / 2.0).ceil() as usize).max(1);
    (0..=n)
        .map(|i| {
            let s = s0 + (s1 - s0) * i as f64 / n as f64;
            let (p, h) = center.sample(s);
            p + left(h) * offset(s)
        })
        .collect()
}

fn lane_path(center: &Polyline, s0: f64, s1: f64, offset: f64) -> Vec<Vec2> {
    shifted_path(center, s0, s1, |_| offset)
}

/// Continues a path straight for `len` metres past its end.
fn extend(mut pts: Vec<Vec2>, len: f64) -> Vec<Vec2> {
    let n = pts.len();
    let dir = (pts[n - 1] - pts[n - 2]).normalized();
    let end = pts[n - 1];
    pts.push(end + dir * len);
    pts
}

fn smoothstep(a: f64, b: f64, s: f64) -> f64 {
    let t = ((s - a) / (b - a)).clamp(0.0, 1.0);
    t * t * (3.0 - 2.0 * t)
}

/// A standing actor: a 10 cm stub path fixes its heading.
fn stub(p: Vec2, heading: f64) -> Polyline {
    Polyline::new(vec![p, p + Vec2::from_angle(heading) * 0.1])
}

fn straight(a: Vec2, b: Vec2) -> Polyline {
    Polyline::new(vec![a, b])
}

fn road(id: usize, centerline: Polyline, t: (u8, u8, f64, f64, f64)) -> RoadSegment {
    RoadSegment {
        id,
        centerline,
        lanes_forward: t.0,
        lanes_backward: t.1,
        lane_width: t.2,
        shoulder: t.3,
        v_max: t.4,
        kind: SegmentKind::Road,
    }
}

fn ego_spec(main: &Polyline, s0: f64, s_dest: f64, offset: f64, v0: f64) -> EgoSpec {
    let route = Polyline::new(extend(lane_path(main, s0, main.length(), offset), 30.0));
    EgoSpec {
        route,
        initial_speed: v0,
        destination_station: s_dest - s0,
        dims: Dimensions::EGO,
    }
}

fn highway(rng: &mut Rng) -> Template {
    let lanes: u8 = rng.gen_range(2..=3);
    let (w, sh) = (3.6, 2.5);
    let v_max = rng.gen_range(18.0..25.0);
    let spec = (lanes, 0, w, sh, v_max);
    let segs: Vec<RoadSegment> = (0..3)
        .map(|i| {
            let x = i as f64 * 100.0;
            road(i, straight(Vec2::new(x, 0.0), Vec2::new(x + 100.0, 0.0)), spec)
        })
        .collect();
    let main = straight(Vec2::new(0.0, 0.0), Vec2::new(300.0, 0.0));
    let lane = rng.gen_range(0..lanes);
    let s0 = rng.gen_range(20.0..60.0);
    let v0 = v_max * rng.gen_range(0.5..0.8);
    let ego = ego_spec(&main, s0, 290.0, segs[0].lane_offset(true, lane), v0);
    Template {
        topology: Topology::Highway,
        map: RoadMap {
            topology: Topology::Highway,
            segments: segs,
            connections: vec![(0, 1), (1, 2)],
            signal: None,
            stop_lines: vec![],
        },
        ego,
        main,
        ego_station: s0,
        lanes_forward: lanes,
        lanes_backward: 0,
        lane_width: w,
        shoulder: sh,
        v_max,
    }
}

fn urban(rng: &mut Rng) -> Template {
    let (w, sh) = (3.5, 2.5);
    let v_max = rng.gen_range(10.0..14.0);
    let spec = (1, 1, w, sh, v_max);
    let radius = rng.gen_range(40.0..80.0);
    let sweep = rng.gen_range(PI / 6.0..FRAC_PI_2);
    let a = Vec2::new(100.0, 0.0);
    let center = Vec2::new(100.0, radius);
    let n = ((sweep / 0.035).ceil() as usize).max(2);
    let arc: Vec<Vec2> = (0..=n)
        .map(|i| {
            let t = -FRAC_PI_2 + sweep * i as f64 / n as f64;
            center + Vec2::new(t.cos(), t.sin()) * radius
        })
        .collect();
    let b = *arc.last().unwrap();
    let c = b + Vec2::from_angle(sweep) * 100.0;
    let segs = vec![
        road(0, straight(Vec2::new(0.0, 0.0), a), spec),
        road(1, Polyline::new(arc.clone()), spec),
        road(2, straight(b, c), spec),
    ];
    let mut pts = vec![Vec2::new(0.0, 0.0)];
    pts.extend(arc);
    pts.push(c);
    let main = Polyline::new(pts);
    let s0 = rng.gen_range(10.0..40.0);
    let v0 = v_max * rng.gen_range(0.0..0.6);
    let ego = ego_spec(&main, s0, main.length() - 15.0, -w / 2.0, v0);
    Template {
        topology: Topology::UrbanStreet,
        map: RoadMap {
            topology: Topology::UrbanStreet,
            segments: segs,
            connections: vec![(0, 1), (1, 2)],
            signal: None,
            stop_lines: vec![],
        },
        ego,
        main,
        ego_station: s0,
        lanes_forward: 1,
        lanes_backward: 1,
        lane_width: w,
        shoulder: sh,
        v_max,
    }
}

/// Junction center and size for the intersection template.
pub const JUNCTION_CENTER: Vec2 = Vec2::new(0.0, 120.0);
pub const JUNCTION_HALF_WIDTH: f64 = 20.0;

fn intersection(rng: &mut Rng) -> Template {
    let (w, sh) = (3.5, 1.5);
    let v_max = rng.gen_range(10.0..14.0);
    let spec = (1, 1, w, sh, v_max);
    let (cx, cy, hw) = (JUNCTION_CENTER.x, JUNCTION_CENTER.y, JUNCTION_HALF_WIDTH);
    let segs = vec![
        road(0, straight(Vec2::new(cx, 0.0), Vec2::new(cx, cy - hw)), spec),
        RoadSegment {
            kind: SegmentKind::Junction { half_width: hw },
            ..road(1, straight(Vec2::new(cx, cy - hw), Vec2::new(cx, cy + hw)), spec)
        },
        road(2, straight(Vec2::new(cx, cy + hw), Vec2::new(cx, 240.0)), spec),
        road(3, straight(Vec2::new(-120.0, cy), Vec2::new(cx - hw, cy)), spec),
        road(4, straight(Vec2::new(cx + hw, cy), Vec2::new(120.0, cy)), spec),
    ];
    let signal = Signal {
        green: 15.0,
        yellow: 3.0,
        red: 12.0,
        offset: rng.gen_range(0.0..30.0),
        lamp: [6.5, 111.5, 5.0],
    };
    let half = w / 2.0;
    let stop_lines = vec![
        StopLine {
            approach: Approach::NorthSouth,
            point: Vec2::new(half, cy - hw - 1.0),
            heading: FRAC_PI_2,
            half_width: half,
        },
        StopLine {
            approach: Approach::NorthSouth,
            point: Vec2::new(-half, cy + hw + 1.0),
            heading: -FRAC_PI_2,
            half_width: half,
        },
        StopLine {
            approach: Approach::EastWest,
            point: Vec2::new(cx - hw - 1.0, cy - half),
            heading: 0.0,
            half_width: half,
        },
        StopLine {
            approach: Approach::EastWest,
            point: Vec2::new(cx + hw + 1.0, cy + half),
            heading: PI,
            half_width: half,
        },
    ];
    let main = straight(Vec2::new(cx, 0.0), Vec2::new(cx, 240.0));
    let s0 = rng.gen_range(55.0..75.0);
    let v0 = v_max * rng.gen_range(0.0..0.6);
    let ego = ego_spec(&main, s0, 225.0, -half, v0);
    Template {
        topology: Topology::Intersection,
        map: RoadMap {
            topology: Topology::Intersection,
            segments: segs,
            connections: vec![(0, 1), (1, 2), (3, 1), (1, 4)],
            signal: Some(signal),
            stop_lines,
        },
        ego,
        main,
        ego_station: s0,
        lanes_forward: 1,
        lanes_backward: 1,
        lane_width: w,
        shoulder: sh,
        v_max,
    }
}

fn vehicle(behavior: Behavior, path: Vec<Vec2>, v0: f64, target: f64, start_time: f64, rng: &mut Rng) -> Participant {
    Participant {
        id: 0,
        kind: ActorKind::Vehicle,
        behavior,
        path: Polyline::new(path),
        speed: SpeedProfile {
            initial_speed: v0,
            target_speed: target,
            start_time,
            a_max: rng.gen_range(2.5..4.0),
        },
        dims: Dimensions::CAR,
    }
}

fn pedestrian(behavior: Behavior, path: Polyline, speed: f64, start_time: f64) -> Participant {
    Participant {
        id: 0,
        kind: ActorKind::Pedestrian,
        behavior,
        path,
        speed: SpeedProfile {
            initial_speed: 0.0,
            target_speed: speed,
            start_time,
            a_max: 1.5,
        },
        dims: Dimensions::PEDESTRIAN,
    }
}

impl Template {
    fn fwd(&self, lane: u8) -> f64 {
        -(f64::from(lane) + 0.5) * self.lane_width
    }

    fn bwd(&self, lane: u8) -> f64 {
        (f64::from(lane) + 0.5) * self.lane_width
    }

    fn shoulder_mid(&self, right: bool) -> f64 {
        if right {
            -(f64::from(self.lanes_forward) * self.lane_width + self.shoulder / 2.0)
        } else {
            f64::from(self.lanes_backward) * self.lane_width + self.shoulder / 2.0
        }
    }

    fn edge(&self, right: bool) -> f64 {
        let e = self.shoulder_mid(right).abs() + self.shoulder / 2.0 - 0.3;
        if right {
            -e
        } else {
            e
        }
    }

    fn main_len(&self) -> f64 {
        self.main.length()
    }

    fn behaviors(&self) -> &'static [Behavior] {
        use Behavior::*;
        match self.topology {
            Topology::Highway => &[FollowLane, FollowLane, ChangeLane, Overtake, Park],
            Topology::UrbanStreet => &[FollowLane, FollowLane, Park, WalkAlong, WalkAcross, Stand],
            Topology::Intersection => &[Cross, Cross, TurnAround, FollowLane, WalkAcross, WalkAlong, Stand],
        }
    }

    fn sample_participant(&self, rng: &mut Rng) -> Participant {
        let b = *self.behaviors().choose(rng).unwrap();
        let se = self.ego_station;
        let l = self.main_len();
        let v = self.v_max;
        let ext = 150.0;
        match b {
            Behavior::FollowLane => {
                let oncoming = self.lanes_backward > 0 && rng.gen_bool(0.4);
                let target = v * rng.gen_range(0.5..0.95);
                let v0 = target * rng.gen_range(0.7..1.0);
                if oncoming {
                    let s0 = (se + rng.gen_range(30.0..75.0)).min(l);
                    vehicle(b, extend(lane_path(&self.main, s0, 0.0, self.bwd(0)), ext), v0, target, 0.0, rng)
                } else {
                    let lane = rng.gen_range(0..self.lanes_forward);
                    let s0 = (se + rng.gen_range(-40.0..70.0)).max(0.0);
                    vehicle(b, extend(lane_path(&self.main, s0, l, self.fwd(lane)), ext), v0, target, 0.0, rng)
                }
            }
            Behavior::ChangeLane => {
                let a = rng.gen_range(0..self.lanes_forward);
                let to = if a == 0 { 1 } else if a + 1 == self.lanes_forward || rng.gen_bool(0.5) { a - 1 } else { a + 1 };
                let s0 = (se + rng.gen_range(-30.0..60.0)).max(0.0);
                let sc = s0 + rng.gen_range(15.0..50.0);
                let (oa, ob) = (self.fwd(a), self.fwd(to));
                let path = shifted_path(&self.main, s0, l, |s| oa + (ob - oa) * smoothstep(sc, sc + 40.0, s));
                let target = v * rng.gen_range(0.6..0.95);
                vehicle(b, extend(path, ext), target * rng.gen_range(0.8..1.0), target, 0.0, rng)
            }
            Behavior::Overtake => {
                let ego_lane = ((-self.ego.route.start().y / self.lane_width) - 0.5).round().clamp(0.0, 2.0) as u8;
                let side = if ego_lane + 1 < self.lanes_forward { ego_lane + 1 } else { ego_lane - 1 };
                let s0 = (se - rng.gen_range(15.0..35.0)).max(0.0);
                let out = s0 + rng.gen_range(8.0..30.0);
                let back = out + rng.gen_range(80.0..120.0);
                let (oa, ob) = (self.fwd(ego_lane), self.fwd(side));
                let path = shifted_path(&self.main, s0, l, |s| {
                    oa + (ob - oa) * (smoothstep(out, out + 30.0, s) - smoothstep(back, back + 30.0, s))
                });
                vehicle(b, extend(path, ext), v * rng.gen_range(0.6..0.9), v * rng.gen_range(0.95..1.0), 0.0, rng)
            }
            Behavior::Park => {
                if self.topology == Topology::Highway {
                    let lane = self.lanes_forward - 1;
                    let s0 = se + rng.gen_range(10.0..60.0);
                    let pull = s0 + rng.gen_range(20.0..50.0);
                    let (oa, ob) = (self.fwd(lane), self.shoulder_mid(true));
                    let end = (pull + 45.0).min(l - 1.0);
                    let path = shifted_path(&self.main, s0, end, |s| oa + (ob - oa) * smoothstep(pull, pull + 25.0, s));
                    let target = v * rng.gen_range(0.4..0.7);
                    vehicle(b, path, target, target, 0.0, rng)
                } else {
                    let s = (se + rng.gen_range(10.0..90.0)).min(l - 5.0);
                    let right = rng.gen_bool(0.7);
                    let (p, h) = self.main.sample(s);
                    let pos = p + left(h) * self.shoulder_mid(right);
                    let heading = if right { h } else { h + PI };
                    vehicle(b, stub(pos, heading).points().to_vec(), 0.0, 0.0, 0.0, rng)
                }
            }
            Behavior::Cross => {
                let east = rng.gen_bool(0.5);
                let (cx, cy) = (JUNCTION_CENTER.x, JUNCTION_CENTER.y);
                let ew = straight(Vec2::new(-120.0, cy), Vec2::new(120.0, cy));
                let x0 = rng.gen_range(30.0..60.0);
                let half = self.lane_width / 2.0;
                let path = if east {
                    lane_path(&ew, 120.0 - x0 + cx, 240.0, -half)
                } else {
                    lane_path(&ew, 120.0 + x0 + cx, 0.0, half)
                };
                let target = v * rng.gen_range(0.6..0.95);
                vehicle(b, extend(path, ext), target * rng.gen_range(0.5..1.0), target, 0.0, rng)
            }
            Behavior::TurnAround => {
                let half = self.lane_width / 2.0;
                let y0 = se + rng.gen_range(15.0..35.0);
                let yt = JUNCTION_CENTER.y - rng.gen_range(5.0..12.0);
                let mut pts = vec![Vec2::new(half, y0)];
                let n = 24;
                for i in 0..=n {
                    let a = PI * i as f64 / n as f64;
                    pts.push(Vec2::new(half * a.cos(), yt + half * a.sin()));
                }
                pts.push(Vec2::new(-half, 0.0));
                let target = rng.gen_range(4.0..7.0f64).min(v);
                vehicle(b, extend(pts, ext), target * rng.gen_range(0.5..1.0), target, 0.0, rng)
            }
            Behavior::WalkAlong => {
                let right = rng.gen_bool(0.5);
                let s0 = (se + rng.gen_range(-10.0..70.0)).clamp(0.0, l - 45.0);
                let forward = rng.gen_bool(0.5);
                let (a, z) = if forward { (s0, s0 + 40.0) } else { (s0 + 40.0, s0) };
                let path = Polyline::new(lane_path(&self.main, a, z, self.shoulder_mid(right)));
                pedestrian(b, path, rng.gen_range(0.8..1.5), rng.gen_range(0.0..3.0))
            }
            Behavior::WalkAcross => {
                let s = if self.topology == Topology::Intersection {
                    rng.gen_range(84.0..97.0)
                } else {
                    (se + rng.gen_range(20.0..70.0)).min(l - 5.0)
                };
                let (p, h) = self.main.sample(s);
                let n = left(h);
                let (from, to) = if rng.gen_bool(0.5) { (self.edge(true), self.edge(false)) } else { (self.edge(false), self.edge(true)) };
                let path = Polyline::new(vec![p + n * from, p + n * to]);
                pedestrian(b, path, rng.gen_range(1.0..1.6), rng.gen_range(0.0..8.0))
            }
            Behavior::Stand => {
                let s = (se + rng.gen_range(5.0..70.0)).min(l - 5.0);
                let right = rng.gen_bool(0.5);
                let (p, h) = self.main.sample(s);
                let pos = p + left(h) * self.shoulder_mid(right);
                pedestrian(b, stub(pos, h + FRAC_PI_2), 0.0, 0.0)
            }
        }
    }
}

fn sample_scenario(cfg: &GenConfig, rng: &mut Rng, seed: u64, index: usize) -> Scenario {
    let topology = *cfg.topologies.choose(rng).unwrap();
    let t = match topology {
        Topology::Highway => highway(rng),
        Topology::UrbanStreet => urban(rng),
        Topology::Intersection => intersection(rng),
    };
    let k = rng.gen_range(cfg.min_participants..=cfg.max_participants);
    let mut participants: Vec<Participant> = Vec::with_capacity(k);
    let ego0 = t.ego.start();
    for _ in 0..k {
        // Up to 20 draws to find a spawn point clear of everyone else.
        for _ in 0..20 {
            let p = t.sample_participant(rng);
            let p0 = p.initial_position();
            let clear = p0.distance(ego0) >= cfg.min_separation
                && participants.iter().all(|q| q.initial_position().distance(p0) >= cfg.min_separation);
            if clear {
                participants.push(Participant {
                    id: participants.len(),
                    ..p
                });
                break;
            }
        }
    }
    let weather = *Weather::ALL.choose(rng).unwrap();
    Scenario {
        schema_version: SCHEMA_VERSION,
        id: format!("s{index:04}"),
        seed: rng::derive(seed, "scenario.seed", index as u64),
        map: t.map,
        ego: t.ego,
        participants,
        steps: (cfg.duration / cfg.dt).round() as usize,
        dt: cfg.dt,
        d_max: cfg.d_max,
        weather,
    }
}

/// Highway obstacle-ahead fixture: a slower lead car in the ego lane, a
/// follower behind the ego and one car in the adjacent lane. `variant`
/// shifts gaps and speeds slightly.
pub fn obstacle_ahead(variant: u64) -> Scenario {
    let mut rng = rng::derived_rng(0x0B57_AC1E, "obstacle_ahead", variant);
    let v_max = 20.0;
    let spec = (2, 0, 3.6, 2.5, v_max);
    let segs: Vec<RoadSegment> = (0..3)
        .map(|i| {
            let x = i as f64 * 100.0;
            road(i, straight(Vec2::new(x, 0.0), Vec2::new(x + 100.0, 0.0)), spec)
        })
        .collect();
    let main = straight(Vec2::new(0.0, 0.0), Vec2::new(300.0, 0.0));
    let lane0 = -1.8;
    let lane1 = -5.4;
    let s0 = 30.0;
    let v_ego = rng.gen_range(12.0..15.0);
    let ego = ego_spec(&main, s0, s0 + 150.0, lane0, v_ego);
    let lead_gap = rng.gen_range(30.0..40.0);
    let lead_v = rng.gen_range(6.0..8.0);
    let follow_gap = rng.gen_range(12.0..16.0);
    let mk = |id, path: Vec<Vec2>, v0: f64, target: f64| Participant {
        id,
        kind: ActorKind::Vehicle,
        behavior: Behavior::FollowLane,
        path: Polyline::new(path),
        speed: SpeedProfile {
            initial_speed: v0,
            target_speed: target,
            start_time: 0.0,
            a_max: 3.5,
        },
        dims: Dimensions::CAR,
    };
    let participants = vec![
        mk(0, extend(lane_path(&main, s0 + lead_gap, 300.0, lane0), 150.0), lead_v, lead_v),
        mk(1, extend(lane_path(&main, s0 - follow_gap, 300.0, lane0), 150.0), v_ego, v_max * 0.9),
        mk(2, extend(lane_path(&main, s0 + rng.gen_range(-20.0..-10.0), 300.0, lane1), 150.0), 14.0, 16.0),
    ];
    Scenario {
        schema_version: SCHEMA_VERSION,
        id: format!("obstacle-ahead-{variant}"),
        seed: rng::derive(0x0B57_AC1E, "obstacle_ahead.seed", variant),
        map: RoadMap {
            topology: Topology::Highway,
            segments: segs,
            connections: vec![(0, 1), (1, 2)],
            signal: None,
            stop_lines: vec![],
        },
        ego,
        participants,
        steps: 200,
        dt: 0.1,
        d_max: 80.0,
        weather: Weather::Clear,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generation_is_deterministic_and_valid() {
        let cfg = GenConfig::default();
        let a = generate_scenarios(30, &cfg, 11).unwrap();
        let b = generate_scenarios(30, &cfg, 11).unwrap();
        assert_eq!(a, b);
        for s in &a {
            let v = check_constraints(s);
            assert!(v.ok(), "{}: {:?}", s.id, v.violations);
            assert!(!s.participants.is_empty());
            s.map.check_connectivity().unwrap();
        }
    }

    #[test]
    fn all_topologies_appear() {
        let a = generate_scenarios(40, &GenConfig::default(), 3).unwrap();
        for t in Topology::ALL {
            assert!(a.iter().any(|s| s.map.topology == t), "{t:?}");
        }
    }

    #[test]
    fn zero_range_fails() {
        let cfg = GenConfig {
            d_max: 0.0,
            max_attempts: 50,
            ..GenConfig::default()
        };
        assert!(matches!(generate_scenarios(1, &cfg, 1), Err(FadeError::Generation { .. })));
    }

    #[test]
    fn obstacle_fixture_is_valid() {
        for v in 0..5 {
            let s = obstacle_ahead(v);
            assert!(check_constraints(&s).ok(), "{:?}", check_constraints(&s).violations);
        }
    }

    #[test]
    fn json_round_trip() {
        let s = &generate_scenarios(1, &GenConfig::default(), 5).unwrap()[0];
        let back = Scenario::from_json(&s.to_json()).unwrap();
        assert_eq!(&back, s);
    }
}
