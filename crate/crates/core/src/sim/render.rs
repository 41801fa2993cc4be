//! Schematic pinhole camera. Flat-shaded classes with a fixed palette:
//! sky, verge, road, markings, vehicles, pedestrians and the signal lamp.

use super::rig::CameraConfig;
use super::world::{ActorState, World};
use crate::geometry::Vec2;
use crate::scenario::{ActorKind, Approach, RoadMap, SegmentKind, SignalPhase};
use crate::sensor::CameraFrame;

pub mod palette {
    pub const SKY: [f32; 3] = [0.55, 0.70, 0.90];
    pub const VERGE: [f32; 3] = [0.33, 0.42, 0.24];
    pub const ROAD: [f32; 3] = [0.30, 0.30, 0.32];
    pub const MARKING: [f32; 3] = [0.92, 0.92, 0.92];
    pub const VEHICLE: [f32; 3] = [0.10, 0.20, 0.75];
    pub const PEDESTRIAN: [f32; 3] = [0.85, 0.20, 0.75];
    pub const HOUSING: [f32; 3] = [0.05, 0.05, 0.05];
    pub const LAMP_RED: [f32; 3] = [0.95, 0.10, 0.10];
    pub const LAMP_YELLOW: [f32; 3] = [0.95, 0.80, 0.10];
    pub const LAMP_GREEN: [f32; 3] = [0.10, 0.85, 0.25];
}

/// Schematic lamp sizes, metres.
pub const LAMP_RADIUS: f64 = 0.6;
pub const HOUSING_HALF: f64 = 0.8;

const CELL: f64 = 0.5;
const MAX_GROUND_RANGE: f64 = 150.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
enum Surface {
    Verge = 0,
    Road = 1,
    Marking = 2,
}

/// Top-down raster of road surface and markings, built once per map.
#[derive(Debug, Clone)]
pub struct GroundMap {
    origin: Vec2,
    nx: usize,
    ny: usize,
    cells: Vec<u8>,
}

impl GroundMap {
    pub fn new(map: &RoadMap) -> Self {
        let (mut lo, mut hi) = (Vec2::new(f64::INFINITY, f64::INFINITY), Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY));
        for s in &map.segments {
            let m = s.right_edge().max(s.left_edge()) + 2.0;
            for p in s.centerline.points() {
                lo = Vec2::new(lo.x.min(p.x - m), lo.y.min(p.y - m));
                hi = Vec2::new(hi.x.max(p.x + m), hi.y.max(p.y + m));
            }
        }
        if !lo.x.is_finite() {
            return Self { origin: Vec2::ZERO, nx: 0, ny: 0, cells: Vec::new() };
        }
        let nx = ((hi.x - lo.x) / CELL).ceil() as usize + 1;
        let ny = ((hi.y - lo.y) / CELL).ceil() as usize + 1;
        let mut g = Self { origin: lo, nx, ny, cells: vec![Surface::Verge as u8; nx * ny] };
        let step = CELL / 2.0;
        for s in &map.segments {
            match s.kind {
                SegmentKind::Junction { half_width } => {
                    let c = s.centerline.sample(s.centerline.length() / 2.0).0;
                    let n = (2.0 * half_width / step).ceil() as usize;
                    for i in 0..=n {
                        for j in 0..=n {
                            let p = c + Vec2::new(-half_width + i as f64 * step, -half_width + j as f64 * step);
                            g.paint(p, Surface::Road);
                        }
                    }
                }
                SegmentKind::Road => {
                    let len = s.centerline.length();
                    let (r, l) = (s.right_edge(), s.left_edge());
                    let lanes_r = f64::from(s.lanes_forward) * s.lane_width;
                    let lanes_l = f64::from(s.lanes_backward) * s.lane_width;
                    let ns = (len / step).ceil() as usize;
                    let nl = ((r + l) / step).ceil() as usize;
                    for i in 0..=ns {
                        let st = (i as f64 * step).min(len);
                        let (c, h) = s.centerline.sample(st);
                        let left = Vec2::from_angle(h).perp();
                        let dashed_on = st.rem_euclid(9.0) < 3.0;
                        for j in 0..=nl {
                            let lat = (-r + j as f64 * step).min(l);
                            let mut surface = Surface::Road;
                            let near = |x: f64| (lat - x).abs() < step / 2.0;
                            if near(-lanes_r) || (s.lanes_backward > 0 && near(lanes_l)) {
                                surface = Surface::Marking;
                            } else if near(0.0) && s.lanes_backward > 0 {
                                surface = Surface::Marking;
                            } else if dashed_on {
                                let k = (lat / s.lane_width).round();
                                if k != 0.0 && near(k * s.lane_width) && lat > -lanes_r && lat < lanes_l {
                                    surface = Surface::Marking;
                                }
                            }
                            g.paint(c + left * lat, surface);
                        }
                    }
                }
            }
        }
        for line in &map.stop_lines {
            let d = Vec2::from_angle(line.heading);
            let n = d.perp();
            let m = (2.0 * line.half_width / step).ceil() as usize;
            for i in 0..=m {
                for k in 0..4 {
                    let p = line.point + n * (-line.half_width + i as f64 * step) - d * (k as f64 * 0.1);
                    g.paint(p, Surface::Marking);
                }
            }
        }
        g
    }

    fn index(&self, p: Vec2) -> Option<usize> {
        let x = ((p.x - self.origin.x) / CELL).floor();
        let y = ((p.y - self.origin.y) / CELL).floor();
        if x < 0.0 || y < 0.0 || x >= self.nx as f64 || y >= self.ny as f64 {
            return None;
        }
        Some(y as usize * self.nx + x as usize)
    }

    fn paint(&mut self, p: Vec2, s: Surface) {
        if let Some(i) = self.index(p) {
            // Markings win over road, road over verge.
            if self.cells[i] < s as u8 {
                self.cells[i] = s as u8;
            }
        }
    }

    pub fn color_at(&self, p: Vec2) -> [f32; 3] {
        match self.index(p).map(|i| self.cells[i]) {
            Some(1) => palette::ROAD,
            Some(2) => palette::MARKING,
            _ => palette::VERGE,
        }
    }
}

pub fn lamp_color(phase: SignalPhase) -> [f32; 3] {
    match phase {
        SignalPhase::Red => palette::LAMP_RED,
        SignalPhase::Yellow => palette::LAMP_YELLOW,
        SignalPhase::Green => palette::LAMP_GREEN,
    }
}

/// World point to camera frame (x forward, y left, z up).
fn world_to_camera(cam: &CameraConfig, ego: &ActorState, p: [f64; 3]) -> [f64; 3] {
    let rel = (Vec2::new(p[0], p[1]) - ego.position).rotate(-ego.heading);
    cam.mount.to_sensor([rel.x, rel.y, p[2]])
}

struct Projector {
    f: f64,
    cu: f64,
    cv: f64,
}

impl Projector {
    fn new(cam: &CameraConfig) -> Self {
        Self { f: cam.focal(), cu: cam.width as f64 / 2.0, cv: cam.height as f64 / 2.0 }
    }

    /// Pixel coordinates; points behind the near plane are pulled onto it.
    fn project(&self, c: [f64; 3]) -> (f64, f64) {
        let x = c[0].max(0.2);
        (self.cu - self.f * c[1] / x, self.cv - self.f * c[2] / x)
    }
}

/// Camera bound to its mount, with the ground intersection of every pixel
/// ray precomputed in the vehicle frame.
#[derive(Debug, Clone)]
pub struct CameraRenderer {
    cam: CameraConfig,
    /// Vehicle-frame ground point per pixel; NaN above the horizon.
    ground: Vec<[f32; 2]>,
}

impl CameraRenderer {
    pub fn new(cam: &CameraConfig) -> Self {
        let pr = Projector::new(cam);
        let origin = cam.mount.translation;
        let mut ground = Vec::with_capacity(cam.width * cam.height);
        for v in 0..cam.height {
            for u in 0..cam.width {
                let dc = [1.0, (pr.cu - (u as f64 + 0.5)) / pr.f, (pr.cv - (v as f64 + 0.5)) / pr.f];
                let d = cam.mount.rotation.apply(dc);
                ground.push(if d[2] < -1e-6 {
                    let t = -origin[2] / d[2];
                    [(origin[0] + t * d[0]) as f32, (origin[1] + t * d[1]) as f32]
                } else {
                    [f32::NAN; 2]
                });
            }
        }
        Self { cam: *cam, ground }
    }

    pub fn config(&self) -> &CameraConfig {
        &self.cam
    }

    pub fn render(&self, world: &World, map: &RoadMap, ground: &GroundMap) -> CameraFrame {
        let cam = &self.cam;
        let mut frame = CameraFrame::filled(cam.width, cam.height, palette::SKY);
        let pr = Projector::new(cam);
        let ego = &world.ego;
        let (sin_h, cos_h) = ego.heading.sin_cos();
        for (px, g) in frame.pixels.iter_mut().zip(&self.ground) {
            if g[0].is_nan() {
                continue;
            }
            let (gx, gy) = (f64::from(g[0]), f64::from(g[1]));
            *px = if gx * gx + gy * gy > MAX_GROUND_RANGE * MAX_GROUND_RANGE {
                palette::VERGE
            } else {
                ground.color_at(ego.position + Vec2::new(gx * cos_h - gy * sin_h, gx * sin_h + gy * cos_h))
            };
        }
        draw_objects(&mut frame, &pr, cam, world, map);
        frame
    }
}

pub fn render_camera(world: &World, map: &RoadMap, ground: &GroundMap, cam: &CameraConfig) -> CameraFrame {
    CameraRenderer::new(cam).render(world, map, ground)
}

fn draw_objects(frame: &mut CameraFrame, pr: &Projector, cam: &CameraConfig, world: &World, map: &RoadMap) {
    let ego = &world.ego;
    // Painter's order: far to near.
    let mut items: Vec<(f64, Item)> = world
        .actors
        .iter()
        .map(|a| (a.position.distance(ego.position), Item::Actor(a)))
        .collect();
    if let Some(sig) = &map.signal {
        let d = Vec2::new(sig.lamp[0], sig.lamp[1]).distance(ego.position);
        items.push((d, Item::Lamp(sig.lamp, sig.phase(Approach::NorthSouth, world.time))));
    }
    items.sort_by(|a, b| b.0.total_cmp(&a.0));
    for (_, item) in items {
        match item {
            Item::Actor(a) => draw_actor(frame, pr, cam, ego, a),
            Item::Lamp(p, phase) => draw_lamp(frame, pr, cam, ego, p, phase),
        }
    }
}

enum Item<'a> {
    Actor(&'a ActorState),
    Lamp([f64; 3], SignalPhase),
}

fn draw_actor(frame: &mut CameraFrame, pr: &Projector, cam: &CameraConfig, ego: &ActorState, a: &ActorState) {
    let corners = a.obb().corners();
    let mut pts = Vec::with_capacity(8);
    let mut in_front = false;
    for c in corners {
        for z in [0.0, a.dims.height] {
            let pc = world_to_camera(cam, ego, [c.x, c.y, z]);
            in_front |= pc[0] > 0.2;
            pts.push(pr.project(pc));
        }
    }
    if !in_front {
        return;
    }
    let color = match a.kind {
        ActorKind::Vehicle => palette::VEHICLE,
        ActorKind::Pedestrian => palette::PEDESTRIAN,
    };
    fill_convex(frame, &convex_hull(pts), color);
}

fn draw_lamp(frame: &mut CameraFrame, pr: &Projector, cam: &CameraConfig, ego: &ActorState, p: [f64; 3], phase: SignalPhase) {
    let c = world_to_camera(cam, ego, p);
    if c[0] < 0.5 {
        return;
    }
    let (u, v) = pr.project(c);
    let hs = pr.f * HOUSING_HALF / c[0];
    let square = vec![(u - hs, v - hs), (u + hs, v - hs), (u + hs, v + hs), (u - hs, v + hs)];
    fill_convex(frame, &square, palette::HOUSING);
    let r = pr.f * LAMP_RADIUS / c[0];
    let color = lamp_color(phase);
    let (w, h) = (frame.width as i64, frame.height as i64);
    let (x0, x1) = (((u - r).floor() as i64).max(0), ((u + r).ceil() as i64).min(w - 1));
    let (y0, y1) = (((v - r).floor() as i64).max(0), ((v + r).ceil() as i64).min(h - 1));
    for y in y0..=y1 {
        for x in x0..=x1 {
            let (dx, dy) = (x as f64 + 0.5 - u, y as f64 + 0.5 - v);
            if dx * dx + dy * dy <= r * r {
                frame.set(x as usize, y as usize, color);
            }
        }
    }
}

/// Monotone-chain hull, counter-clockwise in pixel coordinates.
fn convex_hull(mut pts: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let cross = |o: (f64, f64), a: (f64, f64), b: (f64, f64)| (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0);
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(pts.len() * 2);
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &(f64, f64)>> = if pass == 0 { Box::new(pts.iter()) } else { Box::new(pts.iter().rev()) };
        for &p in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

fn fill_convex(frame: &mut CameraFrame, poly: &[(f64, f64)], color: [f32; 3]) {
    if poly.len() < 3 {
        return;
    }
    let (w, h) = (frame.width as f64, frame.height as f64);
    let min_x = poly.iter().map(|p| p.0).fold(f64::INFINITY, f64::min).max(0.0);
    let max_x = poly.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max).min(w);
    let min_y = poly.iter().map(|p| p.1).fold(f64::INFINITY, f64::min).max(0.0);
    let max_y = poly.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max).min(h);
    if min_x >= max_x || min_y >= max_y {
        return;
    }
    // Orientation-agnostic inside test.
    let sign = {
        let (a, b, c) = (poly[0], poly[1], poly[2]);
        ((b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0)).signum()
    };
    for y in (min_y.floor() as usize)..(max_y.ceil() as usize).min(frame.height) {
        for x in (min_x.floor() as usize)..(max_x.ceil() as usize).min(frame.width) {
            let p = (x as f64 + 0.5, y as f64 + 0.5);
            let inside = (0..poly.len()).all(|i| {
                let a = poly[i];
                let b = poly[(i + 1) % poly.len()];
                ((b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0)) * sign >= 0.0
            });
            if inside {
                frame.set(x, y, color);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{generate_scenarios, obstacle_ahead, GenConfig, Topology};
    use crate::sim::rig::SensorRig;

    fn count(frame: &CameraFrame, c: [f32; 3]) -> usize {
        frame.pixels.iter().filter(|p| **p == c).count()
    }

    #[test]
    fn empty_road_has_no_actor_pixels() {
        let mut s = obstacle_ahead(0);
        s.participants.clear();
        let w = World::new(&s);
        let f = render_camera(&w, &s.map, &GroundMap::new(&s.map), &SensorRig::default().camera);
        assert_eq!(count(&f, palette::VEHICLE), 0);
        assert!(count(&f, palette::ROAD) > 1000);
        assert!(count(&f, palette::SKY) > 1000);
    }

    #[test]
    fn lead_vehicle_is_visible() {
        let s = obstacle_ahead(0);
        let w = World::new(&s);
        let f = render_camera(&w, &s.map, &GroundMap::new(&s.map), &SensorRig::default().camera);
        assert!(count(&f, palette::VEHICLE) >= crate::ads::camera::MIN_AREA);
    }

    #[test]
    fn red_signal_visible_near_stop_line() {
        let cfg = GenConfig { topologies: vec![Topology::Intersection], ..GenConfig::default() };
        let mut s = generate_scenarios(1, &cfg, 4).unwrap().remove(0);
        s.participants.clear();
        let sig = s.map.signal.clone().unwrap();
        // Time at which the north-south approach shows red.
        let t = (sig.green + sig.yellow + 1.0 - sig.offset).rem_euclid(sig.cycle());
        let mut w = World::new(&s);
        w.time = t;
        w.ego.position = Vec2::new(1.75, 80.0);
        assert_eq!(sig.phase(Approach::NorthSouth, t), SignalPhase::Red);
        let f = render_camera(&w, &s.map, &GroundMap::new(&s.map), &SensorRig::default().camera);
        let red: Vec<usize> = (0..f.pixels.len()).filter(|&i| f.pixels[i] == palette::LAMP_RED).collect();
        assert!(red.len() >= 6);
        // Above the horizon row.
        assert!(red.iter().all(|&i| i / f.width < f.height / 2));
    }

    #[test]
    fn hull_of_square() {
        let h = convex_hull(vec![(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0), (0.5, 0.5)]);
        assert_eq!(h.len(), 4);
    }
}
