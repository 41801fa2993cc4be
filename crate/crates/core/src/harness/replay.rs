//! Top-down schematic rendering of recorded traces.

use crate::error::{FadeError, Result};
use crate::geometry::{Obb, Vec2};
use crate::scenario::ActorKind;
use crate::sim::{Trace, TraceStep};
use image::{Rgb, RgbImage};
use std::path::{Path, PathBuf};

pub const SIZE: u32 = 400;
/// Metres per pixel; the view is centred on the ego.
pub const SCALE: f64 = 0.25;

pub const BACKGROUND: Rgb<u8> = Rgb([40, 40, 40]);
pub const TRAIL: Rgb<u8> = Rgb([90, 90, 140]);
pub const EGO: Rgb<u8> = Rgb([60, 130, 255]);
pub const VEHICLE: Rgb<u8> = Rgb([220, 220, 220]);
pub const PEDESTRIAN: Rgb<u8> = Rgb([255, 160, 40]);
pub const STOP_LINE: Rgb<u8> = Rgb([240, 240, 60]);
pub const DESTINATION: Rgb<u8> = Rgb([60, 220, 90]);
/// Boxes that overlap another box in the frame.
pub const COLLISION: Rgb<u8> = Rgb([255, 0, 0]);

/// Per participant: does its box overlap the ego box at this step.
pub fn overlap_flags(step: &TraceStep) -> Vec<bool> {
    let ego = step.ego.obb();
    step.participants.iter().map(|p| p.obb().overlaps(&ego)).collect()
}

struct View {
    center: Vec2,
}

impl View {
    fn to_px(&self, p: Vec2) -> (f64, f64) {
        let h = f64::from(SIZE) / 2.0;
        (h + (p.x - self.center.x) / SCALE, h - (p.y - self.center.y) / SCALE)
    }

    fn to_world(&self, x: u32, y: u32) -> Vec2 {
        let h = f64::from(SIZE) / 2.0;
        Vec2::new(self.center.x + (f64::from(x) + 0.5 - h) * SCALE, self.center.y - (f64::from(y) + 0.5 - h) * SCALE)
    }

    fn fill(&self, img: &mut RgbImage, bounds: [Vec2; 4], inside: impl Fn(Vec2) -> bool, color: Rgb<u8>) {
        let px: Vec<(f64, f64)> = bounds.iter().map(|&c| self.to_px(c)).collect();
        let lim = |v: f64| v.clamp(0.0, f64::from(SIZE - 1)) as u32;
        let x0 = lim(px.iter().map(|p| p.0).fold(f64::INFINITY, f64::min).floor());
        let x1 = lim(px.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max).ceil());
        let y0 = lim(px.iter().map(|p| p.1).fold(f64::INFINITY, f64::min).floor());
        let y1 = lim(px.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max).ceil());
        for y in y0..=y1 {
            for x in x0..=x1 {
                if inside(self.to_world(x, y)) {
                    img.put_pixel(x, y, color);
                }
            }
        }
    }

    fn fill_obb(&self, img: &mut RgbImage, b: &Obb, color: Rgb<u8>) {
        // Boxes smaller than a pixel still get one.
        let vis = Obb::new(b.center, b.heading, b.length.max(SCALE), b.width.max(SCALE));
        self.fill(img, vis.corners(), |p| vis.contains(p), color);
    }
}

/// Renders one step of a trace. The ego path up to `index` is drawn as a trail.
pub fn render_topdown(trace: &Trace, index: usize) -> RgbImage {
    let step = &trace.steps[index];
    let view = View { center: step.ego.position() };
    let mut img = RgbImage::from_pixel(SIZE, SIZE, BACKGROUND);
    for s in &trace.steps[..=index] {
        let (x, y) = view.to_px(s.ego.position());
        if x >= 0.0 && y >= 0.0 && x < f64::from(SIZE) && y < f64::from(SIZE) {
            img.put_pixel(x as u32, y as u32, TRAIL);
        }
    }
    for l in &trace.header.stop_lines {
        view.fill_obb(&mut img, &Obb::new(l.point, l.heading, 0.5, 2.0 * l.half_width), STOP_LINE);
    }
    let d = trace.header.destination;
    view.fill_obb(&mut img, &Obb::new(d, 0.0, 1.5, 1.5), DESTINATION);
    let flags = overlap_flags(step);
    for (p, &hit) in step.participants.iter().zip(&flags) {
        let c = match (hit, p.kind) {
            (true, _) => COLLISION,
            (false, ActorKind::Vehicle) => VEHICLE,
            (false, ActorKind::Pedestrian) => PEDESTRIAN,
        };
        view.fill_obb(&mut img, &p.obb(), c);
    }
    let ego = step.ego.obb();
    view.fill_obb(&mut img, &ego, EGO);
    for p in step.participants.iter().zip(&flags).filter(|(_, &f)| f).map(|(p, _)| p.obb()) {
        view.fill(&mut img, ego.corners(), |q| ego.contains(q) && p.contains(q), COLLISION);
    }
    img
}

/// Writes `step_NNNNN.png` for every step; returns the written paths.
pub fn replay(trace: &Trace, out_dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out_dir).map_err(|e| FadeError::io(out_dir, e))?;
    let mut out = Vec::with_capacity(trace.steps.len());
    for i in 0..trace.steps.len() {
        let path = out_dir.join(format!("step_{i:05}.png"));
        render_topdown(trace, i)
            .save(&path)
            .map_err(|e| FadeError::io(&path, std::io::Error::other(e)))?;
        out.push(path);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ads::{AdsAdapter, RouteInfo, SensorInput};
    use crate::sim::{run_episode, ControlCommand};

    struct Coast;
    impl AdsAdapter for Coast {
        fn name(&self) -> &str {
            "coast"
        }
        fn reset(&mut self, _: &RouteInfo) -> Result<()> {
            Ok(())
        }
        fn step(&mut self, _: &SensorInput<'_>) -> Result<ControlCommand> {
            Ok(ControlCommand::default())
        }
    }

    #[test]
    fn collision_frame_is_marked() {
        let s = crate::scenario::obstacle_ahead(0);
        let t = run_episode(&s, &mut Coast, None, 1).unwrap();
        assert!(t.collided());
        let last = t.steps.len() - 1;
        let hits = |img: &RgbImage| img.pixels().filter(|p| **p == COLLISION).count();
        assert!(hits(&render_topdown(&t, last)) > 0);
        assert_eq!(hits(&render_topdown(&t, 0)), 0);
    }
}
