//! Colour-segmentation camera perception: per-pixel palette classes,
//! connected components, monocular ground-plane range and a hue-based
//! signal reader.

use super::{Detection, ObjectClass, Source};
use crate::geometry::Vec2;
use crate::scenario::SignalPhase;
use crate::sensor::CameraFrame;
use crate::sim::render::palette;
use crate::sim::CameraConfig;
use serde::{Deserialize, Serialize};

/// Max RGB distance to a palette colour for a pixel to take its class.
pub const CLASS_TOLERANCE: f32 = 0.3;
pub const MIN_AREA: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum PixelClass {
    Background = 0,
    Vehicle = 1,
    Pedestrian = 2,
    Lamp = 3,
}

const REFS: [([f32; 3], PixelClass); 11] = [
    (palette::SKY, PixelClass::Background),
    (palette::VERGE, PixelClass::Background),
    (palette::ROAD, PixelClass::Background),
    (palette::MARKING, PixelClass::Background),
    (palette::HOUSING, PixelClass::Background),
    (palette::VEHICLE, PixelClass::Vehicle),
    (palette::PEDESTRIAN, PixelClass::Pedestrian),
    (palette::LAMP_RED, PixelClass::Lamp),
    (palette::LAMP_YELLOW, PixelClass::Lamp),
    (palette::LAMP_GREEN, PixelClass::Lamp),
    // Dark pixels never form objects.
    ([0.0, 0.0, 0.0], PixelClass::Background),
];

pub fn classify(c: [f32; 3]) -> PixelClass {
    let mut best = (f32::INFINITY, PixelClass::Background);
    for (r, cls) in REFS {
        let d = (c[0] - r[0]).powi(2) + (c[1] - r[1]).powi(2) + (c[2] - r[2]).powi(2);
        if d < best.0 {
            best = (d, cls);
        }
    }
    if best.0 <= CLASS_TOLERANCE * CLASS_TOLERANCE {
        best.1
    } else {
        PixelClass::Background
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Component {
    pub class: PixelClass,
    pub pixels: Vec<(usize, usize)>,
    pub u0: usize,
    pub u1: usize,
    pub v0: usize,
    pub v1: usize,
}

impl Component {
    pub fn area(&self) -> usize {
        self.pixels.len()
    }

    pub fn width(&self) -> usize {
        self.u1 - self.u0 + 1
    }

    pub fn height(&self) -> usize {
        self.v1 - self.v0 + 1
    }
}

/// 4-connected components of equal non-background class with at least `MIN_AREA` pixels.
pub fn components(frame: &CameraFrame) -> Vec<Component> {
    let (w, h) = (frame.width, frame.height);
    // Frames are mostly runs of identical colours.
    let mut last = ([f32::NAN; 3], PixelClass::Background);
    let labels: Vec<PixelClass> = frame
        .pixels
        .iter()
        .map(|&c| {
            if c != last.0 {
                last = (c, classify(c));
            }
            last.1
        })
        .collect();
    let mut seen = vec![false; w * h];
    let mut out = Vec::new();
    let mut stack = Vec::new();
    for start in 0..w * h {
        let cls = labels[start];
        if seen[start] || cls == PixelClass::Background {
            continue;
        }
        seen[start] = true;
        stack.push(start);
        let mut comp = Component { class: cls, pixels: Vec::new(), u0: w, u1: 0, v0: h, v1: 0 };
        while let Some(i) = stack.pop() {
            let (u, v) = (i % w, i / w);
            comp.pixels.push((u, v));
            comp.u0 = comp.u0.min(u);
            comp.u1 = comp.u1.max(u);
            comp.v0 = comp.v0.min(v);
            comp.v1 = comp.v1.max(v);
            let mut visit = |j: usize| {
                if !seen[j] && labels[j] == cls {
                    seen[j] = true;
                    stack.push(j);
                }
            };
            if u > 0 {
                visit(i - 1);
            }
            if u + 1 < w {
                visit(i + 1);
            }
            if v > 0 {
                visit(i - w);
            }
            if v + 1 < h {
                visit(i + w);
            }
        }
        if comp.area() >= MIN_AREA {
            out.push(comp);
        }
    }
    out
}

/// Width:height aspect bounds of a class silhouette.
fn aspect_bounds(class: ObjectClass) -> (f64, f64) {
    match class {
        ObjectClass::Vehicle => (1.0, 3.5),
        ObjectClass::Pedestrian => (0.2, 0.5),
        ObjectClass::Unknown => (0.2, 3.5),
    }
}

/// Visible pixels over the area the silhouette would cover if its bounding
/// box were completed to the class aspect range.
pub fn silhouette_confidence(c: &Component, class: ObjectClass) -> f64 {
    let (ar_min, ar_max) = aspect_bounds(class);
    let (w, h) = (c.width() as f64, c.height() as f64);
    let expected = h.max(w / ar_max) * w.max(h * ar_min);
    (c.area() as f64 / expected).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignalObservation {
    pub phase: SignalPhase,
    pub confidence: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CameraPerception {
    pub objects: Vec<Detection>,
    pub signal: Option<SignalObservation>,
}

/// Hue in degrees of an RGB triple.
pub fn hue(c: [f64; 3]) -> f64 {
    let (r, g, b) = (c[0], c[1], c[2]);
    let max = r.max(g).max(b);
    let min = r.min(g).min(b);
    let d = max - min;
    if d <= 1e-9 {
        return 0.0;
    }
    let h = if max == r {
        60.0 * ((g - b) / d).rem_euclid(6.0)
    } else if max == g {
        60.0 * ((b - r) / d + 2.0)
    } else {
        60.0 * ((r - g) / d + 4.0)
    };
    h.rem_euclid(360.0)
}

pub fn phase_from_hue(h: f64) -> Option<SignalPhase> {
    if !(25.0..335.0).contains(&h) {
        Some(SignalPhase::Red)
    } else if h < 75.0 {
        Some(SignalPhase::Yellow)
    } else if h < 180.0 {
        Some(SignalPhase::Green)
    } else {
        None
    }
}

pub fn perceive_camera(frame: &CameraFrame, cam: &CameraConfig) -> CameraPerception {
    let f = frame.focal(cam.hfov);
    let cu = frame.width as f64 / 2.0;
    let cv = frame.height as f64 / 2.0;
    let mount = cam.mount.translation;
    let mut out = CameraPerception::default();
    let mut best_lamp: Option<(usize, SignalObservation)> = None;
    for c in components(frame) {
        match c.class {
            PixelClass::Lamp => {
                let n = c.area() as f64;
                let mut mean = [0.0; 3];
                for &(u, v) in &c.pixels {
                    let p = frame.get(u, v);
                    for k in 0..3 {
                        mean[k] += f64::from(p[k]) / n;
                    }
                }
                let Some(phase) = phase_from_hue(hue(mean)) else { continue };
                let disc = std::f64::consts::FRAC_PI_4 * c.width() as f64 * c.height() as f64;
                let obs = SignalObservation { phase, confidence: (n / disc).clamp(0.0, 1.0) };
                if best_lamp.as_ref().is_none_or(|b| c.area() > b.0) {
                    best_lamp = Some((c.area(), obs));
                }
            }
            PixelClass::Vehicle | PixelClass::Pedestrian => {
                let class = if c.class == PixelClass::Vehicle { ObjectClass::Vehicle } else { ObjectClass::Pedestrian };
                let uc = (c.u0 + c.u1 + 1) as f64 / 2.0;
                let bearing = ((cu - uc) / f).atan();
                let half = ((c.u1 + 1 - c.u0) as f64 / 2.0 / f).atan();
                // Ground contact at the silhouette bottom edge.
                let below = ((c.v1 as f64 + 1.0 - cv) / f).atan();
                let position = (below > 0.005).then(|| {
                    let d = mount[2] / below.tan();
                    let depth = if class == ObjectClass::Vehicle { 1.0 } else { 0.25 };
                    let fwd = d + depth;
                    Vec2::new(mount[0] + fwd, mount[1] + fwd * bearing.tan())
                });
                let extent = match class {
                    ObjectClass::Vehicle => (4.5, 1.8),
                    _ => (0.5, 0.5),
                };
                out.objects.push(Detection {
                    source: Source::Camera,
                    class,
                    bearing,
                    angular_half_width: half,
                    position,
                    extent,
                    confidence: silhouette_confidence(&c, class),
                });
            }
            PixelClass::Background => {}
        }
    }
    out.signal = best_lamp.map(|b| b.1);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frame_with_rect(u0: usize, u1: usize, v0: usize, v1: usize, c: [f32; 3]) -> CameraFrame {
        let mut f = CameraFrame::filled(160, 120, palette::ROAD);
        for v in v0..=v1 {
            for u in u0..=u1 {
                f.set(u, v, c);
            }
        }
        f
    }

    #[test]
    fn clear_vehicle_is_confident() {
        let f = frame_with_rect(70, 89, 55, 70, palette::VEHICLE);
        let p = perceive_camera(&f, &crate::sim::SensorRig::default().camera);
        assert_eq!(p.objects.len(), 1);
        assert!(p.objects[0].confidence > 0.9);
        assert!(p.objects[0].bearing.abs() < 0.01);
    }

    #[test]
    fn partial_occlusion_lowers_confidence() {
        let cam = crate::sim::SensorRig::default().camera;
        let full = perceive_camera(&frame_with_rect(70, 89, 55, 70, palette::VEHICLE), &cam);
        let mut f = frame_with_rect(70, 89, 55, 70, palette::VEHICLE);
        for v in 55..=70 {
            for u in 70..82 {
                f.set(u, v, [0.08, 0.08, 0.08]);
            }
        }
        let occ = perceive_camera(&f, &cam);
        assert!(full.objects[0].confidence - occ.objects[0].confidence >= 0.5);
    }

    #[test]
    fn tiny_blobs_ignored() {
        let f = frame_with_rect(10, 11, 10, 11, palette::VEHICLE);
        assert!(perceive_camera(&f, &crate::sim::SensorRig::default().camera).objects.is_empty());
    }

    #[test]
    fn hue_classification() {
        assert_eq!(phase_from_hue(hue([0.95, 0.1, 0.1])), Some(SignalPhase::Red));
        assert_eq!(phase_from_hue(hue([0.95, 0.8, 0.1])), Some(SignalPhase::Yellow));
        assert_eq!(phase_from_hue(hue([0.1, 0.85, 0.25])), Some(SignalPhase::Green));
    }
}
