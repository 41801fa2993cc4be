//! Raindrops on the lens: a binary streak mask and the refraction/attenuation
//! blend applied under it.
//!
//! Per pixel: `I_r = (1 - L)·I_e + L·(t·I_e + (1 - t)·N)` with
//! `t ~ U(t_min, t_max)` and `N ~ Normal(0, sigma)`. The mask `L` is the union
//! of `n` straight streaks, each anchored at a uniform pixel position with
//! length `l ~ U(l_min, l_max)` and image-plane angle `theta ~ U(theta_min, theta_max)`
//! measured from the +x (column) axis toward +y (rows, downward).

use super::{FaultInstance, FaultModel};
use crate::rng;
use crate::sensor::CameraFrame;
use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RaindropParams {
    pub streaks: usize,
    pub length_min: f64,
    pub length_max: f64,
    pub angle_min: f64,
    pub angle_max: f64,
    pub transparency_min: f64,
    pub transparency_max: f64,
    pub sigma: f64,
}

impl RaindropParams {
    pub fn from_instance(model: &FaultModel, inst: &FaultInstance) -> Self {
        let v = |n: &str| inst.value(model, n);
        let t_min = v("transparency_min");
        let center = std::f64::consts::FRAC_PI_2 + v("angle_center");
        let span = v("angle_span");
        Self {
            streaks: v("streaks").round() as usize,
            length_min: v("length_min"),
            length_max: v("length_min") + v("length_span"),
            angle_min: center - span / 2.0,
            angle_max: center + span / 2.0,
            transparency_min: t_min,
            transparency_max: (t_min + v("transparency_span")).min(1.0),
            sigma: v("sigma"),
        }
    }

    pub fn is_valid(&self) -> bool {
        self.length_min <= self.length_max
            && (0.0..=1.0).contains(&self.transparency_min)
            && self.transparency_min <= self.transparency_max
            && self.transparency_max <= 1.0
            && self.sigma >= 0.0
            && self.angle_min <= self.angle_max
    }
}

/// One streak segment in pixel coordinates (pixel centers at `i + 0.5`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Streak {
    pub x: f64,
    pub y: f64,
    pub length: f64,
    pub angle: f64,
}

/// Streak width in pixels for a frame of the given width.
pub fn streak_width(width: usize) -> f64 {
    (width as f64 / 640.0).max(1.0)
}

pub fn sample_streaks(p: &RaindropParams, width: usize, height: usize, seed: u64) -> Vec<Streak> {
    let mut rng = rng::derived_rng(seed, "raindrop.streaks", 0);
    (0..p.streaks)
        .map(|_| {
            let x = rng.gen::<f64>() * width as f64;
            let y = rng.gen::<f64>() * height as f64;
            let length = p.length_min + (p.length_max - p.length_min) * rng.gen::<f64>();
            let angle = p.angle_min + (p.angle_max - p.angle_min) * rng.gen::<f64>();
            Streak { x, y, length, angle }
        })
        .collect()
}

/// Union of streaks: a pixel is set when its center lies within half the
/// streak width of the segment.
pub fn rasterize_streaks(streaks: &[Streak], width: usize, height: usize) -> Vec<f32> {
    let mut mask = vec![0.0_f32; width * height];
    let half = streak_width(width) / 2.0;
    for s in streaks {
        let (dx, dy) = (s.angle.cos(), s.angle.sin());
        let (x1, y1) = (s.x + dx * s.length, s.y + dy * s.length);
        let x_lo = (s.x.min(x1) - half - 1.0).floor().max(0.0) as usize;
        let x_hi = ((s.x.max(x1) + half + 1.0).ceil().max(0.0) as usize).min(width);
        let y_lo = (s.y.min(y1) - half - 1.0).floor().max(0.0) as usize;
        let y_hi = ((s.y.max(y1) + half + 1.0).ceil().max(0.0) as usize).min(height);
        for py in y_lo..y_hi {
            for px in x_lo..x_hi {
                let cx = px as f64 + 0.5 - s.x;
                let cy = py as f64 + 0.5 - s.y;
                let t = (cx * dx + cy * dy).clamp(0.0, s.length);
                let ex = cx - t * dx;
                let ey = cy - t * dy;
                if ex * ex + ey * ey <= half * half {
                    mask[py * width + px] = 1.0;
                }
            }
        }
    }
    mask
}

pub fn raindrop_mask(p: &RaindropParams, width: usize, height: usize, seed: u64) -> Vec<f32> {
    rasterize_streaks(&sample_streaks(p, width, height, seed), width, height)
}

/// Applies the streak blend given an explicit mask.
pub fn blend_with_mask(frame: &CameraFrame, mask: &[f32], p: &RaindropParams, seed: u64) -> CameraFrame {
    let mut out = frame.clone();
    let mut rng = rng::derived_rng(seed, "raindrop.blend", 0);
    for (px, &l) in out.pixels.iter_mut().zip(mask) {
        if l == 0.0 {
            continue;
        }
        let l = f64::from(l);
        let t = p.transparency_min + (p.transparency_max - p.transparency_min) * rng.gen::<f64>();
        let z: f64 = StandardNormal.sample(&mut rng);
        let noise = p.sigma * z;
        for c in px.iter_mut() {
            let ie = f64::from(*c);
            let v = (1.0 - l) * ie + l * (t * ie + (1.0 - t) * noise);
            *c = v.clamp(0.0, 1.0) as f32;
        }
    }
    out
}

pub fn compose_raindrops(frame: &CameraFrame, p: &RaindropParams, seed: u64) -> CameraFrame {
    if p.streaks == 0 {
        return frame.clone();
    }
    let mask = raindrop_mask(p, frame.width, frame.height, seed);
    blend_with_mask(frame, &mask, p, seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(n: usize) -> RaindropParams {
        RaindropParams {
            streaks: n,
            length_min: 5.0,
            length_max: 20.0,
            angle_min: 1.2,
            angle_max: 1.9,
            transparency_min: 0.3,
            transparency_max: 0.7,
            sigma: 0.05,
        }
    }

    fn gradient(w: usize, h: usize) -> CameraFrame {
        let mut f = CameraFrame::filled(w, h, [0.0; 3]);
        for y in 0..h {
            for x in 0..w {
                let v = (x + y) as f32 / (w + h) as f32;
                f.set(x, y, [v, 1.0 - v, 0.5]);
            }
        }
        f
    }

    #[test]
    fn zero_streaks_empty_mask() {
        let m = raindrop_mask(&params(0), 64, 48, 3);
        assert!(m.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn horizontal_streak_pixel_count() {
        // Direct rasterization: a horizontal segment through pixel centers of
        // row 10 from x=10.5 to x=30.5 covers 21 pixels (±1 at the ends).
        let s = Streak {
            x: 10.5,
            y: 10.5,
            length: 20.0,
            angle: 0.0,
        };
        let m = rasterize_streaks(&[s], 64, 48);
        let set: Vec<(usize, usize)> = (0..48)
            .flat_map(|y| (0..64).map(move |x| (x, y)))
            .filter(|&(x, y)| m[y * 64 + x] > 0.0)
            .collect();
        assert!(set.iter().all(|&(_, y)| y == 10));
        assert!((set.len() as i64 - 21).abs() <= 1, "{}", set.len());
    }

    #[test]
    fn mask_is_binary() {
        let m = raindrop_mask(&params(40), 160, 120, 11);
        assert!(m.iter().all(|&v| v == 0.0 || v == 1.0));
        assert!(m.iter().any(|&v| v == 1.0));
    }

    #[test]
    fn no_streaks_is_identity() {
        let f = gradient(32, 24);
        assert_eq!(compose_raindrops(&f, &params(0), 9), f);
    }

    #[test]
    fn full_transparency_keeps_pixels() {
        let f = gradient(64, 48);
        let mut p = params(30);
        p.transparency_min = 1.0;
        p.transparency_max = 1.0;
        assert_eq!(compose_raindrops(&f, &p, 5), f);
    }

    #[test]
    fn half_transparency_without_noise_halves_masked_pixels() {
        // Closed form: t = 0.5, N = 0 gives I_r = 0.5·I_e on masked pixels.
        let f = gradient(64, 48);
        let s = Streak {
            x: 5.5,
            y: 20.5,
            length: 40.0,
            angle: 0.0,
        };
        let mask = rasterize_streaks(&[s], 64, 48);
        let mut p = params(1);
        p.transparency_min = 0.5;
        p.transparency_max = 0.5;
        p.sigma = 0.0;
        let out = blend_with_mask(&f, &mask, &p, 1);
        for i in 0..f.pixels.len() {
            for c in 0..3 {
                let expect = if mask[i] > 0.0 { f.pixels[i][c] * 0.5 } else { f.pixels[i][c] };
                assert_eq!(out.pixels[i][c], expect);
            }
        }
    }

    #[test]
    fn output_in_range_and_deterministic() {
        let f = gradient(80, 60);
        let mut p = params(50);
        p.sigma = 0.3;
        let a = compose_raindrops(&f, &p, 77);
        assert!(a.is_valid());
        assert_eq!(a, compose_raindrops(&f, &p, 77));
        assert_ne!(a, f);
    }
}
