//! Camera fault kernels. Each takes a frame and an instance of one of the 16
//! camera models and returns a new frame with intensities in [0, 1].
//!
//! Lens contaminants (dirt, cracks, occlusion, mud, dust, raindrops, snow,
//! ice) are static: their layout depends only on the instance's noise seed.
//! Sensor noise (internal scatter) is redrawn per frame index.

use super::raindrop::{compose_raindrops, RaindropParams};
use super::rotation::{deflection_rotation, DeflectionParams};
use super::{find_model, FaultInstance, FaultModel, Sensor};
use crate::error::{FadeError, Result};
use crate::geometry::Mat3;
use crate::rng;
use crate::sensor::{CameraFrame, DEFAULT_HFOV};
use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};

/// Depth at which a camera translation is converted into an image shift.
const DISPLACEMENT_REF_DEPTH: f64 = 10.0;

const OCCLUDER: [f32; 3] = [0.08, 0.08, 0.08];
const MUD: [f32; 3] = [0.35, 0.25, 0.15];
const DUST: [f32; 3] = [0.62, 0.57, 0.50];
const SNOW: [f32; 3] = [0.95, 0.95, 0.97];
const ICE: [f32; 3] = [0.85, 0.92, 0.97];
const CRACK: [f32; 3] = [0.85, 0.85, 0.85];

pub fn apply_camera_fault(frame: &CameraFrame, inst: &FaultInstance) -> Result<CameraFrame> {
    apply_camera_fault_at(frame, inst, 0)
}

/// Applies a camera fault to the frame captured at `frame_index`.
pub fn apply_camera_fault_at(frame: &CameraFrame, inst: &FaultInstance, frame_index: u64) -> Result<CameraFrame> {
    let model = find_model(&inst.model_id)?;
    if model.sensor != Sensor::Camera {
        return Err(FadeError::SensorMismatch {
            model: model.id.clone(),
            expected: "lidar",
            actual: "camera",
        });
    }
    model.validate(inst)?;
    let v = |n: &str| inst.value(model, n);
    let seed = inst.noise_seed;
    let out = match model.id.as_str() {
        "camera.deflection" => deflect(frame, DeflectionParams::from_instance(model, inst)),
        "camera.displacement" => displace(frame, v("dx"), v("dy"), v("dz")),
        "camera.internal_dirt" => internal_dirt(frame, count(v("spots")), v("radius"), v("opacity"), seed),
        "camera.broken_lens" => broken_lens(frame, model, inst),
        "camera.brightness_change" => map_pixels(frame, |c| v("gain") * c + v("offset")),
        "camera.blur" => box_blur(frame, count(v("radius"))),
        "camera.internal_scatter" => scatter_noise(frame, v("sigma"), rng::derive(seed, "scatter", frame_index)),
        "camera.lens_occlusion" => lens_occlusion(frame, v("fraction"), v("center_x"), v("center_y"), v("aspect")),
        "camera.external_scatter" => mud_speckle(frame, v("density"), v("radius"), seed),
        "camera.dust" => dust(frame, v("density"), v("opacity"), seed),
        "camera.raindrops" => compose_raindrops(frame, &RaindropParams::from_instance(model, inst), seed),
        "camera.snow_grains" => disks(frame, count(v("grains")), v("radius"), SNOW, seed),
        "camera.mist" => mist(frame, v("density"), v("veil")),
        "camera.ice" => ice(frame, v("coverage"), v("opacity"), seed),
        "camera.overexposure" => map_pixels(frame, |c| c * v("gain")),
        "camera.white_balance_shift" => white_balance(frame, v("temperature"), v("tint")),
        other => return Err(FadeError::UnknownFault(other.to_owned())),
    };
    Ok(out)
}

fn count(v: f64) -> usize {
    v.round().max(0.0) as usize
}

fn clamp01(v: f64) -> f32 {
    v.clamp(0.0, 1.0) as f32
}

fn map_pixels(frame: &CameraFrame, f: impl Fn(f64) -> f64) -> CameraFrame {
    let mut out = frame.clone();
    for px in &mut out.pixels {
        for c in px.iter_mut() {
            *c = clamp01(f(f64::from(*c)));
        }
    }
    out
}

fn blend(a: [f32; 3], b: [f32; 3], alpha: f64) -> [f32; 3] {
    let mut o = a;
    for i in 0..3 {
        o[i] = clamp01((1.0 - alpha) * f64::from(a[i]) + alpha * f64::from(b[i]));
    }
    o
}

/// Re-images the scene through a camera rotated by the deflection matrix
/// (exact for pure rotation). Regions outside the original field of view are black.
fn deflect(frame: &CameraFrame, p: DeflectionParams) -> CameraFrame {
    let r = deflection_rotation(p);
    warp(frame, |u, v, f, cu, cv| {
        let d = r.apply([1.0, (cu - u) / f, (cv - v) / f]);
        if d[0] <= 1e-6 {
            return None;
        }
        Some((cu - f * d[1] / d[0], cv - f * d[2] / d[0]))
    })
}

/// Translation approximated as a planar shift of a scene at a reference depth.
fn displace(frame: &CameraFrame, dx: f64, dy: f64, dz: f64) -> CameraFrame {
    let scale = DISPLACEMENT_REF_DEPTH / (DISPLACEMENT_REF_DEPTH - dx);
    warp(frame, |u, v, f, cu, cv| {
        let du = f * dy / DISPLACEMENT_REF_DEPTH;
        let dv = f * dz / DISPLACEMENT_REF_DEPTH;
        Some((cu + (u - du - cu) / scale, cv + (v - dv - cv) / scale))
    })
}

/// Nearest-neighbour inverse warp; `map` returns the source position of an
/// output pixel center.
fn warp(frame: &CameraFrame, map: impl Fn(f64, f64, f64, f64, f64) -> Option<(f64, f64)>) -> CameraFrame {
    let f = frame.focal(DEFAULT_HFOV);
    let cu = frame.width as f64 / 2.0;
    let cv = frame.height as f64 / 2.0;
    let mut out = CameraFrame::filled(frame.width, frame.height, [0.0; 3]);
    for y in 0..frame.height {
        for x in 0..frame.width {
            let (u, v) = (x as f64 + 0.5, y as f64 + 0.5);
            if let Some((su, sv)) = map(u, v, f, cu, cv) {
                let (sx, sy) = (su.floor(), sv.floor());
                if sx >= 0.0 && sy >= 0.0 && (sx as usize) < frame.width && (sy as usize) < frame.height {
                    out.set(x, y, frame.get(sx as usize, sy as usize));
                }
            }
        }
    }
    out
}

fn internal_dirt(frame: &CameraFrame, spots: usize, radius: f64, opacity: f64, seed: u64) -> CameraFrame {
    let mut out = frame.clone();
    let mut rng = rng::derived_rng(seed, "internal_dirt", 0);
    for _ in 0..spots {
        let cx = rng.gen::<f64>() * frame.width as f64;
        let cy = rng.gen::<f64>() * frame.height as f64;
        let r = radius * (0.5 + rng.gen::<f64>());
        for_disk(&mut out, cx, cy, r, |px, d2| {
            let fall = 1.0 - d2 / (r * r);
            let k = 1.0 - opacity * fall;
            for c in px.iter_mut() {
                *c = clamp01(f64::from(*c) * k);
            }
        });
    }
    out
}

fn for_disk(frame: &mut CameraFrame, cx: f64, cy: f64, r: f64, mut f: impl FnMut(&mut [f32; 3], f64)) {
    let x0 = (cx - r).floor().max(0.0) as usize;
    let y0 = (cy - r).floor().max(0.0) as usize;
    let x1 = ((cx + r).ceil().max(0.0) as usize).min(frame.width);
    let y1 = ((cy + r).ceil().max(0.0) as usize).min(frame.height);
    for y in y0..y1 {
        for x in x0..x1 {
            let dx = x as f64 + 0.5 - cx;
            let dy = y as f64 + 0.5 - cy;
            let d2 = dx * dx + dy * dy;
            if d2 <= r * r {
                let w = frame.width;
                f(&mut frame.pixels[y * w + x], d2);
            }
        }
    }
}

fn broken_lens(frame: &CameraFrame, model: &FaultModel, inst: &FaultInstance) -> CameraFrame {
    let v = |n: &str| inst.value(model, n);
    let cracks = count(v("cracks"));
    if cracks == 0 {
        return frame.clone();
    }
    let (w, h) = (frame.width as f64, frame.height as f64);
    let ix = v("impact_x") * w;
    let iy = v("impact_y") * h;
    let diag = w.hypot(h);
    let refraction = v("refraction");
    let mut rng = rng::derived_rng(inst.noise_seed, "broken_lens", 0);
    let lines: Vec<(f64, f64, f64)> = (0..cracks)
        .map(|_| {
            let a = rng.gen::<f64>() * std::f64::consts::TAU;
            let len = v("crack_length") * diag * (0.5 + 0.5 * rng.gen::<f64>());
            (a.cos(), a.sin(), len)
        })
        .collect();
    let mut out = frame.clone();
    for y in 0..frame.height {
        for x in 0..frame.width {
            let px = x as f64 + 0.5 - ix;
            let py = y as f64 + 0.5 - iy;
            let mut best: Option<(f64, f64, f64)> = None;
            for &(dx, dy, len) in &lines {
                let t = (px * dx + py * dy).clamp(0.0, len);
                let (ex, ey) = (px - t * dx, py - t * dy);
                let d = ex.hypot(ey);
                if best.is_none_or(|b| d < b.0) {
                    best = Some((d, -dy, dx));
                }
            }
            let Some((d, nx, ny)) = best else { continue };
            if d <= 0.6 {
                out.set(x, y, CRACK);
            } else if d <= 3.0 && refraction > 0.0 {
                let side = if px * nx + py * ny >= 0.0 { 1.0 } else { -1.0 };
                let sx = (x as f64 + side * nx * refraction).round();
                let sy = (y as f64 + side * ny * refraction).round();
                if sx >= 0.0 && sy >= 0.0 && (sx as usize) < frame.width && (sy as usize) < frame.height {
                    out.set(x, y, frame.get(sx as usize, sy as usize));
                }
            }
        }
    }
    out
}

fn box_blur(frame: &CameraFrame, radius: usize) -> CameraFrame {
    if radius == 0 {
        return frame.clone();
    }
    let (w, h) = (frame.width, frame.height);
    let pass = |src: &[[f32; 3]], horizontal: bool| -> Vec<[f32; 3]> {
        let mut dst = vec![[0.0f32; 3]; w * h];
        let n = (2 * radius + 1) as f64;
        for y in 0..h {
            for x in 0..w {
                let mut acc = [0.0f64; 3];
                for k in -(radius as isize)..=(radius as isize) {
                    let (sx, sy) = if horizontal {
                        ((x as isize + k).clamp(0, w as isize - 1) as usize, y)
                    } else {
                        (x, (y as isize + k).clamp(0, h as isize - 1) as usize)
                    };
                    let p = src[sy * w + sx];
                    for c in 0..3 {
                        acc[c] += f64::from(p[c]);
                    }
                }
                dst[y * w + x] = [clamp01(acc[0] / n), clamp01(acc[1] / n), clamp01(acc[2] / n)];
            }
        }
        dst
    };
    let tmp = pass(&frame.pixels, true);
    CameraFrame {
        width: w,
        height: h,
        pixels: pass(&tmp, false),
    }
}

fn scatter_noise(frame: &CameraFrame, sigma: f64, seed: u64) -> CameraFrame {
    if sigma == 0.0 {
        return frame.clone();
    }
    let mut rng = rng::rng(seed);
    let mut out = frame.clone();
    for px in &mut out.pixels {
        for c in px.iter_mut() {
            let z: f64 = StandardNormal.sample(&mut rng);
            *c = clamp01(f64::from(*c) + sigma * z);
        }
    }
    out
}

/// Opaque rectangle of `fraction` of the frame area, kept inside the frame.
pub(crate) fn occlusion_rect(
    width: usize,
    height: usize,
    fraction: f64,
    cx: f64,
    cy: f64,
    aspect: f64,
) -> (f64, f64, f64, f64) {
    let (w, h) = (width as f64, height as f64);
    let area = fraction * w * h;
    let rw = (area * aspect).sqrt().min(w);
    let rh = (area / rw.max(1e-9)).min(h);
    let x0 = (cx * w - rw / 2.0).clamp(0.0, w - rw);
    let y0 = (cy * h - rh / 2.0).clamp(0.0, h - rh);
    (x0, y0, x0 + rw, y0 + rh)
}

fn lens_occlusion(frame: &CameraFrame, fraction: f64, cx: f64, cy: f64, aspect: f64) -> CameraFrame {
    if fraction <= 0.0 {
        return frame.clone();
    }
    let (x0, y0, x1, y1) = occlusion_rect(frame.width, frame.height, fraction, cx, cy, aspect);
    let mut out = frame.clone();
    for y in 0..frame.height {
        let fy = y as f64 + 0.5;
        if fy < y0 || fy > y1 {
            continue;
        }
        for x in 0..frame.width {
            let fx = x as f64 + 0.5;
            if fx >= x0 && fx <= x1 {
                out.set(x, y, OCCLUDER);
            }
        }
    }
    out
}

fn mud_speckle(frame: &CameraFrame, density: f64, radius: f64, seed: u64) -> CameraFrame {
    let area = frame.width as f64 * frame.height as f64;
    let spots = (density * area / (std::f64::consts::PI * radius * radius)).round() as usize;
    let mut out = frame.clone();
    let mut rng = rng::derived_rng(seed, "mud", 0);
    for _ in 0..spots {
        let cx = rng.gen::<f64>() * frame.width as f64;
        let cy = rng.gen::<f64>() * frame.height as f64;
        let r = radius * (0.5 + rng.gen::<f64>());
        for_disk(&mut out, cx, cy, r, |px, _| *px = MUD);
    }
    out
}

fn dust(frame: &CameraFrame, density: f64, opacity: f64, seed: u64) -> CameraFrame {
    if density <= 0.0 {
        return frame.clone();
    }
    let mut rng = rng::derived_rng(seed, "dust", 0);
    let mut out = frame.clone();
    for px in &mut out.pixels {
        if rng.gen::<f64>() < density {
            *px = blend(*px, DUST, opacity);
        }
    }
    out
}

fn disks(frame: &CameraFrame, n: usize, radius: f64, color: [f32; 3], seed: u64) -> CameraFrame {
    let mut out = frame.clone();
    let mut rng = rng::derived_rng(seed, "disks", 0);
    for _ in 0..n {
        let cx = rng.gen::<f64>() * frame.width as f64;
        let cy = rng.gen::<f64>() * frame.height as f64;
        let r = radius * (0.5 + rng.gen::<f64>());
        for_disk(&mut out, cx, cy, r, |px, _| *px = color);
    }
    out
}

fn mist(frame: &CameraFrame, density: f64, veil: f64) -> CameraFrame {
    if density <= 0.0 {
        return frame.clone();
    }
    let v = veil as f32;
    let mut out = frame.clone();
    for px in &mut out.pixels {
        *px = blend(*px, [v, v, v], density);
    }
    out
}

/// Smooth value noise in [0, 1) on an 8-pixel lattice.
fn value_noise(seed: u64, x: f64, y: f64) -> f64 {
    let lattice = |ix: i64, iy: i64| -> f64 {
        let h = rng::derive(seed, "ice.lattice", (ix as u64).wrapping_mul(0x9E37_79B9) ^ (iy as u64));
        (h >> 11) as f64 / (1u64 << 53) as f64
    };
    let (gx, gy) = (x / 8.0, y / 8.0);
    let (ix, iy) = (gx.floor() as i64, gy.floor() as i64);
    let (fx, fy) = (gx - ix as f64, gy - iy as f64);
    let s = |t: f64| t * t * (3.0 - 2.0 * t);
    let (sx, sy) = (s(fx), s(fy));
    let top = lattice(ix, iy) * (1.0 - sx) + lattice(ix + 1, iy) * sx;
    let bot = lattice(ix, iy + 1) * (1.0 - sx) + lattice(ix + 1, iy + 1) * sx;
    top * (1.0 - sy) + bot * sy
}

fn ice(frame: &CameraFrame, coverage: f64, opacity: f64, seed: u64) -> CameraFrame {
    if coverage <= 0.0 {
        return frame.clone();
    }
    let half = frame.width.min(frame.height) as f64 / 2.0;
    let mut out = frame.clone();
    for y in 0..frame.height {
        for x in 0..frame.width {
            let edge = (x.min(frame.width - 1 - x).min(y).min(frame.height - 1 - y)) as f64 / half;
            let n = value_noise(seed, x as f64, y as f64);
            if edge < coverage * (0.7 + 0.6 * n) {
                let i = y * frame.width + x;
                let tex = (0.85 + 0.15 * n) as f32;
                let c = [ICE[0] * tex, ICE[1] * tex, ICE[2] * tex];
                out.pixels[i] = blend(out.pixels[i], c, opacity);
            }
        }
    }
    out
}

/// Channel gains for a warm (`temperature > 0`) or cool shift plus a green tint.
pub fn white_balance_gains(temperature: f64, tint: f64) -> [f64; 3] {
    [1.0 + 0.5 * temperature, 1.0 + 0.3 * tint, 1.0 - 0.5 * temperature]
}

fn white_balance(frame: &CameraFrame, temperature: f64, tint: f64) -> CameraFrame {
    let g = white_balance_gains(temperature, tint);
    let mut out = frame.clone();
    for px in &mut out.pixels {
        for c in 0..3 {
            px[c] = clamp01(f64::from(px[c]) * g[c]);
        }
    }
    out
}

/// Rotation a deflected camera mount applies, for callers that re-render
/// rather than warp.
pub fn camera_mount_rotation(inst: &FaultInstance) -> Result<Option<Mat3>> {
    let model = find_model(&inst.model_id)?;
    if model.id == "camera.deflection" {
        return Ok(Some(deflection_rotation(DeflectionParams::from_instance(model, inst))));
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::faults::{fault_catalog, sample_instance};

    fn textured(w: usize, h: usize, seed: u64) -> CameraFrame {
        let mut rng = rng::rng(seed);
        CameraFrame {
            width: w,
            height: h,
            pixels: (0..w * h).map(|_| [rng.gen(), rng.gen(), rng.gen()]).collect(),
        }
    }

    fn inst(id: &str, values: &[(&str, f64)]) -> FaultInstance {
        let m = find_model(id).unwrap();
        let mut i = m.neutral_instance();
        for (n, v) in values {
            i.values[m.param_index(n).unwrap()] = *v;
        }
        i.noise_seed = 17;
        i
    }

    #[test]
    fn neutral_instances_are_identity() {
        let f = textured(48, 36, 1);
        for m in fault_catalog().iter().filter(|m| m.sensor == Sensor::Camera) {
            let mut i = m.neutral_instance();
            i.noise_seed = 99;
            assert_eq!(apply_camera_fault(&f, &i).unwrap(), f, "{}", m.id);
        }
    }

    #[test]
    fn lens_occlusion_zero_fraction_identity() {
        let f = textured(40, 30, 2);
        let i = inst("camera.lens_occlusion", &[("fraction", 0.0), ("center_x", 0.1)]);
        assert_eq!(apply_camera_fault(&f, &i).unwrap(), f);
    }

    #[test]
    fn overexposure_closed_form() {
        let f = CameraFrame::filled(20, 10, [0.5; 3]);
        for g in [1.0, 1.5, 1.9, 2.0, 3.3, 4.0] {
            let out = apply_camera_fault(&f, &inst("camera.overexposure", &[("gain", g)])).unwrap();
            let expect = (0.5 * g).min(1.0) as f32;
            assert!(out.pixels.iter().all(|p| p.iter().all(|&c| c == expect)), "gain {g}");
        }
    }

    #[test]
    fn warm_white_balance_raises_red_lowers_blue() {
        let f = textured(40, 30, 3);
        let out = apply_camera_fault(&f, &inst("camera.white_balance_shift", &[("temperature", 0.6)])).unwrap();
        assert!(out.channel_mean(0) > f.channel_mean(0));
        assert!(out.channel_mean(2) <= f.channel_mean(2));
    }

    #[test]
    fn lens_occlusion_covers_requested_area() {
        let f = CameraFrame::filled(160, 120, [0.5; 3]);
        let out = apply_camera_fault(&f, &inst("camera.lens_occlusion", &[("fraction", 0.4)])).unwrap();
        let covered = out.pixels.iter().filter(|p| **p == OCCLUDER).count() as f64;
        let frac = covered / (160.0 * 120.0);
        assert!((frac - 0.4).abs() < 0.02, "{frac}");
    }

    #[test]
    fn sampled_faults_stay_in_range_and_repeat() {
        let f = textured(64, 48, 4);
        for m in fault_catalog().iter().filter(|m| m.sensor == Sensor::Camera) {
            for seed in 0..4 {
                let i = sample_instance(m, seed);
                let a = apply_camera_fault_at(&f, &i, 3).unwrap();
                assert!(a.is_valid(), "{}", m.id);
                assert_eq!(a, apply_camera_fault_at(&f, &i, 3).unwrap(), "{}", m.id);
            }
        }
    }

    #[test]
    fn rejects_lidar_models() {
        let f = textured(8, 8, 5);
        let i = find_model("lidar.beam_loss").unwrap().neutral_instance();
        assert!(matches!(apply_camera_fault(&f, &i), Err(FadeError::SensorMismatch { .. })));
    }

    #[test]
    fn blur_preserves_uniform_frames() {
        let f = CameraFrame::filled(30, 20, [0.25, 0.5, 0.75]);
        let out = apply_camera_fault(&f, &inst("camera.blur", &[("radius", 4.0)])).unwrap();
        for p in &out.pixels {
            for c in 0..3 {
                assert!((p[c] - f.pixels[0][c]).abs() < 1e-6);
            }
        }
    }
}
