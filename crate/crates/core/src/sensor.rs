//! Synthetic sensor products: class-coded camera frames and ray-cast point clouds.

use serde::{Deserialize, Serialize};

/// Horizontal field of view assumed by frame-space warps when no rig is known.
pub const DEFAULT_HFOV: f64 = std::f64::consts::FRAC_PI_2;

/// RGB frame with intensities in [0, 1], row-major, top row first.
#[derive(Debug, Clone, PartialEq)]
pub struct CameraFrame {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<[f32; 3]>,
}

impl CameraFrame {
    pub const CHANNELS: usize = 3;

    pub fn filled(width: usize, height: usize, color: [f32; 3]) -> Self {
        Self {
            width,
            height,
            pixels: vec![color; width * height],
        }
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> [f32; 3] {
        self.pixels[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, c: [f32; 3]) {
        self.pixels[y * self.width + x] = c;
    }

    /// Focal length in pixels for a given horizontal field of view.
    pub fn focal(&self, hfov: f64) -> f64 {
        (self.width as f64 / 2.0) / (hfov / 2.0).tan()
    }

    pub fn is_valid(&self) -> bool {
        self.pixels.len() == self.width * self.height
            && self
                .pixels
                .iter()
                .all(|p| p.iter().all(|&c| (0.0..=1.0).contains(&c)))
    }

    pub fn channel_mean(&self, ch: usize) -> f64 {
        if self.pixels.is_empty() {
            return 0.0;
        }
        self.pixels.iter().map(|p| f64::from(p[ch])).sum::<f64>() / self.pixels.len() as f64
    }
}

/// Beam layout of the scanner that produced a cloud.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanGeometry {
    pub beams: u16,
    pub elevation_min: f64,
    pub elevation_max: f64,
    pub azimuth_bins: u32,
    pub max_range: f64,
}

impl ScanGeometry {
    pub fn elevation(&self, beam: u16) -> f64 {
        if self.beams <= 1 {
            return self.elevation_min;
        }
        self.elevation_min
            + (self.elevation_max - self.elevation_min) * f64::from(beam) / f64::from(self.beams - 1)
    }

    pub fn azimuth(&self, bin: u32) -> f64 {
        -std::f64::consts::PI + std::f64::consts::TAU * (f64::from(bin) + 0.5) / f64::from(self.azimuth_bins)
    }

    pub fn azimuth_step(&self) -> f64 {
        std::f64::consts::TAU / f64::from(self.azimuth_bins)
    }

    pub fn elevation_step(&self) -> f64 {
        if self.beams <= 1 {
            return 0.0;
        }
        (self.elevation_max - self.elevation_min) / f64::from(self.beams - 1)
    }
}

impl Default for ScanGeometry {
    fn default() -> Self {
        Self {
            beams: 32,
            elevation_min: -0.30,
            elevation_max: 0.10,
            azimuth_bins: 360,
            max_range: 80.0,
        }
    }
}

/// One return in the sensor frame (x forward, y left, z up).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LidarPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub intensity: f64,
    pub beam: u16,
}

impl LidarPoint {
    pub fn range(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn azimuth(&self) -> f64 {
        self.y.atan2(self.x)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    pub geometry: ScanGeometry,
    pub points: Vec<LidarPoint>,
}

impl PointCloud {
    pub fn empty(geometry: ScanGeometry) -> Self {
        Self {
            geometry,
            points: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn is_valid(&self) -> bool {
        self.points.iter().all(|p| {
            p.x.is_finite()
                && p.y.is_finite()
                && p.z.is_finite()
                && p.beam < self.geometry.beams
                && (0.0..=1.0).contains(&p.intensity)
        })
    }
}
