//! Planar and spatial primitives shared by the simulator, perception and oracle.

use serde::{Deserialize, Serialize};
use std::ops::{Add, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn from_angle(theta: f64) -> Self {
        Self::new(theta.cos(), theta.sin())
    }

    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn cross(self, o: Vec2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, o: Vec2) -> f64 {
        (self - o).norm()
    }

    /// Left-hand normal (rotated +90°).
    pub fn perp(self) -> Vec2 {
        Vec2::new(-self.y, self.x)
    }

    pub fn rotate(self, theta: f64) -> Vec2 {
        let (s, c) = theta.sin_cos();
        Vec2::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    pub fn normalized(self) -> Vec2 {
        let n = self.norm();
        if n > 0.0 {
            self * (1.0 / n)
        } else {
            self
        }
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, k: f64) -> Vec2 {
        Vec2::new(self.x * k, self.y * k)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

/// Wraps an angle into (-π, π].
pub fn wrap_angle(a: f64) -> f64 {
    let mut a = a % std::f64::consts::TAU;
    if a <= -std::f64::consts::PI {
        a += std::f64::consts::TAU;
    } else if a > std::f64::consts::PI {
        a -= std::f64::consts::TAU;
    }
    a
}

/// Oriented rectangle footprint (length along heading).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Obb {
    pub center: Vec2,
    pub heading: f64,
    pub length: f64,
    pub width: f64,
}

impl Obb {
    pub fn new(center: Vec2, heading: f64, length: f64, width: f64) -> Self {
        Self {
            center,
            heading,
            length,
            width,
        }
    }

    pub fn axes(&self) -> (Vec2, Vec2) {
        let f = Vec2::from_angle(self.heading);
        (f, f.perp())
    }

    /// Corners in counter-clockwise order starting front-left.
    pub fn corners(&self) -> [Vec2; 4] {
        let (f, l) = self.axes();
        let hf = f * (self.length / 2.0);
        let hl = l * (self.width / 2.0);
        [
            self.center + hf + hl,
            self.center - hf + hl,
            self.center - hf - hl,
            self.center + hf - hl,
        ]
    }

    /// Projection interval of the rectangle on a unit axis.
    pub fn project(&self, axis: Vec2) -> (f64, f64) {
        let (f, l) = self.axes();
        let c = self.center.dot(axis);
        let r = (self.length / 2.0) * f.dot(axis).abs() + (self.width / 2.0) * l.dot(axis).abs();
        (c - r, c + r)
    }

    /// Separating-axis overlap test. Touching edges count as overlap.
    pub fn overlaps(&self, other: &Obb) -> bool {
        let (a0, a1) = self.axes();
        let (b0, b1) = other.axes();
        for axis in [a0, a1, b0, b1] {
            let (p0, p1) = self.project(axis);
            let (q0, q1) = other.project(axis);
            if p1 < q0 || q1 < p0 {
                return false;
            }
        }
        true
    }

    pub fn contains(&self, p: Vec2) -> bool {
        let (f, l) = self.axes();
        let d = p - self.center;
        d.dot(f).abs() <= self.length / 2.0 && d.dot(l).abs() <= self.width / 2.0
    }
}

/// 3×3 row-major matrix used for sensor mount rotations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mat3(pub [[f64; 3]; 3]);

impl Mat3 {
    pub const IDENTITY: Mat3 = Mat3([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);

    pub fn rot_x(a: f64) -> Mat3 {
        let (s, c) = a.sin_cos();
        Mat3([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])
    }

    pub fn rot_y(a: f64) -> Mat3 {
        let (s, c) = a.sin_cos();
        Mat3([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])
    }

    pub fn rot_z(a: f64) -> Mat3 {
        let (s, c) = a.sin_cos();
        Mat3([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
    }

    pub fn mul(&self, o: &Mat3) -> Mat3 {
        let mut r = [[0.0; 3]; 3];
        for (i, row) in r.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = (0..3).map(|k| self.0[i][k] * o.0[k][j]).sum();
            }
        }
        Mat3(r)
    }

    pub fn apply(&self, v: [f64; 3]) -> [f64; 3] {
        let m = &self.0;
        [
            m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
            m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
            m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
        ]
    }

    pub fn transpose(&self) -> Mat3 {
        let m = &self.0;
        Mat3([
            [m[0][0], m[1][0], m[2][0]],
            [m[0][1], m[1][1], m[2][1]],
            [m[0][2], m[1][2], m[2][2]],
        ])
    }

    pub fn determinant(&self) -> f64 {
        let m = &self.0;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    /// Largest absolute element of `self - other`.
    pub fn max_abs_diff(&self, other: &Mat3) -> f64 {
        let mut d: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                d = d.max((self.0[i][j] - other.0[i][j]).abs());
            }
        }
        d
    }
}

/// Rigid sensor mount in the vehicle frame (x forward, y left, z up).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MountPose {
    pub rotation: Mat3,
    pub translation: [f64; 3],
}

impl MountPose {
    pub fn at(translation: [f64; 3]) -> Self {
        Self {
            rotation: Mat3::IDENTITY,
            translation,
        }
    }

    /// Sensor-frame point to vehicle frame.
    pub fn to_vehicle(&self, p: [f64; 3]) -> [f64; 3] {
        let r = self.rotation.apply(p);
        [
            r[0] + self.translation[0],
            r[1] + self.translation[1],
            r[2] + self.translation[2],
        ]
    }

    /// Vehicle-frame point to sensor frame.
    pub fn to_sensor(&self, p: [f64; 3]) -> [f64; 3] {
        let d = [
            p[0] - self.translation[0],
            p[1] - self.translation[1],
            p[2] - self.translation[2],
        ];
        self.rotation.transpose().apply(d)
    }
}

/// Arc-length parameterized polyline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "Vec<Vec2>", into = "Vec<Vec2>")]
pub struct Polyline {
    points: Vec<Vec2>,
    cumulative: Vec<f64>,
}

impl From<Vec<Vec2>> for Polyline {
    fn from(points: Vec<Vec2>) -> Self {
        Polyline::new(points)
    }
}

impl From<Polyline> for Vec<Vec2> {
    fn from(p: Polyline) -> Self {
        p.points
    }
}

/// Result of projecting a point onto a polyline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Projection {
    pub station: f64,
    /// Signed offset, positive to the left of travel direction.
    pub lateral: f64,
    pub heading: f64,
}

impl Polyline {
    pub fn new(points: Vec<Vec2>) -> Self {
        let mut cumulative = Vec::with_capacity(points.len());
        let mut acc = 0.0;
        for (i, p) in points.iter().enumerate() {
            if i > 0 {
                acc += p.distance(points[i - 1]);
            }
            cumulative.push(acc);
        }
        Self { points, cumulative }
    }

    pub fn points(&self) -> &[Vec2] {
        &self.points
    }

    pub fn length(&self) -> f64 {
        self.cumulative.last().copied().unwrap_or(0.0)
    }

    pub fn start(&self) -> Vec2 {
        self.points[0]
    }

    pub fn end(&self) -> Vec2 {
        *self.points.last().expect("non-empty polyline")
    }

    fn segment_index(&self, s: f64) -> usize {
        if self.points.len() < 2 {
            return 0;
        }
        let idx = self.cumulative.partition_point(|&c| c <= s);
        idx.saturating_sub(1).min(self.points.len() - 2)
    }

    /// Point and heading at arc length `s`, clamped to the polyline ends.
    pub fn sample(&self, s: f64) -> (Vec2, f64) {
        if self.points.len() < 2 {
            return (self.points[0], 0.0);
        }
        let s = s.clamp(0.0, self.length());
        let i = self.segment_index(s);
        let a = self.points[i];
        let b = self.points[i + 1];
        let seg = self.cumulative[i + 1] - self.cumulative[i];
        let t = if seg > 0.0 {
            (s - self.cumulative[i]) / seg
        } else {
            0.0
        };
        let d = b - a;
        (a + d * t, d.y.atan2(d.x))
    }

    pub fn heading_at(&self, s: f64) -> f64 {
        self.sample(s).1
    }

    /// Nearest-point projection. Stations beyond the ends extrapolate along
    /// the end tangents so callers can tell "before start" from "past end".
    pub fn project(&self, p: Vec2) -> Projection {
        if self.points.len() < 2 {
            let d = p - self.points[0];
            return Projection {
                station: d.x,
                lateral: d.y,
                heading: 0.0,
            };
        }
        let mut best = (f64::INFINITY, 0.0, 0.0, 0.0);
        let last = self.points.len() - 2;
        for i in 0..=last {
            let a = self.points[i];
            let b = self.points[i + 1];
            let d = b - a;
            let len2 = d.dot(d);
            if len2 == 0.0 {
                continue;
            }
            let mut t = (p - a).dot(d) / len2;
            if i > 0 {
                t = t.max(0.0);
            }
            if i < last {
                t = t.min(1.0);
            }
            let q = a + d * t;
            let dist = p.distance(q);
            if dist < best.0 {
                let len = len2.sqrt();
                let lateral = d.cross(p - a) / len;
                best = (dist, self.cumulative[i] + t * len, lateral, d.y.atan2(d.x));
            }
        }
        Projection {
            station: best.1,
            lateral: best.2,
            heading: best.3,
        }
    }

    /// Polyline shifted sideways by `offset` (positive = left).
    pub fn offset(&self, offset: f64) -> Polyline {
        let n = self.points.len();
        if n < 2 || offset == 0.0 {
            return self.clone();
        }
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let dir = if i == 0 {
                self.points[1] - self.points[0]
            } else if i == n - 1 {
                self.points[n - 1] - self.points[n - 2]
            } else {
                (self.points[i + 1] - self.points[i]).normalized()
                    + (self.points[i] - self.points[i - 1]).normalized()
            };
            out.push(self.points[i] + dir.normalized().perp() * offset);
        }
        Polyline::new(out)
    }

    /// Polyline sampled from `s0` to `s1` at roughly `step` spacing.
    pub fn resample(&self, s0: f64, s1: f64, step: f64) -> Vec<Vec2> {
        let n = (((s1 - s0) / step).ceil() as usize).max(1);
        (0..=n)
            .map(|i| self.sample(s0 + (s1 - s0) * i as f64 / n as f64).0)
            .collect()
    }
}
