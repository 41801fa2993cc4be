//! Little-endian binary container for frames and clouds.
//!
//! ```text
//! "FADE" | version: u16 | kind: u8 (1 = frame, 2 = cloud) | payload
//! frame: width u32 | height u32 | width*height*3 f32 (row-major RGB)
//! cloud: beams u16 | elev_min f64 | elev_max f64 | az_bins u32 | max_range f64
//!        | n u32 | n * (x f64, y f64, z f64, intensity f64, beam u16)
//! ```

use crate::error::{FadeError, Result};
use crate::sensor::{CameraFrame, LidarPoint, PointCloud, ScanGeometry};
use byteorder::{LittleEndian as LE, ReadBytesExt, WriteBytesExt};
use std::io::{Cursor, Read};

pub const MAGIC: &[u8; 4] = b"FADE";
pub const VERSION: u16 = 1;
const KIND_FRAME: u8 = 1;
const KIND_CLOUD: u8 = 2;

#[derive(Debug, Clone, PartialEq)]
pub enum Payload {
    Frame(CameraFrame),
    Cloud(PointCloud),
}

fn header(kind: u8, cap: usize) -> Vec<u8> {
    let mut buf = Vec::with_capacity(7 + cap);
    buf.extend_from_slice(MAGIC);
    buf.write_u16::<LE>(VERSION).unwrap();
    buf.write_u8(kind).unwrap();
    buf
}

pub fn encode_frame(frame: &CameraFrame) -> Vec<u8> {
    let mut buf = header(KIND_FRAME, 8 + frame.pixels.len() * 12);
    buf.write_u32::<LE>(frame.width as u32).unwrap();
    buf.write_u32::<LE>(frame.height as u32).unwrap();
    for px in &frame.pixels {
        for &c in px {
            buf.write_f32::<LE>(c).unwrap();
        }
    }
    buf
}

pub fn encode_cloud(cloud: &PointCloud) -> Vec<u8> {
    let g = &cloud.geometry;
    let mut buf = header(KIND_CLOUD, 34 + cloud.points.len() * 34);
    buf.write_u16::<LE>(g.beams).unwrap();
    buf.write_f64::<LE>(g.elevation_min).unwrap();
    buf.write_f64::<LE>(g.elevation_max).unwrap();
    buf.write_u32::<LE>(g.azimuth_bins).unwrap();
    buf.write_f64::<LE>(g.max_range).unwrap();
    buf.write_u32::<LE>(cloud.points.len() as u32).unwrap();
    for p in &cloud.points {
        for v in [p.x, p.y, p.z, p.intensity] {
            buf.write_f64::<LE>(v).unwrap();
        }
        buf.write_u16::<LE>(p.beam).unwrap();
    }
    buf
}

fn truncated(e: std::io::Error) -> FadeError {
    FadeError::Container(format!("truncated payload ({e})"))
}

pub fn decode(bytes: &[u8]) -> Result<Payload> {
    let mut r = Cursor::new(bytes);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic).map_err(truncated)?;
    if &magic != MAGIC {
        return Err(FadeError::Container("bad magic".into()));
    }
    let version = r.read_u16::<LE>().map_err(truncated)?;
    if version != VERSION {
        return Err(FadeError::Container(format!("unsupported version {version}")));
    }
    let payload = match r.read_u8().map_err(truncated)? {
        KIND_FRAME => Payload::Frame(read_frame(&mut r)?),
        KIND_CLOUD => Payload::Cloud(read_cloud(&mut r)?),
        k => return Err(FadeError::Container(format!("unknown payload kind {k}"))),
    };
    if (r.position() as usize) != bytes.len() {
        return Err(FadeError::Container("trailing bytes".into()));
    }
    Ok(payload)
}

fn read_frame(r: &mut Cursor<&[u8]>) -> Result<CameraFrame> {
    let width = r.read_u32::<LE>().map_err(truncated)? as usize;
    let height = r.read_u32::<LE>().map_err(truncated)? as usize;
    let n = width
        .checked_mul(height)
        .filter(|n| n.saturating_mul(12) <= r.get_ref().len())
        .ok_or_else(|| FadeError::Container("frame dimensions exceed payload".into()))?;
    let mut pixels = Vec::with_capacity(n);
    for _ in 0..n {
        let mut px = [0.0f32; 3];
        r.read_f32_into::<LE>(&mut px).map_err(truncated)?;
        pixels.push(px);
    }
    Ok(CameraFrame { width, height, pixels })
}

fn read_cloud(r: &mut Cursor<&[u8]>) -> Result<PointCloud> {
    let geometry = ScanGeometry {
        beams: r.read_u16::<LE>().map_err(truncated)?,
        elevation_min: r.read_f64::<LE>().map_err(truncated)?,
        elevation_max: r.read_f64::<LE>().map_err(truncated)?,
        azimuth_bins: r.read_u32::<LE>().map_err(truncated)?,
        max_range: r.read_f64::<LE>().map_err(truncated)?,
    };
    let n = r.read_u32::<LE>().map_err(truncated)? as usize;
    if n.saturating_mul(34) > r.get_ref().len() {
        return Err(FadeError::Container("point count exceeds payload".into()));
    }
    let mut points = Vec::with_capacity(n);
    for _ in 0..n {
        let mut v = [0.0f64; 4];
        r.read_f64_into::<LE>(&mut v).map_err(truncated)?;
        points.push(LidarPoint {
            x: v[0],
            y: v[1],
            z: v[2],
            intensity: v[3],
            beam: r.read_u16::<LE>().map_err(truncated)?,
        });
    }
    Ok(PointCloud { geometry, points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn header_layout() {
        let b = encode_frame(&CameraFrame::filled(2, 1, [0.5; 3]));
        assert_eq!(&b[..4], b"FADE");
        assert_eq!(&b[4..6], &[1, 0]);
        assert_eq!(b[6], 1);
        assert_eq!(b.len(), 7 + 8 + 2 * 12);
    }

    #[test]
    fn rejects_garbage() {
        assert!(decode(b"NOPE").is_err());
        let mut b = encode_cloud(&PointCloud::empty(ScanGeometry::default()));
        b.push(0);
        assert!(decode(&b).is_err());
        let b = encode_frame(&CameraFrame::filled(4, 4, [0.1; 3]));
        assert!(decode(&b[..b.len() - 1]).is_err());
    }

    proptest! {
        #[test]
        fn frame_round_trip(w in 1usize..12, h in 1usize..12, v in proptest::collection::vec(0.0f32..=1.0, 432)) {
            let pixels = (0..w * h).map(|i| [v[3 * i], v[3 * i + 1], v[3 * i + 2]]).collect();
            let f = CameraFrame { width: w, height: h, pixels };
            prop_assert_eq!(decode(&encode_frame(&f)).unwrap(), Payload::Frame(f));
        }

        #[test]
        fn cloud_round_trip(pts in proptest::collection::vec((-80.0f64..80.0, -80.0f64..80.0, -5.0f64..5.0, 0.0f64..=1.0, 0u16..32), 0..64)) {
            let c = PointCloud {
                geometry: ScanGeometry::default(),
                points: pts.into_iter().map(|(x, y, z, intensity, beam)| LidarPoint { x, y, z, intensity, beam }).collect(),
            };
            prop_assert_eq!(decode(&encode_cloud(&c)).unwrap(), Payload::Cloud(c));
        }
    }
}
