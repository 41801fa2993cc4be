//! Renders the ego camera view and writes it with and without rain streaks.
//!
//! cargo run --example raindrop_frame -- [out_dir]

use fade::faults::{apply_camera_fault, find_model};
use fade::scenario::obstacle_ahead;
use fade::sensor::CameraFrame;
use fade::sim::{render_camera, GroundMap, SensorRig, World};
use std::path::PathBuf;

fn to_png(frame: &CameraFrame, path: &PathBuf) {
    let img = image::RgbImage::from_fn(frame.width as u32, frame.height as u32, |x, y| {
        let c = frame.get(x as usize, y as usize);
        image::Rgb(c.map(|v| (v.clamp(0.0, 1.0) * 255.0).round() as u8))
    });
    img.save(path).expect("write png");
}

fn main() {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "target/raindrop".into()));
    std::fs::create_dir_all(&out).expect("create output dir");
    let s = obstacle_ahead(0);
    let world = World::new(&s);
    let rig = SensorRig::default();
    let clean = render_camera(&world, &s.map, &GroundMap::new(&s.map), &rig.camera);

    let model = find_model("camera.raindrops").unwrap();
    let mut inst = model.neutral_instance();
    for (name, v) in [("streaks", 50.0), ("length_min", 12.0), ("length_span", 15.0), ("angle_center", 0.2), ("angle_span", 0.1), ("transparency_min", 0.3), ("transparency_span", 0.3)] {
        inst.values[model.param_index(name).unwrap()] = v;
    }
    inst.noise_seed = 11;
    let rainy = apply_camera_fault(&clean, &inst).unwrap();

    let changed = clean.pixels.iter().zip(&rainy.pixels).filter(|(a, b)| a != b).count();
    println!("{}x{} frame, {changed} pixels changed", clean.width, clean.height);
    to_png(&clean, &out.join("clean.png"));
    to_png(&rainy, &out.join("raindrops.png"));
    println!("wrote {}", out.display());
}
