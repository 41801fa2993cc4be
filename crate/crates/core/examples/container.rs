//! Round-trips a camera frame and a point cloud through the binary container.

use fade::faults::container::{decode, encode_cloud, encode_frame, Payload};
use fade::scenario::obstacle_ahead;
use fade::sim::{render_camera, GroundMap, Scanner, SensorRig, World};

fn main() {
    let s = obstacle_ahead(0);
    let w = World::new(&s);
    let rig = SensorRig::default();
    let frame = render_camera(&w, &s.map, &GroundMap::new(&s.map), &rig.camera);
    let cloud = Scanner::new(&rig.lidar, rig.lidar.mount).scan(&w);
    let fb = encode_frame(&frame);
    let cb = encode_cloud(&cloud);
    println!("frame: {} bytes, header {:?}", fb.len(), &fb[..7]);
    println!("cloud: {} points, {} bytes", cloud.len(), cb.len());
    match decode(&fb).unwrap() {
        Payload::Frame(f) => assert_eq!(f, frame),
        _ => unreachable!(),
    }
    match decode(&cb).unwrap() {
        Payload::Cloud(c) => assert_eq!(c, cloud),
        _ => unreachable!(),
    }
    println!("both payloads decode to the original");
}
