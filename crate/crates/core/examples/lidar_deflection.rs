//! A pitched LiDAR enclosure makes ground returns look like obstacles.

use fade::ads::lidar::{obstacle_points, perceive_lidar};
use fade::faults::{find_model, lidar::perturb_mount};
use fade::scenario::obstacle_ahead;
use fade::sim::{Scanner, SensorRig, World};

fn main() {
    let mut s = obstacle_ahead(0);
    s.participants.clear();
    let world = World::new(&s);
    let cfg = SensorRig::default().lidar;
    let model = find_model("lidar.deflection").unwrap();
    for eta in [0.0, 0.02, 0.05, 0.1] {
        let mut inst = model.neutral_instance();
        inst.values[model.param_index("eta").unwrap()] = eta;
        let pose = perturb_mount(&cfg.mount, &inst).unwrap();
        let cloud = Scanner::new(&cfg, pose).scan(&world);
        // Perception still assumes the nominal mount.
        let obstacles = obstacle_points(&cloud, &cfg.mount);
        let dets = perceive_lidar(&cloud, &cfg.mount);
        let nearest = dets.iter().filter_map(|d| d.position).map(|p| p.x).filter(|x| *x > 0.0).fold(f64::INFINITY, f64::min);
        println!("eta {eta:>5.2} rad: {:>6} points, {:>5} above ground, {:>3} detections, nearest ahead {nearest:.1} m", cloud.len(), obstacles.len(), dets.len());
    }
}
