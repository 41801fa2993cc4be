use fade::faults::{apply_camera_fault_at, apply_lidar_fault_at, fault_catalog, sample_instance, Sensor};
use fade::scenario::obstacle_ahead;
use fade::sensor::{CameraFrame, PointCloud};
use fade::sim::{render_camera, GroundMap, Scanner, SensorRig, World};
use proptest::prelude::*;
use std::sync::LazyLock;

static INPUTS: LazyLock<(CameraFrame, PointCloud)> = LazyLock::new(|| {
    let s = obstacle_ahead(0);
    let w = World::new(&s);
    let rig = SensorRig::default();
    (render_camera(&w, &s.map, &GroundMap::new(&s.map), &rig.camera), Scanner::new(&rig.lidar, rig.lidar.mount).scan(&w))
});

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn sampled_faults_keep_sensor_data_valid(m in 0usize..24, seed in any::<u64>(), frame in 0u64..1000) {
        let model = &fault_catalog()[m];
        let inst = sample_instance(model, seed);
        let (img, cloud) = &*INPUTS;
        let pose = SensorRig::default().lidar.mount;
        match model.sensor {
            Sensor::Camera => {
                let a = apply_camera_fault_at(img, &inst, frame).unwrap();
                prop_assert!(a.is_valid());
                prop_assert_eq!((a.width, a.height), (img.width, img.height));
                prop_assert_eq!(&a, &apply_camera_fault_at(img, &inst, frame).unwrap());
            }
            Sensor::Lidar => {
                let (a, p) = apply_lidar_fault_at(cloud, &pose, &inst, frame).unwrap();
                prop_assert!(a.is_valid());
                prop_assert!((p.rotation.determinant() - 1.0).abs() < 1e-12);
                let (b, q) = apply_lidar_fault_at(cloud, &pose, &inst, frame).unwrap();
                prop_assert_eq!((a, p), (b, q));
            }
        }
    }

    #[test]
    fn kernels_reject_the_other_sensor(m in 0usize..24, seed in any::<u64>()) {
        let model = &fault_catalog()[m];
        let inst = sample_instance(model, seed);
        let (img, cloud) = &*INPUTS;
        let pose = SensorRig::default().lidar.mount;
        match model.sensor {
            Sensor::Camera => prop_assert!(apply_lidar_fault_at(cloud, &pose, &inst, 0).is_err()),
            Sensor::Lidar => prop_assert!(apply_camera_fault_at(img, &inst, 0).is_err()),
        }
    }
}
