use super::{FaultCategory, FaultModel, ParamSpec, Precondition, Sensor};
use crate::error::{FadeError, Result};
use serde::Serialize;
use std::sync::LazyLock;

static CATALOG: LazyLock<Vec<FaultModel>> = LazyLock::new(build_catalog);

/// The 16 camera and 8 LiDAR fault models.
pub fn fault_catalog() -> &'static [FaultModel] {
    &CATALOG
}

pub fn find_model(id: &str) -> Result<&'static FaultModel> {
    CATALOG
        .iter()
        .find(|m| m.id == id)
        .ok_or_else(|| FadeError::UnknownFault(id.to_owned()))
}

/// A camera model paired with a LiDAR model under a shared precondition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoFaultModel {
    pub camera: String,
    pub lidar: String,
    pub pre: Precondition,
}

impl CoFaultModel {
    pub fn id(&self) -> String {
        format!("{}+{}", self.camera, self.lidar)
    }
}

/// Camera×LiDAR pairs whose preconditions are equal and not `none`.
pub fn enumerate_cofaults(catalog: &[FaultModel]) -> Vec<CoFaultModel> {
    let mut out = Vec::new();
    for cam in catalog.iter().filter(|m| m.sensor == Sensor::Camera) {
        for lid in catalog.iter().filter(|m| m.sensor == Sensor::Lidar) {
            if cam.pre == lid.pre && cam.pre != Precondition::None {
                out.push(CoFaultModel {
                    camera: cam.id.clone(),
                    lidar: lid.id.clone(),
                    pre: cam.pre,
                });
            }
        }
    }
    out
}

fn model(
    id: &str,
    sensor: Sensor,
    category: FaultCategory,
    pre: Precondition,
    description: &str,
    params: Vec<ParamSpec>,
) -> FaultModel {
    FaultModel {
        id: id.to_owned(),
        sensor,
        category,
        pre,
        params,
        description: description.to_owned(),
    }
}

fn build_catalog() -> Vec<FaultModel> {
    use FaultCategory::{Active, Passive};
    use Precondition as P;
    use Sensor::{Camera, Lidar};
    let p = ParamSpec::new;
    vec![
        // camera, active
        model(
            "camera.deflection",
            Camera,
            Active,
            P::BumpyRoad,
            "camera body rotated about its optical (roll) and lateral (pitch) axes",
            vec![p("xi", "rad", -0.1, 0.1, 0.0), p("eta", "rad", -0.1, 0.1, 0.0)],
        ),
        model(
            "camera.displacement",
            Camera,
            Active,
            P::BumpyRoad,
            "camera body translated on its mount",
            vec![
                p("dx", "m", -0.2, 0.2, 0.0),
                p("dy", "m", -0.2, 0.2, 0.0),
                p("dz", "m", -0.2, 0.2, 0.0),
            ],
        ),
        model(
            "camera.internal_dirt",
            Camera,
            Active,
            P::None,
            "dark soft-edged spots from dirt inside the housing",
            vec![
                p("spots", "count", 0.0, 30.0, 0.0),
                p("radius", "px", 2.0, 15.0, 2.0),
                p("opacity", "ratio", 0.2, 0.9, 0.2),
            ],
        ),
        model(
            "camera.broken_lens",
            Camera,
            Active,
            P::None,
            "radial crack lines from an impact point with local refraction",
            vec![
                p("cracks", "count", 0.0, 12.0, 0.0),
                p("impact_x", "ratio", 0.0, 1.0, 0.5),
                p("impact_y", "ratio", 0.0, 1.0, 0.5),
                p("crack_length", "ratio", 0.2, 1.0, 0.2),
                p("refraction", "px", 0.0, 4.0, 0.0),
            ],
        ),
        model(
            "camera.brightness_change",
            Camera,
            Active,
            P::None,
            "gain and offset drift of the lens diaphragm",
            vec![p("gain", "ratio", 0.3, 2.0, 1.0), p("offset", "intensity", -0.3, 0.3, 0.0)],
        ),
        model(
            "camera.blur",
            Camera,
            Active,
            P::None,
            "separable box blur from ISP malfunction",
            vec![p("radius", "px", 0.0, 6.0, 0.0)],
        ),
        model(
            "camera.internal_scatter",
            Camera,
            Active,
            P::None,
            "per-channel colour noise from the signal processor",
            vec![p("sigma", "intensity", 0.0, 0.3, 0.0)],
        ),
        // camera, passive
        model(
            "camera.lens_occlusion",
            Camera,
            Passive,
            P::None,
            "opaque rectangle covering part of the lens",
            vec![
                p("fraction", "ratio", 0.0, 0.9, 0.0),
                p("center_x", "ratio", 0.0, 1.0, 0.5),
                p("center_y", "ratio", 0.0, 1.0, 0.5),
                p("aspect", "ratio", 0.5, 2.0, 1.0),
            ],
        ),
        model(
            "camera.external_scatter",
            Camera,
            Passive,
            P::None,
            "opaque mud speckles on the outer lens surface",
            vec![p("density", "ratio", 0.0, 0.2, 0.0), p("radius", "px", 1.0, 6.0, 1.0)],
        ),
        model(
            "camera.dust",
            Camera,
            Passive,
            P::None,
            "low-opacity dust speckle",
            vec![p("density", "ratio", 0.0, 0.6, 0.0), p("opacity", "ratio", 0.05, 0.5, 0.05)],
        ),
        model(
            "camera.raindrops",
            Camera,
            Passive,
            P::Sleet,
            "rain streaks mixing attenuated image and refraction noise",
            vec![
                p("streaks", "count", 0.0, 60.0, 0.0),
                p("length_min", "px", 2.0, 30.0, 2.0),
                p("length_span", "px", 0.0, 30.0, 0.0),
                p("angle_center", "rad", -0.6, 0.6, 0.0),
                p("angle_span", "rad", 0.0, 0.4, 0.0),
                p("transparency_min", "ratio", 0.0, 1.0, 1.0),
                p("transparency_span", "ratio", 0.0, 1.0, 0.0),
                p("sigma", "intensity", 0.0, 0.3, 0.0),
            ],
        ),
        model(
            "camera.snow_grains",
            Camera,
            Passive,
            P::Sleet,
            "opaque white disks of deposited snow",
            vec![p("grains", "count", 0.0, 80.0, 0.0), p("radius", "px", 1.0, 5.0, 1.0)],
        ),
        model(
            "camera.mist",
            Camera,
            Passive,
            P::Humidity,
            "uniform grey veil from lens fogging",
            vec![p("density", "ratio", 0.0, 0.8, 0.0), p("veil", "intensity", 0.6, 1.0, 0.8)],
        ),
        model(
            "camera.ice",
            Camera,
            Passive,
            P::Freezing,
            "textured frost creeping in from the frame border",
            vec![p("coverage", "ratio", 0.0, 0.8, 0.0), p("opacity", "ratio", 0.5, 1.0, 0.5)],
        ),
        model(
            "camera.overexposure",
            Camera,
            Passive,
            P::StrongLight,
            "sensor gain followed by saturation",
            vec![p("gain", "ratio", 1.0, 4.0, 1.0)],
        ),
        model(
            "camera.white_balance_shift",
            Camera,
            Passive,
            P::Sunset,
            "per-channel gain shift toward warm or cool tones",
            vec![p("temperature", "ratio", -1.0, 1.0, 0.0), p("tint", "ratio", -1.0, 1.0, 0.0)],
        ),
        // lidar, active
        model(
            "lidar.deflection",
            Lidar,
            Active,
            P::BumpyRoad,
            "enclosure rotated by the deflection of the vertical",
            vec![p("xi", "rad", -0.1, 0.1, 0.0), p("eta", "rad", -0.1, 0.1, 0.0)],
        ),
        model(
            "lidar.displacement",
            Lidar,
            Active,
            P::BumpyRoad,
            "enclosure translated on its mount",
            vec![
                p("dx", "m", -0.2, 0.2, 0.0),
                p("dy", "m", -0.2, 0.2, 0.0),
                p("dz", "m", -0.2, 0.2, 0.0),
            ],
        ),
        model(
            "lidar.beam_loss",
            Lidar,
            Active,
            P::None,
            "a subset of laser channels stops returning",
            vec![p("fraction", "ratio", 0.0, 1.0, 0.0)],
        ),
        model(
            "lidar.line_fault",
            Lidar,
            Active,
            P::None,
            "per-beam range bias and noise from processing faults",
            vec![
                p("fraction", "ratio", 0.0, 1.0, 0.0),
                p("bias", "m", -0.5, 0.5, 0.0),
                p("sigma", "m", 0.0, 0.5, 0.0),
            ],
        ),
        // lidar, passive
        model(
            "lidar.electromagnetic",
            Lidar,
            Passive,
            P::None,
            "impulse range noise and spurious returns",
            vec![p("rate", "ratio", 0.0, 0.3, 0.0), p("magnitude", "m", 0.5, 20.0, 0.5)],
        ),
        model(
            "lidar.crosstalk",
            Lidar,
            Passive,
            P::None,
            "ghost returns from nearby emitters along sampled bearings",
            vec![
                p("sources", "count", 0.0, 6.0, 0.0),
                p("range", "m", 3.0, 40.0, 3.0),
                p("spread", "m", 0.05, 1.0, 0.05),
            ],
        ),
        model(
            "lidar.rain_snow_pollution",
            Lidar,
            Passive,
            P::Sleet,
            "angular sectors blocked by deposits on the window",
            vec![p("sectors", "count", 0.0, 6.0, 0.0), p("width", "rad", 0.05, 1.2, 0.05)],
        ),
        model(
            "lidar.strong_light",
            Lidar,
            Passive,
            P::StrongLight,
            "reduced measurement range and point dropout",
            vec![p("range_scale", "ratio", 0.2, 1.0, 1.0), p("dropout", "ratio", 0.0, 0.9, 0.0)],
        ),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn catalog_shape() {
        let cat = fault_catalog();
        assert_eq!(cat.len(), 24);
        assert_eq!(cat.iter().filter(|m| m.sensor == Sensor::Camera).count(), 16);
        assert_eq!(cat.iter().filter(|m| m.sensor == Sensor::Lidar).count(), 8);
        let cam_active = cat
            .iter()
            .filter(|m| m.sensor == Sensor::Camera && m.category == FaultCategory::Active)
            .count();
        assert_eq!(cam_active, 7);
        let lid_active = cat
            .iter()
            .filter(|m| m.sensor == Sensor::Lidar && m.category == FaultCategory::Active)
            .count();
        assert_eq!(lid_active, 4);
        let ids: HashSet<_> = cat.iter().map(|m| m.id.as_str()).collect();
        assert_eq!(ids.len(), 24);
    }

    #[test]
    fn catalog_entries_match_taxonomy() {
        let r = find_model("camera.raindrops").unwrap();
        assert_eq!(r.category, FaultCategory::Passive);
        assert_eq!(r.pre, Precondition::Sleet);
        let d = find_model("lidar.deflection").unwrap();
        assert_eq!(d.category, FaultCategory::Active);
        assert_eq!(d.pre, Precondition::BumpyRoad);
    }

    #[test]
    fn param_intervals_are_proper() {
        for m in fault_catalog() {
            for p in &m.params {
                assert!(p.lo.is_finite() && p.hi.is_finite() && p.lo < p.hi, "{} {}", m.id, p.name);
                assert!(p.contains(p.neutral), "{} {}", m.id, p.name);
            }
        }
    }

    #[test]
    fn cofault_enumeration() {
        let co = enumerate_cofaults(fault_catalog());
        let has = |c: &str, l: &str| co.iter().any(|x| x.camera == c && x.lidar == l);
        assert!(has("camera.overexposure", "lidar.strong_light"));
        assert!(has("camera.deflection", "lidar.deflection"));
        assert!(has("camera.displacement", "lidar.displacement"));
        assert!(has("camera.snow_grains", "lidar.rain_snow_pollution"));
        assert!(has("camera.raindrops", "lidar.rain_snow_pollution"));
        assert!(co.iter().all(|x| x.pre != Precondition::None));
        assert_eq!(co.len(), 7);
    }

    #[test]
    fn no_cofaults_without_preconditions() {
        let mut cat = fault_catalog().to_vec();
        for m in &mut cat {
            m.pre = Precondition::None;
        }
        assert!(enumerate_cofaults(&cat).is_empty());
    }
}
