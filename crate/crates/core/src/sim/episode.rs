//! Closed-loop episode: render, corrupt, drive, step, record.

use super::render::{CameraRenderer, GroundMap};
use super::rig::SensorRig;
use super::scan::Scanner;
use super::trace::{ActorRecord, CollisionRecord, SignalState, Trace, TraceHeader, TraceStep, TRACE_VERSION};
use super::world::World;
use crate::ads::{AdsAdapter, Odometry, RouteInfo, SensorInput};
use crate::error::{FadeError, Result};
use crate::faults::{apply_camera_fault_at, find_model, lidar::corrupt_cloud, lidar::perturb_mount, Injection, Sensor};
use crate::scenario::{Approach, Scenario, SegmentKind};
use crate::sensor::{CameraFrame, PointCloud};

#[derive(Debug, Clone, Default)]
pub struct EpisodeOptions {
    pub rig: SensorRig,
    /// Keep every sensor frame the stack saw (memory heavy).
    pub keep_frames: bool,
}

#[derive(Debug, Clone)]
pub struct Episode {
    pub trace: Trace,
    pub frames: Vec<(CameraFrame, PointCloud)>,
}

/// Runs one episode with the default rig. Invalid injections are errors;
/// adapter failures end the episode and are recorded in the trace header.
pub fn run_episode(scenario: &Scenario, ads: &mut dyn AdsAdapter, injection: Option<&Injection>, seed: u64) -> Result<Trace> {
    run_episode_with(scenario, ads, injection, seed, &EpisodeOptions::default()).map(|e| e.trace)
}

pub fn run_episode_with(
    scenario: &Scenario,
    ads: &mut dyn AdsAdapter,
    injection: Option<&Injection>,
    seed: u64,
    opts: &EpisodeOptions,
) -> Result<Episode> {
    let rig = &opts.rig;
    let mut camera_faults = Vec::new();
    let mut lidar_faults = Vec::new();
    let mut lidar_pose = rig.lidar.mount;
    for inst in injection.map(Injection::instances).unwrap_or_default() {
        let model = find_model(&inst.model_id)?;
        model.validate(inst)?;
        match model.sensor {
            Sensor::Camera => camera_faults.push(inst),
            Sensor::Lidar => {
                lidar_pose = perturb_mount(&lidar_pose, inst)?;
                lidar_faults.push(inst);
            }
        }
    }
    let scanner = Scanner::new(&rig.lidar, lidar_pose);
    let ground = GroundMap::new(&scenario.map);
    let camera = CameraRenderer::new(&rig.camera);

    let mut header = TraceHeader {
        schema_version: TRACE_VERSION,
        scenario_id: scenario.id.clone(),
        seed,
        dt: scenario.dt,
        steps_planned: scenario.steps,
        ads: ads.name().to_owned(),
        injection: injection.cloned(),
        destination: scenario.destination(),
        stop_lines: scenario.map.stop_lines.clone(),
        collision: None,
        aborted: None,
    };
    let mut steps: Vec<TraceStep> = Vec::with_capacity(scenario.steps);
    let mut frames = Vec::new();

    let route = RouteInfo {
        route: scenario.ego.route.clone(),
        destination_station: scenario.ego.destination_station,
        map: scenario.map.clone(),
        dt: scenario.dt,
    };
    if let Err(e) = ads.reset(&route) {
        header.aborted = Some(e.to_string());
        return Ok(Episode { trace: Trace { header, steps }, frames });
    }

    let mut world = World::new(scenario);
    for k in 0..scenario.steps {
        steps.push(record(scenario, &world));
        if let Some(p) = world.collision() {
            header.collision = Some(CollisionRecord { step: k, participant: p });
            break;
        }
        let mut frame = camera.render(&world, &scenario.map, &ground);
        for inst in &camera_faults {
            frame = apply_camera_fault_at(&frame, inst, k as u64)?;
        }
        let mut cloud = scanner.scan(&world);
        for inst in &lidar_faults {
            cloud = corrupt_cloud(&cloud, inst, k as u64)?;
        }
        let input = SensorInput {
            step: k,
            time: world.time,
            frame: &frame,
            cloud: &cloud,
            odometry: Odometry {
                position: world.ego.position,
                heading: world.ego.heading,
                speed: world.ego.speed,
                steer: world.ego_steer,
            },
        };
        let cmd = match ads.step(&input) {
            Ok(c) => c,
            Err(e) => {
                header.aborted = Some(match e {
                    FadeError::Adapter(m) => m,
                    other => other.to_string(),
                });
                break;
            }
        };
        steps.last_mut().expect("pushed above").command = Some(cmd);
        if opts.keep_frames {
            frames.push((frame, cloud));
        }
        world.step(scenario, cmd, scenario.dt);
    }
    Ok(Episode { trace: Trace { header, steps }, frames })
}

fn record(s: &Scenario, w: &World) -> TraceStep {
    let seg = s.map.segment_at(w.ego.position);
    let road_heading = match seg {
        Some(g) if g.kind == SegmentKind::Road => g.centerline.project(w.ego.position).heading,
        _ => {
            let st = s.ego.route.project(w.ego.position).station;
            s.ego.route.heading_at(st)
        }
    };
    TraceStep {
        step: w.step,
        t: w.time,
        ego: ActorRecord::from_state(None, &w.ego),
        participants: w
            .actors
            .iter()
            .zip(&s.participants)
            .map(|(a, p)| ActorRecord::from_state(Some(p.id), a))
            .collect(),
        road_heading,
        speed_limit: seg.map(|g| g.v_max),
        signal: s.map.signal.as_ref().map(|sig| SignalState {
            north_south: sig.phase(Approach::NorthSouth, w.time),
            east_west: sig.phase(Approach::EastWest, w.time),
        }),
        command: None,
    }
}
