//! Closed-loop driving simulator with a schematic camera and a ray-cast LiDAR.

pub mod episode;
pub mod render;
pub mod rig;
pub mod scan;
pub mod trace;
pub mod world;

pub use episode::{run_episode, run_episode_with, Episode, EpisodeOptions};
pub use render::{render_camera, CameraRenderer, GroundMap};
pub use rig::{CameraConfig, LidarConfig, SensorRig};
pub use scan::Scanner;
pub use trace::{ActorRecord, CollisionRecord, SignalState, Trace, TraceHeader, TraceStep};
pub use world::{ActorState, ControlCommand, World};
