//! Records an episode where the stack coasts into a lead vehicle and renders
//! it top-down.
//!
//! cargo run --example replay -- [out_dir]

use fade::ads::{AdsAdapter, RouteInfo, SensorInput};
use fade::harness::replay;
use fade::scenario::obstacle_ahead;
use fade::sim::{run_episode, ControlCommand};
use std::path::PathBuf;

struct Coast;

impl AdsAdapter for Coast {
    fn name(&self) -> &str {
        "coast"
    }
    fn reset(&mut self, _: &RouteInfo) -> fade::Result<()> {
        Ok(())
    }
    fn step(&mut self, _: &SensorInput<'_>) -> fade::Result<ControlCommand> {
        Ok(ControlCommand::default())
    }
}

fn main() {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "target/replay".into()));
    let trace = run_episode(&obstacle_ahead(0), &mut Coast, None, 1).unwrap();
    let files = replay(&trace, &out).unwrap();
    println!("collision: {:?}; {} frames in {}", trace.header.collision, files.len(), out.display());
}
