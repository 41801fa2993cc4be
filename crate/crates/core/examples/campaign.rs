//! A small campaign printed as CSV.

use fade::ads::{AdsAdapter, ReferenceAds};
use fade::fuzzer::{run_campaign, FaultTarget, FuzzConfig};
use fade::scenario::obstacle_ahead;

fn main() {
    let scenarios: Vec<_> = (0..2).map(obstacle_ahead).collect();
    let targets: Vec<FaultTarget> = ["lidar.deflection", "camera.brightness"].iter().map(|f| FaultTarget::parse(f).unwrap()).collect();
    let ads = || -> Box<dyn AdsAdapter> { Box::new(ReferenceAds::default()) };
    let cfg = FuzzConfig { budget: Some(6), ..FuzzConfig::default() };
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get());
    let report = run_campaign(&targets, &scenarios, &ads, &cfg, 7, threads).unwrap();
    let csv = fade::harness::io::report_csv(&report.rows).unwrap();
    print!("{}", String::from_utf8(csv).unwrap());
    println!("violations by fault: {:?}", report.sv_by_fault());
}
