//! Fault-injection differential fuzzing for camera/LiDAR fusion driving stacks.

pub mod ads;
pub mod error;
pub mod faults;
pub mod fuzzer;
pub mod geometry;
pub mod harness;
pub mod oracle;
pub mod rng;
pub mod scenario;
pub mod sensor;
pub mod sim;

pub use error::{FadeError, Result};
