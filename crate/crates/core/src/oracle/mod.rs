//! Risk metric, fitness objectives and safety verdicts over paired traces.

pub mod mettc;
pub mod objectives;
pub mod specs;

pub use mettc::{joint_closure, mettc, pair_motion, AxisMotion, pair_ettc, step_ettc, T_CAP};
pub use objectives::{motion_deviation, objectives, risk_gain, Objectives};
pub use specs::{evaluate_specs, svf, SpecConfig, SpecVerdict};
