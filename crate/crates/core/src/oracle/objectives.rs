//! The two fitness objectives of a paired run.

use super::mettc::mettc;
use crate::sim::Trace;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Objectives {
    /// Risk gain: METTC of the fault-free run minus METTC of the faulty run.
    pub i: f64,
    /// Motion deviation: summed ego waypoint distance over the common prefix.
    pub l: f64,
}

pub fn risk_gain(trace_o: &Trace, trace_f: &Trace) -> f64 {
    mettc(trace_o) - mettc(trace_f)
}

pub fn motion_deviation(trace_o: &Trace, trace_f: &Trace) -> f64 {
    trace_o
        .steps
        .iter()
        .zip(&trace_f.steps)
        .map(|(a, b)| a.ego.position().distance(b.ego.position()))
        .sum()
}

pub fn objectives(trace_o: &Trace, trace_f: &Trace) -> Objectives {
    Objectives { i: risk_gain(trace_o, trace_f), l: motion_deviation(trace_o, trace_f) }
}
