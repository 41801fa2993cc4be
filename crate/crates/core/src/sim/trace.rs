//! Per-step episode records, stored as JSON lines: one header line followed
//! by one line per simulation step.

use super::world::{ActorState, ControlCommand};
use crate::error::{FadeError, Result};
use crate::faults::Injection;
use crate::geometry::Vec2;
use crate::scenario::{ActorKind, SignalPhase, StopLine};
use serde::{Deserialize, Serialize};
use std::io::{BufRead, Write};

pub const TRACE_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ActorRecord {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<usize>,
    pub kind: ActorKind,
    pub x: f64,
    pub y: f64,
    pub heading: f64,
    pub speed: f64,
    pub length: f64,
    pub width: f64,
    pub vx: f64,
    pub vy: f64,
    pub ax: f64,
    pub ay: f64,
}

impl ActorRecord {
    pub fn from_state(id: Option<usize>, a: &ActorState) -> Self {
        Self {
            id,
            kind: a.kind,
            x: a.position.x,
            y: a.position.y,
            heading: a.heading,
            speed: a.speed,
            length: a.dims.length,
            width: a.dims.width,
            vx: a.velocity.x,
            vy: a.velocity.y,
            ax: a.accel.x,
            ay: a.accel.y,
        }
    }

    pub fn position(&self) -> Vec2 {
        Vec2::new(self.x, self.y)
    }

    pub fn velocity(&self) -> Vec2 {
        Vec2::new(self.vx, self.vy)
    }

    pub fn accel(&self) -> Vec2 {
        Vec2::new(self.ax, self.ay)
    }

    pub fn obb(&self) -> crate::geometry::Obb {
        crate::geometry::Obb::new(self.position(), self.heading, self.length, self.width)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignalState {
    pub north_south: SignalPhase,
    pub east_west: SignalPhase,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    pub step: usize,
    pub t: f64,
    pub ego: ActorRecord,
    pub participants: Vec<ActorRecord>,
    /// Heading of the road under the ego (route heading inside junctions).
    pub road_heading: f64,
    /// Limit of the segment under the ego, if on the road.
    pub speed_limit: Option<f64>,
    pub signal: Option<SignalState>,
    /// Command issued after observing this step.
    pub command: Option<ControlCommand>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollisionRecord {
    pub step: usize,
    pub participant: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceHeader {
    pub schema_version: u32,
    pub scenario_id: String,
    pub seed: u64,
    pub dt: f64,
    pub steps_planned: usize,
    pub ads: String,
    pub injection: Option<Injection>,
    pub destination: Vec2,
    pub stop_lines: Vec<StopLine>,
    pub collision: Option<CollisionRecord>,
    /// Adapter failure that ended the episode early.
    pub aborted: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub header: TraceHeader,
    pub steps: Vec<TraceStep>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
enum Line {
    Header(TraceHeader),
    Step(TraceStep),
}

impl Trace {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn collided(&self) -> bool {
        self.header.collision.is_some()
    }

    pub fn aborted(&self) -> bool {
        self.header.aborted.is_some()
    }

    pub fn write_jsonl(&self, mut w: impl Write) -> std::io::Result<()> {
        let mut line = |l: &Line| -> std::io::Result<()> {
            serde_json::to_writer(&mut w, l)?;
            w.write_all(b"\n")
        };
        line(&Line::Header(self.header.clone()))?;
        for s in &self.steps {
            line(&Line::Step(s.clone()))?;
        }
        Ok(())
    }

    pub fn to_jsonl(&self) -> String {
        let mut buf = Vec::new();
        self.write_jsonl(&mut buf).expect("in-memory write");
        String::from_utf8(buf).expect("json is utf-8")
    }

    /// `origin` names the source in parse errors.
    pub fn read_jsonl(r: impl BufRead, origin: &str) -> Result<Self> {
        let perr = |line: usize, message: String| FadeError::Parse { path: origin.to_owned(), line, message };
        let mut header = None;
        let mut steps = Vec::new();
        for (i, l) in r.lines().enumerate() {
            let l = l.map_err(|e| FadeError::io(origin, e))?;
            if l.trim().is_empty() {
                continue;
            }
            match serde_json::from_str::<Line>(&l).map_err(|e| perr(i + 1, e.to_string()))? {
                Line::Header(h) if header.is_none() && i == 0 => {
                    if h.schema_version != TRACE_VERSION {
                        return Err(perr(1, format!("unsupported trace schema_version {}", h.schema_version)));
                    }
                    header = Some(h)
                }
                Line::Header(_) => return Err(perr(i + 1, "unexpected header line".into())),
                Line::Step(s) => {
                    if header.is_none() {
                        return Err(perr(i + 1, "step before header".into()));
                    }
                    steps.push(s)
                }
            }
        }
        let header = header.ok_or_else(|| perr(1, "missing header line".into()))?;
        Ok(Self { header, steps })
    }
}
