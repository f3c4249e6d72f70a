//! Line-delimited execution traces.
//!
//! ```text
//! # rearrange-trace 1
//! start q=<j0,j1,..> obj=<x,y,th;x,y,th;..>
//! segment vx=<f> vy=<f> omega=<f> duration=<f>
//! sub t=<f> dt=<f> u=<u0,u1,..> q=<..> g=<x,y,th> obj=<..> contacts=<g>2,o2>4,x0>4|->
//! perturb object=<i> heading=<rad> speed=<m/s> duration=<s>
//! ```
//!
//! `sub` lines following a `segment` line form that segment's samples.
//! Floats are written in shortest round-trip form so a trace replays
//! bit-exactly.

use std::fmt::Write as _;

use crate::geometry::Pose2;
use crate::kinematics::{ControlSegment, JointConfig, JointSample, Twist};

use super::{Body, Contact, SystemState, Work, World};

#[derive(Debug, Clone, PartialEq)]
pub struct SubstepRecord {
    pub time: f64,
    pub velocity: Vec<f64>,
    pub dt: f64,
    pub joints: JointConfig,
    pub gripper: Pose2,
    pub objects: Vec<Pose2>,
    pub contacts: Vec<Contact>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TraceEvent {
    Start { joints: JointConfig, objects: Vec<Pose2> },
    Segment(Twist),
    Substep(SubstepRecord),
    Perturb { object: usize, heading: f64, speed: f64, duration: f64 },
}

#[derive(Debug, Clone, Default)]
pub struct TraceRecorder {
    pub events: Vec<TraceEvent>,
}

impl TraceRecorder {
    pub fn push(&mut self, e: TraceEvent) {
        self.events.push(e);
    }

    pub fn start(&mut self, state: &SystemState) {
        self.push(TraceEvent::Start {
            joints: state.joints.clone(),
            objects: state.objects.clone(),
        });
    }

    /// Simulated time of the last recorded substep.
    pub fn last_time(&self) -> f64 {
        self.events
            .iter()
            .rev()
            .find_map(|e| match e {
                TraceEvent::Substep(s) => Some(s.time),
                _ => None,
            })
            .unwrap_or(0.0)
    }

    /// Executed gripper positions, for path rendering.
    pub fn gripper_path(&self) -> Vec<Pose2> {
        self.events
            .iter()
            .filter_map(|e| match e {
                TraceEvent::Substep(s) => Some(s.gripper),
                _ => None,
            })
            .collect()
    }
}

#[derive(Debug, thiserror::Error)]
pub enum TraceError {
    #[error("trace line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("trace has no start line")]
    NoStart,
    #[error("trace object count {got} does not match scene ({want})")]
    ObjectCount { got: usize, want: usize },
}

fn floats(out: &mut String, xs: &[f64]) {
    for (i, x) in xs.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        let _ = write!(out, "{x:?}");
    }
}

fn poses(out: &mut String, ps: &[Pose2]) {
    for (i, p) in ps.iter().enumerate() {
        if i > 0 {
            out.push(';');
        }
        floats(out, &[p.x, p.y, p.theta]);
    }
}

fn body(b: &Body) -> String {
    match b {
        Body::Gripper => "g".into(),
        Body::Object(i) => format!("o{i}"),
        Body::Obstacle(i) => format!("x{i}"),
    }
}

pub fn write_trace(events: &[TraceEvent]) -> String {
    let mut out = String::from("# rearrange-trace 1\n");
    for e in events {
        match e {
            TraceEvent::Start { joints, objects } => {
                out.push_str("start q=");
                floats(&mut out, &joints.0);
                out.push_str(" obj=");
                poses(&mut out, objects);
            }
            TraceEvent::Segment(t) => {
                let _ = write!(
                    out,
                    "segment vx={:?} vy={:?} omega={:?} duration={:?}",
                    t.vx, t.vy, t.omega, t.duration
                );
            }
            TraceEvent::Substep(s) => {
                let _ = write!(out, "sub t={:?} dt={:?} u=", s.time, s.dt);
                floats(&mut out, &s.velocity);
                out.push_str(" q=");
                floats(&mut out, &s.joints.0);
                out.push_str(" g=");
                poses(&mut out, std::slice::from_ref(&s.gripper));
                out.push_str(" obj=");
                poses(&mut out, &s.objects);
                out.push_str(" contacts=");
                if s.contacts.is_empty() {
                    out.push('-');
                }
                for (i, c) in s.contacts.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    let _ = write!(out, "{}>{}", body(&c.pusher), c.pushed);
                }
            }
            TraceEvent::Perturb { object, heading, speed, duration } => {
                let _ = write!(
                    out,
                    "perturb object={object} heading={heading:?} speed={speed:?} duration={duration:?}"
                );
            }
        }
        out.push('\n');
    }
    out
}

struct Fields<'a> {
    line: usize,
    kv: Vec<(&'a str, &'a str)>,
}

impl<'a> Fields<'a> {
    fn err(&self, msg: impl Into<String>) -> TraceError {
        TraceError::Parse { line: self.line, msg: msg.into() }
    }

    fn get(&self, key: &str) -> Result<&'a str, TraceError> {
        self.kv
            .iter()
            .find(|(k, _)| *k == key)
            .map(|(_, v)| *v)
            .ok_or_else(|| self.err(format!("missing field `{key}`")))
    }

    fn f64(&self, key: &str) -> Result<f64, TraceError> {
        let v = self.get(key)?;
        v.parse().map_err(|_| self.err(format!("bad number `{v}` for `{key}`")))
    }

    fn list(&self, key: &str) -> Result<Vec<f64>, TraceError> {
        let v = self.get(key)?;
        if v.is_empty() {
            return Ok(Vec::new());
        }
        v.split(',')
            .map(|x| x.parse().map_err(|_| self.err(format!("bad number `{x}` in `{key}`"))))
            .collect()
    }

    fn poses(&self, key: &str) -> Result<Vec<Pose2>, TraceError> {
        let v = self.get(key)?;
        if v.is_empty() {
            return Ok(Vec::new());
        }
        v.split(';')
            .map(|p| {
                let xs: Vec<f64> = p
                    .split(',')
                    .map(|x| x.parse().map_err(|_| self.err(format!("bad pose `{p}`"))))
                    .collect::<Result<_, _>>()?;
                match xs[..] {
                    // Stored poses are already normalized; keep the bits.
                    [x, y, theta] => Ok(Pose2 { x, y, theta }),
                    _ => Err(self.err(format!("pose `{p}` needs 3 values"))),
                }
            })
            .collect()
    }

    fn contacts(&self) -> Result<Vec<Contact>, TraceError> {
        let v = self.get("contacts")?;
        if v == "-" {
            return Ok(Vec::new());
        }
        v.split(',')
            .map(|c| {
                let (a, b) = c.split_once('>').ok_or_else(|| self.err(format!("bad contact `{c}`")))?;
                let idx = |s: &str| s.parse::<usize>().map_err(|_| self.err(format!("bad contact `{c}`")));
                let pusher = match a.split_at(1) {
                    ("g", "") => Body::Gripper,
                    ("o", i) => Body::Object(idx(i)?),
                    ("x", i) => Body::Obstacle(idx(i)?),
                    _ => return Err(self.err(format!("bad contact `{c}`"))),
                };
                Ok(Contact { pusher, pushed: idx(b)? })
            })
            .collect()
    }
}

pub fn parse_trace(text: &str) -> Result<Vec<TraceEvent>, TraceError> {
    let mut events = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split_whitespace();
        let kind = parts.next().unwrap_or_default();
        let f = Fields {
            line: n + 1,
            kv: parts.filter_map(|t| t.split_once('=')).collect(),
        };
        let e = match kind {
            "start" => TraceEvent::Start {
                joints: JointConfig(f.list("q")?),
                objects: f.poses("obj")?,
            },
            "segment" => TraceEvent::Segment(Twist {
                vx: f.f64("vx")?,
                vy: f.f64("vy")?,
                omega: f.f64("omega")?,
                duration: f.f64("duration")?,
            }),
            "sub" => {
                let g = f.poses("g")?;
                TraceEvent::Substep(SubstepRecord {
                    time: f.f64("t")?,
                    velocity: f.list("u")?,
                    dt: f.f64("dt")?,
                    joints: JointConfig(f.list("q")?),
                    gripper: *g.first().ok_or_else(|| f.err("empty gripper pose"))?,
                    objects: f.poses("obj")?,
                    contacts: f.contacts()?,
                })
            }
            "perturb" => TraceEvent::Perturb {
                object: f
                    .get("object")?
                    .parse()
                    .map_err(|_| f.err("bad object index"))?,
                heading: f.f64("heading")?,
                speed: f.f64("speed")?,
                duration: f.f64("duration")?,
            },
            other => return Err(f.err(format!("unknown record `{other}`"))),
        };
        events.push(e);
    }
    Ok(events)
}

/// Re-simulates a trace from its start line: segments are replayed from
/// their recorded joint velocities and perturbations from their recorded
/// headings. Returns the final simulated state.
pub fn replay(world: &World, events: &[TraceEvent]) -> Result<SystemState, TraceError> {
    let mut it = events.iter().peekable();
    let mut state = match it.next() {
        Some(TraceEvent::Start { joints, objects }) => {
            if objects.len() != world.object_count() {
                return Err(TraceError::ObjectCount {
                    got: objects.len(),
                    want: world.object_count(),
                });
            }
            world.make_state(joints.clone(), objects.clone())
        }
        _ => return Err(TraceError::NoStart),
    };
    let mut work = Work::default();
    while let Some(e) = it.next() {
        match e {
            TraceEvent::Segment(twist) => {
                let mut samples = Vec::new();
                while let Some(TraceEvent::Substep(s)) = it.peek() {
                    samples.push(JointSample { velocity: s.velocity.clone(), dt: s.dt });
                    it.next();
                }
                let seg = ControlSegment { samples, source_twist: *twist };
                state = world.advance(&state, &seg, &mut work);
            }
            TraceEvent::Perturb { object, heading, speed, duration } => {
                state = world.perturb_object(&state, *object, *heading, *speed, *duration, None);
            }
            TraceEvent::Substep(_) | TraceEvent::Start { .. } => {}
        }
    }
    Ok(state)
}
