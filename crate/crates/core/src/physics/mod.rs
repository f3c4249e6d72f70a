//! Deterministic quasi-static push simulation.
//!
//! Objects only move while something pushes them. Each substep the gripper
//! follows its joint-space control, then penetrations are resolved by
//! Gauss–Seidel sweeps of minimum-translation pushes propagated along contact
//! chains: the body nearer the gripper in the chain is treated as immovable
//! with respect to the one it pushes, bodies at the same chain depth share
//! the correction, obstacles never move.

mod contact;
mod trace;

use std::f64::consts::TAU;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::geometry::{intersect, sat_cost, ConvexPolygon, Pose2, PosedPolygon, Vec2};
use crate::kinematics::{
    forward_kinematics, jacobian_projection_with, ArmModel, ControlSegment, JointConfig,
};

pub use crate::kinematics::Twist;
pub use contact::{Body, Contact};
pub use trace::{parse_trace, replay, write_trace, SubstepRecord, TraceError, TraceEvent, TraceRecorder};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhysicsConfig {
    pub substep: f64,
    pub max_resolution_iters: usize,
    pub rotation_coupling: f64,
    pub contact_tolerance: f64,
}

impl Default for PhysicsConfig {
    fn default() -> Self {
        Self {
            substep: 0.01,
            max_resolution_iters: 32,
            rotation_coupling: 0.3,
            contact_tolerance: 1e-4,
        }
    }
}

impl PhysicsConfig {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.substep > 0.0) {
            return Err("physics.substep must be > 0".into());
        }
        if self.max_resolution_iters < 1 {
            return Err("physics.max_resolution_iters must be >= 1".into());
        }
        if !(0.0..=1.0).contains(&self.rotation_coupling) {
            return Err("physics.rotation_coupling must be in [0, 1]".into());
        }
        if !(self.contact_tolerance > 0.0) {
            return Err("physics.contact_tolerance must be > 0".into());
        }
        Ok(())
    }
}

/// Axis-aligned workspace rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Workspace {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Workspace {
    pub fn contains(&self, p: &Vec2) -> bool {
        p.x >= self.x_min && p.x <= self.x_max && p.y >= self.y_min && p.y <= self.y_max
    }

    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn height(&self) -> f64 {
        self.y_max - self.y_min
    }

    pub fn center(&self) -> Vec2 {
        Vec2::new(
            0.5 * (self.x_min + self.x_max),
            0.5 * (self.y_min + self.y_max),
        )
    }
}

/// Parallel-jaw gripper. The gripper frame sits at the center of the region
/// between the fingers with +x pointing out of the palm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GripperGeometry {
    pub finger_gap: f64,
    pub finger_depth: f64,
    pub finger_width: f64,
    pub palm_depth: f64,
}

impl Default for GripperGeometry {
    fn default() -> Self {
        Self {
            finger_gap: 0.09,
            finger_depth: 0.05,
            finger_width: 0.015,
            palm_depth: 0.02,
        }
    }
}

impl GripperGeometry {
    /// Palm and finger rectangles with their centers in the gripper frame.
    pub fn parts(&self) -> Vec<(ConvexPolygon, Vec2)> {
        let half_span = 0.5 * self.finger_gap + self.finger_width;
        let finger_y = 0.5 * (self.finger_gap + self.finger_width);
        let palm = ConvexPolygon::rectangle(self.palm_depth, 2.0 * half_span)
            .expect("positive palm size");
        let finger = ConvexPolygon::rectangle(self.finger_depth, self.finger_width)
            .expect("positive finger size");
        vec![
            (
                palm,
                Vec2::new(-0.5 * self.finger_depth - 0.5 * self.palm_depth, 0.0),
            ),
            (finger.clone(), Vec2::new(0.0, finger_y)),
            (finger, Vec2::new(0.0, -finger_y)),
        ]
    }

    /// True when the gripper-frame point lies between the fingers.
    pub fn in_finger_region(&self, local: &Vec2) -> bool {
        local.x.abs() <= 0.5 * self.finger_depth && local.y.abs() <= 0.5 * self.finger_gap
    }
}

/// System state `q = (q^R, q^1, ..., q^N)`. `gripper` caches the forward
/// kinematics of `joints`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemState {
    pub joints: JointConfig,
    pub objects: Vec<Pose2>,
    pub gripper: Pose2,
    pub valid: bool,
}

/// Counts of simulated work, used by the work-based planning clock.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Work {
    pub substeps: u64,
    pub vertex_ops: u64,
}

impl Work {
    pub fn add(&mut self, other: Work) {
        self.substeps += other.substeps;
        self.vertex_ops += other.vertex_ops;
    }
}

#[derive(Debug, Clone)]
pub struct Transition {
    pub state: SystemState,
    /// Present iff the twist projected to a valid joint trajectory.
    pub segment: Option<ControlSegment>,
}

/// Static scene plus the arm and gripper: everything the transition function
/// needs besides the state.
#[derive(Debug, Clone)]
pub struct World {
    pub workspace: Workspace,
    pub obstacles: Vec<PosedPolygon>,
    pub shapes: Vec<ConvexPolygon>,
    pub arm: ArmModel,
    pub gripper: GripperGeometry,
    pub config: PhysicsConfig,
    gripper_parts: Vec<(ConvexPolygon, Vec2)>,
}

pub(crate) const INACTIVE: u32 = u32::MAX;

impl World {
    pub fn new(
        workspace: Workspace,
        obstacles: Vec<PosedPolygon>,
        shapes: Vec<ConvexPolygon>,
        arm: ArmModel,
        gripper: GripperGeometry,
        config: PhysicsConfig,
    ) -> Self {
        let gripper_parts = gripper.parts();
        Self {
            workspace,
            obstacles,
            shapes,
            arm,
            gripper,
            config,
            gripper_parts,
        }
    }

    /// Same scene with different movable-object shapes (the planner's model).
    pub fn with_shapes(&self, shapes: Vec<ConvexPolygon>) -> Self {
        assert_eq!(shapes.len(), self.shapes.len());
        Self {
            shapes,
            ..self.clone()
        }
    }

    pub fn object_count(&self) -> usize {
        self.shapes.len()
    }

    /// Builds a state from raw coordinates and evaluates its validity.
    pub fn make_state(&self, joints: JointConfig, objects: Vec<Pose2>) -> SystemState {
        let gripper = forward_kinematics(&self.arm, &joints);
        let mut s = SystemState {
            joints,
            objects,
            gripper,
            valid: true,
        };
        s.valid = self.is_valid(&s);
        s
    }

    pub fn gripper_polygons(&self, pose: &Pose2) -> Vec<PosedPolygon> {
        self.gripper_parts
            .iter()
            .map(|(shape, offset)| {
                let c = pose.transform_point(offset);
                shape.posed(&Pose2 {
                    x: c.x,
                    y: c.y,
                    theta: pose.theta,
                })
            })
            .collect()
    }

    pub fn object_polygon(&self, state: &SystemState, i: usize) -> PosedPolygon {
        self.shapes[i].posed(&state.objects[i])
    }

    pub fn object_polygons(&self, objects: &[Pose2]) -> Vec<PosedPolygon> {
        self.shapes
            .iter()
            .zip(objects)
            .map(|(s, p)| s.posed(p))
            .collect()
    }

    /// Robot-only validity: joint limits, no self-collision between
    /// non-adjacent links or between the gripper and any link but the last,
    /// and no contact with static obstacles.
    pub fn robot_valid(&self, joints: &JointConfig) -> bool {
        self.robot_valid_counted(joints, &mut Work::default())
    }

    fn robot_valid_counted(&self, joints: &JointConfig, work: &mut Work) -> bool {
        if !self.arm.within_limits(joints) {
            return false;
        }
        let links = self.arm.link_polygons(joints);
        for i in 0..links.len() {
            for j in (i + 2)..links.len() {
                if intersect(&links[i], &links[j]).is_some() {
                    return false;
                }
            }
        }
        let gripper = self.gripper_polygons(&forward_kinematics(&self.arm, joints));
        let last = links.len() - 1;
        for g in &gripper {
            for link in &links[..last] {
                if intersect(g, link).is_some() {
                    return false;
                }
            }
        }
        for o in &self.obstacles {
            for p in links.iter().chain(gripper.iter()) {
                work.vertex_ops += sat_cost(o, p);
                if intersect(o, p).is_some() {
                    return false;
                }
            }
        }
        true
    }

    /// Full state validity: robot validity, every object centroid inside the
    /// workspace, and no penetration deeper than the contact tolerance.
    pub fn is_valid(&self, state: &SystemState) -> bool {
        if state.objects.len() != self.shapes.len() {
            return false;
        }
        if !state.objects.iter().all(|p| p.is_finite()) {
            return false;
        }
        if !self.robot_valid(&state.joints) {
            return false;
        }
        if !state
            .objects
            .iter()
            .all(|p| self.workspace.contains(&p.position()))
        {
            return false;
        }
        self.max_penetration(state) <= self.config.contact_tolerance
    }

    /// Deepest penetration among gripper–object, object–object and
    /// object–obstacle pairs.
    pub fn max_penetration(&self, state: &SystemState) -> f64 {
        let polys = self.object_polygons(&state.objects);
        let gripper = self.gripper_polygons(&state.gripper);
        let mut deepest: f64 = 0.0;
        for (i, p) in polys.iter().enumerate() {
            for g in gripper.iter().chain(self.obstacles.iter()) {
                if let Some(m) = intersect(g, p) {
                    deepest = deepest.max(m.depth);
                }
            }
            for q in &polys[i + 1..] {
                if let Some(m) = intersect(p, q) {
                    deepest = deepest.max(m.depth);
                }
            }
        }
        deepest
    }

    /// The transition function: projects `twist` into joint space and pushes
    /// objects along. Never fails; problems yield `valid = false`.
    pub fn step(&self, state: &SystemState, twist: &Twist) -> SystemState {
        self.transition(state, twist, &mut Work::default()).state
    }

    pub fn transition(&self, state: &SystemState, twist: &Twist, work: &mut Work) -> Transition {
        let mut robot_work = Work::default();
        let segment = jacobian_projection_with(
            &self.arm,
            &state.joints,
            twist,
            self.config.substep,
            |q| self.robot_valid_counted(q, &mut robot_work),
        );
        work.add(robot_work);
        match segment {
            Some(seg) => {
                let next = self.advance_inner(state, &seg, work, None, false, 0.0);
                Transition {
                    state: next,
                    segment: Some(seg),
                }
            }
            None => {
                work.substeps += 1;
                let mut s = state.clone();
                s.valid = false;
                Transition {
                    state: s,
                    segment: None,
                }
            }
        }
    }

    /// Replays a joint-space segment. Produces exactly the state that
    /// [`World::transition`] produced when the segment was created.
    pub fn advance(&self, state: &SystemState, segment: &ControlSegment, work: &mut Work) -> SystemState {
        self.advance_inner(state, segment, work, None, true, 0.0)
    }

    /// [`World::advance`] with a per-substep trace; `t0` offsets record times.
    pub fn advance_traced(
        &self,
        state: &SystemState,
        segment: &ControlSegment,
        work: &mut Work,
        recorder: &mut TraceRecorder,
        t0: f64,
    ) -> SystemState {
        self.advance_inner(state, segment, work, Some(recorder), true, t0)
    }

    fn advance_inner(
        &self,
        state: &SystemState,
        segment: &ControlSegment,
        work: &mut Work,
        mut recorder: Option<&mut TraceRecorder>,
        check_robot: bool,
        t0: f64,
    ) -> SystemState {
        let mut joints = state.joints.clone();
        let mut objects = state.objects.clone();
        let mut polys = self.object_polygons(&objects);
        work.vertex_ops += polys.iter().map(|p| p.vertices.len() as u64).sum::<u64>();
        let mut gripper = state.gripper;
        let mut t = t0;
        let mut contacts = Vec::new();
        for sample in &segment.samples {
            work.substeps += 1;
            joints.integrate(&sample.velocity, sample.dt);
            t += sample.dt;
            gripper = forward_kinematics(&self.arm, &joints);
            if check_robot && !self.robot_valid_counted(&joints, work) {
                return SystemState {
                    joints,
                    objects,
                    gripper,
                    valid: false,
                };
            }
            let gpolys = self.gripper_polygons(&gripper);
            let mut levels = vec![INACTIVE; objects.len()];
            let want_contacts = recorder.is_some();
            contacts.clear();
            let ok = contact::resolve(
                self,
                &mut objects,
                &mut polys,
                &mut levels,
                &gpolys,
                work,
                want_contacts.then_some(&mut contacts),
            );
            let inside = objects
                .iter()
                .zip(&levels)
                .all(|(p, l)| *l == INACTIVE || self.workspace.contains(&p.position()));
            if let Some(rec) = recorder.as_deref_mut() {
                rec.push(TraceEvent::Substep(SubstepRecord {
                    time: t,
                    velocity: sample.velocity.clone(),
                    dt: sample.dt,
                    joints: joints.clone(),
                    gripper,
                    objects: objects.clone(),
                    contacts: contacts.clone(),
                }));
            }
            if !ok || !inside {
                return SystemState {
                    joints,
                    objects,
                    gripper,
                    valid: false,
                };
            }
        }
        SystemState {
            joints,
            objects,
            gripper,
            valid: state.valid,
        }
    }

    /// Picks one object uniformly, shoves it along a uniformly random
    /// direction at `speed` for `duration`, and resolves the contacts.
    pub fn perturb<R: Rng + ?Sized>(
        &self,
        state: &SystemState,
        rng: &mut R,
        speed: f64,
        duration: f64,
    ) -> SystemState {
        if state.objects.is_empty() || speed == 0.0 || duration <= 0.0 {
            return state.clone();
        }
        let index = rng.random_range(0..state.objects.len());
        let heading = rng.random_range(0.0..TAU);
        self.perturb_object(state, index, heading, speed, duration, None)
    }

    /// Deterministic core of [`World::perturb`]: the displacement is applied
    /// in substep-sized increments, each followed by contact resolution.
    pub fn perturb_object(
        &self,
        state: &SystemState,
        index: usize,
        heading: f64,
        speed: f64,
        duration: f64,
        recorder: Option<&mut TraceRecorder>,
    ) -> SystemState {
        if let Some(rec) = recorder {
            rec.push(TraceEvent::Perturb {
                object: index,
                heading,
                speed,
                duration,
            });
        }
        let mut objects = state.objects.clone();
        if speed == 0.0 || duration <= 0.0 {
            return state.clone();
        }
        let mut polys = self.object_polygons(&objects);
        let gpolys = self.gripper_polygons(&state.gripper);
        let n = ((duration / self.config.substep).round() as usize).max(1);
        let step = speed * duration / n as f64;
        let d = Vec2::new(heading.cos(), heading.sin()) * step;
        let mut work = Work::default();
        let mut valid = state.valid;
        for _ in 0..n {
            objects[index].x += d.x;
            objects[index].y += d.y;
            polys[index].translate(&d);
            let mut levels = vec![INACTIVE; objects.len()];
            levels[index] = 1;
            let ok = contact::resolve(
                self,
                &mut objects,
                &mut polys,
                &mut levels,
                &gpolys,
                &mut work,
                None,
            );
            let inside = objects
                .iter()
                .zip(&levels)
                .all(|(p, l)| *l == INACTIVE || self.workspace.contains(&p.position()));
            if !ok || !inside {
                valid = false;
                break;
            }
        }
        SystemState {
            joints: state.joints.clone(),
            objects,
            gripper: state.gripper,
            valid,
        }
    }
}
