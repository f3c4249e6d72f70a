use std::f64::consts::{PI, TAU};

use rand::Rng;

use crate::geometry::Pose2;
use crate::kinematics::{JointConfig, Twist};
use crate::physics::{SystemState, Work, World};
use crate::tasks::Task;

use super::tree::{MotionTree, NodeId};
use super::PlannerConfig;

/// Weights of the state metric.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceWeights {
    pub robot: f64,
    pub objects: f64,
    pub angular_scale: f64,
}

impl From<&PlannerConfig> for DistanceWeights {
    fn from(c: &PlannerConfig) -> Self {
        Self {
            robot: c.w_robot,
            objects: c.w_objects,
            angular_scale: c.angular_scale,
        }
    }
}

/// Weighted distance on gripper pose and object positions.
pub fn state_distance(a: &SystemState, b: &SystemState, w: &DistanceWeights) -> f64 {
    assert_eq!(a.objects.len(), b.objects.len(), "states differ in object count");
    let ga = a.gripper;
    let gb = b.gripper;
    // Taken from |a - b| so that the metric is exactly symmetric.
    let turn = (ga.theta - gb.theta).abs().rem_euclid(TAU);
    let gripper = (ga.x - gb.x).hypot(ga.y - gb.y) + w.angular_scale * turn.min(TAU - turn);
    let objects: f64 = a
        .objects
        .iter()
        .zip(&b.objects)
        .map(|(p, q)| (p.x - q.x).hypot(p.y - q.y))
        .sum();
    w.robot * gripper + w.objects * objects
}

/// Random steering target. Only the gripper pose and object poses are
/// meaningful; joints are left empty and the state is marked invalid.
pub fn sample_state<R: Rng + ?Sized>(
    rng: &mut R,
    world: &World,
    task: &dyn Task,
    root: &SystemState,
    cfg: &PlannerConfig,
) -> SystemState {
    let ws = &world.workspace;
    let uniform = |rng: &mut R| {
        Pose2::new(
            rng.random_range(ws.x_min..=ws.x_max),
            rng.random_range(ws.y_min..=ws.y_max),
            rng.random_range(-PI..=PI),
        )
    };
    let gripper = if cfg.goal_bias > 0.0 && rng.random::<f64>() < cfg.goal_bias {
        let c = task.focus(world, root);
        let r = cfg.bias_radius * rng.random::<f64>().sqrt();
        let a = rng.random_range(-PI..PI);
        Pose2::new(c.x + r * a.cos(), c.y + r * a.sin(), rng.random_range(-PI..=PI))
    } else {
        uniform(rng)
    };
    let objects = (0..world.object_count()).map(|_| uniform(rng)).collect();
    SystemState {
        joints: JointConfig(Vec::new()),
        objects,
        gripper,
        valid: false,
    }
}

pub fn sample_twist<R: Rng + ?Sized>(rng: &mut R, cfg: &PlannerConfig, duration: f64) -> Twist {
    Twist::new(
        rng.random_range(-cfg.linear_bound..=cfg.linear_bound),
        rng.random_range(-cfg.linear_bound..=cfg.linear_bound),
        rng.random_range(-cfg.angular_bound..=cfg.angular_bound),
        duration,
    )
}

/// Exact linear scan; ties go to the lowest id.
pub fn nearest(tree: &MotionTree, target: &SystemState, w: &DistanceWeights) -> NodeId {
    let mut best = MotionTree::ROOT;
    let mut best_d = f64::INFINITY;
    for (i, n) in tree.nodes().iter().enumerate() {
        let d = state_distance(&n.state, target, w);
        if d < best_d {
            best = i;
            best_d = d;
        }
    }
    best
}

/// Result of one expansion attempt.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Expansion {
    pub near: NodeId,
    /// Index of the winning candidate.
    pub chosen: usize,
    /// The node added, if the winner projected and stayed valid.
    pub added: Option<NodeId>,
}

/// One round of sample, steer and extend. Every candidate is simulated
/// from the nearest node; the one ending closest to the sample wins
/// (lowest index on ties) and is added only if its projection succeeded
/// and its end state is valid.
pub fn expand_tree<R: Rng + ?Sized>(
    tree: &mut MotionTree,
    rng: &mut R,
    world: &World,
    task: &dyn Task,
    cfg: &PlannerConfig,
    work: &mut Work,
) -> Expansion {
    let duration = cfg.control_duration.unwrap_or_else(|| task.control_duration());
    let w = DistanceWeights::from(cfg);
    let q_rand = sample_state(rng, world, task, &tree.root().state, cfg);
    let near = nearest(tree, &q_rand, &w);
    let from = tree.node(near).state.clone();
    let mut best: Option<(usize, f64, crate::physics::Transition)> = None;
    for k in 0..cfg.candidates {
        let v = sample_twist(rng, cfg, duration);
        let tr = world.transition(&from, &v, work);
        let d = state_distance(&tr.state, &q_rand, &w);
        if best.as_ref().is_none_or(|(_, bd, _)| d < *bd) {
            best = Some((k, d, tr));
        }
    }
    let (chosen, _, tr) = best.expect("at least one candidate");
    let added = match tr.segment {
        Some(seg) if tr.state.valid => {
            let h = task.heuristic(world, &tr.state);
            Some(tree.add(near, tr.state, h, seg))
        }
        _ => None,
    };
    Expansion { near, chosen, added }
}
