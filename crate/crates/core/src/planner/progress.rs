use crate::kinematics::ControlSequence;
use crate::physics::SystemState;

use super::tree::{MotionTree, NodeId};

/// Which condition released a control sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Goal,
    Horizon,
    DepthLimit,
}

impl Branch {
    pub fn as_str(&self) -> &'static str {
        match self {
            Branch::Goal => "goal",
            Branch::Horizon => "horizon",
            Branch::DepthLimit => "depth",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Emit {
    pub branch: Branch,
    pub node: NodeId,
    pub controls: ControlSequence,
}

/// Checks the latest node for goal, sufficient progress from the root, or
/// the depth limit, in that order.
pub fn evaluate_progress(
    tree: &MotionTree,
    goal: &dyn Fn(&SystemState) -> bool,
    p: f64,
    d_max: usize,
) -> Option<Emit> {
    let latest = tree.latest();
    let q_new = tree.node(latest);
    let emit = |branch, node| Some(Emit { branch, node, controls: tree.extract_controls(node) });
    if goal(&q_new.state) {
        return emit(Branch::Goal, latest);
    }
    if tree.root().h - q_new.h > p {
        return emit(Branch::Horizon, latest);
    }
    if tree.depth() == d_max {
        // Lowest h among leaves, lowest id on ties.
        let mut best = latest;
        let mut best_h = f64::INFINITY;
        for id in tree.leaves() {
            let h = tree.node(id).h;
            if h < best_h {
                best = id;
                best_h = h;
            }
        }
        return emit(Branch::DepthLimit, best);
    }
    None
}

/// Decides when a growing tree releases controls for execution.
pub trait HorizonPolicy: Send + Sync {
    fn name(&self) -> &'static str;

    fn evaluate(&self, tree: &MotionTree, goal: &dyn Fn(&SystemState) -> bool) -> Option<Emit>;
}

/// Goal, progress threshold and depth limit.
#[derive(Debug, Clone, Copy)]
pub struct DynamicHorizon {
    pub p: f64,
    pub d_max: usize,
}

impl HorizonPolicy for DynamicHorizon {
    fn name(&self) -> &'static str {
        "dynamic"
    }

    fn evaluate(&self, tree: &MotionTree, goal: &dyn Fn(&SystemState) -> bool) -> Option<Emit> {
        evaluate_progress(tree, goal, self.p, self.d_max)
    }
}

/// Releases controls only once a node reaches the goal region.
#[derive(Debug, Clone, Copy)]
pub struct GoalOnly;

impl HorizonPolicy for GoalOnly {
    fn name(&self) -> &'static str {
        "goal-only"
    }

    fn evaluate(&self, tree: &MotionTree, goal: &dyn Fn(&SystemState) -> bool) -> Option<Emit> {
        let latest = tree.latest();
        goal(&tree.node(latest).state).then(|| Emit {
            branch: Branch::Goal,
            node: latest,
            controls: tree.extract_controls(latest),
        })
    }
}
