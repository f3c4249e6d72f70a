//! Goal criteria and heuristics for grasping, relocating and sorting.

mod grasp;
mod relocate;
mod sort;

use serde::{Deserialize, Serialize};

use crate::geometry::Vec2;
use crate::physics::{SystemState, World};

pub use grasp::{feasible_grasp_angles, GraspTask};
pub use relocate::RelocateTask;
pub use sort::SortTask;

/// A rearrangement task: goal region `g` and heuristic `h`.
pub trait Task: Send + Sync {
    fn name(&self) -> &'static str;

    fn goal(&self, world: &World, state: &SystemState) -> bool;

    /// Lower is better.
    fn heuristic(&self, world: &World, state: &SystemState) -> f64;

    /// Duration of each sampled control.
    fn control_duration(&self) -> f64;

    /// Point the planner's goal bias steers the gripper toward.
    fn focus(&self, world: &World, state: &SystemState) -> Vec2;
}

fn default_eps_alpha() -> f64 {
    0.2
}
fn default_w_d() -> f64 {
    0.7
}
fn default_w_alpha() -> f64 {
    0.3
}
fn default_radius() -> f64 {
    0.1
}
fn default_eps_d() -> f64 {
    0.1
}
fn default_lambda() -> f64 {
    1.0
}

/// Task section of a scenario file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum TaskSpec {
    Grasp {
        target: usize,
        #[serde(default = "default_eps_alpha")]
        eps_alpha: f64,
        #[serde(default = "default_w_d")]
        w_d: f64,
        #[serde(default = "default_w_alpha")]
        w_alpha: f64,
    },
    Relocate {
        target: usize,
        goal: [f64; 2],
        #[serde(default = "default_radius")]
        radius: f64,
    },
    /// Class labels come from the scenario's objects.
    Sort {
        #[serde(default = "default_eps_d")]
        eps_d: f64,
        #[serde(default = "default_lambda")]
        lambda_sep: f64,
        /// Defaults to three times `eps_d`.
        #[serde(default)]
        sep_cap: Option<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TaskError {
    #[error("target index {index} out of range for {count} objects")]
    TargetOutOfRange { index: usize, count: usize },
    #[error("target {0} has no feasible grasp angle for this gripper")]
    Ungraspable(usize),
    #[error("relocate goal ({0}, {1}) lies outside the workspace")]
    GoalOutsideWorkspace(f64, f64),
    #[error("sorting needs at least two non-empty classes")]
    TooFewClasses,
    #[error("invalid task parameter: {0}")]
    BadParameter(&'static str),
}

impl TaskSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            TaskSpec::Grasp { .. } => "grasp",
            TaskSpec::Relocate { .. } => "relocate",
            TaskSpec::Sort { .. } => "sort",
        }
    }

    pub fn target(&self) -> Option<usize> {
        match self {
            TaskSpec::Grasp { target, .. } | TaskSpec::Relocate { target, .. } => Some(*target),
            TaskSpec::Sort { .. } => None,
        }
    }

    /// Validates the parameters against `world` and builds the task.
    /// `classes` holds one label per object.
    pub fn build(&self, world: &World, classes: &[u32]) -> Result<Box<dyn Task>, TaskError> {
        let n = world.object_count();
        let check_target = |t: usize| {
            if t < n {
                Ok(())
            } else {
                Err(TaskError::TargetOutOfRange { index: t, count: n })
            }
        };
        match *self {
            TaskSpec::Grasp { target, eps_alpha, w_d, w_alpha } => {
                check_target(target)?;
                if !(eps_alpha > 0.0) {
                    return Err(TaskError::BadParameter("eps_alpha must be > 0"));
                }
                if !(w_d > 0.0 && w_alpha > 0.0) {
                    return Err(TaskError::BadParameter("grasp weights must be > 0"));
                }
                let posed = world.shapes[target].posed(&Default::default());
                if feasible_grasp_angles(&posed, &world.gripper).is_empty() {
                    return Err(TaskError::Ungraspable(target));
                }
                Ok(Box::new(GraspTask { target, eps_alpha, w_d, w_alpha }))
            }
            TaskSpec::Relocate { target, goal, radius } => {
                check_target(target)?;
                if !(radius > 0.0) {
                    return Err(TaskError::BadParameter("radius must be > 0"));
                }
                let c = Vec2::new(goal[0], goal[1]);
                if !world.workspace.contains(&c) {
                    return Err(TaskError::GoalOutsideWorkspace(goal[0], goal[1]));
                }
                Ok(Box::new(RelocateTask { target, goal: c, radius }))
            }
            TaskSpec::Sort { eps_d, lambda_sep, sep_cap } => {
                if !(eps_d > 0.0) {
                    return Err(TaskError::BadParameter("eps_d must be > 0"));
                }
                if !(lambda_sep >= 0.0) {
                    return Err(TaskError::BadParameter("lambda_sep must be >= 0"));
                }
                if classes.len() != n {
                    return Err(TaskError::BadParameter("need one class label per object"));
                }
                let task = SortTask::new(classes, eps_d, lambda_sep, sep_cap.unwrap_or(3.0 * eps_d))
                    .ok_or(TaskError::TooFewClasses)?;
                Ok(Box::new(task))
            }
        }
    }
}
