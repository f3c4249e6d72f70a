use serde::{Deserialize, Serialize};

/// Planner parameters. `control_duration` of `None` uses the task's own.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlannerConfig {
    /// Candidate controls per expansion (M).
    pub candidates: usize,
    /// Progress threshold p, in heuristic units.
    pub progress_threshold: f64,
    /// Tree depth limit D_max.
    pub max_depth: usize,
    /// Planning-time budget in seconds.
    pub time_budget: f64,
    pub linear_bound: f64,
    pub angular_bound: f64,
    pub control_duration: Option<f64>,
    pub w_robot: f64,
    pub w_objects: f64,
    /// Meters per radian in the gripper distance term.
    pub angular_scale: f64,
    pub goal_bias: f64,
    pub bias_radius: f64,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        Self {
            candidates: 10,
            progress_threshold: 0.1,
            max_depth: 10,
            time_budget: 60.0,
            linear_bound: 0.2,
            angular_bound: 1.0,
            control_duration: None,
            w_robot: 1.0,
            w_objects: 0.5,
            angular_scale: 0.1,
            goal_bias: 0.0,
            bias_radius: 0.05,
        }
    }
}

impl PlannerConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.candidates < 1 {
            return Err("planner.candidates must be >= 1".into());
        }
        if !(self.progress_threshold > 0.0) {
            return Err("planner.progress_threshold must be > 0".into());
        }
        if self.max_depth < 1 {
            return Err("planner.max_depth must be >= 1".into());
        }
        if !(self.time_budget > 0.0) {
            return Err("planner.time_budget must be > 0".into());
        }
        if !(self.linear_bound > 0.0 && self.angular_bound > 0.0) {
            return Err("planner control bounds must be > 0".into());
        }
        if let Some(d) = self.control_duration {
            if !(d > 0.0) {
                return Err("planner.control_duration must be > 0".into());
            }
        }
        if !(self.w_robot >= 0.0 && self.w_objects >= 0.0 && self.angular_scale >= 0.0) {
            return Err("planner distance weights must be >= 0".into());
        }
        if !(0.0..1.0).contains(&self.goal_bias) {
            return Err("planner.goal_bias must be in [0, 1)".into());
        }
        if !(self.bias_radius >= 0.0) {
            return Err("planner.bias_radius must be >= 0".into());
        }
        Ok(())
    }
}
