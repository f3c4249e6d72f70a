//! Scenario files (TOML).
//!
//! ```toml
//! name = "relocate-1"
//! reduce_rate = 0.1              # optional, planner-side vertex reduction
//!
//! [workspace]
//! x_min = -0.45
//! x_max = 0.45
//! y_min = 0.0
//! y_max = 0.7
//!
//! [arm]
//! base = [0.0, -0.4, 1.5707963267948966]
//! links = [0.5, 0.45, 0.35, 0.08]
//! joint_limits = [[-2.8, 2.8], [-2.8, 2.8], [-2.8, 2.8], [-2.8, 2.8]]
//! manipulability_threshold = 0.001
//! link_width = 0.04
//! start = [1.6484, -1.9986, -1.4043, 1.7544]  # initial joint angles
//!
//! [gripper]                      # optional, defaults shown in GripperGeometry
//! [physics]                      # optional, PhysicsConfig fields
//! [planner]                      # optional, PlannerConfig fields
//!
//! [task]
//! kind = "relocate"              # or "grasp" / "sort"
//! target = 0
//! goal = [0.1, 0.3]
//!
//! [[objects]]
//! shape = { kind = "box", width = 0.04, height = 0.04 }
//! pose = [-0.15, 0.3, 0.0]
//! class = 0
//!
//! [[obstacles]]
//! shape = { kind = "regular", sides = 6, radius = 0.04 }
//! pose = [0.3, 0.55, 0.0]
//!
//! [[planner_model]]              # optional: one shape per object, planner only
//! kind = "box"
//! width = 0.05
//! height = 0.05
//! ```
//!
//! Shape kinds: `box {width, height}`, `regular {sides, radius}`,
//! `ellipse {sides, a, b}`, `polygon {vertices = [[x, y], ...]}`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::geometry::{simplify, ConvexPolygon, GeometryError, Pose2, Vec2};
use crate::kinematics::{ArmModel, JointConfig, KinematicsError};
use crate::physics::{GripperGeometry, PhysicsConfig, SystemState, Workspace, World};
use crate::planner::PlannerConfig;
use crate::tasks::{Task, TaskError, TaskSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ShapeSpec {
    Box { width: f64, height: f64 },
    Regular { sides: usize, radius: f64 },
    Ellipse { sides: usize, a: f64, b: f64 },
    Polygon { vertices: Vec<[f64; 2]> },
}

impl ShapeSpec {
    pub fn build(&self) -> Result<ConvexPolygon, GeometryError> {
        match self {
            ShapeSpec::Box { width, height } => ConvexPolygon::rectangle(*width, *height),
            ShapeSpec::Regular { sides, radius } => ConvexPolygon::regular(*sides, *radius),
            ShapeSpec::Ellipse { sides, a, b } => ConvexPolygon::ellipse(*sides, *a, *b),
            ShapeSpec::Polygon { vertices } => {
                ConvexPolygon::new(vertices.iter().map(|v| Vec2::new(v[0], v[1])).collect())
            }
        }
    }

    pub fn from_polygon(p: &ConvexPolygon) -> Self {
        ShapeSpec::Polygon {
            vertices: p.vertices().iter().map(|v| [v.x, v.y]).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectSpec {
    pub shape: ShapeSpec,
    pub pose: [f64; 3],
    #[serde(default)]
    pub class: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObstacleSpec {
    pub shape: ShapeSpec,
    pub pose: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArmSpec {
    pub base: [f64; 3],
    pub links: Vec<f64>,
    pub joint_limits: Vec<[f64; 2]>,
    #[serde(default = "default_threshold")]
    pub manipulability_threshold: f64,
    #[serde(default = "default_link_width")]
    pub link_width: f64,
    pub start: Vec<f64>,
}

fn default_threshold() -> f64 {
    1e-3
}

fn default_link_width() -> f64 {
    0.04
}

impl ArmSpec {
    pub fn build(&self) -> Result<ArmModel, KinematicsError> {
        ArmModel::new(
            pose(&self.base),
            self.links.clone(),
            self.joint_limits.iter().map(|l| (l[0], l[1])).collect(),
            self.manipulability_threshold,
            self.link_width,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default)]
    pub name: String,
    pub workspace: Workspace,
    pub arm: ArmSpec,
    #[serde(default)]
    pub gripper: GripperGeometry,
    #[serde(default)]
    pub physics: PhysicsConfig,
    #[serde(default)]
    pub planner: PlannerConfig,
    pub task: TaskSpec,
    pub objects: Vec<ObjectSpec>,
    #[serde(default)]
    pub obstacles: Vec<ObstacleSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub planner_model: Option<Vec<ShapeSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reduce_rate: Option<f64>,
}

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{0}")]
    Parse(#[from] toml::de::Error),
    #[error("{0}")]
    Serialize(#[from] toml::ser::Error),
    #[error("{what}: {source}")]
    Shape { what: String, source: GeometryError },
    #[error("arm: {0}")]
    Arm(#[from] KinematicsError),
    #[error("task: {0}")]
    Task(#[from] TaskError),
    #[error("invalid scenario: {0}")]
    Invalid(String),
}

fn pose(p: &[f64; 3]) -> Pose2 {
    Pose2::new(p[0], p[1], p[2])
}

/// A validated scenario ready to plan on.
pub struct Setup {
    /// True shapes, used for execution.
    pub world: World,
    /// Shapes the planner believes in.
    pub planner_world: World,
    pub start: SystemState,
    pub task: Box<dyn Task>,
    pub classes: Vec<u32>,
}

impl Scenario {
    pub fn from_toml(text: &str) -> Result<Self, ScenarioError> {
        Ok(toml::from_str(text)?)
    }

    pub fn to_toml(&self) -> Result<String, ScenarioError> {
        Ok(toml::to_string(self)?)
    }

    pub fn load(path: &Path) -> Result<Self, ScenarioError> {
        let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let s = Self::from_toml(&text)?;
        s.build()?;
        Ok(s)
    }

    pub fn save(&self, path: &Path) -> Result<(), ScenarioError> {
        std::fs::write(path, self.to_toml()?).map_err(|source| ScenarioError::Io {
            path: path.display().to_string(),
            source,
        })
    }

    fn object_shapes(&self) -> Result<Vec<ConvexPolygon>, ScenarioError> {
        self.objects
            .iter()
            .enumerate()
            .map(|(i, o)| {
                o.shape.build().map_err(|source| ScenarioError::Shape {
                    what: format!("objects[{i}]"),
                    source,
                })
            })
            .collect()
    }

    /// Planner-side shapes: the override if given, then `reduce_rate`
    /// applied to every object except the task target.
    pub fn planner_shapes(&self) -> Result<Vec<ConvexPolygon>, ScenarioError> {
        let mut shapes = match &self.planner_model {
            Some(specs) => {
                if specs.len() != self.objects.len() {
                    return Err(ScenarioError::Invalid(format!(
                        "planner_model has {} shapes for {} objects",
                        specs.len(),
                        self.objects.len()
                    )));
                }
                specs
                    .iter()
                    .enumerate()
                    .map(|(i, s)| {
                        s.build().map_err(|source| ScenarioError::Shape {
                            what: format!("planner_model[{i}]"),
                            source,
                        })
                    })
                    .collect::<Result<Vec<_>, _>>()?
            }
            None => self.object_shapes()?,
        };
        if let Some(rate) = self.reduce_rate {
            if !(rate > 0.0 && rate <= 1.0) {
                return Err(ScenarioError::Invalid(format!("reduce_rate {rate} outside (0, 1]")));
            }
            let target = self.task.target();
            for (i, s) in shapes.iter_mut().enumerate() {
                if Some(i) != target {
                    *s = simplify(s, rate);
                }
            }
        }
        Ok(shapes)
    }

    /// Validates everything and builds the worlds, start state and task.
    pub fn build(&self) -> Result<Setup, ScenarioError> {
        let ws = self.workspace;
        if !(ws.x_min < ws.x_max && ws.y_min < ws.y_max) {
            return Err(ScenarioError::Invalid("workspace bounds are empty".into()));
        }
        if self.objects.is_empty() {
            return Err(ScenarioError::Invalid("scenario needs at least one object".into()));
        }
        self.physics.validate().map_err(ScenarioError::Invalid)?;
        self.planner.validate().map_err(ScenarioError::Invalid)?;
        let arm = self.arm.build()?;
        if self.arm.start.len() != arm.dof() {
            return Err(ScenarioError::Invalid(format!(
                "arm.start has {} angles for {} joints",
                self.arm.start.len(),
                arm.dof()
            )));
        }
        let obstacles = self
            .obstacles
            .iter()
            .enumerate()
            .map(|(i, o)| {
                o.shape
                    .build()
                    .map(|s| s.posed(&pose(&o.pose)))
                    .map_err(|source| ScenarioError::Shape {
                        what: format!("obstacles[{i}]"),
                        source,
                    })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let world = World::new(
            ws,
            obstacles,
            self.object_shapes()?,
            arm,
            self.gripper,
            self.physics,
        );
        let planner_world = world.with_shapes(self.planner_shapes()?);
        let poses: Vec<Pose2> = self.objects.iter().map(|o| pose(&o.pose)).collect();
        for (i, p) in poses.iter().enumerate() {
            if !ws.contains(&p.position()) {
                return Err(ScenarioError::Invalid(format!(
                    "objects[{i}] at ({}, {}) is outside the workspace",
                    p.x, p.y
                )));
            }
        }
        let start = world.make_state(JointConfig(self.arm.start.clone()), poses);
        if !start.valid {
            return Err(ScenarioError::Invalid(
                "initial state is invalid (robot collision, joint limits or overlapping objects)".into(),
            ));
        }
        let classes: Vec<u32> = self.objects.iter().map(|o| o.class).collect();
        let task = self.task.build(&world, &classes)?;
        Ok(Setup {
            world,
            planner_world,
            start,
            task,
            classes,
        })
    }
}
