//! Built-in scenarios. Clutter layouts are drawn from fixed seeds, so the
//! library is identical on every build.

use std::f64::consts::{FRAC_PI_2, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geometry::{convex_hull, intersect, ConvexPolygon, Pose2, Vec2};
use crate::kinematics::{solve_ik, ArmModel, JointConfig};
use crate::physics::{GripperGeometry, PhysicsConfig, Workspace};
use crate::planner::PlannerConfig;
use crate::tasks::TaskSpec;

use super::scenario::{ArmSpec, ObjectSpec, Scenario, ShapeSpec};

pub const WORKSPACE: Workspace = Workspace {
    x_min: -0.45,
    x_max: 0.45,
    y_min: 0.0,
    y_max: 0.7,
};

/// Gripper home pose: near edge of the table, facing into it.
pub const HOME: Pose2 = Pose2 { x: 0.0, y: 0.0, theta: FRAC_PI_2 };

const CUBE: f64 = 0.04;
const BASE_Y: f64 = -0.4;
const CY: f64 = 0.25;

fn arm_spec() -> ArmSpec {
    let mut spec = ArmSpec {
        base: [0.0, BASE_Y, FRAC_PI_2],
        links: vec![0.5, 0.45, 0.35, 0.08],
        joint_limits: vec![[-2.8, 2.8]; 4],
        manipulability_threshold: 1e-3,
        link_width: 0.04,
        start: Vec::new(),
    };
    let arm: ArmModel = spec.build().expect("library arm is valid");
    let seed = JointConfig(vec![0.6, -1.2, -0.6, 1.2]);
    spec.start = solve_ik(&arm, &seed, &HOME).expect("home pose reachable").0;
    spec
}

fn cube() -> ShapeSpec {
    ShapeSpec::Box { width: CUBE, height: CUBE }
}

/// Scatters `shapes` in an annulus around `center` without overlaps,
/// keeping `clearance` between neighbours. Returns poses in input order.
fn scatter(
    rng: &mut ChaCha8Rng,
    center: Vec2,
    inner: f64,
    outer: f64,
    shapes: &[ShapeSpec],
    placed: &mut Vec<(ConvexPolygon, Pose2)>,
) -> Vec<[f64; 3]> {
    const CLEARANCE: f64 = 0.004;
    let mut out = Vec::new();
    for spec in shapes {
        let shape = spec.build().expect("library shape is valid");
        let inflated = ConvexPolygon::from_points(
            &shape
                .vertices()
                .iter()
                .map(|v| v * (1.0 + CLEARANCE / shape.bounding_radius()))
                .collect::<Vec<_>>(),
        )
        .expect("scaled polygon stays convex");
        let mut attempt = 0;
        loop {
            attempt += 1;
            assert!(attempt < 100_000, "could not place clutter object");
            let r = rng.random_range(inner..outer);
            let a = rng.random_range(0.0..TAU);
            let p = Pose2::new(
                center.x + r * a.cos(),
                center.y + r * a.sin(),
                rng.random_range(-std::f64::consts::PI..std::f64::consts::PI),
            );
            let margin = shape.bounding_radius();
            if p.x - margin < WORKSPACE.x_min
                || p.x + margin > WORKSPACE.x_max
                || p.y - margin < WORKSPACE.y_min + 0.06
                || p.y + margin > WORKSPACE.y_max
            {
                continue;
            }
            let candidate = inflated.posed(&p);
            if placed
                .iter()
                .any(|(s, q)| intersect(&s.posed(q), &candidate).is_some())
            {
                continue;
            }
            placed.push((inflated.clone(), p));
            out.push([p.x, p.y, p.theta]);
            break;
        }
    }
    out
}

fn base(name: &str, task: TaskSpec, objects: Vec<ObjectSpec>) -> Scenario {
    Scenario {
        name: name.to_string(),
        workspace: WORKSPACE,
        arm: arm_spec(),
        gripper: GripperGeometry::default(),
        physics: PhysicsConfig::default(),
        planner: PlannerConfig::default(),
        task,
        objects,
        obstacles: Vec::new(),
        planner_model: None,
        reduce_rate: None,
    }
}

/// Target cube at the table centre, `n - 1` cubes around it.
pub fn grasp(n: usize, seed: u64) -> Scenario {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let center = Vec2::new(0.0, CY);
    let mut placed = Vec::new();
    let target = scatter(&mut rng, center, 0.0, 1e-9, &[cube()], &mut placed);
    let rest = scatter(&mut rng, center, 0.06, 0.2, &vec![cube(); n - 1], &mut placed);
    let objects = target
        .into_iter()
        .chain(rest)
        .map(|pose| ObjectSpec { shape: cube(), pose, class: 0 })
        .collect();
    let mut s = base(
        &format!("grasp-{n}"),
        TaskSpec::Grasp { target: 0, eps_alpha: 0.2, w_d: 0.7, w_alpha: 0.3 },
        objects,
    );
    s.planner.time_budget = 60.0;
    s
}

/// Target on the left, goal region on the right, clutter in between.
pub fn relocate(n: usize, seed: u64) -> Scenario {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut placed = Vec::new();
    let target = scatter(&mut rng, Vec2::new(-0.15, 0.3), 0.0, 1e-9, &[cube()], &mut placed);
    let rest = scatter(&mut rng, Vec2::new(0.0, 0.3), 0.07, 0.22, &vec![cube(); n - 1], &mut placed);
    let objects = target
        .into_iter()
        .chain(rest)
        .map(|pose| ObjectSpec { shape: cube(), pose, class: 0 })
        .collect();
    let mut s = base(
        &format!("relocate-{n}"),
        TaskSpec::Relocate { target: 0, goal: [0.15, 0.3], radius: 0.1 },
        objects,
    );
    s.planner.time_budget = 60.0;
    s
}

/// `n` cubes of two alternating classes scattered around the table centre.
pub fn sort(n: usize, seed: u64) -> Scenario {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut placed = Vec::new();
    let poses = scatter(&mut rng, Vec2::new(0.0, CY + 0.05), 0.0, 0.12, &vec![cube(); n], &mut placed);
    let objects = poses
        .into_iter()
        .enumerate()
        .map(|(i, pose)| ObjectSpec { shape: cube(), pose, class: (i % 2) as u32 })
        .collect();
    let mut s = base(
        &format!("sort-{n}"),
        TaskSpec::Sort { eps_d: 0.1, lambda_sep: 1.0, sep_cap: None },
        objects,
    );
    s.planner.time_budget = 60.0;
    s
}

/// Convex blob from a polar curve, `n` vertices.
fn blob(n: usize, radius: f64, lobes: f64, amp: f64) -> ShapeSpec {
    let pts: Vec<Vec2> = (0..n)
        .map(|k| {
            let t = TAU * k as f64 / n as f64;
            let r = radius * (1.0 + amp * (lobes * t).cos());
            Vec2::new(r * t.cos(), r * t.sin())
        })
        .collect();
    let hull = convex_hull(&pts);
    ShapeSpec::Polygon { vertices: hull.iter().map(|v| [v.x, v.y]).collect() }
}

/// The four high-resolution shapes used by the model-reduction study.
pub fn complex_shapes() -> Vec<ShapeSpec> {
    vec![
        ShapeSpec::Ellipse { sides: 100, a: 0.045, b: 0.025 },
        ShapeSpec::Regular { sides: 100, radius: 0.03 },
        blob(100, 0.032, 1.0, 0.15),
        ShapeSpec::Ellipse { sides: 100, a: 0.035, b: 0.03 },
    ]
}

/// Target cube among four 100-vertex shapes and five cubes.
pub fn grasp_shapes(seed: u64) -> Scenario {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let center = Vec2::new(0.0, CY);
    let mut placed = Vec::new();
    let mut shapes = vec![cube()];
    shapes.extend(complex_shapes());
    shapes.extend(vec![cube(); 5]);
    let target = scatter(&mut rng, center, 0.0, 1e-9, &shapes[..1], &mut placed);
    let rest = scatter(&mut rng, center, 0.06, 0.2, &shapes[1..], &mut placed);
    let objects = target
        .into_iter()
        .chain(rest)
        .zip(shapes)
        .map(|(pose, shape)| ObjectSpec { shape, pose, class: 0 })
        .collect();
    let mut s = base(
        "grasp-shapes",
        TaskSpec::Grasp { target: 0, eps_alpha: 0.2, w_d: 0.7, w_alpha: 0.3 },
        objects,
    );
    s.planner.time_budget = 120.0;
    s
}

pub const NAMES: [&str; 7] = [
    "grasp-10",
    "grasp-20",
    "relocate-10",
    "relocate-20",
    "sort-6",
    "grasp-16",
    "grasp-shapes",
];

pub fn by_name(name: &str) -> Option<Scenario> {
    Some(match name {
        "grasp-10" => grasp(10, 1),
        "grasp-20" => grasp(20, 2),
        "relocate-10" => relocate(10, 3),
        "relocate-20" => relocate(20, 4),
        "sort-6" => sort(6, 7),
        "grasp-16" => {
            let mut s = grasp(16, 5);
            s.planner.time_budget = 120.0;
            s
        }
        "grasp-shapes" => grasp_shapes(8),
        _ => return None,
    })
}
