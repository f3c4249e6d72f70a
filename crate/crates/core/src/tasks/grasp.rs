use crate::geometry::{wrap_angle, PosedPolygon, Vec2};
use crate::physics::{GripperGeometry, SystemState, World};

use super::Task;

/// Edge normals count as antiparallel within this angle.
const PARALLEL_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct GraspTask {
    pub target: usize,
    pub eps_alpha: f64,
    pub w_d: f64,
    pub w_alpha: f64,
}

/// Gripper headings that put the fingers across an antipodal pair of
/// parallel edges narrower than the finger gap.
pub fn feasible_grasp_angles(target: &PosedPolygon, gripper: &GripperGeometry) -> Vec<f64> {
    let normals = &target.normals;
    let mut out: Vec<f64> = Vec::new();
    for i in 0..normals.len() {
        for j in (i + 1)..normals.len() {
            let ni = normals[i];
            let nj = normals[j];
            // Angle between ni and -nj.
            let off = (ni.x * nj.y - ni.y * nj.x).atan2(-ni.dot(&nj));
            if off.abs() > PARALLEL_TOL {
                continue;
            }
            let (lo, hi) = target
                .vertices
                .iter()
                .map(|v| v.dot(&ni))
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)));
            if hi - lo >= gripper.finger_gap {
                continue;
            }
            let phi = ni.y.atan2(ni.x);
            for a in [phi + std::f64::consts::FRAC_PI_2, phi - std::f64::consts::FRAC_PI_2] {
                let a = wrap_angle(a);
                if !out.iter().any(|b| wrap_angle(a - b).abs() < 1e-9) {
                    out.push(a);
                }
            }
        }
    }
    out
}

impl GraspTask {
    pub fn angles(&self, world: &World, state: &SystemState) -> Vec<f64> {
        feasible_grasp_angles(&world.object_polygon(state, self.target), &world.gripper)
    }
}

impl Task for GraspTask {
    fn name(&self) -> &'static str {
        "grasp"
    }

    fn goal(&self, world: &World, state: &SystemState) -> bool {
        let o = state.objects[self.target].position();
        let local = state.gripper.inverse_transform_point(&o);
        if !world.gripper.in_finger_region(&local) {
            return false;
        }
        self.angles(world, state)
            .iter()
            .map(|a| wrap_angle(state.gripper.theta - a).abs())
            .fold(f64::INFINITY, f64::min)
            <= self.eps_alpha
    }

    fn heuristic(&self, _world: &World, state: &SystemState) -> f64 {
        let g = state.gripper;
        let o = state.objects[self.target];
        let dx = o.x - g.x;
        let dy = o.y - g.y;
        let bearing = if dx == 0.0 && dy == 0.0 { 0.0 } else { dy.atan2(dx) };
        self.w_d * dx.hypot(dy) + self.w_alpha * wrap_angle(g.theta - bearing).abs()
    }

    fn control_duration(&self) -> f64 {
        0.2
    }

    fn focus(&self, _world: &World, state: &SystemState) -> Vec2 {
        state.objects[self.target].position()
    }
}
