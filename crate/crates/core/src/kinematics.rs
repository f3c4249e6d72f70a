//! Planar revolute arm: forward kinematics, the 3×r end-effector Jacobian,
//! manipulability and the projection of se(2) twists into joint space.

use nalgebra::{DMatrix, DVector, Matrix3};
use serde::{Deserialize, Serialize};

use crate::geometry::{intersect, wrap_angle, ConvexPolygon, Pose2, PosedPolygon, Vec2};

/// Singular values below this are dropped from the pseudo-inverse.
pub const PINV_EPS: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum KinematicsError {
    #[error("arm needs at least 3 joints, got {0}")]
    TooFewJoints(usize),
    #[error("link {0} has non-positive length")]
    BadLink(usize),
    #[error("expected {expected} joint limits, got {got}")]
    LimitCount { expected: usize, got: usize },
    #[error("joint {0} has an empty limit interval")]
    BadLimit(usize),
    #[error("manipulability threshold must be >= 0")]
    BadThreshold,
    #[error("link width must be > 0")]
    BadWidth,
}

/// End-effector velocity command in the world frame, held for `duration`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Twist {
    pub vx: f64,
    pub vy: f64,
    pub omega: f64,
    pub duration: f64,
}

impl Twist {
    pub fn new(vx: f64, vy: f64, omega: f64, duration: f64) -> Self {
        Self {
            vx,
            vy,
            omega,
            duration,
        }
    }

    pub fn zero(duration: f64) -> Self {
        Self::new(0.0, 0.0, 0.0, duration)
    }

    pub fn is_zero(&self) -> bool {
        self.vx == 0.0 && self.vy == 0.0 && self.omega == 0.0
    }
}

/// Joint angles in radians.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct JointConfig(pub Vec<f64>);

impl JointConfig {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// One explicit Euler step. Every code path that moves joints goes
    /// through here so replays are bit-identical.
    #[inline]
    pub fn integrate(&mut self, velocity: &[f64], dt: f64) {
        for (q, u) in self.0.iter_mut().zip(velocity) {
            *q += u * dt;
        }
    }
}

/// One piecewise-constant joint-velocity sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointSample {
    pub velocity: Vec<f64>,
    pub dt: f64,
}

/// Joint-space realization of a twist.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControlSegment {
    pub samples: Vec<JointSample>,
    pub source_twist: Twist,
}

impl ControlSegment {
    pub fn duration(&self) -> f64 {
        self.samples.iter().map(|s| s.dt).sum()
    }
}

pub type ControlSequence = Vec<ControlSegment>;

#[derive(Debug, Clone)]
pub struct ArmModel {
    base_pose: Pose2,
    link_lengths: Vec<f64>,
    joint_limits: Vec<(f64, f64)>,
    manipulability_threshold: f64,
    link_width: f64,
    link_shapes: Vec<ConvexPolygon>,
}

impl ArmModel {
    pub fn new(
        base_pose: Pose2,
        link_lengths: Vec<f64>,
        joint_limits: Vec<(f64, f64)>,
        manipulability_threshold: f64,
        link_width: f64,
    ) -> Result<Self, KinematicsError> {
        let r = link_lengths.len();
        if r < 3 {
            return Err(KinematicsError::TooFewJoints(r));
        }
        if let Some(i) = link_lengths.iter().position(|l| !(*l > 0.0)) {
            return Err(KinematicsError::BadLink(i));
        }
        if joint_limits.len() != r {
            return Err(KinematicsError::LimitCount {
                expected: r,
                got: joint_limits.len(),
            });
        }
        if let Some(i) = joint_limits.iter().position(|(lo, hi)| !(lo < hi)) {
            return Err(KinematicsError::BadLimit(i));
        }
        if !(manipulability_threshold >= 0.0) {
            return Err(KinematicsError::BadThreshold);
        }
        if !(link_width > 0.0) {
            return Err(KinematicsError::BadWidth);
        }
        let link_shapes = link_lengths
            .iter()
            .map(|l| ConvexPolygon::rectangle(*l, link_width).map_err(|_| KinematicsError::BadWidth))
            .collect::<Result<_, _>>()?;
        Ok(Self {
            base_pose,
            link_lengths,
            joint_limits,
            manipulability_threshold,
            link_width,
            link_shapes,
        })
    }

    pub fn dof(&self) -> usize {
        self.link_lengths.len()
    }

    pub fn base_pose(&self) -> Pose2 {
        self.base_pose
    }

    pub fn link_lengths(&self) -> &[f64] {
        &self.link_lengths
    }

    pub fn joint_limits(&self) -> &[(f64, f64)] {
        &self.joint_limits
    }

    pub fn manipulability_threshold(&self) -> f64 {
        self.manipulability_threshold
    }

    pub fn link_width(&self) -> f64 {
        self.link_width
    }

    pub fn within_limits(&self, joints: &JointConfig) -> bool {
        joints.len() == self.dof()
            && joints
                .0
                .iter()
                .zip(&self.joint_limits)
                .all(|(q, (lo, hi))| q.is_finite() && *q >= *lo && *q <= *hi)
    }

    /// World positions of the base, every joint and the end-effector (r + 1 points).
    pub fn joint_positions(&self, joints: &JointConfig) -> Vec<Vec2> {
        let mut out = Vec::with_capacity(self.dof() + 1);
        let mut p = self.base_pose.position();
        let mut phi = self.base_pose.theta;
        out.push(p);
        for (l, q) in self.link_lengths.iter().zip(&joints.0) {
            phi += q;
            p += Vec2::new(l * phi.cos(), l * phi.sin());
            out.push(p);
        }
        out
    }

    /// Link rectangles in world coordinates, base outward.
    pub fn link_polygons(&self, joints: &JointConfig) -> Vec<PosedPolygon> {
        let pts = self.joint_positions(joints);
        let mut phi = self.base_pose.theta;
        self.link_shapes
            .iter()
            .zip(&joints.0)
            .enumerate()
            .map(|(k, (shape, q))| {
                phi += q;
                let mid = (pts[k] + pts[k + 1]) * 0.5;
                shape.posed(&Pose2::new(mid.x, mid.y, phi))
            })
            .collect()
    }

    /// True when no two non-adjacent links overlap.
    pub fn self_collision_free(&self, joints: &JointConfig) -> bool {
        let links = self.link_polygons(joints);
        for i in 0..links.len() {
            for j in (i + 2)..links.len() {
                if intersect(&links[i], &links[j]).is_some() {
                    return false;
                }
            }
        }
        true
    }
}

pub fn forward_kinematics(arm: &ArmModel, joints: &JointConfig) -> Pose2 {
    let mut x = arm.base_pose.x;
    let mut y = arm.base_pose.y;
    let mut phi = arm.base_pose.theta;
    for (l, q) in arm.link_lengths.iter().zip(&joints.0) {
        phi += q;
        x += l * phi.cos();
        y += l * phi.sin();
    }
    Pose2 {
        x,
        y,
        theta: wrap_angle(phi),
    }
}

/// Rows are ∂x/∂q, ∂y/∂q and ∂φ/∂q of the end-effector.
pub fn jacobian(arm: &ArmModel, joints: &JointConfig) -> DMatrix<f64> {
    let pts = arm.joint_positions(joints);
    let ee = pts[pts.len() - 1];
    let r = arm.dof();
    let mut j = DMatrix::zeros(3, r);
    for i in 0..r {
        let d = ee - pts[i];
        j[(0, i)] = -d.y;
        j[(1, i)] = d.x;
        j[(2, i)] = 1.0;
    }
    j
}

/// √det(J·Jᵀ); rounding-level negative determinants clamp to zero.
pub fn manipulability(j: &DMatrix<f64>) -> f64 {
    let jjt = j * j.transpose();
    let m = Matrix3::from_iterator(jjt.iter().copied());
    let det = m.determinant();
    if det <= 0.0 {
        0.0
    } else {
        det.sqrt()
    }
}

pub fn pseudo_inverse(j: &DMatrix<f64>) -> DMatrix<f64> {
    j.clone()
        .svd(true, true)
        .pseudo_inverse(PINV_EPS)
        .expect("svd computed with both singular-vector sets")
}

/// Number of `dt` substeps in `duration`, if `dt` divides it within 1e-9.
pub fn substep_count(duration: f64, dt: f64) -> Option<usize> {
    if !(dt > 0.0) || !(duration >= 0.0) {
        return None;
    }
    let n = (duration / dt).round();
    if (n * dt - duration).abs() > 1e-9 {
        return None;
    }
    Some(n as usize)
}

/// Projects `twist` into joint space with joint-limit, self-collision and
/// manipulability checks at every substep.
pub fn jacobian_projection(
    arm: &ArmModel,
    start: &JointConfig,
    twist: &Twist,
    dt: f64,
) -> Option<ControlSegment> {
    jacobian_projection_with(arm, start, twist, dt, |q| arm.self_collision_free(q))
}

/// Like [`jacobian_projection`], with a caller-supplied robot validity check
/// (joint limits and manipulability are always enforced).
pub fn jacobian_projection_with<F>(
    arm: &ArmModel,
    start: &JointConfig,
    twist: &Twist,
    dt: f64,
    mut robot_valid: F,
) -> Option<ControlSegment>
where
    F: FnMut(&JointConfig) -> bool,
{
    let steps = substep_count(twist.duration, dt)?;
    let v = DVector::from_column_slice(&[twist.vx, twist.vy, twist.omega]);
    let mut q = start.clone();
    let mut samples = Vec::with_capacity(steps);
    for _ in 0..steps {
        let j = jacobian(arm, &q);
        if manipulability(&j) < arm.manipulability_threshold {
            return None;
        }
        let u = pseudo_inverse(&j) * &v;
        let velocity: Vec<f64> = u.iter().copied().collect();
        q.integrate(&velocity, dt);
        if !arm.within_limits(&q) || !robot_valid(&q) {
            return None;
        }
        samples.push(JointSample { velocity, dt });
    }
    if manipulability(&jacobian(arm, &q)) < arm.manipulability_threshold {
        return None;
    }
    Some(ControlSegment {
        samples,
        source_twist: *twist,
    })
}

/// Damped least-squares inverse kinematics from `seed`. Joint values are
/// clamped to the limits each iteration. Returns `None` if the pose is not
/// reached to 1e-9 within the iteration cap.
pub fn solve_ik(arm: &ArmModel, seed: &JointConfig, target: &Pose2) -> Option<JointConfig> {
    const DAMPING: f64 = 1e-2;
    let mut q = seed.clone();
    for _ in 0..2000 {
        let ee = forward_kinematics(arm, &q);
        let e = DVector::from_column_slice(&[
            target.x - ee.x,
            target.y - ee.y,
            wrap_angle(target.theta - ee.theta),
        ]);
        if e.amax() < 1e-9 {
            return Some(q);
        }
        let j = jacobian(arm, &q);
        let jjt = &j * j.transpose() + DMatrix::identity(3, 3) * (DAMPING * DAMPING);
        let step = j.transpose() * jjt.try_inverse()? * e;
        for (k, (lo, hi)) in arm.joint_limits.iter().enumerate() {
            q.0[k] = (q.0[k] + step[k]).clamp(*lo, *hi);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn unit_arm(r: usize, threshold: f64) -> ArmModel {
        ArmModel::new(
            Pose2::identity(),
            vec![1.0; r],
            vec![(-PI, PI); r],
            threshold,
            0.05,
        )
        .unwrap()
    }

    fn close(a: Pose2, b: Pose2) -> bool {
        (a.x - b.x).abs() < 1e-12 && (a.y - b.y).abs() < 1e-12 && wrap_angle(a.theta - b.theta).abs() < 1e-12
    }

    #[test]
    fn stretched_arm_fk() {
        let arm = unit_arm(3, 0.0);
        let p = forward_kinematics(&arm, &JointConfig(vec![0.0; 3]));
        assert!(close(p, Pose2::new(3.0, 0.0, 0.0)));
    }

    #[test]
    fn rotated_arm_fk() {
        let arm = unit_arm(3, 0.0);
        let p = forward_kinematics(&arm, &JointConfig(vec![FRAC_PI_2, 0.0, 0.0]));
        assert!(close(p, Pose2::new(0.0, 3.0, FRAC_PI_2)));
        // Up one link, then two links along +x.
        let p = forward_kinematics(&arm, &JointConfig(vec![FRAC_PI_2, -FRAC_PI_2, 0.0]));
        assert!(close(p, Pose2::new(2.0, 1.0, 0.0)));
    }

    #[test]
    fn jacobian_structure() {
        let arm = unit_arm(3, 0.0);
        let j = jacobian(&arm, &JointConfig(vec![0.0; 3]));
        for i in 0..3 {
            assert_eq!(j[(0, i)], 0.0);
            assert_eq!(j[(2, i)], 1.0);
        }
        let j = jacobian(&arm, &JointConfig(vec![0.3, -1.2, 0.8]));
        assert!((0..3).all(|i| j[(2, i)] == 1.0));
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let arm = unit_arm(4, 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let q = JointConfig((0..4).map(|_| rng.random_range(-3.0..3.0)).collect());
            let j = jacobian(&arm, &q);
            let h = 1e-6;
            for i in 0..4 {
                let mut qp = q.clone();
                let mut qm = q.clone();
                qp.0[i] += h;
                qm.0[i] -= h;
                let a = forward_kinematics(&arm, &qp);
                let b = forward_kinematics(&arm, &qm);
                let fd = [
                    (a.x - b.x) / (2.0 * h),
                    (a.y - b.y) / (2.0 * h),
                    wrap_angle(a.theta - b.theta) / (2.0 * h),
                ];
                for row in 0..3 {
                    assert!((j[(row, i)] - fd[row]).abs() <= 1e-5);
                }
            }
        }
    }

    #[test]
    fn manipulability_cases() {
        let arm = unit_arm(3, 0.0);
        assert_eq!(manipulability(&jacobian(&arm, &JointConfig(vec![0.0; 3]))), 0.0);
        assert!((manipulability(&DMatrix::identity(3, 3)) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn manipulability_is_singular_value_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let j = DMatrix::from_fn(3, 4, |_, _| rng.random_range(-1.0..1.0));
            let sv = j.clone().svd(false, false).singular_values;
            let prod: f64 = sv.iter().product();
            assert!((manipulability(&j) - prod).abs() < 1e-10);
        }
    }

    #[test]
    fn zero_twist_projects_to_rest() {
        let arm = unit_arm(4, 1e-3);
        let start = JointConfig(vec![0.4, 0.7, -0.6, 0.5]);
        let seg = jacobian_projection(&arm, &start, &Twist::zero(0.2), 0.01).unwrap();
        assert_eq!(seg.samples.len(), 20);
        let mut q = start.clone();
        for s in &seg.samples {
            assert!(s.velocity.iter().all(|u| u.abs() < 1e-15));
            q.integrate(&s.velocity, s.dt);
        }
        for (a, b) in q.0.iter().zip(&start.0) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn singular_start_rejected() {
        let arm = unit_arm(4, 1e-3);
        let twist = Twist::new(0.1, 0.0, 0.0, 0.2);
        assert!(jacobian_projection(&arm, &JointConfig(vec![0.0; 4]), &twist, 0.01).is_none());
    }

    #[test]
    fn projection_reproduces_twist_each_substep() {
        let arm = unit_arm(4, 1e-3);
        let start = JointConfig(vec![0.4, 0.7, -0.6, 0.5]);
        let twist = Twist::new(0.1, 0.0, 0.0, 0.2);
        let seg = jacobian_projection(&arm, &start, &twist, 0.01).unwrap();
        let v = DVector::from_column_slice(&[0.1, 0.0, 0.0]);
        let mut q = start.clone();
        for s in &seg.samples {
            let j = jacobian(&arm, &q);
            let u = DVector::from_column_slice(&s.velocity);
            assert!((j * u - &v).norm() <= 1e-9);
            q.integrate(&s.velocity, s.dt);
        }
        assert!((seg.duration() - 0.2).abs() < 1e-9);
    }

    #[test]
    fn rejects_indivisible_step() {
        let arm = unit_arm(4, 1e-3);
        let start = JointConfig(vec![0.4, 0.7, -0.6, 0.5]);
        assert!(jacobian_projection(&arm, &start, &Twist::new(0.1, 0.0, 0.0, 0.2), 0.03).is_none());
    }

    #[test]
    fn arm_validation() {
        assert!(matches!(
            ArmModel::new(Pose2::identity(), vec![1.0, 1.0], vec![(-1.0, 1.0); 2], 0.0, 0.1),
            Err(KinematicsError::TooFewJoints(2))
        ));
        assert!(matches!(
            ArmModel::new(Pose2::identity(), vec![1.0, 0.0, 1.0], vec![(-1.0, 1.0); 3], 0.0, 0.1),
            Err(KinematicsError::BadLink(1))
        ));
    }

    #[test]
    fn folded_arm_self_collides() {
        let arm = unit_arm(4, 0.0);
        assert!(arm.self_collision_free(&JointConfig(vec![0.3, 0.5, 0.5, 0.2])));
        // Third link folds back over the first.
        assert!(!arm.self_collision_free(&JointConfig(vec![0.0, 3.0, 3.0, 0.0])));
    }
}
