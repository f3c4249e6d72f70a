use crate::geometry::Vec2;
use crate::physics::{SystemState, World};

use super::Task;

#[derive(Debug, Clone, PartialEq)]
pub struct RelocateTask {
    pub target: usize,
    pub goal: Vec2,
    pub radius: f64,
}

impl Task for RelocateTask {
    fn name(&self) -> &'static str {
        "relocate"
    }

    fn goal(&self, _world: &World, state: &SystemState) -> bool {
        (state.objects[self.target].position() - self.goal).norm() <= self.radius
    }

    fn heuristic(&self, _world: &World, state: &SystemState) -> f64 {
        let o = state.objects[self.target].position();
        (o - state.gripper.position()).norm() + (o - self.goal).norm()
    }

    fn control_duration(&self) -> f64 {
        0.2
    }

    fn focus(&self, _world: &World, state: &SystemState) -> Vec2 {
        state.objects[self.target].position()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{ConvexPolygon, Pose2};
    use crate::tasks::testing::{state, world};

    fn setup(goal: Vec2) -> (World, RelocateTask) {
        let w = world(vec![ConvexPolygon::rectangle(0.05, 0.05).unwrap()]);
        (w, RelocateTask { target: 0, goal, radius: 0.1 })
    }

    #[test]
    fn goal_radius_boundary() {
        let (w, t) = setup(Vec2::new(1.0, 1.0));
        let at = |x: f64| state(Pose2::identity(), vec![Pose2::new(x, 1.0, 0.0)]);
        assert!(t.goal(&w, &at(1.0)));
        assert!(t.goal(&w, &at(1.099)));
        assert!(!t.goal(&w, &at(1.11)));
    }

    #[test]
    fn heuristic_examples() {
        let (w, t) = setup(Vec2::new(3.0, 4.0));
        let h = t.heuristic(&w, &state(Pose2::identity(), vec![Pose2::new(3.0, 4.0, 0.0)]));
        assert!((h - 5.0).abs() < 1e-12);
        let (w, t) = setup(Vec2::new(2.0, 0.0));
        let h = t.heuristic(&w, &state(Pose2::identity(), vec![Pose2::new(1.0, 0.0, 0.0)]));
        assert!((h - 2.0).abs() < 1e-12);
        let (w, t) = setup(Vec2::new(0.5, 0.5));
        let h = t.heuristic(&w, &state(Pose2::new(0.5, 0.5, 1.0), vec![Pose2::new(0.5, 0.5, 0.0)]));
        assert_eq!(h, 0.0);
    }

    #[test]
    fn goal_implies_small_goal_term() {
        let (w, t) = setup(Vec2::new(0.0, 0.0));
        for k in 0..200 {
            let a = k as f64 * 0.1;
            let r = (k % 13) as f64 * 0.01;
            let s = state(Pose2::new(1.0, 0.0, 0.0), vec![Pose2::new(r * a.cos(), r * a.sin(), 0.0)]);
            if t.goal(&w, &s) {
                assert!((s.objects[0].position() - t.goal).norm() <= t.radius);
            }
        }
    }
}
