use crate::geometry::{convex_hull, hull_distance, Vec2};
use crate::physics::{SystemState, World};

use super::Task;

#[derive(Debug, Clone, PartialEq)]
pub struct SortTask {
    /// Object indices per class, classes in ascending label order.
    pub members: Vec<Vec<usize>>,
    pub eps_d: f64,
    pub lambda_sep: f64,
    pub sep_cap: f64,
}

impl SortTask {
    /// Groups objects by label; `None` with fewer than two classes.
    pub fn new(labels: &[u32], eps_d: f64, lambda_sep: f64, sep_cap: f64) -> Option<Self> {
        let mut distinct: Vec<u32> = labels.to_vec();
        distinct.sort_unstable();
        distinct.dedup();
        if distinct.len() < 2 {
            return None;
        }
        let members = distinct
            .iter()
            .map(|c| (0..labels.len()).filter(|&i| labels[i] == *c).collect())
            .collect();
        Some(Self { members, eps_d, lambda_sep, sep_cap })
    }

    /// Convex hull of every vertex of every object in each class.
    pub fn class_hulls(&self, world: &World, state: &SystemState) -> Vec<Vec<Vec2>> {
        self.members
            .iter()
            .map(|m| {
                let pts: Vec<Vec2> = m
                    .iter()
                    .flat_map(|&i| world.object_polygon(state, i).vertices)
                    .collect();
                convex_hull(&pts)
            })
            .collect()
    }

    /// Smallest distance between hulls of different classes.
    pub fn min_separation(&self, world: &World, state: &SystemState) -> f64 {
        let hulls = self.class_hulls(world, state);
        let mut best = f64::INFINITY;
        for i in 0..hulls.len() {
            for j in (i + 1)..hulls.len() {
                best = best.min(hull_distance(&hulls[i], &hulls[j]));
            }
        }
        best
    }
}

impl Task for SortTask {
    fn name(&self) -> &'static str {
        "sort"
    }

    fn goal(&self, world: &World, state: &SystemState) -> bool {
        self.min_separation(world, state) > self.eps_d
    }

    fn heuristic(&self, world: &World, state: &SystemState) -> f64 {
        let mut spread = 0.0;
        for m in &self.members {
            let mut sum = 0.0;
            let mut pairs = 0usize;
            for a in 0..m.len() {
                for b in (a + 1)..m.len() {
                    sum += (state.objects[m[a]].position() - state.objects[m[b]].position()).norm();
                    pairs += 1;
                }
            }
            if pairs > 0 {
                spread += sum / pairs as f64;
            }
        }
        let hulls = self.class_hulls(world, state);
        let mut sep = 0.0;
        for i in 0..hulls.len() {
            for j in (i + 1)..hulls.len() {
                sep += hull_distance(&hulls[i], &hulls[j]).min(self.sep_cap);
            }
        }
        spread - self.lambda_sep * sep
    }

    fn control_duration(&self) -> f64 {
        0.4
    }

    /// Centroid of all objects: the mixing zone.
    fn focus(&self, _world: &World, state: &SystemState) -> Vec2 {
        let n = state.objects.len().max(1) as f64;
        state.objects.iter().map(|p| p.position()).sum::<Vec2>() / n
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{ConvexPolygon, Pose2};
    use crate::tasks::testing::{state, world};

    fn setup(n: usize, labels: &[u32]) -> (World, SortTask) {
        let w = world(vec![ConvexPolygon::rectangle(0.05, 0.05).unwrap(); n]);
        (w, SortTask::new(labels, 0.1, 1.0, 0.3).unwrap())
    }

    fn row(xs: &[f64]) -> SystemState {
        state(Pose2::identity(), xs.iter().map(|x| Pose2::new(*x, 0.0, 0.0)).collect())
    }

    #[test]
    fn goal_separation_boundary() {
        let (w, t) = setup(2, &[0, 1]);
        // Face gap = centre gap - 0.05.
        assert!(t.goal(&w, &row(&[0.0, 0.2])));
        assert!(!t.goal(&w, &row(&[0.0, 0.03])));
        // Separation exactly eps_d fails the strict test. The threshold is
        // taken from the measured gap to avoid rounding in 0.15 - 0.05.
        let s = row(&[0.0, 0.15]);
        let exact = SortTask { eps_d: t.min_separation(&w, &s), ..t.clone() };
        assert!(!exact.goal(&w, &s));
    }

    #[test]
    fn stacked_classes_far_apart_hit_the_floor() {
        let (w, t) = setup(4, &[0, 0, 1, 1]);
        let h = t.heuristic(&w, &row(&[0.0, 0.0, 2.0, 2.0]));
        assert!((h - (-1.0 * 0.3)).abs() < 1e-12);
        let (w3, t3) = setup(6, &[0, 0, 1, 1, 2, 2]);
        let h3 = t3.heuristic(&w3, &row(&[0.0, 0.0, 2.0, 2.0, 4.0, 4.0]));
        assert!((h3 - (-0.3 * 3.0)).abs() < 1e-12);
    }

    #[test]
    fn label_swap_within_class_is_invariant() {
        let (w, t) = setup(4, &[0, 1, 0, 1]);
        let s = row(&[0.0, 0.5, 0.2, 0.9]);
        let swapped = row(&[0.2, 0.5, 0.0, 0.9]);
        assert_eq!(t.heuristic(&w, &s), t.heuristic(&w, &swapped));
        assert_eq!(t.goal(&w, &s), t.goal(&w, &swapped));
    }

    #[test]
    fn pulling_toward_class_lowers_cost() {
        let (w, t) = setup(4, &[0, 0, 1, 1]);
        let before = t.heuristic(&w, &row(&[0.0, 0.3, 2.0, 2.1]));
        let after = t.heuristic(&w, &row(&[0.0, 0.2, 2.0, 2.1]));
        assert!(after < before);
    }

    #[test]
    fn rigid_translation_keeps_goal() {
        let (w, t) = setup(4, &[0, 0, 1, 1]);
        let a = row(&[0.0, 0.06, 0.4, 0.46]);
        let b = state(
            Pose2::identity(),
            a.objects.iter().map(|p| Pose2::new(p.x + 1.3, p.y - 0.7, 0.0)).collect(),
        );
        assert!(t.goal(&w, &a));
        assert_eq!(t.goal(&w, &a), t.goal(&w, &b));
    }

    #[test]
    fn needs_two_classes() {
        assert!(SortTask::new(&[1, 1, 1], 0.1, 1.0, 0.3).is_none());
    }
}
