use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use super::Vec2;

/// Wraps an angle into (-π, π].
#[inline]
pub fn wrap_angle(a: f64) -> f64 {
    let r = a.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

/// Rigid planar pose (element of SE(2)).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose2 {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
}

impl Default for Pose2 {
    fn default() -> Self {
        Self::identity()
    }
}

impl Pose2 {
    pub fn new(x: f64, y: f64, theta: f64) -> Self {
        Self {
            x,
            y,
            theta: wrap_angle(theta),
        }
    }

    pub const fn identity() -> Self {
        Self {
            x: 0.0,
            y: 0.0,
            theta: 0.0,
        }
    }

    pub fn position(&self) -> Vec2 {
        Vec2::new(self.x, self.y)
    }

    /// Rigid-body composition `self ∘ other`.
    pub fn compose(&self, other: &Pose2) -> Pose2 {
        let (s, c) = self.theta.sin_cos();
        Pose2::new(
            self.x + c * other.x - s * other.y,
            self.y + s * other.x + c * other.y,
            self.theta + other.theta,
        )
    }

    pub fn inverse(&self) -> Pose2 {
        let (s, c) = self.theta.sin_cos();
        Pose2::new(
            -(c * self.x + s * self.y),
            s * self.x - c * self.y,
            -self.theta,
        )
    }

    /// Maps a body-frame point into the world frame.
    #[inline]
    pub fn transform_point(&self, p: &Vec2) -> Vec2 {
        let (s, c) = self.theta.sin_cos();
        Vec2::new(self.x + c * p.x - s * p.y, self.y + s * p.x + c * p.y)
    }

    /// Maps a world-frame point into this pose's body frame.
    #[inline]
    pub fn inverse_transform_point(&self, p: &Vec2) -> Vec2 {
        let (s, c) = self.theta.sin_cos();
        let dx = p.x - self.x;
        let dy = p.y - self.y;
        Vec2::new(c * dx + s * dy, -s * dx + c * dy)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.theta.is_finite()
    }
}

pub fn compose(a: &Pose2, b: &Pose2) -> Pose2 {
    a.compose(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn close(a: &Pose2, b: &Pose2) -> bool {
        (a.x - b.x).abs() < 1e-12
            && (a.y - b.y).abs() < 1e-12
            && wrap_angle(a.theta - b.theta).abs() < 1e-12
    }

    #[test]
    fn identity_composition() {
        let p = Pose2::new(0.3, -1.2, 2.0);
        assert_eq!(Pose2::identity().compose(&p), p);
    }

    #[test]
    fn quarter_turn_rotates_offset() {
        let a = Pose2::new(1.0, 0.0, FRAC_PI_2);
        let b = Pose2::new(1.0, 0.0, 0.0);
        assert!(close(&compose(&a, &b), &Pose2::new(1.0, 1.0, FRAC_PI_2)));
    }

    #[test]
    fn half_turns_cancel() {
        let a = Pose2::new(0.0, 0.0, PI);
        let c = a.compose(&a);
        assert!(c.theta.abs() < 1e-12);
        assert!(c.x.abs() < 1e-12 && c.y.abs() < 1e-12);
    }

    #[test]
    fn wrap_is_half_open() {
        assert_eq!(wrap_angle(PI), PI);
        assert!((wrap_angle(-PI) - PI).abs() < 1e-15);
        assert!((wrap_angle(3.0 * PI) - PI).abs() < 1e-12);
        assert!((wrap_angle(0.5 + TAU) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn inverse_round_trip() {
        let p = Pose2::new(0.4, 0.1, -2.3);
        assert!(close(&p.compose(&p.inverse()), &Pose2::identity()));
        let q = Vec2::new(0.7, -0.2);
        let back = p.inverse_transform_point(&p.transform_point(&q));
        assert!((back - q).norm() < 1e-12);
    }
}
