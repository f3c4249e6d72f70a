//! Planar geometry: SE(2) poses, convex polygons, separating-axis contact
//! queries, convex hulls and polygon decimation.

mod hull;
mod polygon;
mod pose;

pub use hull::{convex_hull, simplify};
pub use polygon::{
    distance, hull_distance, intersect, point_in_convex, point_segment_distance, sat_cost,
    ConvexPolygon, Mtv, PosedPolygon, TOUCH_EPS,
};
pub use pose::{compose, wrap_angle, Pose2};

/// 2D point / vector in meters.
pub type Vec2 = nalgebra::Vector2<f64>;

#[inline]
pub fn cross(a: &Vec2, b: &Vec2) -> f64 {
    a.x * b.y - a.y * b.x
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeometryError {
    #[error("polygon needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("polygon is not strictly convex at vertex {0}")]
    NotConvex(usize),
    #[error("polygon has a non-finite coordinate")]
    NonFinite,
    #[error("invalid shape parameter: {0}")]
    BadParameter(String),
}
