use std::f64::consts::TAU;

use super::{cross, GeometryError, Pose2, Vec2};

/// Penetration depth at or below which two shapes count as touching.
pub const TOUCH_EPS: f64 = 1e-9;

/// Minimum translation vector: moving the second shape by `axis * depth`
/// separates it from the first.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mtv {
    pub axis: Vec2,
    pub depth: f64,
}

/// Strictly convex CCW polygon in its body frame, centroid at the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexPolygon {
    vertices: Vec<Vec2>,
    normals: Vec<Vec2>,
    radius: f64,
}

fn signed_area(pts: &[Vec2]) -> f64 {
    let n = pts.len();
    (0..n).map(|i| cross(&pts[i], &pts[(i + 1) % n])).sum::<f64>() * 0.5
}

pub(crate) fn area_centroid(pts: &[Vec2]) -> Vec2 {
    let n = pts.len();
    let mut a = 0.0;
    let mut c = Vec2::zeros();
    for i in 0..n {
        let p = pts[i];
        let q = pts[(i + 1) % n];
        let w = cross(&p, &q);
        a += w;
        c += (p + q) * w;
    }
    c / (3.0 * a)
}

impl ConvexPolygon {
    /// Builds a polygon from vertices in either winding; the result is CCW
    /// and re-centered on its area centroid.
    pub fn new(mut vertices: Vec<Vec2>) -> Result<Self, GeometryError> {
        if vertices.len() < 3 {
            return Err(GeometryError::TooFewVertices(vertices.len()));
        }
        if vertices.iter().any(|v| !v.x.is_finite() || !v.y.is_finite()) {
            return Err(GeometryError::NonFinite);
        }
        if signed_area(&vertices) < 0.0 {
            vertices.reverse();
        }
        let n = vertices.len();
        for i in 0..n {
            let a = vertices[(i + n - 1) % n];
            let b = vertices[i];
            let c = vertices[(i + 1) % n];
            if cross(&(b - a), &(c - b)) <= 1e-15 {
                return Err(GeometryError::NotConvex(i));
            }
        }
        let c = area_centroid(&vertices);
        for v in vertices.iter_mut() {
            *v -= c;
        }
        Ok(Self::from_centered(vertices))
    }

    fn from_centered(vertices: Vec<Vec2>) -> Self {
        let n = vertices.len();
        let normals = (0..n)
            .map(|i| {
                let e = vertices[(i + 1) % n] - vertices[i];
                Vec2::new(e.y, -e.x).normalize()
            })
            .collect();
        let radius = vertices.iter().map(|v| v.norm()).fold(0.0, f64::max);
        Self {
            vertices,
            normals,
            radius,
        }
    }

    /// Convex hull of arbitrary points, re-centered.
    pub fn from_points(points: &[Vec2]) -> Result<Self, GeometryError> {
        Self::new(super::convex_hull(points))
    }

    pub fn rectangle(width: f64, height: f64) -> Result<Self, GeometryError> {
        if !(width > 0.0 && height > 0.0) {
            return Err(GeometryError::BadParameter(format!(
                "rectangle {width}x{height}"
            )));
        }
        let (w, h) = (width / 2.0, height / 2.0);
        Self::new(vec![
            Vec2::new(-w, -h),
            Vec2::new(w, -h),
            Vec2::new(w, h),
            Vec2::new(-w, h),
        ])
    }

    /// Regular `n`-gon with circumradius `radius`, first vertex on +x.
    pub fn regular(n: usize, radius: f64) -> Result<Self, GeometryError> {
        Self::ellipse(n, radius, radius)
    }

    /// `n` vertices sampled uniformly in parameter angle on an ellipse.
    pub fn ellipse(n: usize, a: f64, b: f64) -> Result<Self, GeometryError> {
        if n < 3 || !(a > 0.0 && b > 0.0) {
            return Err(GeometryError::BadParameter(format!(
                "ellipse n={n} a={a} b={b}"
            )));
        }
        let pts = (0..n)
            .map(|k| {
                let t = TAU * k as f64 / n as f64;
                Vec2::new(a * t.cos(), b * t.sin())
            })
            .collect();
        Self::new(pts)
    }

    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Outward unit edge normals; normal `i` belongs to edge `i -> i+1`.
    pub fn normals(&self) -> &[Vec2] {
        &self.normals
    }

    pub fn bounding_radius(&self) -> f64 {
        self.radius
    }

    pub fn area(&self) -> f64 {
        signed_area(&self.vertices)
    }

    /// Places the polygon at `pose` in the world.
    pub fn posed(&self, pose: &Pose2) -> PosedPolygon {
        let (s, c) = pose.theta.sin_cos();
        let rot = |v: &Vec2| Vec2::new(c * v.x - s * v.y, s * v.x + c * v.y);
        let center = pose.position();
        PosedPolygon {
            vertices: self.vertices.iter().map(|v| center + rot(v)).collect(),
            normals: self.normals.iter().map(rot).collect(),
            center,
            radius: self.radius,
        }
    }
}

/// A convex polygon expressed in world coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct PosedPolygon {
    pub vertices: Vec<Vec2>,
    pub normals: Vec<Vec2>,
    pub center: Vec2,
    pub radius: f64,
}

impl PosedPolygon {
    pub fn translate(&mut self, d: &Vec2) {
        for v in self.vertices.iter_mut() {
            *v += d;
        }
        self.center += d;
    }

    /// Rotates about `center` by `angle`.
    pub fn rotate(&mut self, angle: f64) {
        let (s, c) = angle.sin_cos();
        let rot = |v: &Vec2| Vec2::new(c * v.x - s * v.y, s * v.x + c * v.y);
        let ctr = self.center;
        for v in self.vertices.iter_mut() {
            *v = ctr + rot(&(*v - ctr));
        }
        for n in self.normals.iter_mut() {
            *n = rot(n);
        }
    }

    fn project(&self, axis: &Vec2) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for v in &self.vertices {
            let d = v.dot(axis);
            lo = lo.min(d);
            hi = hi.max(d);
        }
        (lo, hi)
    }

    /// Extent of the polygon from its center along `axis`.
    pub fn support_extent(&self, axis: &Vec2) -> f64 {
        self.project(axis).1 - self.center.dot(axis)
    }
}

/// Nominal vertex-operation cost of one narrow-phase separating-axis test.
pub fn sat_cost(a: &PosedPolygon, b: &PosedPolygon) -> u64 {
    let n = (a.vertices.len() + b.vertices.len()) as u64;
    n * n
}

/// Separating-axis test over the edge normals of both polygons. Returns the
/// minimum translation moving `b` out of `a`, or `None` when the shapes are
/// disjoint or only touching.
pub fn intersect(a: &PosedPolygon, b: &PosedPolygon) -> Option<Mtv> {
    let reach = a.radius + b.radius;
    if (a.center - b.center).norm_squared() > reach * reach {
        return None;
    }
    let mut best: Option<Mtv> = None;
    for n in a.normals.iter().chain(b.normals.iter()) {
        let (amin, amax) = a.project(n);
        let (bmin, bmax) = b.project(n);
        let push_pos = amax - bmin;
        let push_neg = bmax - amin;
        if push_pos <= TOUCH_EPS || push_neg <= TOUCH_EPS {
            return None;
        }
        let cand = if push_pos <= push_neg {
            Mtv {
                axis: *n,
                depth: push_pos,
            }
        } else {
            Mtv {
                axis: -n,
                depth: push_neg,
            }
        };
        if best.is_none_or(|b| cand.depth < b.depth) {
            best = Some(cand);
        }
    }
    best
}

pub fn point_segment_distance(p: &Vec2, a: &Vec2, b: &Vec2) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_squared();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = ((p - a).dot(&ab) / len2).clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}

fn orient(a: &Vec2, b: &Vec2, c: &Vec2) -> f64 {
    cross(&(b - a), &(c - a))
}

fn segments_intersect(p1: &Vec2, p2: &Vec2, q1: &Vec2, q2: &Vec2) -> bool {
    let d1 = orient(q1, q2, p1);
    let d2 = orient(q1, q2, p2);
    let d3 = orient(p1, p2, q1);
    let d4 = orient(p1, p2, q2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    let on = |a: &Vec2, b: &Vec2, p: &Vec2, d: f64| {
        d == 0.0
            && p.x >= a.x.min(b.x)
            && p.x <= a.x.max(b.x)
            && p.y >= a.y.min(b.y)
            && p.y <= a.y.max(b.y)
    };
    on(q1, q2, p1, d1) || on(q1, q2, p2, d2) || on(p1, p2, q1, d3) || on(p1, p2, q2, d4)
}

fn segment_distance(p1: &Vec2, p2: &Vec2, q1: &Vec2, q2: &Vec2) -> f64 {
    if segments_intersect(p1, p2, q1, q2) {
        return 0.0;
    }
    point_segment_distance(p1, q1, q2)
        .min(point_segment_distance(p2, q1, q2))
        .min(point_segment_distance(q1, p1, p2))
        .min(point_segment_distance(q2, p1, p2))
}

/// True when `p` lies inside or on the boundary of the CCW convex polygon.
pub fn point_in_convex(p: &Vec2, poly: &[Vec2]) -> bool {
    let n = poly.len();
    n >= 3 && (0..n).all(|i| orient(&poly[i], &poly[(i + 1) % n], p) >= 0.0)
}

fn edges(pts: &[Vec2]) -> Vec<(Vec2, Vec2)> {
    match pts.len() {
        0 => Vec::new(),
        1 => vec![(pts[0], pts[0])],
        2 => vec![(pts[0], pts[1])],
        n => (0..n).map(|i| (pts[i], pts[(i + 1) % n])).collect(),
    }
}

/// Euclidean distance between two convex vertex sets in CCW order. Sets of
/// one or two points (degenerate hulls) are treated as a point or segment.
pub fn hull_distance(a: &[Vec2], b: &[Vec2]) -> f64 {
    if a.iter().any(|p| point_in_convex(p, b)) || b.iter().any(|p| point_in_convex(p, a)) {
        return 0.0;
    }
    let ea = edges(a);
    let eb = edges(b);
    let mut best = f64::INFINITY;
    for (p1, p2) in &ea {
        for (q1, q2) in &eb {
            best = best.min(segment_distance(p1, p2, q1, q2));
            if best == 0.0 {
                return 0.0;
            }
        }
    }
    best
}

/// Separation between two posed polygons; zero when touching or overlapping.
pub fn distance(a: &PosedPolygon, b: &PosedPolygon) -> f64 {
    if intersect(a, b).is_some() {
        return 0.0;
    }
    hull_distance(&a.vertices, &b.vertices)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_square_at(x: f64, y: f64) -> PosedPolygon {
        ConvexPolygon::rectangle(1.0, 1.0)
            .unwrap()
            .posed(&Pose2::new(x, y, 0.0))
    }

    #[test]
    fn overlapping_squares_give_face_mtv() {
        let m = intersect(&unit_square_at(0.0, 0.0), &unit_square_at(0.5, 0.0)).unwrap();
        assert!((m.axis - Vec2::new(1.0, 0.0)).norm() < 1e-12);
        assert!((m.depth - 0.5).abs() < 1e-12);
    }

    #[test]
    fn disjoint_squares_have_no_mtv() {
        assert!(intersect(&unit_square_at(0.0, 0.0), &unit_square_at(3.0, 0.0)).is_none());
    }

    #[test]
    fn coincident_squares_full_depth() {
        let m = intersect(&unit_square_at(0.0, 0.0), &unit_square_at(0.0, 0.0)).unwrap();
        assert!((m.depth - 1.0).abs() < 1e-12);
        assert!((m.axis.norm() - 1.0).abs() < 1e-12);
        assert!(m.axis.x.abs() < 1e-12 || m.axis.y.abs() < 1e-12);
    }

    #[test]
    fn touching_is_not_penetration() {
        assert!(intersect(&unit_square_at(0.0, 0.0), &unit_square_at(1.0, 0.0)).is_none());
        assert_eq!(distance(&unit_square_at(0.0, 0.0), &unit_square_at(1.0, 0.0)), 0.0);
    }

    #[test]
    fn triangle_gap() {
        let tri = |x0: f64| {
            PosedPolygon {
                vertices: vec![
                    Vec2::new(x0, 0.0),
                    Vec2::new(x0 + 1.0, 0.0),
                    Vec2::new(x0, 1.0),
                ],
                normals: vec![],
                center: Vec2::new(x0 + 1.0 / 3.0, 1.0 / 3.0),
                radius: 1.0,
            }
        };
        // Brute force over all vertex-edge pairs.
        let a = tri(0.0);
        let b = tri(3.0);
        let mut brute = f64::INFINITY;
        for p in &a.vertices {
            for i in 0..3 {
                brute = brute.min(point_segment_distance(p, &b.vertices[i], &b.vertices[(i + 1) % 3]));
            }
        }
        for p in &b.vertices {
            for i in 0..3 {
                brute = brute.min(point_segment_distance(p, &a.vertices[i], &a.vertices[(i + 1) % 3]));
            }
        }
        assert!((brute - 2.0).abs() < 1e-12);
        assert!((hull_distance(&a.vertices, &b.vertices) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn face_gap() {
        let d = 0.37;
        let got = distance(&unit_square_at(0.0, 0.0), &unit_square_at(0.0, 1.0 + d));
        assert!((got - d).abs() < 1e-12);
    }

    #[test]
    fn overlap_distance_zero() {
        assert_eq!(distance(&unit_square_at(0.0, 0.0), &unit_square_at(0.2, 0.3)), 0.0);
    }

    #[test]
    fn degenerate_hull_distances() {
        let p = [Vec2::new(0.0, 0.0)];
        let q = [Vec2::new(3.0, 4.0)];
        assert!((hull_distance(&p, &q) - 5.0).abs() < 1e-12);
        let seg = [Vec2::new(-1.0, 1.0), Vec2::new(1.0, 1.0)];
        assert!((hull_distance(&p, &seg) - 1.0).abs() < 1e-12);
        let crossing = [Vec2::new(0.0, 0.0), Vec2::new(0.0, 2.0)];
        assert_eq!(hull_distance(&crossing, &seg), 0.0);
    }

    #[test]
    fn rejects_bad_polygons() {
        assert!(matches!(
            ConvexPolygon::new(vec![Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0)]),
            Err(GeometryError::TooFewVertices(2))
        ));
        let collinear = vec![
            Vec2::new(0.0, 0.0),
            Vec2::new(1.0, 0.0),
            Vec2::new(2.0, 0.0),
            Vec2::new(1.0, 1.0),
        ];
        assert!(matches!(
            ConvexPolygon::new(collinear),
            Err(GeometryError::NotConvex(_))
        ));
    }

    #[test]
    fn constructor_recenters_and_orients() {
        let cw = vec![
            Vec2::new(2.0, 2.0),
            Vec2::new(2.0, 3.0),
            Vec2::new(3.0, 3.0),
            Vec2::new(3.0, 2.0),
        ];
        let p = ConvexPolygon::new(cw).unwrap();
        assert!(p.area() > 0.0);
        let c: Vec2 = p.vertices().iter().sum::<Vec2>() / 4.0;
        assert!(c.norm() < 1e-12);
    }
}
