use super::{cross, ConvexPolygon, Vec2};

/// Andrew's monotone chain. Returns hull vertices in CCW order with collinear
/// points dropped; one- and two-point inputs yield the degenerate hull.
pub fn convex_hull(points: &[Vec2]) -> Vec<Vec2> {
    let mut pts: Vec<Vec2> = points.to_vec();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let mut lower: Vec<Vec2> = Vec::with_capacity(pts.len());
    for p in &pts {
        while lower.len() >= 2
            && cross(
                &(lower[lower.len() - 1] - lower[lower.len() - 2]),
                &(p - lower[lower.len() - 2]),
            ) <= 0.0
        {
            lower.pop();
        }
        lower.push(*p);
    }
    let mut upper: Vec<Vec2> = Vec::with_capacity(pts.len());
    for p in pts.iter().rev() {
        while upper.len() >= 2
            && cross(
                &(upper[upper.len() - 1] - upper[upper.len() - 2]),
                &(p - upper[upper.len() - 2]),
            ) <= 0.0
        {
            upper.pop();
        }
        upper.push(*p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Reduces `shape` to `max(3, ceil(rate * n))` vertices by repeatedly dropping
/// the vertex whose removal loses the least area.
pub fn simplify(shape: &ConvexPolygon, rate: f64) -> ConvexPolygon {
    assert!(rate > 0.0 && rate <= 1.0, "reduction rate {rate} outside (0, 1]");
    let n = shape.len();
    let target = ((rate * n as f64 - 1e-9).ceil() as usize).clamp(3, n);
    if target >= n {
        return shape.clone();
    }
    let pts = decimate(shape.vertices().to_vec(), target);
    // Dropping a vertex of a strictly convex polygon keeps it strictly convex.
    ConvexPolygon::new(pts).expect("decimated convex polygon stays convex")
}

fn decimate(pts: Vec<Vec2>, target: usize) -> Vec<Vec2> {
    let n = pts.len();
    // Each entry keeps its original index so ties (within relative 1e-9) can
    // be broken toward the vertex farthest around the ring from everything
    // removed so far; symmetric shapes then lose vertices evenly.
    let mut ring: Vec<(usize, Vec2)> = pts.into_iter().enumerate().collect();
    let mut removed: Vec<usize> = Vec::new();
    let ring_gap = |i: usize, removed: &[usize]| {
        removed
            .iter()
            .map(|&r| {
                let d = i.abs_diff(r);
                d.min(n - d)
            })
            .min()
            .unwrap_or(0)
    };
    while ring.len() > target {
        let m = ring.len();
        let areas: Vec<f64> = (0..m)
            .map(|i| {
                let a = ring[(i + m - 1) % m].1;
                let b = ring[i].1;
                let c = ring[(i + 1) % m].1;
                cross(&(b - a), &(c - a)).abs()
            })
            .collect();
        let min_area = areas.iter().copied().fold(f64::INFINITY, f64::min);
        let cutoff = min_area + min_area.abs() * 1e-9;
        let mut best = usize::MAX;
        let mut best_gap = 0;
        for i in 0..m {
            if areas[i] > cutoff {
                continue;
            }
            let gap = ring_gap(ring[i].0, &removed);
            if best == usize::MAX || gap > best_gap {
                best = i;
                best_gap = gap;
            }
        }
        removed.push(ring[best].0);
        ring.remove(best);
    }
    ring.into_iter().map(|(_, p)| p).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::polygon::area_centroid;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// O(n³) oracle: i and j are hull vertices when every other point lies
    /// strictly left of the directed edge i -> j.
    fn brute_hull_vertices(pts: &[Vec2]) -> Vec<Vec2> {
        let mut out = Vec::new();
        for i in 0..pts.len() {
            for j in 0..pts.len() {
                if i == j {
                    continue;
                }
                let all_left = (0..pts.len())
                    .filter(|&k| k != i && k != j)
                    .all(|k| cross(&(pts[j] - pts[i]), &(pts[k] - pts[i])) > 0.0);
                if all_left {
                    out.push(pts[i]);
                    out.push(pts[j]);
                }
            }
        }
        out.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
        out.dedup();
        out
    }

    #[test]
    fn interior_point_dropped() {
        let pts = vec![
            Vec2::new(0.0, 0.0),
            Vec2::new(1.0, 0.0),
            Vec2::new(1.0, 1.0),
            Vec2::new(0.0, 1.0),
            Vec2::new(0.5, 0.5),
        ];
        let h = convex_hull(&pts);
        assert_eq!(h.len(), 4);
        assert!(!h.contains(&Vec2::new(0.5, 0.5)));
    }

    #[test]
    fn single_and_collinear_inputs() {
        let p = Vec2::new(0.3, 0.4);
        assert_eq!(convex_hull(&[p]), vec![p]);
        let line: Vec<Vec2> = (0..5).map(|i| Vec2::new(i as f64, 2.0 * i as f64)).collect();
        let h = convex_hull(&line);
        assert_eq!(h.len(), 2);
        assert!(h.contains(&line[0]) && h.contains(&line[4]));
    }

    #[test]
    fn matches_brute_force_in_disc() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..5 {
            let pts: Vec<Vec2> = (0..100)
                .map(|_| {
                    let r = rng.random::<f64>().sqrt();
                    let t = rng.random::<f64>() * std::f64::consts::TAU;
                    Vec2::new(r * t.cos(), r * t.sin())
                })
                .collect();
            let mut h = convex_hull(&pts);
            h.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
            assert_eq!(h, brute_hull_vertices(&pts));
        }
    }

    #[test]
    fn simplify_counts() {
        let circle = ConvexPolygon::regular(100, 1.0).unwrap();
        assert_eq!(simplify(&circle, 0.1).len(), 10);
        assert_eq!(simplify(&circle, 0.33).len(), 33);
        assert_eq!(simplify(&circle, 0.01).len(), 3);
        assert_eq!(simplify(&circle, 1.0), circle);
    }

    #[test]
    fn simplify_keeps_centroid_close() {
        let circle = ConvexPolygon::regular(100, 1.0).unwrap();
        for rate in [0.33, 0.1, 0.033] {
            let s = simplify(&circle, rate);
            assert!(s.len() >= 3);
            let raw = decimate(circle.vertices().to_vec(), s.len());
            let drift = area_centroid(&raw).norm();
            assert!(drift < 0.05, "rate {rate}: drift {drift}");
        }
    }

    #[test]
    fn simplify_is_deterministic() {
        let e = ConvexPolygon::ellipse(64, 0.05, 0.02).unwrap();
        assert_eq!(simplify(&e, 0.2), simplify(&e, 0.2));
    }
}
