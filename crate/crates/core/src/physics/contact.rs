use crate::geometry::{cross, intersect, sat_cost, wrap_angle, Mtv, Pose2, PosedPolygon, Vec2};

use super::{Work, World, INACTIVE};

/// A body taking part in a resolved contact.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Body {
    Gripper,
    Object(usize),
    Obstacle(usize),
}

/// `pusher` displaced `pushed` during resolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Contact {
    pub pusher: Body,
    pub pushed: usize,
}

// Feature tolerance for picking support vertices.
const FEATURE_EPS: f64 = 1e-7;

/// Gauss–Seidel contact resolution over the current substep.
///
/// `levels[i]` is the chain depth of object i (gripper = 0, `INACTIVE` when
/// the object has not been touched). Returns false if penetration deeper
/// than the contact tolerance survives `max_resolution_iters` sweeps.
pub(super) fn resolve(
    world: &World,
    poses: &mut [Pose2],
    polys: &mut [PosedPolygon],
    levels: &mut [u32],
    gripper: &[PosedPolygon],
    work: &mut Work,
    mut contacts: Option<&mut Vec<Contact>>,
) -> bool {
    let tol = world.config.contact_tolerance;
    let coupling = world.config.rotation_coupling;
    let n = poses.len();
    let mut log = |c: Contact| {
        if let Some(list) = contacts.as_deref_mut() {
            if !list.contains(&c) {
                list.push(c);
            }
        }
    };

    for _ in 0..world.config.max_resolution_iters {
        let mut moved = false;

        for i in 0..n {
            for g in gripper {
                work.vertex_ops += sat_cost(g, &polys[i]);
                if let Some(m) = deep(intersect(g, &polys[i]), tol) {
                    push(poses, polys, i, g, &m, m.depth, coupling);
                    levels[i] = levels[i].min(1);
                    log(Contact { pusher: Body::Gripper, pushed: i });
                    moved = true;
                }
            }
        }

        for i in 0..n {
            for j in (i + 1)..n {
                if levels[i] == INACTIVE && levels[j] == INACTIVE {
                    continue;
                }
                work.vertex_ops += sat_cost(&polys[i], &polys[j]);
                let Some(m) = deep(intersect(&polys[i], &polys[j]), tol) else {
                    continue;
                };
                moved = true;
                match levels[i].cmp(&levels[j]) {
                    std::cmp::Ordering::Less => {
                        let a = polys[i].clone();
                        push(poses, polys, j, &a, &m, m.depth, coupling);
                        levels[j] = levels[j].min(levels[i] + 1);
                        log(Contact { pusher: Body::Object(i), pushed: j });
                    }
                    std::cmp::Ordering::Greater => {
                        let b = polys[j].clone();
                        let flipped = Mtv { axis: -m.axis, depth: m.depth };
                        push(poses, polys, i, &b, &flipped, m.depth, coupling);
                        levels[i] = levels[i].min(levels[j] + 1);
                        log(Contact { pusher: Body::Object(j), pushed: i });
                    }
                    std::cmp::Ordering::Equal => {
                        let half = 0.5 * m.depth;
                        let a = polys[i].clone();
                        let b = polys[j].clone();
                        push(poses, polys, j, &a, &m, half, coupling);
                        let flipped = Mtv { axis: -m.axis, depth: m.depth };
                        push(poses, polys, i, &b, &flipped, half, coupling);
                        log(Contact { pusher: Body::Object(i), pushed: j });
                        log(Contact { pusher: Body::Object(j), pushed: i });
                    }
                }
            }
        }

        for i in 0..n {
            if levels[i] == INACTIVE {
                continue;
            }
            for (k, o) in world.obstacles.iter().enumerate() {
                work.vertex_ops += sat_cost(o, &polys[i]);
                if let Some(m) = deep(intersect(o, &polys[i]), tol) {
                    // Obstacles deflect without imparting spin.
                    let d = m.axis * m.depth;
                    poses[i].x += d.x;
                    poses[i].y += d.y;
                    polys[i].translate(&d);
                    log(Contact { pusher: Body::Obstacle(k), pushed: i });
                    moved = true;
                }
            }
        }

        if !moved {
            return true;
        }
    }

    residual_ok(world, polys, levels, gripper, tol)
}

fn deep(m: Option<Mtv>, tol: f64) -> Option<Mtv> {
    m.filter(|m| m.depth > tol)
}

fn residual_ok(
    world: &World,
    polys: &[PosedPolygon],
    levels: &[u32],
    gripper: &[PosedPolygon],
    tol: f64,
) -> bool {
    let n = polys.len();
    for i in 0..n {
        for g in gripper {
            if deep(intersect(g, &polys[i]), tol).is_some() {
                return false;
            }
        }
        if levels[i] == INACTIVE {
            continue;
        }
        for o in &world.obstacles {
            if deep(intersect(o, &polys[i]), tol).is_some() {
                return false;
            }
        }
        for (j, q) in polys.iter().enumerate() {
            if j != i && deep(intersect(&polys[i], q), tol).is_some() {
                return false;
            }
        }
    }
    true
}

/// Moves object `i` by `amount` along `m.axis` (pointing away from `pusher`)
/// and applies the rotation surrogate.
fn push(
    poses: &mut [Pose2],
    polys: &mut [PosedPolygon],
    i: usize,
    pusher: &PosedPolygon,
    m: &Mtv,
    amount: f64,
    coupling: f64,
) {
    let d = m.axis * amount;
    let before = polys[i].clone();
    poses[i].x += d.x;
    poses[i].y += d.y;
    polys[i].translate(&d);
    if coupling <= 0.0 {
        return;
    }
    let dtheta = coupling * spin(pusher, &before, &m.axis, amount);
    if dtheta != 0.0 {
        polys[i].rotate(dtheta);
        poses[i].theta = wrap_angle(poses[i].theta + dtheta);
    }
}

/// Unscaled rotation for a push of depth `depth` along `n`:
/// `atan2(|lever|, h) · min(1, depth / h) · sign(torque)` with `h` the
/// pushed body's half-extent toward the pusher.
fn spin(pusher: &PosedPolygon, pushed: &PosedPolygon, n: &Vec2, depth: f64) -> f64 {
    let p = contact_point(pusher, pushed, n);
    let r = p - pushed.center;
    let torque = cross(&r, n);
    if torque == 0.0 {
        return 0.0;
    }
    let t = Vec2::new(-n.y, n.x);
    let lever = r.dot(&t).abs();
    let h = pushed.support_extent(&(-n));
    if h <= 0.0 {
        return 0.0;
    }
    lever.atan2(h) * (depth / h).min(1.0) * torque.signum()
}

/// Contact point between a pusher and the body it pushes along `n`: the
/// single deepest vertex when there is one, else the midpoint of the
/// face–face overlap.
fn contact_point(a: &PosedPolygon, b: &PosedPolygon, n: &Vec2) -> Vec2 {
    let a_max = a.vertices.iter().map(|v| v.dot(n)).fold(f64::NEG_INFINITY, f64::max);
    let b_min = b.vertices.iter().map(|v| v.dot(n)).fold(f64::INFINITY, f64::min);
    let sa: Vec<&Vec2> = a.vertices.iter().filter(|v| v.dot(n) >= a_max - FEATURE_EPS).collect();
    let sb: Vec<&Vec2> = b.vertices.iter().filter(|v| v.dot(n) <= b_min + FEATURE_EPS).collect();
    if sa.len() == 1 {
        return *sa[0];
    }
    if sb.len() == 1 {
        return *sb[0];
    }
    let t = Vec2::new(-n.y, n.x);
    let span = |s: &[&Vec2]| {
        s.iter().map(|v| v.dot(&t)).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| {
            (lo.min(x), hi.max(x))
        })
    };
    let (a0, a1) = span(&sa);
    let (b0, b1) = span(&sb);
    let lo = a0.max(b0);
    let hi = a1.min(b1);
    let s = if lo <= hi { 0.5 * (lo + hi) } else { 0.5 * (b0 + b1) };
    n * b_min + t * s
}
