//! Reference trajectory generation: a best-first search over constant-curvature
//! arcs followed by a trapezoidal speed plan along the resulting path.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};

use serde::{Deserialize, Serialize};

use crate::bspline::{fit_from_samples, BoundaryState, UniformBSpline};
use crate::env::ObstacleField;
use crate::geom::{heading_vec, normalize_angle, perp, Vec2};
use crate::sweep::{dsv_centers, Pose2, VehicleGeometry};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
}

impl Pose {
    pub fn new(x: f64, y: f64, theta: f64) -> Self {
        Self {
            x,
            y,
            theta: normalize_angle(theta),
        }
    }

    pub fn pos(&self) -> Vec2 {
        Vec2::new(self.x, self.y)
    }

    pub fn as_pose2(&self) -> Pose2 {
        Pose2::new(self.pos(), self.theta)
    }

    /// Pose after `length` along an arc of curvature `kappa`.
    pub fn advance(&self, kappa: f64, length: f64) -> Self {
        let h = heading_vec(self.theta);
        let n = perp(&h);
        let (dx, dy) = if kappa.abs() < 1e-12 {
            (length, 0.0)
        } else {
            let a = kappa * length;
            (a.sin() / kappa, (1.0 - a.cos()) / kappa)
        };
        let p = self.pos() + h * dx + n * dy;
        Pose::new(p.x, p.y, self.theta + kappa * length)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LatticeConfig {
    pub grid: f64,
    pub theta_bins: usize,
    pub step: f64,
    pub kappa_max: f64,
    pub goal_pos_tol: f64,
    pub goal_theta_tol: f64,
    /// Extra cost per metre per unit curvature; keeps straight motion preferred.
    pub steer_cost: f64,
    /// Extra cost per unit change of curvature between consecutive arcs.
    pub switch_cost: f64,
    /// Goal distance below which a direct curve to the goal is attempted.
    pub shot_range: f64,
    /// Extra cost per metre while the rear axle is within `clearance` of an
    /// obstacle, proportional to the intrusion.
    pub clearance_cost: f64,
    pub clearance: f64,
    /// Added to the footprint disc radius in every collision check, so the
    /// fitted reference keeps some room from obstacles.
    pub inflation: f64,
    /// Margin around the start/goal box that bounds the search.
    pub margin: f64,
    pub max_expansions: usize,
}

impl Default for LatticeConfig {
    fn default() -> Self {
        Self {
            grid: 0.5,
            theta_bins: 32,
            step: 2.0,
            kappa_max: 0.12,
            goal_pos_tol: 0.5,
            goal_theta_tol: 0.2,
            steer_cost: 0.5,
            switch_cost: 2.0,
            shot_range: 25.0,
            clearance_cost: 1.0,
            clearance: 3.0,
            inflation: 0.4,
            margin: 25.0,
            max_expansions: 400_000,
        }
    }
}

/// Time-stamped rear-axle positions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceTrajectory {
    pub samples: Vec<(f64, Vec2)>,
    pub dt_hint: f64,
    pub path_length: f64,
}

impl ReferenceTrajectory {
    pub fn duration(&self) -> f64 {
        self.samples.last().map_or(0.0, |s| s.0) - self.samples.first().map_or(0.0, |s| s.0)
    }

    /// Least-squares cubic spline through the samples with the given ends and
    /// a knot span of at most `dt`. Samples should be several per span: with
    /// about one per span the alternating control mode is poorly observed.
    pub fn to_spline(&self, dt: f64, start: &BoundaryState, goal: &BoundaryState) -> Result<UniformBSpline> {
        Ok(fit_from_samples(&self.samples, dt, start, goal)?.spline)
    }
}

fn pose_collides(field: &ObstacleField, g: &VehicleGeometry, pose: &Pose, inflation: f64) -> bool {
    let discs = dsv_centers(g, &pose.as_pose2());
    let (first, last) = (discs[0], discs[discs.len() - 1]);
    let mid = 0.5 * (first.center + last.center);
    // every disc lies within this radius of the footprint centre
    let reach = 0.5 * (last.center - first.center).norm() + first.radius + inflation;
    if field.nearest_distance(&mid).0 > reach {
        return false;
    }
    discs
        .iter()
        .any(|d| field.nearest_distance(&d.center).0 <= d.radius + inflation)
}

/// Cubic Hermite curve from `from` to `goal` with tangent lengths equal to
/// their distance, sampled about every `spacing` metres. `None` when it turns
/// tighter than `kappa_max`, reverses, or collides.
fn direct_shot(
    from: &Pose,
    goal: &Pose,
    field: &ObstacleField,
    g: &VehicleGeometry,
    cfg: &LatticeConfig,
) -> Option<Vec<Pose>> {
    let (kappa_max, spacing) = (cfg.kappa_max, cfg.step);
    let (p0, p1) = (from.pos(), goal.pos());
    let d = (p1 - p0).norm();
    if d < 1e-9 {
        return Some(Vec::new());
    }
    let (t0, t1) = (heading_vec(from.theta) * d, heading_vec(goal.theta) * d);
    let n = ((d / spacing).ceil() as usize).max(1) * 4;
    let mut poses = Vec::with_capacity(n);
    for k in 1..=n {
        let s = k as f64 / n as f64;
        let (s2, s3) = (s * s, s * s * s);
        let pos = p0 * (2.0 * s3 - 3.0 * s2 + 1.0)
            + t0 * (s3 - 2.0 * s2 + s)
            + p1 * (-2.0 * s3 + 3.0 * s2)
            + t1 * (s3 - s2);
        let vel = p0 * (6.0 * s2 - 6.0 * s) + t0 * (3.0 * s2 - 4.0 * s + 1.0) + p1 * (-6.0 * s2 + 6.0 * s) + t1 * (3.0 * s2 - 2.0 * s);
        let acc = p0 * (12.0 * s - 6.0) + t0 * (6.0 * s - 4.0) + p1 * (-12.0 * s + 6.0) + t1 * (6.0 * s - 2.0);
        let speed = vel.norm();
        if speed < 1e-9 || vel.dot(&(p1 - p0)) <= 0.0 {
            return None;
        }
        if (crate::geom::cross(&vel, &acc) / speed.powi(3)).abs() > kappa_max {
            return None;
        }
        poses.push(Pose::new(pos.x, pos.y, vel.y.atan2(vel.x)));
    }
    if poses.iter().any(|p| pose_collides(field, g, p, cfg.inflation)) {
        return None;
    }
    let mut out: Vec<Pose> = poses.into_iter().skip(3).step_by(4).collect();
    *out.last_mut().expect("at least one sample") = *goal;
    Some(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct Cell(i64, i64, usize);

#[derive(Debug, Clone, Copy)]
struct Open {
    f: f64,
    g: f64,
    bin: usize,
    node: usize,
}

impl PartialEq for Open {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Open {}
impl PartialOrd for Open {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Open {
    // max-heap: smaller f first, then smaller g, then smaller bin, then older node
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .f
            .total_cmp(&self.f)
            .then_with(|| other.g.total_cmp(&self.g))
            .then_with(|| other.bin.cmp(&self.bin))
            .then_with(|| other.node.cmp(&self.node))
    }
}

struct Node {
    pose: Pose,
    kappa: f64,
    parent: Option<usize>,
}

fn chain_to(nodes: &[Node], node: usize) -> Vec<Pose> {
    let mut chain = Vec::new();
    let mut at = Some(node);
    while let Some(i) = at {
        chain.push(nodes[i].pose);
        at = nodes[i].parent;
    }
    chain.reverse();
    chain
}

/// Best-first search over fixed-length arcs. Returns the pose chain from
/// `start` to exactly `goal`. Nodes near the goal first try a direct
/// curvature-limited curve; otherwise a node within the goal tolerance is
/// joined to the goal by a straight segment.
pub fn lattice_search(
    start: &Pose,
    goal: &Pose,
    field: &ObstacleField,
    g: &VehicleGeometry,
    cfg: &LatticeConfig,
) -> Result<Vec<Pose>> {
    if !(cfg.grid > 0.0 && cfg.step > 0.0 && cfg.theta_bins > 0 && cfg.kappa_max > 0.0) {
        return Err(Error::InvalidArgument(format!("invalid lattice config {cfg:?}")));
    }
    // a full-curvature arc must leave the start heading bin, or every turn
    // lands in the straight successor's cell and is pruned
    let bin_width = std::f64::consts::TAU / cfg.theta_bins as f64;
    if cfg.kappa_max * cfg.step < 0.5 * bin_width {
        return Err(Error::InvalidArgument(format!(
            "lattice arc turns {:.3} rad per step, under half a heading bin ({:.3} rad)",
            cfg.kappa_max * cfg.step,
            bin_width
        )));
    }
    if pose_collides(field, g, start, cfg.inflation) || pose_collides(field, g, goal, cfg.inflation) {
        return Err(Error::NoPath { expansions: 0 });
    }
    let bin_of = |theta: f64| {
        let two_pi = std::f64::consts::TAU;
        let u = theta.rem_euclid(two_pi) / two_pi * cfg.theta_bins as f64;
        (u.round() as usize) % cfg.theta_bins
    };
    let cell_of = |p: &Pose| {
        Cell(
            (p.x / cfg.grid).round() as i64,
            (p.y / cfg.grid).round() as i64,
            bin_of(p.theta),
        )
    };
    let (lo, hi) = (
        Vec2::new(start.x.min(goal.x), start.y.min(goal.y)).add_scalar(-cfg.margin),
        Vec2::new(start.x.max(goal.x), start.y.max(goal.y)).add_scalar(cfg.margin),
    );
    let inside = |p: &Pose| p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y;
    let heuristic = |p: &Pose| (p.pos() - goal.pos()).norm();
    let kappas = [0.0, -0.5, 0.5, -1.0, 1.0].map(|f| f * cfg.kappa_max);

    let mut nodes = vec![Node {
        pose: *start,
        kappa: 0.0,
        parent: None,
    }];
    let mut best_g: HashMap<Cell, f64> = HashMap::new();
    best_g.insert(cell_of(start), 0.0);
    let mut open = BinaryHeap::new();
    open.push(Open {
        f: heuristic(start),
        g: 0.0,
        bin: bin_of(start.theta),
        node: 0,
    });
    let mut expansions = 0;
    while let Some(cur) = open.pop() {
        let pose = nodes[cur.node].pose;
        if best_g.get(&cell_of(&pose)).is_some_and(|g0| cur.g > *g0) {
            continue;
        }
        let d_goal = (pose.pos() - goal.pos()).norm();
        if d_goal <= cfg.shot_range {
            if let Some(tail) = direct_shot(&pose, goal, field, g, cfg) {
                let mut chain = chain_to(&nodes, cur.node);
                chain.extend(tail);
                return Ok(chain);
            }
        }
        let dth = normalize_angle(pose.theta - goal.theta).abs();
        if d_goal <= cfg.goal_pos_tol && dth <= cfg.goal_theta_tol {
            let mut chain = chain_to(&nodes, cur.node);
            if d_goal > 1e-9 {
                chain.push(*goal);
            } else {
                *chain.last_mut().expect("chain holds the start") = *goal;
            }
            return Ok(chain);
        }
        expansions += 1;
        if expansions > cfg.max_expansions {
            break;
        }
        for &k in &kappas {
            let next = pose.advance(k, cfg.step);
            if !inside(&next) {
                continue;
            }
            let mid = pose.advance(k, 0.5 * cfg.step);
            if pose_collides(field, g, &next, cfg.inflation) || pose_collides(field, g, &mid, cfg.inflation) {
                continue;
            }
            let clearance = field.nearest_distance(&next.pos()).0;
            let intrusion = (cfg.clearance - clearance).max(0.0);
            let g_next = cur.g
                + cfg.step * (1.0 + cfg.steer_cost * k.abs() + cfg.clearance_cost * intrusion)
                + cfg.switch_cost * (k - nodes[cur.node].kappa).abs();
            let cell = cell_of(&next);
            if best_g.get(&cell).is_some_and(|g0| g_next >= *g0) {
                continue;
            }
            best_g.insert(cell, g_next);
            nodes.push(Node {
                pose: next,
                kappa: k,
                parent: Some(cur.node),
            });
            open.push(Open {
                f: g_next + heuristic(&next),
                g: g_next,
                bin: cell.2,
                node: nodes.len() - 1,
            });
        }
    }
    Err(Error::NoPath { expansions })
}

/// Rest-to-rest speed plan along the polyline through `path`, sampled every
/// `dt_hint` seconds and at the final time.
pub fn trapezoidal_profile(path: &[Pose], v_max: f64, a_max: f64, dt_hint: f64) -> Result<ReferenceTrajectory> {
    if path.is_empty() {
        return Err(Error::InvalidArgument("empty path".into()));
    }
    if !(v_max > 0.0 && a_max > 0.0 && dt_hint > 0.0) {
        return Err(Error::InvalidArgument("speed, acceleration and time step must be positive".into()));
    }
    let pts: Vec<Vec2> = path.iter().map(Pose::pos).collect();
    let mut cum = vec![0.0];
    for w in pts.windows(2) {
        cum.push(cum.last().unwrap() + (w[1] - w[0]).norm());
    }
    let total = *cum.last().unwrap();
    if total <= 1e-12 {
        return Ok(ReferenceTrajectory {
            samples: vec![(0.0, pts[0])],
            dt_hint,
            path_length: 0.0,
        });
    }
    let v_p = v_max.min((total * a_max).sqrt());
    let t_acc = v_p / a_max;
    let s_acc = 0.5 * v_p * t_acc;
    let t_cruise = (total - 2.0 * s_acc).max(0.0) / v_p;
    let duration = 2.0 * t_acc + t_cruise;
    let s_at = |t: f64| {
        if t <= t_acc {
            0.5 * a_max * t * t
        } else if t <= t_acc + t_cruise {
            s_acc + v_p * (t - t_acc)
        } else {
            let r = (duration - t).max(0.0);
            total - 0.5 * a_max * r * r
        }
    };
    let pos_at = |s: f64| {
        let s = s.clamp(0.0, total);
        let i = match cum.binary_search_by(|c| c.total_cmp(&s)) {
            Ok(i) => i.min(pts.len() - 2),
            Err(i) => (i - 1).min(pts.len() - 2),
        };
        let seg = cum[i + 1] - cum[i];
        let u = if seg > 0.0 { (s - cum[i]) / seg } else { 0.0 };
        pts[i] + (pts[i + 1] - pts[i]) * u
    };
    let steps = (duration / dt_hint - 1e-9).floor() as usize;
    let mut samples: Vec<(f64, Vec2)> = (0..=steps)
        .map(|k| {
            let t = k as f64 * dt_hint;
            (t, pos_at(s_at(t)))
        })
        .collect();
    if duration - samples.last().unwrap().0 > 1e-9 {
        samples.push((duration, pts[pts.len() - 1]));
    }
    Ok(ReferenceTrajectory {
        samples,
        dt_hint,
        path_length: total,
    })
}
