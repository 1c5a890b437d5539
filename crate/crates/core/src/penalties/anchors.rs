//! Anchor pairs `{p, v}` that give each free control point a repulsive
//! direction away from obstacles.

use serde::{Deserialize, Serialize};

use crate::bspline::UniformBSpline;
use crate::env::ObstacleField;
use crate::geom::Vec2;

const BISECT_TOL: f64 = 1e-3;
const BISECT_ITERS: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AnchorKind {
    /// The control point lies within the circle radius of an obstacle.
    Collision,
    /// The control point is clear but within the safety band.
    Close,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnchorPair {
    pub i: usize,
    pub p: Vec2,
    /// Unit direction along which clearance is measured.
    pub v: Vec2,
    pub kind: AnchorKind,
}

fn unit_or(v: Vec2, fallback: Vec2) -> Vec2 {
    let n = v.norm();
    if n > 1e-12 {
        v / n
    } else {
        fallback
    }
}

/// Pairs for every free control point of `spline`.
///
/// A point closer than `r_circle` to an obstacle gets a collision pair at the
/// first point of the segment towards its reference counterpart that clears
/// `r_circle`. A point within `s_f + r_circle` gets close pairs against its
/// nearest obstacle point and against the nearest one on the opposite side.
pub fn gen_anchor_pairs(
    spline: &UniformBSpline,
    reference: &UniformBSpline,
    field: &ObstacleField,
    s_f: f64,
    r_circle: f64,
) -> Vec<AnchorPair> {
    let mut pairs = Vec::new();
    if field.is_empty() {
        return pairs;
    }
    let q = spline.control_points();
    let q_ref = reference.control_points();
    let dist = |x: &Vec2| field.nearest_distance(x).0;
    for i in spline.free_range() {
        let qi = q[i];
        let Some(near) = field.nearest(&qi) else { continue };
        if near.distance < r_circle {
            let target = q_ref.get(i).copied().unwrap_or(qi);
            let pair = if dist(&target) >= r_circle {
                let (mut lo, mut hi) = (qi, target);
                for _ in 0..BISECT_ITERS {
                    let mid = 0.5 * (lo + hi);
                    if dist(&mid) < r_circle {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                    if (hi - lo).norm() < BISECT_TOL {
                        break;
                    }
                }
                let fallback = unit_or(qi - near.point, Vec2::x());
                AnchorPair {
                    i,
                    p: hi,
                    v: unit_or(hi - qi, fallback),
                    kind: AnchorKind::Collision,
                }
            } else {
                // no rebound direction along the reference: push straight out
                let v = unit_or(qi - near.point, Vec2::x());
                AnchorPair {
                    i,
                    p: near.point + v * r_circle,
                    v,
                    kind: AnchorKind::Collision,
                }
            };
            pairs.push(pair);
        } else if near.distance < s_f + r_circle {
            let v = unit_or(qi - near.point, Vec2::x());
            pairs.push(AnchorPair {
                i,
                p: near.point,
                v,
                kind: AnchorKind::Close,
            });
            let opposite = field.nearest_where(&qi, |w| (qi - w).dot(&v) < 0.0);
            if let Some(o) = opposite {
                if o.distance < s_f + r_circle {
                    pairs.push(AnchorPair {
                        i,
                        p: o.point,
                        v: unit_or(qi - o.point, -v),
                        kind: AnchorKind::Close,
                    });
                }
            }
        }
    }
    pairs
}
