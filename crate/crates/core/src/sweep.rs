//! Disc coverage of the vehicle footprint and of the area it sweeps.
//!
//! At each knot the rectangle is covered by equal discs along its axis
//! (discrete coverage). Between knots the extra area swept by the outer front
//! corner, the outer rear corner and the inner rear-axle end is covered by
//! discs laid along the chord each of those points travels (continuous
//! coverage, zones `Z1`, `Z2`, `Z3`).

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::bspline::{clamped_curvature, UniformBSpline, DEFAULT_L_MIN};
use crate::env::ObstacleField;
use crate::geom::{body_to_world, heading_vec, perp, Vec2};
use crate::{Error, Result};

/// Curvature below which a span is treated as straight.
pub const STRAIGHT_EPS: f64 = 1e-6;
/// Largest deviation from a pure translation for which a span is covered by
/// inflated end-pose discs instead of continuous-coverage discs (m).
pub const NEAR_STRAIGHT_TOL: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VehicleGeometry {
    /// Front overhang ahead of the front axle.
    pub l_f: f64,
    /// Rear overhang behind the rear axle.
    pub l_r: f64,
    /// Wheelbase.
    pub l_w: f64,
    /// Body width.
    pub l_b: f64,
    pub n_discs: usize,
}

impl Default for VehicleGeometry {
    fn default() -> Self {
        Self {
            l_f: 1.015,
            l_r: 1.015,
            l_w: 2.87,
            l_b: 1.86,
            n_discs: 5,
        }
    }
}

impl VehicleGeometry {
    pub fn validate(&self) -> Result<()> {
        let lens = [self.l_f, self.l_r, self.l_w, self.l_b];
        if lens.iter().any(|l| !(*l > 0.0) || !l.is_finite()) || self.n_discs == 0 {
            return Err(Error::InvalidArgument(format!("invalid vehicle geometry {self:?}")));
        }
        Ok(())
    }

    pub fn length(&self) -> f64 {
        self.l_r + self.l_w + self.l_f
    }

    pub fn half_width(&self) -> f64 {
        0.5 * self.l_b
    }

    /// Body-frame corners, counter-clockwise from front-left.
    pub fn corners_local(&self) -> [Vec2; 4] {
        let (xf, xr, h) = (self.l_w + self.l_f, -self.l_r, self.half_width());
        [
            Vec2::new(xf, h),
            Vec2::new(xr, h),
            Vec2::new(xr, -h),
            Vec2::new(xf, -h),
        ]
    }

    pub fn corners(&self, pose: &Pose2) -> [Vec2; 4] {
        self.corners_local()
            .map(|c| body_to_world(&pose.pos, pose.theta, &c))
    }

    /// Whether `p` lies within the footprint at `pose`.
    pub fn footprint_contains(&self, pose: &Pose2, p: &Vec2) -> bool {
        let d = p - pose.pos;
        let h = heading_vec(pose.theta);
        let x = d.dot(&h);
        let y = d.dot(&perp(&h));
        x >= -self.l_r && x <= self.l_w + self.l_f && y.abs() <= self.half_width()
    }
}

/// Rear-axle midpoint and heading.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose2 {
    pub pos: Vec2,
    pub theta: f64,
}

impl Pose2 {
    pub fn new(pos: Vec2, theta: f64) -> Self {
        Self { pos, theta }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Zone {
    /// Discrete coverage of the footprint.
    #[serde(alias = "o")]
    O,
    /// Outer front corner.
    #[serde(alias = "z1")]
    Z1,
    /// Outer rear corner.
    #[serde(alias = "z2")]
    Z2,
    /// Inner rear-axle end.
    #[serde(alias = "z3")]
    Z3,
}

impl std::str::FromStr for Zone {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "z1" => Ok(Zone::Z1),
            "z2" => Ok(Zone::Z2),
            "z3" => Ok(Zone::Z3),
            other => Err(Error::InvalidArgument(format!("unknown zone '{other}'"))),
        }
    }
}

pub const DEFAULT_ZONES: &[Zone] = &[Zone::Z1];
pub const ALL_ZONES: &[Zone] = &[Zone::Z1, Zone::Z2, Zone::Z3];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Disc {
    pub center: Vec2,
    pub radius: f64,
    pub zone: Zone,
}

impl Disc {
    pub fn contains(&self, p: &Vec2) -> bool {
        (p - self.center).norm_squared() <= self.radius * self.radius
    }
}

/// One knot span prepared for continuous coverage.
#[derive(Debug, Clone, PartialEq)]
pub struct SweptSpan {
    pub m: usize,
    pub pose_a: Pose2,
    pub pose_b: Pose2,
    /// Signed curvature bound; the sign gives the turn direction.
    pub k_span: f64,
}

impl SweptSpan {
    pub fn chord(&self) -> f64 {
        (self.pose_b.pos - self.pose_a.pos).norm()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircleHit {
    pub t: f64,
    pub pos: Vec2,
    pub witness: Vec2,
    pub distance: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CollisionReport {
    pub omega_coll: BTreeSet<usize>,
    pub omega_fl: BTreeSet<usize>,
    pub circle_hits: Vec<CircleHit>,
}

impl CollisionReport {
    pub fn is_clear(&self) -> bool {
        self.omega_coll.is_empty() && self.circle_hits.is_empty()
    }
}

pub fn dsv_radius(g: &VehicleGeometry) -> f64 {
    let a = g.length() / (2.0 * g.n_discs as f64);
    a.hypot(g.half_width())
}

pub fn dsv_centers(g: &VehicleGeometry, pose: &Pose2) -> Vec<Disc> {
    let n = g.n_discs as f64;
    let r = dsv_radius(g);
    let h = heading_vec(pose.theta);
    let rear = pose.pos - h * g.l_r;
    (1..=g.n_discs)
        .map(|k| Disc {
            center: rear + h * ((2 * k - 1) as f64 / (2.0 * n) * g.length()),
            radius: r,
            zone: Zone::O,
        })
        .collect()
}

/// Discs covering one zone of the area swept between `span.pose_a` and
/// `span.pose_b`.
pub fn csv_discs(g: &VehicleGeometry, span: &SweptSpan, zone: Zone) -> Result<Vec<Disc>> {
    if zone == Zone::O {
        return Err(Error::InvalidArgument("zone O has no continuous coverage".into()));
    }
    if span.chord() > g.length() + 1e-9 {
        return Err(Error::SpanInvalid(span.m));
    }
    if span.k_span.abs() <= STRAIGHT_EPS {
        return Ok(Vec::new());
    }
    // side of the turn: +1 for counter-clockwise, where I lies to the left
    let side = span.k_span.signum();
    let h = g.half_width();
    let front = g.l_w + g.l_f;
    let local = match zone {
        Zone::Z1 => Vec2::new(front, -side * h),
        Zone::Z2 => Vec2::new(-g.l_r, -side * h),
        Zone::Z3 => Vec2::new(0.0, side * h),
        Zone::O => unreachable!(),
    };
    let a = body_to_world(&span.pose_a.pos, span.pose_a.theta, &local);
    let a2 = body_to_world(&span.pose_b.pos, span.pose_b.theta, &local);
    let chord = (a2 - a).norm();
    let r_o = dsv_radius(g);
    let n = ((chord / r_o) - 1e-12).ceil().max(1.0) as usize;
    let mid = 0.5 * (a + a2);
    let dir = if chord > 1e-12 {
        (a2 - a) / chord
    } else {
        heading_vec(span.pose_a.theta)
    };

    let centers: Vec<Vec2> = (1..=n)
        .map(|k| mid + dir * ((2 * k - 1) as f64 / (2.0 * n as f64) * chord - 0.5 * chord))
        .collect();

    let r_a = (chord / (2.0 * n as f64)).hypot(h);
    let mt = match zone {
        Zone::Z3 => h,
        _ => {
            let radius = 1.0 / span.k_span.abs();
            let icr_a = span.pose_a.pos + perp(&heading_vec(span.pose_a.theta)) * (side * radius);
            let icr_b = span.pose_b.pos + perp(&heading_vec(span.pose_b.theta)) * (side * radius);
            let icr = 0.5 * (icr_a + icr_b);
            let reach = (a - icr).norm().max((a2 - icr).norm());
            (reach - (mid - icr).norm()).max(0.0)
        }
    };
    let m_mu = if n % 2 == 1 { 0.0 } else { chord / (2.0 * n as f64) };
    let r_b = mt.hypot(m_mu);
    let radius = r_a.max(r_b);
    Ok(centers
        .into_iter()
        .map(|center| Disc {
            center,
            radius,
            zone,
        })
        .collect())
}

/// Bound on how far the footprint swept along a constant-curvature span can
/// leave the area swept by translating along the chord, with the end-pose
/// discs also rotated to the chord heading. End-pose discs grown by this much
/// cover the span.
pub fn near_straight_inflation(g: &VehicleGeometry, span: &SweptSpan) -> f64 {
    let k = span.k_span.abs();
    let c = span.chord();
    if k <= STRAIGHT_EPS {
        return 0.0;
    }
    let r = 1.0 / k;
    let half = (0.5 * c / r).min(1.0);
    let arc = 2.0 * r * half.asin();
    let sagitta = r - (r * r - 0.25 * c * c).max(0.0).sqrt();
    // heading departs from the chord heading by at most half the turn
    let alpha = 0.5 * k * arc;
    let reach = (g.l_w + g.l_f).hypot(g.half_width());
    let n = g.n_discs as f64;
    let centre_reach = ((2.0 * n - 1.0) / (2.0 * n) * g.length() - g.l_r)
        .abs()
        .max((g.length() / (2.0 * n) - g.l_r).abs());
    sagitta + alpha * (reach + centre_reach)
}

/// Discs covering the area swept over one span (at most vehicle length):
/// inflated end-pose discs when the span is nearly straight, otherwise the
/// continuous-coverage discs of `zones`.
pub fn span_discs(g: &VehicleGeometry, span: &SweptSpan, zones: &[Zone]) -> Result<Vec<Disc>> {
    let delta = near_straight_inflation(g, span);
    if delta <= NEAR_STRAIGHT_TOL {
        let grow = |d: Disc| Disc {
            radius: d.radius + delta,
            ..d
        };
        let mut discs: Vec<Disc> = dsv_centers(g, &span.pose_a).into_iter().map(grow).collect();
        discs.extend(dsv_centers(g, &span.pose_b).into_iter().map(grow));
        return Ok(discs);
    }
    let mut discs = Vec::new();
    for &z in zones {
        discs.extend(csv_discs(g, span, z)?);
    }
    Ok(discs)
}

/// Every sample where the rear-axle point is closer than `r_circle` to an
/// obstacle point.
pub fn circle_collision_check(
    spline: &UniformBSpline,
    field: &ObstacleField,
    r_circle: f64,
    samples_per_span: usize,
) -> Vec<CircleHit> {
    let mut hits = Vec::new();
    if field.is_empty() {
        return hits;
    }
    for t in spline.uniform_times(samples_per_span.max(1)) {
        let pos = spline.evaluate(t, 0).expect("time inside domain");
        let Some(near) = field.nearest(&pos) else { break };
        if near.distance < r_circle {
            hits.push(CircleHit {
                t,
                pos,
                witness: near.point,
                distance: near.distance,
            });
        }
    }
    hits
}

/// Poses at every knot of the domain, `t_p ..= t_{M-p}`.
pub fn knot_poses(spline: &UniformBSpline) -> Vec<Pose2> {
    let p = spline.degree();
    let times: Vec<f64> = (p..=spline.last_knot() - p).map(|m| spline.knot(m)).collect();
    spline
        .kinematics(&times)
        .expect("knots inside domain")
        .into_iter()
        .map(|k| Pose2::new(k.pos, k.theta))
        .collect()
}

/// Signed curvature bound over span `m`: the larger-magnitude of the two
/// clamped curvatures it depends on.
pub fn span_curvature(spline: &UniformBSpline, m: usize) -> f64 {
    let q = spline.control_points();
    let p = spline.degree();
    let mut best = 0.0f64;
    for i in [m + 1 - p, m + 2 - p] {
        if i >= 1 && i + 1 < q.len() {
            let k = clamped_curvature(q, i, DEFAULT_L_MIN).k;
            if k.abs() > best.abs() {
                best = k;
            }
        }
    }
    best
}

/// All discs checked for knot `m`: discrete coverage at `t_m` and continuous
/// coverage of `[t_m, t_{m+1})` when that span exists.
pub fn knot_discs(
    spline: &UniformBSpline,
    poses: &[Pose2],
    g: &VehicleGeometry,
    zones: &[Zone],
    m: usize,
) -> Vec<Disc> {
    let p = spline.degree();
    let idx = m - p;
    let mut discs = dsv_centers(g, &poses[idx]);
    if idx + 1 < poses.len() && !zones.is_empty() {
        let k_span = span_curvature(spline, m);
        if k_span.abs() > STRAIGHT_EPS {
            for span in split_span(spline, g, m, k_span, &poses[idx], &poses[idx + 1]) {
                discs.extend(span_discs(g, &span, zones).expect("sub-span within vehicle length"));
            }
        }
    }
    discs
}

/// The span itself, or sub-spans short enough for continuous coverage.
fn split_span(
    spline: &UniformBSpline,
    g: &VehicleGeometry,
    m: usize,
    k_span: f64,
    a: &Pose2,
    b: &Pose2,
) -> Vec<SweptSpan> {
    let chord = (b.pos - a.pos).norm();
    if chord <= g.length() {
        return vec![SweptSpan {
            m,
            pose_a: *a,
            pose_b: *b,
            k_span,
        }];
    }
    let mut pieces = (chord / g.length()).ceil() as usize;
    loop {
        let t_a = spline.knot(m);
        let times: Vec<f64> = (0..=pieces)
            .map(|j| t_a + spline.dt() * j as f64 / pieces as f64)
            .collect();
        let ks = spline.kinematics(&times).expect("span inside domain");
        let mut poses: Vec<Pose2> = ks.iter().map(|k| Pose2::new(k.pos, k.theta)).collect();
        poses[0] = *a;
        *poses.last_mut().unwrap() = *b;
        if poses.windows(2).all(|w| (w[1].pos - w[0].pos).norm() <= g.length()) {
            return poses
                .windows(2)
                .map(|w| SweptSpan {
                    m,
                    pose_a: w[0],
                    pose_b: w[1],
                    k_span,
                })
                .collect();
        }
        pieces *= 2;
    }
}

fn disc_hits(field: &ObstacleField, d: &Disc) -> bool {
    field.nearest_distance(&d.center).0 <= d.radius
}

/// Knot-level swept-volume check and the flattening indices it implies.
pub fn sv_collision_check(
    spline: &UniformBSpline,
    field: &ObstacleField,
    g: &VehicleGeometry,
    zones: &[Zone],
) -> CollisionReport {
    let mut report = CollisionReport::default();
    if field.is_empty() {
        return report;
    }
    let poses = knot_poses(spline);
    let p = spline.degree();
    for m in p..=spline.last_knot() - p {
        if knot_discs(spline, &poses, g, zones, m)
            .iter()
            .any(|d| disc_hits(field, d))
        {
            report.omega_coll.insert(m);
        }
    }
    report.omega_fl = flattening_indices(&report.omega_coll, p, spline.n_c());
    report
}

/// `{m - p + 1, m - p + 2}` for every colliding knot, clipped to `[1, N_c - 1]`.
pub fn flattening_indices(omega_coll: &BTreeSet<usize>, p: usize, n_c: usize) -> BTreeSet<usize> {
    omega_coll
        .iter()
        .flat_map(|&m| [m as i64 - p as i64 + 1, m as i64 - p as i64 + 2])
        .filter(|&i| (1..n_c as i64).contains(&i))
        .map(|i| i as usize)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::RectObstacle;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn table_one() -> VehicleGeometry {
        VehicleGeometry::default()
    }

    /// Pose after travelling `s` along a constant-curvature arc.
    fn arc_pose(start: &Pose2, k: f64, s: f64) -> Pose2 {
        if k.abs() < 1e-12 {
            return Pose2::new(start.pos + heading_vec(start.theta) * s, start.theta);
        }
        let dth = k * s;
        let h = heading_vec(start.theta);
        let n = perp(&h);
        let local = Vec2::new(dth.sin() / k, (1.0 - dth.cos()) / k);
        Pose2::new(start.pos + h * local.x + n * local.y, start.theta + dth)
    }

    #[test]
    fn dsv_radius_examples() {
        assert!((dsv_radius(&table_one()) - 1.0512).abs() < 1e-4);
        let mut g = table_one();
        g.n_discs = 100_000;
        assert!((dsv_radius(&g) - 0.93).abs() < 1e-4);
        let sq = VehicleGeometry {
            l_f: 0.5,
            l_r: 0.5,
            l_w: 0.86,
            l_b: 1.86,
            n_discs: 1,
        };
        assert!((dsv_radius(&sq) - 0.93 * 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn dsv_centers_spacing() {
        let g = table_one();
        let d = dsv_centers(&g, &Pose2::new(Vec2::zeros(), 0.0));
        assert_eq!(d.len(), 5);
        assert!((d[0].center.x - (-1.015 + 0.49)).abs() < 1e-12);
        for w in d.windows(2) {
            assert!((w[1].center.x - w[0].center.x - 0.98).abs() < 1e-12);
            assert_eq!(w[0].center.y, 0.0);
        }
        let r = dsv_centers(&g, &Pose2::new(Vec2::zeros(), PI / 2.0));
        for (a, b) in d.iter().zip(&r) {
            assert!((b.center - Vec2::new(-a.center.y, a.center.x)).norm() < 1e-12);
        }
    }

    #[test]
    fn dsv_covers_corners_for_random_geometry() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let g = VehicleGeometry {
                l_f: rng.gen_range(0.2..2.0),
                l_r: rng.gen_range(0.2..2.0),
                l_w: rng.gen_range(1.0..4.0),
                l_b: rng.gen_range(1.0..2.5),
                n_discs: rng.gen_range(1..8),
            };
            let pose = Pose2::new(
                Vec2::new(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)),
                rng.gen_range(-PI..PI),
            );
            let discs = dsv_centers(&g, &pose);
            for c in g.corners(&pose) {
                let best = discs
                    .iter()
                    .map(|d| (d.center - c).norm())
                    .fold(f64::INFINITY, f64::min);
                assert!(best <= dsv_radius(&g) + 1e-9);
            }
        }
    }

    #[test]
    fn straight_span_has_no_continuous_discs() {
        let g = table_one();
        let a = Pose2::new(Vec2::zeros(), 0.0);
        let span = SweptSpan {
            m: 3,
            pose_a: a,
            pose_b: arc_pose(&a, 0.0, 1.4),
            k_span: 0.0,
        };
        assert!(csv_discs(&g, &span, Zone::Z1).unwrap().is_empty());
    }

    #[test]
    fn long_chord_is_invalid() {
        let g = table_one();
        let a = Pose2::new(Vec2::zeros(), 0.0);
        let span = SweptSpan {
            m: 7,
            pose_a: a,
            pose_b: arc_pose(&a, 0.1, 6.0),
            k_span: 0.1,
        };
        assert!(matches!(csv_discs(&g, &span, Zone::Z1), Err(Error::SpanInvalid(7))));
    }

    #[test]
    fn disc_count_follows_chord() {
        let r_o = dsv_radius(&table_one());
        assert_eq!(((1.8 / r_o) - 1e-12).ceil() as usize, 2);
    }

    #[test]
    fn outer_corner_selection_mirrors() {
        let g = table_one();
        let a = Pose2::new(Vec2::zeros(), 0.0);
        for k in [0.15, -0.15] {
            let span = SweptSpan {
                m: 3,
                pose_a: a,
                pose_b: arc_pose(&a, k, 1.5),
                k_span: k,
            };
            let discs = csv_discs(&g, &span, Zone::Z1).unwrap();
            // Z1 sits on the side away from the turn
            assert!(discs.iter().all(|d| d.center.y * k < 0.0));
            let z3 = csv_discs(&g, &span, Zone::Z3).unwrap();
            assert!(z3.iter().all(|d| d.center.y * k > 0.0));
        }
    }

    #[test]
    fn flattening_indices_examples() {
        let set: BTreeSet<usize> = [5].into_iter().collect();
        assert_eq!(flattening_indices(&set, 3, 20), [3, 4].into_iter().collect());
        let set: BTreeSet<usize> = [3, 21].into_iter().collect();
        assert_eq!(flattening_indices(&set, 3, 20), [1, 2, 19].into_iter().collect());
    }

    fn straight_spline(y: f64) -> UniformBSpline {
        let ctrl = (0..14).map(|i| Vec2::new(i as f64 - 3.0, y)).collect();
        UniformBSpline::new(3, ctrl, 0.25, 0.0).unwrap()
    }

    #[test]
    fn circle_check_clearance_and_crossing() {
        let field = ObstacleField::from_points(vec![Vec2::new(4.0, 10.0)], 0.1);
        assert!(circle_collision_check(&straight_spline(0.0), &field, 1.05, 4).is_empty());
        assert!(circle_collision_check(&straight_spline(0.0), &ObstacleField::empty(), 1.05, 4)
            .is_empty());

        // speed is 4 m/s from x = -2 at t = 0.75
        let field = ObstacleField::from_points(vec![Vec2::new(4.0, 0.0)], 0.1);
        let hits = circle_collision_check(&straight_spline(0.0), &field, 1.05, 4);
        let crossing = 0.75 + 1.5;
        assert!(hits.iter().any(|h| (h.t - crossing).abs() <= 0.25 / 4.0 + 1e-12));
    }

    #[test]
    fn free_field_reports_nothing() {
        let r = sv_collision_check(&straight_spline(0.0), &ObstacleField::empty(), &table_one(), DEFAULT_ZONES);
        assert!(r.omega_coll.is_empty() && r.omega_fl.is_empty());
    }

    #[test]
    fn swept_corner_detected_where_circle_check_is_blind() {
        // A left turn at curvature 0.18: the rear axle keeps 1.2 m or more from
        // the obstacle point placed on the swept path of the front-right corner.
        let g = table_one();
        let k = 0.18;
        let dt = 0.25;
        let speed = 4.0;
        let start = Pose2::new(Vec2::zeros(), 0.0);
        let samples: Vec<(f64, Vec2)> = (0..=160)
            .map(|j| {
                let t = j as f64 * 0.025;
                (t, arc_pose(&start, k, speed * t).pos)
            })
            .collect();
        let state = |t: f64| {
            let p = arc_pose(&start, k, speed * t);
            let h = heading_vec(p.theta);
            crate::bspline::BoundaryState {
                p: p.pos,
                v: h * speed,
                a: perp(&h) * (speed * speed * k),
                theta: p.theta,
            }
        };
        let fit = crate::bspline::fit_from_samples(&samples, dt, &state(0.0), &state(4.0)).unwrap();
        let spline = fit.spline;
        // front-right corner midway through the arc, nudged just inside its path
        let mid = arc_pose(&start, k, speed * 2.0);
        let corner = body_to_world(&mid.pos, mid.theta, &Vec2::new(g.l_w + g.l_f, -g.half_width()));
        let icr = Vec2::new(0.0, 1.0 / k);
        let obstacle = icr + (corner - icr) * 1.01;
        let field = ObstacleField::from_points(vec![obstacle], 0.1);
        let clearance = spline
            .uniform_times(50)
            .iter()
            .map(|t| (spline.evaluate(*t, 0).unwrap() - obstacle).norm())
            .fold(f64::INFINITY, f64::min);
        assert!(clearance > 1.2, "clearance {clearance}");
        assert!(circle_collision_check(&spline, &field, dsv_radius(&g), 4).is_empty());
        let report = sv_collision_check(&spline, &field, &g, DEFAULT_ZONES);
        assert!(!report.omega_coll.is_empty());
        assert!(!report.omega_fl.is_empty());
    }

    #[test]
    fn adding_obstacles_is_monotone() {
        let spline = straight_spline(0.0);
        let g = table_one();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut pts = Vec::new();
        let mut prev = BTreeSet::new();
        for _ in 0..20 {
            pts.push(Vec2::new(rng.gen_range(-2.0..12.0), rng.gen_range(-3.0..3.0)));
            let r = sv_collision_check(&spline, &ObstacleField::from_points(pts.clone(), 0.1), &g, ALL_ZONES);
            assert!(prev.is_subset(&r.omega_coll));
            prev = r.omega_coll;
        }
    }

    #[test]
    fn rigid_motion_equivariance() {
        let g = table_one();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let ctrl: Vec<Vec2> = (0..12)
            .map(|i| Vec2::new(i as f64 * 1.2, (i as f64 * 0.7).sin() * 1.5))
            .collect();
        let obstacles = vec![RectObstacle::new(Vec2::new(6.0, 2.6), Vec2::new(1.0, 0.6), 0.3).unwrap()];
        let base = crate::env::build_field(&obstacles, 0.1).unwrap();
        let spline = UniformBSpline::new(3, ctrl.clone(), 0.3, 0.0).unwrap();
        let r0 = sv_collision_check(&spline, &base, &g, ALL_ZONES);
        for _ in 0..5 {
            let th = rng.gen_range(-PI..PI);
            let shift = Vec2::new(rng.gen_range(-20.0..20.0), rng.gen_range(-20.0..20.0));
            let rot = nalgebra::Rotation2::new(th);
            let moved: Vec<Vec2> = ctrl.iter().map(|q| rot * q + shift).collect();
            let pts: Vec<Vec2> = base.points().iter().map(|q| rot * q + shift).collect();
            let s = UniformBSpline::new(3, moved, 0.3, 0.0).unwrap();
            let r = sv_collision_check(&s, &ObstacleField::from_points(pts, 0.1), &g, ALL_ZONES);
            assert_eq!(r.omega_coll, r0.omega_coll);
        }
    }

    #[test]
    fn turn_at_max_curvature_is_covered() {
        let g = table_one();
        let a = Pose2::new(Vec2::zeros(), 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for k in [0.2, -0.2] {
            let s = 1.5;
            let b = arc_pose(&a, k, s);
            let span = SweptSpan {
                m: 3,
                pose_a: a,
                pose_b: b,
                k_span: k,
            };
            let mut discs = dsv_centers(&g, &a);
            discs.extend(dsv_centers(&g, &b));
            for z in ALL_ZONES {
                discs.extend(csv_discs(&g, &span, *z).unwrap());
            }
            for _ in 0..10_000 {
                let pose = arc_pose(&a, k, rng.gen_range(0.0..s));
                let local = Vec2::new(
                    rng.gen_range(-g.l_r..g.l_w + g.l_f),
                    rng.gen_range(-g.half_width()..g.half_width()),
                );
                let p = body_to_world(&pose.pos, pose.theta, &local);
                assert!(discs.iter().any(|d| d.contains(&p)), "{k} {local:?} {p:?}");
            }
        }
    }

    #[test]
    fn near_straight_spans_are_covered_by_inflated_end_discs() {
        let g = table_one();
        let a = Pose2::new(Vec2::new(1.0, -2.0), 0.3);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let k = rng.gen_range(-0.002..0.002);
            let s = rng.gen_range(0.5..g.length());
            let b = arc_pose(&a, k, s);
            let span = SweptSpan {
                m: 3,
                pose_a: a,
                pose_b: b,
                k_span: k,
            };
            let delta = near_straight_inflation(&g, &span);
            assert!(delta <= NEAR_STRAIGHT_TOL, "{k} {s} {delta}");
            let discs = span_discs(&g, &span, &[Zone::Z1]).unwrap();
            assert!(discs.iter().all(|d| d.zone == Zone::O));
            for _ in 0..2000 {
                let pose = arc_pose(&a, k, rng.gen_range(0.0..s));
                let local = Vec2::new(
                    rng.gen_range(-g.l_r..g.l_w + g.l_f),
                    rng.gen_range(-g.half_width()..g.half_width()),
                );
                let p = body_to_world(&pose.pos, pose.theta, &local);
                assert!(discs.iter().any(|d| d.contains(&p)), "{k} {s} {local:?}");
            }
        }
    }

    #[test]
    fn inflation_grows_with_curvature_and_vanishes_when_straight() {
        let g = table_one();
        let a = Pose2::new(Vec2::zeros(), 0.0);
        let span = |k: f64| SweptSpan {
            m: 3,
            pose_a: a,
            pose_b: arc_pose(&a, k, 1.4),
            k_span: k,
        };
        assert_eq!(near_straight_inflation(&g, &span(0.0)), 0.0);
        let small = near_straight_inflation(&g, &span(1e-3));
        let large = near_straight_inflation(&g, &span(1e-2));
        assert!(small > 0.0 && large > 5.0 * small);
        assert!(near_straight_inflation(&g, &span(0.2)) > NEAR_STRAIGHT_TOL);
    }
}
