//! Outer algorithms: rebound optimization with incremental path flattening,
//! time reallocation, refinement, and the pipeline that chains them.

use std::collections::BTreeSet;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::bspline::{clamped_curvatures, UniformBSpline, DEFAULT_L_MIN};
use crate::env::ObstacleField;
use crate::penalties::{
    gen_anchor_pairs, rebound_total, reference_tangents, refine_total, AnchorPair, FlatteningWeights,
    KinodynamicLimits, PenaltyWeights, ReboundContext, RefineContext,
};
use crate::quadrature::GaussLegendre;
use crate::solver::{minimize, SolveConfig};
use crate::sweep::{circle_collision_check, dsv_radius, sv_collision_check, VehicleGeometry, Zone};
use crate::{Error, Result};

/// Absolute tolerance on limit checks, absorbing round-off at exact limits.
const LIMIT_ABS_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PlanConfig {
    pub iter_max: usize,
    pub gamma_fl: f64,
    pub gamma_ft: f64,
    /// Safe clearance; `None` means twice the footprint disc radius.
    pub s_f: Option<f64>,
    /// Radius of the rear-axle circle check; `None` means the disc radius.
    pub r_circle: Option<f64>,
    pub samples_per_span: usize,
    pub gl_points: usize,
    pub weights: PenaltyWeights,
    pub limits: KinodynamicLimits,
    pub solve: SolveConfig,
    pub enabled_zones: Vec<Zone>,
    pub vehicle: VehicleGeometry,
}

impl Default for PlanConfig {
    fn default() -> Self {
        Self {
            iter_max: 10,
            gamma_fl: 10.0,
            gamma_ft: 2.0,
            s_f: None,
            r_circle: None,
            samples_per_span: 4,
            gl_points: 5,
            weights: PenaltyWeights::default(),
            limits: KinodynamicLimits::default(),
            solve: SolveConfig::default(),
            enabled_zones: vec![Zone::Z1],
            vehicle: VehicleGeometry::default(),
        }
    }
}

impl PlanConfig {
    pub fn validate(&self) -> Result<()> {
        if self.iter_max == 0 {
            return Err(Error::InvalidArgument("iter_max must be at least 1".into()));
        }
        if !(self.gamma_fl > 1.0 && self.gamma_ft > 1.0) {
            return Err(Error::InvalidArgument("weight ratios must exceed 1".into()));
        }
        if self.samples_per_span == 0 || self.gl_points < 2 {
            return Err(Error::InvalidArgument("sampling counts too small".into()));
        }
        if self.enabled_zones.contains(&Zone::O) {
            return Err(Error::InvalidArgument("zone O is always checked; list only z1..z3".into()));
        }
        if let Some(s) = self.s_f {
            if !(s > 0.0) {
                return Err(Error::InvalidArgument("safe clearance must be positive".into()));
            }
        }
        if let Some(r) = self.r_circle {
            if !(r > 0.0) {
                return Err(Error::InvalidArgument("circle radius must be positive".into()));
            }
        }
        self.weights.validate()?;
        self.limits.validate()?;
        self.solve.validate()?;
        self.vehicle.validate()
    }

    pub fn safe_clearance(&self) -> f64 {
        self.s_f.unwrap_or_else(|| 2.0 * dsv_radius(&self.vehicle))
    }

    pub fn circle_radius(&self) -> f64 {
        self.r_circle.unwrap_or_else(|| dsv_radius(&self.vehicle))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violations {
    pub v_s: usize,
    pub a_s: usize,
    pub a_d: usize,
    pub kappa: usize,
}

impl Violations {
    pub fn total(&self) -> usize {
        self.v_s + self.a_s + self.a_d + self.kappa
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct StageStats {
    pub outer_iters: usize,
    pub solver_iters: usize,
    pub wall_ms: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Failure {
    /// Collisions remained after the rebound stage.
    Rebound,
    /// Refinement could not reach a collision-free feasible trajectory.
    Refinement,
    /// The returned trajectory fails the final independent check.
    Verification,
}

#[derive(Debug, Clone)]
pub struct ReboundOutcome {
    pub spline: UniformBSpline,
    pub flattening: FlatteningWeights,
    pub omega_fl: BTreeSet<usize>,
    /// Pairs generated before the first solver segment.
    pub initial_pairs: Vec<AnchorPair>,
    pub success: bool,
    pub stats: StageStats,
}

#[derive(Debug, Clone)]
pub struct RefineOutcome {
    pub spline: UniformBSpline,
    pub success: bool,
    pub lam_ft: f64,
    /// Number of times the fitness weight was raised.
    pub raises: usize,
    pub stats: StageStats,
    /// Violations at the strict limits of the returned trajectory.
    pub remaining: Violations,
}

#[derive(Debug, Clone)]
pub struct PlanResult {
    pub trajectory: UniformBSpline,
    pub success: bool,
    pub failure: Option<Failure>,
    pub rebound: StageStats,
    pub refinement: Option<StageStats>,
    pub exceeding_ratio: f64,
    /// Violations at the benchmark slack.
    pub violations: Violations,
    pub horizon: f64,
    pub max_curvature: f64,
    pub reference_max_curvature: f64,
    pub rebound_max_curvature: f64,
    pub flattening: FlatteningWeights,
}

/// Knots of the domain plus the quadrature nodes of every span.
pub fn sample_times(spline: &UniformBSpline, rule: &GaussLegendre) -> Vec<f64> {
    let mut ts = Vec::with_capacity(spline.span_count() * (rule.len() + 1) + 1);
    for m in spline.spans() {
        let (a, b) = (spline.knot(m), spline.knot(m + 1));
        ts.push(a);
        ts.extend(rule.on_interval(a, b).map(|(t, _)| t));
    }
    ts.push(spline.domain().1);
    ts
}

/// The factor by which the knot span must grow so that speed and both
/// accelerations fall within their limits on the sample grid.
pub fn exceeding_ratio(spline: &UniformBSpline, limits: &KinodynamicLimits, rule: &GaussLegendre) -> f64 {
    let ks = spline
        .kinematics(&sample_times(spline, rule))
        .expect("samples inside domain");
    let ratio = |c: f64, hi: f64, lo: f64| {
        let m = if c >= 0.0 { hi } else { lo };
        if m == 0.0 {
            0.0
        } else {
            (c / m).max(0.0)
        }
    };
    ks.iter().fold(1.0f64, |r, k| {
        r.max(ratio(k.v_s, limits.v_s_max, limits.v_s_min))
            .max(ratio(k.a_s, limits.a_s_max, limits.a_s_min).sqrt())
            .max(ratio(k.a_d, limits.a_d_max, limits.a_d_min).sqrt())
    })
}

/// Same control points, knot span stretched by `r_e`.
pub fn reallocate_time(spline: &UniformBSpline, r_e: f64) -> Result<UniformBSpline> {
    if !(r_e >= 1.0) || !r_e.is_finite() {
        return Err(Error::InvalidArgument(format!("exceeding ratio must be >= 1, got {r_e}")));
    }
    spline.with_dt(r_e * spline.dt())
}

fn exceeds(c: f64, hi: f64, lo: f64, slack: f64) -> bool {
    c > hi + slack * hi.abs() + LIMIT_ABS_TOL || c < lo - slack * lo.abs() - LIMIT_ABS_TOL
}

/// Limit violations on the sample grid and at every clamped curvature.
pub fn is_feasible(
    spline: &UniformBSpline,
    limits: &KinodynamicLimits,
    rule: &GaussLegendre,
    slack: f64,
) -> (bool, Violations) {
    let ks = spline
        .kinematics(&sample_times(spline, rule))
        .expect("samples inside domain");
    let mut v = Violations::default();
    for k in &ks {
        v.v_s += exceeds(k.v_s, limits.v_s_max, limits.v_s_min, slack) as usize;
        v.a_s += exceeds(k.a_s, limits.a_s_max, limits.a_s_min, slack) as usize;
        v.a_d += exceeds(k.a_d, limits.a_d_max, limits.a_d_min, slack) as usize;
    }
    for r in clamped_curvatures(spline.control_points(), DEFAULT_L_MIN) {
        v.kappa += exceeds(r.k, limits.kappa_max, limits.kappa_min, slack) as usize;
    }
    (v.total() == 0, v)
}

/// Largest clamped curvature magnitude.
pub fn max_curvature(spline: &UniformBSpline) -> f64 {
    clamped_curvatures(spline.control_points(), DEFAULT_L_MIN)
        .iter()
        .fold(0.0, |m, r| m.max(r.k.abs()))
}

/// Whether either the circle check or the swept-volume check fires.
pub fn collides(spline: &UniformBSpline, field: &ObstacleField, cfg: &PlanConfig) -> bool {
    !circle_collision_check(spline, field, cfg.circle_radius(), cfg.samples_per_span).is_empty()
        || !sv_collision_check(spline, field, &cfg.vehicle, &cfg.enabled_zones)
            .omega_coll
            .is_empty()
}

fn solve_segment(
    spline: &UniformBSpline,
    cfg: &SolveConfig,
    cost: impl Fn(&UniformBSpline) -> crate::penalties::Cost,
) -> Result<(UniformBSpline, usize)> {
    let x0 = spline.free_vars();
    let mut work = spline.clone();
    let objective = |x: &[f64]| {
        work.set_free_vars(x);
        let c = cost(&work);
        (c.value, c.free_gradient(&work))
    };
    let r = minimize(objective, &x0, cfg)?;
    Ok((spline.with_free_vars(&r.x), r.iters))
}

/// First stage: push control points out of obstacles and flatten the path
/// wherever the swept volume still touches one.
pub fn rebound_optimize_with_ipf(
    reference: &UniformBSpline,
    field: &ObstacleField,
    cfg: &PlanConfig,
) -> Result<ReboundOutcome> {
    cfg.validate()?;
    let start = Instant::now();
    let s_f = cfg.safe_clearance();
    let r_circle = cfg.circle_radius();
    let n = reference.control_points().len();

    let mut spline = reference.clone();
    let mut pairs = gen_anchor_pairs(&spline, reference, field, s_f, r_circle);
    let initial_pairs = pairs.clone();
    let mut flattening = FlatteningWeights::ones(n);
    let mut omega_fl = BTreeSet::new();
    let mut stats = StageStats::default();
    let mut success = false;

    for iter in 0..=cfg.iter_max {
        stats.outer_iters = iter + 1;
        let hits = circle_collision_check(&spline, field, r_circle, cfg.samples_per_span);
        if !hits.is_empty() {
            pairs = gen_anchor_pairs(&spline, reference, field, s_f, r_circle);
        } else {
            let report = sv_collision_check(&spline, field, &cfg.vehicle, &cfg.enabled_zones);
            if report.omega_coll.is_empty() {
                success = true;
                break;
            }
            flattening.raise(&report.omega_fl, cfg.gamma_fl);
            omega_fl.extend(report.omega_fl);
        }
        let ctx = ReboundContext {
            weights: &cfg.weights,
            pairs: &pairs,
            omega_fl: &omega_fl,
            flattening: &flattening,
            s_f,
        };
        let (next, iters) = solve_segment(&spline, &cfg.solve, |s| rebound_total(s, &ctx))?;
        spline = next;
        stats.solver_iters += iters;
    }
    if !success {
        success = !collides(&spline, field, cfg);
    }
    stats.wall_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(ReboundOutcome {
        spline,
        flattening,
        omega_fl,
        initial_pairs,
        success,
        stats,
    })
}

/// Second stage: restore feasibility while the fitness term holds the
/// trajectory near its collision-free starting shape.
pub fn refinement_optimize(
    q_realloc: &UniformBSpline,
    reference: &UniformBSpline,
    field: &ObstacleField,
    cfg: &PlanConfig,
) -> Result<RefineOutcome> {
    cfg.validate()?;
    let start = Instant::now();
    let rule = GaussLegendre::new(cfg.gl_points)?;
    let tangents = reference_tangents(reference);
    let mut weights = cfg.weights;
    let mut spline = q_realloc.clone();
    let mut stats = StageStats::default();
    let mut raises = 0;
    let mut best: Option<(usize, UniformBSpline, Violations)> = None;
    let mut success = false;

    let judge = |s: &UniformBSpline, best: &mut Option<(usize, UniformBSpline, Violations)>| {
        if collides(s, field, cfg) {
            return None;
        }
        let (ok, v) = is_feasible(s, &cfg.limits, &rule, 0.0);
        if best.as_ref().is_none_or(|b| v.total() < b.0) {
            *best = Some((v.total(), s.clone(), v));
        }
        Some(ok)
    };

    for iter in 0..=cfg.iter_max {
        stats.outer_iters = iter + 1;
        match judge(&spline, &mut best) {
            None => {
                weights.lam_ft *= cfg.gamma_ft;
                raises += 1;
            }
            Some(true) => {
                success = true;
                break;
            }
            Some(false) => {}
        }
        let ctx = RefineContext {
            weights: &weights,
            reference,
            tangents: &tangents,
            limits: &cfg.limits,
            rule: &rule,
        };
        let (next, iters) = solve_segment(&spline, &cfg.solve, |s| refine_total(s, &ctx))?;
        spline = next;
        stats.solver_iters += iters;
    }
    if !success && judge(&spline, &mut best) == Some(true) {
        success = true;
    }
    if !success {
        if let Some((_, b, _)) = best.take() {
            spline = b;
        }
    }
    let remaining = is_feasible(&spline, &cfg.limits, &rule, 0.0).1;
    stats.wall_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(RefineOutcome {
        spline,
        success,
        lam_ft: weights.lam_ft,
        raises,
        stats,
        remaining,
    })
}

/// Score at the benchmark slack.
pub const SCORING_SLACK: f64 = 0.05;

/// Rebound, then (when needed) reallocation and refinement.
pub fn optimize_trajectory(
    reference: &UniformBSpline,
    field: &ObstacleField,
    cfg: &PlanConfig,
) -> Result<PlanResult> {
    cfg.validate()?;
    let rule = GaussLegendre::new(cfg.gl_points)?;
    let reference_max_curvature = max_curvature(reference);
    let rebound = rebound_optimize_with_ipf(reference, field, cfg)?;
    let rebound_max_curvature = max_curvature(&rebound.spline);

    let mut trajectory = rebound.spline.clone();
    let mut refinement = None;
    let mut r_e = 1.0;
    let mut failure = None;
    if !rebound.success {
        failure = Some(Failure::Rebound);
    } else if !is_feasible(&trajectory, &cfg.limits, &rule, 0.0).0 {
        r_e = exceeding_ratio(&trajectory, &cfg.limits, &rule);
        let q_realloc = reallocate_time(&trajectory, r_e)?;
        let refined = refinement_optimize(&q_realloc, &q_realloc, field, cfg)?;
        if !refined.success {
            failure = Some(Failure::Refinement);
        }
        refinement = Some(refined.stats);
        trajectory = refined.spline;
    }

    let (feasible, violations) = is_feasible(&trajectory, &cfg.limits, &rule, SCORING_SLACK);
    let clear = !collides(&trajectory, field, cfg);
    let success = rebound.success && clear && feasible;
    if !success && failure.is_none() {
        failure = Some(Failure::Verification);
    }
    if success {
        failure = None;
    }
    Ok(PlanResult {
        horizon: trajectory.horizon(),
        max_curvature: max_curvature(&trajectory),
        trajectory,
        success,
        failure,
        rebound: rebound.stats,
        refinement,
        exceeding_ratio: r_e,
        violations,
        reference_max_curvature,
        rebound_max_curvature,
        flattening: rebound.flattening,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bspline::{boundary_control_points, fit_from_samples, BoundaryState};
    use crate::env::{build_field, RectObstacle};
    use crate::geom::Vec2;
    use crate::penalties::AnchorKind;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rule() -> GaussLegendre {
        GaussLegendre::new(5).unwrap()
    }

    /// Straight line along x at constant speed, boundary triples consistent.
    fn cruise(speed: f64, length: f64, dt: f64) -> UniformBSpline {
        let start = BoundaryState::longitudinal(Vec2::zeros(), 0.0, speed, 0.0);
        let goal = BoundaryState::longitudinal(Vec2::new(length, 0.0), 0.0, speed, 0.0);
        let total = length / speed;
        let samples: Vec<(f64, Vec2)> = (0..=200)
            .map(|k| {
                let t = total * k as f64 / 200.0;
                (t, Vec2::new(speed * t, 0.0))
            })
            .collect();
        fit_from_samples(&samples, dt, &start, &goal).unwrap().spline
    }

    #[test]
    fn free_field_straight_reference() {
        let reference = cruise(4.0, 40.0, 0.25);
        let cfg = PlanConfig::default();
        let out = rebound_optimize_with_ipf(&reference, &ObstacleField::empty(), &cfg).unwrap();
        assert!(out.success);
        assert_eq!(out.stats.outer_iters, 1);
        assert!(out.omega_fl.is_empty());
        assert!(out.flattening.as_slice().iter().all(|w| *w == 1.0));

        let plan = optimize_trajectory(&reference, &ObstacleField::empty(), &cfg).unwrap();
        assert!(plan.success);
        assert!(plan.refinement.is_none());
        assert!((plan.horizon - reference.horizon()).abs() < 1e-12);
    }

    #[test]
    fn exceeding_ratio_example() {
        // one sample at each peak reproduces the worked arithmetic
        let limits = KinodynamicLimits::default();
        let r = [6.0 / 5.55, (4.5f64 / 4.0).sqrt(), (2.5f64 / 2.0).sqrt()]
            .into_iter()
            .fold(1.0, f64::max);
        assert!((r - 1.1180).abs() < 1e-4);
        let s = cruise(6.0, 30.0, 0.25);
        let re = exceeding_ratio(&s, &limits, &rule());
        assert!((re - 6.0 / 5.55).abs() < 1e-9);
        assert_eq!(exceeding_ratio(&cruise(3.0, 30.0, 0.25), &limits, &rule()), 1.0);
    }

    #[test]
    fn reallocation_scales_derivatives() {
        let s = cruise(6.0, 30.0, 0.25);
        assert_eq!(reallocate_time(&s, 1.0).unwrap(), s);
        let s2 = reallocate_time(&s, 2.0).unwrap();
        assert_eq!(s2.control_points(), s.control_points());
        let ts = sample_times(&s, &rule());
        let ts2 = sample_times(&s2, &rule());
        let a = s.kinematics(&ts).unwrap();
        let b = s2.kinematics(&ts2).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((y.v_s - x.v_s / 2.0).abs() < 1e-12);
        }
        assert!(reallocate_time(&s, 0.5).is_err());
    }

    #[test]
    fn reallocation_brings_ratio_to_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let limits = KinodynamicLimits::default();
        for _ in 0..20 {
            let mut p = Vec2::zeros();
            let ctrl: Vec<Vec2> = (0..14)
                .map(|_| {
                    p += Vec2::new(rng.gen_range(1.0..3.0), rng.gen_range(-1.0..1.0));
                    p
                })
                .collect();
            let s = UniformBSpline::new(3, ctrl, 0.25, 0.0).unwrap();
            let re = exceeding_ratio(&s, &limits, &rule());
            assert!(re > 1.0);
            let s2 = reallocate_time(&s, re).unwrap();
            assert!((exceeding_ratio(&s2, &limits, &rule()) - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn feasibility_examples() {
        let limits = KinodynamicLimits::default();
        let rest = UniformBSpline::new(3, vec![Vec2::new(1.0, 2.0); 8], 0.3, 0.0).unwrap();
        assert_eq!(is_feasible(&rest, &limits, &rule(), 0.0), (true, Violations::default()));

        let fast = cruise(1.04 * limits.v_s_max, 40.0, 0.25);
        assert!(!is_feasible(&fast, &limits, &rule(), 0.0).0);
        assert!(is_feasible(&fast, &limits, &rule(), 0.05).0);

        let ctrl = vec![
            Vec2::new(-2.0, 0.0),
            Vec2::new(-1.0, 0.0),
            Vec2::new(0.0, 0.0),
            Vec2::new(1.0, 0.0),
            Vec2::new(1.0, 1.0),
            Vec2::new(1.0, 2.0),
            Vec2::new(1.0, 3.0),
        ];
        let corner = UniformBSpline::new(3, ctrl, 1.0, 0.0).unwrap();
        assert!(is_feasible(&corner, &limits, &rule(), 0.05).1.kappa >= 1);
    }

    #[test]
    fn obstacle_on_path_yields_collision_pairs() {
        let reference = cruise(4.0, 40.0, 0.25);
        let obstacles = [RectObstacle::new(Vec2::new(20.0, 0.5), Vec2::new(1.0, 1.0), 0.0).unwrap()];
        let field = build_field(&obstacles, 0.1).unwrap();
        let out = rebound_optimize_with_ipf(&reference, &field, &PlanConfig::default()).unwrap();
        assert!(out.initial_pairs.iter().any(|p| p.kind == AnchorKind::Collision));
    }

    #[test]
    fn rebound_clears_offset_obstacle() {
        let reference = cruise(4.0, 40.0, 0.25);
        let obstacles = [RectObstacle::new(Vec2::new(20.0, 1.8), Vec2::new(1.5, 1.0), 0.0).unwrap()];
        let field = build_field(&obstacles, 0.1).unwrap();
        let cfg = PlanConfig::default();
        let out = rebound_optimize_with_ipf(&reference, &field, &cfg).unwrap();
        assert!(out.success);
        assert!(!collides(&out.spline, &field, &cfg));
        // fixed boundary points untouched
        let (q, r) = (out.spline.control_points(), reference.control_points());
        let n = q.len();
        assert_eq!(&q[..3], &r[..3]);
        assert_eq!(&q[n - 3..], &r[n - 3..]);
        let plan = optimize_trajectory(&reference, &field, &cfg).unwrap();
        assert!(plan.success, "{:?}", plan.failure);
    }

    #[test]
    fn refinement_immediate_exit_when_feasible() {
        let s = cruise(3.0, 30.0, 0.25);
        let out = refinement_optimize(&s, &s, &ObstacleField::empty(), &PlanConfig::default()).unwrap();
        assert!(out.success);
        assert_eq!(out.stats.solver_iters, 0);
    }

    #[test]
    fn deterministic_plan() {
        let reference = cruise(4.0, 40.0, 0.25);
        let obstacles = [RectObstacle::new(Vec2::new(20.0, 1.8), Vec2::new(1.5, 1.0), 0.3).unwrap()];
        let field = build_field(&obstacles, 0.1).unwrap();
        let cfg = PlanConfig::default();
        let a = optimize_trajectory(&reference, &field, &cfg).unwrap();
        let b = optimize_trajectory(&reference, &field, &cfg).unwrap();
        assert_eq!(a.trajectory, b.trajectory);
        assert_eq!(a.violations, b.violations);
    }

    #[test]
    fn boundary_triple_survives_pipeline() {
        let reference = cruise(5.5, 40.0, 0.25);
        let start = BoundaryState::longitudinal(Vec2::zeros(), 0.0, 5.5, 0.0);
        let head = boundary_control_points(&start, reference.dt(), 3).unwrap();
        let plan = optimize_trajectory(&reference, &ObstacleField::empty(), &PlanConfig::default()).unwrap();
        for (a, b) in plan.trajectory.control_points()[..3].iter().zip(&head) {
            assert!((a - b).norm() < 1e-9);
        }
    }

    #[test]
    fn config_round_trip_and_overrides() {
        let cfg = PlanConfig::default();
        let json = serde_json::to_string(&cfg).unwrap();
        let back: PlanConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(back, cfg);
        let partial: PlanConfig = serde_json::from_str(r#"{"iter_max": 4}"#).unwrap();
        assert_eq!(partial.iter_max, 4);
        assert_eq!(partial.gamma_fl, 10.0);
        let bad = PlanConfig {
            gamma_fl: 1.0,
            ..PlanConfig::default()
        };
        assert!(bad.validate().is_err());
    }
}
