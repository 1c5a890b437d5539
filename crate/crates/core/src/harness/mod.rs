//! Scenario runs, random benchmarks, metrics and SVG rendering.

pub mod bench;
pub mod metrics;
pub mod scenario;
pub mod svg;

use std::time::Instant;

use crate::bspline::UniformBSpline;
use crate::env::ObstacleField;
use crate::planner::{optimize_trajectory, PlanResult};
use crate::refgen::{lattice_search, trapezoidal_profile, Pose};
use crate::Result;

pub use bench::{generate_scenario, run_bench, BenchOutput, BenchSummary};
pub use metrics::{BenchRecord, Timings, TrajectoryFile};
pub use scenario::{ReferenceConfig, RunConfig, Scenario};

/// Profile samples per knot span used when fitting the reference spline.
pub const FIT_OVERSAMPLE: f64 = 4.0;

/// Collision-free reference for a scenario: its fixed path or a lattice
/// search, timed by a trapezoidal profile and fitted with a cubic spline.
#[derive(Debug, Clone)]
pub struct Reference {
    pub path: Vec<Pose>,
    pub spline: UniformBSpline,
}

pub fn build_reference(
    scenario: &Scenario,
    field: &ObstacleField,
    cfg: &RunConfig,
    path: Option<Vec<Pose>>,
) -> Result<Reference> {
    let path = match path.or_else(|| scenario.path.clone()) {
        Some(p) => p,
        None => lattice_search(
            &scenario.start.pose(),
            &scenario.goal.pose(),
            field,
            &cfg.plan.vehicle,
            &cfg.reference.lattice,
        )?,
    };
    let r = &cfg.reference;
    let dt_hint = cfg.plan.vehicle.l_w / (2.0 * r.v_ref);
    let profile = trapezoidal_profile(&path, r.v_ref, r.a_ref, dt_hint / FIT_OVERSAMPLE)?;
    let spline = profile.to_spline(dt_hint, &scenario.start.boundary(), &scenario.goal.boundary())?;
    Ok(Reference { path, spline })
}

/// Everything produced by one scenario run.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub reference: Option<Reference>,
    pub result: Option<PlanResult>,
    pub record: BenchRecord,
    pub timings: Timings,
}

/// Runs reference generation and the optimizer. A missing reference is a
/// failed record, not an error.
pub fn run_scenario(
    id: &str,
    scenario: &Scenario,
    cfg: &RunConfig,
    path: Option<Vec<Pose>>,
) -> Result<RunOutput> {
    let field = scenario.field(cfg.reference.resolution)?;
    let n_obs = scenario.obstacles.len();
    let started = Instant::now();
    let reference = match build_reference(scenario, &field, cfg, path) {
        Ok(r) => r,
        Err(e @ (crate::Error::NoPath { .. } | crate::Error::Fit(_))) => {
            let reason = if matches!(e, crate::Error::NoPath { .. }) {
                "no_reference"
            } else {
                "reference_fit"
            };
            return Ok(RunOutput {
                reference: None,
                result: None,
                record: BenchRecord::failed(id, n_obs, reason),
                timings: Timings::default(),
            });
        }
        Err(e) => return Err(e),
    };
    let t_reference = ms(started);
    let started = Instant::now();
    let result = optimize_trajectory(&reference.spline, &field, &cfg.plan)?;
    let t_total = ms(started);
    let timings = Timings {
        t_reference,
        t_rebound: result.rebound.wall_ms,
        t_refine: result.refinement.map_or(0.0, |s| s.wall_ms),
        t_total,
    };
    Ok(RunOutput {
        record: BenchRecord::from_result(id, n_obs, &result)?,
        reference: Some(reference),
        result: Some(result),
        timings,
    })
}

fn ms(since: Instant) -> f64 {
    since.elapsed().as_secs_f64() * 1e3
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_straight_scenario_succeeds() {
        let s = Scenario::parse(
            r#"{"start": {"x": 0, "y": 0, "theta": 0, "a": 1},
                "goal": {"x": 30, "y": 0, "theta": 0, "a": -1}}"#,
        )
        .unwrap();
        let out = run_scenario("straight", &s, &s.config().unwrap(), None).unwrap();
        assert!(out.record.success, "{:?}", out.record);
        assert!(out.record.max_abs_curvature < 1e-6);
        assert!(out.timings.t_total + 1.0 >= out.timings.t_rebound + out.timings.t_refine);
    }

    #[test]
    fn unreachable_goal_is_a_failed_record() {
        let s = Scenario::parse(
            r#"{"start": {"x": 0, "y": 0, "theta": 0, "a": 1},
                "goal": {"x": 30, "y": 0, "theta": 0, "a": -1},
                "obstacles": [{"cx": 30, "cy": 0, "hx": 3, "hy": 3}]}"#,
        )
        .unwrap();
        let out = run_scenario("blocked", &s, &s.config().unwrap(), None).unwrap();
        assert!(!out.record.success);
        assert_eq!(out.record.failure, "no_reference");
    }
}
