//! Per-run records, dense trajectory samples and the trajectory file format.

use serde::{Deserialize, Serialize};

use crate::bspline::UniformBSpline;
use crate::geom::{cross, Vec2};
use crate::planner::PlanResult;
use crate::Result;

/// Spacing of the dense samples used for metrics and trajectory files (s).
pub const METRIC_DT: f64 = 0.05;
/// Below this speed the path curvature is not sampled (heading is ill-defined).
pub const CURVATURE_MIN_SPEED: f64 = 0.1;

/// Deterministic outcome of one planner run. Column order is the CSV order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub id: String,
    pub success: bool,
    /// Empty on success, otherwise the failing stage.
    pub failure: String,
    pub obstacles: usize,
    pub viol_v_s: usize,
    pub viol_a_s: usize,
    pub viol_a_d: usize,
    pub viol_kappa: usize,
    /// Largest sampled path curvature (1/m).
    pub max_abs_curvature: f64,
    /// Largest clamped curvature bound over the control polygon (1/m).
    pub max_curvature_bound: f64,
    pub mean_abs_accel: f64,
    pub mean_abs_jerk: f64,
    pub horizon: f64,
    pub exceeding_ratio: f64,
}

/// Wall-clock timings of one run (ms); kept apart from [`BenchRecord`] so that
/// the record file is reproducible byte for byte.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Timings {
    pub t_reference: f64,
    pub t_rebound: f64,
    pub t_refine: f64,
    pub t_total: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TimingRow {
    pub id: String,
    pub t_reference: f64,
    pub t_rebound: f64,
    pub t_refine: f64,
    pub t_total: f64,
}

impl TimingRow {
    pub fn new(id: &str, t: &Timings) -> Self {
        Self {
            id: id.to_string(),
            t_reference: t.t_reference,
            t_rebound: t.t_rebound,
            t_refine: t.t_refine,
            t_total: t.t_total,
        }
    }
}

/// One dense sample of a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySample {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub theta: f64,
    pub v_s: f64,
    pub a_s: f64,
    pub a_d: f64,
    pub kappa: f64,
    pub acc_x: f64,
    pub acc_y: f64,
}

/// Times `t_start, t_start + dt, ...` up to and including the domain end.
pub fn dense_times(spline: &UniformBSpline, dt: f64) -> Vec<f64> {
    let (a, b) = spline.domain();
    let n = ((b - a) / dt + 1e-9).floor() as usize;
    let mut ts: Vec<f64> = (0..=n).map(|k| a + k as f64 * dt).collect();
    if b - ts[n] > 1e-9 {
        ts.push(b);
    }
    ts
}

pub fn dense_samples(spline: &UniformBSpline, dt: f64) -> Result<Vec<TrajectorySample>> {
    let ks = spline.kinematics(&dense_times(spline, dt))?;
    Ok(ks
        .into_iter()
        .map(|k| {
            let kappa = if k.v_s >= CURVATURE_MIN_SPEED {
                cross(&k.vel, &k.acc) / k.v_s.powi(3)
            } else {
                0.0
            };
            TrajectorySample {
                t: k.t,
                x: k.pos.x,
                y: k.pos.y,
                theta: k.theta,
                v_s: k.v_s,
                a_s: k.a_s,
                a_d: k.a_d,
                kappa,
                acc_x: k.acc.x,
                acc_y: k.acc.y,
            }
        })
        .collect())
}

/// Quality metrics from dense samples: (max |kappa|, mean |a|, mean |jerk|).
/// Jerk is finite-differenced from consecutive accelerations.
pub fn quality_metrics(samples: &[TrajectorySample]) -> (f64, f64, f64) {
    let max_k = samples.iter().map(|s| s.kappa.abs()).fold(0.0, f64::max);
    let acc: Vec<Vec2> = samples.iter().map(|s| Vec2::new(s.acc_x, s.acc_y)).collect();
    let mean_a = if acc.is_empty() {
        0.0
    } else {
        acc.iter().map(|a| a.norm()).sum::<f64>() / acc.len() as f64
    };
    let jerks: Vec<f64> = samples
        .windows(2)
        .zip(acc.windows(2))
        .filter(|(s, _)| s[1].t > s[0].t)
        .map(|(s, a)| (a[1] - a[0]).norm() / (s[1].t - s[0].t))
        .collect();
    let mean_j = if jerks.is_empty() {
        0.0
    } else {
        jerks.iter().sum::<f64>() / jerks.len() as f64
    };
    (max_k, mean_a, mean_j)
}

impl BenchRecord {
    pub fn from_result(id: &str, obstacles: usize, result: &PlanResult) -> Result<Self> {
        let samples = dense_samples(&result.trajectory, METRIC_DT)?;
        let (max_k, mean_a, mean_j) = quality_metrics(&samples);
        Ok(Self {
            id: id.to_string(),
            success: result.success,
            failure: result.failure.map(|f| format!("{f:?}").to_lowercase()).unwrap_or_default(),
            obstacles,
            viol_v_s: result.violations.v_s,
            viol_a_s: result.violations.a_s,
            viol_a_d: result.violations.a_d,
            viol_kappa: result.violations.kappa,
            max_abs_curvature: round6(max_k),
            max_curvature_bound: round6(result.max_curvature),
            mean_abs_accel: round6(mean_a),
            mean_abs_jerk: round6(mean_j),
            horizon: round6(result.horizon),
            exceeding_ratio: round6(result.exceeding_ratio),
        })
    }

    /// Record for a run that never reached the optimizer.
    pub fn failed(id: &str, obstacles: usize, reason: &str) -> Self {
        Self {
            id: id.to_string(),
            success: false,
            failure: reason.to_string(),
            obstacles,
            viol_v_s: 0,
            viol_a_s: 0,
            viol_a_d: 0,
            viol_kappa: 0,
            max_abs_curvature: 0.0,
            max_curvature_bound: 0.0,
            mean_abs_accel: 0.0,
            mean_abs_jerk: 0.0,
            horizon: 0.0,
            exceeding_ratio: 0.0,
        }
    }
}

/// Rounds to 6 decimals so CSV text does not depend on float formatting of
/// trailing digits.
fn round6(x: f64) -> f64 {
    (x * 1e6).round() / 1e6
}

/// Serialized trajectory: the spline itself plus dense kinematic samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryFile {
    pub degree: usize,
    pub dt: f64,
    pub t0: f64,
    pub control_points: Vec<[f64; 2]>,
    pub samples: Vec<TrajectorySample>,
}

impl TrajectoryFile {
    pub fn from_spline(spline: &UniformBSpline) -> Result<Self> {
        Ok(Self {
            degree: spline.degree(),
            dt: spline.dt(),
            t0: spline.t0(),
            control_points: spline.control_points().iter().map(|q| [q.x, q.y]).collect(),
            samples: dense_samples(spline, METRIC_DT)?,
        })
    }

    pub fn spline(&self) -> Result<UniformBSpline> {
        UniformBSpline::new(
            self.degree,
            self.control_points.iter().map(|q| Vec2::new(q[0], q[1])).collect(),
            self.dt,
            self.t0,
        )
    }
}

pub fn write_csv<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)
            .map_err(|e| crate::Error::InvalidArgument(format!("csv: {e}")))?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| crate::Error::InvalidArgument(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
