//! Seeded random-obstacle benchmark.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::metrics::{write_csv, BenchRecord, TimingRow, Timings};
use super::scenario::{ObstacleSpec, RunConfig, Scenario, StateSpec};
use super::run_scenario;
use crate::refgen::{lattice_search, Pose};
use crate::{par, Error, Result};

pub const START_GOAL_DISTANCE: f64 = 70.0;
pub const MAX_OBSTACLES: usize = 10;
/// Rectangle side lengths are uniform in this range (m).
pub const SIDE_RANGE: (f64, f64) = (1.0, 8.0);
/// Obstacle centres are uniform in this box (m).
pub const CENTER_X: (f64, f64) = (8.0, 62.0);
pub const CENTER_Y: (f64, f64) = (-12.0, 12.0);
/// Redraws allowed before a scenario index is given up on.
pub const MAX_ATTEMPTS: u64 = 1000;

fn rng_for(seed: u64, index: u64, attempt: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&index.to_le_bytes());
    key[16..24].copy_from_slice(&attempt.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

fn draw(seed: u64, index: u64, attempt: u64, a_ref: f64) -> Scenario {
    let mut rng = rng_for(seed, index, attempt);
    let n = rng.gen_range(0..=MAX_OBSTACLES);
    let obstacles = (0..n)
        .map(|_| ObstacleSpec {
            cx: rng.gen_range(CENTER_X.0..=CENTER_X.1),
            cy: rng.gen_range(CENTER_Y.0..=CENTER_Y.1),
            hx: 0.5 * rng.gen_range(SIDE_RANGE.0..=SIDE_RANGE.1),
            hy: 0.5 * rng.gen_range(SIDE_RANGE.0..=SIDE_RANGE.1),
            theta: rng.gen_range(0.0..std::f64::consts::PI),
        })
        .collect();
    Scenario {
        start: StateSpec {
            x: 0.0,
            y: 0.0,
            theta: 0.0,
            v: 0.0,
            a: a_ref,
        },
        goal: StateSpec {
            x: START_GOAL_DISTANCE,
            y: 0.0,
            theta: 0.0,
            v: 0.0,
            a: -a_ref,
        },
        obstacles,
        seed: Some(seed),
        path: None,
        overrides: Value::Null,
    }
}

/// Scenario `index` of the benchmark with `seed`, together with its lattice
/// path. Draws without a path are discarded and redrawn from a fresh stream.
pub fn generate_scenario(seed: u64, index: u64, cfg: &RunConfig) -> Result<(Scenario, Vec<Pose>)> {
    for attempt in 0..MAX_ATTEMPTS {
        let s = draw(seed, index, attempt, cfg.reference.a_ref);
        let field = s.field(cfg.reference.resolution)?;
        match lattice_search(
            &s.start.pose(),
            &s.goal.pose(),
            &field,
            &cfg.plan.vehicle,
            &cfg.reference.lattice,
        ) {
            Ok(path) => return Ok((s, path)),
            Err(Error::NoPath { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::NoPath { expansions: 0 })
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Stat {
    pub min: f64,
    pub avg: f64,
    pub max: f64,
}

impl Stat {
    fn of(xs: impl Iterator<Item = f64>) -> Self {
        let v: Vec<f64> = xs.collect();
        if v.is_empty() {
            return Self::default();
        }
        Self {
            min: v.iter().copied().fold(f64::INFINITY, f64::min),
            avg: v.iter().sum::<f64>() / v.len() as f64,
            max: v.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchSummary {
    pub count: usize,
    pub seed: u64,
    pub successes: usize,
    pub success_rate: f64,
    /// Violation totals over runs whose rebound stage succeeded.
    pub viol_v_s: usize,
    pub viol_a_s: usize,
    pub viol_a_d: usize,
    pub viol_kappa: usize,
    /// Runs with at least one curvature violation.
    pub curvature_violating_runs: usize,
    /// Quality means over successful runs.
    pub mean_max_abs_curvature: f64,
    pub mean_abs_accel: f64,
    pub mean_abs_jerk: f64,
    pub mean_horizon: f64,
    pub failures: std::collections::BTreeMap<String, usize>,
    pub t_rebound_ms: Stat,
    pub t_refine_ms: Stat,
    pub t_total_ms: Stat,
}

impl BenchSummary {
    pub fn from_runs(seed: u64, records: &[BenchRecord], timings: &[Timings]) -> Self {
        let ok: Vec<&BenchRecord> = records.iter().filter(|r| r.success).collect();
        let scored: Vec<&BenchRecord> = records.iter().filter(|r| r.failure != "rebound" && r.failure != "no_reference" && r.failure != "reference_fit").collect();
        let mean = |f: fn(&BenchRecord) -> f64| {
            if ok.is_empty() {
                0.0
            } else {
                ok.iter().map(|r| f(r)).sum::<f64>() / ok.len() as f64
            }
        };
        let mut failures = std::collections::BTreeMap::new();
        for r in records.iter().filter(|r| !r.success) {
            *failures.entry(r.failure.clone()).or_insert(0) += 1;
        }
        Self {
            count: records.len(),
            seed,
            successes: ok.len(),
            success_rate: ok.len() as f64 / records.len().max(1) as f64,
            viol_v_s: scored.iter().map(|r| r.viol_v_s).sum(),
            viol_a_s: scored.iter().map(|r| r.viol_a_s).sum(),
            viol_a_d: scored.iter().map(|r| r.viol_a_d).sum(),
            viol_kappa: scored.iter().map(|r| r.viol_kappa).sum(),
            curvature_violating_runs: scored.iter().filter(|r| r.viol_kappa > 0).count(),
            mean_max_abs_curvature: mean(|r| r.max_abs_curvature),
            mean_abs_accel: mean(|r| r.mean_abs_accel),
            mean_abs_jerk: mean(|r| r.mean_abs_jerk),
            mean_horizon: mean(|r| r.horizon),
            failures,
            t_rebound_ms: Stat::of(timings.iter().map(|t| t.t_rebound)),
            t_refine_ms: Stat::of(timings.iter().map(|t| t.t_refine)),
            t_total_ms: Stat::of(timings.iter().map(|t| t.t_total)),
        }
    }
}

#[derive(Debug, Clone)]
pub struct BenchOutput {
    pub records: Vec<BenchRecord>,
    pub timings: Vec<Timings>,
    pub summary: BenchSummary,
}

impl BenchOutput {
    /// Reproducible per-run records.
    pub fn records_csv(&self) -> Result<String> {
        write_csv(&self.records)
    }

    pub fn timings_csv(&self) -> Result<String> {
        let rows: Vec<TimingRow> = self
            .records
            .iter()
            .zip(&self.timings)
            .map(|(r, t)| TimingRow::new(&r.id, t))
            .collect();
        write_csv(&rows)
    }

    pub fn summary_json(&self) -> String {
        serde_json::to_string_pretty(&self.summary).expect("summary serializes")
    }
}

/// Generates and plans `count` scenarios, in parallel when available. Each
/// worker owns one scenario; results are collected in index order.
pub fn run_bench(count: usize, seed: u64, cfg: &RunConfig, jobs: Option<usize>) -> Result<BenchOutput> {
    if count == 0 {
        return Err(Error::InvalidArgument("count must be at least 1".into()));
    }
    cfg.validate()?;
    let indices: Vec<u64> = (0..count as u64).collect();
    let runs = par::with_jobs(jobs, || {
        par::map(&indices, |&i| -> Result<(BenchRecord, Timings)> {
            let (scenario, path) = generate_scenario(seed, i, cfg)?;
            let out = run_scenario(&format!("{seed}-{i:04}"), &scenario, cfg, Some(path))?;
            Ok((out.record, out.timings))
        })
    });
    let mut records = Vec::with_capacity(count);
    let mut timings = Vec::with_capacity(count);
    for r in runs {
        let (rec, t) = r?;
        records.push(rec);
        timings.push(t);
    }
    let summary = BenchSummary::from_runs(seed, &records, &timings);
    Ok(BenchOutput {
        records,
        timings,
        summary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn draws_are_reproducible_and_in_range() {
        for i in 0..20 {
            let a = draw(3, i, 0, 1.0);
            assert_eq!(a, draw(3, i, 0, 1.0));
            assert!(a.obstacles.len() <= MAX_OBSTACLES);
            for o in &a.obstacles {
                assert!((0.5..=4.0).contains(&o.hx) && (0.5..=4.0).contains(&o.hy));
                assert!((CENTER_X.0..=CENTER_X.1).contains(&o.cx));
            }
        }
        assert_ne!(draw(3, 0, 0, 1.0), draw(3, 0, 1, 1.0));
    }

    #[test]
    fn kept_scenarios_are_unmodified_draws() {
        let cfg = RunConfig::default();
        for i in 0..3 {
            let (s, path) = generate_scenario(11, i, &cfg).unwrap();
            assert!((0..MAX_ATTEMPTS).any(|k| draw(11, i, k, cfg.reference.a_ref) == s));
            assert!(path.len() > 2);
        }
    }

    #[test]
    fn summary_counts() {
        let mut a = BenchRecord::failed("a", 0, "rebound");
        a.viol_kappa = 4;
        let mut b = BenchRecord::failed("b", 0, "");
        b.success = true;
        b.max_abs_curvature = 0.1;
        let mut c = BenchRecord::failed("c", 0, "verification");
        c.viol_kappa = 2;
        let s = BenchSummary::from_runs(1, &[a, b, c], &[Timings::default(); 3]);
        assert_eq!(s.successes, 1);
        assert_eq!(s.viol_kappa, 2);
        assert_eq!(s.curvature_violating_runs, 1);
        assert!((s.mean_max_abs_curvature - 0.1).abs() < 1e-12);
        assert_eq!(s.failures["rebound"], 1);
    }
}
