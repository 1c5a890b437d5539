//! Scenario files: boundary states, rectangles, an optional fixed reference
//! path and partial configuration overrides.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::bspline::BoundaryState;
use crate::env::{build_field, ObstacleField, RectObstacle, DEFAULT_RESOLUTION};
use crate::geom::Vec2;
use crate::planner::PlanConfig;
use crate::refgen::{LatticeConfig, Pose};
use crate::{Error, Result};

/// Planar state with scalar speed and acceleration along the heading.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StateSpec {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
    #[serde(default)]
    pub v: f64,
    #[serde(default)]
    pub a: f64,
}

impl StateSpec {
    pub fn pos(&self) -> Vec2 {
        Vec2::new(self.x, self.y)
    }

    pub fn pose(&self) -> Pose {
        Pose::new(self.x, self.y, self.theta)
    }

    pub fn boundary(&self) -> BoundaryState {
        BoundaryState::longitudinal(self.pos(), self.theta, self.v, self.a)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObstacleSpec {
    pub cx: f64,
    pub cy: f64,
    pub hx: f64,
    pub hy: f64,
    #[serde(default)]
    pub theta: f64,
}

impl ObstacleSpec {
    pub fn rect(&self) -> Result<RectObstacle> {
        RectObstacle::new(Vec2::new(self.cx, self.cy), Vec2::new(self.hx, self.hy), self.theta)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub start: StateSpec,
    pub goal: StateSpec,
    #[serde(default)]
    pub obstacles: Vec<ObstacleSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Fixed reference path; when absent the lattice search provides one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<Vec<Pose>>,
    #[serde(default, skip_serializing_if = "is_empty_object")]
    pub overrides: Value,
}

fn is_empty_object(v: &Value) -> bool {
    v.is_null() || v.as_object().is_some_and(|m| m.is_empty())
}

/// Reference generation settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ReferenceConfig {
    /// Cruise speed of the trapezoidal profile.
    pub v_ref: f64,
    /// Acceleration of the trapezoidal profile.
    pub a_ref: f64,
    pub lattice: LatticeConfig,
    /// Spacing of obstacle perimeter samples.
    pub resolution: f64,
}

impl Default for ReferenceConfig {
    fn default() -> Self {
        Self {
            v_ref: 4.0,
            a_ref: 1.0,
            lattice: LatticeConfig::default(),
            resolution: DEFAULT_RESOLUTION,
        }
    }
}

/// Everything a scenario run needs; overrides merge into its JSON form.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    #[serde(flatten)]
    pub plan: PlanConfig,
    pub reference: ReferenceConfig,
}

/// Recursively overlays `patch` onto `base`; objects merge key by key and
/// every other value replaces.
pub fn merge_json(base: &mut Value, patch: &Value) {
    match (base, patch) {
        (Value::Object(b), Value::Object(p)) => {
            for (k, v) in p {
                match b.get_mut(k) {
                    Some(slot) => merge_json(slot, v),
                    None => {
                        b.insert(k.clone(), v.clone());
                    }
                }
            }
        }
        (slot, p) => *slot = p.clone(),
    }
}

impl RunConfig {
    pub fn with_overrides(&self, overrides: &Value) -> Result<Self> {
        if is_empty_object(overrides) {
            return Ok(self.clone());
        }
        if !overrides.is_object() {
            return Err(Error::InvalidArgument("overrides must be an object".into()));
        }
        let mut base = serde_json::to_value(self).map_err(|e| Error::InvalidArgument(e.to_string()))?;
        merge_json(&mut base, overrides);
        let cfg: RunConfig =
            serde_json::from_value(base).map_err(|e| Error::InvalidArgument(format!("overrides: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.plan.validate()?;
        let r = &self.reference;
        if !(r.v_ref > 0.0 && r.a_ref > 0.0 && r.resolution > 0.0) {
            return Err(Error::InvalidArgument(
                "reference speed, acceleration and resolution must be positive".into(),
            ));
        }
        Ok(())
    }
}

fn finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{name} must be finite")))
    }
}

impl Scenario {
    /// Parses and validates; errors carry serde's line/column and field names.
    pub fn parse(text: &str) -> Result<Self> {
        let s: Scenario = serde_json::from_str(text).map_err(|e| Error::InvalidArgument(format!("scenario: {e}")))?;
        s.validate()?;
        Ok(s)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    pub fn validate(&self) -> Result<()> {
        for (name, st) in [("start", &self.start), ("goal", &self.goal)] {
            for (field, v) in [("x", st.x), ("y", st.y), ("theta", st.theta), ("v", st.v), ("a", st.a)] {
                finite(&format!("{name}.{field}"), v)?;
            }
            if st.v < 0.0 {
                return Err(Error::InvalidArgument(format!("{name}.v must be non-negative")));
            }
        }
        if (self.start.pos() - self.goal.pos()).norm() < 1e-6 {
            return Err(Error::InvalidArgument("start and goal coincide".into()));
        }
        for (k, o) in self.obstacles.iter().enumerate() {
            for (field, v) in [("cx", o.cx), ("cy", o.cy), ("theta", o.theta)] {
                finite(&format!("obstacles[{k}].{field}"), v)?;
            }
            if !(o.hx > 0.0 && o.hy > 0.0 && o.hx.is_finite() && o.hy.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "obstacles[{k}]: half extents must be positive"
                )));
            }
        }
        if let Some(path) = &self.path {
            if path.len() < 2 {
                return Err(Error::InvalidArgument("path needs at least two poses".into()));
            }
        }
        if !is_empty_object(&self.overrides) && !self.overrides.is_object() {
            return Err(Error::InvalidArgument("overrides must be an object".into()));
        }
        Ok(())
    }

    pub fn rects(&self) -> Result<Vec<RectObstacle>> {
        self.obstacles.iter().map(ObstacleSpec::rect).collect()
    }

    pub fn field(&self, resolution: f64) -> Result<ObstacleField> {
        build_field(&self.rects()?, resolution)
    }

    pub fn config(&self) -> Result<RunConfig> {
        RunConfig::default().with_overrides(&self.overrides)
    }
}
