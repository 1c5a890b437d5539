//! Obstacle world: rectangles rasterized into boundary points, queried through an
//! exact 2-d tree.

mod kdtree;

use serde::{Deserialize, Serialize};

use crate::geom::{body_to_world, Vec2};
use crate::{Error, Result};

pub use kdtree::KdTree;

/// Default spacing between perimeter samples (m).
pub const DEFAULT_RESOLUTION: f64 = 0.1;

/// Oriented rectangle obstacle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RectObstacle {
    pub center: Vec2,
    pub half_extents: Vec2,
    pub heading: f64,
}

impl RectObstacle {
    pub fn new(center: Vec2, half_extents: Vec2, heading: f64) -> Result<Self> {
        if !(half_extents.x > 0.0 && half_extents.y > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "rectangle half extents must be positive, got ({}, {})",
                half_extents.x, half_extents.y
            )));
        }
        Ok(Self {
            center,
            half_extents,
            heading,
        })
    }

    /// Corners in counter-clockwise order starting at the (-x, -y) local corner.
    pub fn corners(&self) -> [Vec2; 4] {
        let (hx, hy) = (self.half_extents.x, self.half_extents.y);
        [
            Vec2::new(-hx, -hy),
            Vec2::new(hx, -hy),
            Vec2::new(hx, hy),
            Vec2::new(-hx, hy),
        ]
        .map(|c| body_to_world(&self.center, self.heading, &c))
    }

    pub fn perimeter(&self) -> f64 {
        4.0 * (self.half_extents.x + self.half_extents.y)
    }

    pub fn contains(&self, p: &Vec2) -> bool {
        let d = p - self.center;
        let (s, c) = self.heading.sin_cos();
        let lx = c * d.x + s * d.y;
        let ly = -s * d.x + c * d.y;
        lx.abs() <= self.half_extents.x && ly.abs() <= self.half_extents.y
    }

    /// Perimeter samples: every edge is split into `ceil(len / resolution)`
    /// equal pieces and each piece contributes its starting point.
    pub fn sample_perimeter(&self, resolution: f64) -> Vec<Vec2> {
        let corners = self.corners();
        let mut out = Vec::new();
        for k in 0..4 {
            let a = corners[k];
            let b = corners[(k + 1) % 4];
            let len = (b - a).norm();
            let n = ((len / resolution) - 1e-9).ceil().max(1.0) as usize;
            for j in 0..n {
                out.push(a + (b - a) * (j as f64 / n as f64));
            }
        }
        out
    }
}

/// Result of a nearest-point query.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Nearest {
    pub index: usize,
    pub distance: f64,
    pub point: Vec2,
}

/// Immutable obstacle point set with a nearest-neighbour index.
#[derive(Debug, Clone)]
pub struct ObstacleField {
    points: Vec<Vec2>,
    tree: KdTree,
    resolution: f64,
}

/// Rasterizes rectangle boundaries at `resolution` and indexes the samples.
pub fn build_field(obstacles: &[RectObstacle], resolution: f64) -> Result<ObstacleField> {
    if !(resolution > 0.0) || !resolution.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "resolution must be positive, got {resolution}"
        )));
    }
    let points: Vec<Vec2> = obstacles
        .iter()
        .flat_map(|o| o.sample_perimeter(resolution))
        .collect();
    Ok(ObstacleField::from_points(points, resolution))
}

impl ObstacleField {
    pub fn from_points(points: Vec<Vec2>, resolution: f64) -> Self {
        let tree = KdTree::build(&points);
        Self {
            points,
            tree,
            resolution,
        }
    }

    pub fn empty() -> Self {
        Self::from_points(Vec::new(), DEFAULT_RESOLUTION)
    }

    pub fn points(&self) -> &[Vec2] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    /// Distance to the closest stored point and that point. An empty field
    /// answers `+inf` with a NaN witness.
    pub fn nearest_distance(&self, p: &Vec2) -> (f64, Vec2) {
        match self.nearest(p) {
            Some(n) => (n.distance, n.point),
            None => (f64::INFINITY, Vec2::new(f64::NAN, f64::NAN)),
        }
    }

    pub fn nearest(&self, p: &Vec2) -> Option<Nearest> {
        self.tree
            .nearest_where(&self.points, p, |_| true)
            .map(|(index, d2)| Nearest {
                index,
                distance: d2.sqrt(),
                point: self.points[index],
            })
    }

    /// Nearest stored point among those accepted by `keep`.
    pub fn nearest_where(&self, p: &Vec2, keep: impl Fn(&Vec2) -> bool) -> Option<Nearest> {
        self.tree
            .nearest_where(&self.points, p, keep)
            .map(|(index, d2)| Nearest {
                index,
                distance: d2.sqrt(),
                point: self.points[index],
            })
    }

    /// Distances for many queries, fanned out through [`crate::par::map`].
    pub fn nearest_batch(&self, queries: &[Vec2]) -> Vec<f64> {
        crate::par::map(queries, |q| self.nearest_distance(q).0)
    }
}
