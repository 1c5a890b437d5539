//! Deterministic SVG rendering of a planned trajectory.

use std::fmt::Write as _;

use crate::bspline::UniformBSpline;
use crate::env::RectObstacle;
use crate::geom::Vec2;
use crate::sweep::{knot_discs, knot_poses, Pose2, VehicleGeometry, Zone};
use crate::Result;

/// Interval between drawn vehicle boxes (s).
pub const BOX_INTERVAL: f64 = 0.1;
const PATH_DT: f64 = 0.05;
const MARGIN: f64 = 4.0;
const SCALE: f64 = 10.0;

#[derive(Debug, Clone, Default)]
pub struct RenderOptions {
    /// Draw the discs checked at every knot.
    pub discs: bool,
    /// Continuous-coverage zones drawn with the discs.
    pub zones: Vec<Zone>,
}

pub struct RenderInput<'a> {
    pub obstacles: &'a [RectObstacle],
    pub reference: Option<&'a UniformBSpline>,
    pub trajectory: &'a UniformBSpline,
    pub vehicle: &'a VehicleGeometry,
}

fn polyline(points: &[Vec2]) -> String {
    let mut s = String::new();
    for (k, p) in points.iter().enumerate() {
        if k > 0 {
            s.push(' ');
        }
        let _ = write!(s, "{:.3},{:.3}", p.x, p.y);
    }
    s
}

fn path_points(spline: &UniformBSpline) -> Result<Vec<Vec2>> {
    let (a, b) = spline.domain();
    let n = ((b - a) / PATH_DT).ceil().max(1.0) as usize;
    (0..=n)
        .map(|k| spline.evaluate(a + (b - a) * k as f64 / n as f64, 0))
        .collect()
}

/// Vehicle poses every [`BOX_INTERVAL`] seconds over the domain.
pub fn box_poses(spline: &UniformBSpline) -> Result<Vec<Pose2>> {
    let (a, b) = spline.domain();
    let n = ((b - a) / BOX_INTERVAL + 1e-9).floor() as usize;
    let times: Vec<f64> = (0..=n).map(|k| a + k as f64 * BOX_INTERVAL).collect();
    Ok(spline
        .kinematics(&times)?
        .into_iter()
        .map(|k| Pose2::new(k.pos, k.theta))
        .collect())
}

/// Renders layered groups: obstacles, reference, trajectory, vehicles, discs.
/// World y points up; the output is byte-identical for identical input.
pub fn render_svg(input: &RenderInput, opts: &RenderOptions) -> Result<String> {
    let traj = path_points(input.trajectory)?;
    let reference = input.reference.map(path_points).transpose()?;
    let boxes = box_poses(input.trajectory)?;
    let box_corners: Vec<[Vec2; 4]> = boxes.iter().map(|p| input.vehicle.corners(p)).collect();

    let mut all: Vec<Vec2> = traj.clone();
    all.extend(reference.iter().flatten().copied());
    all.extend(box_corners.iter().flatten().copied());
    all.extend(input.obstacles.iter().flat_map(|o| o.corners()));
    let (mut lo, mut hi) = (Vec2::repeat(f64::INFINITY), Vec2::repeat(f64::NEG_INFINITY));
    for p in &all {
        lo = lo.inf(p);
        hi = hi.sup(p);
    }
    lo -= Vec2::repeat(MARGIN);
    hi += Vec2::repeat(MARGIN);
    let size = hi - lo;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{:.0}" height="{:.0}" viewBox="{:.3} {:.3} {:.3} {:.3}">"#,
        size.x * SCALE,
        size.y * SCALE,
        lo.x,
        -hi.y,
        size.x,
        size.y
    );
    s.push_str("<g transform=\"scale(1,-1)\">\n");

    s.push_str("<g id=\"obstacles\" fill=\"#555\" stroke=\"none\">\n");
    for o in input.obstacles {
        let _ = writeln!(s, r#"<polygon points="{}"/>"#, polyline(&o.corners()));
    }
    s.push_str("</g>\n");

    s.push_str("<g id=\"reference\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"0.08\" stroke-dasharray=\"0.4 0.3\">\n");
    if let Some(r) = &reference {
        let _ = writeln!(s, r#"<polyline points="{}"/>"#, polyline(r));
    }
    s.push_str("</g>\n");

    s.push_str("<g id=\"trajectory\" fill=\"none\" stroke=\"#d62728\" stroke-width=\"0.1\">\n");
    let _ = writeln!(s, r#"<polyline points="{}"/>"#, polyline(&traj));
    s.push_str("</g>\n");

    s.push_str("<g id=\"vehicles\" fill=\"none\" stroke=\"#2ca02c\" stroke-width=\"0.03\" stroke-opacity=\"0.5\">\n");
    for c in &box_corners {
        let _ = writeln!(s, r#"<polygon points="{}"/>"#, polyline(c));
    }
    s.push_str("</g>\n");

    s.push_str("<g id=\"discs\" fill=\"none\" stroke=\"#9467bd\" stroke-width=\"0.02\">\n");
    if opts.discs {
        let poses = knot_poses(input.trajectory);
        let p = input.trajectory.degree();
        for m in p..=input.trajectory.last_knot() - p {
            for d in knot_discs(input.trajectory, &poses, input.vehicle, &opts.zones, m) {
                let _ = writeln!(
                    s,
                    r#"<circle cx="{:.3}" cy="{:.3}" r="{:.3}"/>"#,
                    d.center.x, d.center.y, d.radius
                );
            }
        }
    }
    s.push_str("</g>\n</g>\n</svg>\n");
    Ok(s)
}
