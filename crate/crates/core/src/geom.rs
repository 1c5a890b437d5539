//! Small planar helpers on top of `nalgebra::Vector2`.

use nalgebra::Vector2;

pub type Vec2 = Vector2<f64>;

#[inline]
pub fn cross(a: &Vec2, b: &Vec2) -> f64 {
    a.x * b.y - a.y * b.x
}

/// Counter-clockwise quarter turn.
#[inline]
pub fn perp(v: &Vec2) -> Vec2 {
    Vec2::new(-v.y, v.x)
}

#[inline]
pub fn heading_vec(theta: f64) -> Vec2 {
    Vec2::new(theta.cos(), theta.sin())
}

/// Maps a point given in a body frame (x forward, y left) into the world.
#[inline]
pub fn body_to_world(origin: &Vec2, theta: f64, local: &Vec2) -> Vec2 {
    let (s, c) = theta.sin_cos();
    Vec2::new(
        origin.x + c * local.x - s * local.y,
        origin.y + s * local.x + c * local.y,
    )
}

/// Wraps an angle into (-pi, pi].
pub fn normalize_angle(a: f64) -> f64 {
    use std::f64::consts::PI;
    let mut r = a.rem_euclid(2.0 * PI);
    if r > PI {
        r -= 2.0 * PI;
    }
    r
}
