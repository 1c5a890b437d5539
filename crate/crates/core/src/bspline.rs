//! Uniform B-splines for planar trajectories.
//!
//! A spline of degree `p` has control points `Q_0..=Q_{N_c}` and an implicit
//! uniform knot vector `t_m = t0 + m * dt`, `m = 0..=M` with `M = N_c + p + 1`.
//! It is valid on `[t_p, t_{M-p}]`; inside knot span `[t_m, t_{m+1})` the curve is
//! `u^T * B * [Q_{m-p} .. Q_m]` with `u = (1, u, u^2, ..)` and `B` from
//! [`basis_matrix`].
//!
//! The position is the rear-axle midpoint. Velocity is assumed tangent to the
//! path, so the longitudinal speed is `|v|` and acceleration splits into a
//! longitudinal and a lateral part about the heading.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::geom::{cross, heading_vec, perp, Vec2};
use crate::{Error, Result};

/// Speed below which the heading is carried over instead of read from velocity.
pub const HEADING_SPEED_EPS: f64 = 1e-3;

/// Default minimum segment length for clamped curvature (m).
pub const DEFAULT_L_MIN: f64 = 0.1;

/// Turning angles beyond this are extended linearly so a fully folded polygon
/// still yields a finite curvature and a usable gradient.
const MAX_TURN: f64 = std::f64::consts::PI - 0.05;

const DEGENERATE_LEN: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniformBSpline {
    degree: usize,
    control_points: Vec<Vec2>,
    dt: f64,
    t0: f64,
}

/// Constant basis matrix for degree 1..=3. Row `r` holds the coefficients of
/// `u^r`, column `c` multiplies the `c`-th point of the local window.
pub fn basis_matrix(degree: usize) -> Result<DMatrix<f64>> {
    let m = match degree {
        1 => DMatrix::from_row_slice(2, 2, &[1.0, 0.0, -1.0, 1.0]),
        2 => DMatrix::from_row_slice(3, 3, &[0.5, 0.5, 0.0, -1.0, 1.0, 0.0, 0.5, -1.0, 0.5]),
        3 => {
            DMatrix::from_row_slice(
                4,
                4,
                &[
                    1.0, 4.0, 1.0, 0.0, //
                    -3.0, 0.0, 3.0, 0.0, //
                    3.0, -6.0, 3.0, 0.0, //
                    -1.0, 3.0, -3.0, 1.0,
                ],
            ) / 6.0
        }
        _ => {
            return Err(Error::InvalidArgument(format!(
                "basis matrix available for degree 1..=3, got {degree}"
            )))
        }
    };
    Ok(m)
}

/// Blend weights of the `degree + 1` window points for the `order`-th
/// derivative with respect to the normalized parameter `u`.
pub fn window_weights(degree: usize, u: f64, order: usize) -> Result<Vec<f64>> {
    let b = basis_matrix(degree)?;
    if order > degree {
        return Err(Error::InvalidArgument(format!(
            "derivative order {order} exceeds degree {degree}"
        )));
    }
    let n = degree + 1;
    let mut w = vec![0.0; n];
    for r in order..n {
        // d^order/du^order of u^r
        let mut coef = 1.0;
        for k in 0..order {
            coef *= (r - k) as f64;
        }
        let up = coef * u.powi((r - order) as i32);
        for (c, wc) in w.iter_mut().enumerate() {
            *wc += up * b[(r, c)];
        }
    }
    Ok(w)
}

impl UniformBSpline {
    pub fn new(degree: usize, control_points: Vec<Vec2>, dt: f64, t0: f64) -> Result<Self> {
        if !(1..=3).contains(&degree) {
            return Err(Error::InvalidArgument(format!(
                "degree must be 1..=3, got {degree}"
            )));
        }
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::InvalidArgument(format!("knot span must be positive, got {dt}")));
        }
        let need = (2 * degree).max(degree + 1);
        if control_points.len() < need {
            return Err(Error::InvalidArgument(format!(
                "degree {degree} needs at least {need} control points, got {}",
                control_points.len()
            )));
        }
        Ok(Self {
            degree,
            control_points,
            dt,
            t0,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn control_points(&self) -> &[Vec2] {
        &self.control_points
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    /// `N_c`: index of the last control point.
    pub fn n_c(&self) -> usize {
        self.control_points.len() - 1
    }

    /// `M`: index of the last knot.
    pub fn last_knot(&self) -> usize {
        self.n_c() + self.degree + 1
    }

    pub fn knot(&self, m: usize) -> f64 {
        self.t0 + m as f64 * self.dt
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.knot(self.degree), self.knot(self.last_knot() - self.degree))
    }

    /// Number of knot spans inside the valid domain.
    pub fn span_count(&self) -> usize {
        self.last_knot() - 2 * self.degree
    }

    /// Knot indices `m` whose span `[t_m, t_{m+1})` lies in the domain.
    pub fn spans(&self) -> std::ops::Range<usize> {
        self.degree..self.degree + self.span_count()
    }

    pub fn horizon(&self) -> f64 {
        self.span_count() as f64 * self.dt
    }

    /// Indices of the control points left free once both boundary triples
    /// are fixed.
    pub fn free_range(&self) -> std::ops::Range<usize> {
        self.degree..(self.n_c() + 1).saturating_sub(self.degree).max(self.degree)
    }

    /// Flattens the free control points as `[x, y, x, y, ..]`.
    pub fn free_vars(&self) -> Vec<f64> {
        self.control_points[self.free_range()]
            .iter()
            .flat_map(|q| [q.x, q.y])
            .collect()
    }

    pub fn set_free_vars(&mut self, x: &[f64]) {
        let r = self.free_range();
        assert_eq!(x.len(), 2 * r.len(), "free variable length mismatch");
        for (k, i) in r.enumerate() {
            self.control_points[i] = Vec2::new(x[2 * k], x[2 * k + 1]);
        }
    }

    pub fn with_free_vars(&self, x: &[f64]) -> Self {
        let mut s = self.clone();
        s.set_free_vars(x);
        s
    }

    /// Same control points, knot span replaced.
    pub fn with_dt(&self, dt: f64) -> Result<Self> {
        Self::new(self.degree, self.control_points.clone(), dt, self.t0)
    }

    /// Knot index of the span containing `t` and the normalized parameter.
    pub fn locate(&self, t: f64) -> Result<(usize, f64)> {
        let (start, end) = self.domain();
        let tol = 1e-9 * self.dt;
        if !(t >= start - tol && t <= end + tol) {
            return Err(Error::Domain { t, start, end });
        }
        let rel = ((t - self.t0) / self.dt).max(self.degree as f64);
        let last = self.spans().end - 1;
        let m = (rel.floor() as usize).min(last);
        let u = (rel - m as f64).clamp(0.0, 1.0);
        Ok((m, u))
    }

    /// Position (`order = 0`) or time derivative of the given order.
    pub fn evaluate(&self, t: f64, order: usize) -> Result<Vec2> {
        if order > self.degree {
            return Err(Error::InvalidArgument(format!(
                "derivative order {order} exceeds degree {}",
                self.degree
            )));
        }
        let (m, u) = self.locate(t)?;
        Ok(self.evaluate_in_span(m, u, order))
    }

    /// Evaluation with the span already resolved; `order <= degree` assumed.
    pub fn evaluate_in_span(&self, m: usize, u: f64, order: usize) -> Vec2 {
        let w = window_weights(self.degree, u, order).expect("validated degree");
        let scale = self.dt.powi(-(order as i32));
        let base = m - self.degree;
        let mut out = Vec2::zeros();
        for (j, wj) in w.iter().enumerate() {
            out += self.control_points[base + j] * *wj;
        }
        out * scale
    }

    /// The degree `p-1` spline whose control points are `V_i`.
    pub fn derivative(&self) -> Result<Self> {
        if self.degree < 2 {
            return Err(Error::Unsupported("derivative spline needs degree >= 2".into()));
        }
        let d = derivative_control_points(&self.control_points, self.dt)?;
        Self::new(self.degree - 1, d.v, self.dt, self.t0 + self.dt)
    }

    /// Heading at the start of the domain: the direction of the first
    /// non-vanishing derivative, which is the limit of the velocity direction.
    pub fn start_heading(&self) -> f64 {
        let (t, _) = self.domain();
        for order in 1..=self.degree {
            if let Ok(d) = self.evaluate(t, order) {
                if d.norm() > 1e-9 {
                    return d.y.atan2(d.x);
                }
            }
        }
        0.0
    }

    /// Kinematic samples at increasing `times` with heading carry-over.
    pub fn kinematics(&self, times: &[f64]) -> Result<Vec<KinematicSample>> {
        let mut heading = self.start_heading();
        let mut out = Vec::with_capacity(times.len());
        for &t in times {
            let s = kinematic_sample(self, t, heading)?;
            heading = s.theta;
            out.push(s);
        }
        Ok(out)
    }

    /// All knots of the domain plus `per_span` equispaced interior samples.
    pub fn uniform_times(&self, per_span: usize) -> Vec<f64> {
        let per_span = per_span.max(1);
        let mut ts = Vec::with_capacity(self.span_count() * per_span + 1);
        for m in self.spans() {
            for j in 0..per_span {
                ts.push(self.knot(m) + self.dt * j as f64 / per_span as f64);
            }
        }
        ts.push(self.domain().1);
        ts
    }
}

/// Control points of velocity, acceleration and jerk.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivativeControlPoints {
    pub v: Vec<Vec2>,
    pub a: Vec<Vec2>,
    pub j: Vec<Vec2>,
}

fn forward_diff(q: &[Vec2], dt: f64) -> Vec<Vec2> {
    q.windows(2).map(|w| (w[1] - w[0]) / dt).collect()
}

pub fn derivative_control_points(q: &[Vec2], dt: f64) -> Result<DerivativeControlPoints> {
    if q.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least two control points, got {}",
            q.len()
        )));
    }
    let v = forward_diff(q, dt);
    let a = forward_diff(&v, dt);
    let j = forward_diff(&a, dt);
    Ok(DerivativeControlPoints { v, a, j })
}

/// Terminal state: rear-axle position, velocity, acceleration and heading.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryState {
    pub p: Vec2,
    pub v: Vec2,
    pub a: Vec2,
    pub theta: f64,
}

impl BoundaryState {
    pub fn new(p: Vec2, v: Vec2, a: Vec2, theta: f64) -> Result<Self> {
        if v.norm() > 1e-12 {
            let off = cross(&heading_vec(theta), &v).atan2(heading_vec(theta).dot(&v));
            if off.abs() > 1e-6 {
                return Err(Error::InvalidArgument(format!(
                    "boundary velocity is {off:.3e} rad off the heading"
                )));
            }
        }
        Ok(Self { p, v, a, theta })
    }

    /// State from scalar longitudinal speed and acceleration along `theta`.
    pub fn longitudinal(p: Vec2, theta: f64, speed: f64, accel: f64) -> Self {
        let h = heading_vec(theta);
        Self {
            p,
            v: h * speed,
            a: h * accel,
            theta,
        }
    }
}

/// The cubic boundary triple reproducing `p`, `v`, `a` at the clamped knot.
///
/// Solves `p = (Q0 + 4Q1 + Q2)/6`, `v = (Q2 - Q0)/(2dt)`, `a = (Q0 - 2Q1 + Q2)/dt^2`.
/// The same triple serves the end of the curve (`Q_{N_c-2}, Q_{N_c-1}, Q_{N_c}`).
pub fn boundary_control_points(b: &BoundaryState, dt: f64, degree: usize) -> Result<[Vec2; 3]> {
    if degree != 3 {
        return Err(Error::Unsupported(format!(
            "boundary conditioning implemented for cubic splines, got degree {degree}"
        )));
    }
    let q1 = b.p - b.a * (dt * dt / 6.0);
    let mid = q1 + b.a * (dt * dt / 2.0);
    let q0 = mid - b.v * dt;
    let q2 = mid + b.v * dt;
    Ok([q0, q1, q2])
}

/// Clamped-curvature bound at control point `i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureRecord {
    pub i: usize,
    /// Signed curvature; positive for a counter-clockwise turn.
    pub k: f64,
    /// Interior angle at `Q_i` (pi for a straight polygon).
    pub alpha: f64,
    /// Segment length after `L_min` clipping.
    pub l: f64,
    pub degenerate: bool,
}

/// `K_i` with its gradient with respect to `Q_{i-1}`, `Q_i`, `Q_{i+1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureGrad {
    pub record: CurvatureRecord,
    pub grad: [Vec2; 3],
}

/// `K_i = (1/6) (sin a / l) ((1 - cos a)/8)^(-3/2)`.
///
/// With the turning angle `phi = pi - a` (signed by the turn direction) this is
/// `K = (8/3) sin(phi/2) / (l cos^2(phi/2))`, which is the form evaluated here:
/// it is odd and smooth in `phi`, so the sign carries through without a kink at
/// straight polygons.
pub fn clamped_curvature(q: &[Vec2], i: usize, l_min: f64) -> CurvatureRecord {
    clamped_curvature_grad(q, i, l_min).record
}

pub fn clamped_curvature_grad(q: &[Vec2], i: usize, l_min: f64) -> CurvatureGrad {
    assert!(i >= 1 && i + 1 < q.len(), "curvature index {i} out of range");
    let d1 = q[i] - q[i - 1];
    let d2 = q[i + 1] - q[i];
    let (n1, n2) = (d1.norm(), d2.norm());
    let fold = (q[i + 1] - q[i - 1]).norm() <= 1e-12 * (n1 + n2);
    if n1 < DEGENERATE_LEN || n2 < DEGENERATE_LEN || fold {
        // coincident points, or an exact fold produced by an at-rest boundary
        // triple: the hodograph passes through zero and the bound is undefined
        return CurvatureGrad {
            record: CurvatureRecord {
                i,
                k: 0.0,
                alpha: std::f64::consts::PI,
                l: n1.min(n2).max(l_min),
                degenerate: true,
            },
            grad: [Vec2::zeros(); 3],
        };
    }
    let phi = cross(&d1, &d2).atan2(d1.dot(&d2));
    let (l, dl) = if n1.min(n2) < l_min {
        (l_min, None)
    } else if n1 <= n2 {
        (n1, Some((0usize, d1 / n1)))
    } else {
        (n2, Some((1usize, d2 / n2)))
    };

    let (g, dg) = turn_shape(phi);
    let k = g / l;
    let dk_dphi = dg / l;
    let dk_dl = -k / l;

    // phi = angle(d2) - angle(d1)
    let a1 = perp(&d1) / (n1 * n1);
    let a2 = perp(&d2) / (n2 * n2);
    let mut grad = [a1 * dk_dphi, (-a1 - a2) * dk_dphi, a2 * dk_dphi];
    if let Some((which, dir)) = dl {
        if which == 0 {
            grad[0] -= dir * dk_dl;
            grad[1] += dir * dk_dl;
        } else {
            grad[1] -= dir * dk_dl;
            grad[2] += dir * dk_dl;
        }
    }
    CurvatureGrad {
        record: CurvatureRecord {
            i,
            k,
            alpha: std::f64::consts::PI - phi.abs(),
            l,
            degenerate: false,
        },
        grad,
    }
}

/// `g(phi) = (8/3) sin(phi/2) / cos^2(phi/2)` and its derivative, extended
/// linearly past `MAX_TURN`.
fn turn_shape(phi: f64) -> (f64, f64) {
    let eval = |p: f64| {
        let (s, c) = (0.5 * p).sin_cos();
        let g = 8.0 / 3.0 * s / (c * c);
        let dg = 4.0 / 3.0 * (1.0 + s * s) / (c * c * c);
        (g, dg)
    };
    if phi.abs() <= MAX_TURN {
        eval(phi)
    } else {
        let (g0, dg0) = eval(MAX_TURN);
        let sign = phi.signum();
        (sign * (g0 + dg0 * (phi.abs() - MAX_TURN)), dg0)
    }
}

/// Every `K_i`, `i = 1..N_c-1`.
pub fn clamped_curvatures(q: &[Vec2], l_min: f64) -> Vec<CurvatureRecord> {
    (1..q.len().saturating_sub(1))
        .map(|i| clamped_curvature(q, i, l_min))
        .collect()
}

/// Kinematic state at one time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KinematicSample {
    pub t: f64,
    pub pos: Vec2,
    pub vel: Vec2,
    pub acc: Vec2,
    pub v_s: f64,
    pub a_s: f64,
    pub a_d: f64,
    pub theta: f64,
    pub psi: f64,
}

/// Longitudinal/lateral decomposition at `t`. `heading_hint` supplies the
/// heading when the speed is below [`HEADING_SPEED_EPS`].
pub fn kinematic_sample(spline: &UniformBSpline, t: f64, heading_hint: f64) -> Result<KinematicSample> {
    let (m, u) = spline.locate(t)?;
    let pos = spline.evaluate_in_span(m, u, 0);
    let vel = spline.evaluate_in_span(m, u, 1);
    let acc = if spline.degree() >= 2 {
        spline.evaluate_in_span(m, u, 2)
    } else {
        Vec2::zeros()
    };
    let v_s = vel.norm();
    let theta = if v_s >= HEADING_SPEED_EPS {
        vel.y.atan2(vel.x)
    } else {
        heading_hint
    };
    let psi = acc.y.atan2(acc.x);
    let h = heading_vec(theta);
    // |a| cos(psi - theta) and |a| sin(psi - theta)
    let a_s = acc.dot(&h);
    let a_d = cross(&h, &acc);
    Ok(KinematicSample {
        t,
        pos,
        vel,
        acc,
        v_s,
        a_s,
        a_d,
        theta,
        psi,
    })
}

/// Least-squares fit outcome.
#[derive(Debug, Clone)]
pub struct FitResult {
    pub spline: UniformBSpline,
    pub rms: f64,
}

/// Fits a cubic spline to time-stamped positions with both boundary triples
/// pinned by `start` and `goal`.
///
/// The domain is made to coincide with the sample time range, so the knot
/// span is `T / ceil(T / dt)` (never longer than `dt`).
pub fn fit_from_samples(
    samples: &[(f64, Vec2)],
    dt: f64,
    start: &BoundaryState,
    goal: &BoundaryState,
) -> Result<FitResult> {
    const P: usize = 3;
    if samples.len() < 2 {
        return Err(Error::Fit("need at least two samples".into()));
    }
    if samples.windows(2).any(|w| !(w[1].0 > w[0].0)) {
        return Err(Error::Fit("sample times must be strictly increasing".into()));
    }
    if !(dt > 0.0) {
        return Err(Error::Fit(format!("knot span must be positive, got {dt}")));
    }
    let (t_first, p_first) = samples[0];
    let (t_last, p_last) = samples[samples.len() - 1];
    if (p_first - start.p).norm() > 0.5 || (p_last - goal.p).norm() > 0.5 {
        return Err(Error::Fit("end samples disagree with the boundary states by more than 0.5 m".into()));
    }
    let total = t_last - t_first;
    let spans = ((total / dt) - 1e-9).ceil().max(1.0) as usize;
    if spans < P {
        return Err(Error::Fit(format!(
            "sample span {total:.3} s holds {spans} knot spans, need at least {P}"
        )));
    }
    let dt = total / spans as f64;
    let n_ctrl = spans + P;
    let head = boundary_control_points(start, dt, P)?;
    let tail = boundary_control_points(goal, dt, P)?;
    let mut ctrl = vec![Vec2::zeros(); n_ctrl];
    ctrl[..P].copy_from_slice(&head);
    ctrl[n_ctrl - P..].copy_from_slice(&tail);
    let t0 = t_first - P as f64 * dt;
    let mut spline = UniformBSpline::new(P, ctrl, dt, t0)?;

    let free = spline.free_range();
    let nf = free.len();
    if nf > 0 {
        if samples.len() < nf {
            return Err(Error::Fit(format!(
                "{} samples cannot determine {nf} free control points",
                samples.len()
            )));
        }
        let mut a = DMatrix::<f64>::zeros(samples.len(), nf);
        let mut bx = DVector::<f64>::zeros(samples.len());
        let mut by = DVector::<f64>::zeros(samples.len());
        for (r, (t, pos)) in samples.iter().enumerate() {
            let (m, u) = spline.locate(*t)?;
            let w = window_weights(P, u, 0)?;
            let mut rhs = *pos;
            for (j, wj) in w.iter().enumerate() {
                let idx = m - P + j;
                if free.contains(&idx) {
                    a[(r, idx - free.start)] += wj;
                } else {
                    rhs -= spline.control_points[idx] * *wj;
                }
            }
            bx[r] = rhs.x;
            by[r] = rhs.y;
        }
        let ata = a.transpose() * &a;
        let chol = ata
            .cholesky()
            .ok_or_else(|| Error::Fit("normal equations are singular".into()))?;
        let x = chol.solve(&(a.transpose() * bx));
        let y = chol.solve(&(a.transpose() * by));
        for k in 0..nf {
            spline.control_points[free.start + k] = Vec2::new(x[k], y[k]);
        }
    }
    let mut sq = 0.0;
    for (t, pos) in samples {
        sq += (spline.evaluate(*t, 0)? - pos).norm_squared();
    }
    let rms = (sq / samples.len() as f64).sqrt();
    Ok(FitResult { spline, rms })
}
