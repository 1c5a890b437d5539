//! Differentiable cost terms over control points.
//!
//! Every term returns its value and a gradient with one entry per control
//! point. Entries of the fixed boundary points (the first and last `p` points)
//! are always zero.

mod anchors;
mod jfs;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

pub use anchors::{gen_anchor_pairs, AnchorKind, AnchorPair};
pub use jfs::{jfs, Jfs};

use crate::bspline::{clamped_curvature_grad, window_weights, UniformBSpline, DEFAULT_L_MIN};
use crate::geom::{heading_vec, perp, Vec2};
use crate::quadrature::GaussLegendre;
use crate::{Error, Result};

/// Value and per-control-point gradient.
#[derive(Debug, Clone, PartialEq)]
pub struct Cost {
    pub value: f64,
    pub grad: Vec<Vec2>,
}

impl Cost {
    pub fn zero(n: usize) -> Self {
        Self {
            value: 0.0,
            grad: vec![Vec2::zeros(); n],
        }
    }

    /// `self += w * other`.
    pub fn add_scaled(&mut self, w: f64, other: &Cost) {
        if w == 0.0 {
            return;
        }
        self.value += w * other.value;
        for (g, o) in self.grad.iter_mut().zip(&other.grad) {
            *g += o * w;
        }
    }

    /// Gradient restricted to the free control points, flattened `[x, y, ..]`.
    pub fn free_gradient(&self, spline: &UniformBSpline) -> Vec<f64> {
        self.grad[spline.free_range()]
            .iter()
            .flat_map(|g| [g.x, g.y])
            .collect()
    }

    fn clear_fixed(&mut self, spline: &UniformBSpline) {
        let free = spline.free_range();
        for (i, g) in self.grad.iter_mut().enumerate() {
            if !free.contains(&i) {
                *g = Vec2::zeros();
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PenaltyWeights {
    pub lam_sm: f64,
    pub lam_cl: f64,
    pub lam_fl: f64,
    pub lam_ft: f64,
    pub lam_fs: f64,
    /// Acceleration scale of the smoothness term.
    pub s_a: f64,
    /// Jerk scale of the smoothness term.
    pub s_j: f64,
    pub kappa_max: f64,
}

impl Default for PenaltyWeights {
    fn default() -> Self {
        Self {
            lam_sm: 1.0,
            lam_cl: 1.0,
            lam_fl: 1.0,
            lam_ft: 2.0,
            lam_fs: 5.0,
            s_a: 3.0,
            s_j: 5.0,
            kappa_max: 0.2,
        }
    }
}

impl PenaltyWeights {
    pub fn validate(&self) -> Result<()> {
        let all = [
            self.lam_sm,
            self.lam_cl,
            self.lam_fl,
            self.lam_ft,
            self.lam_fs,
            self.s_a,
            self.s_j,
        ];
        if all.iter().any(|w| !(*w >= 0.0)) || !(self.kappa_max > 0.0) {
            return Err(Error::InvalidArgument(format!("invalid penalty weights {self:?}")));
        }
        if !(self.s_a > 0.0 && self.s_j > 0.0) {
            return Err(Error::InvalidArgument("derivative scales must be positive".into()));
        }
        Ok(())
    }
}

/// Per-control-point curvature weights, raised only by multiplication.
#[derive(Debug, Clone, PartialEq)]
pub struct FlatteningWeights {
    w: Vec<f64>,
}

impl FlatteningWeights {
    pub fn ones(n: usize) -> Self {
        Self { w: vec![1.0; n] }
    }

    pub fn get(&self, i: usize) -> f64 {
        self.w[i]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.w
    }

    /// Multiplies the weights at `indices` by `gamma >= 1`.
    pub fn raise(&mut self, indices: &BTreeSet<usize>, gamma: f64) {
        debug_assert!(gamma >= 1.0);
        for &i in indices {
            if let Some(w) = self.w.get_mut(i) {
                *w *= gamma;
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KinodynamicLimits {
    pub v_s_max: f64,
    pub v_s_min: f64,
    pub a_s_max: f64,
    pub a_s_min: f64,
    pub a_d_max: f64,
    pub a_d_min: f64,
    pub kappa_max: f64,
    pub kappa_min: f64,
    pub lambda_elastic: f64,
}

impl Default for KinodynamicLimits {
    fn default() -> Self {
        Self {
            v_s_max: 5.55,
            v_s_min: 0.0,
            a_s_max: 4.0,
            a_s_min: -4.0,
            a_d_max: 2.0,
            a_d_min: -2.0,
            kappa_max: 0.2,
            kappa_min: -0.2,
            lambda_elastic: 0.8,
        }
    }
}

impl KinodynamicLimits {
    pub fn validate(&self) -> Result<()> {
        let ok = self.v_s_max > self.v_s_min
            && self.a_s_max > self.a_s_min
            && self.a_d_max > self.a_d_min
            && self.kappa_max > self.kappa_min
            && self.v_s_max > 0.0
            && self.lambda_elastic > 0.0
            && self.lambda_elastic <= 1.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("invalid kinodynamic limits {self:?}")))
        }
    }
}

fn accumulate_window(grad: &mut [Vec2], base: usize, coeffs: &[f64], g: Vec2) {
    for (j, c) in coeffs.iter().enumerate() {
        grad[base + j] += g * *c;
    }
}

/// Squared scaled acceleration and jerk control points plus squared
/// normalized clamped curvature.
pub fn smoothness_cost(spline: &UniformBSpline, weights: &PenaltyWeights) -> Cost {
    let q = spline.control_points();
    let n = q.len();
    let dt = spline.dt();
    let mut cost = Cost::zero(n);

    let inv_a = 1.0 / (dt * dt * weights.s_a);
    for i in 0..n.saturating_sub(2) {
        let a = (q[i + 2] - q[i + 1] * 2.0 + q[i]) * inv_a;
        cost.value += a.norm_squared();
        accumulate_window(&mut cost.grad, i, &[1.0, -2.0, 1.0], a * (2.0 * inv_a));
    }
    let inv_j = 1.0 / (dt * dt * dt * weights.s_j);
    for i in 0..n.saturating_sub(3) {
        let j = (q[i + 3] - q[i + 2] * 3.0 + q[i + 1] * 3.0 - q[i]) * inv_j;
        cost.value += j.norm_squared();
        accumulate_window(&mut cost.grad, i, &[-1.0, 3.0, -3.0, 1.0], j * (2.0 * inv_j));
    }
    let inv_k = 1.0 / weights.kappa_max;
    for i in 1..n.saturating_sub(1) {
        let cg = clamped_curvature_grad(q, i, DEFAULT_L_MIN);
        let r = cg.record.k * inv_k;
        cost.value += r * r;
        let s = 2.0 * r * inv_k;
        for (j, g) in cg.grad.iter().enumerate() {
            cost.grad[i - 1 + j] += g * s;
        }
    }
    cost.clear_fixed(spline);
    cost
}

/// Barrier on `c = s_f - d`: cubic up to `s_f`, then a matching quadratic.
pub fn collision_shape(c: f64, s_f: f64) -> (f64, f64) {
    if c <= 0.0 {
        (0.0, 0.0)
    } else if c <= s_f {
        (c * c * c, 3.0 * c * c)
    } else {
        (
            3.0 * s_f * c * c - 3.0 * s_f * s_f * c + s_f * s_f * s_f,
            6.0 * s_f * c - 3.0 * s_f * s_f,
        )
    }
}

pub fn collision_cost(spline: &UniformBSpline, pairs: &[AnchorPair], s_f: f64) -> Cost {
    let q = spline.control_points();
    let mut cost = Cost::zero(q.len());
    for pair in pairs {
        let d = (q[pair.i] - pair.p).dot(&pair.v);
        let (j, dj) = collision_shape(s_f - d, s_f);
        cost.value += j;
        cost.grad[pair.i] -= pair.v * dj;
    }
    cost.clear_fixed(spline);
    cost
}

/// Weighted squared normalized curvature over the flattening indices.
pub fn flattening_cost(
    spline: &UniformBSpline,
    omega_fl: &BTreeSet<usize>,
    w: &FlatteningWeights,
    kappa_max: f64,
) -> Cost {
    let q = spline.control_points();
    let mut cost = Cost::zero(q.len());
    let inv_k = 1.0 / kappa_max;
    for &i in omega_fl {
        if i == 0 || i + 1 >= q.len() {
            continue;
        }
        let cg = clamped_curvature_grad(q, i, DEFAULT_L_MIN);
        let r = cg.record.k * inv_k;
        let wi = w.get(i);
        cost.value += wi * r * r;
        let s = 2.0 * wi * r * inv_k;
        for (j, g) in cg.grad.iter().enumerate() {
            cost.grad[i - 1 + j] += g * s;
        }
    }
    cost.clear_fixed(spline);
    cost
}

/// Axial and radial tolerance of the fitness term (m).
pub const FIT_AXIAL: f64 = 2.0;
pub const FIT_RADIAL: f64 = 1.0;

/// Unit tangents of the reference polygon, `V_i` direction with carry-over.
pub fn reference_tangents(reference: &UniformBSpline) -> Vec<Vec2> {
    let q = reference.control_points();
    let mut last = heading_vec(reference.start_heading());
    let mut out = Vec::with_capacity(q.len());
    for i in 0..q.len() {
        if i + 1 < q.len() {
            let v = q[i + 1] - q[i];
            let n = v.norm();
            if n > 1e-9 {
                last = v / n;
            }
        }
        out.push(last);
    }
    out
}

/// Anisotropic pull of each free control point towards its reference
/// counterpart: deviation along the reference tangent is cheaper than across.
pub fn fitness_cost(spline: &UniformBSpline, reference: &UniformBSpline) -> Cost {
    fitness_cost_with(spline, reference, &reference_tangents(reference))
}

pub fn fitness_cost_with(spline: &UniformBSpline, reference: &UniformBSpline, tangents: &[Vec2]) -> Cost {
    let q = spline.control_points();
    let q_ref = reference.control_points();
    let mut cost = Cost::zero(q.len());
    let (ia, ir) = (1.0 / (FIT_AXIAL * FIT_AXIAL), 1.0 / (FIT_RADIAL * FIT_RADIAL));
    for i in spline.free_range() {
        let e = q[i] - q_ref[i];
        let t = tangents[i];
        let n = perp(&t);
        let (da, dr) = (e.dot(&t), e.dot(&n));
        cost.value += da * da * ia + dr * dr * ir;
        cost.grad[i] = t * (2.0 * da * ia) + n * (2.0 * dr * ir);
    }
    cost
}

/// Integrated velocity and acceleration penalties plus curvature penalties
/// at every interior control point.
pub fn feasibility_cost(
    spline: &UniformBSpline,
    limits: &KinodynamicLimits,
    rule: &GaussLegendre,
) -> Cost {
    let jfs = Jfs::new(limits.lambda_elastic).expect("validated elastic coefficient");
    let q = spline.control_points();
    let p = spline.degree();
    let dt = spline.dt();
    let mut cost = Cost::zero(q.len());
    let mut heading = spline.start_heading();

    let nodes = rule.reference_nodes();
    let weights = rule.reference_weights();
    // nodes on [0, 1]
    let unit: Vec<(f64, f64)> = nodes
        .iter()
        .zip(weights)
        .map(|(x, w)| (0.5 * (x + 1.0), 0.5 * w))
        .collect();
    let basis: Vec<(Vec<f64>, Vec<f64>)> = unit
        .iter()
        .map(|(u, _)| {
            (
                window_weights(p, *u, 1).expect("degree checked"),
                window_weights(p, *u, 2).expect("degree checked"),
            )
        })
        .collect();
    let (sv, sa) = (1.0 / dt, 1.0 / (dt * dt));

    for m in spline.spans() {
        let base = m - p;
        for ((_, w_node), (bv, ba)) in unit.iter().zip(&basis) {
            let mut v = Vec2::zeros();
            let mut a = Vec2::zeros();
            for j in 0..=p {
                v += q[base + j] * (bv[j] * sv);
                a += q[base + j] * (ba[j] * sa);
            }
            let speed = v.norm();
            let moving = speed >= crate::bspline::HEADING_SPEED_EPS;
            if moving {
                heading = v.y.atan2(v.x);
            }
            let t = heading_vec(heading);
            let n = perp(&t);
            let a_s = a.dot(&t);
            let a_d = a.dot(&n);
            let (jv, djv) = jfs.eval(speed, limits.v_s_max, limits.v_s_min);
            let (js, djs) = jfs.eval(a_s, limits.a_s_max, limits.a_s_min);
            let (jd, djd) = jfs.eval(a_d, limits.a_d_max, limits.a_d_min);
            let w = w_node * dt;
            cost.value += w * (jv + js + jd);

            let mut g_v = Vec2::zeros();
            if moving {
                g_v += t * djv;
                g_v += n * (djs * a_d / speed);
                g_v -= n * (djd * a_s / speed);
            }
            let g_a = t * djs + n * djd;
            for j in 0..=p {
                cost.grad[base + j] += (g_v * (bv[j] * sv) + g_a * (ba[j] * sa)) * w;
            }
        }
    }

    for i in 1..q.len().saturating_sub(1) {
        let cg = clamped_curvature_grad(q, i, DEFAULT_L_MIN);
        let (jk, djk) = jfs.eval(cg.record.k, limits.kappa_max, limits.kappa_min);
        cost.value += jk;
        if djk != 0.0 {
            for (j, g) in cg.grad.iter().enumerate() {
                cost.grad[i - 1 + j] += g * djk;
            }
        }
    }
    cost.clear_fixed(spline);
    cost
}

/// Inputs of the first-stage objective.
#[derive(Debug, Clone, Copy)]
pub struct ReboundContext<'a> {
    pub weights: &'a PenaltyWeights,
    pub pairs: &'a [AnchorPair],
    pub omega_fl: &'a BTreeSet<usize>,
    pub flattening: &'a FlatteningWeights,
    pub s_f: f64,
}

/// Inputs of the second-stage objective.
#[derive(Debug, Clone, Copy)]
pub struct RefineContext<'a> {
    pub weights: &'a PenaltyWeights,
    pub reference: &'a UniformBSpline,
    pub tangents: &'a [Vec2],
    pub limits: &'a KinodynamicLimits,
    pub rule: &'a GaussLegendre,
}

/// `lam_sm * J_sm + lam_cl * J_cl + lam_fl * J_fl`.
pub fn rebound_total(spline: &UniformBSpline, ctx: &ReboundContext<'_>) -> Cost {
    let w = ctx.weights;
    let mut total = Cost::zero(spline.control_points().len());
    if w.lam_sm != 0.0 {
        total.add_scaled(w.lam_sm, &smoothness_cost(spline, w));
    }
    if w.lam_cl != 0.0 {
        total.add_scaled(w.lam_cl, &collision_cost(spline, ctx.pairs, ctx.s_f));
    }
    if w.lam_fl != 0.0 {
        total.add_scaled(
            w.lam_fl,
            &flattening_cost(spline, ctx.omega_fl, ctx.flattening, w.kappa_max),
        );
    }
    total
}

/// `lam_sm * J_sm + lam_ft * J_ft + lam_fs * J_fs`.
pub fn refine_total(spline: &UniformBSpline, ctx: &RefineContext<'_>) -> Cost {
    let w = ctx.weights;
    let mut total = Cost::zero(spline.control_points().len());
    if w.lam_sm != 0.0 {
        total.add_scaled(w.lam_sm, &smoothness_cost(spline, w));
    }
    if w.lam_ft != 0.0 {
        total.add_scaled(w.lam_ft, &fitness_cost_with(spline, ctx.reference, ctx.tangents));
    }
    if w.lam_fs != 0.0 {
        total.add_scaled(w.lam_fs, &feasibility_cost(spline, ctx.limits, ctx.rule));
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn spline(points: &[(f64, f64)], dt: f64) -> UniformBSpline {
        UniformBSpline::new(3, points.iter().map(|(x, y)| Vec2::new(*x, *y)).collect(), dt, 0.0)
            .unwrap()
    }

    fn random_spline(rng: &mut ChaCha8Rng) -> UniformBSpline {
        let mut ctrl = Vec::new();
        let mut p = Vec2::zeros();
        for _ in 0..12 {
            p += Vec2::new(rng.gen_range(0.5..2.0), rng.gen_range(-1.0..1.0));
            ctrl.push(p);
        }
        UniformBSpline::new(3, ctrl, rng.gen_range(0.2..0.6), 0.0).unwrap()
    }

    /// Central differences of `f` over every free coordinate.
    fn check_gradient(s: &UniformBSpline, f: impl Fn(&UniformBSpline) -> Cost) {
        let h = 1e-6;
        let c = f(s);
        let x = s.free_vars();
        let g = c.free_gradient(s);
        for k in 0..x.len() {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[k] += h;
            xm[k] -= h;
            let fd = (f(&s.with_free_vars(&xp)).value - f(&s.with_free_vars(&xm)).value) / (2.0 * h);
            let scale = g[k].abs().max(1.0);
            assert!((fd - g[k]).abs() / scale < 1e-4, "k={k}: fd {fd} vs {}", g[k]);
        }
    }

    #[test]
    fn straight_uniform_costs_nothing() {
        let s = spline(&(0..9).map(|i| (i as f64, 0.0)).collect::<Vec<_>>(), 0.5);
        let c = smoothness_cost(&s, &PenaltyWeights::default());
        assert_eq!(c.value, 0.0);
        assert!(c.grad.iter().all(|g| g.norm() == 0.0));
        let f = feasibility_cost(&s, &KinodynamicLimits::default(), &GaussLegendre::new(5).unwrap());
        assert_eq!(f.value, 0.0);
    }

    #[test]
    fn smoothness_example() {
        let pts = [(0.0, 0.0), (1.0, 0.0), (3.0, 0.0), (4.0, 0.0), (5.0, 0.0), (6.0, 0.0), (7.0, 0.0)];
        let s = spline(&pts, 1.0);
        let w = PenaltyWeights::default();
        // A = (1, -1, 0, 0, 0), J = (-2, 1, 0, 0), curvature zero on a line
        let expect = 2.0 / 9.0 + (4.0 + 1.0) / 25.0;
        assert!((smoothness_cost(&s, &w).value - expect).abs() < 1e-12);
    }

    #[test]
    fn collision_shape_examples() {
        let s_f = 2.1;
        assert_eq!(collision_shape(0.0, s_f).0, 0.0);
        assert!((collision_shape(s_f, s_f).0 - 9.261).abs() < 1e-9);
        assert!((collision_shape(2.0 * s_f, s_f).0 - 7.0 * s_f.powi(3)).abs() < 1e-9);
        // C1 at the joint
        let e = 1e-9;
        assert!((collision_shape(s_f - e, s_f).1 - collision_shape(s_f + e, s_f).1).abs() < 1e-6);
    }

    #[test]
    fn collision_translation_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let s = random_spline(&mut rng);
        let pairs: Vec<AnchorPair> = s
            .free_range()
            .map(|i| AnchorPair {
                i,
                p: s.control_points()[i] + Vec2::new(0.3, 0.5),
                v: Vec2::new(-0.6, -0.8),
                kind: AnchorKind::Close,
            })
            .collect();
        let shift = Vec2::new(17.0, -4.0);
        let moved = UniformBSpline::new(
            3,
            s.control_points().iter().map(|q| q + shift).collect(),
            s.dt(),
            0.0,
        )
        .unwrap();
        let moved_pairs: Vec<AnchorPair> = pairs.iter().map(|p| AnchorPair { p: p.p + shift, ..*p }).collect();
        let a = collision_cost(&s, &pairs, 2.1).value;
        let b = collision_cost(&moved, &moved_pairs, 2.1).value;
        assert!(a > 0.0);
        assert!((a - b).abs() < 1e-9 * a);
    }

    #[test]
    fn flattening_examples() {
        let pts = [(-2.0, 0.0), (-1.0, 0.0), (0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (1.0, 2.0), (1.0, 3.0)];
        let s = spline(&pts, 1.0);
        let mut w = FlatteningWeights::ones(pts.len());
        assert_eq!(flattening_cost(&s, &BTreeSet::new(), &w, 0.2).value, 0.0);
        let set: BTreeSet<usize> = [3].into_iter().collect();
        let c1 = flattening_cost(&s, &set, &w, 0.2);
        assert!((c1.value - (3.7712f64 / 0.2).powi(2)).abs() < 0.05);
        w.raise(&set, 2.0);
        let c2 = flattening_cost(&s, &set, &w, 0.2);
        assert!((c2.value - 2.0 * c1.value).abs() < 1e-9);
        assert!((c2.grad[3] - c1.grad[3] * 2.0).norm() < 1e-9);
    }

    #[test]
    fn fitness_examples() {
        let base: Vec<(f64, f64)> = (0..9).map(|i| (i as f64, 0.0)).collect();
        let r = spline(&base, 0.5);
        assert_eq!(fitness_cost(&r, &r).value, 0.0);
        let mut axial = base.clone();
        axial[4].0 += 2.0;
        assert!((fitness_cost(&spline(&axial, 0.5), &r).value - 1.0).abs() < 1e-12);
        let mut radial = base.clone();
        radial[4].1 += 2.0;
        assert!((fitness_cost(&spline(&radial, 0.5), &r).value - 4.0).abs() < 1e-12);
    }

    #[test]
    fn feasibility_constant_overspeed() {
        let limits = KinodynamicLimits::default();
        let dt = 0.5;
        let speed = 1.1 * limits.v_s_max;
        let s = spline(&(0..10).map(|i| (i as f64 * speed * dt, 0.0)).collect::<Vec<_>>(), dt);
        let c = feasibility_cost(&s, &limits, &GaussLegendre::new(5).unwrap());
        let per_time = Jfs::new(0.8).unwrap().eval(speed, limits.v_s_max, limits.v_s_min).0;
        assert!((c.value - s.horizon() * per_time).abs() < 1e-9);
    }

    #[test]
    fn gradients_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let w = PenaltyWeights::default();
        let limits = KinodynamicLimits {
            v_s_max: 3.0,
            a_s_max: 2.0,
            a_s_min: -2.0,
            a_d_max: 1.0,
            a_d_min: -1.0,
            kappa_max: 0.3,
            kappa_min: -0.3,
            ..KinodynamicLimits::default()
        };
        let rule = GaussLegendre::new(5).unwrap();
        for _ in 0..10 {
            let s = random_spline(&mut rng);
            let r = random_spline(&mut rng);
            check_gradient(&s, |x| smoothness_cost(x, &w));
            check_gradient(&s, |x| fitness_cost(x, &r));
            check_gradient(&s, |x| feasibility_cost(x, &limits, &rule));
            let omega: BTreeSet<usize> = (1..11).collect();
            check_gradient(&s, |x| flattening_cost(x, &omega, &FlatteningWeights::ones(12), 0.2));
            let pairs: Vec<AnchorPair> = s
                .free_range()
                .map(|i| {
                    let v = Vec2::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)).normalize();
                    AnchorPair {
                        i,
                        p: s.control_points()[i] + v * rng.gen_range(-1.0..1.0),
                        v,
                        kind: AnchorKind::Close,
                    }
                })
                .collect();
            check_gradient(&s, |x| collision_cost(x, &pairs, 2.1));
        }
    }

    #[test]
    fn totals_are_weighted_sums() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let s = random_spline(&mut rng);
        let r = random_spline(&mut rng);
        let limits = KinodynamicLimits::default();
        let rule = GaussLegendre::new(5).unwrap();
        let tangents = reference_tangents(&r);
        let zero = PenaltyWeights {
            lam_sm: 0.0,
            lam_cl: 0.0,
            lam_fl: 0.0,
            lam_ft: 0.0,
            lam_fs: 0.0,
            ..PenaltyWeights::default()
        };
        let omega: BTreeSet<usize> = [3, 4].into_iter().collect();
        let fw = FlatteningWeights::ones(12);
        let pairs = [];
        let ctx = |w| ReboundContext {
            weights: w,
            pairs: &pairs,
            omega_fl: &omega,
            flattening: &fw,
            s_f: 2.1,
        };
        let c = rebound_total(&s, &ctx(&zero));
        assert_eq!(c.value, 0.0);
        let only_sm = PenaltyWeights { lam_sm: 1.0, ..zero };
        assert_eq!(rebound_total(&s, &ctx(&only_sm)), smoothness_cost(&s, &only_sm));

        let w = PenaltyWeights::default();
        let rctx = RefineContext {
            weights: &w,
            reference: &r,
            tangents: &tangents,
            limits: &limits,
            rule: &rule,
        };
        let total = refine_total(&s, &rctx).value;
        let parts = w.lam_sm * smoothness_cost(&s, &w).value
            + w.lam_ft * fitness_cost(&s, &r).value
            + w.lam_fs * feasibility_cost(&s, &limits, &rule).value;
        assert!((total - parts).abs() <= 1e-12 * parts.abs().max(1.0));
    }

    #[test]
    fn costs_are_non_negative() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let w = PenaltyWeights::default();
        for _ in 0..20 {
            let s = random_spline(&mut rng);
            assert!(smoothness_cost(&s, &w).value >= 0.0);
            assert!(
                feasibility_cost(&s, &KinodynamicLimits::default(), &GaussLegendre::new(5).unwrap()).value
                    >= 0.0
            );
        }
    }
}
