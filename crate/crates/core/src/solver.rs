//! Limited-memory BFGS with a weak-Wolfe bracketing line search.
//!
//! The line search only requires sufficient decrease and a weak curvature
//! condition, so it tolerates objectives whose gradient jumps across kinks.
//! Every `alpha_exit` iterations control returns to the caller, which can
//! rebuild the objective and continue with [`restart`].

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

const WOLFE_C1: f64 = 1e-4;
const WOLFE_C2: f64 = 0.9;
const MAX_TRIALS: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveConfig {
    pub max_iters: usize,
    pub eps_g: f64,
    pub eps_c: f64,
    pub alpha_exit: usize,
    pub memory: usize,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            max_iters: 200,
            eps_g: 1e-2,
            eps_c: 1e-5,
            alpha_exit: 100,
            memory: 8,
        }
    }
}

impl SolveConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 || self.alpha_exit == 0 || self.memory == 0 {
            return Err(Error::InvalidArgument("solver counts must be positive".into()));
        }
        if !(self.eps_g > 0.0 && self.eps_c > 0.0) {
            return Err(Error::InvalidArgument("solver tolerances must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Reason {
    ConvergedGradient,
    ConvergedCost,
    EarlyExit,
    MaxIters,
    LineSearchFailure,
}

impl Reason {
    pub fn converged(self) -> bool {
        matches!(self, Reason::ConvergedGradient | Reason::ConvergedCost)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub x: Vec<f64>,
    pub cost: f64,
    pub grad: Vec<f64>,
    pub iters: usize,
    pub evaluations: usize,
    pub reason: Reason,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn inf_norm(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn finite(f: f64, g: &[f64]) -> bool {
    f.is_finite() && g.iter().all(|x| x.is_finite())
}

struct History {
    pairs: VecDeque<(Vec<f64>, Vec<f64>, f64)>,
    memory: usize,
}

impl History {
    fn new(memory: usize) -> Self {
        Self {
            pairs: VecDeque::with_capacity(memory),
            memory,
        }
    }

    fn push(&mut self, s: Vec<f64>, y: Vec<f64>) {
        let sy = dot(&s, &y);
        // keep only pairs that preserve positive definiteness
        if sy <= 1e-12 * dot(&y, &y).sqrt() * dot(&s, &s).sqrt() || sy <= 0.0 {
            return;
        }
        if self.pairs.len() == self.memory {
            self.pairs.pop_front();
        }
        self.pairs.push_back((s, y, 1.0 / sy));
    }

    /// Two-loop recursion: `-H g`.
    fn direction(&self, g: &[f64]) -> Vec<f64> {
        let mut q = g.to_vec();
        let mut alphas = Vec::with_capacity(self.pairs.len());
        for (s, y, rho) in self.pairs.iter().rev() {
            let a = rho * dot(s, &q);
            for (qi, yi) in q.iter_mut().zip(y) {
                *qi -= a * yi;
            }
            alphas.push(a);
        }
        if let Some((s, y, _)) = self.pairs.back() {
            let gamma = dot(s, y) / dot(y, y);
            q.iter_mut().for_each(|v| *v *= gamma);
        }
        for ((s, y, rho), a) in self.pairs.iter().zip(alphas.into_iter().rev()) {
            let b = rho * dot(y, &q);
            for (qi, si) in q.iter_mut().zip(s) {
                *qi += (a - b) * si;
            }
        }
        q.iter_mut().for_each(|v| *v = -*v);
        q
    }
}

/// Minimizes `objective` from `x0`. The objective returns the cost and its
/// gradient.
pub fn minimize<F>(mut objective: F, x0: &[f64], config: &SolveConfig) -> Result<SolveResult>
where
    F: FnMut(&[f64]) -> (f64, Vec<f64>),
{
    config.validate()?;
    let (f0, g0) = objective(x0);
    if !finite(f0, &g0) {
        return Err(Error::NonFinite);
    }
    run(&mut objective, x0.to_vec(), f0, g0, config)
}

/// Continues from `previous.x` with an empty curvature history, under a
/// possibly different objective.
pub fn restart<F>(previous: &SolveResult, objective: F, config: &SolveConfig) -> Result<SolveResult>
where
    F: FnMut(&[f64]) -> (f64, Vec<f64>),
{
    minimize(objective, &previous.x, config)
}

fn run<F>(objective: &mut F, mut x: Vec<f64>, mut f: f64, mut g: Vec<f64>, config: &SolveConfig) -> Result<SolveResult>
where
    F: FnMut(&[f64]) -> (f64, Vec<f64>),
{
    let n = x.len();
    let mut history = History::new(config.memory);
    let mut evaluations = 1;
    let mut iters = 0;
    let done = |x: Vec<f64>, f, g, iters, evaluations, reason| {
        Ok(SolveResult {
            x,
            cost: f,
            grad: g,
            iters,
            evaluations,
            reason,
        })
    };
    if n == 0 || inf_norm(&g) < config.eps_g {
        return done(x, f, g, 0, evaluations, Reason::ConvergedGradient);
    }

    loop {
        let mut d = history.direction(&g);
        let mut slope = dot(&g, &d);
        if !(slope < 0.0) {
            history.pairs.clear();
            d = g.iter().map(|v| -v).collect();
            slope = dot(&g, &d);
        }
        let mut t = if history.pairs.is_empty() {
            (1.0 / dot(&g, &g).sqrt()).min(1.0)
        } else {
            1.0
        };

        let mut lo = 0.0;
        let mut hi = f64::INFINITY;
        let mut accepted = None;
        let mut best: Option<(f64, Vec<f64>, Vec<f64>)> = None;
        for _ in 0..MAX_TRIALS {
            let xt: Vec<f64> = x.iter().zip(&d).map(|(xi, di)| xi + t * di).collect();
            let (ft, gt) = objective(&xt);
            evaluations += 1;
            if !finite(ft, &gt) || ft > f + WOLFE_C1 * t * slope {
                hi = t;
            } else {
                if best.as_ref().is_none_or(|b| ft < b.0) {
                    best = Some((ft, xt.clone(), gt.clone()));
                }
                if dot(&gt, &d) < WOLFE_C2 * slope {
                    lo = t;
                } else {
                    accepted = Some((ft, xt, gt));
                    break;
                }
            }
            t = if hi.is_finite() { 0.5 * (lo + hi) } else { 2.0 * lo.max(t) };
        }

        let Some((ft, xt, gt)) = accepted else {
            if let Some((fb, xb, gb)) = best {
                if fb < f {
                    return done(xb, fb, gb, iters + 1, evaluations, Reason::LineSearchFailure);
                }
            }
            return done(x, f, g, iters, evaluations, Reason::LineSearchFailure);
        };

        iters += 1;
        let s: Vec<f64> = xt.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = gt.iter().zip(&g).map(|(a, b)| a - b).collect();
        history.push(s, y);
        let df = (f - ft).abs();
        x = xt;
        f = ft;
        g = gt;

        if inf_norm(&g) < config.eps_g {
            return done(x, f, g, iters, evaluations, Reason::ConvergedGradient);
        }
        if df / f.abs().max(1.0) < config.eps_c {
            return done(x, f, g, iters, evaluations, Reason::ConvergedCost);
        }
        if iters >= config.max_iters {
            return done(x, f, g, iters, evaluations, Reason::MaxIters);
        }
        if iters % config.alpha_exit == 0 {
            return done(x, f, g, iters, evaluations, Reason::EarlyExit);
        }
    }
}
