//! Gauss–Legendre quadrature on arbitrary intervals.

use crate::{Error, Result};

/// n-point Gauss–Legendre rule on the reference interval [-1, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes are the roots of P_n found by Newton iteration from the Chebyshev
    /// guesses; weights are 2 / ((1 - x^2) P_n'(x)^2).
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("quadrature needs at least one point".into()));
        }
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Ok(Self { nodes, weights })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn reference_nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn reference_weights(&self) -> &[f64] {
        &self.weights
    }

    /// Nodes and weights mapped onto [a, b].
    pub fn on_interval(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(x, w)| (mid + half * x, half * w))
    }

    pub fn integrate(&self, a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
        self.on_interval(a, b).map(|(t, w)| w * f(t)).sum()
    }
}

/// P_n(x) and P_n'(x) by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn five_point_rule_matches_tabulated_values() {
        let g = GaussLegendre::new(5).unwrap();
        let x = g.reference_nodes();
        let w = g.reference_weights();
        assert!((x[4] - 0.906_179_845_938_664).abs() < 1e-14);
        assert!((x[3] - 0.538_469_310_105_683).abs() < 1e-14);
        assert_eq!(x[2], 0.0);
        assert!((w[2] - 128.0 / 225.0).abs() < 1e-14);
        assert!((w[4] - 0.236_926_885_056_189).abs() < 1e-14);
    }

    #[test]
    fn weights_sum_to_interval_length() {
        for n in 1..12 {
            let g = GaussLegendre::new(n).unwrap();
            let s: f64 = g.on_interval(-3.0, 4.5).map(|(_, w)| w).sum();
            assert!((s - 7.5).abs() < 1e-12, "n = {n}");
        }
    }

    #[test]
    fn five_points_integrate_degree_nine() {
        let g = GaussLegendre::new(5).unwrap();
        let v = g.integrate(0.0, 1.0, |x| x.powi(9));
        assert!((v - 0.1).abs() / 0.1 < 1e-10);
    }

    #[test]
    fn zero_points_rejected() {
        assert!(GaussLegendre::new(0).is_err());
    }
}
