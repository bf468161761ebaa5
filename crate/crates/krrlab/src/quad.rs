//! Composite Simpson quadrature on [0, 1].
//!
//! All exact risk integrals in this crate are computed with this rule, with
//! the node count tied to the sample size (`N = max(8193, 4n+1)` rounded up
//! to odd) so that the grid always resolves the design.

use crate::error::{Error, Result};

/// Default minimum node count; gives ~1e-10 error on the smooth-by-parts
/// integrands that appear here.
pub const DEFAULT_MIN_NODES: usize = 8193;

/// Composite Simpson rule with `nodes` equispaced points on [0, 1].
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    /// Build a composite Simpson rule with an odd number of nodes (>= 3).
    pub fn simpson(nodes: usize) -> Result<Self> {
        if nodes < 3 || nodes % 2 == 0 {
            return Err(Error::InvalidParameter {
                name: "nodes",
                reason: format!("composite Simpson needs an odd node count >= 3, got {nodes}"),
            });
        }
        let h = 1.0 / (nodes - 1) as f64;
        let xs: Vec<f64> = (0..nodes).map(|q| q as f64 * h).collect();
        let mut ws = vec![0.0; nodes];
        ws[0] = h / 3.0;
        ws[nodes - 1] = h / 3.0;
        for (q, w) in ws.iter_mut().enumerate().take(nodes - 1).skip(1) {
            *w = if q % 2 == 1 {
                4.0 * h / 3.0
            } else {
                2.0 * h / 3.0
            };
        }
        Ok(Self {
            nodes: xs,
            weights: ws,
        })
    }

    /// Default rule for a design of size `n`: `max(8193, 4n+1)` nodes,
    /// rounded up to odd.
    pub fn for_sample_size(n: usize) -> Self {
        let mut nodes = DEFAULT_MIN_NODES.max(4 * n + 1);
        if nodes % 2 == 0 {
            nodes += 1;
        }
        Self::simpson(nodes).expect("node policy always yields an odd count >= 3")
    }

    /// Same rule with the panel count doubled (grid-convergence checks).
    pub fn refined(&self) -> Self {
        Self::simpson(2 * self.len() - 1).expect("refinement preserves oddness")
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Ensure the rule is fine enough for a design of size `n` (N >= 4n+1).
    pub fn check_resolves(&self, n: usize) -> Result<()> {
        let required = 4 * n + 1;
        if self.len() < required {
            return Err(Error::QuadratureTooCoarse {
                nodes: self.len(),
                required,
                n,
            });
        }
        Ok(())
    }

    /// Integrate a function over [0, 1].
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        let values: Vec<f64> = self.nodes.iter().map(|&x| f(x)).collect();
        self.integrate_values(&values)
    }

    /// Integrate from per-node values, accumulating in fixed index order
    /// (Neumaier compensation) for bitwise reproducibility.
    pub fn integrate_values(&self, values: &[f64]) -> f64 {
        assert_eq!(values.len(), self.len(), "value grid does not match rule");
        let mut sum = 0.0f64;
        let mut comp = 0.0f64;
        for (w, v) in self.weights.iter().zip(values) {
            let term = w * v;
            let t = sum + term;
            if sum.abs() >= term.abs() {
                comp += (sum - t) + term;
            } else {
                comp += (term - t) + sum;
            }
            sum = t;
        }
        sum + comp
    }

    /// Quadrature inner product of two value grids.
    pub fn inner_product(&self, a: &[f64], b: &[f64]) -> f64 {
        assert_eq!(a.len(), self.len());
        assert_eq!(b.len(), self.len());
        let values: Vec<f64> = a.iter().zip(b).map(|(x, y)| x * y).collect();
        self.integrate_values(&values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_one() {
        for nodes in [3, 9, 8193] {
            let q = QuadratureRule::simpson(nodes).unwrap();
            let total = q.integrate_values(&vec![1.0; nodes]);
            assert!((total - 1.0).abs() < 1e-15, "sum {total:e} at N={nodes}");
            assert!(q.weights().iter().all(|&w| w > 0.0));
        }
    }

    #[test]
    fn integrates_linear_exactly() {
        let q = QuadratureRule::simpson(8193).unwrap();
        assert!((q.integrate(|x| x) - 0.5).abs() < 1e-14);
    }

    #[test]
    fn integrates_smooth_functions() {
        let q = QuadratureRule::simpson(8193).unwrap();
        let got = q.integrate(|x| (2.0 * std::f64::consts::PI * x).cos().powi(2));
        assert!((got - 0.5).abs() < 1e-12);
        let cubic = q.integrate(|x| x * x * x);
        assert!((cubic - 0.25).abs() < 1e-14, "Simpson is exact on cubics");
    }

    #[test]
    fn even_or_tiny_node_counts_rejected() {
        assert!(QuadratureRule::simpson(4).is_err());
        assert!(QuadratureRule::simpson(1).is_err());
    }

    #[test]
    fn node_policy_tracks_sample_size() {
        assert_eq!(QuadratureRule::for_sample_size(100).len(), 8193);
        assert_eq!(QuadratureRule::for_sample_size(5000).len(), 20001);
        let q = QuadratureRule::for_sample_size(2048);
        assert!(q.len() % 2 == 1 && q.len() >= 8193);
        assert!(q.check_resolves(2048).is_ok());
        assert!(QuadratureRule::simpson(101)
            .unwrap()
            .check_resolves(100)
            .is_err());
    }

    #[test]
    fn refinement_changes_smooth_integrals_little() {
        let q = QuadratureRule::simpson(8193).unwrap();
        let f = |x: f64| (3.0 * x).sin() * (-x).exp();
        let coarse = q.integrate(f);
        let fine = q.refined().integrate(f);
        assert!((coarse - fine).abs() < 1e-12);
    }
}
