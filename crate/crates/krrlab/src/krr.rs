//! Kernel ridge regression in representer form.
//!
//! The regularized system is `(K + n lambda I) w = y` — the `n lambda`
//! convention of the matrix closed form; every `theta` scaling
//! `lambda = c n^-theta` elsewhere in the crate refers to this `lambda`.
//!
//! Two factorization routes sit behind [`solve`]:
//!
//! * the min kernel on sorted, strictly positive, separated points has a
//!   tridiagonal Gram inverse (Markov structure of the first-order spline
//!   kernel), so `(K + n lambda I) w = y` is rewritten as
//!   `(I + n lambda K^-1) w = K^-1 y` and factored as a symmetric
//!   positive-definite tridiagonal LDL^T — O(n) per solve;
//! * every other case builds the dense Gram and takes an unpivoted Cholesky.
//!
//! Both routes run fixed-count iterative refinement against the original
//! system and record the achieved relative reproduction residual.

use std::sync::Arc;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::kernel::{KernelKind, KernelSpec};
use crate::linalg::{Cholesky, SymMatrix, SymTridiag, TridiagLdl};
use crate::quad::QuadratureRule;
use crate::seeding::{StreamKind, TrialKey};
use crate::target::TargetSpec;

/// Minimum pairwise separation of design points.
pub const SEPARATION: f64 = 1e-12;

/// Relative reproduction residual every factorization must meet.
pub const RESIDUAL_TOLERANCE: f64 = 1e-10;

/// Sampled inputs plus the noise level and the RNG identity of the trial.
#[derive(Debug, Clone)]
pub struct Design {
    points: Arc<Vec<f64>>,
    sigma2: f64,
    key: TrialKey,
}

impl Design {
    /// Draw n i.i.d. uniform points on [0, 1] from the trial's design
    /// stream. Points are stored sorted; draws that collide within the
    /// separation threshold (or sit at the singular boundary x = 0) are
    /// replaced by fresh draws from the same stream.
    pub fn sample(n: usize, sigma2: f64, key: TrialKey) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyDesign);
        }
        if sigma2 < 0.0 || !sigma2.is_finite() {
            return Err(Error::InvalidParameter {
                name: "sigma2",
                reason: format!("noise variance must be finite and >= 0, got {sigma2}"),
            });
        }
        let mut rng = key.rng(StreamKind::Design);
        let mut points: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
        loop {
            points.sort_by(|a, b| a.partial_cmp(b).expect("uniform draws are never NaN"));
            let mut bad = None;
            if points[0] <= SEPARATION {
                bad = Some(0);
            } else {
                for i in 1..n {
                    if points[i] - points[i - 1] <= SEPARATION {
                        bad = Some(i);
                        break;
                    }
                }
            }
            match bad {
                Some(i) => points[i] = rng.gen::<f64>(),
                None => break,
            }
        }
        Ok(Self {
            points: Arc::new(points),
            sigma2,
            key,
        })
    }

    /// Build a design from explicit points (sorted internally). Rejects
    /// points outside [0, 1] and pairs closer than the separation threshold.
    pub fn from_points(points: Vec<f64>, sigma2: f64, key: TrialKey) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyDesign);
        }
        let mut sorted = points;
        for &x in &sorted {
            if !(0.0..=1.0).contains(&x) {
                return Err(Error::PointOutOfDomain(x));
            }
        }
        sorted.sort_by(|a, b| a.partial_cmp(b).expect("points must not be NaN"));
        for w in sorted.windows(2) {
            if w[1] - w[0] <= SEPARATION {
                return Err(Error::InvalidParameter {
                    name: "points",
                    reason: format!(
                        "points {} and {} are closer than {SEPARATION:e}",
                        w[0], w[1]
                    ),
                });
            }
        }
        Ok(Self {
            points: Arc::new(sorted),
            sigma2,
            key,
        })
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    /// Sorted sample points.
    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    pub fn key(&self) -> TrialKey {
        self.key
    }

    /// Noiseless labels f*(x_i).
    pub fn noiseless_labels(&self, target: &TargetSpec) -> Vec<f64> {
        target.values_on(&self.points)
    }
}

/// y_i = f*(x_i) + eps_i with eps i.i.d. N(0, sigma2), drawn from the
/// trial's label stream.
pub fn sample_labels(design: &Design, target: &TargetSpec) -> Vec<f64> {
    let mut y = design.noiseless_labels(target);
    if design.sigma2 > 0.0 {
        let sd = design.sigma2.sqrt();
        let mut rng = design.key.rng(StreamKind::Labels);
        for v in y.iter_mut() {
            let eps: f64 = rng.sample(StandardNormal);
            *v += sd * eps;
        }
    }
    y
}

pub(crate) enum Factor {
    /// `A = I + n lambda K^-1` with `K^-1` the second-difference tridiagonal.
    MinTridiag {
        inverse_gram: SymTridiag,
        ldl: Option<TridiagLdl>, // None at lambda = 0 where A = I
    },
    Dense {
        gram: SymMatrix,
        chol: Cholesky,
    },
}

/// One factored ridge system `(K + n lambda I)`; shared by the data-fitted
/// solution, the conditional mean and the variance profile.
pub struct RidgeSystem {
    kernel: KernelSpec,
    points: Arc<Vec<f64>>,
    lambda: f64,
    n_lambda: f64,
    factor: Factor,
}

impl RidgeSystem {
    pub fn new(kernel: &KernelSpec, design: &Design, lambda: f64) -> Result<Self> {
        if lambda < 0.0 || !lambda.is_finite() {
            return Err(Error::InvalidParameter {
                name: "lambda",
                reason: format!("regularization must be finite and >= 0, got {lambda}"),
            });
        }
        let points = Arc::clone(&design.points);
        let n = points.len();
        let n_lambda = n as f64 * lambda;

        let fast_eligible = kernel.kind() == KernelKind::ClosedFormMin
            && points[0] > 0.0
            && points.windows(2).all(|w| w[1] > w[0]);

        let factor = if fast_eligible {
            let inverse_gram = min_kernel_inverse_gram(&points);
            let ldl = if n_lambda > 0.0 {
                let shifted = SymTridiag {
                    diag: inverse_gram
                        .diag
                        .iter()
                        .map(|d| 1.0 + n_lambda * d)
                        .collect(),
                    off: inverse_gram.off.iter().map(|o| n_lambda * o).collect(),
                };
                Some(TridiagLdl::factor(&shifted)?)
            } else {
                None
            };
            Factor::MinTridiag { inverse_gram, ldl }
        } else {
            let gram = kernel.gram(&points)?;
            let chol = Cholesky::factor(&gram, n_lambda)?;
            Factor::Dense { gram, chol }
        };

        Ok(Self {
            kernel: kernel.clone(),
            points,
            lambda,
            n_lambda,
            factor,
        })
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn kernel(&self) -> &KernelSpec {
        &self.kernel
    }

    /// y = (K + n lambda I) w
    fn apply(&self, w: &[f64], out: &mut [f64]) {
        match &self.factor {
            Factor::MinTridiag { .. } => {
                // (K w)_i = sum_{x_j <= x_i} x_j w_j + x_i sum_{x_j > x_i} w_j
                let n = w.len();
                let mut prefix = 0.0;
                let total: f64 = w.iter().sum();
                let mut running = 0.0;
                for i in 0..n {
                    running += self.points[i] * w[i];
                    prefix += w[i];
                    out[i] = running + self.points[i] * (total - prefix);
                }
                for i in 0..n {
                    out[i] += self.n_lambda * w[i];
                }
            }
            Factor::Dense { gram, .. } => gram.mul_shifted(self.n_lambda, w, out),
        }
    }

    fn solve_raw(&self, b: &[f64], out: &mut Vec<f64>) {
        match &self.factor {
            Factor::MinTridiag { inverse_gram, ldl } => {
                out.resize(b.len(), 0.0);
                inverse_gram.mul(b, out);
                if let Some(ldl) = ldl {
                    ldl.solve_in_place(out);
                }
            }
            Factor::Dense { chol, .. } => {
                out.clear();
                out.extend_from_slice(b);
                chol.solve_in_place(out);
            }
        }
    }

    /// Solve `(K + n lambda I) w = b` with iterative refinement; returns the
    /// weights and the achieved relative reproduction residual.
    pub fn solve_vec(&self, b: &[f64]) -> (Vec<f64>, f64) {
        let n = b.len();
        let norm_b = b.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm_b == 0.0 {
            return (vec![0.0; n], 0.0);
        }
        let mut w = Vec::with_capacity(n);
        self.solve_raw(b, &mut w);
        let mut residual = vec![0.0; n];
        let mut correction = Vec::with_capacity(n);
        let mut rel = f64::INFINITY;
        for _ in 0..4 {
            self.apply(&w, &mut residual);
            for i in 0..n {
                residual[i] = b[i] - residual[i];
            }
            rel = residual.iter().map(|v| v * v).sum::<f64>().sqrt() / norm_b;
            if rel <= 1e-13 {
                break;
            }
            self.solve_raw(&residual, &mut correction);
            for i in 0..n {
                w[i] += correction[i];
            }
        }
        // residual after the last correction, if we did not early-exit
        if rel > 1e-13 {
            self.apply(&w, &mut residual);
            for i in 0..n {
                residual[i] = b[i] - residual[i];
            }
            rel = residual.iter().map(|v| v * v).sum::<f64>().sqrt() / norm_b;
        }
        (w, rel)
    }

    /// Per-node squared norm of `(K + n lambda I)^-1 k(X, x)` on the
    /// quadrature grid — the integrand of the variance term (up to sigma^2).
    pub fn variance_profile(&self, quad: &QuadratureRule) -> Vec<f64> {
        let nodes = quad.nodes();
        let n = self.points.len();
        match &self.factor {
            Factor::MinTridiag { ldl, .. } => {
                // For sorted points, K^-1 k(X, x) has at most two nonzero
                // entries (hat coordinates of x in the design partition), so
                // the profile needs only the squared norms of adjacent
                // columns of A^-1 and their inner products.
                let (col_sq, adj) = match ldl {
                    None => (vec![1.0; n], vec![0.0; n.saturating_sub(1)]),
                    Some(ldl) => ldl.inverse_column_stats(),
                };
                let points = &self.points;
                let mut seg = 0usize; // index of first point > node
                nodes
                    .iter()
                    .map(|&x| {
                        while seg < n && points[seg] <= x {
                            seg += 1;
                        }
                        if seg == 0 {
                            let t = x / points[0];
                            t * t * col_sq[0]
                        } else if seg == n {
                            col_sq[n - 1]
                        } else {
                            let lo = points[seg - 1];
                            let hi = points[seg];
                            let t = (x - lo) / (hi - lo);
                            let a = 1.0 - t;
                            a * a * col_sq[seg - 1]
                                + 2.0 * a * t * adj[seg - 1]
                                + t * t * col_sq[seg]
                        }
                    })
                    .collect()
            }
            Factor::Dense { chol, .. } => {
                let mut kvec = vec![0.0; n];
                nodes
                    .iter()
                    .map(|&x| {
                        for (j, &p) in self.points.iter().enumerate() {
                            kvec[j] = self.kernel.eval_unchecked(p, x);
                        }
                        chol.solve_in_place(&mut kvec);
                        kvec.iter().map(|v| v * v).sum()
                    })
                    .collect()
            }
        }
    }
}

/// A solved ridge system: weights plus the (opaque) factorization handle.
pub struct RidgeSolution {
    weights: Vec<f64>,
    lambda: f64,
    rel_residual: f64,
    system: Arc<RidgeSystem>,
}

impl RidgeSolution {
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Relative residual of `(K + n lambda I) w = y` achieved by the solve.
    pub fn rel_residual(&self) -> f64 {
        self.rel_residual
    }

    pub fn system(&self) -> &RidgeSystem {
        &self.system
    }

    /// Predictor value at one point.
    pub fn predict(&self, x: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::PointOutOfDomain(x));
        }
        let points = self.system.points();
        Ok(match self.system.kernel.kind() {
            KernelKind::ClosedFormMin => {
                let mut acc = 0.0;
                for (w, &p) in self.weights.iter().zip(points) {
                    acc += w * p.min(x);
                }
                acc
            }
            KernelKind::SpectralTruncated => {
                let mut acc = 0.0;
                for (w, &p) in self.weights.iter().zip(points) {
                    acc += w * self.system.kernel.eval_unchecked(p, x);
                }
                acc
            }
        })
    }

    /// Predictor values on an ascending grid (e.g. quadrature nodes).
    pub fn predict_on(&self, xs: &[f64]) -> Vec<f64> {
        let points = self.system.points();
        let n = points.len();
        match self.system.kernel.kind() {
            KernelKind::ClosedFormMin => {
                debug_assert!(xs.windows(2).all(|w| w[1] >= w[0]));
                // prefix sums: f(x) = sum_{p <= x} w p + x sum_{p > x} w
                let total: f64 = self.weights.iter().sum();
                let mut seg = 0usize;
                let mut prefix_wp = 0.0;
                let mut prefix_w = 0.0;
                xs.iter()
                    .map(|&x| {
                        while seg < n && points[seg] <= x {
                            prefix_wp += self.weights[seg] * points[seg];
                            prefix_w += self.weights[seg];
                            seg += 1;
                        }
                        prefix_wp + x * (total - prefix_w)
                    })
                    .collect()
            }
            KernelKind::SpectralTruncated => {
                // expansion coefficients: c_i = eigenvalue_i sum_j w_j e_i(x_j)
                let sys = self.system.kernel.eigensystem();
                let m = sys.truncation();
                let mut coeffs = vec![0.0; m];
                for (w, &p) in self.weights.iter().zip(points) {
                    let basis = sys.basis();
                    let (mut s, mut c) = (basis.frequency(1) * p).sin_cos();
                    let (rs, rc) = (basis.frequency_step() * p).sin_cos();
                    for (idx, coeff) in coeffs.iter_mut().enumerate() {
                        if idx > 0 {
                            let ns = s * rc + c * rs;
                            let nc = c * rc - s * rs;
                            s = ns;
                            c = nc;
                        }
                        *coeff += w * std::f64::consts::SQRT_2 * s;
                    }
                }
                for (idx, coeff) in coeffs.iter_mut().enumerate() {
                    *coeff *= sys.eigenvalue(idx + 1);
                }
                sys.basis().accumulate_series(&coeffs, xs)
            }
        }
    }

    /// In-sample fitted values `(K w)_i`.
    pub fn fitted_values(&self) -> Vec<f64> {
        let n = self.weights.len();
        let mut out = vec![0.0; n];
        self.system.apply(&self.weights, &mut out);
        for (o, w) in out.iter_mut().zip(&self.weights) {
            *o -= self.system.n_lambda * w;
        }
        out
    }
}

/// `K^-1` of the min kernel on sorted positive points: the symmetric
/// second-difference tridiagonal with gap reciprocals.
fn min_kernel_inverse_gram(points: &[f64]) -> SymTridiag {
    let n = points.len();
    let mut inv_gap = Vec::with_capacity(n);
    inv_gap.push(1.0 / points[0]);
    for i in 1..n {
        inv_gap.push(1.0 / (points[i] - points[i - 1]));
    }
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n.saturating_sub(1)];
    for i in 0..n {
        diag[i] = inv_gap[i] + if i + 1 < n { inv_gap[i + 1] } else { 0.0 };
        if i + 1 < n {
            off[i] = -inv_gap[i + 1];
        }
    }
    SymTridiag { diag, off }
}

/// Solve kernel ridge regression: weights `(K + n lambda I)^-1 y`.
pub fn solve(
    kernel: &KernelSpec,
    design: &Design,
    y: &[f64],
    lambda: f64,
) -> Result<RidgeSolution> {
    let system = Arc::new(RidgeSystem::new(kernel, design, lambda)?);
    solve_with_system(system, y)
}

pub(crate) fn solve_with_system(system: Arc<RidgeSystem>, y: &[f64]) -> Result<RidgeSolution> {
    if y.len() != system.n() {
        return Err(Error::InvalidParameter {
            name: "y",
            reason: format!(
                "label count {} does not match design size {}",
                y.len(),
                system.n()
            ),
        });
    }
    let (weights, rel_residual) = system.solve_vec(y);
    Ok(RidgeSolution {
        weights,
        lambda: system.lambda(),
        rel_residual,
        system,
    })
}

/// The noise-conditional mean of the ridge estimator: identical to [`solve`]
/// with the labels replaced by the noiseless values f*(X).
pub fn conditional_mean_solution(
    kernel: &KernelSpec,
    design: &Design,
    target: &TargetSpec,
    lambda: f64,
) -> Result<RidgeSolution> {
    let y = design.noiseless_labels(target);
    solve(kernel, design, &y, lambda)
}
