//! Minimal dense and tridiagonal symmetric solvers.
//!
//! Both factorizations are unpivoted symmetric positive-definite routines;
//! a nonpositive pivot is surfaced as [`Error::SingularSystem`] naming the
//! offending index.

use crate::error::{Error, Result};

/// Dense symmetric matrix, row-major, n x n.
#[derive(Debug, Clone)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn from_fn<F: FnMut(usize, usize) -> f64>(n: usize, mut f: F) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let v = f(i, j);
                data[i * n + j] = v;
                data[j * n + i] = v;
            }
        }
        Self { n, data }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// y = (A + shift I) x
    pub fn mul_shifted(&self, shift: f64, x: &[f64], y: &mut [f64]) {
        let n = self.n;
        for i in 0..n {
            let row = &self.data[i * n..(i + 1) * n];
            let mut acc = 0.0;
            for (a, &xj) in row.iter().zip(x) {
                acc += a * xj;
            }
            y[i] = acc + shift * x[i];
        }
    }
}

/// Unpivoted Cholesky factor L (lower triangular, row-major) of A + shift I.
#[derive(Debug, Clone)]
pub struct Cholesky {
    n: usize,
    l: Vec<f64>,
}

impl Cholesky {
    pub fn factor(a: &SymMatrix, shift: f64) -> Result<Self> {
        let n = a.n;
        let mut l = a.data.clone();
        for i in 0..n {
            l[i * n + i] += shift;
        }
        for j in 0..n {
            let mut d = l[j * n + j];
            for k in 0..j {
                d -= l[j * n + k] * l[j * n + k];
            }
            if d <= 0.0 || !d.is_finite() {
                return Err(Error::SingularSystem { pivot: j, value: d });
            }
            let dj = d.sqrt();
            l[j * n + j] = dj;
            for i in (j + 1)..n {
                let mut s = l[i * n + j];
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k];
                }
                l[i * n + j] = s / dj;
            }
        }
        // zero the strict upper triangle so the factor is self-describing
        for i in 0..n {
            for j in (i + 1)..n {
                l[i * n + j] = 0.0;
            }
        }
        Ok(Self { n, l })
    }

    /// Solve (L L^T) x = b in place.
    pub fn solve_in_place(&self, b: &mut [f64]) {
        let n = self.n;
        for i in 0..n {
            let mut s = b[i];
            for k in 0..i {
                s -= self.l[i * n + k] * b[k];
            }
            b[i] = s / self.l[i * n + i];
        }
        for i in (0..n).rev() {
            let mut s = b[i];
            for k in (i + 1)..n {
                s -= self.l[k * n + i] * b[k];
            }
            b[i] = s / self.l[i * n + i];
        }
    }

    /// Smallest eigenvalue of the factored matrix by inverse power iteration.
    pub fn smallest_eigenvalue(&self, iterations: usize) -> f64 {
        let n = self.n;
        let mut v: Vec<f64> = (0..n).map(|i| 1.0 + (i as f64 * 0.7).sin()).collect();
        let norm = |x: &[f64]| x.iter().map(|t| t * t).sum::<f64>().sqrt();
        let mut lambda = 0.0;
        for _ in 0..iterations {
            let s = norm(&v);
            v.iter_mut().for_each(|t| *t /= s);
            self.solve_in_place(&mut v);
            lambda = 1.0 / norm(&v);
        }
        lambda
    }
}

/// Symmetric tridiagonal matrix: `diag` has length n, `off` length n-1.
#[derive(Debug, Clone)]
pub struct SymTridiag {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl SymTridiag {
    pub fn n(&self) -> usize {
        self.diag.len()
    }

    /// y = A x
    pub fn mul(&self, x: &[f64], y: &mut [f64]) {
        let n = self.n();
        for i in 0..n {
            let mut acc = self.diag[i] * x[i];
            if i > 0 {
                acc += self.off[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                acc += self.off[i] * x[i + 1];
            }
            y[i] = acc;
        }
    }
}

/// LDL^T factorization of a symmetric positive-definite tridiagonal matrix.
#[derive(Debug, Clone)]
pub struct TridiagLdl {
    d: Vec<f64>,
    /// subdiagonal multipliers of unit-lower-bidiagonal L
    e: Vec<f64>,
}

impl TridiagLdl {
    pub fn factor(a: &SymTridiag) -> Result<Self> {
        let n = a.n();
        let mut d = vec![0.0; n];
        let mut e = vec![0.0; n.saturating_sub(1)];
        let mut prev = 0.0f64;
        for i in 0..n {
            let di = a.diag[i] - if i > 0 { a.off[i - 1] * prev } else { 0.0 };
            if di <= 0.0 || !di.is_finite() {
                return Err(Error::SingularSystem {
                    pivot: i,
                    value: di,
                });
            }
            d[i] = di;
            if i + 1 < n {
                let li = a.off[i] / di;
                e[i] = li;
                prev = li;
            }
        }
        Ok(Self { d, e })
    }

    pub fn solve_in_place(&self, b: &mut [f64]) {
        let n = self.d.len();
        for i in 1..n {
            b[i] -= self.e[i - 1] * b[i - 1];
        }
        for i in 0..n {
            b[i] /= self.d[i];
        }
        for i in (0..n - 1).rev() {
            b[i] -= self.e[i] * b[i + 1];
        }
    }

    /// Squared norms of the inverse's columns plus inner products of
    /// adjacent columns:
    /// `P[j] = ||A^-1 e_j||^2`, `Q[j] = <A^-1 e_j, A^-1 e_{j+1}>`.
    ///
    /// Columns are solved four at a time; the interleaved recurrences hide
    /// the per-step latency of a single triangular sweep.
    pub fn inverse_column_stats(&self) -> (Vec<f64>, Vec<f64>) {
        const LANES: usize = 4;
        let n = self.d.len();
        let inv_d: Vec<f64> = self.d.iter().map(|d| 1.0 / d).collect();
        let mut p = vec![0.0; n];
        let mut q = vec![0.0; n.saturating_sub(1)];
        let mut x = vec![[0.0f64; LANES]; n];
        let mut prev_col = vec![0.0f64; n];
        let mut j0 = 0;
        while j0 < n {
            let lanes = LANES.min(n - j0);
            for row in x.iter_mut().skip(j0) {
                *row = [0.0; LANES];
            }
            for l in 0..lanes {
                x[j0 + l][l] = 1.0;
            }
            // forward with unit lower bidiagonal L; rows above j0 are zero
            for i in (j0 + 1)..n {
                let m = self.e[i - 1];
                let prev = x[i - 1];
                let row = &mut x[i];
                for l in 0..LANES {
                    row[l] -= m * prev[l];
                }
            }
            for i in j0..n {
                let s = inv_d[i];
                for l in 0..LANES {
                    x[i][l] *= s;
                }
            }
            // backward with L^T; rows above j0 start from exact zeros, so
            // assignment replaces whatever the previous block left there
            for i in (0..n.saturating_sub(1)).rev() {
                let m = self.e[i];
                let next = x[i + 1];
                let row = &mut x[i];
                if i >= j0 {
                    for l in 0..LANES {
                        row[l] -= m * next[l];
                    }
                } else {
                    for l in 0..LANES {
                        row[l] = -m * next[l];
                    }
                }
            }
            for l in 0..lanes {
                let mut ss = 0.0;
                for row in &x {
                    ss += row[l] * row[l];
                }
                p[j0 + l] = ss;
            }
            for l in 0..lanes.saturating_sub(1) {
                let mut dot = 0.0;
                for row in &x {
                    dot += row[l] * row[l + 1];
                }
                q[j0 + l] = dot;
            }
            if j0 > 0 {
                let mut dot = 0.0;
                for (row, pc) in x.iter().zip(&prev_col) {
                    dot += row[0] * pc;
                }
                q[j0 - 1] = dot;
            }
            for (row, pc) in x.iter().zip(prev_col.iter_mut()) {
                *pc = row[lanes - 1];
            }
            j0 += lanes;
        }
        (p, q)
    }
}
