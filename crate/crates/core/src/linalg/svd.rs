// Copyright 2026 The lqrlr Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::matrix::{dot, Matrix};

/// Thin SVD `M = U·diag(s)·Vᵀ` with `k = min(rows, cols)` singular triplets.
#[derive(Debug, Clone)]
pub struct Svd {
    /// `rows × k`, orthonormal columns.
    pub u: Matrix,
    /// Non-negative, descending.
    pub s: Vec<f64>,
    /// `cols × k`, orthonormal columns.
    pub v: Matrix,
}

impl Svd {
    /// `U_{1:r}·diag(f(σ_1..σ_r))·V_{1:r}ᵀ`, skipping zeroed values.
    pub fn recompose_with(&self, rank: usize, f: impl Fn(f64) -> f64) -> Matrix {
        let mut out = Matrix::zeros(self.u.rows(), self.v.rows());
        for k in 0..rank.min(self.s.len()) {
            let sk = f(self.s[k]);
            if sk == 0.0 {
                continue;
            }
            for i in 0..out.rows() {
                let ui = self.u[(i, k)] * sk;
                if ui == 0.0 {
                    continue;
                }
                for j in 0..out.cols() {
                    out[(i, j)] += ui * self.v[(j, k)];
                }
            }
        }
        out
    }

    pub fn recompose(&self) -> Matrix {
        self.recompose_with(self.s.len(), |s| s)
    }

    /// Number of singular values above `rel_tol · σ_max`.
    pub fn numerical_rank(&self, rel_tol: f64) -> usize {
        let cutoff = self.s.first().copied().unwrap_or(0.0) * rel_tol;
        self.s.iter().filter(|&&s| s > cutoff && s > 0.0).count()
    }
}

const MAX_SWEEPS: usize = 80;

/// One-sided (Hestenes) Jacobi SVD. Deterministic: identical inputs give
/// bitwise-identical factors.
pub fn svd(m: &Matrix) -> Result<Svd> {
    if m.rows() < m.cols() {
        let t = svd(&m.transpose())?;
        return Ok(Svd {
            u: t.v,
            s: t.s,
            v: t.u,
        });
    }
    let (rows, cols) = m.shape();
    let mut a: Vec<Vec<f64>> = (0..cols).map(|j| m.column(j)).collect();
    let mut v: Vec<Vec<f64>> = (0..cols)
        .map(|j| {
            let mut e = vec![0.0; cols];
            e[j] = 1.0;
            e
        })
        .collect();

    // Columns below this norm² are treated as exact zeros; rotating against
    // them only churns rounding noise.
    let frob2: f64 = a.iter().map(|c| dot(c, c)).sum();
    let negligible = frob2 * f64::EPSILON * f64::EPSILON * 1e-4;
    let tol = f64::EPSILON * rows as f64;
    let mut converged = cols < 2;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let mut rotated = false;
        for p in 0..cols {
            for q in (p + 1)..cols {
                let alpha = dot(&a[p], &a[p]);
                let beta = dot(&a[q], &a[q]);
                let gamma = dot(&a[p], &a[q]);
                if alpha <= negligible
                    || beta <= negligible
                    || gamma.abs() <= tol * libm::sqrt(alpha) * libm::sqrt(beta)
                {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + libm::hypot(1.0, zeta));
                let c = 1.0 / libm::hypot(1.0, t);
                let s = c * t;
                rotate(&mut a, p, q, c, s);
                rotate(&mut v, p, q, c, s);
            }
        }
        converged = !rotated;
    }
    if !converged {
        return Err(Error::SvdConvergence { rows, cols });
    }

    let norms: Vec<f64> = a.iter().map(|col| libm::sqrt(dot(col, col))).collect();
    let mut order: Vec<usize> = (0..cols).collect();
    // Stable sort keeps the deterministic column order on ties.
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));

    let mut u = Matrix::zeros(rows, cols);
    let mut vm = Matrix::zeros(cols, cols);
    let mut s = Vec::with_capacity(cols);
    let mut null_cols = Vec::new();
    for (k, &j) in order.iter().enumerate() {
        let sigma = norms[j];
        for i in 0..cols {
            vm[(i, k)] = v[j][i];
        }
        if sigma * sigma > negligible && sigma > f64::MIN_POSITIVE {
            s.push(sigma);
            for i in 0..rows {
                u[(i, k)] = a[j][i] / sigma;
            }
        } else {
            s.push(0.0);
            null_cols.push(k);
        }
    }
    complete_orthonormal(&mut u, &null_cols);
    Ok(Svd { u, s, v: vm })
}

fn rotate(cols: &mut [Vec<f64>], p: usize, q: usize, c: f64, s: f64) {
    let (head, tail) = cols.split_at_mut(q);
    let (cp, cq) = (&mut head[p], &mut tail[0]);
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let (xp, xq) = (*x, *y);
        *x = c * xp - s * xq;
        *y = s * xp + c * xq;
    }
}

/// Fills the listed (zero) columns of `u` with unit vectors orthogonal to
/// every other column, by Gram-Schmidt over the standard basis.
fn complete_orthonormal(u: &mut Matrix, missing: &[usize]) {
    if missing.is_empty() {
        return;
    }
    let rows = u.rows();
    let mut filled: Vec<usize> = (0..u.cols()).filter(|k| !missing.contains(k)).collect();
    let mut candidate = 0;
    for &k in missing {
        loop {
            assert!(candidate < rows, "orthonormal completion ran out of basis vectors");
            let mut w = vec![0.0; rows];
            w[candidate] = 1.0;
            candidate += 1;
            for _ in 0..2 {
                for &f in &filled {
                    let col = u.column(f);
                    let proj = dot(&col, &w);
                    for (wi, ci) in w.iter_mut().zip(&col) {
                        *wi -= proj * ci;
                    }
                }
            }
            let norm = libm::sqrt(dot(&w, &w));
            if norm > 0.5 {
                for i in 0..rows {
                    u[(i, k)] = w[i] / norm;
                }
                filled.push(k);
                break;
            }
        }
    }
}
