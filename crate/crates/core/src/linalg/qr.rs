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

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::matrix::{dot, Matrix};

/// Least-squares solution of `A·X = B` for a tall, full-column-rank `A`,
/// via Householder QR.
pub fn lstsq(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    let (m, n) = a.shape();
    assert!(m >= n, "lstsq needs a tall matrix");
    assert_eq!(b.rows(), m);
    // Column-major working copies.
    let mut cols: Vec<Vec<f64>> = (0..n).map(|j| a.column(j)).collect();
    let mut rhs: Vec<Vec<f64>> = (0..b.cols()).map(|j| b.column(j)).collect();
    let scale = a.max_abs();
    for k in 0..n {
        let norm = libm::sqrt(cols[k][k..].iter().map(|v| v * v).sum());
        if norm <= f64::EPSILON * scale * m as f64 {
            return Err(Error::Singular("rank-deficient least squares"));
        }
        let alpha = if cols[k][k] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = cols[k][k..].to_vec();
        v[0] -= alpha;
        let vnorm2 = dot(&v, &v);
        if vnorm2 > 0.0 {
            let reflect = |x: &mut [f64]| {
                let f = 2.0 * dot(&v, &x[k..]) / vnorm2;
                for (xi, vi) in x[k..].iter_mut().zip(&v) {
                    *xi -= f * vi;
                }
            };
            for col in cols.iter_mut().skip(k) {
                reflect(col);
            }
            for col in rhs.iter_mut() {
                reflect(col);
            }
        }
    }
    let mut x = Matrix::zeros(n, b.cols());
    for (c, y) in rhs.iter().enumerate() {
        for i in (0..n).rev() {
            let s: f64 = ((i + 1)..n).map(|j| cols[j][i] * x[(j, c)]).sum();
            x[(i, c)] = (y[i] - s) / cols[i][i];
        }
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exact_solution_of_consistent_system() {
        let a = Matrix::from_rows(&[[1.0, 0.0], [1.0, 1.0], [1.0, 2.0], [0.0, 3.0]]);
        let x = Matrix::from_rows(&[[2.0], [-1.0]]);
        let b = a.matmul(&x);
        let got = lstsq(&a, &b).unwrap();
        assert!((&got - &x).max_abs() < 1e-13);
    }

    #[test]
    fn residual_is_orthogonal_to_range() {
        let a = Matrix::from_rows(&[[1.0, 0.0], [1.0, 1.0], [1.0, 2.0]]);
        let b = Matrix::from_rows(&[[1.0], [0.0], [2.0]]);
        let x = lstsq(&a, &b).unwrap();
        let r = &b - &a.matmul(&x);
        assert!(a.tr_matmul(&r).max_abs() < 1e-13);
    }
}
