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


#![allow(dead_code)]

use lqrlr_core::linalg::{spectral_abscissa, Lu};
use lqrlr_core::lqr::{lqr_cost, solve_standard_lqr};
use lqrlr_core::{is_stabilizing, Matrix, StateSpaceModel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| rng.random_range(-1.0..1.0))
}

/// Random matrix shifted so its spectral abscissa is in `[-1.5, -0.5]`.
pub fn random_stable(rng: &mut impl Rng, n: usize) -> Matrix {
    let a = random_matrix(rng, n, n);
    let shift = spectral_abscissa(&a).unwrap() + rng.random_range(0.5..1.5);
    &a - &Matrix::identity(n).scale(shift)
}

pub fn random_spd(rng: &mut impl Rng, n: usize) -> Matrix {
    let g = random_matrix(rng, n, n);
    let mut s = g.matmul_tr(&g);
    s += &Matrix::identity(n).scale(0.5);
    s
}

/// Random model whose open loop may be unstable; `Q`, `R` positive definite.
pub fn random_model(rng: &mut impl Rng, n: usize, m: usize) -> StateSpaceModel {
    let a = random_matrix(rng, n, n);
    let b1 = random_matrix(rng, n, m);
    let b2 = random_matrix(rng, n, m.max(1));
    StateSpaceModel::new(a, b1, b2, random_spd(rng, n), random_spd(rng, m)).unwrap()
}

/// A random stabilizing gain around the LQR optimum whose cost stays within
/// twice the optimum; the perturbation is halved until that holds.
pub fn random_stabilizing_gain(rng: &mut impl Rng, model: &StateSpaceModel, offset: f64) -> Matrix {
    let sol = solve_standard_lqr(model).unwrap();
    let mut scale = offset;
    loop {
        let k = &sol.k + &random_matrix(rng, model.m(), model.n()).scale(scale);
        if is_stabilizing(model, &k).unwrap() && lqr_cost(model, &k).unwrap().j <= 2.0 * sol.cost {
            return k;
        }
        scale *= 0.5;
    }
}

/// Dense solve of `AᵀP + PA + W = 0` through `(I⊗Aᵀ + Aᵀ⊗I)vec(P) = −vec(W)`.
pub fn kronecker_lyapunov(a: &Matrix, w: &Matrix) -> Matrix {
    let n = a.rows();
    // Row-major vec(P): entry (i, j) at i·n + j, so
    // (AᵀP)_ij = Σ_k A_ki P_kj and (PA)_ij = Σ_k P_ik A_kj.
    let op = Matrix::from_fn(n * n, n * n, |row, col| {
        let (i, j) = (row / n, row % n);
        let (k, l) = (col / n, col % n);
        let mut v = 0.0;
        if l == j {
            v += a[(k, i)];
        }
        if k == i {
            v += a[(l, j)];
        }
        v
    });
    let rhs: Vec<f64> = w.as_slice().iter().map(|x| -x).collect();
    let x = Lu::new(&op).unwrap().solve_vec(&rhs);
    Matrix::from_vec(n, n, x).unwrap()
}

pub fn rel_diff(a: &Matrix, b: &Matrix) -> f64 {
    (a - b).frobenius_norm() / b.frobenius_norm().max(f64::MIN_POSITIVE)
}

/// Random orthogonal matrix from the Q factor of Gram-Schmidt.
pub fn random_orthogonal(rng: &mut impl Rng, n: usize) -> Matrix {
    let g = random_matrix(rng, n, n);
    let mut cols: Vec<Vec<f64>> = Vec::new();
    for j in 0..n {
        let mut v = g.column(j);
        for q in &cols {
            let d: f64 = v.iter().zip(q).map(|(a, b)| a * b).sum();
            v.iter_mut().zip(q).for_each(|(a, b)| *a -= d * b);
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= norm);
        cols.push(v);
    }
    Matrix::from_fn(n, n, |i, j| cols[j][i])
}
