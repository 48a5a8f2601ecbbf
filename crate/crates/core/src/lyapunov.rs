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

//! Continuous-time Lyapunov equations.
//!
//! [`LyapunovSolver`] factors a closed-loop matrix once (real Schur form,
//! which also yields the stability verdict) and then solves both the primal
//! equation `AᵀP + P·A + W = 0` and the dual `A·L + L·Aᵀ + W = 0` for any
//! number of right-hand sides. Small systems use the dense Kronecker form;
//! larger ones a Bartels-Stewart back-substitution on the quasi-triangular
//! factor. Both paths meet [`residual_bound`].

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{real_schur, Lu, SchurForm};
use crate::matrix::Matrix;

/// Largest dimension solved through the dense `n² × n²` Kronecker system.
pub const KRONECKER_MAX_DIM: usize = 8;

/// One correction is always applied so the solution is a smooth function
/// of the data (finite differences of the cost rely on it); the second
/// runs only while the residual is above a tenth of the acceptance bound.
const REFINEMENT_STEPS: usize = 2;

/// Arithmetic used for the refinement residual.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Precision {
    /// Plain `f64`; forward error grows with the conditioning of `A`.
    #[default]
    Working,
    /// Residual accumulated in double-double. About twice the cost of a
    /// solve, but the result is accurate close to the last bit even for
    /// poorly damped `A`.
    Extended,
}

/// `‖AᵀP + PA + W‖_F` acceptance threshold.
pub fn residual_bound(a: &Matrix, w: &Matrix, p: &Matrix) -> f64 {
    1e-10 * (w.frobenius_norm() + 2.0 * a.frobenius_norm() * p.frobenius_norm())
}

/// `AᵀP + PA + W`
pub fn primal_residual(a: &Matrix, w: &Matrix, p: &Matrix) -> Matrix {
    let mut r = a.tr_matmul(p);
    r += &p.matmul(a);
    r += w;
    r
}

/// `AᵀP + PA + W` with every entry accumulated in double-double, so the
/// correction step sees the residual of the stored `P` rather than noise.
fn compensated_residual(a: &Matrix, w: &Matrix, p: &Matrix) -> Matrix {
    let n = a.rows();
    Matrix::from_fn(n, n, |i, j| {
        let mut acc = Compensated::new(w[(i, j)]);
        for k in 0..n {
            acc.add_product(a[(k, i)], p[(k, j)]);
            acc.add_product(p[(i, k)], a[(k, j)]);
        }
        acc.value()
    })
}

/// Running sum with an error term (Ogita-Rump-Oishi `Dot2`).
struct Compensated {
    sum: f64,
    err: f64,
}

impl Compensated {
    fn new(x: f64) -> Self {
        Self { sum: x, err: 0.0 }
    }

    fn add_product(&mut self, a: f64, b: f64) {
        let (p, pe) = two_product(a, b);
        let (s, se) = two_sum(self.sum, p);
        self.sum = s;
        self.err += pe + se;
    }

    fn value(&self) -> f64 {
        self.sum + self.err
    }
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

/// Dekker's exact product; no FMA so results do not depend on the target.
fn two_product(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let (ah, al) = split(a);
    let (bh, bl) = split(b);
    (p, ((ah * bh - p) + ah * bl + al * bh) + al * bl)
}

fn split(a: f64) -> (f64, f64) {
    let c = 134_217_729.0 * a;
    let hi = c - (c - a);
    (hi, a - hi)
}

/// Factorization of a Hurwitz matrix for repeated Lyapunov solves.
#[derive(Debug, Clone)]
pub struct LyapunovSolver {
    a: Matrix,
    schur: SchurForm,
    precision: Precision,
}

impl LyapunovSolver {
    /// Fails with [`Error::Unstable`] unless every eigenvalue of `a` has a
    /// strictly negative real part.
    pub fn new(a: &Matrix) -> Result<Self> {
        assert!(a.is_square(), "Lyapunov operator needs a square matrix");
        let schur = real_schur(a)?;
        let abscissa = schur.spectral_abscissa();
        if abscissa >= 0.0 || abscissa.is_nan() {
            return Err(Error::Unstable { abscissa });
        }
        Ok(Self {
            a: a.clone(),
            schur,
            precision: Precision::Working,
        })
    }

    pub fn with_precision(mut self, precision: Precision) -> Self {
        self.precision = precision;
        self
    }

    pub fn dim(&self) -> usize {
        self.a.rows()
    }

    pub fn spectral_abscissa(&self) -> f64 {
        self.schur.spectral_abscissa()
    }

    pub fn schur(&self) -> &SchurForm {
        &self.schur
    }

    /// Solves `AᵀP + P·A + W = 0`; the result is symmetrized when `W` is.
    pub fn solve(&self, w: &Matrix) -> Result<Matrix> {
        self.solve_oriented(w, false)
    }

    /// Solves `A·L + L·Aᵀ + W = 0`.
    pub fn solve_dual(&self, w: &Matrix) -> Result<Matrix> {
        self.solve_oriented(w, true)
    }

    fn solve_oriented(&self, w: &Matrix, dual: bool) -> Result<Matrix> {
        let n = self.dim();
        w.check_shape("Lyapunov right-hand side", n, n)?;
        let op = if dual { self.a.transpose() } else { self.a.clone() };
        let mut x = self.raw_solve(w, dual)?;
        for step in 0..REFINEMENT_STEPS {
            let r = match self.precision {
                Precision::Working => primal_residual(&op, w, &x),
                Precision::Extended => compensated_residual(&op, w, &x),
            };
            if step > 0 && r.frobenius_norm() <= 0.1 * residual_bound(&op, w, &x) {
                break;
            }
            x += &self.raw_solve(&r, dual)?;
        }
        if w.asymmetry() <= 1e-12 * w.max_abs() {
            x = x.symmetrize();
        }
        Ok(x)
    }

    fn raw_solve(&self, w: &Matrix, dual: bool) -> Result<Matrix> {
        if self.dim() <= KRONECKER_MAX_DIM {
            let op = if dual { self.a.transpose() } else { self.a.clone() };
            return kronecker_solve(&op, w);
        }
        let z = &self.schur.z;
        // Zᵀ·W·Z in the Schur basis.
        let c = z.tr_matmul(&w.matmul(z)).scale(-1.0);
        let x = if dual {
            solve_dual_quasi_triangular(&self.schur.t, &c)?
        } else {
            solve_quasi_triangular(&self.schur.t, &c)?
        };
        Ok(z.matmul(&x).matmul_tr(z))
    }
}

/// Solves `AclᵀP + P·Acl + W = 0` for a Hurwitz `Acl`.
pub fn solve_lyapunov_cont(acl: &Matrix, w: &Matrix) -> Result<Matrix> {
    LyapunovSolver::new(acl)?.solve(w)
}

/// Solves `Acl·L + L·Aclᵀ + W = 0` for a Hurwitz `Acl`.
pub fn solve_lyapunov_dual(acl: &Matrix, w: &Matrix) -> Result<Matrix> {
    LyapunovSolver::new(acl)?.solve_dual(w)
}

/// Dense solve of `(I⊗Aᵀ + Aᵀ⊗I)·vec(P) = -vec(W)`.
fn kronecker_solve(a: &Matrix, w: &Matrix) -> Result<Matrix> {
    let n = a.rows();
    let size = n * n;
    let mut op = Matrix::zeros(size, size);
    // Row (i, j) of AᵀP + PA: Σ_k A_ki P_kj + Σ_k P_ik A_kj.
    for i in 0..n {
        for j in 0..n {
            let row = i * n + j;
            for k in 0..n {
                op[(row, k * n + j)] += a[(k, i)];
                op[(row, i * n + k)] += a[(k, j)];
            }
        }
    }
    let lu = Lu::new(&op).map_err(|_| Error::Singular("Lyapunov operator"))?;
    let rhs: Vec<f64> = w.as_slice().iter().map(|v| -v).collect();
    Matrix::from_vec(n, n, lu.solve_vec(&rhs))
}

/// Solves `Tᵀ·X + X·T = C` with `T` upper quasi-triangular, sweeping blocks
/// forward.
fn solve_quasi_triangular(t: &Matrix, c: &Matrix) -> Result<Matrix> {
    let n = t.rows();
    let blocks = crate::linalg::schur_blocks(t);
    let mut x = Matrix::zeros(n, n);
    for &(r0, p) in &blocks {
        for &(c0, q) in &blocks {
            let mut rhs = [[0.0; 2]; 2];
            for a in 0..p {
                let r = r0 + a;
                for b in 0..q {
                    let col = c0 + b;
                    let mut s = c[(r, col)];
                    for k in 0..r0 {
                        s -= t[(k, r)] * x[(k, col)];
                    }
                    for k in 0..c0 {
                        s -= x[(r, k)] * t[(k, col)];
                    }
                    rhs[a][b] = s;
                }
            }
            // T_iiᵀ Y + Y T_jj: coefficient of Y[a'][b'] in equation (a, b).
            let y = solve_small(p, q, &rhs, |a, b, a2, b2| {
                let mut v = 0.0;
                if b == b2 {
                    v += t[(r0 + a2, r0 + a)];
                }
                if a == a2 {
                    v += t[(c0 + b2, c0 + b)];
                }
                v
            })?;
            for a in 0..p {
                for b in 0..q {
                    x[(r0 + a, c0 + b)] = y[a][b];
                }
            }
        }
    }
    Ok(x)
}

/// Solves `T·Y + Y·Tᵀ = C` with `T` upper quasi-triangular, sweeping blocks
/// backward.
fn solve_dual_quasi_triangular(t: &Matrix, c: &Matrix) -> Result<Matrix> {
    let n = t.rows();
    let blocks = crate::linalg::schur_blocks(t);
    let mut x = Matrix::zeros(n, n);
    for &(r0, p) in blocks.iter().rev() {
        for &(c0, q) in blocks.iter().rev() {
            let mut rhs = [[0.0; 2]; 2];
            for a in 0..p {
                let r = r0 + a;
                for b in 0..q {
                    let col = c0 + b;
                    let mut s = c[(r, col)];
                    for k in (r0 + p)..n {
                        s -= t[(r, k)] * x[(k, col)];
                    }
                    for k in (c0 + q)..n {
                        s -= x[(r, k)] * t[(col, k)];
                    }
                    rhs[a][b] = s;
                }
            }
            let y = solve_small(p, q, &rhs, |a, b, a2, b2| {
                let mut v = 0.0;
                if b == b2 {
                    v += t[(r0 + a, r0 + a2)];
                }
                if a == a2 {
                    v += t[(c0 + b, c0 + b2)];
                }
                v
            })?;
            for a in 0..p {
                for b in 0..q {
                    x[(r0 + a, c0 + b)] = y[a][b];
                }
            }
        }
    }
    Ok(x)
}

/// Dense solve of a `pq × pq` (at most 4×4) block equation.
fn solve_small(
    p: usize,
    q: usize,
    rhs: &[[f64; 2]; 2],
    coeff: impl Fn(usize, usize, usize, usize) -> f64,
) -> Result<[[f64; 2]; 2]> {
    let size = p * q;
    if size == 1 {
        let d = coeff(0, 0, 0, 0);
        if d == 0.0 {
            return Err(Error::Singular("Lyapunov block"));
        }
        return Ok([[rhs[0][0] / d, 0.0], [0.0, 0.0]]);
    }
    let mut m = Matrix::zeros(size, size);
    let mut b = vec![0.0; size];
    for a in 0..p {
        for bb in 0..q {
            let row = a * q + bb;
            b[row] = rhs[a][bb];
            for a2 in 0..p {
                for b2 in 0..q {
                    m[(row, a2 * q + b2)] = coeff(a, bb, a2, b2);
                }
            }
        }
    }
    let sol = Lu::new(&m)
        .map_err(|_| Error::Singular("Lyapunov block"))?
        .solve_vec(&b);
    let mut out = [[0.0; 2]; 2];
    for a in 0..p {
        for bb in 0..q {
            out[a][bb] = sol[a * q + bb];
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn negative_identity() {
        let p = solve_lyapunov_cont(&Matrix::identity(2).scale(-1.0), &Matrix::identity(2)).unwrap();
        assert!((&p - &Matrix::identity(2).scale(0.5)).max_abs() < 1e-15);
    }

    #[test]
    fn decoupled_scalars() {
        let a = Matrix::from_diag(&[-1.0, -2.0]);
        let p = solve_lyapunov_cont(&a, &Matrix::identity(2)).unwrap();
        assert!((&p - &Matrix::from_diag(&[0.5, 0.25])).max_abs() < 1e-15);
    }

    #[test]
    fn dual_scalar() {
        let l = solve_lyapunov_dual(&Matrix::from_rows(&[[-1.0]]), &Matrix::from_rows(&[[1.0]])).unwrap();
        assert_eq!(l[(0, 0)], 0.5);
    }

    #[test]
    fn rejects_unstable_and_marginal() {
        let err = solve_lyapunov_cont(&Matrix::from_rows(&[[0.5]]), &Matrix::from_rows(&[[1.0]]));
        assert_eq!(err.unwrap_err(), Error::Unstable { abscissa: 0.5 });
        let rot = Matrix::from_rows(&[[0.0, 1.0], [-1.0, 0.0]]);
        assert!(matches!(
            solve_lyapunov_cont(&rot, &Matrix::identity(2)),
            Err(Error::Unstable { .. })
        ));
    }

    #[test]
    fn schur_path_matches_kronecker_path() {
        // 10×10 with complex pairs: forces the Schur path; compare with the
        // dense operator directly.
        let n = 10;
        let a = Matrix::from_fn(n, n, |i, j| {
            if i == j {
                -2.0 - 0.1 * i as f64
            } else {
                libm::sin((3 * i + 7 * j) as f64)
            }
        });
        let w = Matrix::from_fn(n, n, |i, j| 1.0 / (1.0 + i as f64 + j as f64));
        let solver = LyapunovSolver::new(&a).unwrap();
        assert!(solver.schur().eigenvalues.iter().any(|e| e.im != 0.0));
        let p = solver.solve(&w).unwrap();
        let reference = kronecker_solve(&a, &w).unwrap();
        assert!((&p - &reference).frobenius_norm() <= 1e-10 * reference.frobenius_norm());
        let l = solver.solve_dual(&w).unwrap();
        let reference = kronecker_solve(&a.transpose(), &w).unwrap();
        assert!((&l - &reference).frobenius_norm() <= 1e-10 * reference.frobenius_norm());
    }
}
