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

//! The closed-form ADMM updates: block trim for `K_diag`, the three
//! proximal maps for `K_low`, and dual ascent.

use crate::admm::structure::BlockStructure;
use crate::error::{Error, Result};
use crate::linalg::svd;
use crate::matrix::Matrix;

/// `K + Λ/ρ − K_low`-style shifted argument shared by the proximal steps.
fn shifted(base: &Matrix, minus: &Matrix, dual: &Matrix, rho: f64) -> Matrix {
    let mut m = base - minus;
    m.axpy(1.0 / rho, dual);
    m
}

/// `K_diag = block_trim(Λ/ρ + K − K_low)`.
pub fn kdiag_step(k: &Matrix, k_low: &Matrix, dual: &Matrix, rho: f64, structure: &BlockStructure) -> Result<Matrix> {
    if rho == 0.0 {
        return Err(Error::InvalidConfig("rho must be non-zero"));
    }
    structure.check_gain(k)?;
    Ok(structure.block_trim(&shifted(k, k_low, dual, rho)))
}

/// Singular value soft thresholding of `M = K − K_diag + Λ/ρ` at `γ/ρ`:
/// the exact minimizer of `γ‖X‖_* + (ρ/2)‖M − X‖_F²`.
pub fn klow_step_soft(k: &Matrix, k_diag: &Matrix, dual: &Matrix, rho: f64, gamma: f64) -> Result<Matrix> {
    if !(rho > 0.0) || gamma < 0.0 {
        return Err(Error::InvalidConfig("soft threshold needs rho > 0 and gamma >= 0"));
    }
    let m = shifted(k, k_diag, dual, rho);
    Ok(singular_value_threshold(&m, gamma / rho)?)
}

/// `U·max(Σ − τ, 0)·Vᵀ`.
pub fn singular_value_threshold(m: &Matrix, tau: f64) -> Result<Matrix> {
    if tau == 0.0 {
        return Ok(m.clone());
    }
    let d = svd(m)?;
    let keep = d.s.iter().take_while(|&&s| s > tau).count();
    Ok(d.recompose_with(keep, |s| s - tau))
}

/// Best rank-`r` Frobenius approximation of `M = K − K_diag + Λ/ρ`.
pub fn klow_step_hard(k: &Matrix, k_diag: &Matrix, dual: &Matrix, rho: f64, rank: usize) -> Result<Matrix> {
    let m = shifted(k, k_diag, dual, rho);
    if rank == 0 || rank > m.rows().min(m.cols()) {
        return Err(Error::InvalidConfig("rank must lie in 1..=min(m, n)"));
    }
    truncate_rank(&m, rank)
}

/// `U_{1:r}·diag(σ_1..σ_r)·V_{1:r}ᵀ`; ties at `σ_r = σ_{r+1}` keep the SVD's
/// own column order.
pub fn truncate_rank(m: &Matrix, rank: usize) -> Result<Matrix> {
    let d = svd(m)?;
    Ok(d.recompose_with(rank, |s| s))
}

/// Element-wise soft threshold at `γ/ρ` on off-block-diagonal entries of
/// `M = K − K_diag + Λ/ρ`; block-diagonal entries pass through.
pub fn ksparse_step(
    k: &Matrix,
    k_diag: &Matrix,
    dual: &Matrix,
    rho: f64,
    gamma: f64,
    structure: &BlockStructure,
) -> Result<Matrix> {
    if !(rho > 0.0) || gamma < 0.0 {
        return Err(Error::InvalidConfig("soft threshold needs rho > 0 and gamma >= 0"));
    }
    structure.check_gain(k)?;
    let m = shifted(k, k_diag, dual, rho);
    let tau = gamma / rho;
    Ok(Matrix::from_fn(m.rows(), m.cols(), |i, j| {
        let v = m[(i, j)];
        if structure.is_block_diagonal(i, j) {
            v
        } else {
            soft_threshold(v, tau)
        }
    }))
}

#[inline]
pub fn soft_threshold(v: f64, tau: f64) -> f64 {
    if v > tau {
        v - tau
    } else if v < -tau {
        v + tau
    } else {
        0.0
    }
}

/// `Λ' = Λ + ρ(K − K_diag − K_low)`.
pub fn dual_step(dual: &Matrix, rho: f64, k: &Matrix, k_diag: &Matrix, k_low: &Matrix) -> Matrix {
    let mut residual = k - k_diag;
    residual -= k_low;
    let mut out = dual.clone();
    out.axpy(rho, &residual);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zeros() -> Matrix {
        Matrix::zeros(2, 2)
    }

    #[test]
    fn kdiag_trims_and_is_a_fixed_point() {
        let s = BlockStructure::uniform(2, 1, 1);
        let k = Matrix::from_rows(&[[2.0, 5.0], [7.0, 3.0]]);
        let out = kdiag_step(&k, &zeros(), &zeros(), 1.0, &s).unwrap();
        assert_eq!(out, Matrix::from_rows(&[[2.0, 0.0], [0.0, 3.0]]));
        assert_eq!(kdiag_step(&out, &zeros(), &zeros(), 1.0, &s).unwrap(), out);
        let all = BlockStructure::single_agent(2, 2);
        assert_eq!(kdiag_step(&k, &zeros(), &zeros(), 1.0, &all).unwrap(), k);
        assert!(kdiag_step(&k, &zeros(), &zeros(), 0.0, &s).is_err());
    }

    #[test]
    fn soft_svt_on_diagonal() {
        let m = Matrix::from_diag(&[3.0, 1.0]);
        // τ = γ/ρ = 2.
        let out = klow_step_soft(&m, &zeros(), &zeros(), 1.0, 2.0).unwrap();
        assert!((&out - &Matrix::from_diag(&[1.0, 0.0])).max_abs() < 1e-15);
        let out = klow_step_soft(&m, &zeros(), &zeros(), 4.0, 8.0).unwrap();
        assert!((&out - &Matrix::from_diag(&[1.0, 0.0])).max_abs() < 1e-15);
        assert_eq!(klow_step_soft(&m, &zeros(), &zeros(), 1.0, 0.0).unwrap(), m);
    }

    #[test]
    fn hard_truncation_on_diagonal() {
        let m = Matrix::from_diag(&[3.0, 1.0]);
        let out = klow_step_hard(&m, &zeros(), &zeros(), 1.0, 1).unwrap();
        assert!((&out - &Matrix::from_diag(&[3.0, 0.0])).max_abs() < 1e-15);
        let out = klow_step_hard(&m, &zeros(), &zeros(), 1.0, 2).unwrap();
        assert!((&out - &m).max_abs() < 1e-15);
        assert!(klow_step_hard(&m, &zeros(), &zeros(), 1.0, 3).is_err());
    }

    #[test]
    fn sparse_threshold_entries() {
        assert_eq!(soft_threshold(0.3, 0.5), 0.0);
        assert_eq!(soft_threshold(-2.0, 0.5), -1.5);
        let s = BlockStructure::uniform(2, 1, 1);
        let m = Matrix::from_rows(&[[4.0, 0.3], [-2.0, -4.0]]);
        let out = ksparse_step(&m, &zeros(), &zeros(), 2.0, 1.0, &s).unwrap();
        assert_eq!(out, Matrix::from_rows(&[[4.0, 0.0], [-1.5, -4.0]]));
        let out = ksparse_step(&m, &zeros(), &zeros(), 2.0, 0.0, &s).unwrap();
        assert_eq!(out, m);
    }

    #[test]
    fn dual_ascent_is_linear_in_residual() {
        let lambda = Matrix::from_rows(&[[1.0, 2.0], [3.0, 4.0]]);
        let k = Matrix::from_rows(&[[1.0, 1.0], [0.0, 1.0]]);
        let kd = Matrix::from_diag(&[1.0, 1.0]);
        let kl = Matrix::from_rows(&[[0.0, 1.0], [0.0, 0.0]]);
        assert_eq!(dual_step(&lambda, 5.0, &k, &kd, &kl), lambda);
        let kl0 = zeros();
        let r0 = &(&k - &kd) - &kl0;
        assert_eq!(dual_step(&zeros(), 1.0, &k, &kd, &kl0), r0);
        let twice = dual_step(&dual_step(&lambda, 3.0, &k, &kd, &kl0), 3.0, &k, &kd, &kl0);
        assert!((&(&twice - &lambda) - &r0.scale(6.0)).max_abs() < 1e-15);
    }
}
