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

//! Continuous-time state-space models `ẋ = A·x + B1·u + B2·w` with quadratic
//! weights.

use crate::error::{Error, Result};
use crate::linalg::{spectral_abscissa, sym_eigen};
use crate::matrix::Matrix;

const SYMMETRY_RTOL: f64 = 1e-10;
const PSD_RTOL: f64 = 1e-10;

/// Plant and LQR weights. `A` is `n×n`, `B1` is `n×m` (control), `B2` is
/// `n×l` (disturbance), `Q` is `n×n`, `R` is `m×m`. The output matrices are
/// carried along for file round trips and never enter a cost.
#[derive(Debug, Clone, PartialEq)]
pub struct StateSpaceModel {
    a: Matrix,
    b1: Matrix,
    b2: Matrix,
    q: Matrix,
    r: Matrix,
    c: Option<Matrix>,
    d: Option<Matrix>,
}

impl StateSpaceModel {
    pub fn new(a: Matrix, b1: Matrix, b2: Matrix, q: Matrix, r: Matrix) -> Result<Self> {
        let n = a.rows();
        a.check_shape("A", n, n)?;
        let m = b1.cols();
        b1.check_shape("B1", n, m)?;
        b2.check_shape("B2", n, b2.cols())?;
        q.check_shape("Q", n, n)?;
        r.check_shape("R", m, m)?;
        if n == 0 || m == 0 {
            return Err(Error::InvalidModel("model needs at least one state and one input"));
        }
        if q.asymmetry() > SYMMETRY_RTOL * q.max_abs().max(f64::MIN_POSITIVE) {
            return Err(Error::InvalidModel("Q is not symmetric"));
        }
        let q_norm = q.frobenius_norm();
        let q_min = sym_eigen(&q)?.values[0];
        if q_min < -PSD_RTOL * q_norm {
            return Err(Error::InvalidModel("Q is not positive semidefinite"));
        }
        if r.asymmetry() > SYMMETRY_RTOL * r.max_abs().max(f64::MIN_POSITIVE) {
            return Err(Error::InvalidModel("R is not symmetric"));
        }
        if sym_eigen(&r)?.values[0] <= 0.0 {
            return Err(Error::InvalidModel("R is not positive definite"));
        }
        Ok(Self {
            a,
            b1,
            b2,
            q: q.symmetrize(),
            r: r.symmetrize(),
            c: None,
            d: None,
        })
    }

    /// Attaches output matrices `y = C·x + D·u`.
    pub fn with_output(mut self, c: Matrix, d: Matrix) -> Result<Self> {
        c.check_shape("C", c.rows(), self.n())?;
        d.check_shape("D", c.rows(), self.m())?;
        self.c = Some(c);
        self.d = Some(d);
        Ok(self)
    }

    /// State count.
    pub fn n(&self) -> usize {
        self.a.rows()
    }

    /// Input count.
    pub fn m(&self) -> usize {
        self.b1.cols()
    }

    /// Disturbance count.
    pub fn l(&self) -> usize {
        self.b2.cols()
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }

    pub fn b1(&self) -> &Matrix {
        &self.b1
    }

    pub fn b2(&self) -> &Matrix {
        &self.b2
    }

    pub fn q(&self) -> &Matrix {
        &self.q
    }

    pub fn r(&self) -> &Matrix {
        &self.r
    }

    pub fn c(&self) -> Option<&Matrix> {
        self.c.as_ref()
    }

    pub fn d(&self) -> Option<&Matrix> {
        self.d.as_ref()
    }

    pub(crate) fn check_gain(&self, k: &Matrix) -> Result<()> {
        k.check_shape("K", self.m(), self.n())
    }

    /// `A − B1·K`
    pub fn closed_loop(&self, k: &Matrix) -> Result<Matrix> {
        self.check_gain(k)?;
        Ok(&self.a - &self.b1.matmul(k))
    }
}

/// `true` iff every eigenvalue of `A − B1·K` has real part `< 0`.
pub fn is_stabilizing(model: &StateSpaceModel, k: &Matrix) -> Result<bool> {
    is_stabilizing_with_margin(model, k, 0.0)
}

/// `true` iff the spectral abscissa of `A − B1·K` is below `-margin`.
pub fn is_stabilizing_with_margin(model: &StateSpaceModel, k: &Matrix, margin: f64) -> Result<bool> {
    Ok(spectral_abscissa(&model.closed_loop(k)?)? < -margin)
}
