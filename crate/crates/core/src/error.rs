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

use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Failures raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{what}: expected {expected:?}, found {found:?}")]
    Dimension {
        what: &'static str,
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("invalid model: {0}")]
    InvalidModel(&'static str),
    #[error("invalid configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("eigenvalue iteration failed to converge on a {dim}x{dim} matrix")]
    EigenConvergence { dim: usize },
    #[error("SVD failed to converge on a {rows}x{cols} matrix")]
    SvdConvergence { rows: usize, cols: usize },
    #[error("singular linear system ({0})")]
    Singular(&'static str),
    /// Raised whenever a closed loop that must be Hurwitz is not; carries the
    /// offending spectral abscissa. An unstable gain has infinite LQR cost.
    #[error("unstable closed loop (spectral abscissa {abscissa:e})")]
    Unstable { abscissa: f64 },
    #[error("Hamiltonian has eigenvalues on the imaginary axis; (A, B1) not stabilizable or (A, Q) not detectable")]
    NotStabilizable,
    #[error("Riccati solution failed: {0}")]
    Riccati(&'static str),
    #[error("inner K-step stalled after {iterations} iterations (gradient norm {grad_norm:e})")]
    InnerStall { iterations: usize, grad_norm: f64 },
    #[error("outer iteration {outer}: {source}")]
    Outer {
        outer: usize,
        #[source]
        source: alloc::boxed::Box<Error>,
    },
    #[error("sparse calibration found no stabilizing design")]
    Calibration,
}
