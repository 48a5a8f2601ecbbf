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

//! Dense decompositions: LU, Householder QR least squares, symmetric
//! eigendecomposition, SVD and the real Schur form.

mod lu;
mod qr;
mod schur;
mod svd;
mod symeig;

pub use lu::Lu;
pub use qr::lstsq;
pub use schur::{eigenvalues, real_schur, spectral_abscissa, Eigenvalue, SchurForm};
pub(crate) use schur::diagonal_blocks as schur_blocks;
pub use svd::{svd, Svd};
pub use symeig::{sym_eigen, SymEigen};
