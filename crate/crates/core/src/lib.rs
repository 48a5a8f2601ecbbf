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

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod admm;
pub mod error;
pub mod linalg;
pub mod lqr;
pub mod lyapunov;
pub mod matrix;
pub mod model;
pub mod network;

pub use error::{Error, Result};
pub use matrix::Matrix;
pub use model::{is_stabilizing, StateSpaceModel};
